//! Brute-force negative parts by enumerating negative-definite curve
//! subsets, and a floating-point quadrature cross-check.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{DivisorClass, SurfaceConfig};
use crate::error::{Error, Result};
use crate::linalg::{inverse, is_negative_definite, Matrix};
use crate::piecewise::PiecewisePoly;
use crate::rat::Rat;
use crate::zariski::{parametric_decompose, NegativePart};

pub const MAX_CURVES: usize = 16;
const PREFILTER_TOL: f64 = 1e-9;
const MAX_DENOM: i64 = 10_000;
const SIMPSON_PANELS: usize = 10_000;

struct Subset {
    idx: Vec<usize>,
    inv_f64: Vec<Vec<f64>>,
    inv: OnceLock<Matrix>,
}

/// Every negative-definite subset of a config's curves, with inverses of
/// the restricted Gram matrices.
pub struct SubsetTable<'a> {
    config: &'a SurfaceConfig,
    gram_f64: Vec<Vec<f64>>,
    subsets: Vec<Subset>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Solution {
    pub subset: Vec<String>,
    pub coeffs: Vec<Rat>,
}

fn restrict(gram: &Matrix, idx: &[usize]) -> Matrix {
    idx.iter().map(|&i| idx.iter().map(|&j| gram[i][j].clone()).collect()).collect()
}

fn inverse_f64(m: &Matrix) -> Vec<Vec<f64>> {
    let inv = inverse(m).expect("negative definite matrices are invertible");
    inv.iter().map(|row| row.iter().map(Rat::to_f64).collect()).collect()
}

impl<'a> SubsetTable<'a> {
    pub fn new(config: &'a SurfaceConfig) -> Result<SubsetTable<'a>> {
        let n = config.n();
        if n > MAX_CURVES {
            return Err(Error::Precondition(format!("{n} curves exceeds the oracle limit of {MAX_CURVES}")));
        }
        let mut subsets = vec![Subset { idx: vec![], inv_f64: vec![], inv: OnceLock::new() }];
        // subsets of a negative-definite set are negative definite, so a
        // depth-first search in index order can prune at the first failure
        let mut stack: Vec<Vec<usize>> = vec![vec![]];
        while let Some(cur) = stack.pop() {
            let start = cur.last().map_or(0, |&i| i + 1);
            for i in start..n {
                let mut next = cur.clone();
                next.push(i);
                let g = restrict(&config.gram, &next);
                if is_negative_definite(&g) {
                    subsets.push(Subset { idx: next.clone(), inv_f64: inverse_f64(&g), inv: OnceLock::new() });
                    stack.push(next);
                }
            }
        }
        let gram_f64 = config.gram.iter().map(|row| row.iter().map(Rat::to_f64).collect()).collect();
        Ok(SubsetTable { config, gram_f64, subsets })
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    /// Every subset S admitting N supported on S with `(D - N)·Γ = 0` on S,
    /// nonnegative coefficients and `D - N` nef against all curves.
    pub fn solutions(&self, d: &DivisorClass) -> Vec<Solution> {
        let cfg = self.config;
        let n = cfg.n();
        let d_dot = cfg.dots(d);
        let d_dot_f: Vec<f64> = d_dot.iter().map(Rat::to_f64).collect();
        let mut out = vec![];
        for s in &self.subsets {
            // N = G_S^{-1} (D·Γ)_S
            let x: Vec<f64> = s
                .inv_f64
                .iter()
                .map(|row| row.iter().zip(&s.idx).map(|(g, &j)| g * d_dot_f[j]).sum())
                .collect();
            if x.iter().any(|c| *c < -PREFILTER_TOL) {
                continue;
            }
            let nef = (0..n).all(|i| {
                let nd: f64 = s.idx.iter().zip(&x).map(|(&j, c)| self.gram_f64[i][j] * c).sum();
                d_dot_f[i] - nd >= -PREFILTER_TOL
            });
            if !nef {
                continue;
            }
            if let Some(sol) = self.exact_check(s, &d_dot) {
                out.push(sol);
            }
        }
        out
    }

    fn exact_check(&self, s: &Subset, d_dot: &[Rat]) -> Option<Solution> {
        let cfg = self.config;
        let inv = s.inv.get_or_init(|| inverse(&restrict(&cfg.gram, &s.idx)).expect("invertible"));
        let x: Vec<Rat> = inv
            .iter()
            .map(|row| row.iter().zip(&s.idx).map(|(g, &j)| g * &d_dot[j]).sum())
            .collect();
        if x.iter().any(Rat::is_negative) {
            return None;
        }
        for (i, dd) in d_dot.iter().enumerate() {
            let nd: Rat = s.idx.iter().zip(&x).map(|(&j, c)| &cfg.gram[i][j] * c).sum();
            if (dd - nd).is_negative() {
                return None;
            }
        }
        Some(Solution { subset: s.idx.iter().map(|&i| cfg.curves[i].name.clone()).collect(), coeffs: x })
    }

    pub fn negative_part(&self, d: &DivisorClass) -> Result<NegativePart> {
        let sols = self.solutions(d);
        let mut classes: Vec<NegativePart> = vec![];
        for s in &sols {
            let np = solution_part(self.config, s);
            if !classes.contains(&np) {
                classes.push(np);
            }
        }
        match classes.len() {
            0 => Err(Error::NoSolution),
            1 => Ok(classes.pop().unwrap()),
            k => Err(Error::Ambiguous(k)),
        }
    }
}

/// Nonzero part of a solution in config curve order.
fn solution_part(config: &SurfaceConfig, s: &Solution) -> NegativePart {
    let mut pairs: Vec<(usize, &String, &Rat)> = s
        .subset
        .iter()
        .zip(&s.coeffs)
        .filter(|(_, c)| !c.is_zero())
        .map(|(name, c)| (config.index_of(name).expect("subset names come from config"), name, c))
        .collect();
    pairs.sort_by_key(|p| p.0);
    NegativePart {
        support: pairs.iter().map(|p| p.1.clone()).collect(),
        coeffs: pairs.iter().map(|p| p.2.clone()).collect(),
    }
}

pub fn brute_force_negative_part(config: &SurfaceConfig, d: &DivisorClass) -> Result<NegativePart> {
    SubsetTable::new(config)?.negative_part(d)
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleOutcome {
    pub v: Rat,
    pub solutions: Vec<Solution>,
    pub oracle: Option<NegativePart>,
    pub engine: NegativePart,
    pub error: Option<String>,
    pub agrees_with_engine: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub config: String,
    pub flag: String,
    pub seed: u64,
    pub trials: usize,
    pub agreed: usize,
    pub ambiguous: usize,
    pub mismatches: Vec<OracleOutcome>,
}

impl EquivalenceReport {
    pub fn ok(&self) -> bool {
        self.agreed == self.trials && self.ambiguous == 0
    }
}

impl std::fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} flag {} seed {}: {}/{} agree", self.config, self.flag, self.seed, self.agreed, self.trials)?;
        if self.ambiguous > 0 {
            write!(f, ", {} ambiguous", self.ambiguous)?;
        }
        for m in &self.mismatches {
            write!(f, "\n  v={}: engine {:?} {:?}, oracle {:?}", m.v, m.engine.support, m.engine.coeffs, m.oracle)?;
            if let Some(e) = &m.error {
                write!(f, " ({e})")?;
            }
        }
        Ok(())
    }
}

/// Uniform-ish rational strictly inside (0, tau) with denominator at most 10^4.
pub fn random_rational_below(rng: &mut ChaCha8Rng, tau: &Rat) -> Rat {
    loop {
        let q = rng.gen_range(1..=MAX_DENOM);
        // largest k with k/q < tau
        let scaled = tau * &Rat::int(q);
        let fl = scaled.0.floor().to_integer();
        let mut kmax: i64 = i64::try_from(fl).unwrap_or(i64::MAX / 2);
        if Rat::from(num_bigint::BigInt::from(kmax)) == scaled {
            kmax -= 1;
        }
        if kmax >= 1 {
            return Rat::new(rng.gen_range(1..=kmax), q);
        }
    }
}

pub fn random_equivalence(config: &SurfaceConfig, flag: &str, trials: usize, seed: u64) -> Result<EquivalenceReport> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let decomp = parametric_decompose(config, flag)?;
    let table = SubsetTable::new(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = EquivalenceReport {
        config: config.name.clone(),
        flag: flag.to_string(),
        seed,
        trials,
        agreed: 0,
        ambiguous: 0,
        mismatches: vec![],
    };
    for _ in 0..trials {
        let v = random_rational_below(&mut rng, &decomp.tau);
        let engine = decomp.negative_part(&v)?;
        let d = config.sweep_class(flag, &v)?;
        let solutions = table.solutions(&d);
        let (oracle, error) = match table.negative_part(&d) {
            Ok(np) => (Some(np), None),
            Err(e) => {
                if matches!(e, Error::Ambiguous(_)) {
                    report.ambiguous += 1;
                }
                (None, Some(e.to_string()))
            }
        };
        let agrees = oracle.as_ref() == Some(&engine);
        if agrees {
            report.agreed += 1;
        } else {
            report.mismatches.push(OracleOutcome { v, solutions, oracle, engine, error, agrees_with_engine: false });
        }
    }
    Ok(report)
}

/// Composite Simpson's rule on each piece against the exact integral.
pub fn quadrature_check(pp: &PiecewisePoly, tol: f64) -> Result<bool> {
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!("tolerance {tol} must be positive")));
    }
    let mut approx = 0.0;
    for (a, b, p) in pp.iter() {
        let (a, b) = (a.to_f64(), b.to_f64());
        let h = (b - a) / SIMPSON_PANELS as f64;
        let mut acc = p.eval_f64(a) + p.eval_f64(b);
        for k in 1..SIMPSON_PANELS {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * p.eval_f64(a + h * k as f64);
        }
        approx += acc * h / 3.0;
    }
    Ok((approx - pp.integrate_all().to_f64()).abs() <= tol)
}
