//! Whole-catalog checks shared by the invariant tests and the acceptance report.
//! Each returns the number of individual assertions made, or the first failure.

use dpdelta::blowup::{blowup, center_multiplicities, pullback};
use dpdelta::catalog::CaseRecord;
use dpdelta::config::{intersect, validate, DivisorClass};
use dpdelta::delta::h_from;
use dpdelta::linalg::is_negative_definite;
use dpdelta::oracle::quadrature_check;
use dpdelta::zariski::parametric_decompose;
use dpdelta::{r, Rat};

use super::FlagInstance;

type Check = Result<usize, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)*) => {
        if !$cond {
            return Err(format!($($fmt)*));
        }
    };
}

fn samples(lo: &Rat, hi: &Rat) -> Vec<Rat> {
    let w = hi - lo;
    [r("0"), r("1/3"), r("1/2"), r("5/7")].iter().map(|t| lo + &(&w * t)).collect()
}

/// P nef on the curves, P·N = 0, N effective with negative-definite support,
/// P² nonincreasing, continuous, P²(0) = (-K)² and P²(τ) = 0.
pub fn decomposition_invariants(inst: &FlagInstance) -> Check {
    let cfg = &inst.config;
    let label = inst.label();
    let d = parametric_decompose(cfg, &inst.flag).map_err(|e| format!("{label}: {e}"))?;
    let mut n_checks = 0;
    let p_sq = d.p_sq();
    ensure!(p_sq.eval(&d.tau).unwrap().is_zero(), "{label}: P²(τ) ≠ 0");
    ensure!(p_sq.eval(&Rat::zero()).unwrap() == cfg.norm, "{label}: P²(0) ≠ (-K)²");
    for w in d.chambers.windows(2) {
        ensure!(w[0].p_sq.eval(&w[0].hi) == w[1].p_sq.eval(&w[1].lo), "{label}: P² jumps at {}", w[0].hi);
    }
    for c in &d.chambers {
        let idx: Vec<usize> = c.support.iter().map(|s| cfg.index_of(s).unwrap()).collect();
        let sub: Vec<Vec<Rat>> = idx.iter().map(|&i| idx.iter().map(|&j| cfg.gram[i][j].clone()).collect()).collect();
        ensure!(sub.is_empty() || is_negative_definite(&sub), "{label}: support {:?} not negative definite", c.support);
        let dp = c.p_sq.derivative();
        for v in samples(&c.lo, &c.hi) {
            ensure!(!dp.eval(&v).is_positive(), "{label}: P² increases at {v}");
            let n = d.negative_part(&v).unwrap();
            ensure!(n.coeffs.iter().all(|x| x.is_positive()), "{label}: N({v}) not effective");
            let nclass = n.as_class(cfg).unwrap();
            let pclass = cfg.sweep_class(&inst.flag, &v).unwrap().sub(&nclass);
            let dots = cfg.dots(&pclass);
            ensure!(dots.iter().all(|x| !x.is_negative()), "{label}: P({v}) not nef on the curves");
            for s in &n.support {
                ensure!(dots[cfg.index_of(s).unwrap()].is_zero(), "{label}: P·{s} ≠ 0 at {v}");
            }
            ensure!(intersect(cfg, &pclass, &nclass).unwrap().is_zero(), "{label}: P·N ≠ 0 at {v}");
            ensure!(intersect(cfg, &pclass, &pclass).unwrap() == c.p_sq.eval(&v), "{label}: P² at {v}");
            n_checks += 1;
        }
    }
    Ok(n_checks)
}

/// Exact integrals of P² and of h at every catalog point agree with quadrature.
pub fn quadrature(inst: &FlagInstance, tol: f64) -> Check {
    let label = inst.label();
    let d = parametric_decompose(&inst.config, &inst.flag).map_err(|e| format!("{label}: {e}"))?;
    ensure!(quadrature_check(&d.p_sq(), tol).unwrap(), "{label}: P²");
    for pid in &inst.points {
        let p = inst.config.point(pid).unwrap();
        ensure!(quadrature_check(&h_from(&d, p), tol).unwrap(), "{label}: h at {pid}");
    }
    Ok(1 + inst.points.len())
}

/// Pullback preserves pairings of basis classes and -K, E_P is orthogonal to
/// pullbacks, and (-K)² is unchanged.
pub fn blowup_preservation(case: &CaseRecord) -> Check {
    let configs = case.resolve_configs().map_err(|e| e.to_string())?;
    let mut n_checks = 0;
    for b in &case.blowups {
        let label = format!("{} blowup {}", case.name, b.id);
        let old = &configs[&b.config];
        let point = old.point(&b.point).unwrap();
        let res = blowup(old, point).map_err(|e| format!("{label}: {e}"))?;
        let mult = center_multiplicities(point);
        let n = old.n();
        let basis: Vec<DivisorClass> = (0..n)
            .map(|i| DivisorClass((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()))
            .chain([old.anti_k_class()])
            .collect();
        let e = res.config.curve_class(&res.e_p_name).unwrap();
        for x in &basis {
            let px = pullback(old, &mult, x).unwrap();
            for y in &basis {
                let py = pullback(old, &mult, y).unwrap();
                ensure!(
                    intersect(&res.config, &px, &py).unwrap() == intersect(old, x, y).unwrap(),
                    "{label}: pairing changed"
                );
                n_checks += 1;
            }
            ensure!(intersect(&res.config, &px, &e).unwrap().is_zero(), "{label}: E_P meets a pullback");
        }
        let ak = res.config.anti_k_class();
        ensure!(intersect(&res.config, &ak, &ak).unwrap() == old.norm, "{label}: (-K)² changed");
    }
    Ok(n_checks)
}

/// Every config validates, and targeted corruptions trip the matching rule.
pub fn validation_mutations(case: &CaseRecord) -> Check {
    let mut n_checks = 0;
    for (key, cfg) in case.resolve_configs().map_err(|e| e.to_string())? {
        let label = format!("{} [{key}]", case.name);
        ensure!(validate(&cfg).ok(), "{label}: does not validate");
        n_checks += 1;
        let n = cfg.n();
        let Some((i, j)) = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| !cfg.gram[i][j].is_zero())
        else {
            continue;
        };

        let mut m = cfg.clone();
        m.gram[i][j] = &m.gram[i][j] + &Rat::one();
        ensure!(validate(&m).failed("gram symmetric"), "{label}: asymmetric gram accepted");

        // moving a pairing of two curves in the support of -K changes (-K)²
        m.gram[j][i] = m.gram[i][j].clone();
        if !(cfg.anti_k[i].is_zero() || cfg.anti_k[j].is_zero()) {
            ensure!(validate(&m).failed("anti_k norm"), "{label}: changed pairing kept the norm");
        }

        let mut m = cfg.clone();
        m.gram[0][0] = &m.gram[0][0] - &Rat::one();
        ensure!(validate(&m).failed("gram diagonal"), "{label}: diagonal change accepted");

        if cfg.smooth_surface {
            let mut m = cfg.clone();
            m.anti_k[0] = &m.anti_k[0] + &Rat::one();
            ensure!(validate(&m).failed("adjunction"), "{label}: shifted anti_k passed adjunction");
        }
        n_checks += 3;
    }
    Ok(n_checks)
}
