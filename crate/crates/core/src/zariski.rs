//! Zariski decomposition of `D(v) = anti_k - v F`, at a single v and as a
//! chamber sweep over `[0, τ]`.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::config::{DivisorClass, PointSpec, SurfaceConfig};
use crate::error::{Error, Result};
use crate::linalg::{self, is_negative_definite, Matrix};
use crate::piecewise::PiecewisePoly;
use crate::poly::{min_positive_root, Poly};
use crate::rat::Rat;

/// Name → polynomial map that keeps insertion (config) order, serialized as
/// a JSON object.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct NamedPolys(pub Vec<(String, Poly)>);

impl NamedPolys {
    pub fn get(&self, name: &str) -> Option<&Poly> {
        self.0.iter().find(|(k, _)| k == name).map(|(_, p)| p)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Poly)> {
        self.0.iter().map(|(k, p)| (k, p))
    }
}

impl Serialize for NamedPolys {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, p) in &self.0 {
            m.serialize_entry(k, p)?;
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for NamedPolys {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<NamedPolys, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = NamedPolys;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a map of polynomials")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut a: A) -> std::result::Result<NamedPolys, A::Error> {
                let mut out = vec![];
                while let Some((k, p)) = a.next_entry::<String, Poly>()? {
                    out.push((k, p));
                }
                Ok(NamedPolys(out))
            }
        }
        d.deserialize_map(V)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chamber {
    pub lo: Rat,
    pub hi: Rat,
    pub support: Vec<String>,
    pub n_coeffs: NamedPolys,
    pub p_sq: Poly,
    pub p_dot: NamedPolys,
    #[serde(default)]
    pub n_dot_flag: NamedPolys,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub flag: String,
    pub tau: Rat,
    pub chambers: Vec<Chamber>,
}

/// Negative part at one value of v; only curves with nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NegativePart {
    pub support: Vec<String>,
    pub coeffs: Vec<Rat>,
}

impl NegativePart {
    pub fn coeff(&self, name: &str) -> Rat {
        self.support
            .iter()
            .position(|s| s == name)
            .map(|i| self.coeffs[i].clone())
            .unwrap_or_default()
    }

    pub fn as_class(&self, config: &SurfaceConfig) -> Result<DivisorClass> {
        let mut d = DivisorClass::zero(config.n());
        for (s, c) in self.support.iter().zip(&self.coeffs) {
            d.0[config.index_of(s)?] = c.clone();
        }
        Ok(d)
    }
}

fn restrict(gram: &Matrix, idx: &[usize]) -> Matrix {
    idx.iter().map(|&i| idx.iter().map(|&j| gram[i][j].clone()).collect()).collect()
}

/// Negative part of a fixed class by the iterative scheme: start with the
/// curves meeting D negatively, solve `P·Γ = 0` on the support, add curves
/// the new positive part meets negatively, repeat.
pub fn negative_part_at(config: &SurfaceConfig, d: &DivisorClass) -> Result<NegativePart> {
    let d_dot = config.dots(d);
    let n = config.n();
    let mut support: Vec<usize> = vec![];
    loop {
        let coeffs = solve_support(config, &support, &d_dot)?;
        let mut p_dot = d_dot.clone();
        for (k, &j) in support.iter().enumerate() {
            for (i, pd) in p_dot.iter_mut().enumerate() {
                *pd -= &(&config.gram[i][j] * &coeffs[k]);
            }
        }
        let new: Vec<usize> = (0..n).filter(|i| !support.contains(i) && p_dot[*i].is_negative()).collect();
        if new.is_empty() {
            let mut out = NegativePart { support: vec![], coeffs: vec![] };
            let mut order: Vec<(usize, Rat)> = support.into_iter().zip(coeffs).collect();
            order.sort_by_key(|(i, _)| *i);
            for (i, c) in order {
                if c.is_negative() {
                    return Err(Error::NotPseudoEffective(format!("negative coefficient on {}", config.curves[i].name)));
                }
                if !c.is_zero() {
                    out.support.push(config.curves[i].name.clone());
                    out.coeffs.push(c);
                }
            }
            return Ok(out);
        }
        support.extend(new);
    }
}

fn solve_support(config: &SurfaceConfig, support: &[usize], d_dot: &[Rat]) -> Result<Vec<Rat>> {
    if support.is_empty() {
        return Ok(vec![]);
    }
    let g = restrict(&config.gram, support);
    if !is_negative_definite(&g) {
        return Err(Error::NotPseudoEffective(format!(
            "support {:?} is not negative definite",
            support.iter().map(|&i| &config.curves[i].name).collect::<Vec<_>>()
        )));
    }
    let b: Vec<Rat> = support.iter().map(|&i| d_dot[i].clone()).collect();
    Ok(linalg::solve(&g, &b).expect("negative definite is invertible"))
}

/// Sign of an affine function just to the right of `lo`.
fn germ_sign(f: &Poly, lo: &Rat) -> Ordering {
    let v = f.eval(lo);
    if v.is_zero() {
        f.coeff(1).cmp(&Rat::zero())
    } else {
        v.cmp(&Rat::zero())
    }
}

struct ChamberSolve {
    support: Vec<usize>,
    n: Vec<Poly>,
    p_dot: Vec<Poly>,
}

/// The iterative scheme run over germs of affine functions at `lo+`, which
/// yields the support valid on `[lo, lo + ε]`.
fn solve_chamber(config: &SurfaceConfig, d_dot: &[Poly], lo: &Rat) -> Result<ChamberSolve> {
    let nc = config.n();
    let mut support: Vec<usize> = vec![];
    loop {
        let (n, p_dot) = affine_solve(config, &support, d_dot)?;
        let new: Vec<usize> = (0..nc)
            .filter(|i| !support.contains(i) && germ_sign(&p_dot[*i], lo) == Ordering::Less)
            .collect();
        if new.is_empty() {
            for (k, c) in n.iter().enumerate() {
                if germ_sign(c, lo) == Ordering::Less {
                    return Err(Error::NotPseudoEffective(format!(
                        "coefficient of {} negative after v = {lo}",
                        config.curves[support[k]].name
                    )));
                }
            }
            // curves whose coefficient vanishes identically carry nothing
            let keep: Vec<usize> = support.iter().zip(&n).filter(|(_, c)| !c.is_zero()).map(|(&i, _)| i).collect();
            if keep.len() != support.len() {
                let (n, p_dot) = affine_solve(config, &keep, d_dot)?;
                return Ok(ChamberSolve { support: keep, n, p_dot });
            }
            return Ok(ChamberSolve { support, n, p_dot });
        }
        support.extend(new);
        support.sort();
    }
}

fn affine_solve(config: &SurfaceConfig, support: &[usize], d_dot: &[Poly]) -> Result<(Vec<Poly>, Vec<Poly>)> {
    let mut n = vec![];
    if !support.is_empty() {
        let g = restrict(&config.gram, support);
        if !is_negative_definite(&g) {
            return Err(Error::NotPseudoEffective(format!(
                "support {:?} is not negative definite",
                support.iter().map(|&i| &config.curves[i].name).collect::<Vec<_>>()
            )));
        }
        let inv = linalg::inverse(&g).expect("negative definite is invertible");
        for row in &inv {
            let mut acc = Poly::zero();
            for (k, &j) in support.iter().enumerate() {
                acc = &acc + &d_dot[j].scale(&row[k]);
            }
            n.push(acc);
        }
    }
    let p_dot = (0..config.n())
        .map(|i| {
            let mut acc = d_dot[i].clone();
            for (k, &j) in support.iter().enumerate() {
                acc = &acc - &n[k].scale(&config.gram[i][j]);
            }
            acc
        })
        .collect();
    Ok((n, p_dot))
}

/// Affine `D(v)·Γ_i` for every curve.
fn sweep_dots(config: &SurfaceConfig, f: usize) -> Vec<Poly> {
    let ak = config.dots(&config.anti_k_class());
    (0..config.n()).map(|i| Poly::affine(ak[i].clone(), -&config.gram[i][f])).collect()
}

/// Root of an affine function strictly after `lo` where it crosses from
/// positive to negative.
fn descending_root(f: &Poly, lo: &Rat) -> Option<Rat> {
    let slope = f.coeff(1);
    if !slope.is_negative() {
        return None;
    }
    let r = -f.coeff(0) / slope;
    (r > *lo).then_some(r)
}

/// Chamber sweep for the flag curve `flag` over `[0, τ]`.
pub fn parametric_decompose(config: &SurfaceConfig, flag: &str) -> Result<Decomposition> {
    let f = config.index_of(flag)?;
    let d_dot = sweep_dots(config, f);
    let ak = config.anti_k_class();
    let k2 = crate::config::intersect(config, &ak, &ak)?;
    let ak_f = config.dots(&ak)[f].clone();
    // D(v)^2 = K^2 - 2 v (anti_k·F) + v^2 F^2
    let d_sq = Poly::new(vec![k2, Rat::int(-2) * &ak_f, config.gram[f][f].clone()]);
    let points: Vec<&PointSpec> = config.points.iter().filter(|p| p.on_curve == flag).collect();

    let mut chambers = vec![];
    let mut lo = Rat::zero();
    loop {
        if chambers.len() > 4 * config.n() + 4 {
            return Err(Error::NotPseudoEffective("sweep does not terminate".into()));
        }
        let cs = solve_chamber(config, &d_dot, &lo)?;
        // P^2 = D^2 - D·N
        let mut p_sq = d_sq.clone();
        for (k, &j) in cs.support.iter().enumerate() {
            p_sq = &p_sq - &(&cs.n[k] * &d_dot[j]);
        }
        if !p_sq.eval(&lo).is_positive() {
            return Err(Error::NotPseudoEffective(format!("volume vanishes at chamber start {lo}")));
        }
        let mut hi_aff: Option<Rat> = None;
        let mut bump = |r: Option<Rat>| {
            if let Some(r) = r {
                if hi_aff.as_ref().is_none_or(|h| r < *h) {
                    hi_aff = Some(r);
                }
            }
        };
        for i in 0..config.n() {
            if !cs.support.contains(&i) {
                bump(descending_root(&cs.p_dot[i], &lo));
            }
        }
        for c in &cs.n {
            bump(descending_root(c, &lo));
        }
        let (hi, last) = match &hi_aff {
            Some(h) if p_sq.eval(h).is_positive() => (h.clone(), false),
            _ => match min_positive_root(&p_sq, &lo)? {
                Some(t) if t > lo => (t, true),
                _ => return Err(Error::NotPseudoEffective(format!("no volume threshold after {lo}"))),
            },
        };
        let names = |i: usize| config.curves[i].name.clone();
        let n_coeffs = NamedPolys(cs.support.iter().zip(&cs.n).map(|(&i, p)| (names(i), p.clone())).collect());
        let p_dot = NamedPolys((0..config.n()).map(|i| (names(i), cs.p_dot[i].clone())).collect());
        let n_dot_flag = NamedPolys(
            points
                .iter()
                .map(|pt| (pt.id.clone(), restricted_n(&n_coeffs, pt)))
                .collect(),
        );
        chambers.push(Chamber {
            lo: lo.clone(),
            hi: hi.clone(),
            support: cs.support.iter().map(|&i| names(i)).collect(),
            n_coeffs,
            p_sq,
            p_dot,
            n_dot_flag,
        });
        if last {
            return Ok(Decomposition { flag: flag.to_string(), tau: hi, chambers });
        }
        lo = hi;
    }
}

/// `(N·F)_P = Σ n_Γ (Γ·F)_P` on one chamber.
fn restricted_n(n_coeffs: &NamedPolys, point: &PointSpec) -> Poly {
    let mut acc = Poly::zero();
    for (name, m) in &point.incidences {
        if let Some(c) = n_coeffs.get(name) {
            acc = &acc + &c.scale(&Rat::int(*m as i64));
        }
    }
    acc
}

impl Decomposition {
    pub fn breakpoints(&self) -> Vec<Rat> {
        let mut b: Vec<Rat> = self.chambers.iter().map(|c| c.lo.clone()).collect();
        b.push(self.tau.clone());
        b
    }

    fn piecewise(&self, f: impl Fn(&Chamber) -> Poly) -> PiecewisePoly {
        PiecewisePoly::new(self.breakpoints(), self.chambers.iter().map(f).collect())
            .expect("chambers abut")
    }

    pub fn p_sq(&self) -> PiecewisePoly {
        self.piecewise(|c| c.p_sq.clone())
    }

    /// `P(v)·Γ` as a piecewise polynomial.
    pub fn p_dot(&self, curve: &str) -> Result<PiecewisePoly> {
        if self.chambers[0].p_dot.get(curve).is_none() {
            return Err(Error::UnknownCurve(curve.to_string()));
        }
        Ok(self.piecewise(|c| c.p_dot.get(curve).cloned().unwrap_or_default()))
    }

    /// Coefficient of `curve` in N(v); zero outside its chambers.
    pub fn n_coeff(&self, curve: &str) -> PiecewisePoly {
        self.piecewise(|c| c.n_coeffs.get(curve).cloned().unwrap_or_default())
    }

    /// `(N(v)·F)_P` for a point on the flag curve.
    pub fn n_restricted_at_point(&self, point: &PointSpec) -> PiecewisePoly {
        self.piecewise(|c| restricted_n(&c.n_coeffs, point))
    }

    /// Chamber containing `v`; at a breakpoint the chamber starting there.
    pub fn chamber_at(&self, v: &Rat) -> Result<&Chamber> {
        if v.is_negative() || *v > self.tau {
            return Err(Error::OutOfDomain { a: v.clone(), b: v.clone(), lo: Rat::zero(), hi: self.tau.clone() });
        }
        Ok(self.chambers.iter().find(|c| *v < c.hi).unwrap_or_else(|| self.chambers.last().unwrap()))
    }

    /// Negative part at `v` read off the chambers.
    pub fn negative_part(&self, v: &Rat) -> Result<NegativePart> {
        let c = self.chamber_at(v)?;
        let mut out = NegativePart { support: vec![], coeffs: vec![] };
        for (name, p) in c.n_coeffs.iter() {
            let x = p.eval(v);
            if !x.is_zero() {
                out.support.push(name.clone());
                out.coeffs.push(x);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "flag {}  tau = {}", self.flag, self.tau)?;
        for c in &self.chambers {
            writeln!(f, "v in [{}, {}]", c.lo, c.hi)?;
            if c.support.is_empty() {
                writeln!(f, "  N = 0")?;
            }
            for (name, p) in c.n_coeffs.iter() {
                writeln!(f, "  N[{name}] = {p}")?;
            }
            writeln!(f, "  P^2 = {}", c.p_sq)?;
            if let Some(p) = c.p_dot.get(&self.flag) {
                writeln!(f, "  P.{} = {}", self.flag, p)?;
            }
            for (name, p) in c.p_dot.iter() {
                if *name != self.flag && !c.support.contains(name) {
                    writeln!(f, "  P.{name} = {p}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::tests::{a1_cuspidal_orbifold, a1_nodal};
    use crate::rat::r;

    #[test]
    fn negative_part_fixed_v() {
        let c = a1_nodal();
        let d = c.sweep_class("E", &r("3/4")).unwrap();
        let np = negative_part_at(&c, &d).unwrap();
        assert_eq!(np.support, vec!["C"]);
        assert_eq!(np.coeffs, vec![r("1/2")]);
        let np = negative_part_at(&c, &c.anti_k_class()).unwrap();
        assert!(np.support.is_empty());
    }

    #[test]
    fn a1_nodal_chambers() {
        let d = parametric_decompose(&a1_nodal(), "E").unwrap();
        assert_eq!(d.tau, r("1"));
        assert_eq!(d.breakpoints(), vec![r("0"), r("1/2"), r("1")]);
        assert!(d.chambers[0].support.is_empty());
        assert_eq!(d.chambers[0].p_sq, Poly::from_strs(&["1", "0", "-2"]));
        assert_eq!(d.chambers[1].support, vec!["C"]);
        assert_eq!(d.chambers[1].n_coeffs.get("C").unwrap(), &Poly::from_strs(&["-1", "2"]));
        assert_eq!(d.chambers[1].p_sq, Poly::from_strs(&["2", "-4", "2"]));
        let node = &a1_nodal().points[1];
        let nr = d.n_restricted_at_point(node);
        assert_eq!(nr.pieces(), &[Poly::zero(), Poly::from_strs(&["-1", "2"])]);
    }

    #[test]
    fn orbifold_chambers() {
        let d = parametric_decompose(&a1_cuspidal_orbifold(), "Ebar").unwrap();
        assert_eq!(d.tau, r("4"));
        assert_eq!(d.breakpoints(), vec![r("0"), r("1"), r("4")]);
        assert_eq!(d.chambers[0].p_sq, Poly::from_strs(&["1", "0", "-1/4"]));
        assert_eq!(d.chambers[1].n_coeffs.get("Cbar").unwrap(), &Poly::from_strs(&["-1/3", "1/3"]));
        assert_eq!(d.chambers[1].p_sq, Poly::from_strs(&["16/12", "-8/12", "1/12"]));
    }

    #[test]
    fn json_round_trip() {
        let d = parametric_decompose(&a1_nodal(), "E").unwrap();
        let s = serde_json::to_string(&d).unwrap();
        let back: Decomposition = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }
}
