//! S-invariants, the refined invariant S(W;P) along a flag, and the
//! resulting lower and upper bounds for δ.

use serde::{Deserialize, Serialize};

use crate::config::{PointSpec, SurfaceConfig};
use crate::error::{Error, Result};
use crate::piecewise::PiecewisePoly;
use crate::poly::Poly;
use crate::rat::Rat;
use crate::zariski::{parametric_decompose, Decomposition};

/// `S(F) = (1/norm) ∫_0^τ P(v)^2 dv`.
pub fn s_from(decomp: &Decomposition, norm: &Rat) -> Rat {
    decomp.p_sq().integrate_all() / norm
}

pub fn s_flag(config: &SurfaceConfig, flag: &str) -> Result<Rat> {
    let d = parametric_decompose(config, flag)?;
    Ok(s_from(&d, &config.norm))
}

/// `h(v) = (P·F)(N·F)_P + (P·F)^2 / 2`.
pub fn h_from(decomp: &Decomposition, point: &PointSpec) -> PiecewisePoly {
    let pf = decomp.p_dot(&decomp.flag).expect("flag is a config curve");
    let nr = decomp.n_restricted_at_point(point);
    let half = Rat::new(1, 2);
    let pieces: Vec<Poly> = pf
        .pieces()
        .iter()
        .zip(nr.pieces())
        .map(|(p, n)| &(p * n) + &(p * p).scale(&half))
        .collect();
    PiecewisePoly::new(pf.breakpoints().to_vec(), pieces).expect("same partition")
}

pub fn h_at_point(config: &SurfaceConfig, flag: &str, point: &PointSpec) -> Result<PiecewisePoly> {
    check_point(config, flag, point)?;
    let d = parametric_decompose(config, flag)?;
    Ok(h_from(&d, point))
}

/// `S(W;P) = (2/norm) ∫_0^τ h(v) dv`.
pub fn s_w_from(decomp: &Decomposition, point: &PointSpec, norm: &Rat) -> Rat {
    Rat::int(2) * h_from(decomp, point).integrate_all() / norm
}

pub fn s_w_point(config: &SurfaceConfig, flag: &str, point: &PointSpec) -> Result<Rat> {
    check_point(config, flag, point)?;
    let d = parametric_decompose(config, flag)?;
    Ok(s_w_from(&d, point, &config.norm))
}

fn check_point(config: &SurfaceConfig, flag: &str, point: &PointSpec) -> Result<()> {
    if point.on_curve != flag {
        return Err(Error::Precondition(format!("point {} lies on {}, not {flag}", point.id, point.on_curve)));
    }
    for k in point.incidences.keys() {
        config.index_of(k)?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRow {
    pub point: String,
    pub a_o: Rat,
    pub s_w: Rat,
    pub ratio: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagReport {
    pub flag: String,
    #[serde(rename = "A")]
    pub a: Rat,
    #[serde(rename = "S")]
    pub s: Rat,
    pub upper_delta: Rat,
    pub point_rows: Vec<PointRow>,
    pub lower_delta: Rat,
    pub certified_equal: bool,
}

pub fn flag_report_from(config: &SurfaceConfig, decomp: &Decomposition, points: &[&PointSpec]) -> Result<FlagReport> {
    let flag = decomp.flag.clone();
    let a = config.discrepancy_of(&flag);
    let s = s_from(decomp, &config.norm);
    if !s.is_positive() {
        return Err(Error::Precondition(format!("S({flag}) = {s} is not positive")));
    }
    let upper = &a / &s;
    let mut rows = vec![];
    let mut lower = upper.clone();
    for p in points {
        check_point(config, &flag, p)?;
        let s_w = s_w_from(decomp, p, &config.norm);
        if !s_w.is_positive() {
            return Err(Error::Precondition(format!("S(W;{}) = {s_w} is not positive", p.id)));
        }
        let a_o = p.a_o();
        let ratio = &a_o / &s_w;
        lower = Rat::min(&lower, &ratio);
        rows.push(PointRow { point: p.id.clone(), a_o, s_w, ratio });
    }
    Ok(FlagReport { certified_equal: lower == upper, flag, a, s, upper_delta: upper, point_rows: rows, lower_delta: lower })
}

pub fn flag_report(config: &SurfaceConfig, flag: &str, points: &[&PointSpec]) -> Result<FlagReport> {
    let d = parametric_decompose(config, flag)?;
    flag_report_from(config, &d, points)
}

/// δ of a case from its flag reports: the smallest upper bound, provided
/// the flag attaining it is certified and every other flag's lower bound
/// does not undercut it.
pub fn certify(case: &str, reports: &[FlagReport]) -> Result<Rat> {
    let not = |reason: String| Error::NotCertified { case: case.to_string(), reason };
    let best = reports
        .iter()
        .min_by(|a, b| a.upper_delta.cmp(&b.upper_delta))
        .ok_or_else(|| not("no flags".into()))?;
    let m = best.upper_delta.clone();
    if !reports.iter().any(|r| r.upper_delta == m && r.certified_equal) {
        return Err(not(format!("minimizing flag {} has lower bound {} < {m}", best.flag, best.lower_delta)));
    }
    if let Some(r) = reports.iter().find(|r| r.lower_delta < m) {
        return Err(not(format!("flag {} has lower bound {} < {m}", r.flag, r.lower_delta)));
    }
    Ok(m)
}
