//! Ordinary blowup of a smooth configuration at a point.

use std::collections::BTreeMap;

use crate::config::{CurveKind, CurveRecord, DivisorClass, PointSpec, SurfaceConfig};
use crate::error::{Error, Result};
use crate::rat::Rat;

#[derive(Clone, Debug)]
pub struct BlowupResult {
    pub config: SurfaceConfig,
    pub e_p_name: String,
    pub a_e_p: Rat,
}

/// Multiplicities of the curves through a point: the point's own curve and
/// every incident curve, each taken as a smooth branch.
pub fn center_multiplicities(point: &PointSpec) -> BTreeMap<String, u32> {
    let mut m: BTreeMap<String, u32> = point.incidences.keys().map(|k| (k.clone(), 1)).collect();
    m.insert(point.on_curve.clone(), 1);
    m
}

/// Blow up at the point `point`, naming the exceptional curve `E_P` (or a
/// numbered variant if that name is taken). The point itself, and any point
/// type that no longer fits the new intersection numbers, is dropped.
pub fn blowup(config: &SurfaceConfig, point: &PointSpec) -> Result<BlowupResult> {
    let mut name = "E_P".to_string();
    let mut k = 2;
    while config.index_of(&name).is_ok() {
        name = format!("E_P{k}");
        k += 1;
    }
    let mut out = blowup_at(config, &center_multiplicities(point), &name)?;
    out.config.points.retain(|p| p.id != point.id);
    // point types whose curves were separated by the blowup no longer exist
    let cfg = out.config.clone();
    out.config.points.retain(|p| {
        p.incidences.iter().all(|(k, m)| match (cfg.index_of(k), cfg.index_of(&p.on_curve)) {
            (Ok(g), Ok(f)) => Rat::int(*m as i64) <= cfg.gram[g][f],
            _ => false,
        })
    });
    Ok(out)
}

/// Blow up at a point through which each named curve passes with the given
/// multiplicity.
pub fn blowup_at(config: &SurfaceConfig, mult: &BTreeMap<String, u32>, e_name: &str) -> Result<BlowupResult> {
    if !config.smooth_surface {
        return Err(Error::NotSmooth);
    }
    if config.index_of(e_name).is_ok() {
        return Err(Error::Precondition(format!("curve {e_name} already exists")));
    }
    let n = config.n();
    let mut m = vec![Rat::zero(); n];
    for (c, k) in mult {
        m[config.index_of(c)?] = Rat::int(*k as i64);
    }
    for i in 0..n {
        for j in i + 1..n {
            if m[i].is_zero() || m[j].is_zero() {
                continue;
            }
            if config.gram[i][j] < &m[i] * &m[j] {
                return Err(Error::InconsistentIncidence(format!(
                    "{}·{} = {} but both pass through the point with multiplicities {} and {}",
                    config.curves[i].name, config.curves[j].name, config.gram[i][j], m[i], m[j]
                )));
            }
        }
    }

    let mut gram = vec![vec![Rat::zero(); n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            gram[i][j] = &config.gram[i][j] - &m[i] * &m[j];
        }
        gram[i][n] = m[i].clone();
        gram[n][i] = m[i].clone();
    }
    gram[n][n] = Rat::int(-1);

    let mut curves: Vec<CurveRecord> = config
        .curves
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let self_int = gram[i][i].clone();
            let kind = match c.kind {
                CurveKind::MinusOne | CurveKind::MinusTwo | CurveKind::Other if !m[i].is_zero() => {
                    if self_int == Rat::int(-1) {
                        CurveKind::MinusOne
                    } else if self_int == Rat::int(-2) {
                        CurveKind::MinusTwo
                    } else {
                        CurveKind::Other
                    }
                }
                k => k,
            };
            CurveRecord { name: c.name.clone(), self_int, kind }
        })
        .collect();
    curves.push(CurveRecord { name: e_name.to_string(), self_int: Rat::int(-1), kind: CurveKind::MinusOne });

    let mut anti_k = config.anti_k.clone();
    anti_k.push(config.anti_k.iter().zip(&m).map(|(a, k)| a * k).sum());

    let a_e_p = Rat::int(2)
        + config
            .curves
            .iter()
            .zip(&m)
            .map(|(c, k)| k * (config.discrepancy_of(&c.name) - Rat::one()))
            .sum::<Rat>();
    let mut discrepancy = config.discrepancy.clone();
    discrepancy.insert(e_name.to_string(), a_e_p.clone());

    let new = SurfaceConfig {
        name: format!("{}+{}", config.name, e_name),
        norm: config.norm.clone(),
        smooth_surface: true,
        curves,
        gram,
        anti_k,
        discrepancy,
        points: config.points.clone(),
    };
    Ok(BlowupResult { config: new, e_p_name: e_name.to_string(), a_e_p })
}

/// Total transform of a class: `Γ ↦ Γ̃ + m_Γ E_P`.
pub fn pullback(old: &SurfaceConfig, mult: &BTreeMap<String, u32>, d: &DivisorClass) -> Result<DivisorClass> {
    let mut e = Rat::zero();
    for (c, k) in mult {
        e += &d.0[old.index_of(c)?] * &Rat::int(*k as i64);
    }
    let mut out = d.0.clone();
    out.push(e);
    Ok(DivisorClass(out))
}
