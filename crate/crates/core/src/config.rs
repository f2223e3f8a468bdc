//! Curve configurations: named curves, rational Gram matrix, the
//! anticanonical class, log discrepancies and point types.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rat::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    MinusOne,
    MinusTwo,
    AnticanonicalTransform,
    Orbifold,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub name: String,
    pub self_int: Rat,
    pub kind: CurveKind,
}

/// A point type on a flag curve. `incidences[Γ]` is the local intersection
/// number of Γ with the flag curve at the point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSpec {
    pub id: String,
    pub on_curve: String,
    #[serde(default)]
    pub incidences: BTreeMap<String, u32>,
    #[serde(default)]
    pub different: Rat,
}

impl PointSpec {
    pub fn generic(id: &str, on_curve: &str) -> PointSpec {
        PointSpec {
            id: id.into(),
            on_curve: on_curve.into(),
            incidences: BTreeMap::new(),
            different: Rat::zero(),
        }
    }

    pub fn with(mut self, curve: &str, mult: u32) -> PointSpec {
        self.incidences.insert(curve.into(), mult);
        self
    }

    /// Log discrepancy of the point on the flag curve, `1 - different`.
    pub fn a_o(&self) -> Rat {
        Rat::one() - &self.different
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceConfig {
    pub name: String,
    pub norm: Rat,
    pub smooth_surface: bool,
    pub curves: Vec<CurveRecord>,
    pub gram: Matrix,
    pub anti_k: Vec<Rat>,
    #[serde(default)]
    pub discrepancy: BTreeMap<String, Rat>,
    #[serde(default)]
    pub points: Vec<PointSpec>,
}

/// Coefficient vector in a config's curve basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DivisorClass(pub Vec<Rat>);

impl DivisorClass {
    pub fn zero(n: usize) -> DivisorClass {
        DivisorClass(vec![Rat::zero(); n])
    }

    pub fn add(&self, o: &DivisorClass) -> DivisorClass {
        DivisorClass(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &DivisorClass) -> DivisorClass {
        DivisorClass(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &Rat) -> DivisorClass {
        DivisorClass(self.0.iter().map(|a| a * k).collect())
    }
}

impl SurfaceConfig {
    pub fn n(&self) -> usize {
        self.curves.len()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.curves
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::UnknownCurve(name.to_string()))
    }

    pub fn curve_names(&self) -> Vec<String> {
        self.curves.iter().map(|c| c.name.clone()).collect()
    }

    pub fn point(&self, id: &str) -> Result<&PointSpec> {
        self.points
            .iter()
            .find(|p| p.id == id)
            .ok_or_else(|| Error::UnknownPoint(id.to_string()))
    }

    /// Log discrepancy of a curve; curves without an entry have A = 1.
    pub fn discrepancy_of(&self, name: &str) -> Rat {
        self.discrepancy.get(name).cloned().unwrap_or_else(Rat::one)
    }

    pub fn anti_k_class(&self) -> DivisorClass {
        DivisorClass(self.anti_k.clone())
    }

    pub fn curve_class(&self, name: &str) -> Result<DivisorClass> {
        let i = self.index_of(name)?;
        let mut d = DivisorClass::zero(self.n());
        d.0[i] = Rat::one();
        Ok(d)
    }

    /// `D(v) = anti_k - v F` at a fixed v.
    pub fn sweep_class(&self, flag: &str, v: &Rat) -> Result<DivisorClass> {
        Ok(self.anti_k_class().sub(&self.curve_class(flag)?.scale(v)))
    }

    /// `D·Γ_i` for every basis curve.
    pub fn dots(&self, d: &DivisorClass) -> Vec<Rat> {
        (0..self.n())
            .map(|i| self.gram[i].iter().zip(&d.0).map(|(g, c)| g * c).sum())
            .collect()
    }

    /// The canonical class of the surface itself, negated: the stored
    /// anti_k is a pullback, so each curve with log discrepancy A carries
    /// an extra `A - 1` in `-K`.
    pub fn surface_anti_canonical(&self) -> DivisorClass {
        DivisorClass(
            self.curves
                .iter()
                .zip(&self.anti_k)
                .map(|(c, a)| a - (self.discrepancy_of(&c.name) - Rat::one()))
                .collect(),
        )
    }
}

/// Intersection number `D1·D2` under the config's Gram matrix.
pub fn intersect(config: &SurfaceConfig, d1: &DivisorClass, d2: &DivisorClass) -> Result<Rat> {
    let n = config.n();
    if d1.0.len() != n || d2.0.len() != n {
        return Err(Error::Schema(format!("divisor length differs from {n} curves")));
    }
    let mut total = Rat::zero();
    for i in 0..n {
        if d1.0[i].is_zero() {
            continue;
        }
        for j in 0..n {
            if d2.0[j].is_zero() || config.gram[i][j].is_zero() {
                continue;
            }
            total += &d1.0[i] * &config.gram[i][j] * &d2.0[j];
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuleOutcome {
    pub rule: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    pub outcomes: Vec<RuleOutcome>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failures(&self) -> Vec<&RuleOutcome> {
        self.outcomes.iter().filter(|o| !o.passed).collect()
    }

    pub fn failed(&self, rule: &str) -> bool {
        self.outcomes.iter().any(|o| o.rule == rule && !o.passed)
    }

    fn push(&mut self, rule: &'static str, problems: Vec<String>) {
        self.outcomes.push(RuleOutcome {
            rule,
            passed: problems.is_empty(),
            detail: problems.join("; "),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            let tag = if o.passed { "ok  " } else { "FAIL" };
            write!(f, "{tag} {}", o.rule)?;
            if !o.detail.is_empty() {
                write!(f, ": {}", o.detail)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Check every structural and numerical rule. Rules that depend on a well
/// formed Gram matrix are skipped when the shape is wrong.
pub fn validate(config: &SurfaceConfig) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let n = config.n();
    let names: BTreeSet<&str> = config.curves.iter().map(|c| c.name.as_str()).collect();

    let mut p = vec![];
    if names.len() != n {
        p.push("duplicate curve name".to_string());
    }
    let ids: BTreeSet<&str> = config.points.iter().map(|q| q.id.as_str()).collect();
    if ids.len() != config.points.len() {
        p.push("duplicate point id".to_string());
    }
    for k in config.discrepancy.keys() {
        if !names.contains(k.as_str()) {
            p.push(format!("discrepancy names unknown curve {k}"));
        }
    }
    for q in &config.points {
        if !names.contains(q.on_curve.as_str()) {
            p.push(format!("point {} on unknown curve {}", q.id, q.on_curve));
        }
        for k in q.incidences.keys() {
            if !names.contains(k.as_str()) {
                p.push(format!("point {} names unknown curve {k}", q.id));
            }
        }
    }
    if config.anti_k.len() != n {
        p.push(format!("anti_k has {} entries for {n} curves", config.anti_k.len()));
    }
    rep.push("names", p);

    let shape_ok = config.gram.len() == n && config.gram.iter().all(|row| row.len() == n);
    rep.push(
        "gram shape",
        if shape_ok { vec![] } else { vec![format!("gram is not {n}x{n}")] },
    );
    if !shape_ok || config.anti_k.len() != n {
        return rep;
    }

    let mut p = vec![];
    for i in 0..n {
        for j in i + 1..n {
            if config.gram[i][j] != config.gram[j][i] {
                p.push(format!("{}·{}", config.curves[i].name, config.curves[j].name));
            }
        }
    }
    rep.push("gram symmetric", p);

    let mut p = vec![];
    for (i, c) in config.curves.iter().enumerate() {
        if config.gram[i][i] != c.self_int {
            p.push(format!("{}: gram {} vs self_int {}", c.name, config.gram[i][i], c.self_int));
        }
    }
    rep.push("gram diagonal", p);

    let mut p = vec![];
    for c in &config.curves {
        let want = match c.kind {
            CurveKind::MinusOne => Some(Rat::int(-1)),
            CurveKind::MinusTwo => Some(Rat::int(-2)),
            _ => None,
        };
        if let Some(w) = want {
            if c.self_int != w {
                p.push(format!("{} has kind {:?} but self-intersection {}", c.name, c.kind, c.self_int));
            }
        }
    }
    rep.push("curve kind", p);

    let ak = config.anti_k_class();
    let sq = intersect(config, &ak, &ak).expect("shape checked");
    rep.push(
        "anti_k norm",
        if sq == config.norm { vec![] } else { vec![format!("(anti_k)^2 = {sq}, norm {}", config.norm)] },
    );

    if config.smooth_surface {
        let k = config.surface_anti_canonical();
        let dots = config.dots(&k);
        let mut p = vec![];
        for (i, c) in config.curves.iter().enumerate() {
            let rational = matches!(
                c.kind,
                CurveKind::MinusOne | CurveKind::MinusTwo | CurveKind::AnticanonicalTransform
            );
            if rational && dots[i] != &c.self_int + Rat::int(2) {
                p.push(format!("-K·{} = {}, expected {}", c.name, dots[i], &c.self_int + Rat::int(2)));
            }
        }
        rep.push("adjunction", p);
    }

    let mut p = vec![];
    for (k, a) in &config.discrepancy {
        if !a.is_positive() {
            p.push(format!("A({k}) = {a}"));
        }
    }
    rep.push("discrepancy positive", p);

    let mut p = vec![];
    for q in &config.points {
        let Ok(f) = config.index_of(&q.on_curve) else { continue };
        for (k, m) in &q.incidences {
            let Ok(g) = config.index_of(k) else { continue };
            if g == f {
                p.push(format!("point {} lists its own curve", q.id));
            } else if *m == 0 || Rat::int(*m as i64) > config.gram[g][f] {
                p.push(format!("point {}: ({k}·{})_P = {m} exceeds {}", q.id, q.on_curve, config.gram[g][f]));
            }
        }
        if q.different.is_negative() || q.different >= Rat::one() {
            p.push(format!("point {}: different {} not in [0,1)", q.id, q.different));
        }
    }
    rep.push("points", p);
    rep
}

/// Parse and validate a config file.
pub fn load(path: impl AsRef<Path>) -> Result<SurfaceConfig> {
    let config = load_unchecked(path.as_ref())?;
    let rep = validate(&config);
    if !rep.ok() {
        let msg: Vec<String> = rep.failures().iter().map(|o| format!("{}: {}", o.rule, o.detail)).collect();
        return Err(Error::Schema(format!("{}: {}", path.as_ref().display(), msg.join("; "))));
    }
    Ok(config)
}

pub fn load_unchecked(path: &Path) -> Result<SurfaceConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
    serde_json::from_str(&text).map_err(|e| Error::Json { path: path.display().to_string(), source: e })
}

pub fn to_json(config: &SurfaceConfig) -> String {
    let mut s = serde_json::to_string_pretty(config).expect("config serializes");
    s.push('\n');
    s
}

pub fn save(config: &SurfaceConfig, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_json(config)).map_err(|e| Error::Io { path: path.display().to_string(), source: e })
}

/// Builder used by tests and generators: curves by name, symmetric Gram
/// entries set pairwise.
#[derive(Clone, Debug)]
pub struct ConfigBuilder {
    config: SurfaceConfig,
}

impl ConfigBuilder {
    pub fn new(name: &str) -> ConfigBuilder {
        ConfigBuilder {
            config: SurfaceConfig {
                name: name.into(),
                norm: Rat::one(),
                smooth_surface: true,
                curves: vec![],
                gram: vec![],
                anti_k: vec![],
                discrepancy: BTreeMap::new(),
                points: vec![],
            },
        }
    }

    pub fn curve(mut self, name: &str, self_int: Rat, kind: CurveKind, anti_k: Rat) -> ConfigBuilder {
        let c = &mut self.config;
        for row in c.gram.iter_mut() {
            row.push(Rat::zero());
        }
        let mut row = vec![Rat::zero(); c.curves.len() + 1];
        row[c.curves.len()] = self_int.clone();
        c.gram.push(row);
        c.curves.push(CurveRecord { name: name.into(), self_int, kind });
        c.anti_k.push(anti_k);
        self
    }

    pub fn meet(mut self, a: &str, b: &str, value: Rat) -> ConfigBuilder {
        let i = self.config.index_of(a).expect("curve a");
        let j = self.config.index_of(b).expect("curve b");
        self.config.gram[i][j] = value.clone();
        self.config.gram[j][i] = value;
        self
    }

    pub fn smooth(mut self, smooth: bool) -> ConfigBuilder {
        self.config.smooth_surface = smooth;
        self
    }

    pub fn discrepancy(mut self, curve: &str, a: Rat) -> ConfigBuilder {
        self.config.discrepancy.insert(curve.into(), a);
        self
    }

    pub fn point(mut self, p: PointSpec) -> ConfigBuilder {
        self.config.points.push(p);
        self
    }

    pub fn build(self) -> SurfaceConfig {
        self.config
    }
}
