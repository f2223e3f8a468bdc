//! Case records on disk and the regression verifier.
//!
//! Layout: `<catalog>/<case>/config*.json` plus `<catalog>/<case>/expected.json`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::blowup::blowup;
use crate::config::{self, PointSpec, SurfaceConfig};
use crate::delta::{certify, flag_report_from, s_w_from, FlagReport};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rat::Rat;
use crate::threefold::{main_theorem_delta, parse_singularities};
use crate::zariski::{parametric_decompose, Decomposition};

pub const CATALOG_ENV: &str = "DPDELTA_CATALOG";

/// `$DPDELTA_CATALOG`, else the catalog shipped with the sources, else
/// `./catalog`.
pub fn default_catalog_dir() -> PathBuf {
    if let Ok(p) = std::env::var(CATALOG_ENV) {
        return PathBuf::from(p);
    }
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../catalog");
    if shipped.is_dir() {
        return shipped;
    }
    PathBuf::from("catalog")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Marker {
    Exact,
    Bound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedValue {
    pub value: Rat,
    pub kind: Marker,
}

/// One printed chamber: N coefficients, P² and P·F as polynomials in v.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrintedChamber {
    pub lo: Rat,
    pub hi: Rat,
    #[serde(default)]
    pub n: BTreeMap<String, Poly>,
    pub p_sq: Poly,
    pub p_dot_flag: Poly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupSpec {
    pub id: String,
    pub config: String,
    pub point: String,
    /// Point types on the new configuration, typically on the exceptional curve.
    #[serde(default)]
    pub points: Vec<PointSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagSpec {
    pub id: String,
    /// Config files or `blowup:<id>`; several entries are sub-case variants
    /// that must agree on every expected value.
    pub configs: Vec<String>,
    pub flag: String,
    #[serde(default)]
    pub points: Vec<String>,
    #[serde(rename = "S")]
    pub s: Rat,
    #[serde(rename = "S_W", default)]
    pub s_w: BTreeMap<String, ExpectedValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chambers: Option<Vec<PrintedChamber>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub name: String,
    /// Singularity type, in the `table --singularities` syntax.
    pub singularity: String,
    pub delta: Rat,
    pub base_config: String,
    #[serde(default)]
    pub blowups: Vec<BlowupSpec>,
    pub flags: Vec<FlagSpec>,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(skip)]
    pub dir: PathBuf,
}

pub fn dir_name(case: &str) -> String {
    case.to_lowercase().replace('-', "_")
}

impl CaseRecord {
    pub fn load(dir: &Path) -> Result<CaseRecord> {
        let path = dir.join("expected.json");
        let text = std::fs::read_to_string(&path).map_err(|e| Error::Io { path: path.display().to_string(), source: e })?;
        let mut rec: CaseRecord =
            serde_json::from_str(&text).map_err(|e| Error::Json { path: path.display().to_string(), source: e })?;
        rec.dir = dir.to_path_buf();
        Ok(rec)
    }

    /// Every config reference resolved: files are loaded and validated,
    /// `blowup:<id>` entries are computed.
    pub fn resolve_configs(&self) -> Result<BTreeMap<String, SurfaceConfig>> {
        let mut out = BTreeMap::new();
        let mut files: Vec<&str> = vec![self.base_config.as_str()];
        for f in &self.flags {
            files.extend(f.configs.iter().map(|s| s.as_str()).filter(|s| !s.starts_with("blowup:")));
        }
        files.extend(self.blowups.iter().map(|b| b.config.as_str()));
        for f in files {
            if !out.contains_key(f) {
                out.insert(f.to_string(), config::load(self.dir.join(f))?);
            }
        }
        for b in &self.blowups {
            let base = &out[&b.config];
            let res = blowup(base, base.point(&b.point)?)?;
            let mut c = res.config;
            c.points = b.points.clone();
            let rep = config::validate(&c);
            if !rep.ok() {
                return Err(Error::Schema(format!("blowup {}: {}", b.id, rep)));
            }
            out.insert(format!("blowup:{}", b.id), c);
        }
        for f in &self.flags {
            for c in &f.configs {
                if !out.contains_key(c) {
                    return Err(Error::Schema(format!("flag {} refers to unknown config {c}", f.id)));
                }
            }
        }
        Ok(out)
    }
}

/// All case records under `root`, sorted by name.
pub fn load_catalog(root: &Path) -> Result<Vec<CaseRecord>> {
    let entries = std::fs::read_dir(root).map_err(|e| Error::Io { path: root.display().to_string(), source: e })?;
    let mut out = vec![];
    for e in entries {
        let e = e.map_err(|e| Error::Io { path: root.display().to_string(), source: e })?;
        if e.path().join("expected.json").is_file() {
            out.push(CaseRecord::load(&e.path())?);
        }
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

pub fn find_case(root: &Path, name: &str) -> Result<CaseRecord> {
    let dir = root.join(dir_name(name));
    if dir.join("expected.json").is_file() {
        return CaseRecord::load(&dir);
    }
    load_catalog(root)?
        .into_iter()
        .find(|c| c.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::Schema(format!("no case {name:?} in {}", root.display())))
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub label: String,
    pub expected: String,
    pub computed: String,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub name: String,
    pub rows: Vec<CheckRow>,
    pub reports: Vec<FlagReport>,
    pub delta: Option<Rat>,
    pub error: Option<String>,
}

impl CaseReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.rows.iter().all(|r| r.ok)
    }
}

impl fmt::Display for CaseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(f, "{} {status}", self.name)?;
        if let Some(e) = &self.error {
            writeln!(f, "  error: {e}")?;
        }
        for r in &self.rows {
            if r.ok {
                writeln!(f, "  {}={} OK", r.label, r.computed)?;
            } else {
                writeln!(f, "  {}={} MISMATCH (expected {})", r.label, r.computed, r.expected)?;
            }
        }
        Ok(())
    }
}

/// Decompositions of every (flag, config) pair of a case.
pub struct CaseData {
    pub configs: BTreeMap<String, SurfaceConfig>,
    pub decomps: Vec<(usize, String, Decomposition)>,
}

pub fn compute_case(case: &CaseRecord) -> Result<CaseData> {
    let configs = case.resolve_configs()?;
    let mut decomps = vec![];
    for (i, f) in case.flags.iter().enumerate() {
        for c in &f.configs {
            decomps.push((i, c.clone(), parametric_decompose(&configs[c], &f.flag)?));
        }
    }
    Ok(CaseData { configs, decomps })
}

/// δ of a case: flag reports over every flag and variant, then `certify`.
pub fn case_delta(case: &CaseRecord) -> Result<Rat> {
    let data = compute_case(case)?;
    certify(&case.name, &flag_reports(case, &data)?)
}

fn flag_reports(case: &CaseRecord, data: &CaseData) -> Result<Vec<FlagReport>> {
    let mut out = vec![];
    for (i, c, d) in &data.decomps {
        let cfg = &data.configs[c];
        let pts: Vec<&PointSpec> =
            case.flags[*i].points.iter().map(|p| cfg.point(p)).collect::<Result<_>>()?;
        out.push(flag_report_from(cfg, d, &pts)?);
    }
    Ok(out)
}

fn row(rows: &mut Vec<CheckRow>, label: String, expected: String, computed: String, ok: bool) {
    rows.push(CheckRow { label, expected, computed, ok });
}

/// Compare printed chambers with computed ones; `None` if they agree,
/// otherwise a short description of the first difference.
pub fn chamber_diff(d: &Decomposition, printed: &[PrintedChamber]) -> Option<String> {
    if d.chambers.len() != printed.len() {
        return Some(format!("{} chambers, printed {}", d.chambers.len(), printed.len()));
    }
    for (c, p) in d.chambers.iter().zip(printed) {
        if c.lo != p.lo || c.hi != p.hi {
            return Some(format!("chamber [{}, {}] vs printed [{}, {}]", c.lo, c.hi, p.lo, p.hi));
        }
        let mut sup: Vec<&String> = c.support.iter().collect();
        sup.sort();
        let psup: Vec<&String> = p.n.keys().collect();
        if sup != psup {
            return Some(format!("support {:?} on [{}, {}], printed {:?}", c.support, c.lo, c.hi, psup));
        }
        for (name, poly) in &p.n {
            let got = c.n_coeffs.get(name).cloned().unwrap_or_default();
            if &got != poly {
                return Some(format!("N[{name}] = {got} on [{}, {}], printed {poly}", c.lo, c.hi));
            }
        }
        if c.p_sq != p.p_sq {
            return Some(format!("P^2 = {} on [{}, {}], printed {}", c.p_sq, c.lo, c.hi, p.p_sq));
        }
        let pf = c.p_dot.get(&d.flag).cloned().unwrap_or_default();
        if pf != p.p_dot_flag {
            return Some(format!("P.F = {pf} on [{}, {}], printed {}", c.lo, c.hi, p.p_dot_flag));
        }
    }
    None
}

pub fn verify_case(case: &CaseRecord) -> CaseReport {
    let mut rep = CaseReport { name: case.name.clone(), rows: vec![], reports: vec![], delta: None, error: None };
    let data = match compute_case(case) {
        Ok(d) => d,
        Err(e) => {
            rep.error = Some(e.to_string());
            return rep;
        }
    };
    for (i, c, d) in &data.decomps {
        let f = &case.flags[*i];
        let cfg = &data.configs[c];
        let tag = if f.configs.len() > 1 { format!("[{c}]") } else { String::new() };
        let s = crate::delta::s_from(d, &cfg.norm);
        row(&mut rep.rows, format!("S({}){tag}", f.flag), f.s.to_string(), s.to_string(), s == f.s);
        for (pid, ev) in &f.s_w {
            let label = format!("S_W({};{pid}){tag}", f.flag);
            match cfg.point(pid) {
                Ok(p) => {
                    let got = s_w_from(d, p, &cfg.norm);
                    let (ok, exp) = match ev.kind {
                        Marker::Exact => (got == ev.value, ev.value.to_string()),
                        Marker::Bound => (got <= ev.value, format!("<= {}", ev.value)),
                    };
                    row(&mut rep.rows, label, exp, got.to_string(), ok);
                }
                Err(e) => row(&mut rep.rows, label, ev.value.to_string(), e.to_string(), false),
            }
        }
        if let Some(ch) = &f.chambers {
            let diff = chamber_diff(d, ch);
            let got = diff.clone().unwrap_or_else(|| format!("{} chambers", ch.len()));
            row(&mut rep.rows, format!("chambers({}){tag}", f.flag), "printed".into(), got, diff.is_none());
        }
    }
    match flag_reports(case, &data).and_then(|r| {
        let d = certify(&case.name, &r);
        rep.reports = r;
        d
    }) {
        Ok(d) => {
            row(&mut rep.rows, "delta".into(), case.delta.to_string(), d.to_string(), d == case.delta);
            rep.delta = Some(d);
        }
        Err(e) => row(&mut rep.rows, "delta".into(), case.delta.to_string(), e.to_string(), false),
    }
    match parse_singularities(&case.singularity).and_then(|s| main_theorem_delta(&s)) {
        Ok(t) => row(&mut rep.rows, "table".into(), case.delta.to_string(), t.to_string(), t == case.delta),
        Err(e) => row(&mut rep.rows, "table".into(), case.delta.to_string(), e.to_string(), false),
    }
    rep
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogSummary {
    pub cases: Vec<CaseReport>,
    pub load_errors: Vec<String>,
}

impl CatalogSummary {
    pub fn passed(&self) -> bool {
        self.load_errors.is_empty() && self.cases.iter().all(|c| c.passed())
    }
}

/// Verify every case directory under `root`. A directory whose record
/// cannot be read is reported as a load error.
pub fn verify_all(root: &Path) -> CatalogSummary {
    let mut cases = vec![];
    let mut load_errors = vec![];
    let dirs = match std::fs::read_dir(root) {
        Ok(d) => d,
        Err(e) => {
            return CatalogSummary { cases, load_errors: vec![format!("{}: {e}", root.display())] };
        }
    };
    let mut paths: Vec<PathBuf> = dirs.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.is_dir()).collect();
    paths.sort();
    for p in paths {
        match CaseRecord::load(&p) {
            Ok(c) => cases.push(verify_case(&c)),
            Err(e) => load_errors.push(e.to_string()),
        }
    }
    cases.sort_by(|a, b| a.name.cmp(&b.name));
    CatalogSummary { cases, load_errors }
}
