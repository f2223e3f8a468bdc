#![allow(dead_code)]

pub mod checks;

use std::path::PathBuf;

use dpdelta::catalog::{load_catalog, CaseRecord};
use dpdelta::config::SurfaceConfig;

pub fn catalog_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../catalog")
}

pub fn catalog() -> Vec<CaseRecord> {
    load_catalog(&catalog_root()).expect("catalog loads")
}

/// One flag of one case evaluated on one of its configs.
pub struct FlagInstance {
    pub case: String,
    pub key: String,
    pub config: SurfaceConfig,
    pub flag: String,
    pub points: Vec<String>,
}

impl FlagInstance {
    pub fn label(&self) -> String {
        format!("{} [{}] flag {}", self.case, self.key, self.flag)
    }
}

pub fn flag_instances() -> Vec<FlagInstance> {
    let mut out = vec![];
    for case in catalog() {
        let configs = case.resolve_configs().expect("configs resolve");
        for f in &case.flags {
            for key in &f.configs {
                out.push(FlagInstance {
                    case: case.name.clone(),
                    key: key.clone(),
                    config: configs[key].clone(),
                    flag: f.flag.clone(),
                    points: f.points.clone(),
                });
            }
        }
    }
    out
}
