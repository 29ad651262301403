//! Run manifests: JSON files describing a benchmark sweep. Command-line
//! flags with the same names override individual keys.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use twine::bench::Method;
use twine::noise::NoiseModel;

use crate::Usage;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "TWINE_OUT_DIR";
const OUT_FALLBACK: &str = "twine-out";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub n_min: usize,
    pub n_max: usize,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_shots")]
    pub shots: u64,
    /// Noisy copies of every state to save for voting; 0 saves none.
    #[serde(default)]
    pub variants: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_m() -> usize {
    20
}

fn default_shots() -> u64 {
    2000
}

impl Default for Manifest {
    fn default() -> Self {
        Manifest {
            n_min: 2,
            n_max: 8,
            methods: Method::ALL.to_vec(),
            noise: NoiseModel::ideal(),
            m: default_m(),
            shots: default_shots(),
            variants: 0,
            seed: 0,
            out: None,
        }
    }
}

impl Manifest {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| Usage::err(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(Usage::err(format!(
                "bad n range {}..={}",
                self.n_min, self.n_max
            )));
        }
        if self.methods.is_empty() {
            return Err(Usage::err("no methods given"));
        }
        let mut seen = self.methods.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.methods.len() {
            return Err(Usage::err("methods listed twice"));
        }
        self.noise
            .validate()
            .map_err(|e| Usage::err(e.to_string()))?;
        if self.m < 2 {
            return Err(Usage::err(format!("m = {} is below 2", self.m)));
        }
        if self.shots == 0 {
            return Err(Usage::err("shots must be positive"));
        }
        if self.n_max > twine::sim::STATE_LIMIT {
            return Err(Usage::err(format!(
                "n_max above the simulator limit {}",
                twine::sim::STATE_LIMIT
            )));
        }
        Ok(())
    }
}

/// `--out`, then the manifest, then the environment, then a fixed name.
pub fn output_dir(flag: Option<&Path>, manifest: Option<&Path>) -> PathBuf {
    flag.or(manifest)
        .map(Path::to_path_buf)
        .or_else(|| {
            std::env::var_os(OUT_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from)
        })
        .unwrap_or_else(|| PathBuf::from(OUT_FALLBACK))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_manifest_takes_defaults() {
        let m: Manifest =
            serde_json::from_str(r#"{"n_min": 3, "n_max": 5, "methods": ["fowler"]}"#).unwrap();
        assert_eq!(m.m, 20);
        assert_eq!(m.shots, 2000);
        assert_eq!(m.noise, NoiseModel::ideal());
        m.validate().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let r: Result<Manifest, _> =
            serde_json::from_str(r#"{"n_min": 3, "n_max": 5, "methods": ["fowler"], "shot": 10}"#);
        assert!(r.is_err());
        let r: Result<Manifest, _> = serde_json::from_str(
            r#"{"n_min": 3, "n_max": 5, "methods": ["fowler"], "noise": {"p": 0.1}}"#,
        );
        assert!(r.is_err());
    }

    #[test]
    fn validation() {
        let ok = Manifest {
            n_min: 4,
            n_max: 6,
            ..Manifest::default()
        };
        ok.validate().unwrap();
        assert!(Manifest {
            n_min: 7,
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(Manifest {
            methods: vec![],
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(Manifest {
            methods: vec![Method::Fowler, Method::Fowler],
            ..ok.clone()
        }
        .validate()
        .is_err());
        assert!(Manifest { m: 1, ..ok.clone() }.validate().is_err());
        assert!(Manifest {
            noise: NoiseModel::depolarizing(2.0),
            ..ok
        }
        .validate()
        .is_err());
    }
}
