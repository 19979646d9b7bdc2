//! TOML experiment configuration and validation.

use anyhow::{bail, Context};
use mgharm_core::compact::Backend;
use mgharm_core::euclid::GridSpec;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// Canonical suite execution order. The Fourier-convention ledger runs
/// first: every other suite builds on the certified transform.
pub const SUITE_ORDER: [&str; 10] = [
    "fourier_ledger",
    "bargmann_isometry",
    "sb_isometry",
    "semigroups",
    "gutzmer_k",
    "gutzmer_m",
    "poisson_domain",
    "paley_wiener",
    "sigma_refined",
    "determinism",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridConfig {
    pub extent: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamConfig {
    /// Heat / transform time.
    #[serde(default = "default_t")]
    pub t: f64,
    /// Secondary semigroup time.
    #[serde(default = "default_s")]
    pub s: f64,
    /// Sphere radius for the holomorphic-extension checks.
    #[serde(default = "default_r")]
    pub r: f64,
    /// Cartan displacement.
    #[serde(default = "default_h")]
    pub h: f64,
    /// Half-width of the y-quadrature for target-measure integrals.
    #[serde(default = "default_y_extent")]
    pub y_extent: f64,
    /// Nodes per axis of the y-quadrature.
    #[serde(default = "default_y_samples")]
    pub y_samples: usize,
}

fn default_t() -> f64 {
    0.5
}
fn default_s() -> f64 {
    0.3
}
fn default_r() -> f64 {
    0.3
}
fn default_h() -> f64 {
    0.2
}
fn default_y_extent() -> f64 {
    6.0
}
fn default_y_samples() -> usize {
    40
}

impl Default for ParamConfig {
    fn default() -> Self {
        ParamConfig {
            t: default_t(),
            s: default_s(),
            r: default_r(),
            h: default_h(),
            y_extent: default_y_extent(),
            y_samples: default_y_samples(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// `u1` or `so3`.
    pub backend: String,
    pub cutoff: u32,
    pub grid: GridConfig,
    #[serde(default)]
    pub params: ParamConfig,
    /// Suites to run, in any order; execution follows [`SUITE_ORDER`].
    pub suites: Vec<String>,
    /// Per-suite tolerance overrides.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default = "default_output")]
    pub output_dir: String,
    #[serde(default)]
    pub seed: u64,
}

fn default_output() -> String {
    "reports".to_string()
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let raw = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ExperimentConfig = toml::from_str(&raw).context("parsing TOML config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn backend_parsed(&self) -> anyhow::Result<Backend> {
        Backend::parse(&self.backend).map_err(|e| anyhow::anyhow!(e.to_string()))
    }

    pub fn grid_spec(&self) -> anyhow::Result<GridSpec> {
        let backend = self.backend_parsed()?;
        GridSpec::new(backend.dim(), self.grid.extent, self.grid.samples)
            .map_err(|e| anyhow::anyhow!(e.to_string()))
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        let _ = self.grid_spec()?;
        if self.suites.is_empty() {
            bail!("suite list is empty");
        }
        for s in &self.suites {
            if !SUITE_ORDER.contains(&s.as_str()) {
                bail!(
                    "unknown suite `{s}` (known: {})",
                    SUITE_ORDER.join(", ")
                );
            }
        }
        for (name, tol) in &self.tolerances {
            if *tol <= 0.0 {
                bail!("tolerance for `{name}` must be positive, got {tol}");
            }
        }
        if !(self.params.t > 0.0 && self.params.s > 0.0) {
            bail!("times t and s must be positive");
        }
        if self.params.y_samples < 4 {
            bail!("y_samples must be at least 4");
        }
        Ok(())
    }

    /// Selected suites in canonical order.
    pub fn ordered_suites(&self) -> Vec<String> {
        SUITE_ORDER
            .iter()
            .filter(|s| self.suites.iter().any(|x| x == *s))
            .map(|s| s.to_string())
            .collect()
    }

    pub fn tolerance(&self, suite: &str, default: f64) -> f64 {
        self.tolerances.get(suite).copied().unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig {
            backend: "u1".into(),
            cutoff: 3,
            grid: GridConfig {
                extent: 10.0,
                samples: 32,
            },
            params: ParamConfig::default(),
            suites: vec!["semigroups".into(), "fourier_ledger".into()],
            tolerances: BTreeMap::new(),
            output_dir: "out".into(),
            seed: 0,
        }
    }

    #[test]
    fn validates_and_orders() {
        let cfg = base();
        cfg.validate().unwrap();
        assert_eq!(cfg.ordered_suites(), vec!["fourier_ledger", "semigroups"]);
    }

    #[test]
    fn rejects_empty_suites_and_bad_names() {
        let mut cfg = base();
        cfg.suites.clear();
        assert!(cfg.validate().is_err());
        let mut cfg = base();
        cfg.suites = vec!["nonsense".into()];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn rejects_bad_tolerance() {
        let mut cfg = base();
        cfg.tolerances.insert("semigroups".into(), -1.0);
        assert!(cfg.validate().is_err());
    }
}
