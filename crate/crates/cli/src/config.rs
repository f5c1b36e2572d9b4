//! Experiment configuration (TOML).
//!
//! Every key is optional; an empty file is the default run. See
//! `docs/config.md` for the schema.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::models::{default_models, ModelSpec};

pub const SUITES: [&str; 5] = ["geometry", "potential", "monotone", "willmore", "mcf"];

/// Default tolerance of every check, keyed `suite.check`.
pub const DEFAULT_TOLERANCES: [(&str, f64); 31] = [
    ("geometry.ricci_admissible", 1e-12),
    ("geometry.bishop_gromov", 1e-10),
    ("geometry.avr_probe", 1e-3),
    ("geometry.parabolicity", 0.0),
    ("potential.harmonicity", 1e-8),
    ("potential.u_decay", 1e-3),
    ("potential.gradient_l1", 1e-3),
    ("potential.sphere_integral", 1e-3),
    ("potential.yau_gradient", 0.0),
    ("potential.li_yau_sandwich", 0.0),
    ("monotone.monotonicity", 1e-9),
    ("monotone.sign", 1e-10),
    ("monotone.derivative_fd", 1e-6),
    ("monotone.derivative_bulk", 1e-4),
    ("monotone.rigidity", 1e-10),
    ("monotone.limit", 1e-2),
    ("monotone.limit_sub_euclidean", 1e-3),
    ("monotone.colding_relation", 1e-10),
    ("monotone.sharp_gradient", 1e-10),
    ("monotone.psi_rigidity", 1e-12),
    ("willmore.willmore_inequality", 1e-10),
    ("willmore.spheroid_sequence", 1e-3),
    ("willmore.kasue_identity", 1e-10),
    ("willmore.kasue_bound", 1e-10),
    ("mcf.iso_diff_monotone", 1e-8),
    ("mcf.iso_diff_nonnegative", 1e-10),
    ("mcf.iso_diff_rigidity", 1e-10),
    ("mcf.extinction_time", 1e-6),
    ("mcf.huisken_derivative", 1e-4),
    ("mcf.iso_ratio", 1e-10),
    ("mcf.iso_ratio_limits", 1e-3),
];

/// A config problem, naming the offending key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config key `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn invalid(key: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError { key: key.into(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Geometric,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub count: usize,
    pub spacing: Spacing,
    pub range: [f64; 2],
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        let [a, b] = self.range;
        if self.count == 1 {
            return vec![a];
        }
        let last = self.count - 1;
        (0..self.count)
            .map(|i| {
                let x = i as f64 / last as f64;
                match (i == last, self.spacing) {
                    // Land exactly on the end of the range.
                    (true, _) => b,
                    (false, Spacing::Linear) => a + (b - a) * x,
                    (false, Spacing::Geometric) => a * (b / a).powf(x),
                }
            })
            .collect()
    }

    fn validate(&self, key: &str, lo: f64, hi: f64, lo_open: bool) -> Result<(), ConfigError> {
        if self.count < 2 {
            return Err(invalid(format!("{key}.count"), format!("must be at least 2, got {}", self.count)));
        }
        for v in self.range {
            let below = if lo_open { v <= lo } else { v < lo };
            if !v.is_finite() || below || v > hi {
                return Err(invalid(format!("{key}.range"), format!("{v} lies outside the admissible levels")));
            }
        }
        if self.spacing == Spacing::Geometric && self.range.iter().any(|&v| v <= 0.0) {
            return Err(invalid(format!("{key}.spacing"), "geometric spacing needs a positive range"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    family: String,
    #[serde(default)]
    params: BTreeMap<String, f64>,
    n: i64,
    #[serde(default)]
    omega_factor: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    models: Option<Vec<RawModel>>,
    r0: Option<f64>,
    betas: Option<Vec<f64>>,
    t_grid: Option<GridSpec>,
    s_grid: Option<GridSpec>,
    suites: Option<Vec<String>>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
    output_dir: Option<PathBuf>,
    parallelism: Option<usize>,
    flow_radii: Option<Vec<f64>>,
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub models: Vec<ModelSpec>,
    pub r0: f64,
    /// `None` means the per-dimension default `{(n-2)/(n-1), 1, n-2, 3}`.
    pub betas: Option<Vec<f64>>,
    pub t_grid: GridSpec,
    pub s_grid: GridSpec,
    pub suites: Vec<String>,
    pub tolerances: BTreeMap<String, f64>,
    pub output_dir: Option<PathBuf>,
    pub parallelism: Option<usize>,
    /// Initial radii of the mean curvature flows.
    pub flow_radii: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig::from_raw(RawConfig::default()).expect("the default config is valid")
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let message = e.message().to_string();
            // Unknown keys are reported by name in the message itself.
            let key = unknown_field(&message).unwrap_or_else(|| "<file>".to_string());
            invalid(key, message)
        })?;
        Self::from_raw(raw)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid("<file>", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    fn from_raw(raw: RawConfig) -> Result<Self, ConfigError> {
        let models = match raw.models {
            None => default_models(),
            Some(list) => {
                if list.is_empty() {
                    return Err(invalid("models", "must list at least one model"));
                }
                list.into_iter()
                    .enumerate()
                    .map(|(i, m)| {
                        if m.n < 3 {
                            return Err(invalid(format!("models[{i}].n"), format!("dimension must be at least 3, got {}", m.n)));
                        }
                        let spec = ModelSpec {
                            family: m.family,
                            params: m.params,
                            n: m.n as usize,
                            omega_factor: m.omega_factor.unwrap_or(1.0),
                        };
                        spec.manifold().map_err(|e| invalid(format!("models[{i}].{}", e.key), e.message))?;
                        Ok(spec)
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
        };
        let r0 = raw.r0.unwrap_or(1.0);
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(invalid("r0", format!("must be positive, got {r0}")));
        }
        for (i, spec) in models.iter().enumerate() {
            let m = spec.manifold().expect("validated above");
            if !m.warp().contains(r0) {
                return Err(invalid("r0", format!("{r0} lies outside the domain of models[{i}] ({})", spec.id())));
            }
        }
        if let Some(betas) = &raw.betas {
            if betas.is_empty() {
                return Err(invalid("betas", "must not be empty"));
            }
            if let Some(b) = betas.iter().find(|b| !(**b >= 0.0 && b.is_finite())) {
                return Err(invalid("betas", format!("{b} is not a non-negative number")));
            }
        }
        let t_grid = raw.t_grid.unwrap_or(GridSpec { count: 64, spacing: Spacing::Geometric, range: [1.0, 1e-4] });
        t_grid.validate("t_grid", 0.0, 1.0, true)?;
        let s_grid = raw.s_grid.unwrap_or(GridSpec { count: 64, spacing: Spacing::Linear, range: [0.0, 5.0] });
        s_grid.validate("s_grid", 0.0, f64::INFINITY, false)?;
        let suites = match raw.suites {
            None => SUITES.iter().map(|s| s.to_string()).collect(),
            Some(list) => {
                if let Some(bad) = list.iter().find(|s| !SUITES.contains(&s.as_str())) {
                    return Err(invalid("suites", format!("unknown suite `{bad}` (known: {})", SUITES.join(", "))));
                }
                // Canonical order, no duplicates.
                SUITES.iter().filter(|s| list.iter().any(|l| l == *s)).map(|s| s.to_string()).collect()
            }
        };
        let mut tolerances: BTreeMap<String, f64> =
            DEFAULT_TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        for (key, value) in raw.tolerances {
            if !tolerances.contains_key(&key) {
                return Err(invalid(format!("tolerances.{key}"), "unknown check"));
            }
            if !(value >= 0.0) {
                return Err(invalid(format!("tolerances.{key}"), format!("must be non-negative, got {value}")));
            }
            tolerances.insert(key, value);
        }
        if raw.parallelism == Some(0) {
            return Err(invalid("parallelism", "must be at least 1"));
        }
        let flow_radii = raw.flow_radii.unwrap_or_else(|| vec![1.0, 5.0]);
        if let Some(r) = flow_radii.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
            return Err(invalid("flow_radii", format!("{r} is not a positive radius")));
        }
        Ok(ExperimentConfig {
            models,
            r0,
            betas: raw.betas,
            t_grid,
            s_grid,
            suites,
            tolerances,
            output_dir: raw.output_dir,
            parallelism: raw.parallelism,
            flow_radii,
        })
    }

    pub fn tolerance(&self, key: &str) -> f64 {
        *self.tolerances.get(key).unwrap_or_else(|| panic!("no tolerance registered for `{key}`"))
    }

    pub fn runs(&self, suite: &str) -> bool {
        self.suites.iter().any(|s| s == suite)
    }

    /// The `β` values for dimension `n`, in increasing order.
    pub fn betas_for(&self, n: usize) -> Vec<f64> {
        let mut betas = match &self.betas {
            Some(b) => b.clone(),
            None => {
                let nf = n as f64;
                vec![(nf - 2.0) / (nf - 1.0), 1.0, nf - 2.0, 3.0]
            }
        };
        betas.sort_by(f64::total_cmp);
        betas.dedup();
        betas
    }
}

fn unknown_field(message: &str) -> Option<String> {
    let rest = message.strip_prefix("unknown field `")?;
    Some(rest.split('`').next()?.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_default() {
        let config = ExperimentConfig::from_toml("").unwrap();
        assert_eq!(config, ExperimentConfig::default());
        assert_eq!(config.models.len(), 30);
        assert_eq!(config.t_grid.points().len(), 64);
        assert_eq!(config.t_grid.points()[0], 1.0);
        assert_eq!(*config.t_grid.points().last().unwrap(), 1e-4);
        assert_eq!(config.betas_for(3), vec![0.5, 1.0, 3.0]);
        assert_eq!(config.betas_for(4), vec![2.0 / 3.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn shipped_default_file_mirrors_the_defaults() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.toml");
        assert_eq!(ExperimentConfig::load(&path).unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn dimension_two_names_n() {
        let err = ExperimentConfig::from_toml("[[models]]\nfamily = \"euclidean\"\nn = 2\n").unwrap_err();
        assert_eq!(err.key, "models[0].n");
        assert!(err.to_string().contains("`models[0].n`"));
    }

    #[test]
    fn bad_parameters_name_their_key() {
        let err = ExperimentConfig::from_toml("[[models]]\nfamily = \"cone\"\nparams = { alpha = 2.0 }\nn = 3\n").unwrap_err();
        assert_eq!(err.key, "models[0].params.alpha");
        let err = ExperimentConfig::from_toml("[[models]]\nfamily = \"blob\"\nn = 3\n").unwrap_err();
        assert_eq!(err.key, "models[0].family");
        let err = ExperimentConfig::from_toml("[tolerances]\n\"monotone.signs\" = 0.0\n").unwrap_err();
        assert_eq!(err.key, "tolerances.monotone.signs");
        let err = ExperimentConfig::from_toml("suites = [\"plots\"]\n").unwrap_err();
        assert_eq!(err.key, "suites");
        let err = ExperimentConfig::from_toml("colour = 3\n").unwrap_err();
        assert_eq!(err.key, "colour");
        let err = ExperimentConfig::from_toml("[t_grid]\ncount = 8\nspacing = \"geometric\"\nrange = [1.0, 0.0]\n").unwrap_err();
        assert_eq!(err.key, "t_grid.range");
    }

    #[test]
    fn overrides_apply() {
        let config = ExperimentConfig::from_toml("suites = [\"mcf\", \"geometry\"]\n[tolerances]\n\"monotone.sign\" = 0.0\n").unwrap();
        assert_eq!(config.tolerance("monotone.sign"), 0.0);
        assert_eq!(config.suites, vec!["geometry", "mcf"]);
    }
}
