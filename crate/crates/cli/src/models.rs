//! Model identifiers: `family`, `family(param=value)`, and the `/k`
//! suffix for quotients of the cross-section.

use std::collections::BTreeMap;
use std::fmt;

use capmono_core::geometry::{unit_sphere_area, ModelManifold, WarpProfile};

/// A model as named in a config file or on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub family: String,
    pub params: BTreeMap<String, f64>,
    pub n: usize,
    /// Cross-section area as a fraction of `|S^(n-1)|`.
    pub omega_factor: f64,
}

/// What went wrong with a model, and which key it concerns (`family`,
/// `n`, `omega_factor`, or `params.<name>`).
#[derive(Debug, Clone, PartialEq)]
pub struct ModelError {
    pub key: String,
    pub message: String,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

fn err(key: impl Into<String>, message: impl Into<String>) -> ModelError {
    ModelError { key: key.into(), message: message.into() }
}

/// The parameter a family takes, if any.
pub fn family_parameter(family: &str) -> Option<Option<&'static str>> {
    match family {
        "euclidean" | "tanh" | "cylinder_end" => Some(None),
        "cone" | "smoothed_cone" => Some(Some("alpha")),
        "power" => Some(Some("gamma")),
        _ => None,
    }
}

impl ModelSpec {
    pub fn new(family: &str, param: Option<f64>, n: usize) -> Self {
        let mut params = BTreeMap::new();
        if let (Some(Some(name)), Some(value)) = (family_parameter(family), param) {
            params.insert(name.to_string(), value);
        }
        ModelSpec { family: family.to_string(), params, n, omega_factor: 1.0 }
    }

    pub fn with_omega_factor(mut self, factor: f64) -> Self {
        self.omega_factor = factor;
        self
    }

    pub fn warp(&self) -> Result<WarpProfile, ModelError> {
        let expected = family_parameter(&self.family).ok_or_else(|| {
            err("family", format!("unknown family `{}` (known: {})", self.family, WarpProfile::FAMILIES.join(", ")))
        })?;
        for name in self.params.keys() {
            if Some(name.as_str()) != expected {
                return Err(err(format!("params.{name}"), format!("`{}` takes no parameter `{name}`", self.family)));
            }
        }
        let value = match expected {
            Some(name) => Some(
                *self
                    .params
                    .get(name)
                    .ok_or_else(|| err(format!("params.{name}"), format!("`{}` needs `{name}`", self.family)))?,
            ),
            None => None,
        };
        Ok(match (self.family.as_str(), value) {
            ("euclidean", _) => WarpProfile::Euclidean,
            ("tanh", _) => WarpProfile::Tanh,
            ("cylinder_end", _) => WarpProfile::CylinderEnd,
            ("cone", Some(alpha)) => WarpProfile::Cone { alpha },
            ("smoothed_cone", Some(alpha)) => WarpProfile::SmoothedCone { alpha },
            ("power", Some(gamma)) => WarpProfile::Power { gamma },
            _ => unreachable!("families and parameters are matched above"),
        })
    }

    /// Builds and validates the manifold.
    pub fn manifold(&self) -> Result<ModelManifold, ModelError> {
        if self.n < 3 {
            return Err(err("n", format!("dimension must be at least 3, got {}", self.n)));
        }
        if !(self.omega_factor > 0.0 && self.omega_factor <= 1.0) {
            return Err(err("omega_factor", format!("must lie in (0, 1], got {}", self.omega_factor)));
        }
        let warp = self.warp()?;
        let cross = self.omega_factor * unit_sphere_area(self.n);
        ModelManifold::with_cross_area(self.n, warp, cross).map_err(|e| match e {
            capmono_core::Error::InvalidParameter { name, .. } if name == "alpha" || name == "gamma" => {
                err(format!("params.{name}"), e.to_string())
            }
            other => err("family", other.to_string()),
        })
    }

    /// Identifier without the dimension, e.g. `cone(alpha=0.5)` or
    /// `euclidean/2`.
    pub fn id(&self) -> String {
        match self.manifold() {
            Ok(m) => m.to_string(),
            Err(_) => self.family.clone(),
        }
    }
}

/// Parses `family`, `family(name=value)` and an optional `/k` quotient
/// suffix. Extra parameters given separately are merged in.
pub fn parse_model_id(id: &str, n: usize, extra: &BTreeMap<String, f64>) -> Result<ModelSpec, ModelError> {
    let (body, order) = match id.rsplit_once('/') {
        Some((body, k)) => {
            let k: u32 = k.trim().parse().map_err(|_| err("model", format!("bad quotient order in `{id}`")))?;
            if k == 0 {
                return Err(err("model", "quotient order must be positive"));
            }
            (body, k)
        }
        None => (id, 1),
    };
    let (family, mut params) = match body.split_once('(') {
        Some((family, rest)) => {
            let inner = rest.strip_suffix(')').ok_or_else(|| err("model", format!("unbalanced parentheses in `{id}`")))?;
            let mut params = BTreeMap::new();
            for pair in inner.split(',').filter(|p| !p.trim().is_empty()) {
                let (k, v) = parse_param(pair)?;
                params.insert(k, v);
            }
            (family.trim(), params)
        }
        None => (body.trim(), BTreeMap::new()),
    };
    params.extend(extra.iter().map(|(k, v)| (k.clone(), *v)));
    let spec = ModelSpec { family: family.to_string(), params, n, omega_factor: 1.0 / order as f64 };
    spec.manifold()?;
    Ok(spec)
}

/// Parses `name=value`.
pub fn parse_param(pair: &str) -> Result<(String, f64), ModelError> {
    let (k, v) = pair.split_once('=').ok_or_else(|| err("params", format!("expected name=value, got `{pair}`")))?;
    let value: f64 = v.trim().parse().map_err(|_| err(format!("params.{}", k.trim()), format!("`{}` is not a number", v.trim())))?;
    Ok((k.trim().to_string(), value))
}

/// The shipped model set.
pub fn default_models() -> Vec<ModelSpec> {
    let mut models = Vec::new();
    for n in 3..=5 {
        models.push(ModelSpec::new("euclidean", None, n));
        for alpha in [0.3, 0.5, 0.7, 0.9] {
            models.push(ModelSpec::new("cone", Some(alpha), n));
        }
        for alpha in [0.3, 0.5, 0.7] {
            models.push(ModelSpec::new("smoothed_cone", Some(alpha), n));
        }
        models.push(ModelSpec::new("power", Some(0.6), n));
    }
    models.push(ModelSpec::new("tanh", None, 3));
    models.push(ModelSpec::new("cylinder_end", None, 3));
    models.push(ModelSpec::new("euclidean", None, 4).with_omega_factor(0.5));
    models
}

/// Text for `list-models`.
pub fn describe_families() -> String {
    let rows = [
        ("euclidean", "-", "f = r", "nonparabolic; AVR = 1 (omega_factor for quotients)"),
        ("cone", "alpha in (0, 1]", "f = alpha r", "nonparabolic; AVR = alpha^(n-1); singular tip unless alpha = 1"),
        (
            "smoothed_cone",
            "alpha in (0, 1)",
            "f = alpha r + (1 - alpha)(1 - e^-r)",
            "nonparabolic; AVR = alpha^(n-1); smooth origin",
        ),
        ("tanh", "-", "f = tanh r", "parabolic; AVR = 0; bounded cross-sections"),
        ("cylinder_end", "-", "f = 1", "parabolic; AVR = 0; product end, no origin"),
        (
            "power",
            "gamma in (1/(n-1), 1)",
            "f = r^gamma on r >= gamma^(1/(1-gamma))",
            "sub-Euclidean nonparabolic; AVR = 0; no origin",
        ),
    ];
    let mut out = String::from("family         parameter               profile                                  notes\n");
    for (family, param, profile, notes) in rows {
        out.push_str(&format!("{family:<14} {param:<23} {profile:<40} {notes}\n"));
    }
    out.push_str("\nEvery model takes n >= 3 and omega_factor in (0, 1] (cross-section area over |S^(n-1)|).\n");
    out.push_str("Model ids: `cone(alpha=0.5)`, `euclidean/2` for a quotient by a group of order 2.\n");
    out
}
