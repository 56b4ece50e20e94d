use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::environment::{Model, RadiusDistribution, RadiusLaw};
use crate::error::{Error, Result};
use crate::estimators::{QChoice, RegionModel};
use crate::graph::{GraphKind, GraphSpec, Window};

/// A complete experiment description. Together with the program version it
/// determines every random stream and every output byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    /// Directory receiving `estimates.csv` and `manifest.json`.
    pub output: PathBuf,
    pub graph: GraphKind,
    pub window: Window,
    #[serde(default)]
    pub region: RegionConfig,
    pub estimator: EstimatorConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionConfig {
    /// No reinforced edges; `q` is irrelevant.
    #[default]
    Empty,
    Overlap { law: RadiusLaw },
    Stack { law: RadiusLaw },
}

/// One entry of a `q` grid: a probability, or the string `"p"` for `q = p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QEntry {
    Value(f64),
    Symbol(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EstimatorConfig {
    /// Annealed `P(origin <-> window boundary)` on the `q x p` grid.
    Theta {
        p: Vec<f64>,
        q: Vec<f64>,
        replicas: u64,
    },
    /// Homogeneous point-to-boundary probabilities and their log-linear fit.
    Decay {
        p: Vec<f64>,
        radii: Vec<u64>,
        replicas: u64,
    },
    /// Mean covered fraction of the window.
    Coverage { environments: u64 },
    /// Bisection for the `tau` crossing of the annealed proxy, per `q`.
    PcScan {
        q: Vec<QEntry>,
        replicas: u64,
        #[serde(default = "default_tau")]
        tau: f64,
    },
    /// Survival of the index of the first successful upward exploration.
    TPlus {
        p: f64,
        q: f64,
        decay_rate: f64,
        /// Defaults to the least admissible value.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        l0: Option<u64>,
        max_k: u64,
        m_max: u64,
        replicas: u64,
    },
}

fn default_tau() -> f64 {
    0.5
}

fn field(name: &str, msg: impl Into<String>) -> Error {
    Error::InvalidField {
        field: name.into(),
        msg: msg.into(),
    }
}

fn check_probability(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(field(name, format!("{v} is not in [0, 1]")))
    }
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(field(name, "must list at least one value"));
    }
    for (i, &v) in grid.iter().enumerate() {
        check_probability(&format!("{name}[{i}]"), v)?;
    }
    Ok(())
}

fn check_count(name: &str, v: u64) -> Result<()> {
    if v == 0 {
        Err(field(name, "must be at least 1"))
    } else {
        Ok(())
    }
}

impl RegionConfig {
    pub fn law(&self) -> Option<RadiusLaw> {
        match *self {
            RegionConfig::Empty => None,
            RegionConfig::Overlap { law } | RegionConfig::Stack { law } => Some(law),
        }
    }

    pub fn model(&self) -> Option<Model> {
        match self {
            RegionConfig::Empty => None,
            RegionConfig::Overlap { .. } => Some(Model::Overlap),
            RegionConfig::Stack { .. } => Some(Model::Stack),
        }
    }

    pub fn region_model(&self) -> Result<RegionModel> {
        match (self.model(), self.law()) {
            (Some(model), Some(law)) => Ok(RegionModel::random(
                model,
                RadiusDistribution::new(law).map_err(|e| field("region.law", e.to_string()))?,
            )),
            _ => Ok(RegionModel::Empty),
        }
    }
}

impl QEntry {
    pub fn choice(&self) -> Result<QChoice> {
        match self {
            QEntry::Value(v) => Ok(QChoice::Fixed(*v)),
            QEntry::Symbol(s) if s == "p" => Ok(QChoice::EqualsP),
            QEntry::Symbol(s) => Err(Error::Config(format!("q entry {s:?} is neither a number nor \"p\""))),
        }
    }
}

impl EstimatorConfig {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorConfig::Theta { .. } => "theta",
            EstimatorConfig::Decay { .. } => "decay",
            EstimatorConfig::Coverage { .. } => "coverage",
            EstimatorConfig::PcScan { .. } => "pc_scan",
            EstimatorConfig::TPlus { .. } => "t_plus",
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(0);
            Error::Parse {
                line,
                msg: e.message().to_string(),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs always serialize")
    }

    pub fn graph_spec(&self) -> Result<GraphSpec> {
        GraphSpec::new(self.graph).map_err(|e| field("graph", e.to_string()))
    }

    /// Checks every field, naming the first offending one.
    pub fn validate(&self) -> Result<()> {
        self.graph_spec()?;
        self.region.region_model()?;
        if self.output.as_os_str().is_empty() {
            return Err(field("output", "must not be empty"));
        }
        match &self.estimator {
            EstimatorConfig::Theta { p, q, replicas } => {
                check_grid("estimator.p", p)?;
                check_grid("estimator.q", q)?;
                check_count("estimator.replicas", *replicas)?;
            }
            EstimatorConfig::Decay { p, radii, replicas } => {
                check_grid("estimator.p", p)?;
                check_count("estimator.replicas", *replicas)?;
                if radii.is_empty() {
                    return Err(field("estimator.radii", "must list at least one radius"));
                }
                if let Some(&r) = radii
                    .iter()
                    .find(|&&r| r == 0 || r > self.window.base_radius.min(self.window.height))
                {
                    return Err(field(
                        "estimator.radii",
                        format!("radius {r} must lie in 1..=min(base_radius, height)"),
                    ));
                }
                if !matches!(self.region, RegionConfig::Empty) {
                    return Err(field("region", "decay fits use the homogeneous model"));
                }
            }
            EstimatorConfig::Coverage { environments } => {
                check_count("estimator.environments", *environments)?;
                if matches!(self.region, RegionConfig::Empty) {
                    return Err(field("region", "coverage needs a random region"));
                }
            }
            EstimatorConfig::PcScan { q, replicas, tau } => {
                if q.is_empty() {
                    return Err(field("estimator.q", "must list at least one value"));
                }
                for (i, entry) in q.iter().enumerate() {
                    let name = format!("estimator.q[{i}]");
                    match entry.choice().map_err(|e| field(&name, e.to_string()))? {
                        QChoice::Fixed(v) => check_probability(&name, v)?,
                        QChoice::EqualsP => {}
                    }
                }
                check_count("estimator.replicas", *replicas)?;
                if !(*tau > 0.0 && *tau < 1.0) {
                    return Err(field("estimator.tau", format!("{tau} is not in (0, 1)")));
                }
            }
            EstimatorConfig::TPlus {
                p,
                q,
                decay_rate,
                l0,
                max_k,
                m_max,
                replicas,
            } => {
                check_probability("estimator.p", *p)?;
                check_probability("estimator.q", *q)?;
                if !(*decay_rate > 0.0 && decay_rate.is_finite()) {
                    return Err(field("estimator.decay_rate", "must be positive"));
                }
                check_count("estimator.max_k", *max_k)?;
                check_count("estimator.m_max", *m_max)?;
                check_count("estimator.replicas", *replicas)?;
                let RegionConfig::Stack { law } = self.region else {
                    return Err(field("region", "t_plus needs the stack model"));
                };
                if let Some(l0) = l0 {
                    let dist = RadiusDistribution::new(law)?;
                    if dist.prob_between(*l0, 2 * l0) <= 0.0 {
                        return Err(field("estimator.l0", format!("P({l0} <= X <= {}) = 0", 2 * l0)));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const THETA: &str = r#"
master_seed = 7
output = "out"

[graph]
kind = "integer_lattice"
dim = 1

[window]
base_radius = 8
height = 8

[region]
model = "overlap"
law = { kind = "geometric", theta = 0.5 }

[estimator]
kind = "theta"
p = [0.3, 0.4, 0.5]
q = [0.8, 0.9, 0.95]
replicas = 10
"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = ExperimentConfig::from_toml(THETA).unwrap();
        assert_eq!(cfg.window, Window::new(8, 8));
        let again = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn zero_replicas_names_the_field() {
        let err = ExperimentConfig::from_toml(&THETA.replace("replicas = 10", "replicas = 0"))
            .unwrap_err();
        match err {
            Error::InvalidField { field, .. } => assert_eq!(field, "estimator.replicas"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected_with_a_line() {
        let text = THETA.replace("height = 8", "height = 8\nheigth = 9");
        match ExperimentConfig::from_toml(&text).unwrap_err() {
            Error::Parse { line, msg } => {
                assert!(msg.contains("heigth"), "{msg}");
                assert!(line >= 11, "line {line}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn q_grid_accepts_p_symbol() {
        let text = r#"
master_seed = 1
output = "o"
graph = { kind = "integer_lattice", dim = 1 }
window = { base_radius = 4, height = 4 }
[estimator]
kind = "pc_scan"
q = ["p", 0.8]
replicas = 5
"#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        let EstimatorConfig::PcScan { q, tau, .. } = &cfg.estimator else {
            panic!()
        };
        assert_eq!(q[0].choice().unwrap(), QChoice::EqualsP);
        assert_eq!(*tau, 0.5);
        let bad = text.replace("\"p\"", "\"x\"");
        assert!(matches!(
            ExperimentConfig::from_toml(&bad).unwrap_err(),
            Error::InvalidField { .. }
        ));
    }
}
