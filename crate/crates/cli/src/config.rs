//! Experiment configuration: JSON files merged with command-line overrides.

use serde::Deserialize;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use subspec_core::matrices::cesaro_matrix;
use subspec_core::subordination::subordinate_matrix;
use subspec_core::{BorelMeasure, Complex64, Density, FlowKind, OperatorMatrix, Semiflow};

pub const MAX_ORDER: usize = 4096;
pub const MAX_RESOLUTION: usize = 400;

pub const SUITES: [&str; 10] = [
    "semiflow-identities",
    "resolvent-threeway",
    "cesaro-transpose",
    "eigenfield",
    "membership",
    "pseudospectra-disk",
    "radius-formula",
    "cesaro-as-resolvent",
    "measure-regularity",
    "local-radius",
];

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

/// A flow given either by name or as `{"kind": name, "time_scale": α}`.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum FlowSpec {
    Name(String),
    Detailed {
        kind: String,
        #[serde(default)]
        time_scale: Option<f64>,
    },
}

impl FlowSpec {
    pub fn build(&self) -> Result<Semiflow, ConfigError> {
        let (name, alpha) = match self {
            FlowSpec::Name(n) => (n.as_str(), None),
            FlowSpec::Detailed { kind, time_scale } => (kind.as_str(), *time_scale),
        };
        let kind = FlowKind::from_name(name).ok_or_else(|| {
            let known: Vec<&str> = FlowKind::ALL.iter().map(|k| k.name()).collect();
            bad(format!("unknown flow {name:?}; expected one of {}", known.join(", ")))
        })?;
        match alpha {
            None => Ok(Semiflow::new(kind)),
            Some(a) => Semiflow::with_time_scale(kind, a).map_err(|e| bad(e.to_string())),
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DensitySpec {
    Exponential { rate: [f64; 2] },
    Gamma { power: f64, rate: [f64; 2] },
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
pub struct AtomSpec {
    pub t: f64,
    pub weight: [f64; 2],
}

#[derive(Debug, Clone, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    #[serde(default)]
    pub atoms: Vec<AtomSpec>,
    #[serde(default)]
    pub density: Option<DensitySpec>,
    #[serde(default)]
    pub margin: Option<f64>,
}

fn complex(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

fn numbers(s: &str) -> Result<Vec<f64>, ConfigError> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| bad(format!("not a number: {x:?}"))))
        .collect()
}

impl MeasureSpec {
    /// Parses `dirac:T`, `exp:RE[,IM]`, `gamma:P,RE[,IM]`, inline JSON, or a
    /// path to a JSON file.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let text = text.trim();
        if text.starts_with('{') {
            return serde_json::from_str(text).map_err(|e| bad(format!("measure JSON: {e}")));
        }
        if let Some((tag, rest)) = text.split_once(':') {
            let v = numbers(rest)?;
            let rate = |i: usize| -> Result<[f64; 2], ConfigError> {
                match &v[i..] {
                    [re] => Ok([*re, 0.0]),
                    [re, im] => Ok([*re, *im]),
                    _ => Err(bad(format!("measure {text:?}: expected a rate RE[,IM]"))),
                }
            };
            return match tag {
                "dirac" if v.len() == 1 => Ok(MeasureSpec {
                    atoms: vec![AtomSpec { t: v[0], weight: [1.0, 0.0] }],
                    ..Default::default()
                }),
                "exp" if !v.is_empty() => Ok(MeasureSpec {
                    density: Some(DensitySpec::Exponential { rate: rate(0)? }),
                    ..Default::default()
                }),
                "gamma" if v.len() >= 2 => Ok(MeasureSpec {
                    density: Some(DensitySpec::Gamma { power: v[0], rate: rate(1)? }),
                    ..Default::default()
                }),
                _ => Err(bad(format!("unrecognized measure {text:?}"))),
            };
        }
        let path = Path::new(text);
        if path.is_file() {
            let body = fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
            return serde_json::from_str(&body).map_err(|e| bad(format!("{}: {e}", path.display())));
        }
        Err(bad(format!("unrecognized measure {text:?}")))
    }

    pub fn build(&self) -> Result<BorelMeasure, ConfigError> {
        let density = match &self.density {
            None => None,
            Some(DensitySpec::Exponential { rate }) => Some(Density::exponential(complex(*rate))),
            Some(DensitySpec::Gamma { power, rate }) => {
                Some(Density::gamma(*power, complex(*rate)).map_err(|e| bad(e.to_string()))?)
            }
        };
        let atoms = self.atoms.iter().map(|a| (a.t, complex(a.weight))).collect();
        let margin = self.margin.unwrap_or(subspec_core::subordination::DEFAULT_MARGIN);
        BorelMeasure::new(atoms, density, margin).map_err(|e| bad(e.to_string()))
    }
}

/// JSON experiment file; every field is optional and command-line flags win.
#[derive(Debug, Clone, Deserialize, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub flow: Option<FlowSpec>,
    pub measure: Option<MeasureSpec>,
    #[serde(rename = "N")]
    pub order: Option<usize>,
    pub p: Option<f64>,
    pub t: Option<f64>,
    #[serde(rename = "box")]
    pub bounds: Option<[f64; 4]>,
    pub res: Option<[usize; 2]>,
    pub suite: Option<String>,
    pub out: Option<PathBuf>,
    pub operator: Option<String>,
    pub x: Option<String>,
    pub n_max: Option<usize>,
    pub eps: Option<f64>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let body = fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&body).map_err(|e| bad(format!("{}: {e}", path.display())))
    }

    /// Checks the structural invariants: order, grid size, suite name, exponent.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(n) = self.order {
            if n == 0 || n > MAX_ORDER {
                return Err(bad(format!("N = {n} must lie in 1..={MAX_ORDER}")));
            }
        }
        if let Some([nx, ny]) = self.res {
            if nx == 0 || ny == 0 || nx > MAX_RESOLUTION || ny > MAX_RESOLUTION {
                return Err(bad(format!(
                    "resolution {nx}x{ny} must lie within 1..={MAX_RESOLUTION} per axis"
                )));
            }
        }
        if let Some([x0, x1, y0, y1]) = self.bounds {
            if !(x0 < x1 && y0 < y1) || [x0, x1, y0, y1].iter().any(|v| !v.is_finite()) {
                return Err(bad("box must satisfy x0 < x1 and y0 < y1 with finite values"));
            }
        }
        if let Some(s) = &self.suite {
            if !SUITES.contains(&s.as_str()) {
                return Err(bad(format!("unknown suite {s:?}; registered: {}", SUITES.join(", "))));
            }
        }
        if let Some(p) = self.p {
            if !(p >= 1.0 && p.is_finite()) {
                return Err(bad(format!("p = {p} must satisfy 1 <= p < inf")));
            }
        }
        if let Some(t) = self.t {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(bad(format!("t = {t} must be finite and nonnegative")));
            }
        }
        if let Some(e) = self.eps {
            if !(e > 0.0 && e.is_finite()) {
                return Err(bad(format!("eps = {e} must be positive")));
            }
        }
        if let Some(flow) = &self.flow {
            flow.build()?;
        }
        Ok(())
    }

    pub fn flow(&self) -> Result<Semiflow, ConfigError> {
        self.flow
            .as_ref()
            .map(FlowSpec::build)
            .unwrap_or_else(|| Ok(Semiflow::affine()))
    }

    pub fn measure(&self) -> Result<BorelMeasure, ConfigError> {
        match &self.measure {
            Some(m) => m.build(),
            None => BorelMeasure::exponential(Complex64::new(1.0, 0.0)).map_err(|e| bad(e.to_string())),
        }
    }

    pub fn order_or(&self, default: usize) -> usize {
        self.order.unwrap_or(default)
    }

    pub fn p_or_2(&self) -> f64 {
        self.p.unwrap_or(2.0)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn tolerance(&self, check: &str, default: f64) -> f64 {
        self.tolerances.get(check).copied().unwrap_or(default)
    }
}

/// The matrix named by `--operator`.
pub fn build_operator(config: &ExperimentConfig, default_order: usize) -> Result<OperatorMatrix, ConfigError> {
    let order = config.order_or(default_order);
    let name = config.operator.as_deref().unwrap_or("cesaro");
    match name {
        "cesaro" => Ok(cesaro_matrix(order)),
        "identity" => Ok(OperatorMatrix::identity(order)),
        "composition" => {
            let t = config.t.unwrap_or(1.0);
            config
                .flow()?
                .composition_matrix(t, order, None)
                .map_err(|e| bad(e.to_string()))
        }
        "subordinated" => subordinate_matrix(&config.flow()?, &config.measure()?, order, None)
            .map_err(|e| bad(e.to_string())),
        other => Err(bad(format!(
            "unknown operator {other:?}; expected cesaro, identity, composition or subordinated"
        ))),
    }
}

/// Starting vector named by `--x`: `e<k>` or `ones`.
pub fn build_vector(spec: &str, order: usize) -> Result<subspec_core::CoeffVector, ConfigError> {
    if spec == "ones" {
        return subspec_core::CoeffVector::from_real(&vec![1.0; order + 1]).map_err(|e| bad(e.to_string()));
    }
    let k: usize = spec
        .strip_prefix('e')
        .and_then(|k| k.parse().ok())
        .ok_or_else(|| bad(format!("unknown vector {spec:?}; expected e<k> or ones")))?;
    if k > order {
        return Err(bad(format!("e{k} does not fit order {order}")));
    }
    Ok(subspec_core::CoeffVector::monomial(k, order))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_measures() {
        let m = MeasureSpec::parse("exp:1").unwrap();
        assert_eq!(m.density, Some(DensitySpec::Exponential { rate: [1.0, 0.0] }));
        let m = MeasureSpec::parse("exp:1.5,0.7").unwrap();
        assert_eq!(m.density, Some(DensitySpec::Exponential { rate: [1.5, 0.7] }));
        let m = MeasureSpec::parse("gamma:-0.5,1").unwrap();
        assert_eq!(m.density, Some(DensitySpec::Gamma { power: -0.5, rate: [1.0, 0.0] }));
        let m = MeasureSpec::parse("dirac:0").unwrap();
        assert_eq!(m.atoms.len(), 1);
        assert!(m.build().unwrap().density().is_none());
        let m = MeasureSpec::parse(r#"{"density": {"kind": "exponential", "rate": [2, 0]}}"#).unwrap();
        assert!(m.build().is_ok());
        assert!(MeasureSpec::parse("exp:").is_err());
        assert!(MeasureSpec::parse("beta:1").is_err());
    }

    #[test]
    fn flows_by_name_and_object() {
        let f: FlowSpec = serde_json::from_str(r#""hyp-auto""#).unwrap();
        assert_eq!(f.build().unwrap().kind(), FlowKind::HyperbolicAutomorphism);
        let f: FlowSpec = serde_json::from_str(r#"{"kind": "affine", "time_scale": 2}"#).unwrap();
        assert_eq!(f.build().unwrap().time_scale(), 2.0);
        assert!(FlowSpec::Name("spiral".into()).build().is_err());
    }

    #[test]
    fn validation_limits() {
        let ok = ExperimentConfig { order: Some(4096), res: Some([400, 400]), ..Default::default() };
        assert!(ok.validate().is_ok());
        let big = ExperimentConfig { order: Some(4097), ..Default::default() };
        assert!(big.validate().is_err());
        let wide = ExperimentConfig { res: Some([401, 10]), ..Default::default() };
        assert!(wide.validate().is_err());
        let suite = ExperimentConfig { suite: Some("everything".into()), ..Default::default() };
        assert!(suite.validate().is_err());
        let p = ExperimentConfig { p: Some(0.5), ..Default::default() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn config_file_fields() {
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{"flow": "affine", "N": 8, "p": 2, "box": [-1, 1, -1, 1], "res": [10, 20],
                "measure": {"density": {"kind": "exponential", "rate": [1, 0]}},
                "tolerances": {"max-entry-error": 1e-9}}"#,
        )
        .unwrap();
        assert_eq!(cfg.order, Some(8));
        assert_eq!(cfg.res, Some([10, 20]));
        assert_eq!(cfg.tolerance("max-entry-error", 1.0), 1e-9);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"colour": 1}"#).is_err());
    }

    #[test]
    fn vectors() {
        assert_eq!(build_vector("e0", 4).unwrap().coeffs()[0], Complex64::new(1.0, 0.0));
        assert!(build_vector("e9", 4).is_err());
        assert_eq!(build_vector("ones", 3).unwrap().order(), 3);
    }
}
