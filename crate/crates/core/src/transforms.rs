//! Fixed registry of named transforms available from the command line.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{GenutError, Result};
use crate::propagation::TransformFn;

/// Deterministic SIR state and rates used by [`sir_map`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SirState {
    pub infected: f64,
    pub recovered: f64,
    /// infection rate β
    pub beta: f64,
    /// recovery rate γ
    pub gamma: f64,
    pub population: f64,
}

impl Default for SirState {
    fn default() -> Self {
        SirState {
            infected: 10.0,
            recovered: 2.0,
            beta: 1.5,
            gamma: 0.3,
            population: 100.0,
        }
    }
}

impl SirState {
    pub fn validate(&self) -> Result<()> {
        if self.population.is_nan() || self.population <= 0.0 {
            return Err(GenutError::ParameterDomain {
                param: "population",
                value: self.population,
                domain: "> 0",
            });
        }
        for (param, value) in [("beta", self.beta), ("gamma", self.gamma)] {
            if value.is_nan() || value <= 0.0 {
                return Err(GenutError::ParameterDomain {
                    param,
                    value,
                    domain: "> 0",
                });
            }
        }
        for (param, value) in [("infected", self.infected), ("recovered", self.recovered)] {
            if value.is_nan() || value < 0.0 {
                return Err(GenutError::ParameterDomain {
                    param,
                    value,
                    domain: ">= 0",
                });
            }
        }
        if self.infected + self.recovered > self.population {
            return Err(GenutError::ParameterDomain {
                param: "infected + recovered",
                value: self.infected + self.recovered,
                domain: "<= population",
            });
        }
        Ok(())
    }
}

/// One step of the reduced SIR difference equations, where the random
/// vector `x = (I, R)` drives the increments:
///
/// ```text
/// I' = I + β (N - x₁ - x₂) x₁ / N
/// R' = R + γ x₁
/// ```
pub fn sir_map(x: &[f64], st: &SirState) -> [f64; 2] {
    let n = st.population;
    [
        st.infected + st.beta * (n - x[0] - x[1]) * x[0] / n,
        st.recovered + st.gamma * x[0],
    ]
}

/// Transforms selectable by name.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedTransform {
    Identity,
    /// `αx + βx²` element-wise.
    Quadratic {
        alpha: f64,
        beta: f64,
    },
    /// element-wise sine
    Sin,
    /// element-wise cosine
    Cos,
    /// `(sin(x₁x₂), cos(x₁x₂))`
    SinCosProduct,
    Sir(SirState),
}

impl NamedTransform {
    pub const NAMES: [&'static str; 6] = ["identity", "quadratic", "sin", "cos", "sin-cos-product", "sir"];

    /// Parses a name and `key=value,key=value` parameters.
    pub fn parse(name: &str, params: Option<&str>) -> Result<Self> {
        let mut kv = parse_params(params.unwrap_or(""))?;
        let mut take = |key: &str, default: f64| kv.remove(key).unwrap_or(default);
        let t = match name {
            "identity" => NamedTransform::Identity,
            "quadratic" => NamedTransform::Quadratic {
                alpha: take("alpha", 3.0),
                beta: take("beta", 2.0),
            },
            "sin" => NamedTransform::Sin,
            "cos" => NamedTransform::Cos,
            "sin-cos-product" => NamedTransform::SinCosProduct,
            "sir" => {
                let d = SirState::default();
                let st = SirState {
                    infected: take("infected", d.infected),
                    recovered: take("recovered", d.recovered),
                    beta: take("beta", d.beta),
                    gamma: take("gamma", d.gamma),
                    population: take("population", d.population),
                };
                st.validate()?;
                NamedTransform::Sir(st)
            }
            other => {
                return Err(GenutError::InvalidArgument(format!(
                    "unknown transform `{other}` (expected one of {})",
                    Self::NAMES.join(", ")
                )))
            }
        };
        if let Some(key) = kv.keys().next() {
            return Err(GenutError::InvalidArgument(format!(
                "parameter `{key}` does not apply to transform `{name}`"
            )));
        }
        Ok(t)
    }

    /// Instantiates the map for inputs of dimension `n`.
    pub fn build(&self, n: usize) -> Result<TransformFn> {
        let need = |expected: usize| -> Result<()> {
            if n == expected {
                Ok(())
            } else {
                Err(GenutError::DimensionMismatch {
                    what: "transform input dimension",
                    expected,
                    found: n,
                })
            }
        };
        Ok(match *self {
            NamedTransform::Identity => TransformFn::new("identity", n, n, |x| x.to_vec()),
            NamedTransform::Quadratic { alpha, beta } => TransformFn::new("quadratic", n, n, move |x| {
                x.iter().map(|&v| alpha * v + beta * v * v).collect()
            }),
            NamedTransform::Sin => TransformFn::new("sin", n, n, |x| x.iter().map(|v| v.sin()).collect()),
            NamedTransform::Cos => TransformFn::new("cos", n, n, |x| x.iter().map(|v| v.cos()).collect()),
            NamedTransform::SinCosProduct => {
                need(2)?;
                TransformFn::new("sin-cos-product", 2, 2, |x| {
                    let p = x[0] * x[1];
                    vec![p.sin(), p.cos()]
                })
            }
            NamedTransform::Sir(st) => {
                need(2)?;
                TransformFn::new("sir", 2, 2, move |x| sir_map(x, &st).to_vec())
            }
        })
    }
}

fn parse_params(s: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| GenutError::InvalidArgument(format!("expected key=value, got `{item}`")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|e| GenutError::InvalidArgument(format!("bad value for `{k}`: {e}")))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}
