//! Parsers for the state-spec mini-language used on the command line.
//!
//! Spin specs: `ghz`, `product:theta=<f64>`,
//! `rdicke:k=<int>[;theta=<f64>][;phi=<f64>]`, `decoghz:gamma=<f64>`.
//! Boson specs: `coherent:alpha=<f64>`, `cat:alpha=<f64>`, `fock:n=<int>`.
//! Extra parameters are separated by `;` because `,` already separates
//! state tokens in `--states` lists.
//!
//! Parsing never panics on any input; malformed specs report the offending
//! token.

use std::fmt;

/// A parse failure carrying the token that caused it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecError {
    pub token: String,
    pub reason: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bad state spec `{}`: {}", self.token, self.reason)
    }
}

impl std::error::Error for SpecError {}

#[derive(Debug, Clone, PartialEq)]
pub enum SpinStateSpec {
    Ghz,
    Product { theta: f64 },
    RotatedDicke { k: usize, theta: f64, phi: f64 },
    DecoGhz { gamma: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum BosonStateSpec {
    Coherent { alpha: f64 },
    Cat { alpha: f64 },
    Fock { n: usize },
}

struct KeyValues<'a> {
    pairs: Vec<(&'a str, &'a str)>,
    token: &'a str,
}

impl<'a> KeyValues<'a> {
    fn parse(token: &'a str, params: &'a str) -> Result<Self, SpecError> {
        let mut pairs = Vec::new();
        for part in params.split(';') {
            if part.is_empty() {
                return Err(SpecError {
                    token: token.to_string(),
                    reason: "empty parameter".into(),
                });
            }
            match part.split_once('=') {
                Some((k, v)) if !k.is_empty() && !v.is_empty() => pairs.push((k, v)),
                _ => {
                    return Err(SpecError {
                        token: token.to_string(),
                        reason: format!("expected key=value, got `{part}`"),
                    })
                }
            }
        }
        Ok(Self { pairs, token })
    }

    fn finite_f64(&self, key: &str) -> Result<Option<f64>, SpecError> {
        for (k, v) in &self.pairs {
            if *k == key {
                let value: f64 = v.parse().map_err(|_| SpecError {
                    token: self.token.to_string(),
                    reason: format!("`{v}` is not a number for `{key}`"),
                })?;
                if !value.is_finite() {
                    return Err(SpecError {
                        token: self.token.to_string(),
                        reason: format!("`{key}` must be finite"),
                    });
                }
                return Ok(Some(value));
            }
        }
        Ok(None)
    }

    fn usize_value(&self, key: &str) -> Result<Option<usize>, SpecError> {
        for (k, v) in &self.pairs {
            if *k == key {
                let value: usize = v.parse().map_err(|_| SpecError {
                    token: self.token.to_string(),
                    reason: format!("`{v}` is not a non-negative integer for `{key}`"),
                })?;
                return Ok(Some(value));
            }
        }
        Ok(None)
    }

    fn reject_unknown(&self, allowed: &[&str]) -> Result<(), SpecError> {
        for (k, _) in &self.pairs {
            if !allowed.contains(k) {
                return Err(SpecError {
                    token: self.token.to_string(),
                    reason: format!("unknown parameter `{k}`"),
                });
            }
        }
        Ok(())
    }
}

fn split_spec(token: &str) -> (&str, Option<&str>) {
    match token.split_once(':') {
        Some((name, params)) => (name, Some(params)),
        None => (token, None),
    }
}

fn require_param<T>(token: &str, key: &str, value: Option<T>) -> Result<T, SpecError> {
    value.ok_or_else(|| SpecError {
        token: token.to_string(),
        reason: format!("missing required parameter `{key}`"),
    })
}

fn reject_params(token: &str, params: Option<&str>) -> Result<(), SpecError> {
    match params {
        None => Ok(()),
        Some(_) => Err(SpecError {
            token: token.to_string(),
            reason: "this state takes no parameters".into(),
        }),
    }
}

/// Parse one spin-state token.
pub fn parse_spin_spec(token: &str) -> Result<SpinStateSpec, SpecError> {
    let token = token.trim();
    let (name, params) = split_spec(token);
    match name {
        "ghz" => {
            reject_params(token, params)?;
            Ok(SpinStateSpec::Ghz)
        }
        "product" => {
            let kv = KeyValues::parse(token, params.unwrap_or(""))?;
            kv.reject_unknown(&["theta"])?;
            let theta = require_param(token, "theta", kv.finite_f64("theta")?)?;
            Ok(SpinStateSpec::Product { theta })
        }
        "rdicke" => {
            let kv = KeyValues::parse(token, params.unwrap_or(""))?;
            kv.reject_unknown(&["k", "theta", "phi"])?;
            let k = require_param(token, "k", kv.usize_value("k")?)?;
            let theta = kv
                .finite_f64("theta")?
                .unwrap_or(std::f64::consts::FRAC_PI_2);
            let phi = kv.finite_f64("phi")?.unwrap_or(0.0);
            Ok(SpinStateSpec::RotatedDicke { k, theta, phi })
        }
        "decoghz" => {
            let kv = KeyValues::parse(token, params.unwrap_or(""))?;
            kv.reject_unknown(&["gamma"])?;
            let gamma = require_param(token, "gamma", kv.finite_f64("gamma")?)?;
            if !(0.0..=1.0).contains(&gamma) {
                return Err(SpecError {
                    token: token.to_string(),
                    reason: format!("gamma must lie in [0, 1] (got {gamma})"),
                });
            }
            Ok(SpinStateSpec::DecoGhz { gamma })
        }
        other => Err(SpecError {
            token: token.to_string(),
            reason: format!(
                "unknown spin state `{other}` (expected ghz, product, rdicke, decoghz)"
            ),
        }),
    }
}

/// Parse one boson-state token.
pub fn parse_boson_spec(token: &str) -> Result<BosonStateSpec, SpecError> {
    let token = token.trim();
    let (name, params) = split_spec(token);
    match name {
        "coherent" => {
            let kv = KeyValues::parse(token, params.unwrap_or(""))?;
            kv.reject_unknown(&["alpha"])?;
            let alpha = require_param(token, "alpha", kv.finite_f64("alpha")?)?;
            Ok(BosonStateSpec::Coherent { alpha })
        }
        "cat" => {
            let kv = KeyValues::parse(token, params.unwrap_or(""))?;
            kv.reject_unknown(&["alpha"])?;
            let alpha = require_param(token, "alpha", kv.finite_f64("alpha")?)?;
            if alpha.is_nan() || alpha <= 0.0 {
                return Err(SpecError {
                    token: token.to_string(),
                    reason: format!("cat alpha must be positive (got {alpha})"),
                });
            }
            Ok(BosonStateSpec::Cat { alpha })
        }
        "fock" => {
            let kv = KeyValues::parse(token, params.unwrap_or(""))?;
            kv.reject_unknown(&["n"])?;
            let n = require_param(token, "n", kv.usize_value("n")?)?;
            Ok(BosonStateSpec::Fock { n })
        }
        other => Err(SpecError {
            token: token.to_string(),
            reason: format!("unknown boson state `{other}` (expected coherent, cat, fock)"),
        }),
    }
}
