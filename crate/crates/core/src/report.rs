//! Experiment reports, configuration and serialisation helpers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

pub const SCHEMA_VERSION: &str = "1";

pub fn ser_rational<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn ser_bigint<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn ser_bigints<S: Serializer>(x: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(x.iter().map(|v| v.to_string()))
}

/// Where a reported number comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Exact,
    Fitted,
    /// Exponent of a published asymptotic bound, shown for comparison.
    Overlay,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tagged<T> {
    pub value: T,
    pub provenance: Provenance,
}

impl<T> Tagged<T> {
    pub fn exact(value: T) -> Self {
        Tagged { value, provenance: Provenance::Exact }
    }
    pub fn fitted(value: T) -> Self {
        Tagged { value, provenance: Provenance::Fitted }
    }
    pub fn overlay(value: T) -> Self {
        Tagged { value, provenance: Provenance::Overlay }
    }
}

/// Constants that enter the explicit bounds but have no closed form; all
/// default to zero except the existential `b_threshold`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExternalConstants {
    pub b1: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub epsilon1: f64,
    pub epsilon2: f64,
    /// Threshold constant `B(n, d, K)` of the affine counting theorem.
    pub b_threshold: Option<f64>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read constants: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed constants: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

impl ExternalConstants {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let c: ExternalConstants = serde_json::from_str(text)?;
        for (name, v) in [("b1", c.b1), ("kappa1", c.kappa1), ("kappa2", c.kappa2), ("epsilon1", c.epsilon1), ("epsilon2", c.epsilon2)] {
            if !v.is_finite() {
                return Err(ConfigError::Invalid(format!("{name} must be finite")));
            }
        }
        Ok(c)
    }

    /// `key = value` lines with real values; `#` starts a comment.
    pub fn from_key_values(text: &str) -> Result<Self, ConfigError> {
        let mut c = ExternalConstants::default();
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Invalid(format!("expected key = value, got `{line}`")))?;
            let v: f64 = v.trim().parse().map_err(|_| ConfigError::Invalid(format!("not a real number: `{}`", v.trim())))?;
            if !v.is_finite() {
                return Err(ConfigError::Invalid(format!("{} must be finite", k.trim())));
            }
            match k.trim() {
                "b1" => c.b1 = v,
                "kappa1" => c.kappa1 = v,
                "kappa2" => c.kappa2 = v,
                "epsilon1" => c.epsilon1 = v,
                "epsilon2" => c.epsilon2 = v,
                "b_threshold" => c.b_threshold = Some(v),
                other => return Err(ConfigError::Invalid(format!("unknown constant `{other}`"))),
            }
        }
        Ok(c)
    }
}

/// Run configuration shared by all commands.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    pub heights: Vec<u64>,
    pub budget: u64,
    pub threads: Option<usize>,
    pub seed: u64,
    pub constants: ExternalConstants,
}

impl Default for Config {
    fn default() -> Self {
        Config { heights: vec![16, 32, 64], budget: 50_000_000, threads: None, seed: 0, constants: ExternalConstants::default() }
    }
}

/// Versioned, deterministic report. Wall-clock times are deliberately absent.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub schema_version: &'static str,
    pub command: String,
    pub inputs: BTreeMap<String, serde_json::Value>,
    pub results: serde_json::Value,
    pub status: String,
}

impl ExperimentReport {
    pub fn new(command: &str) -> Self {
        ExperimentReport {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            inputs: BTreeMap::new(),
            results: serde_json::Value::Null,
            status: "ok".to_string(),
        }
    }

    pub fn input<T: Serialize>(mut self, key: &str, v: T) -> Self {
        self.inputs.insert(key.to_string(), serde_json::to_value(v).expect("serialisable input"));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialisable report")
    }
}

/// Least-squares slope and intercept of `log y` against `log x` over positive pairs.
pub fn fit_exponent(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    linear_fit(&pts)
}

/// Ordinary least squares `y = a x + b`; `None` with fewer than two distinct x.
pub fn linear_fit(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let a = sxy / sxx;
    Some((a, my - a * mx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_parse_with_defaults() {
        let c = ExternalConstants::from_json(r#"{"kappa1": 1.5}"#).unwrap();
        assert_eq!(c.kappa1, 1.5);
        assert_eq!(c.b1, 0.0);
        assert!(c.b_threshold.is_none());
        assert!(ExternalConstants::from_json("{bad").is_err());
    }

    #[test]
    fn constants_from_key_values() {
        let c = ExternalConstants::from_key_values("# comment\nkappa2 = 0.5\nb_threshold=12\n").unwrap();
        assert_eq!(c.kappa2, 0.5);
        assert_eq!(c.b_threshold, Some(12.0));
        assert!(ExternalConstants::from_key_values("zeta = 1").is_err());
        assert!(ExternalConstants::from_key_values("b1 = x").is_err());
        assert!(ExternalConstants::from_key_values("b1 = inf").is_err());
    }

    #[test]
    fn exponent_fit() {
        let xs = [2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(1.5)).collect();
        let (a, b) = fit_exponent(&xs, &ys).unwrap();
        assert!((a - 1.5).abs() < 1e-12);
        assert!((b - 3f64.ln()).abs() < 1e-12);
        assert!(fit_exponent(&[2.0], &[1.0]).is_none());
    }
}
