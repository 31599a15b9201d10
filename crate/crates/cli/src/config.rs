//! Flat `key = value` configuration files for `verify`.
//!
//! One key per line, `#` starts a comment. Recognised keys:
//!
//! ```text
//! l1 l2 l3 alpha theta n m steps depth energy_count phases
//! battery            comma-separated check names (may be empty)
//! tolerance.<check>  per-check tolerance
//! output format budget_seconds rational_check
//! ```

use std::collections::BTreeSet;
use std::path::PathBuf;

use harper_core::verify::{CheckRegistry, OutputFormat, VerificationConfig};
use harper_core::{golden_mean, Coupling};

/// Every key that could not be used, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub offending: Vec<(String, String)>,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "malformed configuration; offending keys:")?;
        for (key, why) in &self.offending {
            writeln!(f, "  {key}: {why}")?;
        }
        Ok(())
    }
}

pub fn parse_alpha(s: &str) -> Result<f64, String> {
    if s.trim() == "golden" {
        return Ok(golden_mean());
    }
    let a: f64 = s.trim().parse().map_err(|_| format!("`{s}` is neither `golden` nor a number"))?;
    if a > 0.0 && a < 1.0 {
        Ok(a)
    } else {
        Err(format!("alpha must lie in (0, 1), got {a}"))
    }
}

fn parse_num<T: std::str::FromStr>(v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("cannot parse `{v}`"))
}

fn parse_positive(v: &str) -> Result<usize, String> {
    let n: usize = v.parse().map_err(|_| format!("`{v}` is not a positive integer"))?;
    if n == 0 {
        Err("must be positive".into())
    } else {
        Ok(n)
    }
}

fn parse_steps(v: &str) -> Result<usize, String> {
    // accept 1e5 style
    if let Ok(n) = v.parse::<usize>() {
        return if n > 0 { Ok(n) } else { Err("must be positive".into()) };
    }
    let x: f64 = v.parse().map_err(|_| format!("`{v}` is not a positive integer"))?;
    if x >= 1.0 && x.fract() == 0.0 && x < 1e15 {
        Ok(x as usize)
    } else {
        Err(format!("`{v}` is not a positive integer"))
    }
}

pub fn parse_config(text: &str, registry: &CheckRegistry) -> Result<VerificationConfig, ConfigError> {
    let mut cfg = VerificationConfig::default();
    let mut lambda = (cfg.coupling.lambda1, cfg.coupling.lambda2, cfg.coupling.lambda3);
    let mut bad: Vec<(String, String)> = Vec::new();
    let mut seen = BTreeSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bad.push((format!("line {}", lineno + 1), format!("expected `key = value`, got `{line}`")));
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        if !seen.insert(key.to_string()) {
            bad.push((key.to_string(), "duplicate key".into()));
            continue;
        }
        let result: Result<(), String> = (|| {
            match key {
                "l1" | "lambda1" => lambda.0 = parse_num(value)?,
                "l2" | "lambda2" => lambda.1 = parse_num(value)?,
                "l3" | "lambda3" => lambda.2 = parse_num(value)?,
                "alpha" => cfg.alpha = parse_alpha(value)?,
                "theta" => {
                    let t: f64 = parse_num(value)?;
                    if !(0.0..1.0).contains(&t) {
                        return Err("theta must lie in [0, 1)".into());
                    }
                    cfg.theta = t;
                }
                "n" | "N" => cfg.n = parse_positive(value)?,
                "m" | "M" => cfg.m = parse_positive(value)?,
                "steps" => cfg.steps = parse_steps(value)?,
                "depth" => cfg.depth = parse_positive(value)?,
                "energy_count" => cfg.energy_count = parse_positive(value)?,
                "phases" => cfg.phases = parse_steps(value)?,
                "battery" => {
                    let names: Vec<String> =
                        value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect();
                    if let Some(unknown) = names.iter().find(|n| registry.get(n).is_none()) {
                        return Err(format!("unknown check `{unknown}`"));
                    }
                    cfg.battery = names;
                }
                "output" => cfg.output = Some(PathBuf::from(value)),
                "format" => {
                    cfg.format = match value {
                        "csv" => OutputFormat::Csv,
                        "json" => OutputFormat::Json,
                        _ => return Err(format!("format must be csv or json, got `{value}`")),
                    }
                }
                "budget_seconds" => {
                    let b: f64 = parse_num(value)?;
                    if b.is_nan() || b <= 0.0 {
                        return Err("must be positive".into());
                    }
                    cfg.budget_seconds = Some(b);
                }
                "rational_check" => cfg.rational_check = parse_num(value)?,
                _ => {
                    if let Some(check) = key.strip_prefix("tolerance.") {
                        if registry.get(check).is_none() {
                            return Err(format!("unknown check `{check}`"));
                        }
                        let t: f64 = parse_num(value)?;
                        if t.is_nan() || t < 0.0 {
                            return Err("tolerance must be nonnegative".into());
                        }
                        cfg.tolerances.insert(check.to_string(), t);
                    } else {
                        return Err("unknown key".into());
                    }
                }
            }
            Ok(())
        })();
        if let Err(why) = result {
            bad.push((key.to_string(), why));
        }
    }
    match Coupling::new(lambda.0, lambda.1, lambda.2) {
        Ok(c) => cfg.coupling = c,
        Err(e) => bad.push(("l1, l2, l3".into(), e.to_string())),
    }
    if bad.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError { offending: bad })
    }
}
