use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::checks::{duality_dos_check, lambda_swap_check, theorem31_check, thouless_check};
use super::{CheckReport, ParamValue, Params, VerifyError};
use crate::greenm::{
    green_diag_residuals, lemma26_residual, limiting_m_stabilizes, m_from_resolvent, m_plus, prop24_check,
};
use crate::model::family::HarperFamily;
use crate::model::{
    convergents, diophantine_witness, jensen_log_integral_closed, jensen_log_integral_quadrature, sigma_dual, Coupling,
};
use crate::spectrum::spectrum_samples;
use crate::{golden_mean, Error, C64};

/// Spectral parameter of the phase-averaged LE / m-function identity.
pub const PROP24_Z: C64 = C64::new(0.5, 0.1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Everything a battery run needs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationConfig {
    pub coupling: Coupling,
    pub alpha: f64,
    pub theta: f64,
    pub n: usize,
    pub m: usize,
    pub steps: usize,
    pub depth: usize,
    pub energy_count: usize,
    /// Phase-grid size for phase averages.
    pub phases: usize,
    /// Overrides of the per-check default tolerances.
    pub tolerances: BTreeMap<String, f64>,
    pub battery: Vec<String>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    /// Reports that take longer are flagged `over_budget`.
    pub budget_seconds: Option<f64>,
    /// Repeat `theorem31` at a rational convergent of `alpha`.
    pub rational_check: bool,
}

impl Default for VerificationConfig {
    fn default() -> Self {
        Self {
            coupling: Coupling::new(0.0, 0.5, 0.0).unwrap(),
            alpha: golden_mean(),
            theta: 0.0,
            n: 500,
            m: 20,
            steps: 100_000,
            depth: 2000,
            energy_count: 10,
            phases: 10_000,
            tolerances: BTreeMap::new(),
            battery: CheckRegistry::with_builtins().names().map(String::from).collect(),
            output: None,
            format: OutputFormat::Csv,
            budget_seconds: None,
            rational_check: false,
        }
    }
}

impl VerificationConfig {
    /// Sizes and tolerances positive, battery names registered.
    pub fn validate(&self, registry: &CheckRegistry) -> Result<(), VerifyError> {
        let sizes = [
            ("n", self.n),
            ("m", self.m),
            ("steps", self.steps),
            ("depth", self.depth),
            ("energy_count", self.energy_count),
            ("phases", self.phases),
        ];
        if let Some((key, _)) = sizes.iter().find(|(_, v)| *v == 0) {
            return Err(VerifyError::InvalidConfig(format!("{key} must be positive")));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) || !(0.0..1.0).contains(&self.theta) {
            return Err(VerifyError::InvalidConfig("alpha must lie in (0, 1) and theta in [0, 1)".into()));
        }
        for (name, tol) in &self.tolerances {
            if registry.get(name).is_none() {
                return Err(VerifyError::UnknownCheck(name.clone()));
            }
            if tol.is_nan() || *tol < 0.0 {
                return Err(VerifyError::InvalidConfig(format!("tolerance for {name} must be nonnegative")));
            }
        }
        if let Some(name) = self.battery.iter().find(|n| registry.get(n).is_none()) {
            return Err(VerifyError::UnknownCheck(name.clone()));
        }
        Ok(())
    }

    fn family(&self) -> Result<HarperFamily, Error> {
        Ok(HarperFamily::new(self.coupling, self.alpha)?)
    }

    fn base_inputs(&self) -> Params {
        let mut p = Params::new();
        p.insert("lambda1".into(), self.coupling.lambda1.into());
        p.insert("lambda2".into(), self.coupling.lambda2.into());
        p.insert("lambda3".into(), self.coupling.lambda3.into());
        p.insert("alpha".into(), self.alpha.into());
        p.insert("theta".into(), self.theta.into());
        p.insert("diophantine_witness".into(), diophantine_witness(self.alpha, 2.0, 1e-2, 10_000).into());
        p
    }

    /// Phase `j` of `count` on a grid shifted by `theta`.
    fn phase(&self, j: usize, count: usize) -> f64 {
        (self.theta + j as f64 / count as f64).rem_euclid(1.0)
    }
}

/// Output of a check before it is wrapped into a report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Measurement {
    pub measured: Vec<f64>,
    pub expected: Vec<f64>,
    pub inputs: Params,
    pub diagnostics: Params,
}

impl Measurement {
    fn residuals(residuals: Vec<f64>) -> Self {
        let expected = vec![0.0; residuals.len()];
        Self { measured: residuals, expected, ..Default::default() }
    }

    fn from_report(r: CheckReport) -> Self {
        Self { measured: r.measured, expected: r.expected, inputs: r.inputs, diagnostics: r.diagnostics }
    }
}

/// A named verification step.
pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;
    fn default_tolerance(&self) -> f64;
    fn run(&self, config: &VerificationConfig) -> Result<Measurement, Error>;
}

/// Checks by name, in registration order.
pub struct CheckRegistry {
    checks: Vec<Box<dyn Check>>,
}

impl CheckRegistry {
    pub fn empty() -> Self {
        Self { checks: Vec::new() }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(MOracle));
        r.register(Box::new(GreenIdentities));
        r.register(Box::new(Prop24));
        r.register(Box::new(Lemma26));
        r.register(Box::new(Theorem31));
        r.register(Box::new(Thouless));
        r.register(Box::new(Duality));
        r.register(Box::new(Jensen));
        r.register(Box::new(LambdaSwap));
        r
    }

    /// Adds a check, replacing any previous one with the same name.
    pub fn register(&mut self, check: Box<dyn Check>) {
        self.checks.retain(|c| c.name() != check.name());
        self.checks.push(check);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Check> {
        self.checks.iter().find(|c| c.name() == name).map(|c| c.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.checks.iter().map(|c| c.name())
    }

    /// Runs one check and wraps the outcome; errors become failed reports.
    pub fn run(&self, check: &dyn Check, config: &VerificationConfig) -> CheckReport {
        let tolerance = config.tolerances.get(check.name()).copied().unwrap_or_else(|| check.default_tolerance());
        let start = Instant::now();
        let outcome = check.run(config);
        let elapsed = start.elapsed().as_secs_f64();
        let mut report = match outcome {
            Ok(m) => {
                let mut inputs = config.base_inputs();
                inputs.extend(m.inputs);
                let mut r = CheckReport::new(check.name(), inputs, m.measured, m.expected, tolerance);
                r.diagnostics = m.diagnostics;
                r
            }
            Err(e) => CheckReport::failed(check.name(), config.base_inputs(), tolerance, e.to_string()),
        };
        report.runtime_seconds = elapsed;
        report.over_budget = config.budget_seconds.is_some_and(|b| elapsed > b);
        report
    }
}

impl Default for CheckRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

/// Runs the configured battery in order. A failing or erroring check is
/// recorded and the battery continues.
pub fn full_report(config: &VerificationConfig, registry: &CheckRegistry) -> Result<Vec<CheckReport>, VerifyError> {
    config.validate(registry)?;
    let mut reports = Vec::with_capacity(config.battery.len());
    for name in &config.battery {
        let check = registry.get(name).expect("validated");
        reports.push(registry.run(check, config));
        if config.rational_check && name == "theorem31" {
            reports.push(rational_theorem31(config, registry));
        }
    }
    Ok(reports)
}

/// `theorem31` at the last convergent `p/q` of `alpha` with `q <= N`.
fn rational_theorem31(config: &VerificationConfig, registry: &CheckRegistry) -> CheckReport {
    let (p, q) = convergents(config.alpha, 40)
        .into_iter()
        .rev()
        .find(|&(p, q)| q <= config.n as u64 && p > 0 && p < q)
        .unwrap_or((1, 2));
    let mut rational = config.clone();
    rational.alpha = p as f64 / q as f64;
    rational.rational_check = false;
    let mut r = registry.run(&Theorem31, &rational);
    r.name = format!("theorem31@{p}/{q}");
    r.informational = true;
    r
}

fn grid_energy(k: usize, count: usize) -> f64 {
    if count == 1 {
        0.0
    } else {
        -2.0 + 4.0 * k as f64 / (count - 1) as f64
    }
}

struct MOracle;

impl Check for MOracle {
    fn name(&self) -> &'static str {
        "m_oracle"
    }

    fn default_tolerance(&self) -> f64 {
        1e-10
    }

    /// `|m_+ - m_from_resolvent|` on 20 phases at `Im z = 0.5`, depth = N.
    fn run(&self, config: &VerificationConfig) -> Result<Measurement, Error> {
        let family = config.family()?;
        let count = 20;
        let residuals = (0..count)
            .into_par_iter()
            .map(|j| {
                let model = family.model(config.phase(j, count));
                let z = C64::new(grid_energy(j, count), 0.5);
                let a = m_plus(&model, z, config.depth, 0)?.value;
                let b = m_from_resolvent(&model, z, config.depth)?;
                Ok((a - b).norm())
            })
            .collect::<Result<Vec<f64>, Error>>()?;
        let mut m = Measurement::residuals(residuals);
        m.inputs.insert("depth".into(), config.depth.into());
        Ok(m)
    }
}

struct GreenIdentities;

impl Check for GreenIdentities {
    fn name(&self) -> &'static str {
        "green_identities"
    }

    fn default_tolerance(&self) -> f64 {
        1e-8
    }

    fn run(&self, config: &VerificationConfig) -> Result<Measurement, Error> {
        let family = config.family()?;
        let count = 20;
        let pairs = (0..count)
            .into_par_iter()
            .map(|j| {
                let model = family.model(config.phase(j, count));
                let z = C64::new(grid_energy(j, count), 0.5);
                Ok(green_diag_residuals(&model, z, config.depth)?)
            })
            .collect::<Result<Vec<(f64, f64)>, Error>>()?;
        let mut m = Measurement::residuals(pairs.iter().flat_map(|&(a, b)| [a, b]).collect());
        m.inputs.insert("depth".into(), config.depth.into());
        Ok(m)
    }
}

struct Prop24;

impl Check for Prop24 {
    fn name(&self) -> &'static str {
        "prop24"
    }

    fn default_tolerance(&self) -> f64 {
        1e-2
    }

    fn run(&self, config: &VerificationConfig) -> Result<Measurement, Error> {
        let family = config.family()?;
        let out = prop24_check(&family, PROP24_Z, config.phases, config.depth, config.steps)?;
        let mut m = Measurement { measured: vec![out.lhs], expected: vec![out.rhs], ..Default::default() };
        m.inputs.insert("z_re".into(), PROP24_Z.re.into());
        m.inputs.insert("z_im".into(), PROP24_Z.im.into());
        m.inputs.insert("phases".into(), config.phases.into());
        m.inputs.insert("depth".into(), config.depth.into());
        m.inputs.insert("steps".into(), config.steps.into());
        Ok(m)
    }
}

struct Lemma26;

impl Check for Lemma26 {
    fn name(&self) -> &'static str {
        "lemma26"
    }

    fn default_tolerance(&self) -> f64 {
        1e-6
    }

    fn run(&self, config: &VerificationConfig) -> Result<Measurement, Error> {
        let family = config.family()?;
        let count = 10;
        let outs = (0..count)
            .into_par_iter()
            .map(|j| Ok(lemma26_residual(&family.model(config.phase(j, count)), C64::new(grid_energy(j, count), 0.5), config.depth)?))
            .collect::<Result<Vec<_>, Error>>()?;
        let mut m = Measurement {
            measured: outs.iter().map(|o| o.lhs).collect(),
            expected: outs.iter().map(|o| o.rhs).collect(),
            ..Default::default()
        };
        m.inputs.insert("n".into(), config.depth.into());
        Ok(m)
    }
}

struct Theorem31;

impl Check for Theorem31 {
    fn name(&self) -> &'static str {
        "theorem31"
    }

    fn default_tolerance(&self) -> f64 {
        0.02
    }

    /// Closed-form LE at spectrum samples, plus the share of 100 phases at
    /// which `m_+(E + i eps)` settles along an `eps` ladder (logged only).
    fn run(&self, config: &VerificationConfig) -> Result<Measurement, Error> {
        let c = config;
        let report = theorem31_check(&c.coupling, c.alpha, c.theta, c.energy_count, c.steps, c.n, c.m)?;
        let le = report.expected.first().copied().unwrap_or(0.0);
        let energy = report.diagnostics.get("energy_0").and_then(|v| match v {
            ParamValue::Number(x) => Some(*x),
            _ => None,
        });
        let mut m = Measurement::from_report(report);
        if let (true, Some(e)) = (le > 0.2, energy) {
            let family = c.family()?;
            let ladder = [1e-2, 1e-3, 1e-4];
            let settled = (0..100)
                .into_par_iter()
                .filter(|&j| limiting_m_stabilizes(&family.model(j as f64 / 100.0), e, &ladder, 1e-2).unwrap_or(false))
                .count();
            m.diagnostics.insert("limiting_m_settled_fraction".into(), (settled as f64 / 100.0).into());
        }
        Ok(m)
    }
}

struct Thouless;

impl Check for Thouless {
    fn name(&self) -> &'static str {
        "thouless"
    }

    fn default_tolerance(&self) -> f64 {
        0.05
    }

    /// At spectrum samples and at `E = 10`.
    fn run(&self, config: &VerificationConfig) -> Result<Measurement, Error> {
        let family = config.family()?;
        let mut energies: Vec<C64> = spectrum_samples(&family, config.n, config.m, config.energy_count)?
            .into_iter()
            .map(|e| C64::new(e, 0.0))
            .collect();
        energies.push(C64::new(10.0, 0.0));
        let report = thouless_check(&family, config.theta, &energies, config.n, config.m, config.steps)?;
        Ok(Measurement::from_report(report))
    }
}

struct Duality;

impl Check for Duality {
    fn name(&self) -> &'static str {
        "duality"
    }

    fn default_tolerance(&self) -> f64 {
        0.02
    }

    fn run(&self, config: &VerificationConfig) -> Result<Measurement, Error> {
        Ok(Measurement::from_report(duality_dos_check(&config.coupling, config.alpha, config.n, config.m)?))
    }
}

struct Jensen;

impl Check for Jensen {
    fn name(&self) -> &'static str {
        "jensen"
    }

    fn default_tolerance(&self) -> f64 {
        1e-4
    }

    /// Closed form against quadrature for the coupling, its swap and its dual.
    fn run(&self, config: &VerificationConfig) -> Result<Measurement, Error> {
        let mut couplings: Vec<Coupling> = vec![config.coupling, config.coupling.swapped()];
        if let Ok(d) = sigma_dual(&config.coupling) {
            couplings.push(d);
        }
        let mut m = Measurement::default();
        for c in &couplings {
            m.measured.push(jensen_log_integral_quadrature(c, config.alpha, 1e-9)?);
            m.expected.push(jensen_log_integral_closed(c));
        }
        Ok(m)
    }
}

struct LambdaSwap;

impl Check for LambdaSwap {
    fn name(&self) -> &'static str {
        "lambda_swap"
    }

    fn default_tolerance(&self) -> f64 {
        0.03
    }

    fn run(&self, config: &VerificationConfig) -> Result<Measurement, Error> {
        let c = config;
        let report = lambda_swap_check(&c.coupling, c.alpha, c.theta, c.energy_count, c.steps, c.n, c.m)?;
        Ok(Measurement::from_report(report))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerificationConfig {
        VerificationConfig { n: 100, m: 4, steps: 10_000, depth: 500, energy_count: 3, phases: 50, ..Default::default() }
    }

    #[test]
    fn empty_battery_gives_empty_report() {
        let cfg = VerificationConfig { battery: vec![], ..small() };
        assert!(full_report(&cfg, &CheckRegistry::default()).unwrap().is_empty());
    }

    #[test]
    fn unknown_check_is_rejected() {
        let cfg = VerificationConfig { battery: vec!["nope".into()], ..small() };
        assert_eq!(full_report(&cfg, &CheckRegistry::default()), Err(VerifyError::UnknownCheck("nope".into())));
    }

    #[test]
    fn zero_tolerance_fails_but_keeps_residual() {
        let mut cfg = VerificationConfig { battery: vec!["jensen".into()], ..small() };
        cfg.tolerances.insert("jensen".into(), 0.0);
        let cfg = VerificationConfig { coupling: Coupling::new(0.3, 0.5, 0.2).unwrap(), ..cfg };
        let r = &full_report(&cfg, &CheckRegistry::default()).unwrap()[0];
        assert!(!r.passed);
        assert!(r.max_abs_residual > 0.0 && r.max_abs_residual < 1e-4);
    }

    #[test]
    fn errors_are_recorded_and_battery_continues() {
        let cfg = VerificationConfig {
            coupling: Coupling::new(1.0, 1.0, 1.0).unwrap(),
            battery: vec!["theorem31".into(), "jensen".into()],
            ..small()
        };
        let r = full_report(&cfg, &CheckRegistry::default()).unwrap();
        assert_eq!(r.len(), 2);
        assert!(!r[0].passed && r[0].error.is_some() && r[0].max_abs_residual.is_nan());
        assert!(r[1].passed, "{:?}", r[1]);
    }

    #[test]
    fn rational_rerun_is_informational() {
        let cfg = VerificationConfig { battery: vec!["theorem31".into()], rational_check: true, ..small() };
        let r = full_report(&cfg, &CheckRegistry::default()).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r[1].informational && r[1].name.starts_with("theorem31@"));
    }

    #[test]
    fn builtin_names() {
        let names: Vec<_> = CheckRegistry::default().names().collect();
        assert_eq!(
            names,
            ["m_oracle", "green_identities", "prop24", "lemma26", "theorem31", "thouless", "duality", "jensen", "lambda_swap"]
        );
    }
}
