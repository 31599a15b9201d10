use rayon::prelude::*;

use super::{closed_form_le, CheckReport, Params, VerifyError};
use crate::cocycle::lyapunov_exponent;
use crate::greenm::pairwise_sum;
use crate::model::family::{ErgodicFamily, HarperFamily};
use crate::model::{classify_region, sigma_dual, Coupling, RegionTag, REGION_TOLERANCE};
use crate::spectrum::{kolmogorov_distance, pooled_eigenvalues, spectrum_samples};
use crate::{Error, C64};

/// Pool eigenvalues closer than this to the evaluation energy are left out
/// of the Thouless sum.
pub const NEAR_EIGENVALUE_CUTOFF: f64 = 1e-8;

fn coupling_params(c: &Coupling, alpha: f64) -> Params {
    let mut p = Params::new();
    p.insert("lambda1".into(), c.lambda1.into());
    p.insert("lambda2".into(), c.lambda2.into());
    p.insert("lambda3".into(), c.lambda3.into());
    p.insert("alpha".into(), alpha.into());
    p
}

fn les_at(family: &HarperFamily, theta: f64, energies: &[f64], steps: usize) -> Result<Vec<f64>, Error> {
    let member = family.model(theta);
    energies
        .par_iter()
        .map(|&e| Ok(lyapunov_exponent(&member, C64::new(e, 0.0), steps)?.le_estimate))
        .collect()
}

/// Measured LE at `n_energies` spectrum samples of the `n`-site sections at
/// `m` phases, against the closed form.
pub fn theorem31_check(
    coupling: &Coupling,
    alpha: f64,
    theta: f64,
    n_energies: usize,
    steps: usize,
    n: usize,
    m: usize,
) -> Result<CheckReport, Error> {
    let expected = closed_form_le(coupling)?;
    let family = HarperFamily::new(*coupling, alpha)?;
    let energies = spectrum_samples(&family, n, m, n_energies)?;
    let measured = les_at(&family, theta, &energies, steps)?;
    let mut inputs = coupling_params(coupling, alpha);
    inputs.insert("theta".into(), theta.into());
    inputs.insert("n".into(), n.into());
    inputs.insert("m".into(), m.into());
    inputs.insert("steps".into(), steps.into());
    let mut report = CheckReport::new("theorem31", inputs, measured, vec![expected; n_energies], 0.0);
    for (k, e) in energies.iter().enumerate() {
        report.diagnostics.insert(format!("energy_{k}"), (*e).into());
    }
    report.diagnostics.insert("region".into(), classify_region(coupling, REGION_TOLERANCE).tag.to_string().as_str().into());
    Ok(report)
}

/// `-E log|a_0| + (1/(N M)) sum_j log|E - E_j|` against the measured LE at
/// each energy. Terms with `|E - E_j| < NEAR_EIGENVALUE_CUTOFF` are
/// dropped; their total count goes into the diagnostics.
pub fn thouless_check(
    family: &dyn ErgodicFamily,
    theta: f64,
    energies: &[C64],
    n: usize,
    m: usize,
    steps: usize,
) -> Result<CheckReport, Error> {
    let pool = pooled_eigenvalues(family, n, m)?;
    let total = pool.len() as f64;
    let member = family.member(theta);
    let mut excluded = 0usize;
    let mut predicted = Vec::with_capacity(energies.len());
    for &e in energies {
        let terms: Vec<f64> = pool
            .iter()
            .filter_map(|&ej| {
                let d = (e - ej).norm();
                (d >= NEAR_EIGENVALUE_CUTOFF).then(|| d.ln())
            })
            .collect();
        excluded += pool.len() - terms.len();
        predicted.push(pairwise_sum(&terms) / total - family.mean_log_offdiag());
    }
    let measured: Vec<f64> = energies
        .par_iter()
        .map(|&z| Ok(lyapunov_exponent(member.as_ref(), z, steps)?.le_estimate))
        .collect::<Result<_, Error>>()?;
    let mut inputs = Params::new();
    inputs.insert("family".into(), family.kind().into());
    inputs.insert("theta".into(), theta.into());
    inputs.insert("n".into(), n.into());
    inputs.insert("m".into(), m.into());
    inputs.insert("steps".into(), steps.into());
    let mut report = CheckReport::new("thouless", inputs, measured, predicted, 0.0);
    for (k, e) in energies.iter().enumerate() {
        report.diagnostics.insert(format!("energy_{k}_re"), e.re.into());
        report.diagnostics.insert(format!("energy_{k}_im"), e.im.into());
    }
    report.diagnostics.insert("excluded_terms".into(), excluded.into());
    Ok(report)
}

/// Kolmogorov distance between the pooled eigenvalues of `H_lambda` and
/// `lambda2` times those of `H_sigma(lambda)`.
pub fn duality_dos_check(coupling: &Coupling, alpha: f64, n: usize, m: usize) -> Result<CheckReport, Error> {
    let dual = sigma_dual(coupling)?;
    let a = pooled_eigenvalues(&HarperFamily::new(*coupling, alpha)?, n, m)?;
    let b: Vec<f64> = pooled_eigenvalues(&HarperFamily::new(dual, alpha)?, n, m)?
        .into_iter()
        .map(|e| e * coupling.lambda2)
        .collect();
    let d = kolmogorov_distance(&a, &b);
    let mut inputs = coupling_params(coupling, alpha);
    inputs.insert("n".into(), n.into());
    inputs.insert("m".into(), m.into());
    let mut report = CheckReport::new("duality", inputs, vec![d], vec![0.0], 0.0);
    report.diagnostics.insert("dual_lambda1".into(), dual.lambda1.into());
    report.diagnostics.insert("dual_lambda2".into(), dual.lambda2.into());
    report.diagnostics.insert("dual_lambda3".into(), dual.lambda3.into());
    Ok(report)
}

/// LE of `(l1, l2, l3)` against LE of `(l3, l2, l1)` at shared spectrum
/// samples of the former.
#[allow(clippy::too_many_arguments)]
pub fn lambda_swap_check(
    coupling: &Coupling,
    alpha: f64,
    theta: f64,
    n_energies: usize,
    steps: usize,
    n: usize,
    m: usize,
) -> Result<CheckReport, Error> {
    let tag = classify_region(coupling, REGION_TOLERANCE).tag;
    if tag != RegionTag::I {
        return Err(VerifyError::WrongRegion { required: RegionTag::I, actual: tag }.into());
    }
    let family = HarperFamily::new(*coupling, alpha)?;
    let swapped = HarperFamily::new(coupling.swapped(), alpha)?;
    let energies = spectrum_samples(&family, n, m, n_energies)?;
    let measured = les_at(&family, theta, &energies, steps)?;
    let expected = les_at(&swapped, theta, &energies, steps)?;
    let mut inputs = coupling_params(coupling, alpha);
    inputs.insert("theta".into(), theta.into());
    inputs.insert("steps".into(), steps.into());
    Ok(CheckReport::new("lambda_swap", inputs, measured, expected, 0.0))
}
