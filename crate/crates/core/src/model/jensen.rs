//! `int_0^1 log |c(x)| dx`, by the closed-form case table and by adaptive
//! quadrature.

use super::{Coupling, ModelError, REGION_TOLERANCE};
use crate::quad::{golden_section_min, tanh_sinh};

/// Closed form of the Jensen integral:
///
/// * `log max(lambda1, lambda3)` when `lambda1 + lambda3 >= lambda2`,
/// * `log((lambda2 + sqrt(lambda2^2 - 4 lambda1 lambda3)) / 2)` otherwise.
///
/// The second line is `log|2 lambda1 lambda3 / (-lambda2 + sqrt(...))|`
/// rationalised; it reduces to `log lambda2` when `lambda1 lambda3 = 0`, so
/// the two sub-cases of `lambda1 + lambda3 <= lambda2` share one expression.
pub fn jensen_log_integral_closed(coupling: &Coupling) -> f64 {
    let Coupling { lambda1: l1, lambda2: l2, lambda3: l3 } = *coupling;
    let big = l1.max(l3);
    if l1 + l3 >= l2 - REGION_TOLERANCE && big > 0.0 {
        big.ln()
    } else {
        let disc = (l2 * l2 - 4.0 * l1 * l3).max(0.0);
        (0.5 * (l2 + disc.sqrt())).ln()
    }
}

const SCAN_POINTS: usize = 256;
const NODE_BUDGET: usize = 400_000;

/// Adaptive quadrature of the Jensen integral with absolute error target
/// `tol`.
///
/// Local minima of `|c|^2` are located on a scan grid and refined by
/// golden-section search; they become panel endpoints, so zeros of `c` on the
/// circle only ever appear as endpoint log singularities, which tanh-sinh
/// panels integrate at full rate. `alpha` only shifts the integrand by half a
/// period and does not change the value.
pub fn jensen_log_integral_quadrature(coupling: &Coupling, alpha: f64, tol: f64) -> Result<f64, ModelError> {
    assert!(tol > 0.0, "tolerance must be positive");
    let abs2 = |x: f64| coupling.sample_c(alpha, x).norm_sqr();
    let integrand = |x: f64| 0.5 * abs2(x).ln();

    let h = 1.0 / SCAN_POINTS as f64;
    let g: Vec<f64> = (0..SCAN_POINTS).map(|k| abs2(k as f64 * h)).collect();
    let mut breaks = Vec::new();
    for k in 0..SCAN_POINTS {
        let prev = g[(k + SCAN_POINTS - 1) % SCAN_POINTS];
        let next = g[(k + 1) % SCAN_POINTS];
        if g[k] < prev && g[k] <= next {
            let x0 = k as f64 * h;
            let x = golden_section_min(abs2, x0 - h, x0 + h, 1e-15).rem_euclid(1.0);
            breaks.push(x);
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let panels: Vec<(f64, f64)> = match breaks.len() {
        0 => vec![(0.0, 1.0)],
        1 => vec![(breaks[0], breaks[0] + 1.0)],
        n => (0..n)
            .map(|i| if i + 1 < n { (breaks[i], breaks[i + 1]) } else { (breaks[i], breaks[0] + 1.0) })
            .collect(),
    };

    let panel_tol = tol / panels.len() as f64;
    let mut total = 0.0;
    let mut err = 0.0;
    let mut nodes = 0;
    let mut converged = true;
    for (a, b) in panels {
        let r = tanh_sinh(integrand, a, b, panel_tol, NODE_BUDGET - nodes.min(NODE_BUDGET - 1));
        total += r.value;
        err += r.error;
        nodes += r.nodes;
        converged &= r.converged;
    }
    if converged && err <= tol {
        Ok(total)
    } else {
        Err(ModelError::Accuracy { estimate: total, error_bound: err })
    }
}
