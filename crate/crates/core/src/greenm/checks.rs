use rayon::prelude::*;
use serde::Serialize;

use super::{default_depth, green_entry, m_minus, m_plus, m_plus_range, BoundaryRatio, GreenError};
use crate::cocycle::lyapunov_exponent;
use crate::model::family::ErgodicFamily;
use crate::model::source::CoefficientSource;
use crate::{Error, C64};

/// Both sides of a numerical identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prop24Outcome {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

impl Prop24Outcome {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, residual: (lhs - rhs).abs() }
    }
}

/// Pairwise (cascade) summation; the result depends only on the order of
/// `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (l, r) = xs.split_at(xs.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

/// Residuals of
///
/// ```text
/// -1/G(0,0) = |a_0|^2 m_+ + |a_{-1}|^2 m_- + z - b_0
///  1/G(1,1) = 1/m_+ + |a_0|^2 / (|a_{-1}|^2 m_- + z - b_0)
/// ```
///
/// with `m_± = m_{±,0}` and `G` built from explicit solutions.
pub fn green_diag_residuals(source: &dyn CoefficientSource, z: C64, depth: usize) -> Result<(f64, f64), GreenError> {
    let mp = m_plus(source, z, depth, 0)?.value;
    let mm = m_minus(source, z, depth, 0)?.value;
    let (a0, b0) = source.site(0);
    let a_prev = source.site(-1).0;
    let g00 = green_entry(source, z, 0, 0, depth)?;
    let g11 = green_entry(source, z, 1, 1, depth)?;
    let inner = a_prev.norm_sqr() * mm + z - b0;
    let r1 = (-g00.inv() - (a0.norm_sqr() * mp + inner)).norm();
    let r2 = (g11.inv() - (mp.inv() + a0.norm_sqr() / inner)).norm();
    Ok((r1, r2))
}

/// `2 L(z)` against `E log(1 + Im z / (|a_0|^2 Im m_+(z)))`, the
/// expectation taken over the phase grid `j / phases`.
///
/// `L(z)` is measured on the phase-0 member with `steps` transfer steps.
/// Phase terms are computed in parallel, then summed in index order.
pub fn prop24_check(
    family: &dyn ErgodicFamily,
    z: C64,
    phases: usize,
    depth: usize,
    steps: usize,
) -> Result<Prop24Outcome, Error> {
    if z.im.is_nan() || z.im <= 0.0 {
        return Err(GreenError::NotUpperHalfPlane(z.im).into());
    }
    let member = family.member(0.0);
    let lhs = 2.0 * lyapunov_exponent(member.as_ref(), z, steps)?.le_estimate;
    let terms: Vec<f64> = (0..phases)
        .into_par_iter()
        .map(|j| {
            let m = family.member(j as f64 / phases as f64);
            let mp = m_plus(m.as_ref(), z, depth, 0)?.value;
            let a0 = m.site(0).0;
            Ok((1.0 + z.im / (a0.norm_sqr() * mp.im)).ln())
        })
        .collect::<Result<_, GreenError>>()?;
    Ok(Prop24Outcome::new(lhs, pairwise_sum(&terms) / phases as f64))
}

/// `Im m_+(z) / Im z` against `sum_{n>=1} |psi_{+,n}|^2 / |a_0|^2`
/// (`psi_{+,0} = 1`).
///
/// `m_+` is taken at depth `2n`; the sum runs over `1 ..= n` plus a
/// geometric tail fitted to the last two terms when they decrease.
pub fn lemma26_residual(source: &dyn CoefficientSource, z: C64, n: usize) -> Result<Prop24Outcome, GreenError> {
    if z.im.is_nan() || z.im <= 0.0 {
        return Err(GreenError::NotUpperHalfPlane(z.im));
    }
    if n < 2 {
        return Err(GreenError::ZeroDepth);
    }
    let mp = m_plus_range(source, z, 0, n as i64, n)?;
    let w = source.window(0, n);
    let mut psi = C64::new(1.0, 0.0);
    let mut terms = Vec::with_capacity(n);
    for (a, m) in w.a.iter().zip(&mp).take(n) {
        psi *= -a.conj() * m;
        terms.push(psi.norm_sqr());
    }
    let (last, before) = (terms[n - 1], terms[n - 2]);
    let q = if before > 0.0 { last / before } else { 1.0 };
    let tail = if q < 1.0 { last * q / (1.0 - q) } else { 0.0 };
    let rhs = (pairwise_sum(&terms) + tail) / w.a[0].norm_sqr();
    Ok(Prop24Outcome::new(mp[0].im / z.im, rhs))
}

/// `Im m_+(E + i eps) / eps`
pub fn boundary_ratio(source: &dyn CoefficientSource, energy: f64, epsilon: f64, depth: usize) -> Result<BoundaryRatio, GreenError> {
    let m = m_plus(source, C64::new(energy, epsilon), depth, 0)?.value;
    Ok(BoundaryRatio { epsilon, ratio: m.im / epsilon })
}

/// [`boundary_ratio`] along a ladder of `eps`, each at [`default_depth`].
pub fn boundary_ratio_ladder(source: &dyn CoefficientSource, energy: f64, ladder: &[f64]) -> Result<Vec<BoundaryRatio>, GreenError> {
    ladder.iter().map(|&eps| boundary_ratio(source, energy, eps, default_depth(eps))).collect()
}

/// `m_+(E + i eps)` along a ladder of `eps`.
pub fn m_plus_ladder(source: &dyn CoefficientSource, energy: f64, ladder: &[f64]) -> Result<Vec<C64>, GreenError> {
    ladder.iter().map(|&eps| Ok(m_plus(source, C64::new(energy, eps), default_depth(eps), 0)?.value)).collect()
}

/// Whether `m_+(E + i eps)` has settled: the last two rungs of the ladder
/// agree to relative accuracy `rel_tol`.
pub fn limiting_m_stabilizes(source: &dyn CoefficientSource, energy: f64, ladder: &[f64], rel_tol: f64) -> Result<bool, GreenError> {
    let ms = m_plus_ladder(source, energy, ladder)?;
    Ok(match ms.as_slice() {
        [.., x, y] => (x - y).norm() <= rel_tol * y.norm().max(f64::MIN_POSITIVE),
        _ => false,
    })
}

/// `Im G(0,0) + Im G(1,1)` at `E + i eps` along the ladder. Growth as
/// `eps -> 0` marks `E` as a candidate point of the singular part of the
/// spectral measure.
pub fn singular_support_diagnostic(source: &dyn CoefficientSource, energy: f64, ladder: &[f64]) -> Result<Vec<f64>, GreenError> {
    ladder
        .iter()
        .map(|&eps| {
            let z = C64::new(energy, eps);
            let depth = default_depth(eps);
            Ok(green_entry(source, z, 0, 0, depth)?.im + green_entry(source, z, 1, 1, depth)?.im)
        })
        .collect()
}
