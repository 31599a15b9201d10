//! Half-line m-functions, Green's function entries, and residual-valued
//! checks of the identities connecting them to each other and to the
//! Lyapunov exponent.
//!
//! Conventions: `m_{+,n} = -psi_{+,n+1} / (conj(a_n) psi_{+,n})` and
//! `m_{-,n} = -psi_{-,n-1} / (a_{n-1} psi_{-,n})`, where `psi_+` (`psi_-`)
//! is the solution square-summable at `+inf` (`-inf`). They obey
//!
//! ```text
//! m_{+,n-1} = 1 / ((b_n - z) - |a_n|^2 m_{+,n})
//! m_{-,n+1} = 1 / ((b_n - z) - |a_{n-1}|^2 m_{-,n})
//! ```

mod checks;
mod tridiag;

use serde::Serialize;
use thiserror::Error;

use crate::cocycle::{wronskian, SolutionWindow};
use crate::model::source::CoefficientSource;
use crate::C64;

pub use checks::{
    boundary_ratio, boundary_ratio_ladder, green_diag_residuals, lemma26_residual, limiting_m_stabilizes,
    m_plus_ladder, pairwise_sum, prop24_check, singular_support_diagnostic, Prop24Outcome,
};
pub use tridiag::{solve_tridiagonal, truncated_resolvent_column};

/// Underflow guard for continued-fraction denominators.
const DENOMINATOR_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GreenError {
    #[error("spectral parameter must lie in the upper half plane, got Im z = {0}")]
    NotUpperHalfPlane(f64),
    #[error("spectral parameter must be non-real")]
    RealParameter,
    #[error("continued-fraction denominator underflow at index {index}")]
    Underflow { index: i64 },
    #[error("vanishing Wronskian at index {index}")]
    DegenerateWronskian { index: i64 },
    #[error("singular pivot in tridiagonal solve at row {row}")]
    SingularSolve { row: usize },
    #[error("depth must be at least 1")]
    ZeroDepth,
}

/// An m-function value. At `Im z > 0` it lies in the upper half plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HerglotzValue {
    pub value: C64,
}

impl HerglotzValue {
    pub fn is_herglotz(&self) -> bool {
        self.value.im > 0.0
    }
}

/// `Im m_+(E + i eps) / eps`
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryRatio {
    pub epsilon: f64,
    pub ratio: f64,
}

/// Recursion depth for a given `Im z`: 2000 at `Im z >= 0.1`, growing like
/// `1/Im z` below.
pub fn default_depth(im_z: f64) -> usize {
    if im_z >= 0.1 {
        2000
    } else {
        (200.0 / im_z.max(1e-9)).ceil() as usize
    }
}

fn check_upper(z: C64) -> Result<(), GreenError> {
    if z.im > 0.0 {
        Ok(())
    } else {
        Err(GreenError::NotUpperHalfPlane(z.im))
    }
}

fn guarded_inv(x: C64, index: i64) -> Result<C64, GreenError> {
    if x.norm() < DENOMINATOR_FLOOR {
        Err(GreenError::Underflow { index })
    } else {
        Ok(x.inv())
    }
}

/// `m_{+,k}` for `k = lo ..= hi`, seeded with `m_{+,hi+depth} = 0`.
pub fn m_plus_range(
    source: &dyn CoefficientSource,
    z: C64,
    lo: i64,
    hi: i64,
    depth: usize,
) -> Result<Vec<C64>, GreenError> {
    if depth == 0 {
        return Err(GreenError::ZeroDepth);
    }
    let seed = hi + depth as i64;
    let w = source.window(lo + 1, (seed - lo) as usize);
    let mut out = vec![C64::new(0.0, 0.0); (hi - lo + 1) as usize];
    let mut m = C64::new(0.0, 0.0);
    for n in (lo + 1..=seed).rev() {
        let k = (n - w.start_index) as usize;
        m = guarded_inv((w.b[k] - z) - w.a[k].norm_sqr() * m, n - 1)?;
        if n - 1 <= hi {
            out[(n - 1 - lo) as usize] = m;
        }
    }
    Ok(out)
}

/// `m_{-,k}` for `k = lo ..= hi`, seeded with `m_{-,lo-depth} = 0`.
pub fn m_minus_range(
    source: &dyn CoefficientSource,
    z: C64,
    lo: i64,
    hi: i64,
    depth: usize,
) -> Result<Vec<C64>, GreenError> {
    if depth == 0 {
        return Err(GreenError::ZeroDepth);
    }
    let seed = lo - depth as i64;
    // needs b_n for n in [seed, hi - 1] and a_{n-1} for n - 1 in [seed - 1, hi - 2]
    let w = source.window(seed - 1, (hi - seed + 1) as usize);
    let mut out = vec![C64::new(0.0, 0.0); (hi - lo + 1) as usize];
    let mut m = C64::new(0.0, 0.0);
    for n in seed..hi {
        let k = (n - w.start_index) as usize;
        m = guarded_inv((w.b[k] - z) - w.a[k - 1].norm_sqr() * m, n + 1)?;
        if n + 1 >= lo {
            out[(n + 1 - lo) as usize] = m;
        }
    }
    Ok(out)
}

/// `m_{+,site}` by the downward continued fraction.
pub fn m_plus(source: &dyn CoefficientSource, z: C64, depth: usize, site: i64) -> Result<HerglotzValue, GreenError> {
    check_upper(z)?;
    Ok(HerglotzValue { value: m_plus_range(source, z, site, site, depth)?[0] })
}

/// `m_{-,site}` by the upward continued fraction.
pub fn m_minus(source: &dyn CoefficientSource, z: C64, depth: usize, site: i64) -> Result<HerglotzValue, GreenError> {
    check_upper(z)?;
    Ok(HerglotzValue { value: m_minus_range(source, z, site, site, depth)?[0] })
}

/// `<delta_1, (H_+^{(N)} - z)^{-1} delta_1>` on sites `1 ..= N`, by
/// tridiagonal elimination and back-substitution.
pub fn m_from_resolvent(source: &dyn CoefficientSource, z: C64, n: usize) -> Result<C64, GreenError> {
    if z.im == 0.0 {
        return Err(GreenError::RealParameter);
    }
    if n == 0 {
        return Err(GreenError::ZeroDepth);
    }
    let column = truncated_resolvent_column(source, z, 1, n, 1)?;
    Ok(column[0])
}

/// `psi_-` and `psi_+` on `lo ..= hi`, rebuilt from the m-functions.
///
/// Both are normalised to 1 at site 0 when it lies in the window, at `lo`
/// otherwise. `psi_{+,k+1} = -conj(a_k) m_{+,k} psi_{+,k}` and
/// `psi_{-,k} = -psi_{-,k-1} / (a_{k-1} m_{-,k})` avoid running the
/// unstable forward recursion for a decaying solution.
pub fn half_line_solutions(
    source: &dyn CoefficientSource,
    z: C64,
    lo: i64,
    hi: i64,
    depth: usize,
) -> Result<(SolutionWindow, SolutionWindow), GreenError> {
    check_upper(z)?;
    assert!(hi > lo, "window needs at least two sites");
    let len = (hi - lo + 1) as usize;
    let w = source.window(lo, len);
    let mp = m_plus_range(source, z, lo, hi, depth)?;
    let mm = m_minus_range(source, z, lo, hi, depth)?;
    let pivot = if (lo..=hi).contains(&0) { 0 } else { lo };
    let p = (pivot - lo) as usize;

    let one = C64::new(1.0, 0.0);
    let mut plus = vec![one; len];
    let mut minus = vec![one; len];
    for k in p..len - 1 {
        plus[k + 1] = -w.a[k].conj() * mp[k] * plus[k];
        minus[k + 1] = -minus[k] * guarded_inv(w.a[k] * mm[k + 1], lo + k as i64 + 1)?;
    }
    for k in (0..p).rev() {
        plus[k] = plus[k + 1] * guarded_inv(-w.a[k].conj() * mp[k], lo + k as i64)?;
        minus[k] = -w.a[k] * mm[k + 1] * minus[k + 1];
    }
    Ok((
        SolutionWindow { start_index: lo, values: minus },
        SolutionWindow { start_index: lo, values: plus },
    ))
}

/// `G(n, m; z) = psi_{-,min} psi_{+,max} / (a_m W_m[psi_-, psi_+])`.
pub fn green_entry(
    source: &dyn CoefficientSource,
    z: C64,
    n: i64,
    m: i64,
    depth: usize,
) -> Result<C64, GreenError> {
    let (lo, hi) = (n.min(m), n.max(m) + 1);
    let (minus, plus) = half_line_solutions(source, z, lo, hi, depth)?;
    let w = wronskian(&minus, &plus, m).map_err(|_| GreenError::DegenerateWronskian { index: m })?;
    let denom = source.site(m).0 * w;
    if denom.norm() < DENOMINATOR_FLOOR {
        return Err(GreenError::DegenerateWronskian { index: m });
    }
    Ok(minus.get(lo).unwrap() * plus.get(hi - 1).unwrap() / denom)
}
