use super::{SpectrumError, TridiagonalOperator};

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl SymTridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }
}

/// Interval containing every eigenvalue.
pub fn gerschgorin_bounds(t: &SymTridiagonal) -> (f64, f64) {
    let n = t.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { t.offdiag[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { t.offdiag[i].abs() } else { 0.0 };
        lo = lo.min(t.diag[i] - left - right);
        hi = hi.max(t.diag[i] + left + right);
    }
    (lo, hi)
}

struct Sturm<'a> {
    diag: &'a [f64],
    e2: Vec<f64>,
    pivmin: f64,
}

impl<'a> Sturm<'a> {
    fn new(t: &'a SymTridiagonal) -> Self {
        let e2: Vec<f64> = t.offdiag.iter().map(|e| e * e).collect();
        let max_e2 = e2.iter().copied().fold(1.0, f64::max);
        Self { diag: &t.diag, e2, pivmin: f64::MIN_POSITIVE * max_e2 }
    }

    /// Number of negative pivots of `T - x I`, i.e. eigenvalues below `x`.
    fn count(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q.abs() < self.pivmin {
            q = -self.pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            q = self.diag[i] - x - self.e2[i - 1] / q;
            if q.abs() < self.pivmin {
                q = -self.pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }
}

/// Number of eigenvalues of `t` strictly below `x`.
pub fn sturm_count(t: &SymTridiagonal, x: f64) -> usize {
    if t.is_empty() {
        return 0;
    }
    Sturm::new(t).count(x)
}

/// All eigenvalues of a real symmetric tridiagonal matrix, ascending, each
/// to absolute accuracy `tol`.
///
/// Intervals are split at midpoints and carry their Sturm counts, so every
/// eigenvalue is isolated and then bisected on its own. An interval narrower
/// than `tol` that still holds `k > 1` eigenvalues yields that value with
/// multiplicity `k`; this happens for decoupled blocks and for eigenvalues
/// closer than `tol`.
pub fn eigenvalues_real(t: &SymTridiagonal, tol: f64) -> Result<Vec<f64>, SpectrumError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(SpectrumError::InvalidTolerance(tol));
    }
    let n = t.len();
    if n == 0 {
        return Err(SpectrumError::EmptySection);
    }
    let sturm = Sturm::new(t);
    let (glo, ghi) = gerschgorin_bounds(t);
    let pad = tol + 4.0 * f64::EPSILON * glo.abs().max(ghi.abs()).max(1.0);
    let mut out = vec![0.0; n];
    let mut stack = vec![(glo - pad, ghi + pad, 0usize, n)];
    while let Some((lo, hi, clo, chi)) = stack.pop() {
        if chi == clo {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let floor = 2.0 * f64::EPSILON * lo.abs().max(hi.abs());
        if hi - lo <= tol.max(floor) || mid <= lo || mid >= hi {
            out[clo..chi].fill(mid);
            continue;
        }
        let cm = sturm.count(mid).clamp(clo, chi);
        stack.push((mid, hi, cm, chi));
        stack.push((lo, mid, clo, cm));
    }
    Ok(out)
}

/// [`eigenvalues_real`] for a tridiagonal operator whose off-diagonal is
/// real (for example the output of `gauge_to_real`).
pub fn eigenvalues_sturm(op: &TridiagonalOperator, tol: f64) -> Result<Vec<f64>, SpectrumError> {
    eigenvalues_real(&op.to_real()?, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(diag: &[f64], offdiag: &[f64]) -> SymTridiagonal {
        SymTridiagonal { diag: diag.to_vec(), offdiag: offdiag.to_vec() }
    }

    #[test]
    fn two_by_two() {
        let e = eigenvalues_real(&sym(&[0.0, 0.0], &[1.0]), 1e-13).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-13 && (e[1] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn decoupled_multiplicity() {
        let e = eigenvalues_real(&sym(&[1.0, 1.0, 1.0], &[0.0, 0.0]), 1e-12).unwrap();
        assert_eq!(e.len(), 3);
        assert!(e.iter().all(|x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn free_chain_closed_form() {
        // eigenvalues of the N-site free chain are 2 cos(k pi / (N + 1))
        let n = 50;
        let t = sym(&vec![0.0; n], &vec![1.0; n - 1]);
        let e = eigenvalues_real(&t, 1e-12).unwrap();
        let mut exact: Vec<f64> =
            (1..=n).map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos()).collect();
        exact.sort_by(f64::total_cmp);
        for (x, y) in e.iter().zip(&exact) {
            assert!((x - y).abs() < 1e-11);
        }
    }

    #[test]
    fn counts_are_monotone() {
        let t = sym(&[0.3, -1.0, 2.0, 0.7], &[0.5, 1.2, -0.4]);
        assert_eq!(sturm_count(&t, -100.0), 0);
        assert_eq!(sturm_count(&t, 100.0), 4);
        let e = eigenvalues_real(&t, 1e-13).unwrap();
        for (k, x) in e.iter().enumerate() {
            assert_eq!(sturm_count(&t, x - 1e-9), k);
            assert_eq!(sturm_count(&t, x + 1e-9), k + 1);
        }
    }

    #[test]
    fn bad_tolerance() {
        assert!(matches!(eigenvalues_real(&sym(&[1.0], &[]), 0.0), Err(SpectrumError::InvalidTolerance(_))));
    }
}
