use super::GreenError;
use crate::model::source::CoefficientSource;
use crate::C64;

/// Solves `sub[i-1] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]` by
/// forward elimination and back-substitution.
pub fn solve_tridiagonal(sub: &[C64], diag: &[C64], sup: &[C64], rhs: &[C64]) -> Result<Vec<C64>, GreenError> {
    let n = diag.len();
    assert!(n > 0 && sub.len() + 1 == n && sup.len() + 1 == n && rhs.len() == n);
    let mut cp = vec![C64::new(0.0, 0.0); n];
    let mut dp = vec![C64::new(0.0, 0.0); n];
    let pivot = |x: C64, row: usize| -> Result<C64, GreenError> {
        if x.norm() < 1e-300 {
            Err(GreenError::SingularSolve { row })
        } else {
            Ok(x)
        }
    };
    let p = pivot(diag[0], 0)?;
    if n > 1 {
        cp[0] = sup[0] / p;
    }
    dp[0] = rhs[0] / p;
    for i in 1..n {
        let p = pivot(diag[i] - sub[i - 1] * cp[i - 1], i)?;
        if i + 1 < n {
            cp[i] = sup[i] / p;
        }
        dp[i] = (rhs[i] - sub[i - 1] * dp[i - 1]) / p;
    }
    let mut x = dp;
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= cp[i] * next;
    }
    Ok(x)
}

/// Column `col` of `(H^{W} - z)^{-1}`, where `H^{W}` is `H` restricted to
/// the sites `start .. start + len` with Dirichlet boundary. Entry `k` is
/// the matrix element at row `start + k`.
pub fn truncated_resolvent_column(
    source: &dyn CoefficientSource,
    z: C64,
    start: i64,
    len: usize,
    col: i64,
) -> Result<Vec<C64>, GreenError> {
    assert!(len > 0 && (start..start + len as i64).contains(&col), "column outside the window");
    let w = source.window(start, len);
    let diag: Vec<C64> = w.b.iter().map(|&b| C64::new(b, 0.0) - z).collect();
    let sup: Vec<C64> = w.a[..len - 1].to_vec();
    let sub: Vec<C64> = sup.iter().map(|a| a.conj()).collect();
    let mut rhs = vec![C64::new(0.0, 0.0); len];
    rhs[(col - start) as usize] = C64::new(1.0, 0.0);
    solve_tridiagonal(&sub, &diag, &sup, &rhs)
}
