//! Finite sections of `H`, Sturm-sequence eigenvalues and the density of
//! states.

mod dos;
mod sturm;

use std::ops::Range;

use serde::Serialize;
use thiserror::Error;

use crate::model::source::CoefficientSource;
use crate::C64;

pub use dos::{dos_cdf, dos_estimate, kolmogorov_distance, pooled_eigenvalues, spectrum_samples, DosEstimate};
pub use sturm::{eigenvalues_real, eigenvalues_sturm, gerschgorin_bounds, sturm_count, SymTridiagonal};

/// Default absolute accuracy of bisected eigenvalues.
pub const EIGEN_TOLERANCE: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("off-diagonal entry {index} is not real ({value})")]
    NonRealOffdiag { index: usize, value: C64 },
    #[error("section size must be at least 1")]
    EmptySection,
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("requested {count} samples from a pool of {pool}")]
    TooManySamples { count: usize, pool: usize },
}

/// Hermitian tridiagonal matrix with Dirichlet boundary:
/// `H[k][k] = diag[k]`, `H[k][k+1] = offdiag[k]`, `H[k+1][k] = conj(offdiag[k])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TridiagonalOperator {
    pub diag: Vec<f64>,
    pub offdiag: Vec<C64>,
}

impl TridiagonalOperator {
    pub fn new(diag: Vec<f64>, offdiag: Vec<C64>) -> Self {
        assert_eq!(offdiag.len() + 1, diag.len().max(1), "offdiag must be one shorter than diag");
        Self { diag, offdiag }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Leading principal section of size `n`.
    pub fn leading(&self, n: usize) -> Self {
        Self { diag: self.diag[..n].to_vec(), offdiag: self.offdiag[..n.saturating_sub(1)].to_vec() }
    }

    /// Real symmetric view; fails on the first entry with a nonzero
    /// imaginary part.
    pub fn to_real(&self) -> Result<SymTridiagonal, SpectrumError> {
        let offdiag = self
            .offdiag
            .iter()
            .enumerate()
            .map(|(index, x)| if x.im == 0.0 { Ok(x.re) } else { Err(SpectrumError::NonRealOffdiag { index, value: *x }) })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SymTridiagonal { diag: self.diag.clone(), offdiag })
    }
}

/// `diag = (b_start, ..)`, `offdiag = (a_start, .., a_{start+N-2})`.
pub fn truncate(source: &dyn CoefficientSource, n: usize, start: i64) -> Result<TridiagonalOperator, SpectrumError> {
    if n == 0 {
        return Err(SpectrumError::EmptySection);
    }
    let w = source.window(start, n);
    let mut offdiag = w.a;
    offdiag.truncate(n - 1);
    Ok(TridiagonalOperator { diag: w.b, offdiag })
}

/// Result of the diagonal unitary gauge `D^* H D`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugedOperator {
    /// Off-diagonal replaced by its modulus (real, nonnegative).
    pub operator: TridiagonalOperator,
    /// Diagonal of `D`; an eigenvector `v` of the gauged operator maps to
    /// `D v` for the original one.
    pub phases: Vec<C64>,
    /// Decoupled blocks, split at zero off-diagonal entries.
    pub blocks: Vec<Range<usize>>,
}

/// `d_0 = 1`, `d_{k+1} = d_k conj(a_k) / |a_k|` (or `d_k` when `a_k = 0`), so that
/// `conj(d_k) a_k d_{k+1} = |a_k|`. The spectrum is unchanged.
pub fn gauge_to_real(op: &TridiagonalOperator) -> GaugedOperator {
    let n = op.len();
    let mut phases = Vec::with_capacity(n);
    let mut blocks = Vec::new();
    let mut block_start = 0;
    let mut d = C64::new(1.0, 0.0);
    if n > 0 {
        phases.push(d);
    }
    let mut offdiag = Vec::with_capacity(op.offdiag.len());
    for (k, a) in op.offdiag.iter().enumerate() {
        let r = a.norm();
        if r == 0.0 {
            blocks.push(block_start..k + 1);
            block_start = k + 1;
            d = C64::new(1.0, 0.0);
        } else {
            d *= a.conj() / r;
        }
        phases.push(d);
        offdiag.push(C64::new(r, 0.0));
    }
    if n > 0 {
        blocks.push(block_start..n);
    }
    GaugedOperator { operator: TridiagonalOperator { diag: op.diag.clone(), offdiag }, phases, blocks }
}

/// Gauge, then bisect. Works for any Hermitian section.
pub fn hermitian_eigenvalues(op: &TridiagonalOperator, tol: f64) -> Result<Vec<f64>, SpectrumError> {
    eigenvalues_sturm(&gauge_to_real(op).operator, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden_mean;
    use crate::model::source::ConstantModel;
    use crate::model::{Coupling, HarperModel};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn truncate_examples() {
        let free = ConstantModel::new(c(1.0, 0.0), 0.0);
        let t = truncate(&free, 2, 0).unwrap();
        assert_eq!(t.diag, vec![0.0, 0.0]);
        assert_eq!(t.offdiag, vec![c(1.0, 0.0)]);
        assert_eq!(hermitian_eigenvalues(&t, 1e-13).unwrap().len(), 2);

        let m = HarperModel::new(Coupling::new(0.3, 0.5, 0.2).unwrap(), 0.3, 0.6).unwrap();
        let t = truncate(&m, 1, 4).unwrap();
        assert!(t.offdiag.is_empty());
        let e = hermitian_eigenvalues(&t, 1e-13).unwrap();
        assert!((e[0] - m.site(4).1).abs() < 1e-12);

        let alpha = golden_mean();
        let m = HarperModel::new(Coupling::new(0.0, 1.0, 0.0).unwrap(), alpha, 0.0).unwrap();
        let t = truncate(&m, 3, 0).unwrap();
        let tau = std::f64::consts::TAU;
        for (x, y) in t.diag.iter().zip([2.0, 2.0 * (tau * alpha).cos(), 2.0 * (2.0 * tau * alpha).cos()]) {
            assert!((x - y).abs() < 1e-14);
        }
        assert_eq!(t.offdiag, vec![c(1.0, 0.0); 2]);
        assert!(matches!(truncate(&m, 0, 0), Err(SpectrumError::EmptySection)));
    }

    #[test]
    fn gauge_examples() {
        let op = TridiagonalOperator::new(vec![0.3, -0.2, 0.5], vec![c(0.0, 1.0), c(-1.0, 0.0)]);
        let g = gauge_to_real(&op);
        assert_eq!(g.operator.offdiag, vec![c(1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(g.blocks, vec![0..3]);
        // conj(d_k) a_k d_{k+1} = |a_k|
        for k in 0..2 {
            let v = g.phases[k].conj() * op.offdiag[k] * g.phases[k + 1];
            assert!((v - c(1.0, 0.0)).norm() < 1e-15);
        }

        let real = TridiagonalOperator::new(vec![1.0, 2.0], vec![c(0.5, 0.0)]);
        let g = gauge_to_real(&real);
        assert_eq!(g.operator, real);
        assert!(g.phases.iter().all(|p| *p == c(1.0, 0.0)));

        let split = TridiagonalOperator::new(vec![1.0, 2.0, 3.0, 4.0], vec![c(0.5, 0.5), c(0.0, 0.0), c(0.0, -2.0)]);
        let g = gauge_to_real(&split);
        assert_eq!(g.blocks, vec![0..2, 2..4]);
    }

    #[test]
    fn non_real_offdiag_is_a_contract_violation() {
        let op = TridiagonalOperator::new(vec![0.0, 0.0], vec![c(0.0, 1.0)]);
        assert!(matches!(eigenvalues_sturm(&op, 1e-12), Err(SpectrumError::NonRealOffdiag { index: 0, .. })));
    }
}
