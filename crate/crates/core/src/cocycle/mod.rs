//! Transfer-matrix cocycle and Lyapunov exponents.
//!
//! Solutions of `H psi = z psi` satisfy
//! `(psi_{n+1}, psi_n)^T = B_n (psi_n, psi_{n-1})^T` with
//!
//! ```text
//! B_n = 1/a_n [[b_n - z, -conj(a_{n-1})], [a_n, 0]]
//! ```
//!
//! and `L(z) = lim (1/n) log ||B_n ... B_1||`.

mod solution;

use std::ops::Mul;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::model::source::CoefficientSource;
use crate::{C64, SINGULARITY_THRESHOLD};

pub use solution::{propagate_solution, wronskian, Direction, SolutionWindow};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CocycleError {
    #[error("singular transfer step at index {index:?}: |a_n| = {modulus:e}")]
    SingularStep { index: Option<i64>, modulus: f64 },
    #[error("degenerate orbit: {skipped} of {steps} steps had singular a_n")]
    DegenerateOrbit { skipped: usize, steps: usize },
    #[error("index {index} outside solution window")]
    OutOfWindow { index: i64 },
    #[error("at least one step is required")]
    NoSteps,
}

/// A 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix(pub [[C64; 2]; 2]);

impl TransferMatrix {
    pub fn identity() -> Self {
        let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        Self([[o, z], [z, o]])
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// Largest entry modulus; the norm used throughout this module.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |acc, x| acc.max(x.norm()))
    }

    pub fn scale(&mut self, s: f64) {
        for x in self.0.iter_mut().flatten() {
            *x *= s;
        }
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }
}

impl Mul for TransferMatrix {
    type Output = TransferMatrix;

    fn mul(self, rhs: TransferMatrix) -> TransferMatrix {
        let (a, b) = (&self.0, &rhs.0);
        TransferMatrix([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }
}

/// One-step transfer matrix `(1/a_n) [[b_n - z, -conj(a_{n-1})], [a_n, 0]]`.
///
/// It maps `(phi_n, phi_{n-1})` to `(phi_{n+1}, phi_n)` for
/// `phi_n = (-1)^n psi_n`, where `H psi = z psi`. The sign twist is a
/// similarity by `diag(1, -1)` up to an overall sign, so norms of products,
/// and with them Lyapunov exponents, agree with those of the matrix built
/// from `z - b_n`.
pub fn transfer_matrix(a_prev: C64, a_cur: C64, b_cur: f64, z: C64) -> Result<TransferMatrix, CocycleError> {
    let modulus = a_cur.norm();
    if modulus <= SINGULARITY_THRESHOLD {
        return Err(CocycleError::SingularStep { index: None, modulus });
    }
    let inv = a_cur.inv();
    Ok(TransferMatrix([
        [(b_cur - z) * inv, -a_prev.conj() * inv],
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
    ]))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CocycleResult {
    /// Lyapunov exponent estimate, clamped at zero.
    pub le_estimate: f64,
    /// Unclamped `(sum of log scales) / steps`.
    pub raw_estimate: f64,
    /// Number of steps entering the average.
    pub steps: usize,
    pub skipped: usize,
    /// Running averages at the end of each block.
    pub log_growth_trace: Option<Vec<f64>>,
    /// Standard error of the block means.
    pub stderr_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovOptions {
    pub blocks: usize,
    pub keep_trace: bool,
    /// Fraction of singular steps above which the orbit is rejected.
    pub max_skip_fraction: f64,
}

impl Default for LyapunovOptions {
    fn default() -> Self {
        Self { blocks: 20, keep_trace: false, max_skip_fraction: 1e-3 }
    }
}

const CHUNK: usize = 4096;

/// Lyapunov exponent at `z` along `B_1, ..., B_steps` with default options.
pub fn lyapunov_exponent(source: &dyn CoefficientSource, z: C64, steps: usize) -> Result<CocycleResult, CocycleError> {
    lyapunov_exponent_with(source, z, steps, &LyapunovOptions::default())
}

/// Iterates the cocycle, rescaling the running product by its largest entry
/// after every step and accumulating the logarithms of the scales. Steps with
/// `|a_n|` below the singularity threshold are skipped and not counted.
pub fn lyapunov_exponent_with(
    source: &dyn CoefficientSource,
    z: C64,
    steps: usize,
    opts: &LyapunovOptions,
) -> Result<CocycleResult, CocycleError> {
    if steps == 0 {
        return Err(CocycleError::NoSteps);
    }
    let blocks = opts.blocks.clamp(1, steps);
    let block_len = steps / blocks;
    let mut block_sums = vec![0.0; blocks];
    let mut block_counts = vec![0usize; blocks];
    let mut trace = opts.keep_trace.then(|| Vec::with_capacity(blocks));

    let mut product = TransferMatrix::identity();
    let mut total = 0.0;
    let mut counted = 0usize;
    let mut skipped = 0usize;
    let mut a_prev = source.site(0).0;
    let mut done = 0usize;
    while done < steps {
        let len = CHUNK.min(steps - done);
        let w = source.window(1 + done as i64, len);
        for k in 0..len {
            let step = done + k;
            let (a_cur, b_cur) = (w.a[k], w.b[k]);
            match transfer_matrix(a_prev, a_cur, b_cur, z) {
                Ok(b) => {
                    product = b * product;
                    let s = product.max_abs();
                    product.scale(1.0 / s);
                    let ls = s.ln();
                    total += ls;
                    counted += 1;
                    let blk = (step / block_len).min(blocks - 1);
                    block_sums[blk] += ls;
                    block_counts[blk] += 1;
                }
                Err(_) => skipped += 1,
            }
            a_prev = a_cur;
            if let Some(t) = trace.as_mut() {
                if (step + 1).is_multiple_of(block_len) && t.len() < blocks {
                    t.push(if counted > 0 { total / counted as f64 } else { 0.0 });
                }
            }
        }
        done += len;
    }

    if skipped as f64 > opts.max_skip_fraction * steps as f64 {
        return Err(CocycleError::DegenerateOrbit { skipped, steps });
    }
    if counted == 0 {
        return Err(CocycleError::DegenerateOrbit { skipped, steps });
    }

    let raw = total / counted as f64;
    let means: Vec<f64> = block_sums
        .iter()
        .zip(&block_counts)
        .filter(|(_, c)| **c > 0)
        .map(|(s, c)| s / *c as f64)
        .collect();
    let stderr = standard_error(&means);
    Ok(CocycleResult {
        le_estimate: raw.max(0.0),
        raw_estimate: raw,
        steps: counted,
        skipped,
        log_growth_trace: trace,
        stderr_estimate: stderr,
    })
}

fn standard_error(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// Elementwise [`lyapunov_exponent`]. Entries are evaluated in parallel;
/// each one is a sequential accumulation, so results do not depend on the
/// thread count.
pub fn lyapunov_curve(
    source: &dyn CoefficientSource,
    energies: &[C64],
    steps: usize,
) -> Vec<Result<CocycleResult, CocycleError>> {
    energies.par_iter().map(|&z| lyapunov_exponent(source, z, steps)).collect()
}

/// `L(E + i eps)` for each `eps` in the ladder (diagnostic mode).
pub fn lyapunov_epsilon_ladder(
    source: &dyn CoefficientSource,
    energy: f64,
    ladder: &[f64],
    steps: usize,
) -> Vec<Result<CocycleResult, CocycleError>> {
    let zs: Vec<C64> = ladder.iter().map(|&eps| C64::new(energy, eps)).collect();
    lyapunov_curve(source, &zs, steps)
}

/// The default ladder `10^-1, 10^-2, 10^-3`.
pub const DEFAULT_EPSILON_LADDER: [f64; 3] = [1e-1, 1e-2, 1e-3];
