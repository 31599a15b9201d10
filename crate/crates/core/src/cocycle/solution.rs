use serde::Serialize;

use super::CocycleError;
use crate::model::source::CoefficientWindow;
use crate::{C64, SINGULARITY_THRESHOLD};

/// Values `psi_n` of a (generalised) solution on `start_index ..`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionWindow {
    pub start_index: i64,
    pub values: Vec<C64>,
}

impl SolutionWindow {
    pub fn get(&self, n: i64) -> Option<C64> {
        let k = n - self.start_index;
        (k >= 0).then(|| self.values.get(k as usize).copied()).flatten()
    }

    pub fn end_index(&self) -> i64 {
        self.start_index + self.values.len() as i64
    }

    /// Largest residual of `b_n psi_n + a_n psi_{n+1} + conj(a_{n-1}) psi_{n-1} - z psi_n`
    /// over the interior indices covered by both the solution and `window`.
    pub fn recursion_residual(&self, window: &CoefficientWindow, z: C64) -> f64 {
        let lo = (self.start_index + 1).max(window.start_index + 1);
        let hi = (self.end_index() - 1).min(window.end_index());
        (lo..hi)
            .map(|n| {
                let (a_prev, a) = (window.a_at(n - 1).unwrap(), window.a_at(n).unwrap());
                let b = window.b_at(n).unwrap();
                let (pm, p, pp) = (self.get(n - 1).unwrap(), self.get(n).unwrap(), self.get(n + 1).unwrap());
                (b * p + a * pp + a_prev.conj() * pm - z * p).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// `W_n[u, v] = u_n v_{n+1} - u_{n+1} v_n`
pub fn wronskian(u: &SolutionWindow, v: &SolutionWindow, n: i64) -> Result<C64, CocycleError> {
    let get = |w: &SolutionWindow, k: i64| w.get(k).ok_or(CocycleError::OutOfWindow { index: k });
    Ok(get(u, n)? * get(v, n + 1)? - get(u, n + 1)? * get(v, n)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Runs the three-term recursion across the whole window.
///
/// Forward: the seed is `(psi_s, psi_{s+1})` at the window start `s` and
/// `psi_{n+1} = ((z - b_n) psi_n - conj(a_{n-1}) psi_{n-1}) / a_n`.
/// Backward: the seed is `(psi_e, psi_{e-1})` at the last index `e` and
/// `psi_{n-1} = ((z - b_n) psi_n - a_n psi_{n+1}) / conj(a_{n-1})`.
pub fn propagate_solution(
    window: &CoefficientWindow,
    z: C64,
    psi0: C64,
    psi1: C64,
    direction: Direction,
) -> Result<SolutionWindow, CocycleError> {
    let len = window.len();
    let s = window.start_index;
    let mut values = vec![C64::new(0.0, 0.0); len];
    if len == 0 {
        return Ok(SolutionWindow { start_index: s, values });
    }
    let singular = |n: i64, x: C64| -> Result<C64, CocycleError> {
        let modulus = x.norm();
        if modulus <= SINGULARITY_THRESHOLD {
            Err(CocycleError::SingularStep { index: Some(n), modulus })
        } else {
            Ok(x)
        }
    };
    match direction {
        Direction::Forward => {
            values[0] = psi0;
            if len > 1 {
                values[1] = psi1;
            }
            for k in 1..len.saturating_sub(1) {
                let a = singular(s + k as i64, window.a[k])?;
                values[k + 1] = ((z - window.b[k]) * values[k] - window.a[k - 1].conj() * values[k - 1]) / a;
            }
        }
        Direction::Backward => {
            values[len - 1] = psi0;
            if len > 1 {
                values[len - 2] = psi1;
            }
            for k in (1..len.saturating_sub(1)).rev() {
                let a_prev = singular(s + k as i64 - 1, window.a[k - 1])?;
                values[k - 1] = ((z - window.b[k]) * values[k] - window.a[k] * values[k + 1]) / a_prev.conj();
            }
        }
    }
    Ok(SolutionWindow { start_index: s, values })
}
