//! Coefficient sequences `(a_n, b_n)` behind a common trait.

use serde::Serialize;

use super::{sample_v, HarperModel, Orbit};
use crate::{C64, SINGULARITY_THRESHOLD};

/// A finite stretch `n = start_index .. start_index + len` of the coefficient
/// sequences.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientWindow {
    pub start_index: i64,
    pub a: Vec<C64>,
    pub b: Vec<f64>,
    /// Indices with `|a_n|` at or below the singularity threshold.
    pub near_singular: Vec<i64>,
}

impl CoefficientWindow {
    pub fn new(start_index: i64, a: Vec<C64>, b: Vec<f64>) -> Self {
        Self::with_threshold(start_index, a, b, SINGULARITY_THRESHOLD)
    }

    pub fn with_threshold(start_index: i64, a: Vec<C64>, b: Vec<f64>, threshold: f64) -> Self {
        assert_eq!(a.len(), b.len(), "coefficient sequences must have equal length");
        let near_singular = a
            .iter()
            .enumerate()
            .filter(|(_, x)| x.norm() <= threshold)
            .map(|(k, _)| start_index + k as i64)
            .collect();
        Self { start_index, a, b, near_singular }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// One past the last index.
    pub fn end_index(&self) -> i64 {
        self.start_index + self.a.len() as i64
    }

    pub fn contains(&self, n: i64) -> bool {
        n >= self.start_index && n < self.end_index()
    }

    fn offset(&self, n: i64) -> Option<usize> {
        self.contains(n).then(|| (n - self.start_index) as usize)
    }

    pub fn a_at(&self, n: i64) -> Option<C64> {
        self.offset(n).map(|k| self.a[k])
    }

    pub fn b_at(&self, n: i64) -> Option<f64> {
        self.offset(n).map(|k| self.b[k])
    }

    pub fn is_singular(&self) -> bool {
        !self.near_singular.is_empty()
    }
}

/// Anything that can produce Jacobi coefficients on demand.
pub trait CoefficientSource: Send + Sync {
    fn window(&self, start: i64, len: usize) -> CoefficientWindow;

    fn site(&self, n: i64) -> (C64, f64) {
        let w = self.window(n, 1);
        (w.a[0], w.b[0])
    }
}

impl CoefficientSource for HarperModel {
    fn window(&self, start: i64, len: usize) -> CoefficientWindow {
        let mut orbit = Orbit::new(self.theta, self.alpha, start);
        let mut a = Vec::with_capacity(len);
        let mut b = Vec::with_capacity(len);
        for _ in 0..len {
            let x = orbit.position();
            a.push(self.coupling.sample_c(self.alpha, x));
            b.push(sample_v(x));
            orbit.advance();
        }
        CoefficientWindow::new(start, a, b)
    }
}

/// Free function form: `a_n = c(theta + alpha n)`, `b_n = v(theta + alpha n)`.
pub fn coefficients(model: &HarperModel, start: i64, length: usize) -> CoefficientWindow {
    model.window(start, length)
}

/// Constant coefficients `a_n = a`, `b_n = b`. With `a = 1`, `b = 0` this is
/// the free Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantModel {
    pub a: C64,
    pub b: f64,
}

impl ConstantModel {
    pub fn new(a: C64, b: f64) -> Self {
        Self { a, b }
    }

    pub fn free() -> Self {
        Self { a: C64::new(1.0, 0.0), b: 0.0 }
    }
}

impl CoefficientSource for ConstantModel {
    fn window(&self, start: i64, len: usize) -> CoefficientWindow {
        CoefficientWindow::new(start, vec![self.a; len], vec![self.b; len])
    }
}

/// Spatial reflection `n -> -n`: `a'_n = conj(a_{-n-1})`, `b'_n = b_{-n}`.
pub struct Reflected<'a>(pub &'a dyn CoefficientSource);

impl CoefficientSource for Reflected<'_> {
    fn window(&self, start: i64, len: usize) -> CoefficientWindow {
        let base_start = -start - len as i64;
        let base = self.0.window(base_start, len + 1);
        let mut a = Vec::with_capacity(len);
        let mut b = Vec::with_capacity(len);
        for k in 0..len as i64 {
            let n = start + k;
            a.push(base.a_at(-n - 1).expect("reflected index in range").conj());
            b.push(base.b_at(-n).expect("reflected index in range"));
        }
        CoefficientWindow::new(start, a, b)
    }
}

/// A fixed window, extended by its constant end values outside its range.
/// Lets hand-written coefficient lists be used wherever a source is
/// expected.
impl CoefficientSource for CoefficientWindow {
    fn window(&self, start: i64, len: usize) -> CoefficientWindow {
        assert!(!self.is_empty(), "empty window cannot act as a source");
        let last = self.len() - 1;
        let idx = |n: i64| (n - self.start_index).clamp(0, last as i64) as usize;
        let a = (start..start + len as i64).map(|n| self.a[idx(n)]).collect();
        let b = (start..start + len as i64).map(|n| self.b[idx(n)]).collect();
        CoefficientWindow::new(start, a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Coupling;
    use crate::golden_mean;

    #[test]
    fn constant_c_window() {
        let alpha = golden_mean();
        let m = HarperModel::new(Coupling::new(0.0, 1.0, 0.0).unwrap(), alpha, 0.0).unwrap();
        let w = coefficients(&m, 0, 3);
        assert_eq!(w.a, vec![C64::new(1.0, 0.0); 3]);
        let expected = [2.0, 2.0 * (std::f64::consts::TAU * alpha).cos(), 2.0 * (2.0 * std::f64::consts::TAU * alpha).cos()];
        for (x, y) in w.b.iter().zip(expected) {
            assert!((x - y).abs() < 1e-14);
        }
        assert!(!w.is_singular());
    }

    #[test]
    fn singular_entry_is_flagged() {
        let m = HarperModel::new(Coupling::new(0.5, 1.0, 0.5).unwrap(), 0.5, 0.25).unwrap();
        let w = coefficients(&m, 0, 1);
        assert!(w.a[0].norm() < 1e-15);
        assert_eq!(w.near_singular, vec![0]);
    }

    #[test]
    fn length_one_window() {
        let l = Coupling::new(0.3, 0.6, 0.2).unwrap();
        let m = HarperModel::new(l, 0.3, 0.7).unwrap();
        let w = m.window(0, 1);
        assert_eq!(w.len(), 1);
        assert_eq!(w.a[0], l.sample_c(0.3, 0.7));
        assert_eq!(w.b[0], sample_v(0.7));
    }

    #[test]
    fn windows_agree_across_starts() {
        let m = HarperModel::new(Coupling::new(0.3, 0.6, 0.2).unwrap(), golden_mean(), 0.1).unwrap();
        let long = m.window(-50, 200);
        let short = m.window(37, 20);
        for n in 37..57 {
            assert!((long.a_at(n).unwrap() - short.a_at(n).unwrap()).norm() < 1e-12);
            assert!((long.b_at(n).unwrap() - short.b_at(n).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn reflection_is_an_involution() {
        let m = HarperModel::new(Coupling::new(0.3, 0.6, 0.2).unwrap(), golden_mean(), 0.1).unwrap();
        let r = Reflected(&m);
        let rr = Reflected(&r);
        let w = m.window(-5, 11);
        let ww = rr.window(-5, 11);
        for (x, y) in w.a.iter().zip(&ww.a) {
            assert!((x - y).norm() < 1e-13);
        }
        let rw = r.window(2, 1);
        assert!((rw.a[0] - m.site(-3).0.conj()).norm() < 1e-13);
        assert!((rw.b[0] - m.site(-2).1).abs() < 1e-13);
    }
}
