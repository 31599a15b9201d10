//! The extended Harper model and the geometry of its coupling space.

pub mod family;
pub mod jensen;
pub mod source;

use std::f64::consts::TAU;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::C64;

pub use jensen::{jensen_log_integral_closed, jensen_log_integral_quadrature};

/// Absolute tolerance used for region boundaries and case tables.
pub const REGION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid coupling ({0}, {1}, {2}): entries must be finite, nonnegative and not all zero")]
    InvalidCoupling(f64, f64, f64),
    #[error("frequency alpha = {0} must lie in (0, 1)")]
    InvalidFrequency(f64),
    #[error("phase theta = {0} must lie in [0, 1)")]
    InvalidPhase(f64),
    #[error("duality map undefined for lambda2 = 0")]
    SigmaUndefined,
    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound}")]
    Accuracy { estimate: f64, error_bound: f64 },
    #[error("unknown model family `{0}`")]
    UnknownFamily(String),
}

/// Coupling triple `(lambda1, lambda2, lambda3)`: `lambda2` weights the
/// nearest-neighbour hopping, `lambda1` and `lambda3` the two diagonal ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coupling {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
}

impl Coupling {
    /// Accepts only the normalised cone: all entries nonnegative, at least
    /// one positive.
    pub fn new(lambda1: f64, lambda2: f64, lambda3: f64) -> Result<Self, ModelError> {
        let ok = [lambda1, lambda2, lambda3].iter().all(|x| x.is_finite() && *x >= 0.0)
            && (lambda1 > 0.0 || lambda2 > 0.0 || lambda3 > 0.0);
        if ok {
            Ok(Self { lambda1, lambda2, lambda3 })
        } else {
            Err(ModelError::InvalidCoupling(lambda1, lambda2, lambda3))
        }
    }

    /// `lambda1 + lambda3`
    pub fn diagonal_sum(&self) -> f64 {
        self.lambda1 + self.lambda3
    }

    /// The coupling with `lambda1` and `lambda3` exchanged.
    pub fn swapped(&self) -> Self {
        Self { lambda1: self.lambda3, lambda2: self.lambda2, lambda3: self.lambda1 }
    }

    /// `c(x) = lambda3 e^{-2 pi i (x + alpha/2)} + lambda2 + lambda1 e^{2 pi i (x + alpha/2)}`
    pub fn sample_c(&self, alpha: f64, x: f64) -> C64 {
        let t = (x + 0.5 * alpha).rem_euclid(1.0);
        let (s, c) = (TAU * t).sin_cos();
        C64::new(
            self.diagonal_sum() * c + self.lambda2,
            (self.lambda1 - self.lambda3) * s,
        )
    }

    /// Upper bound on the operator norm of any member of the family.
    pub fn norm_bound(&self) -> f64 {
        2.0 * (self.lambda1 + self.lambda2 + self.lambda3) + 2.0
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.lambda1, self.lambda2, self.lambda3)
    }
}

/// On-site potential `v(x) = 2 cos(2 pi x)`.
pub fn sample_v(x: f64) -> f64 {
    2.0 * (TAU * x.rem_euclid(1.0)).cos()
}

/// Free function form of [`Coupling::sample_c`].
pub fn sample_c(coupling: &Coupling, alpha: f64, x: f64) -> C64 {
    coupling.sample_c(alpha, x)
}

/// Extended Harper operator at a fixed frequency and phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarperModel {
    pub coupling: Coupling,
    pub alpha: f64,
    pub theta: f64,
}

impl HarperModel {
    pub fn new(coupling: Coupling, alpha: f64, theta: f64) -> Result<Self, ModelError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(ModelError::InvalidFrequency(alpha));
        }
        if !(0.0..1.0).contains(&theta) {
            return Err(ModelError::InvalidPhase(theta));
        }
        Ok(Self { coupling, alpha, theta })
    }
}

/// Position `theta + alpha n mod 1` along the rotation orbit.
///
/// The starting point is formed with an error-free product for `alpha * n`;
/// subsequent steps use compensated (Kahan) addition, reducing mod 1 after
/// every step, so the drift after `10^6` steps stays at the rounding level.
#[derive(Debug, Clone)]
pub struct Orbit {
    alpha: f64,
    x: f64,
    carry: f64,
}

impl Orbit {
    pub fn new(theta: f64, alpha: f64, start: i64) -> Self {
        let n = start as f64;
        let p = alpha * n;
        let p_err = alpha.mul_add(n, -p);
        let hi = p.rem_euclid(1.0);
        // two-sum of hi + theta
        let s = hi + theta;
        let bb = s - hi;
        let s_err = (hi - (s - bb)) + (theta - bb);
        let mut orbit = Self { alpha, x: s, carry: -(s_err + p_err) };
        orbit.reduce();
        orbit
    }

    fn reduce(&mut self) {
        if self.x >= 1.0 || self.x < 0.0 {
            let fl = self.x.floor();
            self.x -= fl;
        }
    }

    /// Current position in `[0, 1]`.
    pub fn position(&self) -> f64 {
        self.x
    }

    pub fn advance(&mut self) {
        let y = self.alpha - self.carry;
        let t = self.x + y;
        self.carry = (t - self.x) - y;
        self.x = t;
        self.reduce();
    }
}

/// Region tag of the coupling-space partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum RegionTag {
    I,
    II,
    III,
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegionTag::I => "I",
            RegionTag::II => "II",
            RegionTag::III => "III",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Region {
    pub tag: RegionTag,
    pub on_boundary: bool,
}

/// Region I: `lambda1 + lambda3 <= 1`, `lambda2 <= 1`.
/// Region II: `lambda1 + lambda3 <= lambda2`, `lambda2 >= 1`.
/// Region III: `max(1, lambda2) <= lambda1 + lambda3`.
///
/// Inequalities are tested with slack `tol`; a point satisfying several is
/// given the lowest tag.
pub fn classify_region(coupling: &Coupling, tol: f64) -> Region {
    let s = coupling.diagonal_sum();
    let l2 = coupling.lambda2;
    let le = |x: f64, y: f64| x <= y + tol;
    let eq = |x: f64, y: f64| (x - y).abs() <= tol;
    if le(s, 1.0) && le(l2, 1.0) {
        Region {
            tag: RegionTag::I,
            on_boundary: eq(s, 0.0) || eq(s, 1.0) || eq(l2, 0.0) || eq(l2, 1.0),
        }
    } else if le(s, l2) && le(1.0, l2) {
        Region { tag: RegionTag::II, on_boundary: eq(s, 0.0) || eq(s, l2) || eq(l2, 1.0) }
    } else {
        Region { tag: RegionTag::III, on_boundary: eq(s, l2.max(1.0)) }
    }
}

/// Duality map `(lambda1, lambda2, lambda3) -> (lambda3, 1, lambda1) / lambda2`.
pub fn sigma_dual(coupling: &Coupling) -> Result<Coupling, ModelError> {
    let l2 = coupling.lambda2;
    if l2 <= 0.0 {
        return Err(ModelError::SigmaUndefined);
    }
    Coupling::new(coupling.lambda3 / l2, 1.0 / l2, coupling.lambda1 / l2)
}

/// Finite-range Diophantine test: `|sin(2 pi j alpha)| > b / |j|^r` for every
/// `0 < |j| <= j_max`. The condition is even in `j`, so only positive `j` are
/// enumerated. A `true` result is a witness up to `j_max`, nothing more.
pub fn diophantine_witness(alpha: f64, r: f64, b: f64, j_max: u64) -> bool {
    (1..=j_max).all(|j| {
        let jf = j as f64;
        // reduce j * alpha before taking the sine
        let frac = (alpha * jf).rem_euclid(1.0);
        (TAU * frac).sin().abs() > b / jf.powf(r)
    })
}

/// Continued-fraction convergents `p/q` of `alpha`, up to `depth` terms.
pub fn convergents(alpha: f64, depth: usize) -> Vec<(u64, u64)> {
    let mut out = Vec::with_capacity(depth);
    let (mut p_prev, mut p) = (1u64, 0u64);
    let (mut q_prev, mut q) = (0u64, 1u64);
    let mut x = alpha;
    for _ in 0..depth {
        let a = x.floor();
        let ai = a as u64;
        let (pn, qn) = (ai * p_prev + p, ai * q_prev + q);
        // first term is a0 = floor(alpha)
        p = p_prev;
        q = q_prev;
        p_prev = pn;
        q_prev = qn;
        if qn > 0 {
            out.push((pn, qn));
        }
        let rem = x - a;
        if rem < 1e-12 {
            break;
        }
        x = 1.0 / rem;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden_mean;

    fn cp(a: f64, b: f64, c: f64) -> Coupling {
        Coupling::new(a, b, c).unwrap()
    }

    /// Term-by-term evaluation of `c`, kept separate from the
    /// real/imaginary split used in `sample_c`.
    fn brute_c(l: &Coupling, alpha: f64, x: f64) -> C64 {
        let phase = C64::new(0.0, TAU * (x + alpha / 2.0));
        l.lambda3 * (-phase).exp() + l.lambda2 + l.lambda1 * phase.exp()
    }

    #[test]
    fn sample_c_examples() {
        assert_eq!(cp(0.0, 1.0, 0.0).sample_c(0.37, 0.81), C64::new(1.0, 0.0));
        let z = cp(1.0, 0.0, 1.0).sample_c(0.0, 0.0);
        assert!((z - C64::new(2.0, 0.0)).norm() < 1e-15);
        let l = cp(0.5, 1.0, 0.5);
        let z = l.sample_c(0.5, 0.25);
        assert!(z.norm() < 1e-15);
        assert!((brute_c(&l, 0.5, 0.25) - z).norm() < 1e-15);
        let l = cp(0.3, 0.7, 0.1);
        for k in 0..50 {
            let x = k as f64 * 0.0731 - 1.3;
            assert!((brute_c(&l, 0.41, x) - l.sample_c(0.41, x)).norm() < 1e-14);
        }
    }

    #[test]
    fn sample_v_examples() {
        assert_eq!(sample_v(0.0), 2.0);
        assert!(sample_v(0.25).abs() < 1e-15);
        assert_eq!(sample_v(0.5), -2.0);
    }

    #[test]
    fn coupling_rejects_invalid() {
        assert!(Coupling::new(0.0, 0.0, 0.0).is_err());
        assert!(Coupling::new(-0.1, 1.0, 0.0).is_err());
        assert!(Coupling::new(f64::NAN, 1.0, 0.0).is_err());
        assert!(HarperModel::new(cp(0.0, 1.0, 0.0), 1.0, 0.0).is_err());
        assert!(HarperModel::new(cp(0.0, 1.0, 0.0), 0.5, 1.0).is_err());
    }

    #[test]
    fn region_examples() {
        assert_eq!(
            classify_region(&cp(0.5, 0.5, 0.3), REGION_TOLERANCE),
            Region { tag: RegionTag::I, on_boundary: false }
        );
        assert_eq!(
            classify_region(&cp(0.2, 2.0, 0.1), REGION_TOLERANCE),
            Region { tag: RegionTag::II, on_boundary: false }
        );
        assert_eq!(
            classify_region(&cp(1.5, 0.5, 0.2), REGION_TOLERANCE),
            Region { tag: RegionTag::III, on_boundary: false }
        );
    }

    #[test]
    fn region_ties_resolve_low() {
        // (1, 1) in the (lambda1 + lambda3, lambda2) plane belongs to all three
        let r = classify_region(&cp(0.5, 1.0, 0.5), REGION_TOLERANCE);
        assert_eq!(r, Region { tag: RegionTag::I, on_boundary: true });
        let r = classify_region(&cp(1.0, 2.0, 1.0), REGION_TOLERANCE);
        assert_eq!(r, Region { tag: RegionTag::II, on_boundary: true });
        let r = classify_region(&cp(0.5, 1.0 + 0.5e-9, 0.5), REGION_TOLERANCE);
        assert_eq!(r.tag, RegionTag::I);
        assert!(r.on_boundary);
    }

    #[test]
    fn sigma_examples() {
        let d = sigma_dual(&cp(0.2, 2.0, 0.3)).unwrap();
        assert!((d.lambda1 - 0.15).abs() < 1e-15);
        assert!((d.lambda2 - 0.5).abs() < 1e-15);
        assert!((d.lambda3 - 0.1).abs() < 1e-15);
        assert_eq!(sigma_dual(&cp(0.0, 1.0, 0.0)).unwrap(), cp(0.0, 1.0, 0.0));
        let l = cp(0.3, 0.5, 0.2);
        let back = sigma_dual(&sigma_dual(&l).unwrap()).unwrap();
        assert!((back.lambda1 - 0.3).abs() < 1e-15);
        assert!((back.lambda2 - 0.5).abs() < 1e-15);
        assert!((back.lambda3 - 0.2).abs() < 1e-15);
        assert_eq!(sigma_dual(&cp(1.0, 0.0, 0.0)), Err(ModelError::SigmaUndefined));
    }

    #[test]
    fn diophantine_examples() {
        assert!(diophantine_witness(golden_mean(), 2.0, 0.1, 1000));
        assert!(!diophantine_witness(0.5, 2.0, 0.1, 2));
        assert!(!diophantine_witness(0.5, 3.7, 0.1, 2));
        // vacuous range
        assert!(diophantine_witness(0.5, 2.0, 0.1, 0));
    }

    #[test]
    fn orbit_tracks_exact_rotation() {
        // dyadic alpha makes the exact orbit representable
        let alpha = 0.375;
        let mut o = Orbit::new(0.125, alpha, -3);
        for n in -3..1000i64 {
            let exact = (0.125 + alpha * n as f64).rem_euclid(1.0);
            assert_eq!(o.position(), exact, "n = {n}");
            o.advance();
        }
    }

    #[test]
    fn orbit_drift_is_small() {
        let alpha = golden_mean();
        let mut o = Orbit::new(0.3, alpha, 0);
        let n = 1_000_000;
        for _ in 0..n {
            o.advance();
        }
        let direct = Orbit::new(0.3, alpha, n);
        let d = (o.position() - direct.position()).abs();
        assert!(d.min(1.0 - d) < 1e-9, "drift {d}");
    }

    #[test]
    fn convergents_of_golden_mean_are_fibonacci_ratios() {
        let c = convergents(golden_mean(), 8);
        assert_eq!(c[0], (0, 1));
        assert_eq!(&c[1..6], &[(1, 1), (1, 2), (2, 3), (3, 5), (5, 8)]);
    }
}
