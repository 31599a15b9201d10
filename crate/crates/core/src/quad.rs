//! One-dimensional quadrature helpers: double-exponential (tanh-sinh)
//! integration on finite panels and golden-section minimisation.

use std::f64::consts::FRAC_PI_2;

/// Outcome of a panel integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    /// Difference between the last two refinement levels.
    pub error: f64,
    pub nodes: usize,
    pub converged: bool,
}

/// Largest abscissa parameter used; beyond this the nodes coincide with the
/// endpoints in double precision.
const T_MAX: f64 = 6.5;

/// Tanh-sinh quadrature of `f` on `[a, b]`.
///
/// Nodes cluster double-exponentially at both endpoints, so integrable
/// endpoint singularities (`log|x - a|`, `|x - a|^{-1/2}`) are handled without
/// special treatment. Non-finite integrand values are dropped; they can only
/// come from nodes that sit on a singular endpoint to machine precision,
/// where the weight is already negligible.
///
/// The step is halved until two successive levels differ by at most `tol`
/// or `max_nodes` evaluations have been spent.
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, tol: f64, max_nodes: usize) -> QuadEstimate
where
    F: Fn(f64) -> f64,
{
    let half = 0.5 * (b - a);
    if half == 0.0 {
        return QuadEstimate { value: 0.0, error: 0.0, nodes: 0, converged: true };
    }
    let mut nodes = 0usize;

    // Contribution of abscissa parameter t (and -t when t > 0).
    let eval = |t: f64, nodes: &mut usize| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let cosh_u = u.cosh();
        let weight = FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
        if !weight.is_finite() || weight < 1e-300 {
            return 0.0;
        }
        // Distance of the node from the nearer endpoint in units of `half`,
        // computed without cancellation.
        let dist = 2.0 / ((2.0 * u.abs()).exp() + 1.0);
        let mut acc = 0.0;
        let mut push = |x: f64| {
            *nodes += 1;
            let fx = f(x);
            if fx.is_finite() {
                acc += weight * fx;
            }
        };
        if t == 0.0 {
            push(a + half);
        } else {
            push(a + half * dist);
            push(b - half * dist);
        }
        acc
    };

    let mut h = 1.0;
    let mut sum = 0.0;
    let mut k = 0.0;
    while k * h <= T_MAX {
        sum += eval(k * h, &mut nodes);
        k += 1.0;
    }
    let mut estimate = half * h * sum;
    let mut error = f64::INFINITY;
    let mut level = 0;
    loop {
        level += 1;
        h *= 0.5;
        let mut t = h;
        while t <= T_MAX {
            sum += eval(t, &mut nodes);
            t += 2.0 * h;
        }
        let next = half * h * sum;
        let diff = (next - estimate).abs();
        estimate = next;
        if level >= 3 {
            error = diff;
            if diff <= tol {
                return QuadEstimate { value: estimate, error, nodes, converged: true };
            }
        }
        if nodes >= max_nodes {
            return QuadEstimate { value: estimate, error, nodes, converged: false };
        }
    }
}

/// Golden-section search for a local minimum of `g` on `[lo, hi]`.
pub fn golden_section_min<G>(g: G, mut lo: f64, mut hi: f64, xtol: f64) -> f64
where
    G: Fn(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    for _ in 0..200 {
        if hi - lo <= xtol {
            break;
        }
        if g1 <= g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - inv_phi * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + inv_phi * (hi - lo);
            g2 = g(x2);
        }
    }
    if g1 <= g2 {
        x1
    } else {
        x2
    }
}
