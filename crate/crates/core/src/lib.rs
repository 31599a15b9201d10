//! Numerics for ergodic Jacobi operators
//!
//! ```text
//! (H psi)_n = b_n psi_n + a_n psi_{n+1} + conj(a_{n-1}) psi_{n-1}
//! ```
//!
//! with a focus on the extended Harper model, where `a_n = c(theta + alpha n)`
//! and `b_n = 2 cos(2 pi (theta + alpha n))`.
//!
//! The crate is split by object:
//!
//! * [`model`]: couplings, coefficient sources, the duality map, region
//!   geometry and the Jensen log-integral.
//! * [`cocycle`]: one-step transfer matrices, Lyapunov exponents, solutions
//!   of `H psi = z psi` and their Wronskians.
//! * [`spectrum`]: finite truncations, Sturm bisection, density of states.
//! * [`greenm`]: half-line m-functions, Green's function entries and the
//!   residual-valued identity checks that tie them to the cocycle.
//! * [`verify`]: composed checks, registered by name and run as a battery.
//!
//! Coefficient sequences are supplied through the [`CoefficientSource`]
//! trait, and ergodic families (a source for every phase) through
//! [`ErgodicFamily`], so every routine works for the Harper model and for
//! constant-coefficient reference models alike.

pub mod cocycle;
pub mod greenm;
pub mod model;
pub mod quad;
pub mod spectrum;
pub mod verify;

mod error;

pub use error::Error;
pub use model::family::{ErgodicFamily, FamilyRegistry};
pub use model::source::{CoefficientSource, CoefficientWindow, ConstantModel};
pub use model::{Coupling, HarperModel, Region, RegionTag};

pub use num_complex::Complex64 as C64;

/// Default cutoff below which `|a_n|` counts as singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e-12;

/// The golden mean `(sqrt(5) - 1) / 2`.
pub fn golden_mean() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}
