//! Pseudo-spectral laboratory for the derivative nonlinear Schrödinger
//! equation
//!
//! ```text
//! i ∂t u + ∂x² u = iλ ∂x(|u|² u)
//! ```
//!
//! on a periodic truncation of ℝ, together with the gauge-equivalent cubic
//! NLS system, its Duhamel/Picard solver, the weighted and mixed norm stack,
//! and experiments that measure persistence of `H² ∩ L²(|x|^{2r} dx)`
//! regularity numerically.

pub mod error;
pub mod experiments;
pub mod gauge;
pub mod grid;
pub mod guard;
pub mod norms;
pub mod picard;
pub(crate) mod par;
pub mod report;
pub mod spacetime;
pub mod spectral;
pub mod timestepper;

pub use error::{Error, Result};
pub use grid::{fourier_transform, inverse_transform, Field, Grid1D, Spectrum};
pub use guard::{BoundaryWarning, Guarded};
pub use spacetime::SpaceTimeField;

pub use num_complex::Complex64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
