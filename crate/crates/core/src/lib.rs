//! Pseudo-spectral toolkit for the regularized Benjamin-Ono equation
//!
//! ```text
//! u_t + u_x + H u_xxt + u u_x = 0,   x in R
//! ```
//!
//! approximated on a large periodic domain. The crate provides the Fourier
//! multiplier calculus ([`spectral`]), the linear group and its frequency
//! derivatives ([`semigroup`]), RK4 and Picard solvers ([`evolution`]),
//! norms and functionals ([`diagnostics`]), scripted verification runs
//! ([`experiments`]) and file formats ([`io`]).

pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod experiments;
pub mod io;
pub mod semigroup;
pub mod spectral;

pub use error::{Error, Result};
pub use spectral::{Complex, Field, GridSpec};
