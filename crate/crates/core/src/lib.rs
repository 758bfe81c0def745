//! Numerics for almost-Fuchsian minimal surfaces in hyperbolic 3-space:
//! Möbius geometry, Kleinian limit sets, the Gauss equation on a disk,
//! moving-frame reconstruction of the surface, hyperbolic Gauss maps and
//! quasiconformal certificates.

mod banded;
pub mod certify;
pub mod error;
pub mod gauss_equation;
pub mod grid;
pub mod io;
pub mod kleinian;
pub mod moebius;
pub mod quad_diff;
pub mod surface;

pub use error::{Error, Result};
