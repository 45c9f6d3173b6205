//! Littlewood-Paley spectral laboratory on periodic 3D grids.
//!
//! Fields live as Fourier coefficients over a cubic mode lattice; the
//! dyadic machinery (blocks, cutoffs, high-pass parts) drives norm
//! computations, frequency-localized energy identities for stationary MHD
//! pairs, and empirical verification of the inequality ladders built on
//! them. Nonlinear products are evaluated alias-free so the identities are
//! exact algebra up to rounding.

pub mod checks;
pub mod error;
pub mod fft;
pub mod field;
pub mod gen;
pub mod grid;
pub mod identity;
pub mod io;
pub mod lp;
pub mod norms;
pub mod ops;
pub mod quadrature;
pub mod report;
mod util;
#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use field::{SpectralField, SpectralVectorField};
pub use grid::Grid;
pub use lp::{BlockWidth, LpProfile};
pub use rustfft::num_complex::Complex64;
