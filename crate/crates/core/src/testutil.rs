//! Shared helpers for unit tests: exact spectral constructions.

use rustfft::num_complex::Complex64;

use crate::field::{SpectralField, SpectralVectorField};
use crate::grid::Grid;

/// `cos(x_axis)` assembled directly in frequency space: coefficients 1/2 at
/// the pair of unit modes, exact zeros elsewhere.
pub(crate) fn cosine_axis(grid: Grid, axis: usize) -> SpectralField {
    let r = (grid.box_length() / (2.0 * std::f64::consts::PI)).round() as i64;
    let mut f = SpectralField::zeros(grid);
    let mut m = [0i64; 3];
    m[axis] = r;
    let idx_p = [
        grid.index_of_mode(m[0]),
        grid.index_of_mode(m[1]),
        grid.index_of_mode(m[2]),
    ];
    let idx_m = [
        grid.index_of_mode(-m[0]),
        grid.index_of_mode(-m[1]),
        grid.index_of_mode(-m[2]),
    ];
    f.coeffs_mut()[idx_p] = Complex64::new(0.5, 0.0);
    f.coeffs_mut()[idx_m] = Complex64::new(0.5, 0.0);
    f
}

/// Single-mode vector field `(cos(x2), 0, 0)`.
pub(crate) fn cos_x2_vector(grid: Grid) -> SpectralVectorField {
    SpectralVectorField::from_components([
        cosine_axis(grid, 1),
        SpectralField::zeros(grid),
        SpectralField::zeros(grid),
    ])
    .unwrap()
}
