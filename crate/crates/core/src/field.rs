//! Spectral representation of real scalar and vector fields.
//!
//! A `SpectralField` stores the coefficients `fhat_m` of
//! `f(x) = sum_m fhat_m exp(i xi_m . x)` over the grid's mode lattice, in FFT
//! wraparound order. Real-valued fields satisfy the Hermitian symmetry
//! `fhat_{-m} = conj(fhat_m)`; every forward transform re-symmetrizes
//! explicitly so the property holds exactly rather than up to rounding drift.
//!
//! The lattice planes `m_i = -n/2` have no mirror partner `+n/2` on the
//! lattice, so they cannot carry Hermitian content for a real field;
//! sanitization zeroes them, and band-limited means `|m_i| <= n/2 - 1`.

use ndarray::Array3;
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::fft3;
use crate::grid::Grid;
use crate::util::{det_max_indexed, det_sum_indexed};

/// Fourier coefficients of a real scalar field on a periodic box.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Array3<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        SpectralField {
            grid,
            coeffs: Array3::default(grid.shape()),
        }
    }

    /// Wrap an existing coefficient array. The caller is responsible for
    /// Hermitian symmetry; use [`SpectralField::sanitize`] when unsure.
    pub fn from_coeffs(grid: Grid, coeffs: Array3<Complex64>) -> Result<Self> {
        if coeffs.shape() != grid.shape() {
            return Err(Error::ShapeMismatch {
                got: coeffs.shape().to_vec(),
                want: grid.shape().to_vec(),
            });
        }
        let coeffs = if coeffs.is_standard_layout() {
            coeffs
        } else {
            coeffs.as_standard_layout().to_owned()
        };
        Ok(SpectralField { grid, coeffs })
    }

    /// Forward transform of physical samples, including symmetrization.
    pub fn from_physical(grid: Grid, samples: &Array3<f64>) -> Result<Self> {
        if samples.shape() != grid.shape() {
            return Err(Error::ShapeMismatch {
                got: samples.shape().to_vec(),
                want: grid.shape().to_vec(),
            });
        }
        let n = grid.n_per_dim();
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft3(&mut buf, n, true);
        let scale = 1.0 / grid.n_points() as f64;
        for c in buf.iter_mut() {
            *c *= scale;
        }
        let coeffs = Array3::from_shape_vec(grid.shape(), buf).expect("shape");
        let mut field = SpectralField { grid, coeffs };
        field.sanitize();
        Ok(field)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &Array3<Complex64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array3<Complex64> {
        &mut self.coeffs
    }

    fn slice(&self) -> &[Complex64] {
        self.coeffs.as_slice().expect("standard layout")
    }

    /// Enforce Hermitian symmetry and clear the unpaired Nyquist planes.
    pub fn sanitize(&mut self) {
        let n = self.grid.n_per_dim();
        let half = n / 2;
        let buf = self.coeffs.as_slice_mut().expect("standard layout");
        // Nyquist planes first so the pairing below only sees mirrored modes.
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    if i == half || j == half || l == half {
                        buf[(i * n + j) * n + l] = Complex64::default();
                    }
                }
            }
        }
        let neg = |i: usize| -> usize { (n - i) % n };
        for i in 0..n {
            let ni = neg(i);
            for j in 0..n {
                let nj = neg(j);
                for l in 0..n {
                    let nl = neg(l);
                    let a = (i * n + j) * n + l;
                    let b = (ni * n + nj) * n + nl;
                    if a < b {
                        let avg = 0.5 * (buf[a] + buf[b].conj());
                        buf[a] = avg;
                        buf[b] = avg.conj();
                    } else if a == b {
                        buf[a] = Complex64::new(buf[a].re, 0.0);
                    }
                }
            }
        }
    }

    /// Largest Hermitian asymmetry `|fhat_m - conj(fhat_{-m})|`.
    pub fn hermitian_error(&self) -> f64 {
        let n = self.grid.n_per_dim();
        let buf = self.slice();
        let neg = |i: usize| -> usize { (n - i) % n };
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let a = (i * n + j) * n + l;
                    let b = (neg(i) * n + neg(j)) * n + neg(l);
                    worst = worst.max((buf[a] - buf[b].conj()).norm());
                }
            }
        }
        worst
    }

    /// Coefficient of the zero mode (the field mean).
    pub fn mean(&self) -> Complex64 {
        self.coeffs[[0, 0, 0]]
    }

    pub fn set_mean_zero(&mut self) {
        self.coeffs[[0, 0, 0]] = Complex64::default();
    }

    /// Inverse transform to physical samples on the native grid.
    pub fn to_physical(&self) -> Array3<f64> {
        self.physical_sized(self.grid.n_per_dim())
    }

    /// Samples of the same trigonometric polynomial on an `m^3` grid.
    /// Every nonzero coefficient must satisfy `|mode_i| <= m/2 - 1`; modes
    /// that cannot be represented are required to be exact zeros.
    pub(crate) fn physical_sized(&self, m: usize) -> Array3<f64> {
        let n = self.grid.n_per_dim();
        let src = self.slice();
        let mut buf = vec![Complex64::default(); m * m * m];
        let keep = |mode: i64| -> Option<usize> {
            if mode.unsigned_abs() as usize > m / 2 - 1 {
                return None;
            }
            Some(if mode >= 0 {
                mode as usize
            } else {
                (mode + m as i64) as usize
            })
        };
        for i in 0..n {
            let mi = self.grid.mode_of_index(i);
            for j in 0..n {
                let mj = self.grid.mode_of_index(j);
                for l in 0..n {
                    let c = src[(i * n + j) * n + l];
                    if c == Complex64::default() {
                        continue;
                    }
                    let ml = self.grid.mode_of_index(l);
                    match (keep(mi), keep(mj), keep(ml)) {
                        (Some(ti), Some(tj), Some(tl)) => {
                            buf[(ti * m + tj) * m + tl] = c;
                        }
                        _ => panic!(
                            "mode ({mi},{mj},{ml}) does not fit a {m}^3 physical grid"
                        ),
                    }
                }
            }
        }
        fft3(&mut buf, m, false);
        let re: Vec<f64> = buf.iter().map(|c| c.re).collect();
        Array3::from_shape_vec([m, m, m], re).expect("shape")
    }

    /// L2 norm over the box via Parseval: `sqrt(L^3 sum |fhat_m|^2)`.
    pub fn l2_norm(&self) -> f64 {
        let buf = self.slice();
        let s = det_sum_indexed(buf.len(), |i| buf[i].norm_sqr());
        (self.grid.volume() * s).sqrt()
    }

    /// Largest coefficient magnitude.
    pub fn max_abs_coeff(&self) -> f64 {
        let buf = self.slice();
        if buf.is_empty() {
            return 0.0;
        }
        det_max_indexed(buf.len(), |i| buf[i].norm())
    }

    pub fn is_zero(&self) -> bool {
        self.slice().iter().all(|c| *c == Complex64::default())
    }

    /// Largest per-coordinate |mode| carrying a nonzero coefficient.
    /// Zero fields report 0.
    pub fn mode_bound(&self) -> usize {
        let n = self.grid.n_per_dim();
        let buf = self.slice();
        let mut bound = 0i64;
        for i in 0..n {
            let mi = self.grid.mode_of_index(i).abs();
            for j in 0..n {
                let mj = self.grid.mode_of_index(j).abs();
                for l in 0..n {
                    if buf[(i * n + j) * n + l] != Complex64::default() {
                        let ml = self.grid.mode_of_index(l).abs();
                        bound = bound.max(mi).max(mj).max(ml);
                    }
                }
            }
        }
        bound as usize
    }

    /// Pointwise real multiplier in frequency space.
    pub fn apply_multiplier(&self, w: &Array3<f64>) -> Self {
        assert_eq!(w.shape(), self.coeffs.shape());
        let ws = w.as_slice().expect("standard layout");
        let src = self.slice();
        let out: Vec<Complex64> = src.iter().zip(ws).map(|(c, &m)| c * m).collect();
        SpectralField {
            grid: self.grid,
            coeffs: Array3::from_shape_vec(self.grid.shape(), out).expect("shape"),
        }
    }

    /// Rebuild coefficients as `f(mode, xi, coeff)` per lattice point.
    pub fn map_modes<F>(&self, f: F) -> Self
    where
        F: Fn([i64; 3], [f64; 3], Complex64) -> Complex64,
    {
        let n = self.grid.n_per_dim();
        let fs = self.grid.freq_spacing();
        let src = self.slice();
        let mut out = vec![Complex64::default(); src.len()];
        for i in 0..n {
            let mi = self.grid.mode_of_index(i);
            for j in 0..n {
                let mj = self.grid.mode_of_index(j);
                for l in 0..n {
                    let ml = self.grid.mode_of_index(l);
                    let idx = (i * n + j) * n + l;
                    out[idx] = f(
                        [mi, mj, ml],
                        [fs * mi as f64, fs * mj as f64, fs * ml as f64],
                        src[idx],
                    );
                }
            }
        }
        SpectralField {
            grid: self.grid,
            coeffs: Array3::from_shape_vec(self.grid.shape(), out).expect("shape"),
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let out: Vec<Complex64> = self.slice().iter().map(|c| c * a).collect();
        SpectralField {
            grid: self.grid,
            coeffs: Array3::from_shape_vec(self.grid.shape(), out).expect("shape"),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let out: Vec<Complex64> = self
            .slice()
            .iter()
            .zip(other.slice())
            .map(|(a, b)| a + b)
            .collect();
        Ok(SpectralField {
            grid: self.grid,
            coeffs: Array3::from_shape_vec(self.grid.shape(), out).expect("shape"),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let out: Vec<Complex64> = self
            .slice()
            .iter()
            .zip(other.slice())
            .map(|(a, b)| a - b)
            .collect();
        Ok(SpectralField {
            grid: self.grid,
            coeffs: Array3::from_shape_vec(self.grid.shape(), out).expect("shape"),
        })
    }
}

/// Three scalar components sharing one grid.
#[derive(Clone, Debug)]
pub struct SpectralVectorField {
    components: [SpectralField; 3],
}

impl SpectralVectorField {
    pub fn zeros(grid: Grid) -> Self {
        SpectralVectorField {
            components: [
                SpectralField::zeros(grid),
                SpectralField::zeros(grid),
                SpectralField::zeros(grid),
            ],
        }
    }

    pub fn from_components(components: [SpectralField; 3]) -> Result<Self> {
        components[0].grid().check_same(components[1].grid())?;
        components[0].grid().check_same(components[2].grid())?;
        Ok(SpectralVectorField { components })
    }

    pub fn grid(&self) -> &Grid {
        self.components[0].grid()
    }

    pub fn component(&self, i: usize) -> &SpectralField {
        &self.components[i]
    }

    pub fn components(&self) -> &[SpectralField; 3] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [SpectralField; 3] {
        &mut self.components
    }

    pub fn map<F>(&self, f: F) -> Self
    where
        F: Fn(&SpectralField) -> SpectralField,
    {
        SpectralVectorField {
            components: [
                f(&self.components[0]),
                f(&self.components[1]),
                f(&self.components[2]),
            ],
        }
    }

    pub fn apply_multiplier(&self, w: &Array3<f64>) -> Self {
        self.map(|c| c.apply_multiplier(w))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(SpectralVectorField {
            components: [
                self.components[0].add(&other.components[0])?,
                self.components[1].add(&other.components[1])?,
                self.components[2].add(&other.components[2])?,
            ],
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(SpectralVectorField {
            components: [
                self.components[0].sub(&other.components[0])?,
                self.components[1].sub(&other.components[1])?,
                self.components[2].sub(&other.components[2])?,
            ],
        })
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map(|c| c.scaled(a))
    }

    pub fn sanitize(&mut self) {
        for c in self.components.iter_mut() {
            c.sanitize();
        }
    }

    pub fn set_mean_zero(&mut self) {
        for c in self.components.iter_mut() {
            c.set_mean_zero();
        }
    }

    pub fn max_mean(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.mean().norm())
            .fold(0.0, f64::max)
    }

    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.components.iter().map(|c| c.l2_norm().powi(2)).sum();
        s.sqrt()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.max_abs_coeff())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    pub fn mode_bound(&self) -> usize {
        self.components
            .iter()
            .map(|c| c.mode_bound())
            .max()
            .unwrap_or(0)
    }

    /// Worst relative divergence `max_m |xi . vhat| / max_m |xi| |vhat|`.
    /// Returns 0 for fields with no gradient content.
    pub fn divergence_ratio(&self) -> f64 {
        let grid = *self.grid();
        let n = grid.n_per_dim();
        let fs = grid.freq_spacing();
        let c0 = self.components[0].coeffs().as_slice().expect("layout");
        let c1 = self.components[1].coeffs().as_slice().expect("layout");
        let c2 = self.components[2].coeffs().as_slice().expect("layout");
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for i in 0..n {
            let xi0 = fs * grid.mode_of_index(i) as f64;
            for j in 0..n {
                let xi1 = fs * grid.mode_of_index(j) as f64;
                for l in 0..n {
                    let xi2 = fs * grid.mode_of_index(l) as f64;
                    let idx = (i * n + j) * n + l;
                    let dot = xi0 * c0[idx] + xi1 * c1[idx] + xi2 * c2[idx];
                    let xin = (xi0 * xi0 + xi1 * xi1 + xi2 * xi2).sqrt();
                    let mag =
                        (c0[idx].norm_sqr() + c1[idx].norm_sqr() + c2[idx].norm_sqr()).sqrt();
                    num = num.max(dot.norm());
                    den = den.max(xin * mag);
                }
            }
        }
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }

    pub fn is_divergence_free(&self, tol: f64) -> bool {
        self.divergence_ratio() <= tol
    }

    pub fn to_physical(&self) -> [Array3<f64>; 3] {
        [
            self.components[0].to_physical(),
            self.components[1].to_physical(),
            self.components[2].to_physical(),
        ]
    }

    pub(crate) fn physical_sized(&self, m: usize) -> [Array3<f64>; 3] {
        [
            self.components[0].physical_sized(m),
            self.components[1].physical_sized(m),
            self.components[2].physical_sized(m),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cos_x1(grid: Grid) -> Array3<f64> {
        let n = grid.n_per_dim();
        let xs = grid.x_axis();
        let mut out = Array3::zeros([n, n, n]);
        for i in 0..n {
            let v = xs[i].cos();
            for j in 0..n {
                for l in 0..n {
                    out[[i, j, l]] = v;
                }
            }
        }
        out
    }

    #[test]
    fn cosine_transforms_to_half_weights() {
        let grid = Grid::new(16, 2.0 * PI).unwrap();
        let f = SpectralField::from_physical(grid, &cos_x1(grid)).unwrap();
        let n = grid.n_per_dim();
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let c = f.coeffs()[[i, j, l]];
                    let m = grid.mode_of_index(i);
                    if j == 0 && l == 0 && (m == 1 || m == -1) {
                        assert!((c - Complex64::new(0.5, 0.0)).norm() < 1e-14);
                    } else {
                        assert!(c.norm() < 1e-14, "stray coefficient at {i},{j},{l}");
                    }
                }
            }
        }
    }

    #[test]
    fn constant_field_is_pure_mean() {
        let grid = Grid::new(8, 2.0 * PI).unwrap();
        let samples = Array3::from_elem(grid.shape(), 3.0);
        let f = SpectralField::from_physical(grid, &samples).unwrap();
        assert!((f.mean() - Complex64::new(3.0, 0.0)).norm() < 1e-14);
        let energy_off_mean: f64 = f
            .coeffs()
            .iter()
            .skip(1)
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        assert!(energy_off_mean < 1e-14);
    }

    #[test]
    fn round_trip_and_parseval() {
        let grid = Grid::new(16, 4.0 * PI).unwrap();
        // Deterministic pseudo-random band-limited samples: build from a
        // spectral seed so the Nyquist planes are genuinely empty.
        let n = grid.n_per_dim();
        let mut seedfield = SpectralField::zeros(grid);
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut nextf = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / (1u64 << 53) as f64 - 0.5
        };
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    seedfield.coeffs_mut()[[i, j, l]] = Complex64::new(nextf(), nextf());
                }
            }
        }
        seedfield.sanitize();
        let samples = seedfield.to_physical();
        let f = SpectralField::from_physical(grid, &samples).unwrap();

        // round trip forward . inverse = identity
        let back = f.to_physical();
        let mut err = 0.0f64;
        let mut scale = 0.0f64;
        for (a, b) in back.iter().zip(samples.iter()) {
            err = err.max((a - b).abs());
            scale = scale.max(b.abs());
        }
        assert!(err <= 1e-13 * scale.max(1.0), "round trip error {err}");
        assert!(f.hermitian_error() == 0.0);

        // Parseval against physical-space quadrature:
        // (1/L^3) int |f|^2 dx = sum_m |fhat_m|^2
        let quad: f64 = samples.iter().map(|v| v * v).sum::<f64>() / grid.n_points() as f64;
        let spectral: f64 = f.coeffs().iter().map(|c| c.norm_sqr()).sum();
        assert!(
            (quad - spectral).abs() <= 1e-12 * spectral.max(1e-300),
            "parseval: quad {quad} vs spectral {spectral}"
        );
    }

    #[test]
    fn refinement_preserves_samples() {
        let grid = Grid::new(8, 2.0 * PI).unwrap();
        let f = SpectralField::from_physical(grid, &cos_x1(grid)).unwrap();
        let fine = f.physical_sized(16);
        // every other sample of the refined field matches the native one
        let coarse = f.to_physical();
        for i in 0..8 {
            for j in 0..8 {
                for l in 0..8 {
                    assert!((fine[[2 * i, 2 * j, 2 * l]] - coarse[[i, j, l]]).abs() < 1e-12);
                }
            }
        }
    }
}
