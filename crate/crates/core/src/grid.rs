//! Periodic box discretization of 3-space.
//!
//! The box is `[0, L)^3` sampled at `n` points per dimension. A real field is
//! represented by Fourier coefficients on the integer mode lattice
//! `{m in Z^3 : -n/2 <= m_i < n/2}` with frequencies `xi_m = (2*pi/L) * m`,
//! so that `f(x) = sum_m fhat_m exp(i xi_m . x)`.

use crate::error::{Error, Result};

/// Descriptor of a periodic box and its frequency lattice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    n: usize,
    box_length: f64,
}

impl Grid {
    /// Build a grid with `n_per_dim` points per dimension on a box of side
    /// `box_length`. Requires `n_per_dim` even and at least 4.
    pub fn new(n_per_dim: usize, box_length: f64) -> Result<Self> {
        if n_per_dim < 4 || n_per_dim % 2 != 0 {
            return Err(Error::InvalidResolution(n_per_dim));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidBoxLength(box_length));
        }
        Ok(Grid {
            n: n_per_dim,
            box_length,
        })
    }

    pub fn n_per_dim(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Spacing of the frequency lattice, `2*pi / L`.
    pub fn freq_spacing(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.box_length
    }

    /// Largest resolved axis frequency, `freq_spacing * n/2`.
    pub fn nyquist(&self) -> f64 {
        self.freq_spacing() * (self.n as f64 / 2.0)
    }

    /// Box volume `L^3`.
    pub fn volume(&self) -> f64 {
        self.box_length * self.box_length * self.box_length
    }

    /// Total number of lattice points / physical samples.
    pub fn n_points(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.n, self.n, self.n]
    }

    /// Signed lattice coordinate for storage index `i` (FFT wraparound order).
    #[inline]
    pub fn mode_of_index(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Storage index for signed lattice coordinate `m`, which must lie in
    /// `[-n/2, n/2)`.
    #[inline]
    pub fn index_of_mode(&self, m: i64) -> usize {
        if m >= 0 {
            m as usize
        } else {
            (m + self.n as i64) as usize
        }
    }

    /// Per-axis frequency table indexed by storage index.
    pub fn xi_axis(&self) -> Vec<f64> {
        let fs = self.freq_spacing();
        (0..self.n).map(|i| fs * self.mode_of_index(i) as f64).collect()
    }

    /// `|xi|` for the mode at storage indices `(i, j, l)`.
    pub fn xi_norm(&self, i: usize, j: usize, l: usize) -> f64 {
        let fs = self.freq_spacing();
        let a = fs * self.mode_of_index(i) as f64;
        let b = fs * self.mode_of_index(j) as f64;
        let c = fs * self.mode_of_index(l) as f64;
        (a * a + b * b + c * c).sqrt()
    }

    /// Smallest nonzero `|xi|` on the lattice (the frequency spacing).
    pub fn min_nonzero_xi(&self) -> f64 {
        self.freq_spacing()
    }

    /// Largest `|xi|` on the lattice once the unpaired Nyquist planes are
    /// excluded, i.e. for modes with all `|m_i| <= n/2 - 1`.
    pub fn max_xi(&self) -> f64 {
        let b = self.freq_spacing() * (self.n as f64 / 2.0 - 1.0);
        (3.0 * b * b).sqrt()
    }

    /// Physical sample coordinates along one axis.
    pub fn x_axis(&self) -> Vec<f64> {
        let h = self.box_length / self.n as f64;
        (0..self.n).map(|i| h * i as f64).collect()
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(
                self.n,
                self.box_length,
                other.n,
                other.box_length,
            ));
        }
        Ok(())
    }
}
