//! Dyadic frequency decomposition: the cutoff pair, blocks and cutoffs.
//!
//! The radial profile is the smooth step built from `h(t) = exp(-1/t)`:
//! with `s(t) = h(t) / (h(t) + h(1-t))`,
//!
//! ```text
//! psi(r) = 1                    for r <= 1/2
//!        = s(2 (1 - r))         for 1/2 < r < 1
//!        = 0                    for r >= 1
//! ```
//!
//! and the annulus function is the difference `phi(r) = psi(r/2) - psi(r)`,
//! supported on `1/2 <= r <= 2`. Multiplier values are quantized to the
//! dyadic lattice `Z / 2^32` so that every telescoping sum
//! `psi_k + sum_{l=k..K} phi_l = psi_{K+1}` is exact in f64 arithmetic, not
//! merely accurate: sums and differences of such values never round.
//!
//! For dyadic index `k`, the block multiplies coefficients by
//! `phi(2^{-k} |xi|)` and the low-pass cutoff by `psi(2^{-k} |xi|)`; the
//! high-pass part of `f` at level `k` is `f` minus its cutoff.

use ndarray::Array3;
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{SpectralField, SpectralVectorField};
use crate::grid::Grid;
use crate::quadrature::spectral_support;

const QUANT: f64 = 4294967296.0; // 2^32

fn bump(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = bump(t);
        let b = bump(1.0 - t);
        a / (a + b)
    }
}

/// The radial cutoff profile, quantized to `Z / 2^32`.
pub fn psi(r: f64) -> f64 {
    let raw = if r <= 0.5 {
        1.0
    } else if r >= 1.0 {
        0.0
    } else {
        smooth_step(2.0 * (1.0 - r))
    };
    (raw * QUANT).round() / QUANT
}

/// The annulus profile `psi(r/2) - psi(r)`, supported on `[1/2, 2]`.
pub fn phi(r: f64) -> f64 {
    psi(0.5 * r) - psi(r)
}

/// Common interface for scalar and vector operands of the dyadic operators.
pub trait SpectralOperand: Sized + Clone {
    fn grid(&self) -> &Grid;
    fn apply_multiplier(&self, w: &Array3<f64>) -> Self;
    fn zeros_like(grid: Grid) -> Self;
    fn add(&self, other: &Self) -> Result<Self>;
    fn sub(&self, other: &Self) -> Result<Self>;
    fn l2_norm(&self) -> f64;
    fn max_abs_coeff(&self) -> f64;
    fn mean_abs(&self) -> f64;
    fn max_abs_physical(&self) -> f64;
    fn support_radii(&self) -> Option<(f64, f64)>;
    fn keep_only_mean(&self) -> Self;
}

impl SpectralOperand for SpectralField {
    fn grid(&self) -> &Grid {
        self.grid()
    }
    fn apply_multiplier(&self, w: &Array3<f64>) -> Self {
        SpectralField::apply_multiplier(self, w)
    }
    fn zeros_like(grid: Grid) -> Self {
        SpectralField::zeros(grid)
    }
    fn add(&self, other: &Self) -> Result<Self> {
        SpectralField::add(self, other)
    }
    fn sub(&self, other: &Self) -> Result<Self> {
        SpectralField::sub(self, other)
    }
    fn l2_norm(&self) -> f64 {
        SpectralField::l2_norm(self)
    }
    fn max_abs_coeff(&self) -> f64 {
        SpectralField::max_abs_coeff(self)
    }
    fn mean_abs(&self) -> f64 {
        self.mean().norm()
    }
    fn max_abs_physical(&self) -> f64 {
        self.to_physical().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
    fn support_radii(&self) -> Option<(f64, f64)> {
        spectral_support(self, 0.0)
    }
    fn keep_only_mean(&self) -> Self {
        let mut out = SpectralField::zeros(*self.grid());
        out.coeffs_mut()[[0, 0, 0]] = self.mean();
        out
    }
}

impl SpectralOperand for SpectralVectorField {
    fn grid(&self) -> &Grid {
        self.grid()
    }
    fn apply_multiplier(&self, w: &Array3<f64>) -> Self {
        SpectralVectorField::apply_multiplier(self, w)
    }
    fn zeros_like(grid: Grid) -> Self {
        SpectralVectorField::zeros(grid)
    }
    fn add(&self, other: &Self) -> Result<Self> {
        SpectralVectorField::add(self, other)
    }
    fn sub(&self, other: &Self) -> Result<Self> {
        SpectralVectorField::sub(self, other)
    }
    fn l2_norm(&self) -> f64 {
        SpectralVectorField::l2_norm(self)
    }
    fn max_abs_coeff(&self) -> f64 {
        SpectralVectorField::max_abs_coeff(self)
    }
    fn mean_abs(&self) -> f64 {
        self.max_mean()
    }
    fn max_abs_physical(&self) -> f64 {
        let [a, b, c] = self.to_physical();
        let mut m = 0.0f64;
        for ((x, y), z) in a.iter().zip(b.iter()).zip(c.iter()) {
            m = m.max((x * x + y * y + z * z).sqrt());
        }
        m
    }
    fn support_radii(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut any = false;
        for comp in self.components() {
            if let Some((a, b)) = spectral_support(comp, 0.0) {
                lo = lo.min(a);
                hi = hi.max(b);
                any = true;
            }
        }
        any.then_some((lo, hi))
    }
    fn keep_only_mean(&self) -> Self {
        self.map(|c| SpectralOperand::keep_only_mean(c))
    }
}

/// Width of a dyadic block: the bare annulus or its two-sided widening.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockWidth {
    Standard,
    Tilde,
}

/// Sampled multiplier banks for all usable dyadic indices of one grid.
#[derive(Clone)]
pub struct LpProfile {
    grid: Grid,
    /// Lowest stored index: the cutoff at `k_lo` vanishes on every nonzero mode.
    k_lo: i32,
    /// Highest stored block index: the cutoff at `k_hi + 1` is 1 on the lattice.
    k_hi: i32,
    /// Lowest index whose annulus multiplier is nonzero somewhere.
    k_min: i32,
    /// Largest `k` with `2^{k-1} <` the axis Nyquist frequency.
    k_max: i32,
    psi: BTreeMap<i32, Arc<Array3<f64>>>,
    phi: BTreeMap<i32, Arc<Array3<f64>>>,
}

impl LpProfile {
    /// Sample the cutoff banks on the grid lattice.
    pub fn build(grid: Grid) -> Result<Self> {
        let n = grid.n_per_dim();
        let min_xi = grid.min_nonzero_xi();
        let max_xi = grid.max_xi();

        let mut k_lo = min_xi.log2().floor() as i32;
        while exp2i(k_lo) > min_xi {
            k_lo -= 1;
        }
        while exp2i(k_lo + 1) <= min_xi {
            k_lo += 1;
        }
        let mut k_hi = max_xi.log2().ceil() as i32;
        while exp2i(k_hi) < max_xi {
            k_hi += 1;
        }
        while k_hi > k_lo && exp2i(k_hi - 1) >= max_xi {
            k_hi -= 1;
        }

        let mut psi_bank = BTreeMap::new();
        for k in k_lo..=(k_hi + 1) {
            let scale = exp2i(-k);
            let mut w = Array3::zeros([n, n, n]);
            for i in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        w[[i, j, l]] = psi(scale * grid.xi_norm(i, j, l));
                    }
                }
            }
            psi_bank.insert(k, Arc::new(w));
        }
        let mut phi_bank = BTreeMap::new();
        for k in k_lo..=k_hi {
            let hi = &psi_bank[&(k + 1)];
            let lo = &psi_bank[&k];
            let mut w = Array3::zeros([n, n, n]);
            for ((wv, &a), &b) in w.iter_mut().zip(hi.iter()).zip(lo.iter()) {
                *wv = a - b;
            }
            phi_bank.insert(k, Arc::new(w));
        }

        let k_min = (k_lo..=k_hi)
            .find(|k| phi_bank[k].iter().any(|&v| v > 0.0))
            .ok_or(Error::GridTooSmall)?;
        let mut k_max = k_hi + 1;
        while k_max > k_min && exp2i(k_max - 1) >= grid.nyquist() {
            k_max -= 1;
        }
        if exp2i(k_max - 1) >= grid.nyquist() {
            return Err(Error::GridTooSmall);
        }
        Ok(LpProfile {
            grid,
            k_lo,
            k_hi,
            k_min,
            k_max,
            psi: psi_bank,
            phi: phi_bank,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Lowest dyadic index whose annulus holds lattice points.
    pub fn k_min(&self) -> i32 {
        self.k_min
    }

    /// Largest `k` with `2^{k-1}` below the axis Nyquist frequency.
    pub fn k_max(&self) -> i32 {
        self.k_max
    }

    /// Full stored index range; summing blocks over it reconstructs any
    /// mean-zero field exactly.
    pub fn stored_range(&self) -> std::ops::RangeInclusive<i32> {
        self.k_lo..=self.k_hi
    }

    /// Usable sweep range `[k_min, k_max]`.
    pub fn usable_range(&self) -> std::ops::RangeInclusive<i32> {
        self.k_min..=self.k_max
    }

    pub fn psi_multiplier(&self, k: i32) -> Option<&Arc<Array3<f64>>> {
        self.psi.get(&k)
    }

    pub fn phi_multiplier(&self, k: i32) -> Option<&Arc<Array3<f64>>> {
        self.phi.get(&k)
    }

    fn warn_on_mean<T: SpectralOperand>(&self, f: &T, what: &str) {
        let mean = f.mean_abs();
        if mean > 1e-13 * (1.0 + f.l2_norm()) {
            log::warn!("{what}: operand carries a nonzero mean ({mean:.3e}); homogeneous operators ignore it");
        }
    }

    /// Dyadic block at index `k`. Indices outside the stored range return the
    /// zero field (their annuli hold no lattice points).
    pub fn block<T: SpectralOperand>(&self, f: &T, k: i32, width: BlockWidth) -> T {
        self.warn_on_mean(f, "block");
        match width {
            BlockWidth::Standard => match self.phi.get(&k) {
                Some(w) => f.apply_multiplier(w),
                None => T::zeros_like(*f.grid()),
            },
            BlockWidth::Tilde => {
                // sum_{|l-k|<=2} phi_l telescopes to psi_{k+3} - psi_{k-2}
                let lo = (k - 2).clamp(self.k_lo, self.k_hi + 1);
                let hi = (k + 3).clamp(self.k_lo, self.k_hi + 1);
                if lo >= hi {
                    return T::zeros_like(*f.grid());
                }
                let w = self.psi_difference(hi, lo);
                f.apply_multiplier(&w)
            }
        }
    }

    fn psi_difference(&self, hi: i32, lo: i32) -> Array3<f64> {
        let a = &self.psi[&hi];
        let b = &self.psi[&lo];
        let mut w = Array3::zeros(a.raw_dim());
        for ((wv, &x), &y) in w.iter_mut().zip(a.iter()).zip(b.iter()) {
            *wv = x - y;
        }
        w
    }

    /// Low-frequency cutoff at index `k`. Below the stored range only the
    /// mean survives; above it the cutoff is the identity.
    pub fn low_pass<T: SpectralOperand>(&self, f: &T, k: i32) -> T {
        self.warn_on_mean(f, "low_pass");
        if k < self.k_lo {
            f.keep_only_mean()
        } else if k > self.k_hi + 1 {
            f.clone()
        } else {
            f.apply_multiplier(&self.psi[&k])
        }
    }

    /// High-pass part at index `k`: the operand minus its cutoff.
    pub fn high_pass<T: SpectralOperand>(&self, f: &T, k: i32) -> T {
        let low = self.low_pass(f, k);
        f.sub(&low).expect("same grid")
    }

    /// Largest telescoping error `|psi_k + sum_{l=k..K} phi_l - psi_{K+1}|`
    /// over every mode and every pair `k <= K` in the stored range. The
    /// quantized profile makes this identically zero.
    pub fn telescoping_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for k in self.k_lo..=self.k_hi {
            let mut acc: Array3<f64> = (*self.psi[&k]).clone();
            for upper in k..=self.k_hi {
                let phi = &self.phi[&upper];
                for (a, &p) in acc.iter_mut().zip(phi.iter()) {
                    *a += p;
                }
                let target = &self.psi[&(upper + 1)];
                for (&a, &t) in acc.iter().zip(target.iter()) {
                    worst = worst.max((a - t).abs());
                }
            }
        }
        worst
    }
}

fn exp2i(k: i32) -> f64 {
    (k as f64).exp2()
}

/// Per-block summary used by decomposition reports.
#[derive(Clone, Debug)]
pub struct BlockSummary {
    pub k: i32,
    pub l2_energy: f64,
    pub linf: f64,
    pub support_min: Option<f64>,
    pub support_max: Option<f64>,
}

/// Blockwise decomposition of one operand over the stored range.
pub struct DyadicDecomposition<T: SpectralOperand> {
    pub blocks: BTreeMap<i32, T>,
    pub source_mean_zero: bool,
}

impl<T: SpectralOperand> DyadicDecomposition<T> {
    pub fn new(profile: &LpProfile, f: &T) -> Self {
        let source_mean_zero = f.mean_abs() <= 1e-13 * (1.0 + f.l2_norm());
        let blocks = profile
            .stored_range()
            .map(|k| (k, profile.block(f, k, BlockWidth::Standard)))
            .collect();
        DyadicDecomposition {
            blocks,
            source_mean_zero,
        }
    }

    /// Sum of all stored blocks.
    pub fn reconstruct(&self, grid: Grid) -> T {
        let mut acc = T::zeros_like(grid);
        for b in self.blocks.values() {
            acc = acc.add(b).expect("same grid");
        }
        acc
    }

    pub fn summaries(&self) -> Vec<BlockSummary> {
        self.blocks
            .iter()
            .map(|(&k, b)| {
                let support = b.support_radii();
                BlockSummary {
                    k,
                    l2_energy: b.l2_norm().powi(2),
                    linf: if b.max_abs_coeff() == 0.0 {
                        0.0
                    } else {
                        b.max_abs_physical()
                    },
                    support_min: support.map(|s| s.0),
                    support_max: support.map(|s| s.1),
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_divfree, SpectrumKind, SpectrumSpec};
    use ndarray::Array3 as A3;
    use std::f64::consts::PI;

    fn cos_x1_field(grid: Grid) -> SpectralField {
        crate::testutil::cosine_axis(grid, 0)
    }

    #[test]
    fn profile_boundary_values() {
        assert_eq!(psi(0.5), 1.0);
        assert_eq!(psi(1.0), 0.0);
        assert_eq!(psi(0.0), 1.0);
        assert_eq!(phi(1.0), 1.0); // psi(1/2) - psi(1)
        assert_eq!(phi(0.25), 0.0); // inside the flat region: 1 - 1
        assert_eq!(phi(2.0), 0.0);
        for &r in &[0.6, 0.77, 0.9, 0.99] {
            let v = psi(r);
            assert!((0.0..=1.0).contains(&v));
        }
        // monotone in r
        let mut prev = 1.0;
        for i in 0..=100 {
            let v = psi(0.5 + 0.005 * i as f64);
            assert!(v <= prev + 0.0);
            prev = v;
        }
    }

    #[test]
    fn k_range_unit_box() {
        let grid = Grid::new(64, 2.0 * PI).unwrap();
        let p = LpProfile::build(grid).unwrap();
        assert_eq!(p.k_min(), 0);
        assert!(p.k_max() >= 4, "k range should include 0..4, got {}", p.k_max());
        // psi(2^0 xi) boundary values at |xi| = 1 and 1/2
        assert_eq!(psi(1.0), 0.0);
        assert_eq!(psi(0.5), 1.0);
    }

    #[test]
    fn k_min_on_double_box() {
        // oracle: enumerate lattice points of the (16, 4pi) grid inside the
        // open annulus (2^{k-1}, 2^{k+1}) for k = -1 and k = -2.
        let grid = Grid::new(16, 4.0 * PI).unwrap();
        let mut count_m1 = 0;
        let mut count_m2 = 0;
        for i in 0..16 {
            for j in 0..16 {
                for l in 0..16 {
                    let r = grid.xi_norm(i, j, l);
                    if r > 0.25 && r < 1.0 {
                        count_m1 += 1;
                    }
                    if r > 0.125 && r < 0.5 {
                        count_m2 += 1;
                    }
                }
            }
        }
        assert!(count_m1 > 0);
        assert_eq!(count_m2, 0);
        let p = LpProfile::build(grid).unwrap();
        assert_eq!(p.k_min(), -1);
    }

    #[test]
    fn telescoping_is_exact() {
        for (n, len) in [(16usize, 2.0 * PI), (16, 4.0 * PI), (32, 2.0 * PI)] {
            let p = LpProfile::build(Grid::new(n, len).unwrap()).unwrap();
            assert_eq!(p.telescoping_error(), 0.0);
        }
    }

    #[test]
    fn cosine_blocks() {
        let grid = Grid::new(16, 2.0 * PI).unwrap();
        let p = LpProfile::build(grid).unwrap();
        let f = cos_x1_field(grid);
        // Block 0 keeps cos x1 untouched: phi(1) = 1.
        let b0 = p.block(&f, 0, BlockWidth::Standard);
        assert!(b0.sub(&f).unwrap().max_abs_coeff() < 1e-15);
        // Block 2 annihilates it: phi(1/4) = 0.
        let b2 = p.block(&f, 2, BlockWidth::Standard);
        assert!(b2.max_abs_coeff() == 0.0);
        // Cutoffs: psi(1/2) = 1 keeps, psi(1) = 0 kills.
        let s1 = p.low_pass(&f, 1);
        assert!(s1.sub(&f).unwrap().max_abs_coeff() < 1e-15);
        let s0 = p.low_pass(&f, 0);
        assert!(s0.max_abs_coeff() == 0.0);
    }

    #[test]
    fn high_pass_splits_exactly() {
        let grid = Grid::new(16, 4.0 * PI).unwrap();
        let p = LpProfile::build(grid).unwrap();
        let spec = SpectrumSpec {
            kind: SpectrumKind::PowerLaw { alpha: 1.0 },
            band: (p.k_min(), p.k_max()),
            seed: 5,
        };
        let u = random_divfree(grid, &p, &spec).unwrap();
        for k in p.usable_range() {
            let lo = p.low_pass(&u, k);
            let hp = p.high_pass(&u, k);
            let sum = lo.add(&hp).unwrap();
            assert!(sum.sub(&u).unwrap().max_abs_coeff() <= 1e-15 * u.max_abs_coeff());
        }
        // below the spectrum the high-pass is the identity, above it zero
        let below = p.high_pass(&u, p.k_min() - 4);
        assert!(below.sub(&u).unwrap().max_abs_coeff() == 0.0);
        let above = p.high_pass(&u, p.k_max() + 6);
        assert!(above.max_abs_coeff() <= 1e-16 * u.max_abs_coeff());
    }

    #[test]
    fn block_support_is_contained() {
        let grid = Grid::new(16, 2.0 * PI).unwrap();
        let p = LpProfile::build(grid).unwrap();
        let spec = SpectrumSpec {
            kind: SpectrumKind::Band,
            band: (p.k_min(), p.k_max()),
            seed: 9,
        };
        let u = random_divfree(grid, &p, &spec).unwrap();
        for k in p.stored_range() {
            let b = p.block(&u, k, BlockWidth::Standard);
            if let Some((lo, hi)) = b.support_radii() {
                let lo_bound = (k as f64 - 1.0).exp2();
                let hi_bound = (k as f64 + 1.0).exp2();
                assert!(lo >= lo_bound - 1e-12 && hi <= hi_bound + 1e-12);
            }
        }
    }

    #[test]
    fn reconstruction_over_stored_range() {
        let grid = Grid::new(16, 4.0 * PI).unwrap();
        let p = LpProfile::build(grid).unwrap();
        let spec = SpectrumSpec {
            kind: SpectrumKind::PowerLaw { alpha: 2.0 },
            band: (p.k_min(), p.k_max()),
            seed: 3,
        };
        let u = random_divfree(grid, &p, &spec).unwrap();
        let dec = DyadicDecomposition::new(&p, &u);
        let rec = dec.reconstruct(grid);
        let err = rec.sub(&u).unwrap().l2_norm() / u.l2_norm();
        assert!(err <= 1e-12, "reconstruction error {err}");
    }

    #[test]
    fn cutoff_composition_is_exact_for_nested_scales() {
        // S_k S_j f = S_j f whenever 2^j <= 2^{k-1}
        let grid = Grid::new(16, 2.0 * PI).unwrap();
        let p = LpProfile::build(grid).unwrap();
        let f = {
            let spec = SpectrumSpec {
                kind: SpectrumKind::Band,
                band: (p.k_min(), p.k_max()),
                seed: 21,
            };
            random_divfree(grid, &p, &spec).unwrap()
        };
        for j in p.usable_range() {
            for k in p.usable_range() {
                if j <= k - 1 {
                    let sj = p.low_pass(&f, j);
                    let sksj = p.low_pass(&sj, k);
                    assert!(
                        sksj.sub(&sj).unwrap().l2_norm() == 0.0,
                        "S_{k} S_{j} != S_{j}"
                    );
                }
            }
        }
    }
}
