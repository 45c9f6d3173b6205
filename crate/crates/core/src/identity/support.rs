//! Frequency-support measurement of the paraproduct building block
//! `block_l(hp_k f) * cutoff_{l-2}(cutoff_k f)`.
//!
//! The convolution of an annulus at `2^l` with a ball at `2^{l-2}` stays in
//! the annulus `2^{l-2} <= |xi| < (9/8) 2^{l+1}`; the check computes the
//! product alias-free on an enlarged grid and measures where its spectrum
//! actually lands.

use crate::error::Result;
use crate::field::SpectralVectorField;
use crate::lp::{BlockWidth, LpProfile};
use crate::quadrature::product_spectrum;

/// Measured support of the paraproduct block at `(k, l)`.
#[derive(Clone, Debug)]
pub struct SupportCheck {
    pub k: i32,
    pub l: i32,
    /// Lower edge `2^{l-2}` of the predicted annulus.
    pub bound_lo: f64,
    /// Upper edge `(9/8) 2^{l+1}` (exclusive).
    pub bound_hi: f64,
    /// Observed `(min, max)` radii over all component products, when any
    /// coefficient is nonzero.
    pub observed: Option<(f64, f64)>,
    /// Largest coefficient magnitude outside the annulus relative to the
    /// overall maximum; 0 when the product vanishes identically.
    pub outside_over_max: f64,
}

impl SupportCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.outside_over_max <= tol
    }
}

/// Measure the spectrum of every component pair of
/// `block_l(hp_k u) (x) cutoff_{l-2}(cutoff_k u)`.
pub fn paraproduct_support_check(
    profile: &LpProfile,
    u: &SpectralVectorField,
    k: i32,
    l: i32,
) -> Result<SupportCheck> {
    let hp = profile.high_pass(u, k);
    let block_hp = profile.block(&hp, l, BlockWidth::Standard);
    let lo = profile.low_pass(u, k);
    let lo_lo = profile.low_pass(&lo, l - 2);

    let bound_lo = ((l - 2) as f64).exp2();
    let bound_hi = 1.125 * ((l + 1) as f64).exp2();

    let mut products = Vec::with_capacity(9);
    let mut max_all = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let prod = product_spectrum(block_hp.component(i), lo_lo.component(j))?;
            max_all = max_all.max(prod.max_abs_coeff());
            products.push(prod);
        }
    }
    // Observed radii count coefficients above the rounding floor of the
    // product transform; anything below 1e-14 of the peak is noise.
    let floor = 1e-14 * max_all;
    let mut max_outside = 0.0f64;
    let mut obs_lo = f64::INFINITY;
    let mut obs_hi = f64::NEG_INFINITY;
    let mut any = false;
    for prod in &products {
        let grid = *prod.grid();
        let n = grid.n_per_dim();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mag = prod.coeffs()[[a, b, c]].norm();
                    if mag == 0.0 {
                        continue;
                    }
                    let r = grid.xi_norm(a, b, c);
                    if r < bound_lo || r >= bound_hi {
                        max_outside = max_outside.max(mag);
                    }
                    if mag > floor {
                        any = true;
                        obs_lo = obs_lo.min(r);
                        obs_hi = obs_hi.max(r);
                    }
                }
            }
        }
    }
    Ok(SupportCheck {
        k,
        l,
        bound_lo,
        bound_hi,
        observed: any.then_some((obs_lo, obs_hi)),
        outside_over_max: if max_all == 0.0 {
            0.0
        } else {
            max_outside / max_all
        },
    })
}
