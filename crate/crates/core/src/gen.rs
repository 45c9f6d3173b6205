//! Deterministic synthetic fields: seeded divergence-free spectra and named
//! analytic flows.
//!
//! Random draws come from a counter-based generator keyed by
//! `(seed, mode index, component)`, so generation order cannot influence the
//! result and equal seeds reproduce coefficients bit for bit.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralVectorField;
use crate::grid::Grid;
use crate::lp::LpProfile;
use crate::ops::leray_project;

/// Spectrum envelope shape.
#[derive(Clone, Debug, PartialEq)]
pub enum SpectrumKind {
    /// Amplitude `|xi|^{-alpha}` across the band.
    PowerLaw { alpha: f64 },
    /// Flat amplitude across the band.
    Band,
    /// Unit amplitude on the listed dyadic shells only.
    ShellList(Vec<i32>),
}

/// Deterministic random-field request.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSpec {
    pub kind: SpectrumKind,
    /// Dyadic band `[k_min, k_max]` carrying energy.
    pub band: (i32, i32),
    pub seed: u64,
}

fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn unit_open(x: u64) -> f64 {
    // uniform in (0, 1]
    ((x >> 11) as f64 + 1.0) / (1u64 << 53) as f64
}

/// Two independent standard Gaussians keyed by `(seed, counter)`.
fn gauss_pair(seed: u64, counter: u64) -> (f64, f64) {
    let a = splitmix64(seed ^ splitmix64(counter));
    let b = splitmix64(a ^ 0x6a09e667f3bcc909);
    let u = unit_open(a);
    let v = unit_open(b);
    let r = (-2.0 * u.ln()).sqrt();
    let t = 2.0 * std::f64::consts::PI * v;
    (r * t.cos(), r * t.sin())
}

/// Seeded mean-zero divergence-free field with the requested spectrum.
pub fn random_divfree(
    grid: Grid,
    profile: &LpProfile,
    spec: &SpectrumSpec,
) -> Result<SpectralVectorField> {
    let (b_lo, b_hi) = spec.band;
    if b_lo > b_hi || b_lo < *profile.stored_range().start() || b_hi > *profile.stored_range().end()
    {
        return Err(Error::EmptyBand(b_lo, b_hi));
    }
    let shells: Vec<i32> = match &spec.kind {
        SpectrumKind::ShellList(list) => {
            let mut list = list.clone();
            list.sort_unstable();
            list.dedup();
            if list.is_empty()
                || list
                    .iter()
                    .any(|k| !profile.stored_range().contains(k))
            {
                return Err(Error::EmptyBand(b_lo, b_hi));
            }
            list
        }
        _ => (b_lo..=b_hi).collect(),
    };

    let n = grid.n_per_dim();
    // Band mask: the partition sum of the selected annulus multipliers. It
    // confines the spectrum to exactly the union of the shells' supports.
    let mut mask = ndarray::Array3::<f64>::zeros([n, n, n]);
    for k in &shells {
        if let Some(w) = profile.phi_multiplier(*k) {
            for (m, &v) in mask.iter_mut().zip(w.iter()) {
                *m += v;
            }
        }
    }

    let mut out = SpectralVectorField::zeros(grid);
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let w = mask[[i, j, l]];
                if w == 0.0 {
                    continue;
                }
                let r = grid.xi_norm(i, j, l);
                if r == 0.0 {
                    continue;
                }
                let amp = match &spec.kind {
                    SpectrumKind::PowerLaw { alpha } => w * r.powf(-alpha),
                    SpectrumKind::Band | SpectrumKind::ShellList(_) => w,
                };
                let flat = ((i * n + j) * n + l) as u64;
                for comp in 0..3usize {
                    let (g_re, g_im) = gauss_pair(spec.seed, flat * 3 + comp as u64);
                    out.components_mut()[comp].coeffs_mut()[[i, j, l]] =
                        Complex64::new(g_re, g_im) * amp;
                }
            }
        }
    }
    out.sanitize();
    let mut projected = leray_project(&out);
    projected.set_mean_zero();
    debug_assert!(projected.divergence_ratio() <= 1e-12);
    Ok(projected)
}

/// Named analytic flows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowKind {
    Abc,
    TaylorGreen,
}

/// Exactly divergence-free reference flows, assembled directly in frequency
/// space. Requires the box length to be a positive integer multiple of
/// `2*pi` so the unit-wavenumber modes sit on the lattice.
pub fn named_flow(grid: Grid, kind: FlowKind, params: [f64; 3]) -> Result<SpectralVectorField> {
    let ratio = grid.box_length() / (2.0 * std::f64::consts::PI);
    let r = ratio.round();
    if (ratio - r).abs() > 1e-9 * ratio.abs() || r < 1.0 {
        return Err(Error::IncompatibleBox(grid.box_length()));
    }
    let r = r as i64;
    if r as usize > grid.n_per_dim() / 2 - 1 {
        return Err(Error::IncompatibleBox(grid.box_length()));
    }
    let mut out = SpectralVectorField::zeros(grid);
    let mut add = |comp: usize, m: [i64; 3], c: Complex64| {
        let idx = [
            grid.index_of_mode(m[0]),
            grid.index_of_mode(m[1]),
            grid.index_of_mode(m[2]),
        ];
        let slot = &mut out.components_mut()[comp].coeffs_mut()[idx];
        *slot += c;
    };
    match kind {
        FlowKind::Abc => {
            let [a, b, c] = params;
            // u = (A sin z + C cos y, B sin x + A cos z, C sin y + B cos x)
            for s in [1i64, -1] {
                let sin_c = Complex64::new(0.0, -0.5 * s as f64);
                let cos_c = Complex64::new(0.5, 0.0);
                add(0, [0, 0, s * r], sin_c * a);
                add(0, [0, s * r, 0], cos_c * c);
                add(1, [s * r, 0, 0], sin_c * b);
                add(1, [0, 0, s * r], cos_c * a);
                add(2, [0, s * r, 0], sin_c * c);
                add(2, [s * r, 0, 0], cos_c * b);
            }
        }
        FlowKind::TaylorGreen => {
            let amp = params[0];
            // u = amp (sin x cos y cos z, -cos x sin y cos z, 0)
            for s1 in [1i64, -1] {
                for s2 in [1i64, -1] {
                    for s3 in [1i64, -1] {
                        let m = [s1 * r, s2 * r, s3 * r];
                        add(
                            0,
                            m,
                            Complex64::new(0.0, -(s1 as f64) / 8.0) * amp,
                        );
                        add(1, m, Complex64::new(0.0, s2 as f64 / 8.0) * amp);
                    }
                }
            }
        }
    }
    Ok(out)
}
