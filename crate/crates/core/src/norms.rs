//! Lebesgue, homogeneous Sobolev and Besov norms, the Dirichlet energy, and
//! empirical Bernstein-inequality ratios.
//!
//! Finite-exponent Lebesgue norms are grid quadratures
//! `(sum |f(x_i)|^p (L/M)^3)^{1/p}`; the sup norm is the sample maximum and
//! therefore a lower bound on the true sup, with an optional refined sampling
//! factor for tight cases.

use crate::error::{Error, Result};
use crate::field::{SpectralField, SpectralVectorField};
use crate::lp::{BlockWidth, LpProfile};
use crate::ops::grad_inner;
use crate::util::{det_max_indexed, det_sum_indexed};

/// Lebesgue exponent: finite `p >= 1` or infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Lp {
    Finite(f64),
    Infinity,
}

impl Lp {
    pub fn parse(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(Lp::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Lp::Finite(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }
}

/// Which route a norm took; carried in reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormMethod {
    Integral,
    LpSum,
    PhysicalMax,
}

/// Operand magnitudes sampled on a refined physical grid.
fn magnitude_samples(f: &NormOperand, refine: usize) -> Vec<f64> {
    let grid = f.grid();
    let m = grid.n_per_dim() * refine.max(1);
    match f {
        NormOperand::Scalar(s) => s
            .physical_sized(m)
            .into_iter()
            .map(f64::abs)
            .collect(),
        NormOperand::Vector(v) => {
            let [a, b, c] = v.physical_sized(m);
            a.iter()
                .zip(b.iter())
                .zip(c.iter())
                .map(|((x, y), z)| (x * x + y * y + z * z).sqrt())
                .collect()
        }
    }
}

/// Scalar or vector operand for norms (vector magnitudes are pointwise
/// Euclidean).
#[derive(Clone, Debug)]
pub enum NormOperand {
    Scalar(SpectralField),
    Vector(SpectralVectorField),
}

impl NormOperand {
    pub fn grid(&self) -> &crate::grid::Grid {
        match self {
            NormOperand::Scalar(s) => s.grid(),
            NormOperand::Vector(v) => v.grid(),
        }
    }

    fn mean_abs(&self) -> f64 {
        match self {
            NormOperand::Scalar(s) => s.mean().norm(),
            NormOperand::Vector(v) => v.max_mean(),
        }
    }

    fn l2_spectral(&self) -> f64 {
        match self {
            NormOperand::Scalar(s) => s.l2_norm(),
            NormOperand::Vector(v) => v.l2_norm(),
        }
    }
}

impl From<SpectralField> for NormOperand {
    fn from(f: SpectralField) -> Self {
        NormOperand::Scalar(f)
    }
}

impl From<SpectralVectorField> for NormOperand {
    fn from(f: SpectralVectorField) -> Self {
        NormOperand::Vector(f)
    }
}

/// `L^p` norm by grid quadrature (`p` finite) or sample maximum (`p` = inf).
pub fn lebesgue_norm(f: &NormOperand, p: Lp, refine: usize) -> f64 {
    let grid = *f.grid();
    let samples = magnitude_samples(f, refine);
    match p {
        Lp::Infinity => det_max_indexed(samples.len(), |i| samples[i]),
        Lp::Finite(p) => {
            let cell = grid.volume() / samples.len() as f64;
            if p == 2.0 {
                let s = det_sum_indexed(samples.len(), |i| samples[i] * samples[i]);
                (s * cell).sqrt()
            } else {
                let s = det_sum_indexed(samples.len(), |i| samples[i].powf(p));
                (s * cell).powf(1.0 / p)
            }
        }
    }
}

/// Homogeneous Sobolev norm, integral route:
/// `(L^3 sum_m |xi_m|^{2s} |fhat_m|^2)^{1/2}` over nonzero modes.
pub fn sobolev_norm_integral(f: &NormOperand, s: f64) -> Result<f64> {
    if s <= 0.0 && f.mean_abs() > 1e-13 * (1.0 + f.l2_spectral()) {
        return Err(Error::NonZeroMean);
    }
    let comps: Vec<&SpectralField> = match f {
        NormOperand::Scalar(sf) => vec![sf],
        NormOperand::Vector(v) => v.components().iter().collect(),
    };
    let grid = *f.grid();
    let n = grid.n_per_dim();
    let mut total = 0.0;
    for comp in comps {
        let buf = comp.coeffs().as_slice().expect("layout");
        let sum = det_sum_indexed(buf.len(), |idx| {
            let i = idx / (n * n);
            let j = (idx / n) % n;
            let l = idx % n;
            let r = grid.xi_norm(i, j, l);
            if r == 0.0 {
                0.0
            } else {
                r.powf(2.0 * s) * buf[idx].norm_sqr()
            }
        });
        total += grid.volume() * sum;
    }
    Ok(total.sqrt())
}

/// Homogeneous Sobolev norm, dyadic-sum route:
/// `(sum_k 2^{2ks} ||block_k f||_2^2)^{1/2}` over the stored shell range.
pub fn sobolev_norm_lp_sum(profile: &LpProfile, f: &NormOperand, s: f64) -> Result<f64> {
    if s <= 0.0 && f.mean_abs() > 1e-13 * (1.0 + f.l2_spectral()) {
        return Err(Error::NonZeroMean);
    }
    let mut total = 0.0;
    for k in profile.stored_range() {
        let norm = match f {
            NormOperand::Scalar(sf) => profile.block(sf, k, BlockWidth::Standard).l2_norm(),
            NormOperand::Vector(v) => profile.block(v, k, BlockWidth::Standard).l2_norm(),
        };
        total += (2.0 * s * k as f64).exp2() * norm * norm;
    }
    Ok(total.sqrt())
}

/// Homogeneous Besov norm: the `l^q` aggregate over shells of
/// `2^{sk} ||block_k f||_{L^p}`.
pub fn besov_norm(profile: &LpProfile, f: &NormOperand, s: f64, p: Lp, q: Lp) -> Result<f64> {
    if f.mean_abs() > 1e-13 * (1.0 + f.l2_spectral()) {
        return Err(Error::NonZeroMean);
    }
    let mut weighted = Vec::new();
    for k in profile.stored_range() {
        let block: NormOperand = match f {
            NormOperand::Scalar(sf) => profile.block(sf, k, BlockWidth::Standard).into(),
            NormOperand::Vector(v) => profile.block(v, k, BlockWidth::Standard).into(),
        };
        let empty = match &block {
            NormOperand::Scalar(b) => b.max_abs_coeff() == 0.0,
            NormOperand::Vector(b) => b.max_abs_coeff() == 0.0,
        };
        if empty {
            continue;
        }
        let lp = lebesgue_norm(&block, p, 1);
        weighted.push((s * k as f64).exp2() * lp);
    }
    Ok(match q {
        Lp::Infinity => weighted.into_iter().fold(0.0, f64::max),
        Lp::Finite(q) => weighted
            .into_iter()
            .map(|w| w.powf(q))
            .sum::<f64>()
            .powf(1.0 / q),
    })
}

/// Combined gradient energy `int |grad u|^2 + |grad B|^2 dx`.
pub fn dirichlet_energy(u: &SpectralVectorField, b: &SpectralVectorField) -> Result<f64> {
    u.grid().check_same(b.grid())?;
    Ok(grad_inner(u, u)? + grad_inner(b, b)?)
}

/// Per-shell Bernstein ratios.
#[derive(Clone, Debug)]
pub struct BernsteinRecord {
    pub k: i32,
    /// `||grad block_k f||_2 / (2^k ||block_k f||_2)`; annulus support forces
    /// this into `[1/2, 2]`.
    pub ratio_low: f64,
    /// `||block_k f||_q / (2^{k(3/p - 3/q)} ||block_k f||_p)` per `(p, q)`.
    pub lp_lq: Vec<((f64, f64), f64)>,
}

#[derive(Clone, Debug)]
pub struct BernsteinReport {
    pub records: Vec<BernsteinRecord>,
}

/// The `(p, q)` pairs checked by the derivative-free Bernstein route.
pub const BERNSTEIN_PAIRS: [(f64, f64); 4] = [(2.0, f64::INFINITY), (2.0, 3.0), (3.0, 6.0), (2.0, 6.0)];

/// Empirical Bernstein inequality data for every nonempty shell.
pub fn bernstein_check(profile: &LpProfile, f: &NormOperand) -> Result<BernsteinReport> {
    let mut records = Vec::new();
    for k in profile.stored_range() {
        let block: NormOperand = match f {
            NormOperand::Scalar(sf) => profile.block(sf, k, BlockWidth::Standard).into(),
            NormOperand::Vector(v) => profile.block(v, k, BlockWidth::Standard).into(),
        };
        let l2 = match &block {
            NormOperand::Scalar(b) => b.l2_norm(),
            NormOperand::Vector(b) => b.l2_norm(),
        };
        if l2 == 0.0 {
            continue;
        }
        let grad_l2 = match &block {
            NormOperand::Scalar(b) => {
                let g = crate::ops::gradient(b);
                g.l2_norm()
            }
            NormOperand::Vector(b) => grad_inner(b, b)?.sqrt(),
        };
        let pow2k = (k as f64).exp2();
        let ratio_low = grad_l2 / (pow2k * l2);
        let mut lp_lq = Vec::new();
        for (p, q) in BERNSTEIN_PAIRS {
            let np = lebesgue_norm(&block, Lp::parse(p)?, 1);
            let nq = lebesgue_norm(&block, Lp::parse(q)?, 1);
            let weight = if q.is_finite() {
                (k as f64 * (3.0 / p - 3.0 / q)).exp2()
            } else {
                (k as f64 * (3.0 / p)).exp2()
            };
            lp_lq.push(((p, q), nq / (weight * np)));
        }
        records.push(BernsteinRecord { k, ratio_low, lp_lq });
    }
    if records.is_empty() {
        return Err(Error::ZeroField("no nonzero dyadic block"));
    }
    Ok(BernsteinReport { records })
}
