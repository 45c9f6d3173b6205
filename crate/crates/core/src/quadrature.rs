//! Alias-free evaluation of quadratic and trilinear products.
//!
//! Products of band-limited fields are evaluated pointwise on an enlarged
//! grid chosen from the factors' actual per-coordinate mode bounds, so that
//! no aliased mode can land on a retained output mode (for products) or on
//! the zero mode (for integrals). Quadrature of a trig polynomial on an
//! `M^3` grid only aliases mode sums that are nonzero multiples of `M`;
//! with `M > sum of factor bounds` the integrals are exact up to rounding.

use ndarray::Array3;
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::fft3;
use crate::field::{SpectralField, SpectralVectorField};
use crate::grid::Grid;
use crate::ops::gradient;
use crate::util::det_sum_indexed;

/// Grid sizes with fast FFT factorizations (2^a * 3^b), ascending.
fn fast_sizes(limit: usize) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut p2 = 1usize;
    while p2 <= limit {
        let mut v = p2;
        while v <= limit {
            if v >= 4 && v % 2 == 0 {
                sizes.push(v);
            }
            v *= 3;
        }
        p2 *= 2;
    }
    sizes.sort_unstable();
    sizes
}

/// Smallest fast even size that resolves a product with per-coordinate mode
/// sum `sum_bound` while representing each factor (`max_bound` per axis).
pub(crate) fn pick_quad_size(sum_bound: usize, max_bound: usize, n_native: usize) -> Result<usize> {
    let need = (sum_bound + 1).max(2 * max_bound + 2).max(8);
    let cap = 2 * n_native;
    if need > cap {
        return Err(Error::PaddingOverflow {
            needed: need,
            available: cap,
        });
    }
    let sizes = fast_sizes(cap);
    sizes
        .into_iter()
        .find(|&m| m >= need)
        .ok_or(Error::PaddingOverflow {
            needed: need,
            available: cap,
        })
}

pub(crate) type Vec3Phys = [Array3<f64>; 3];
pub(crate) type GradPhys = [[Array3<f64>; 3]; 3];

pub(crate) fn vector_images(v: &SpectralVectorField, m: usize) -> Vec3Phys {
    v.physical_sized(m)
}

/// Physical images of `(grad v)_{i,j} = d_j v_i` on an `m^3` grid.
pub(crate) fn gradient_images(v: &SpectralVectorField, m: usize) -> GradPhys {
    let g = gradient_field(v);
    g.map(|row| row.map(|f| f.physical_sized(m)))
}

pub(crate) fn gradient_field(v: &SpectralVectorField) -> [[SpectralField; 3]; 3] {
    [0usize, 1, 2].map(|i| {
        let g = gradient(v.component(i));
        [0usize, 1, 2].map(|j| g.component(j).clone())
    })
}

/// Deterministic contraction `int sum_{i,j} a_j (d_j b_i) c_i dx` from
/// precomputed physical images sharing one `m^3` grid.
pub(crate) fn triple_integral_images(
    a: &Vec3Phys,
    grad_b: &GradPhys,
    c: &Vec3Phys,
    volume: f64,
) -> f64 {
    let len = a[0].len();
    let a_s: [&[f64]; 3] = [
        a[0].as_slice().unwrap(),
        a[1].as_slice().unwrap(),
        a[2].as_slice().unwrap(),
    ];
    let c_s: [&[f64]; 3] = [
        c[0].as_slice().unwrap(),
        c[1].as_slice().unwrap(),
        c[2].as_slice().unwrap(),
    ];
    let g_s: [[&[f64]; 3]; 3] = [
        [
            grad_b[0][0].as_slice().unwrap(),
            grad_b[0][1].as_slice().unwrap(),
            grad_b[0][2].as_slice().unwrap(),
        ],
        [
            grad_b[1][0].as_slice().unwrap(),
            grad_b[1][1].as_slice().unwrap(),
            grad_b[1][2].as_slice().unwrap(),
        ],
        [
            grad_b[2][0].as_slice().unwrap(),
            grad_b[2][1].as_slice().unwrap(),
            grad_b[2][2].as_slice().unwrap(),
        ],
    ];
    let s = det_sum_indexed(len, |x| {
        let mut acc = 0.0;
        for i in 0..3 {
            let ci = c_s[i][x];
            acc += (a_s[0][x] * g_s[i][0][x] + a_s[1][x] * g_s[i][1][x] + a_s[2][x] * g_s[i][2][x])
                * ci;
        }
        acc
    });
    s * volume / len as f64
}

/// `int (a . grad) b . c dx` for band-limited vector fields on one grid.
pub fn trilinear(
    a: &SpectralVectorField,
    b: &SpectralVectorField,
    c: &SpectralVectorField,
) -> Result<f64> {
    a.grid().check_same(b.grid())?;
    a.grid().check_same(c.grid())?;
    let (ba, bb, bc) = (a.mode_bound(), b.mode_bound(), c.mode_bound());
    if ba == 0 || bb == 0 || bc == 0 {
        // a zero factor (or constant b, whose gradient vanishes) integrates to 0
        if a.is_zero() || c.is_zero() || bb == 0 {
            return Ok(0.0);
        }
    }
    let m = pick_quad_size(ba + bb + bc, ba.max(bb).max(bc), a.grid().n_per_dim())?;
    let ai = vector_images(a, m);
    let gi = gradient_images(b, m);
    let ci = vector_images(c, m);
    Ok(triple_integral_images(&ai, &gi, &ci, a.grid().volume()))
}

/// Dealiased advection `(a . grad) b`, truncated back to the native lattice.
pub fn advect(a: &SpectralVectorField, b: &SpectralVectorField) -> Result<SpectralVectorField> {
    a.grid().check_same(b.grid())?;
    let grid = *a.grid();
    let n = grid.n_per_dim();
    let (ba, bb) = (a.mode_bound(), b.mode_bound());
    if ba == 0 || bb == 0 {
        return Ok(SpectralVectorField::zeros(grid));
    }
    // Retained modes reach n/2 - 1 per axis; aliases of product modes must
    // stay clear of them.
    let keep = n / 2 - 1;
    let m = pick_quad_size(ba + bb + keep, ba.max(bb), n)?;
    let ai = vector_images(a, m);
    let gi = gradient_images(b, m);
    let len = m * m * m;
    let mut comps = Vec::with_capacity(3);
    for i in 0..3 {
        let mut buf = vec![Complex64::default(); len];
        let a0 = ai[0].as_slice().unwrap();
        let a1 = ai[1].as_slice().unwrap();
        let a2 = ai[2].as_slice().unwrap();
        let g0 = gi[i][0].as_slice().unwrap();
        let g1 = gi[i][1].as_slice().unwrap();
        let g2 = gi[i][2].as_slice().unwrap();
        for x in 0..len {
            buf[x] = Complex64::new(a0[x] * g0[x] + a1[x] * g1[x] + a2[x] * g2[x], 0.0);
        }
        fft3(&mut buf, m, true);
        let scale = 1.0 / len as f64;
        // gather native modes from the enlarged spectrum
        let mut out = SpectralField::zeros(grid);
        for si in 0..n {
            let mi = grid.mode_of_index(si);
            if mi.unsigned_abs() as usize > keep {
                continue;
            }
            let ti = if mi >= 0 { mi as usize } else { (mi + m as i64) as usize };
            for sj in 0..n {
                let mj = grid.mode_of_index(sj);
                if mj.unsigned_abs() as usize > keep {
                    continue;
                }
                let tj = if mj >= 0 { mj as usize } else { (mj + m as i64) as usize };
                for sl in 0..n {
                    let ml = grid.mode_of_index(sl);
                    if ml.unsigned_abs() as usize > keep {
                        continue;
                    }
                    let tl = if ml >= 0 { ml as usize } else { (ml + m as i64) as usize };
                    out.coeffs_mut()[[si, sj, sl]] = buf[(ti * m + tj) * m + tl] * scale;
                }
            }
        }
        comps.push(out);
    }
    let mut result = SpectralVectorField::from_components(
        comps.try_into().map_err(|_| Error::ArityMismatch("three components")).unwrap(),
    )?;
    result.sanitize();
    Ok(result)
}

/// Full spectrum of the pointwise product `f * g` on an enlarged grid able
/// to represent it exactly. Returns the product field on its own grid.
pub fn product_spectrum(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    f.grid().check_same(g.grid())?;
    let grid = *f.grid();
    let (bf, bg) = (f.mode_bound(), g.mode_bound());
    let m = pick_quad_size(2 * (bf + bg), bf.max(bg), grid.n_per_dim())?;
    let pf = f.physical_sized(m);
    let pg = g.physical_sized(m);
    let len = m * m * m;
    let mut buf: Vec<Complex64> = pf
        .as_slice()
        .unwrap()
        .iter()
        .zip(pg.as_slice().unwrap())
        .map(|(&x, &y)| Complex64::new(x * y, 0.0))
        .collect();
    fft3(&mut buf, m, true);
    let scale = 1.0 / len as f64;
    for c in buf.iter_mut() {
        *c *= scale;
    }
    let padded = Grid::new(m, grid.box_length())?;
    SpectralField::from_coeffs(padded, Array3::from_shape_vec([m, m, m], buf).expect("shape"))
}

/// Smallest and largest `|xi|` carrying coefficients above `threshold`.
pub fn spectral_support(f: &SpectralField, threshold: f64) -> Option<(f64, f64)> {
    let grid = *f.grid();
    let n = grid.n_per_dim();
    let buf = f.coeffs().as_slice().expect("layout");
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut any = false;
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                if buf[(i * n + j) * n + l].norm() > threshold {
                    let r = grid.xi_norm(i, j, l);
                    lo = lo.min(r);
                    hi = hi.max(r);
                    any = true;
                }
            }
        }
    }
    if any {
        Some((lo, hi))
    } else {
        None
    }
}
