//! Spectral differential calculus, Leray projection and L2 pairings.
//!
//! Differentiation is exact on band-limited fields: gradients multiply by
//! `i xi_m` componentwise and the Laplacian by `-|xi_m|^2`. The gradient
//! matrix convention is `(grad u)_{i,j} = d_j u_i`.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{SpectralField, SpectralVectorField};
use crate::util::det_sum_indexed;

/// Scalar-or-vector operand for the dynamically typed operation surface.
#[derive(Clone, Debug)]
pub enum FieldValue {
    Scalar(SpectralField),
    Vector(SpectralVectorField),
}

/// Differential operators exposed on the dynamic surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiffOp {
    Gradient,
    Divergence,
    Curl,
    Laplacian,
}

pub fn gradient(f: &SpectralField) -> SpectralVectorField {
    let comps = [0usize, 1, 2].map(|axis| {
        f.map_modes(|_, xi, c| Complex64::new(0.0, xi[axis]) * c)
    });
    SpectralVectorField::from_components(comps).expect("same grid")
}

pub fn divergence(v: &SpectralVectorField) -> SpectralField {
    let mut acc = SpectralField::zeros(*v.grid());
    for axis in 0..3 {
        let d = v
            .component(axis)
            .map_modes(|_, xi, c| Complex64::new(0.0, xi[axis]) * c);
        acc = acc.add(&d).expect("same grid");
    }
    acc
}

pub fn curl(v: &SpectralVectorField) -> SpectralVectorField {
    let part = |a: usize, b: usize| -> SpectralField {
        // d_a v_b - d_b v_a
        let first = v
            .component(b)
            .map_modes(|_, xi, c| Complex64::new(0.0, xi[a]) * c);
        let second = v
            .component(a)
            .map_modes(|_, xi, c| Complex64::new(0.0, xi[b]) * c);
        first.sub(&second).expect("same grid")
    };
    SpectralVectorField::from_components([part(1, 2), part(2, 0), part(0, 1)]).expect("same grid")
}

pub fn laplacian_scalar(f: &SpectralField) -> SpectralField {
    f.map_modes(|_, xi, c| {
        let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        c * (-k2)
    })
}

pub fn laplacian_vector(v: &SpectralVectorField) -> SpectralVectorField {
    v.map(laplacian_scalar)
}

/// Dynamically typed entry point matching the operation table; checks arity.
pub fn apply_differential(value: &FieldValue, op: DiffOp) -> Result<FieldValue> {
    match (op, value) {
        (DiffOp::Gradient, FieldValue::Scalar(f)) => Ok(FieldValue::Vector(gradient(f))),
        (DiffOp::Gradient, FieldValue::Vector(_)) => {
            Err(Error::ArityMismatch("gradient expects a scalar field"))
        }
        (DiffOp::Divergence, FieldValue::Vector(v)) => Ok(FieldValue::Scalar(divergence(v))),
        (DiffOp::Divergence, FieldValue::Scalar(_)) => {
            Err(Error::ArityMismatch("divergence expects a vector field"))
        }
        (DiffOp::Curl, FieldValue::Vector(v)) => Ok(FieldValue::Vector(curl(v))),
        (DiffOp::Curl, FieldValue::Scalar(_)) => {
            Err(Error::ArityMismatch("curl expects a vector field"))
        }
        (DiffOp::Laplacian, FieldValue::Scalar(f)) => Ok(FieldValue::Scalar(laplacian_scalar(f))),
        (DiffOp::Laplacian, FieldValue::Vector(v)) => Ok(FieldValue::Vector(laplacian_vector(v))),
    }
}

/// Orthogonal projection onto divergence-free fields,
/// `vhat - xi (xi . vhat) / |xi|^2`, with the zero mode passed through.
pub fn leray_project(v: &SpectralVectorField) -> SpectralVectorField {
    let grid = *v.grid();
    let n = grid.n_per_dim();
    let fs = grid.freq_spacing();
    let mut out = SpectralVectorField::zeros(grid);
    for i in 0..n {
        let xi0 = fs * grid.mode_of_index(i) as f64;
        for j in 0..n {
            let xi1 = fs * grid.mode_of_index(j) as f64;
            for l in 0..n {
                let xi2 = fs * grid.mode_of_index(l) as f64;
                let k2 = xi0 * xi0 + xi1 * xi1 + xi2 * xi2;
                let c = [
                    v.component(0).coeffs()[[i, j, l]],
                    v.component(1).coeffs()[[i, j, l]],
                    v.component(2).coeffs()[[i, j, l]],
                ];
                let proj = if k2 == 0.0 {
                    c
                } else {
                    let dot = (xi0 * c[0] + xi1 * c[1] + xi2 * c[2]) / k2;
                    [c[0] - xi0 * dot, c[1] - xi1 * dot, c[2] - xi2 * dot]
                };
                for (axis, val) in proj.into_iter().enumerate() {
                    out.components_mut()[axis].coeffs_mut()[[i, j, l]] = val;
                }
            }
        }
    }
    out
}

/// `int f g dx = L^3 sum_m fhat_m conj(ghat_m)` for real fields.
pub fn inner_scalar(f: &SpectralField, g: &SpectralField) -> Result<f64> {
    f.grid().check_same(g.grid())?;
    let a = f.coeffs().as_slice().expect("layout");
    let b = g.coeffs().as_slice().expect("layout");
    let s = det_sum_indexed(a.len(), |i| (a[i] * b[i].conj()).re);
    Ok(f.grid().volume() * s)
}

/// `int u . v dx` for vector fields.
pub fn inner_vector(u: &SpectralVectorField, v: &SpectralVectorField) -> Result<f64> {
    let mut acc = 0.0;
    for axis in 0..3 {
        acc += inner_scalar(u.component(axis), v.component(axis))?;
    }
    Ok(acc)
}

/// Frobenius pairing of gradients `int grad u : grad v dx =
/// L^3 sum_m |xi_m|^2 uhat . conj(vhat)`.
pub fn grad_inner(u: &SpectralVectorField, v: &SpectralVectorField) -> Result<f64> {
    u.grid().check_same(v.grid())?;
    let grid = *u.grid();
    let n = grid.n_per_dim();
    let fs = grid.freq_spacing();
    let mut total = 0.0;
    for axis in 0..3 {
        let a = u.component(axis).coeffs().as_slice().expect("layout");
        let b = v.component(axis).coeffs().as_slice().expect("layout");
        let s = det_sum_indexed(a.len(), |idx| {
            let i = idx / (n * n);
            let j = (idx / n) % n;
            let l = idx % n;
            let xi0 = fs * grid.mode_of_index(i) as f64;
            let xi1 = fs * grid.mode_of_index(j) as f64;
            let xi2 = fs * grid.mode_of_index(l) as f64;
            (xi0 * xi0 + xi1 * xi1 + xi2 * xi2) * (a[idx] * b[idx].conj()).re
        });
        total += grid.volume() * s;
    }
    Ok(total)
}

/// Dynamic pairing used by the CLI: scalar.scalar or vector.vector.
pub fn inner_product(a: &FieldValue, b: &FieldValue) -> Result<f64> {
    match (a, b) {
        (FieldValue::Scalar(f), FieldValue::Scalar(g)) => inner_scalar(f, g),
        (FieldValue::Vector(u), FieldValue::Vector(v)) => inner_vector(u, v),
        _ => Err(Error::ArityMismatch(
            "inner product needs operands of equal arity",
        )),
    }
}
