//! Manufactured forcing of a field pair under the stationary MHD operator.
//!
//! For arbitrary divergence-free mean-zero `(u, B)`,
//!
//! ```text
//! r_u = -lap u + P(u.grad u - B.grad B)
//! r_B = -lap B + u.grad B - B.grad u
//! ```
//!
//! with `P` the Leray projector, and the pressure recovered from
//! `-lap P = div(u.grad u - B.grad B)` with zero mean. The nonlinear terms
//! are dealiased and truncated to the native lattice, which leaves every
//! pairing with a band-limited test field unchanged.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{SpectralField, SpectralVectorField};
use crate::identity::DIVERGENCE_GATE;
use crate::ops::{laplacian_vector, leray_project};
use crate::quadrature::advect;

/// Residual forcings and the recovered pressure.
#[derive(Clone, Debug)]
pub struct MhdResidual {
    pub r_u: SpectralVectorField,
    pub r_b: SpectralVectorField,
    pub pressure: SpectralField,
}

pub fn mhd_residual(
    u: &SpectralVectorField,
    b: &SpectralVectorField,
) -> Result<MhdResidual> {
    u.grid().check_same(b.grid())?;
    for f in [u, b] {
        let div = f.divergence_ratio();
        if div > DIVERGENCE_GATE {
            return Err(Error::NotDivergenceFree(div));
        }
        if f.max_mean() > 1e-10 * (1.0 + f.l2_norm()) {
            return Err(Error::NonZeroMean);
        }
    }
    let adv_uu = advect(u, u)?;
    let adv_bb = advect(b, b)?;
    let adv_ub = advect(u, b)?;
    let adv_bu = advect(b, u)?;

    // momentum forcing F = u.grad u - B.grad B
    let force = adv_uu.sub(&adv_bb)?;

    // pressure: |xi|^2 Phat = i xi . Fhat, zero mean
    let grid = *u.grid();
    let n = grid.n_per_dim();
    let fs = grid.freq_spacing();
    let mut pressure = SpectralField::zeros(grid);
    for i in 0..n {
        let xi0 = fs * grid.mode_of_index(i) as f64;
        for j in 0..n {
            let xi1 = fs * grid.mode_of_index(j) as f64;
            for l in 0..n {
                let xi2 = fs * grid.mode_of_index(l) as f64;
                let k2 = xi0 * xi0 + xi1 * xi1 + xi2 * xi2;
                if k2 == 0.0 {
                    continue;
                }
                let dot = Complex64::new(0.0, xi0) * force.component(0).coeffs()[[i, j, l]]
                    + Complex64::new(0.0, xi1) * force.component(1).coeffs()[[i, j, l]]
                    + Complex64::new(0.0, xi2) * force.component(2).coeffs()[[i, j, l]];
                pressure.coeffs_mut()[[i, j, l]] = dot / k2;
            }
        }
    }

    let neg_lap_u = laplacian_vector(u).scaled(-1.0);
    let neg_lap_b = laplacian_vector(b).scaled(-1.0);
    let r_u = neg_lap_u.add(&leray_project(&force))?;
    let r_b = neg_lap_b.add(&adv_ub)?.sub(&adv_bu)?;

    Ok(MhdResidual { r_u, r_b, pressure })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_divfree, SpectrumKind, SpectrumSpec};
    use crate::grid::Grid;
    use crate::lp::LpProfile;
    use crate::ops::{grad_inner, inner_vector, leray_project};
    use crate::quadrature::trilinear;
    use std::f64::consts::PI;

    fn pair(grid: Grid, p: &LpProfile, s1: u64, s2: u64) -> (SpectralVectorField, SpectralVectorField) {
        let mk = |seed| {
            random_divfree(
                grid,
                p,
                &SpectrumSpec {
                    kind: SpectrumKind::PowerLaw { alpha: 1.5 },
                    band: (p.k_min(), p.k_max()),
                    seed,
                },
            )
            .unwrap()
        };
        (mk(s1), mk(s2))
    }

    #[test]
    fn alfvenic_pair_cancels_induction_nonlinearity() {
        let grid = Grid::new(16, 2.0 * PI).unwrap();
        let p = LpProfile::build(grid).unwrap();
        let (u, _) = pair(grid, &p, 3, 4);
        let b = u.clone();
        let res = mhd_residual(&u, &b).unwrap();
        // u = B: u.grad B - B.grad u = 0, so r_B = -lap B exactly
        let want = laplacian_vector(&b).scaled(-1.0);
        let diff = res.r_b.sub(&want).unwrap();
        assert!(diff.max_abs_coeff() <= 1e-12 * want.max_abs_coeff());
    }

    #[test]
    fn zero_pair_has_zero_residual() {
        let grid = Grid::new(8, 2.0 * PI).unwrap();
        let zero = SpectralVectorField::zeros(grid);
        let res = mhd_residual(&zero, &zero).unwrap();
        assert_eq!(res.r_u.max_abs_coeff(), 0.0);
        assert_eq!(res.r_b.max_abs_coeff(), 0.0);
        assert_eq!(res.pressure.max_abs_coeff(), 0.0);
    }

    #[test]
    fn matches_weak_form_for_random_test_fields() {
        let grid = Grid::new(16, 4.0 * PI).unwrap();
        let p = LpProfile::build(grid).unwrap();
        let (u, b) = pair(grid, &p, 7, 8);
        let res = mhd_residual(&u, &b).unwrap();
        assert!(res.r_u.divergence_ratio() <= 1e-12);
        // weak-form oracle over random divergence-free test fields:
        // <r_u, phi> = int grad u : grad phi + int u.grad u . phi - int B.grad B . phi
        // <r_B, phi> = int grad B : grad phi + int u.grad B . phi - int B.grad u . phi
        for seed in 100..120 {
            let phi = random_divfree(
                grid,
                &p,
                &SpectrumSpec {
                    kind: SpectrumKind::PowerLaw { alpha: 1.0 },
                    band: (p.k_min(), p.k_max()),
                    seed,
                },
            )
            .unwrap();
            let lhs_u = inner_vector(&res.r_u, &phi).unwrap();
            let rhs_u = grad_inner(&u, &phi).unwrap() + trilinear(&u, &u, &phi).unwrap()
                - trilinear(&b, &b, &phi).unwrap();
            let scale = lhs_u.abs().max(rhs_u.abs()).max(1e-30);
            assert!(
                (lhs_u - rhs_u).abs() <= 1e-10 * scale,
                "weak form (u) seed {seed}: {lhs_u} vs {rhs_u}"
            );
            let lhs_b = inner_vector(&res.r_b, &phi).unwrap();
            let rhs_b = grad_inner(&b, &phi).unwrap() + trilinear(&u, &b, &phi).unwrap()
                - trilinear(&b, &u, &phi).unwrap();
            let scale_b = lhs_b.abs().max(rhs_b.abs()).max(1e-30);
            assert!(
                (lhs_b - rhs_b).abs() <= 1e-10 * scale_b,
                "weak form (B) seed {seed}: {lhs_b} vs {rhs_b}"
            );
        }
    }

    #[test]
    fn pressure_solves_its_poisson_equation() {
        let grid = Grid::new(16, 2.0 * PI).unwrap();
        let p = LpProfile::build(grid).unwrap();
        let (u, b) = pair(grid, &p, 10, 11);
        let res = mhd_residual(&u, &b).unwrap();
        // -lap P = div(u.grad u - B.grad B), equivalently
        // grad P = -(I - P_leray)(F)
        let force = advect(&u, &u).unwrap().sub(&advect(&b, &b).unwrap()).unwrap();
        let complement = force.sub(&leray_project(&force)).unwrap();
        let grad_p = crate::ops::gradient(&res.pressure);
        let diff = grad_p.add(&complement).unwrap();
        assert!(diff.max_abs_coeff() <= 1e-12 * force.max_abs_coeff().max(1e-300));
    }

    #[test]
    fn rejects_divergent_input() {
        let grid = Grid::new(8, 2.0 * PI).unwrap();
        // gradient field: maximally non-divergence-free
        let s = crate::testutil::cosine_axis(grid, 1);
        let g = crate::ops::gradient(&s);
        assert!(mhd_residual(&g, &SpectralVectorField::zeros(grid)).is_err());
    }
}
