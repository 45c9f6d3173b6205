//! Frequency-localized energy identities and bound ladders for stationary
//! MHD field pairs.
//!
//! Everything here works with an arbitrary divergence-free mean-zero pair
//! `(u, B)`: substituting the pair into the stationary equations leaves
//! residual forcings `(r_u, r_B)`, and pairing those against the high-pass
//! parts turns the solution-only energy identities into checkable statements
//! for any pair. When the residuals vanish, the identities reduce to the
//! solution form.
//!
//! All tolerances are relative to `scale = (1 + ||grad u||_2 + ||grad B||_2)^3`,
//! an upper envelope for every trilinear term in the ladder.

mod bounds;
mod conditions;
mod residual;
mod shell;
mod support;
mod terms;

pub use bounds::{BoundFlavor, BoundReport, JTermRecord};
pub use conditions::{ConditionRecord, ConditionSeries};
pub use residual::MhdResidual;
pub use support::{paraproduct_support_check, SupportCheck};
pub use terms::{IdentityReport, ITermReport, SidePair, TransportReport};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::SpectralVectorField;
use crate::lp::LpProfile;
use crate::norms::dirichlet_energy;

/// Divergence tolerance gating identity-lab inputs.
pub const DIVERGENCE_GATE: f64 = 1e-8;

/// Normalization envelope for relative tolerances in the identity ladder.
pub fn tolerance_scale(u: &SpectralVectorField, b: &SpectralVectorField) -> Result<f64> {
    let d = dirichlet_energy(u, b)?;
    // (1 + ||grad u|| + ||grad B||)^3 >= (1 + sqrt(D))^3
    let gu = crate::ops::grad_inner(u, u)?.sqrt();
    let gb = crate::ops::grad_inner(b, b)?.sqrt();
    let _ = d;
    Ok((1.0 + gu + gb).powi(3))
}

/// Shared computation context for one `(u, B)` pair: residuals plus cached
/// physical images of the frequency-localized factors.
///
/// Methods take `&mut self` because of the internal cache; distinct instances
/// are independent and may run on separate threads.
pub struct IdentityLab<'a> {
    profile: &'a LpProfile,
    u: &'a SpectralVectorField,
    b: &'a SpectralVectorField,
    residual: MhdResidual,
    scale: f64,
    ctx: shell::PairContext<'a>,
}

impl<'a> IdentityLab<'a> {
    pub fn new(
        profile: &'a LpProfile,
        u: &'a SpectralVectorField,
        b: &'a SpectralVectorField,
    ) -> Result<Self> {
        profile.grid().check_same(u.grid())?;
        profile.grid().check_same(b.grid())?;
        for (name, f) in [("u", u), ("B", b)] {
            let div = f.divergence_ratio();
            if div > DIVERGENCE_GATE {
                let _ = name;
                return Err(Error::NotDivergenceFree(div));
            }
            if f.max_mean() > 1e-10 * (1.0 + f.l2_norm()) {
                return Err(Error::NonZeroMean);
            }
        }
        let residual = residual::mhd_residual(u, b)?;
        let scale = tolerance_scale(u, b)?;
        let ctx = shell::PairContext::new(profile, u, b);
        Ok(IdentityLab {
            profile,
            u,
            b,
            residual,
            scale,
            ctx,
        })
    }

    pub fn profile(&self) -> &LpProfile {
        self.profile
    }

    pub fn u(&self) -> &SpectralVectorField {
        self.u
    }

    pub fn b(&self) -> &SpectralVectorField {
        self.b
    }

    pub fn residual(&self) -> &MhdResidual {
        &self.residual
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn dirichlet(&self) -> Result<f64> {
        dirichlet_energy(self.u, self.b)
    }

    fn check_in_range(&self, k: i32) -> Result<()> {
        if !self.profile.usable_range().contains(&k) {
            return Err(Error::ShellOutOfRange {
                k,
                k_min: self.profile.k_min(),
                k_max: self.profile.k_max(),
            });
        }
        Ok(())
    }

    /// The transport rewrites for one shell.
    pub fn transport_identities(&mut self, k: i32) -> Result<TransportReport> {
        terms::transport_identities(self, k)
    }

    /// The localized term ladder with its split pieces.
    pub fn i_terms(&mut self, k: i32) -> Result<ITermReport> {
        self.check_in_range(k)?;
        terms::compute_i_terms(self, k)
    }

    /// The residual-generalized shell energy identity.
    pub fn energy_identity(&mut self, k: i32) -> Result<IdentityReport> {
        terms::energy_identity(self, k)
    }

    /// The bound ladder in either flavor.
    pub fn j_bounds(&mut self, k: i32, flavor: BoundFlavor) -> Result<BoundReport> {
        self.check_in_range(k)?;
        bounds::compute_j_bounds(self, k, flavor)
    }

    /// Condition sequences over a dyadic range, reported in decreasing `k`.
    pub fn liouville_conditions(&mut self, k_range: (i32, i32)) -> Result<ConditionSeries> {
        conditions::liouville_conditions(self, k_range)
    }
}

/// One-shot convenience wrappers matching the operation table.
pub fn mhd_residual(
    u: &SpectralVectorField,
    b: &SpectralVectorField,
) -> Result<MhdResidual> {
    residual::mhd_residual(u, b)
}

pub fn transport_identities(
    profile: &LpProfile,
    u: &SpectralVectorField,
    b: &SpectralVectorField,
    k: i32,
) -> Result<TransportReport> {
    IdentityLab::new(profile, u, b)?.transport_identities(k)
}

pub fn compute_i_terms(
    profile: &LpProfile,
    u: &SpectralVectorField,
    b: &SpectralVectorField,
    k: i32,
) -> Result<ITermReport> {
    IdentityLab::new(profile, u, b)?.i_terms(k)
}

pub fn energy_identity(
    profile: &LpProfile,
    u: &SpectralVectorField,
    b: &SpectralVectorField,
    k: i32,
) -> Result<IdentityReport> {
    IdentityLab::new(profile, u, b)?.energy_identity(k)
}

pub fn compute_j_bounds(
    profile: &LpProfile,
    u: &SpectralVectorField,
    b: &SpectralVectorField,
    k: i32,
    flavor: BoundFlavor,
) -> Result<BoundReport> {
    IdentityLab::new(profile, u, b)?.j_bounds(k, flavor)
}

pub fn liouville_conditions(
    profile: &LpProfile,
    u: &SpectralVectorField,
    b: &SpectralVectorField,
    k_range: (i32, i32),
) -> Result<ConditionSeries> {
    IdentityLab::new(profile, u, b)?.liouville_conditions(k_range)
}

pub(crate) fn map_of(entries: &[(&str, f64)]) -> BTreeMap<String, f64> {
    entries
        .iter()
        .map(|(k, v)| (k.to_string(), *v))
        .collect()
}
