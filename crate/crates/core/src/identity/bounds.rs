//! Bound ladders: each localized term against its structural envelope, with
//! the constant set to 1 so the reported ratio is the raw empirical constant.
//!
//! Two flavors: `Linf` pairs a sup-norm cutoff against gradient energies,
//! `L3` trades the sup norm for the cutoff's cubic norm via embedding-type
//! groupings. The master product combines the flavor's cutoff norms with its
//! gradient-energy bracket; the measured high-pass gradient energy is
//! reported alongside for share comparisons.

use crate::error::Result;
use crate::identity::shell::{Fld, NormTag, Xf};
use crate::identity::terms::{localized_band_sum, localized_block_sum, resonant_sum, tail_split};
use crate::identity::IdentityLab;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundFlavor {
    Linf,
    L3,
}

impl BoundFlavor {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundFlavor::Linf => "linf",
            BoundFlavor::L3 => "l3",
        }
    }
}

/// One ladder rung: the localized term magnitude, its envelope, and their
/// ratio (absent for the 0/0 case).
#[derive(Clone, Debug)]
pub struct JTermRecord {
    pub name: String,
    pub lhs: f64,
    pub envelope: f64,
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct BoundReport {
    pub k: i32,
    pub flavor: BoundFlavor,
    pub terms: Vec<JTermRecord>,
    /// Dirichlet energy of the pair.
    pub dirichlet: f64,
    /// The flavor's master right-hand product at this shell.
    pub master_product: f64,
    /// Measured `int |grad hp_u|^2 + |grad hp_B|^2` at this shell.
    pub highpass_energy: f64,
    pub scale: f64,
}

/// The eight localized ladder values at one shell.
pub(super) fn j_values(lab: &mut IdentityLab<'_>, k: i32) -> [f64; 8] {
    use Fld::{B, U};
    let k_hi = *lab.profile.stored_range().end();
    let l_top = tail_split(k).min(k_hi);
    let ctx = &mut lab.ctx;
    fn loc(
        ctx: &mut crate::identity::shell::PairContext<'_>,
        k: i32,
        a: Fld,
        g: Fld,
        c: Fld,
    ) -> f64 {
        localized_band_sum(ctx, k, a, g, c) + localized_block_sum(ctx, k, a, g, c)
    }
    let j1 = -loc(ctx, k, U, U, U);
    let j2 = -loc(ctx, k, U, B, B);
    let j3 = loc(ctx, k, B, B, U);
    let j4 = loc(ctx, k, B, U, B);
    let j5 = -resonant_sum(ctx, k, (k - 1, l_top), U, U, U).0;
    let j6 = -resonant_sum(ctx, k, (k - 1, l_top), U, B, B).0;
    let j7 = resonant_sum(ctx, k, (k - 1, l_top), B, B, U).0;
    let j8 = resonant_sum(ctx, k, (k - 1, l_top), B, U, B).0;
    [j1, j2, j3, j4, j5, j6, j7, j8]
}

pub(super) fn master_product(lab: &mut IdentityLab<'_>, k: i32, flavor: BoundFlavor) -> f64 {
    use Fld::{B, U};
    let l_star = tail_split(k);
    let ctx = &mut lab.ctx;
    match flavor {
        BoundFlavor::Linf => {
            let lu = ctx.factor_norm((U, Xf::Lo(k)), NormTag::Linf);
            let lb = ctx.factor_norm((B, Xf::Lo(k)), NormTag::Linf);
            let gu = ctx.factor_norm((U, Xf::Lo(l_star + 3)), NormTag::GradL2Sq);
            let gb = ctx.factor_norm((B, Xf::Lo(l_star + 3)), NormTag::GradL2Sq);
            (-k as f64).exp2() * (lu + lb) * (gu + gb)
        }
        BoundFlavor::L3 => {
            let nu_k = ctx.factor_norm((U, Xf::Lo(k)), NormTag::L3);
            let nu_1 = ctx.factor_norm((U, Xf::Lo(l_star + 1)), NormTag::L3);
            let nu_3 = ctx.factor_norm((U, Xf::Lo(l_star + 3)), NormTag::L3);
            let bracket = ctx.factor_norm((U, Xf::Lo(k)), NormTag::GradL2Sq)
                + ctx.factor_norm((U, Xf::Lo(k + 3)), NormTag::GradL2Sq)
                + ctx.factor_norm((B, Xf::Lo(k)), NormTag::GradL2Sq)
                + ctx.factor_norm((B, Xf::Lo(k + 3)), NormTag::GradL2Sq)
                + ctx.factor_norm((U, Xf::Lo(l_star + 1)), NormTag::GradL2Sq)
                + ctx.factor_norm((B, Xf::Lo(l_star + 1)), NormTag::GradL2Sq)
                + ctx.factor_norm((B, Xf::Lo(l_star + 3)), NormTag::GradL2Sq);
            (nu_k + nu_1 + nu_3) * bracket
        }
    }
}

pub(super) fn compute_j_bounds(
    lab: &mut IdentityLab<'_>,
    k: i32,
    flavor: BoundFlavor,
) -> Result<BoundReport> {
    use Fld::{B, U};
    let j = j_values(lab, k);
    let l_star = tail_split(k);

    let envelopes: [f64; 8] = {
        let ctx = &mut lab.ctx;
        match flavor {
            BoundFlavor::Linf => {
                let pw = (-k as f64).exp2();
                let lu = ctx.factor_norm((U, Xf::Lo(k)), NormTag::Linf);
                let lb = ctx.factor_norm((B, Xf::Lo(k)), NormTag::Linf);
                let gu3 = ctx.factor_norm((U, Xf::Lo(k + 3)), NormTag::GradL2Sq);
                let gb3 = ctx.factor_norm((B, Xf::Lo(k + 3)), NormTag::GradL2Sq);
                let gus = ctx.factor_norm((U, Xf::Lo(l_star + 3)), NormTag::GradL2Sq);
                let gbs = ctx.factor_norm((B, Xf::Lo(l_star + 3)), NormTag::GradL2Sq);
                [
                    pw * lu * gu3,
                    pw * (lu + lb) * (gb3 + gu3),
                    pw * lb * (gb3 + gu3),
                    pw * (lu + lb) * (gb3 + gu3),
                    pw * lu * gus,
                    pw * lb * (gus + gbs),
                    pw * lb * (gus + gbs),
                    pw * lu * gbs,
                ]
            }
            BoundFlavor::L3 => {
                let nu_k = ctx.factor_norm((U, Xf::Lo(k)), NormTag::L3);
                let nu_k3 = ctx.factor_norm((U, Xf::Lo(k + 3)), NormTag::L3);
                let nu_s1 = ctx.factor_norm((U, Xf::Lo(l_star + 1)), NormTag::L3);
                let nu_s3 = ctx.factor_norm((U, Xf::Lo(l_star + 3)), NormTag::L3);
                let guk = ctx.factor_norm((U, Xf::Lo(k)), NormTag::GradL2Sq);
                let gu3 = ctx.factor_norm((U, Xf::Lo(k + 3)), NormTag::GradL2Sq);
                let gbk = ctx.factor_norm((B, Xf::Lo(k)), NormTag::GradL2Sq);
                let gb3 = ctx.factor_norm((B, Xf::Lo(k + 3)), NormTag::GradL2Sq);
                let gus3 = ctx.factor_norm((U, Xf::Lo(l_star + 3)), NormTag::GradL2Sq);
                let gbs1 = ctx.factor_norm((B, Xf::Lo(l_star + 1)), NormTag::GradL2Sq);
                let gbs3 = ctx.factor_norm((B, Xf::Lo(l_star + 3)), NormTag::GradL2Sq);
                [
                    nu_k * (guk + gu3),
                    nu_k * (gbk + gb3),
                    nu_k3 * (gbk + gb3),
                    nu_k * (gbk + gb3),
                    nu_k * gus3,
                    nu_s3 * (gbk + gbs1),
                    nu_s1 * (gbk + gbs3),
                    nu_k * (gbs1 + gbs3),
                ]
            }
        }
    };

    let terms = (0..8)
        .map(|i| {
            let lhs = j[i].abs();
            let envelope = envelopes[i];
            let ratio = (envelope > 0.0).then(|| lhs / envelope);
            JTermRecord {
                name: format!("J{}", i + 1),
                lhs,
                envelope,
                ratio,
            }
        })
        .collect();

    let master = master_product(lab, k, flavor);
    let highpass_energy = lab.ctx.factor_norm((U, Xf::Hp(k)), NormTag::GradL2Sq)
        + lab.ctx.factor_norm((B, Xf::Hp(k)), NormTag::GradL2Sq);
    Ok(BoundReport {
        k,
        flavor,
        terms,
        dirichlet: lab.dirichlet()?,
        master_product: master,
        highpass_energy,
        scale: lab.scale,
    })
}
