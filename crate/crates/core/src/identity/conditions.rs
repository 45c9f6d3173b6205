//! Per-shell condition sequences: the quantities whose boundedness along
//! `k -> -infinity` drives the triviality conclusions, evaluated over a
//! finite shell range in decreasing order so the low-frequency trend reads
//! off directly.

use crate::error::{Error, Result};
use crate::identity::bounds::{master_product, BoundFlavor};
use crate::identity::shell::{Fld, NormTag, Xf};
use crate::identity::IdentityLab;
use crate::norms::{besov_norm, Lp, NormOperand};

#[derive(Clone, Debug)]
pub struct ConditionRecord {
    pub k: i32,
    /// `2^{-k} (||lo_k u||_inf + ||lo_k B||_inf)`.
    pub cond_14: f64,
    /// `||lo_k u||_{B^{-1}_{inf,inf}} + ||lo_k B||_{B^{-1}_{inf,inf}}`.
    pub cond_15: f64,
    /// `||lo_k u||_{L^3}`.
    pub cond_16: f64,
    /// Master bound products at this shell, both flavors.
    pub master_linf: f64,
    pub master_l3: f64,
}

#[derive(Clone, Debug)]
pub struct ConditionSeries {
    /// Records in decreasing `k`.
    pub records: Vec<ConditionRecord>,
}

pub(super) fn liouville_conditions(
    lab: &mut IdentityLab<'_>,
    k_range: (i32, i32),
) -> Result<ConditionSeries> {
    use Fld::{B, U};
    let (k_min, k_max) = k_range;
    if k_min > k_max {
        return Err(Error::EmptyRange);
    }
    let mut records = Vec::new();
    for k in (k_min..=k_max).rev() {
        let cond_14 = {
            let ctx = &mut lab.ctx;
            let lu = ctx.factor_norm((U, Xf::Lo(k)), NormTag::Linf);
            let lb = ctx.factor_norm((B, Xf::Lo(k)), NormTag::Linf);
            (-k as f64).exp2() * (lu + lb)
        };
        let cond_15 = {
            let lo_u = lab.ctx.spectral((U, Xf::Lo(k)));
            let lo_b = lab.ctx.spectral((B, Xf::Lo(k)));
            besov_norm(
                lab.profile,
                &NormOperand::Vector(lo_u),
                -1.0,
                Lp::Infinity,
                Lp::Infinity,
            )? + besov_norm(
                lab.profile,
                &NormOperand::Vector(lo_b),
                -1.0,
                Lp::Infinity,
                Lp::Infinity,
            )?
        };
        let cond_16 = lab.ctx.factor_norm((U, Xf::Lo(k)), NormTag::L3);
        let master_linf = master_product(lab, k, BoundFlavor::Linf);
        let master_l3 = master_product(lab, k, BoundFlavor::L3);
        records.push(ConditionRecord {
            k,
            cond_14,
            cond_15,
            cond_16,
            master_linf,
            master_l3,
        });
    }
    Ok(ConditionSeries { records })
}
