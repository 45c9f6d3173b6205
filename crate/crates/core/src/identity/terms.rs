//! The localized term ladder: transport rewrites, paraproduct pieces of the
//! shell transport terms, and the residual-generalized energy identity.
//!
//! Conventions. For a shell index `k` write `lo = cutoff_k f`, `hp = f - lo`.
//! The eight structural integrals are
//!
//! ```text
//! E1 = int lo_u . grad lo_u . hp_u      E5 = int lo_B . grad lo_B . hp_u
//! E2 = int hp_u . grad lo_u . hp_u      E6 = int hp_B . grad lo_B . hp_u
//! E3 = int lo_u . grad lo_B . hp_B      E7 = int lo_B . grad lo_u . hp_B
//! E4 = int hp_u . grad lo_B . hp_B      E8 = int hp_B . grad lo_u . hp_B
//! ```
//!
//! and the ladder terms are `I1..I4 = -E1..-E4`, `I5..I8 = +E5..+E8`, so that
//! their sum tends to the Dirichlet energy as the shell index decreases. The
//! split pieces `I11, I12, I13` (and `I21, I22, I231, I232`) carry the sign
//! of their parent term, i.e. `I1 = I11 + I12 + I13` holds as written.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::identity::shell::{Factor, Fld, NormTag, PairContext, Xf};
use crate::identity::{map_of, IdentityLab};
use crate::ops::{grad_inner, inner_vector};

/// Both sides of one verified identity.
#[derive(Clone, Copy, Debug)]
pub struct SidePair {
    pub lhs: f64,
    pub rhs: f64,
}

impl SidePair {
    pub fn gap(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// Transport rewrites of the three advective pairings at one shell.
#[derive(Clone, Debug)]
pub struct TransportReport {
    pub k: i32,
    /// `-int u.grad u.hp_u` against its two-term localization.
    pub eq_velocity: SidePair,
    /// `-int u.grad B.hp_B` against its two-term localization.
    pub eq_mixed: SidePair,
    /// `int B.grad B.hp_u + int B.grad u.hp_B` against the four-term form.
    pub eq_magnetic: SidePair,
    pub scale: f64,
}

/// The term ladder with paraproduct pieces and the tail split.
#[derive(Clone, Debug)]
pub struct ITermReport {
    pub k: i32,
    /// `I1..I8`, the pieces `I11, I12, I13, I21, I22, I23, I231, I232`,
    /// and the localized reconstructions `recon_i1`, `recon_i2`.
    pub terms: BTreeMap<String, f64>,
    /// Left sides of the three transport rewrites.
    pub lhs_transport: BTreeMap<String, f64>,
    /// Tail split point exponent (fixed 3/4).
    pub theta: f64,
    /// Structural tail envelope `||grad lo_k u||_2 ||grad u||_2^2`
    /// (the `2^{(3/2 - 2 theta) k}` prefactor is 1 at `theta = 3/4`).
    pub i232_envelope: f64,
    /// `|I232| / envelope` when the envelope is nonzero.
    pub i232_ratio: Option<f64>,
    pub scale: f64,
}

/// The residual-generalized shell energy identity.
#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub k: i32,
    /// `int |grad hp_u|^2 + |grad hp_B|^2`.
    pub lhs: f64,
    /// Eight signed localized transport terms plus the two cross-gradient
    /// pairings, keyed by structure.
    pub rhs_terms: BTreeMap<String, f64>,
    /// Residual pairings `<r_u, hp_u>` and `<r_B, hp_B>`.
    pub residual_corrections: BTreeMap<String, f64>,
    /// `|lhs - rhs_total| / scale`.
    pub imbalance: f64,
    pub scale: f64,
}

/// Nested cutoff `S_j S_k` collapsed through the multiplier algebra.
fn lo_lo(j: i32, k: i32) -> Xf {
    if j <= k - 1 {
        Xf::Lo(j)
    } else if j == k {
        Xf::LoSq(k)
    } else {
        Xf::Lo(k)
    }
}

pub(super) struct EightTerms {
    pub e: [f64; 8],
}

pub(super) fn eight_terms(ctx: &mut PairContext<'_>, k: i32) -> EightTerms {
    use Fld::{B, U};
    let lo_u: Factor = (U, Xf::Lo(k));
    let lo_b: Factor = (B, Xf::Lo(k));
    let hp_u: Factor = (U, Xf::Hp(k));
    let hp_b: Factor = (B, Xf::Hp(k));
    EightTerms {
        e: [
            ctx.tri(lo_u, lo_u, hp_u),
            ctx.tri(hp_u, lo_u, hp_u),
            ctx.tri(lo_u, lo_b, hp_b),
            ctx.tri(hp_u, lo_b, hp_b),
            ctx.tri(lo_b, lo_b, hp_u),
            ctx.tri(hp_b, lo_b, hp_u),
            ctx.tri(lo_b, lo_u, hp_b),
            ctx.tri(hp_b, lo_u, hp_b),
        ],
    }
}

pub(super) struct FullTerms {
    pub t_uuu: f64,
    pub t_ubb: f64,
    pub t_bbu: f64,
    pub t_bub: f64,
}

pub(super) fn full_terms(ctx: &mut PairContext<'_>, k: i32) -> FullTerms {
    use Fld::{B, U};
    FullTerms {
        t_uuu: ctx.tri((U, Xf::Id), (U, Xf::Id), (U, Xf::Hp(k))),
        t_ubb: ctx.tri((U, Xf::Id), (B, Xf::Id), (B, Xf::Hp(k))),
        t_bbu: ctx.tri((B, Xf::Id), (B, Xf::Id), (U, Xf::Hp(k))),
        t_bub: ctx.tri((B, Xf::Id), (U, Xf::Id), (B, Xf::Hp(k))),
    }
}

/// First localized sum of the `lo . grad lo . hp` families: blocks of the
/// high-pass factor against the cutoff band replacing the advected cutoff.
pub(super) fn localized_band_sum(
    ctx: &mut PairContext<'_>,
    k: i32,
    a: Fld,
    g: Fld,
    c: Fld,
) -> f64 {
    let mut acc = 0.0;
    for l in (k - 1)..=(k + 1) {
        acc += ctx.tri(
            (a, lo_lo(l - 2, k)),
            (g, Xf::LoBand(l - 2, k)),
            (c, Xf::BlockHp(l, k)),
        );
    }
    acc
}

/// Second localized sum: blocks of the cutoff advecting the full cutoff
/// against widened high-pass blocks.
pub(super) fn localized_block_sum(
    ctx: &mut PairContext<'_>,
    k: i32,
    a: Fld,
    g: Fld,
    c: Fld,
) -> f64 {
    let mut acc = 0.0;
    for l in (k - 3)..=k {
        acc += ctx.tri((a, Xf::BlockLo(l, k)), (g, Xf::Lo(k)), (c, Xf::TildeHp(l, k)));
    }
    acc
}

/// Resonant sum of the `hp . grad lo . hp` families over `l` in
/// `[k-1, l_top]`: widened high-pass blocks against matching blocks.
/// Returns the signed sum and the sum of term magnitudes (the quantity the
/// termwise envelope chain actually controls).
pub(super) fn resonant_sum(
    ctx: &mut PairContext<'_>,
    k: i32,
    l_range: (i32, i32),
    a: Fld,
    g: Fld,
    c: Fld,
) -> (f64, f64) {
    let mut acc = 0.0;
    let mut abs = 0.0;
    for l in l_range.0..=l_range.1 {
        let v = ctx.tri((a, Xf::TildeHp(l, k)), (g, Xf::Lo(k)), (c, Xf::BlockHp(l, k)));
        acc += v;
        abs += v.abs();
    }
    (acc, abs)
}

/// Tail split point `floor(3k/4)`, rounding toward minus infinity.
pub fn tail_split(k: i32) -> i32 {
    (3 * k).div_euclid(4)
}

pub(super) fn transport_identities(lab: &mut IdentityLab<'_>, k: i32) -> Result<TransportReport> {
    let e = eight_terms(&mut lab.ctx, k).e;
    let t = full_terms(&mut lab.ctx, k);
    Ok(TransportReport {
        k,
        eq_velocity: SidePair {
            lhs: -t.t_uuu,
            rhs: -e[0] - e[1],
        },
        eq_mixed: SidePair {
            lhs: -t.t_ubb,
            rhs: -e[2] - e[3],
        },
        eq_magnetic: SidePair {
            lhs: t.t_bbu + t.t_bub,
            rhs: e[4] + e[5] + e[6] + e[7],
        },
        scale: lab.scale,
    })
}

pub(super) fn compute_i_terms(lab: &mut IdentityLab<'_>, k: i32) -> Result<ITermReport> {
    use Fld::U;
    let k_hi = *lab.profile.stored_range().end();
    let e = eight_terms(&mut lab.ctx, k).e;
    let t = full_terms(&mut lab.ctx, k);
    let ctx = &mut lab.ctx;

    // Pieces of I1 (each carries the parent sign, hence the leading minus).
    let mut i11 = 0.0;
    for l in *lab.profile.stored_range().start()..=k_hi {
        i11 -= ctx.tri(
            (U, Xf::BlockLo(l, k)),
            (U, Xf::Lo(k)),
            (U, Xf::LoHp(l - 2, k)),
        );
    }
    let mut i12 = 0.0;
    for l in (k - 1)..=k_hi {
        i12 -= ctx.tri(
            (U, lo_lo(l - 2, k)),
            (U, Xf::Lo(k)),
            (U, Xf::BlockHp(l, k)),
        );
    }
    let i13 = -localized_block_sum(ctx, k, U, U, U);
    let recon_i1 = -localized_band_sum(ctx, k, U, U, U) + i13;

    // Pieces of I2.
    let mut i21 = 0.0;
    let mut i22 = 0.0;
    for l in (k + 2)..=k_hi {
        i21 -= ctx.tri(
            (U, Xf::BlockHp(l, k)),
            (U, Xf::Lo(k)),
            (U, Xf::LoHp(l - 2, k)),
        );
        i22 -= ctx.tri(
            (U, Xf::LoHp(l - 2, k)),
            (U, Xf::Lo(k)),
            (U, Xf::BlockHp(l, k)),
        );
    }
    let l_star = tail_split(k);
    let (i231_sum, _) = resonant_sum(ctx, k, (k - 1, l_star.min(k_hi)), U, U, U);
    let (i232_sum, i232_abs_sum) = resonant_sum(ctx, k, ((l_star + 1).max(k - 1), k_hi), U, U, U);
    let i231 = -i231_sum;
    let i232 = -i232_sum;
    let i23 = i231 + i232;
    let recon_i2 = i23;

    let grad_lo_u = ctx.factor_norm((U, Xf::Lo(k)), NormTag::GradL2Sq).sqrt();
    let grad_u = ctx.factor_norm((U, Xf::Id), NormTag::GradL2Sq).sqrt();
    let i232_envelope = grad_lo_u * grad_u * grad_u;
    let i232_ratio = (i232_envelope > 0.0).then(|| i232.abs() / i232_envelope);

    let terms = map_of(&[
        ("I1", -e[0]),
        ("I2", -e[1]),
        ("I3", -e[2]),
        ("I4", -e[3]),
        ("I5", e[4]),
        ("I6", e[5]),
        ("I7", e[6]),
        ("I8", e[7]),
        ("I11", i11),
        ("I12", i12),
        ("I13", i13),
        ("I21", i21),
        ("I22", i22),
        ("I23", i23),
        ("I231", i231),
        ("I232", i232),
        ("recon_i1", recon_i1),
        ("recon_i2", recon_i2),
        ("I232_abs_sum", i232_abs_sum),
    ]);
    let lhs_transport = map_of(&[
        ("advect_u_u", -t.t_uuu),
        ("advect_u_b", -t.t_ubb),
        ("magnetic_pair", t.t_bbu + t.t_bub),
    ]);
    Ok(ITermReport {
        k,
        terms,
        lhs_transport,
        theta: 0.75,
        i232_envelope,
        i232_ratio,
        scale: lab.scale,
    })
}

pub(super) fn energy_identity(lab: &mut IdentityLab<'_>, k: i32) -> Result<IdentityReport> {
    use Fld::{B, U};
    let e = eight_terms(&mut lab.ctx, k).e;
    let lhs = lab.ctx.factor_norm((U, Xf::Hp(k)), NormTag::GradL2Sq)
        + lab.ctx.factor_norm((B, Xf::Hp(k)), NormTag::GradL2Sq);

    let lo_u = lab.ctx.spectral((U, Xf::Lo(k)));
    let hp_u = lab.ctx.spectral((U, Xf::Hp(k)));
    let lo_b = lab.ctx.spectral((B, Xf::Lo(k)));
    let hp_b = lab.ctx.spectral((B, Xf::Hp(k)));
    let cross_u = grad_inner(&lo_u, &hp_u)?;
    let cross_b = grad_inner(&lo_b, &hp_b)?;
    let res_u = inner_vector(&lab.residual.r_u, &hp_u)?;
    let res_b = inner_vector(&lab.residual.r_b, &hp_b)?;

    let rhs_terms = map_of(&[
        ("lo_u_adv_lo_u_hp_u", -e[0]),
        ("hp_u_adv_lo_u_hp_u", -e[1]),
        ("lo_u_adv_lo_b_hp_b", -e[2]),
        ("hp_u_adv_lo_b_hp_b", -e[3]),
        ("lo_b_adv_lo_b_hp_u", e[4]),
        ("hp_b_adv_lo_b_hp_u", e[5]),
        ("lo_b_adv_lo_u_hp_b", e[6]),
        ("hp_b_adv_lo_u_hp_b", e[7]),
        ("cross_grad_u", -cross_u),
        ("cross_grad_b", -cross_b),
    ]);
    let residual_corrections = map_of(&[("res_u", res_u), ("res_b", res_b)]);
    let rhs_total: f64 =
        rhs_terms.values().sum::<f64>() + residual_corrections.values().sum::<f64>();
    Ok(IdentityReport {
        k,
        lhs,
        rhs_terms,
        residual_corrections,
        imbalance: (lhs - rhs_total).abs() / lab.scale,
        scale: lab.scale,
    })
}
