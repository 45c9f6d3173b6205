//! Self-contained invariant checks runnable at any grid size: the library
//! side of the `all-checks` command. Each check returns a pass flag plus the
//! measured quantities so reports stay diffable.

use serde_json::{Map, Value};

use crate::error::Result;
use crate::field::SpectralVectorField;
use crate::gen::{random_divfree, SpectrumKind, SpectrumSpec};
use crate::grid::Grid;
use crate::identity::{paraproduct_support_check, BoundFlavor, IdentityLab};
use crate::lp::{DyadicDecomposition, LpProfile};
use crate::norms::{bernstein_check, NormOperand};
use crate::report::canonical_json;

/// Tolerances used by the invariant checks, fixed at build time.
pub mod tol {
    /// Relative reconstruction error of the block sum.
    pub const RECONSTRUCTION: f64 = 1e-12;
    /// Telescoping partition error: exact, no tolerance.
    pub const TELESCOPING: f64 = 0.0;
    /// Derivative Bernstein ratio bounds forced by the annulus radii.
    pub const BERNSTEIN_LOW: (f64, f64) = (0.5, 2.0);
    /// Support leakage relative to the product's largest coefficient.
    pub const SUPPORT_LEAK: f64 = 1e-14;
    /// Vanishing paraproduct pieces, relative to the ladder scale.
    pub const VANISHING: f64 = 1e-12;
    /// Transport rewrites, relative to the ladder scale.
    pub const TRANSPORT: f64 = 1e-10;
    /// Shell energy identity imbalance (already scale-relative).
    pub const IDENTITY: f64 = 1e-8;
    /// Split/reconstruction consistency, relative to the ladder scale.
    pub const CONSISTENCY: f64 = 1e-10;
}

/// Parameters for one check run.
#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub grid_n: usize,
    pub box_length: f64,
    pub seeds: Vec<u64>,
    /// Replace random pairs by zero fields (degenerate smoke profile).
    pub zero_fields: bool,
    /// Power-law exponent of generated spectra.
    pub alpha: f64,
}

impl CheckConfig {
    pub fn new(grid_n: usize, box_length: f64, seeds: Vec<u64>) -> Self {
        CheckConfig {
            grid_n,
            box_length,
            seeds,
            zero_fields: false,
            alpha: 1.5,
        }
    }
}

/// Result of one named check.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub details: Value,
}

fn outcome(name: &str, passed: bool, details: Vec<(&str, Value)>) -> CheckOutcome {
    let mut m = Map::new();
    for (k, v) in details {
        m.insert(k.to_string(), v);
    }
    CheckOutcome {
        name: name.to_string(),
        passed,
        details: Value::Object(m),
    }
}

struct Env {
    grid: Grid,
    profile: LpProfile,
}

impl Env {
    fn new(cfg: &CheckConfig) -> Result<Self> {
        let grid = Grid::new(cfg.grid_n, cfg.box_length)?;
        let profile = LpProfile::build(grid)?;
        Ok(Env { grid, profile })
    }

    fn pair(&self, cfg: &CheckConfig, seed: u64) -> Result<(SpectralVectorField, SpectralVectorField)> {
        if cfg.zero_fields {
            return Ok((
                SpectralVectorField::zeros(self.grid),
                SpectralVectorField::zeros(self.grid),
            ));
        }
        let spec = |s| SpectrumSpec {
            kind: SpectrumKind::PowerLaw { alpha: cfg.alpha },
            band: (self.profile.k_min(), self.profile.k_max()),
            seed: s,
        };
        Ok((
            random_divfree(self.grid, &self.profile, &spec(seed))?,
            random_divfree(self.grid, &self.profile, &spec(seed.wrapping_add(0x9e37)))?,
        ))
    }
}

fn check_partition(env: &Env, cfg: &CheckConfig) -> Result<CheckOutcome> {
    let tele = env.profile.telescoping_error();
    let mut worst = 0.0f64;
    for &seed in &cfg.seeds {
        let (u, _) = env.pair(cfg, seed)?;
        let norm = u.l2_norm();
        if norm == 0.0 {
            continue;
        }
        let dec = DyadicDecomposition::new(&env.profile, &u);
        let err = dec.reconstruct(env.grid).sub(&u)?.l2_norm() / norm;
        worst = worst.max(err);
    }
    Ok(outcome(
        "partition_reconstruction",
        tele <= tol::TELESCOPING && worst <= tol::RECONSTRUCTION,
        vec![
            ("telescoping_error", Value::from(tele)),
            ("worst_reconstruction", Value::from(worst)),
        ],
    ))
}

fn check_bernstein(env: &Env, cfg: &CheckConfig) -> Result<CheckOutcome> {
    if cfg.zero_fields {
        return Ok(outcome("bernstein", true, vec![("skipped", Value::from("zero fields"))]));
    }
    let mut worst_low = 0.0f64;
    let mut best_low = f64::INFINITY;
    let mut worst_pair = 0.0f64;
    for &seed in &cfg.seeds {
        let (u, _) = env.pair(cfg, seed)?;
        let rep = bernstein_check(&env.profile, &NormOperand::Vector(u))?;
        for rec in &rep.records {
            worst_low = worst_low.max(rec.ratio_low);
            best_low = best_low.min(rec.ratio_low);
            for (_, r) in &rec.lp_lq {
                if !r.is_finite() {
                    worst_pair = f64::INFINITY;
                } else {
                    worst_pair = worst_pair.max(*r);
                }
            }
        }
    }
    let ok = best_low >= tol::BERNSTEIN_LOW.0 && worst_low <= tol::BERNSTEIN_LOW.1 && worst_pair.is_finite();
    Ok(outcome(
        "bernstein",
        ok,
        vec![
            ("ratio_low_min", Value::from(best_low)),
            ("ratio_low_max", Value::from(worst_low)),
            ("lp_lq_max", Value::from(worst_pair)),
        ],
    ))
}

fn check_support(env: &Env, cfg: &CheckConfig) -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    for &seed in cfg.seeds.iter().take(3) {
        let (u, _) = env.pair(cfg, seed)?;
        for k in env.profile.usable_range() {
            for l in (k - 1)..=*env.profile.stored_range().end() {
                let c = paraproduct_support_check(&env.profile, &u, k, l)?;
                worst = worst.max(c.outside_over_max);
            }
        }
    }
    Ok(outcome(
        "support_lemma",
        worst <= tol::SUPPORT_LEAK,
        vec![("worst_leak", Value::from(worst))],
    ))
}

fn check_ladder(env: &Env, cfg: &CheckConfig) -> Result<Vec<CheckOutcome>> {
    let mut worst_vanish = 0.0f64;
    let mut worst_transport = 0.0f64;
    let mut worst_imbalance = 0.0f64;
    let mut worst_consistency = 0.0f64;
    let mut ratios_finite = true;
    let mut worst_i232_ratio = 0.0f64;
    for &seed in &cfg.seeds {
        let (u, b) = env.pair(cfg, seed)?;
        let mut lab = IdentityLab::new(&env.profile, &u, &b)?;
        let scale = lab.scale();
        for k in env.profile.usable_range() {
            let t = lab.transport_identities(k)?;
            worst_transport = worst_transport
                .max(t.eq_velocity.gap() / scale)
                .max(t.eq_mixed.gap() / scale)
                .max(t.eq_magnetic.gap() / scale);
            let it = lab.i_terms(k)?;
            for piece in ["I11", "I21", "I22"] {
                worst_vanish = worst_vanish.max(it.terms[piece].abs() / scale);
            }
            worst_consistency = worst_consistency
                .max((it.terms["I1"] - (it.terms["I11"] + it.terms["I12"] + it.terms["I13"])).abs() / scale)
                .max((it.terms["I2"] - (it.terms["I21"] + it.terms["I22"] + it.terms["I23"])).abs() / scale)
                .max((it.terms["I23"] - (it.terms["I231"] + it.terms["I232"])).abs() / scale)
                .max((it.terms["I1"] - it.terms["recon_i1"]).abs() / scale)
                .max((it.terms["I2"] - it.terms["recon_i2"]).abs() / scale);
            if let Some(r) = it.i232_ratio {
                worst_i232_ratio = worst_i232_ratio.max(r);
            }
            let e = lab.energy_identity(k)?;
            worst_imbalance = worst_imbalance.max(e.imbalance);
            for flavor in [BoundFlavor::Linf, BoundFlavor::L3] {
                let jb = lab.j_bounds(k, flavor)?;
                for rec in &jb.terms {
                    match rec.ratio {
                        Some(r) => ratios_finite &= r.is_finite(),
                        None => ratios_finite &= rec.lhs <= tol::VANISHING * scale,
                    }
                }
            }
        }
    }
    Ok(vec![
        outcome(
            "vanishing_terms",
            worst_vanish <= tol::VANISHING,
            vec![("worst", Value::from(worst_vanish))],
        ),
        outcome(
            "transport_identities",
            worst_transport <= tol::TRANSPORT,
            vec![("worst_gap", Value::from(worst_transport))],
        ),
        outcome(
            "energy_identity",
            worst_imbalance <= tol::IDENTITY,
            vec![("worst_imbalance", Value::from(worst_imbalance))],
        ),
        outcome(
            "decomposition_consistency",
            worst_consistency <= tol::CONSISTENCY,
            vec![("worst_gap", Value::from(worst_consistency))],
        ),
        outcome(
            "bound_ladders",
            ratios_finite,
            vec![
                ("ratios_finite", Value::from(ratios_finite)),
                ("i232_ratio_max", Value::from(worst_i232_ratio)),
            ],
        ),
    ])
}

fn check_conditions(env: &Env, cfg: &CheckConfig) -> Result<CheckOutcome> {
    let mut ok = true;
    let mut worst_rel = 0.0f64;
    for &seed in cfg.seeds.iter().take(3) {
        let (u, b) = env.pair(cfg, seed)?;
        let mut lab = IdentityLab::new(&env.profile, &u, &b)?;
        let series = lab.liouville_conditions((env.profile.k_min(), env.profile.k_max()))?;
        for rec in &series.records {
            // sampled-sup comparison direction: cond_14 <= 2 cond_15
            if rec.cond_14 > 2.0 * rec.cond_15 + 1e-12 {
                ok = false;
            }
            if rec.cond_14 > 0.0 {
                worst_rel = worst_rel.max(rec.cond_15 / rec.cond_14);
            }
        }
    }
    Ok(outcome(
        "condition_sequences",
        ok,
        vec![("geometric_constant", Value::from(worst_rel))],
    ))
}

fn check_determinism(env: &Env, cfg: &CheckConfig) -> Result<CheckOutcome> {
    let seed = cfg.seeds.first().copied().unwrap_or(0);
    let run = || -> Result<String> {
        let (u, b) = env.pair(cfg, seed)?;
        let mut lab = IdentityLab::new(&env.profile, &u, &b)?;
        let k = env.profile.k_min();
        let rep = lab.energy_identity(k)?;
        canonical_json(&crate::report::identity_value(&rep))
    };
    let a = run()?;
    let b = run()?;
    Ok(outcome(
        "determinism",
        a == b,
        vec![("bytes", Value::from(a.len() as u64))],
    ))
}

/// Run every check; the caller decides how to report failures.
pub fn run_all_checks(cfg: &CheckConfig) -> Result<Vec<CheckOutcome>> {
    let env = Env::new(cfg)?;
    let mut out = Vec::new();
    out.push(check_partition(&env, cfg)?);
    out.push(check_bernstein(&env, cfg)?);
    out.push(check_support(&env, cfg)?);
    out.extend(check_ladder(&env, cfg)?);
    out.push(check_conditions(&env, cfg)?);
    out.push(check_determinism(&env, cfg)?);
    Ok(out)
}

/// Canonical JSON body for an all-checks report.
pub fn checks_value(outcomes: &[CheckOutcome]) -> Value {
    Value::Array(
        outcomes
            .iter()
            .map(|o| {
                let mut m = Map::new();
                m.insert("name".into(), Value::String(o.name.clone()));
                m.insert("passed".into(), Value::Bool(o.passed));
                m.insert("details".into(), o.details.clone());
                Value::Object(m)
            })
            .collect(),
    )
}
