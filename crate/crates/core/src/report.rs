//! Machine-readable reports: a canonical JSON form (sorted keys, pinned
//! float formatting) so equal runs serialize byte-identically, plus report
//! assembly for every operation and flat CSV export.

use serde_json::{Map, Value};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::identity::{
    BoundReport, ConditionSeries, IdentityReport, ITermReport, SupportCheck, TransportReport,
};
use crate::lp::{BlockSummary, LpProfile};
use crate::norms::{BernsteinReport, NormMethod};

/// Version tag embedded in every manifest.
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Tag naming the pinned cutoff construction.
pub const PROFILE_TAG: &str = "smooth-step-exp-quantized-2^-32";

/// Reproducibility header embedded in every report.
#[derive(Clone, Debug, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub grid_n: usize,
    pub box_length: f64,
    pub profile_k_min: i32,
    pub profile_k_max: i32,
    pub seeds: Vec<u64>,
    pub tolerances: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn new(command: &str, grid: &Grid, profile: Option<&LpProfile>, seeds: &[u64]) -> Self {
        RunManifest {
            command: command.to_string(),
            grid_n: grid.n_per_dim(),
            box_length: grid.box_length(),
            profile_k_min: profile.map(|p| p.k_min()).unwrap_or(0),
            profile_k_max: profile.map(|p| p.k_max()).unwrap_or(0),
            seeds: seeds.to_vec(),
            tolerances: BTreeMap::new(),
        }
    }

    pub fn with_tolerances(mut self, tol: BTreeMap<String, f64>) -> Self {
        self.tolerances = tol;
        self
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("artifact_version".into(), Value::String(ARTIFACT_VERSION.into()));
        m.insert("command".into(), Value::String(self.command.clone()));
        let mut grid = Map::new();
        grid.insert("n_per_dim".into(), Value::from(self.grid_n as u64));
        grid.insert("box_length".into(), Value::from(self.box_length));
        m.insert("grid".into(), Value::Object(grid));
        let mut profile = Map::new();
        profile.insert("psi".into(), Value::String(PROFILE_TAG.into()));
        profile.insert("k_min".into(), Value::from(self.profile_k_min as i64));
        profile.insert("k_max".into(), Value::from(self.profile_k_max as i64));
        m.insert("profile".into(), Value::Object(profile));
        m.insert(
            "seeds".into(),
            Value::Array(self.seeds.iter().map(|s| Value::from(*s)).collect()),
        );
        let mut tol = Map::new();
        for (k, v) in &self.tolerances {
            tol.insert(k.clone(), Value::from(*v));
        }
        m.insert("tolerances".into(), Value::Object(tol));
        Value::Object(m)
    }
}

/// Wrap a report body with its manifest.
pub fn with_manifest(manifest: &RunManifest, body: Value) -> Value {
    let mut m = Map::new();
    m.insert("manifest".into(), manifest.to_value());
    m.insert("report".into(), body);
    Value::Object(m)
}

fn fmt_f64(x: f64) -> Result<String> {
    if !x.is_finite() {
        return Err(Error::NonFiniteReport("float in report"));
    }
    // 17 significant digits round-trip every f64
    Ok(format!("{:.16e}", x))
}

fn write_canonical(out: &mut String, v: &Value) -> Result<()> {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&fmt_f64(n.as_f64().ok_or(Error::NonFiniteReport("number"))?)?);
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string serializes"));
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(out, item)?;
            }
            out.push(']');
        }
        Value::Object(map) => {
            // serde_json's default map is ordered; emit keys sorted anyway
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, key) in keys.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(key).expect("key serializes"));
                out.push(':');
                write_canonical(out, &map[*key])?;
            }
            out.push('}');
        }
    }
    Ok(())
}

/// Serialize with sorted keys and 17-significant-digit floats; equal values
/// produce equal bytes.
pub fn canonical_json(v: &Value) -> Result<String> {
    let mut out = String::new();
    write_canonical(&mut out, v)?;
    out.push('\n');
    Ok(out)
}

fn opt_f64(v: Option<f64>) -> Value {
    match v {
        Some(x) => Value::from(x),
        None => Value::Null,
    }
}

fn f64_map(m: &BTreeMap<String, f64>) -> Value {
    let mut out = Map::new();
    for (k, v) in m {
        out.insert(k.clone(), Value::from(*v));
    }
    Value::Object(out)
}

pub fn decompose_value(summaries: &[BlockSummary]) -> Value {
    Value::Array(
        summaries
            .iter()
            .map(|s| {
                let mut m = Map::new();
                m.insert("k".into(), Value::from(s.k as i64));
                m.insert("l2_energy".into(), Value::from(s.l2_energy));
                m.insert("linf".into(), Value::from(s.linf));
                m.insert("support_min".into(), opt_f64(s.support_min));
                m.insert("support_max".into(), opt_f64(s.support_max));
                Value::Object(m)
            })
            .collect(),
    )
}

pub fn decompose_csv(summaries: &[BlockSummary]) -> String {
    let mut out = String::from("k,l2_energy,linf,support_min,support_max\n");
    for s in summaries {
        out.push_str(&format!(
            "{},{:.16e},{:.16e},{},{}\n",
            s.k,
            s.l2_energy,
            s.linf,
            s.support_min.map(|v| format!("{v:.16e}")).unwrap_or_default(),
            s.support_max.map(|v| format!("{v:.16e}")).unwrap_or_default(),
        ));
    }
    out
}

/// Norm computation result.
#[derive(Clone, Debug)]
pub struct NormReport {
    pub norm_kind: String,
    pub s: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub value: f64,
    pub method: NormMethod,
}

impl NormReport {
    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("norm_kind".into(), Value::String(self.norm_kind.clone()));
        let mut params = Map::new();
        params.insert("s".into(), opt_f64(self.s));
        params.insert(
            "p".into(),
            match self.p {
                Some(p) if p.is_infinite() => Value::String("inf".into()),
                other => opt_f64(other),
            },
        );
        params.insert(
            "q".into(),
            match self.q {
                Some(q) if q.is_infinite() => Value::String("inf".into()),
                other => opt_f64(other),
            },
        );
        m.insert("parameters".into(), Value::Object(params));
        m.insert("value".into(), Value::from(self.value));
        let method = match self.method {
            NormMethod::Integral => "integral",
            NormMethod::LpSum => "lp_sum",
            NormMethod::PhysicalMax => "physical_max",
        };
        m.insert("method".into(), Value::String(method.into()));
        Value::Object(m)
    }
}

pub fn bernstein_value(report: &BernsteinReport) -> Value {
    Value::Array(
        report
            .records
            .iter()
            .map(|r| {
                let mut m = Map::new();
                m.insert("k".into(), Value::from(r.k as i64));
                m.insert("ratio_low".into(), Value::from(r.ratio_low));
                let mut pairs = Map::new();
                for ((p, q), ratio) in &r.lp_lq {
                    let qs = if q.is_infinite() { "inf".to_string() } else { format!("{q}") };
                    pairs.insert(format!("p{p}_q{qs}"), Value::from(*ratio));
                }
                m.insert("lp_lq_ratio".into(), Value::Object(pairs));
                Value::Object(m)
            })
            .collect(),
    )
}

pub fn bernstein_csv(report: &BernsteinReport) -> String {
    let mut out = String::from("k,ratio_low,p2_qinf,p2_q3,p3_q6,p2_q6\n");
    for r in &report.records {
        out.push_str(&format!("{},{:.16e}", r.k, r.ratio_low));
        for (_, ratio) in &r.lp_lq {
            out.push_str(&format!(",{ratio:.16e}"));
        }
        out.push('\n');
    }
    out
}

pub fn i_term_value(rep: &ITermReport) -> Value {
    let mut m = Map::new();
    m.insert("k".into(), Value::from(rep.k as i64));
    m.insert("I".into(), f64_map(&rep.terms));
    m.insert("lhs_transport".into(), f64_map(&rep.lhs_transport));
    m.insert("theta".into(), Value::from(rep.theta));
    m.insert("i232_envelope".into(), Value::from(rep.i232_envelope));
    m.insert("i232_ratio".into(), opt_f64(rep.i232_ratio));
    m.insert("scale".into(), Value::from(rep.scale));
    Value::Object(m)
}

pub fn identity_value(rep: &IdentityReport) -> Value {
    let mut m = Map::new();
    m.insert("k".into(), Value::from(rep.k as i64));
    m.insert("lhs".into(), Value::from(rep.lhs));
    m.insert("rhs_terms".into(), f64_map(&rep.rhs_terms));
    m.insert(
        "residual_corrections".into(),
        f64_map(&rep.residual_corrections),
    );
    m.insert("imbalance".into(), Value::from(rep.imbalance));
    m.insert("scale".into(), Value::from(rep.scale));
    Value::Object(m)
}

pub fn transport_value(rep: &TransportReport) -> Value {
    let side = |s: &crate::identity::SidePair| {
        let mut m = Map::new();
        m.insert("lhs".into(), Value::from(s.lhs));
        m.insert("rhs".into(), Value::from(s.rhs));
        m.insert("gap".into(), Value::from(s.gap()));
        Value::Object(m)
    };
    let mut m = Map::new();
    m.insert("k".into(), Value::from(rep.k as i64));
    m.insert("eq_velocity".into(), side(&rep.eq_velocity));
    m.insert("eq_mixed".into(), side(&rep.eq_mixed));
    m.insert("eq_magnetic".into(), side(&rep.eq_magnetic));
    m.insert("scale".into(), Value::from(rep.scale));
    Value::Object(m)
}

pub fn bound_value(rep: &BoundReport) -> Value {
    let mut m = Map::new();
    m.insert("k".into(), Value::from(rep.k as i64));
    m.insert("flavor".into(), Value::String(rep.flavor.as_str().into()));
    m.insert(
        "terms".into(),
        Value::Array(
            rep.terms
                .iter()
                .map(|t| {
                    let mut tm = Map::new();
                    tm.insert("J_i_lhs".into(), Value::from(t.lhs));
                    tm.insert("envelope".into(), Value::from(t.envelope));
                    tm.insert("name".into(), Value::String(t.name.clone()));
                    tm.insert("ratio".into(), opt_f64(t.ratio));
                    Value::Object(tm)
                })
                .collect(),
        ),
    );
    let mut master = Map::new();
    master.insert("D".into(), Value::from(rep.dirichlet));
    master.insert("product".into(), Value::from(rep.master_product));
    m.insert("master".into(), Value::Object(master));
    m.insert("highpass_energy".into(), Value::from(rep.highpass_energy));
    m.insert("scale".into(), Value::from(rep.scale));
    Value::Object(m)
}

pub fn conditions_value(series: &ConditionSeries) -> Value {
    Value::Array(
        series
            .records
            .iter()
            .map(|r| {
                let mut m = Map::new();
                m.insert("k".into(), Value::from(r.k as i64));
                m.insert("cond_14".into(), Value::from(r.cond_14));
                m.insert("cond_15".into(), Value::from(r.cond_15));
                m.insert("cond_16".into(), Value::from(r.cond_16));
                m.insert("master_linf".into(), Value::from(r.master_linf));
                m.insert("master_l3".into(), Value::from(r.master_l3));
                Value::Object(m)
            })
            .collect(),
    )
}

pub fn conditions_csv(series: &ConditionSeries) -> String {
    let mut out = String::from("k,cond_14,cond_15,cond_16,master_linf,master_l3\n");
    for r in &series.records {
        out.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r.k, r.cond_14, r.cond_15, r.cond_16, r.master_linf, r.master_l3
        ));
    }
    out
}

pub fn support_value(checks: &[SupportCheck]) -> Value {
    Value::Array(
        checks
            .iter()
            .map(|c| {
                let mut m = Map::new();
                m.insert("k".into(), Value::from(c.k as i64));
                m.insert("l".into(), Value::from(c.l as i64));
                m.insert("bound_lo".into(), Value::from(c.bound_lo));
                m.insert("bound_hi".into(), Value::from(c.bound_hi));
                m.insert("observed_min".into(), opt_f64(c.observed.map(|o| o.0)));
                m.insert("observed_max".into(), opt_f64(c.observed.map(|o| o.1)));
                m.insert("outside_over_max".into(), Value::from(c.outside_over_max));
                Value::Object(m)
            })
            .collect(),
    )
}
