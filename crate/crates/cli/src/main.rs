//! Command-line front end: field generation, decomposition, norms, identity
//! and bound verification, condition series, and the all-checks suite.
//!
//! Exit codes: 0 success, 2 invariant failure, 3 input error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value};

use lplab::checks::{checks_value, run_all_checks, tol, CheckConfig};
use lplab::gen::{named_flow, random_divfree, FlowKind, SpectrumKind, SpectrumSpec};
use lplab::identity::{BoundFlavor, IdentityLab};
use lplab::io::{read_field, write_field};
use lplab::lp::DyadicDecomposition;
use lplab::norms::{
    bernstein_check, besov_norm, dirichlet_energy, lebesgue_norm, sobolev_norm_integral,
    sobolev_norm_lp_sum, Lp, NormMethod, NormOperand,
};
use lplab::ops::FieldValue;
use lplab::report::{
    bernstein_csv, bernstein_value, bound_value, canonical_json, conditions_csv, conditions_value,
    decompose_csv, decompose_value, i_term_value, identity_value, transport_value, with_manifest,
    NormReport, RunManifest,
};
use lplab::{Grid, LpProfile, SpectralVectorField};

#[derive(Parser)]
#[command(name = "lplab", version, about = "Spectral laboratory for dyadic decompositions on periodic grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Box lengths accept plain numbers or "<m>pi" multiples, e.g. "4pi".
fn parse_box(s: &str) -> Result<f64, String> {
    let t = s.trim().to_lowercase();
    if let Some(mult) = t.strip_suffix("pi") {
        let m: f64 = if mult.is_empty() {
            1.0
        } else {
            mult.parse().map_err(|_| format!("bad box length {s:?}"))?
        };
        Ok(m * std::f64::consts::PI)
    } else {
        t.parse().map_err(|_| format!("bad box length {s:?}"))
    }
}

fn parse_band(s: &str) -> Result<(i32, i32), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 2 {
        return Err(format!("band must look like k1:k2, got {s:?}"));
    }
    let a = parts[0].parse().map_err(|_| format!("bad band start {s:?}"))?;
    let b = parts[1].parse().map_err(|_| format!("bad band end {s:?}"))?;
    Ok((a, b))
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Grid points per dimension.
    #[arg(long = "grid", default_value_t = 32)]
    grid_n: usize,
    /// Box side length; accepts "2pi"-style multiples.
    #[arg(long = "box", value_parser = parse_box, default_value = "2pi")]
    box_length: f64,
}

#[derive(Args, Clone)]
struct FieldSource {
    /// Velocity field file (LPF1). Generated from --seed when absent.
    #[arg(long)]
    u: Option<PathBuf>,
    /// Magnetic field file (LPF1). Generated from --seed-b when absent.
    #[arg(long)]
    b: Option<PathBuf>,
    /// Generator seed for the velocity field.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Generator seed for the magnetic field (defaults to seed + 1000).
    #[arg(long)]
    seed_b: Option<u64>,
    /// Power-law exponent of generated spectra.
    #[arg(long, default_value_t = 1.5)]
    alpha: f64,
    /// Dyadic band "k1:k2" for generated spectra (profile range if absent).
    #[arg(long, value_parser = parse_band)]
    band: Option<(i32, i32)>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a field file.
    Gen {
        #[command(flatten)]
        grid: GridArgs,
        /// power-law | band | shell-list | abc | taylor-green
        #[arg(long, default_value = "power-law")]
        kind: String,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        /// Dyadic band "k1:k2" (defaults to the profile range).
        #[arg(long, value_parser = parse_band)]
        band: Option<(i32, i32)>,
        /// Shell list "k1,k2,..." for --kind shell-list.
        #[arg(long)]
        shells: Option<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Flow parameters A,B,C for named flows.
        #[arg(long, default_value = "1,1,1")]
        params: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-shell energies of a field file.
    Decompose {
        /// Input LPF1 field.
        #[arg(long = "in")]
        input: PathBuf,
        /// Write each block as an LPF1 file into this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Norm computations on a field file.
    Norms {
        #[arg(long = "in")]
        input: PathBuf,
        /// lebesgue | sobolev | besov | dirichlet
        #[arg(long)]
        norm: String,
        #[arg(long)]
        s: Option<f64>,
        /// Exponent p; "inf" allowed.
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        q: Option<String>,
        /// integral | lp_sum (Sobolev only)
        #[arg(long, default_value = "integral")]
        method: String,
        /// Sampling refinement for sup norms.
        #[arg(long, default_value_t = 1)]
        refine: usize,
        /// Second field for the Dirichlet energy.
        #[arg(long)]
        b: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Empirical Bernstein ratios per shell.
    Bernstein {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the shell energy identity and its term ladder.
    VerifyIdentity {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        fields: FieldSource,
        /// Single shell index.
        #[arg(long, conflicts_with = "sweep")]
        k: Option<i32>,
        /// Sweep the whole usable range.
        #[arg(long)]
        sweep: bool,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the bound ladders.
    VerifyBounds {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        fields: FieldSource,
        /// linf | l3
        #[arg(long, default_value = "linf")]
        flavor: String,
        #[arg(long)]
        k: Option<i32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Condition sequences over a shell range.
    Conditions {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        fields: FieldSource,
        #[arg(long)]
        kmin: Option<i32>,
        #[arg(long)]
        kmax: Option<i32>,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suite; exits 2 on any failure.
    AllChecks {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_delimiter = ',', default_value = "7")]
        seeds: Vec<u64>,
        /// zero | random
        #[arg(long, default_value = "random")]
        fields: String,
        #[arg(long, default_value_t = 1.5)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), lplab::Error> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(path, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn load_vector(path: &Path) -> Result<SpectralVectorField, String> {
    match read_field(path) {
        Ok(FieldValue::Vector(v)) => Ok(v),
        Ok(FieldValue::Scalar(_)) => Err(format!(
            "{} holds a scalar field, need vector3",
            path.display()
        )),
        Err(e) => Err(format!("{}: {e}", path.display())),
    }
}

struct PairSetup {
    grid: Grid,
    profile: LpProfile,
    u: SpectralVectorField,
    b: SpectralVectorField,
    seeds: Vec<u64>,
}

fn resolve_pair(grid_args: &GridArgs, src: &FieldSource) -> Result<PairSetup, String> {
    let (grid, u) = match &src.u {
        Some(path) => {
            let u = load_vector(path)?;
            (*u.grid(), u)
        }
        None => {
            let grid =
                Grid::new(grid_args.grid_n, grid_args.box_length).map_err(|e| e.to_string())?;
            let profile = LpProfile::build(grid).map_err(|e| e.to_string())?;
            let band = src.band.unwrap_or((profile.k_min(), profile.k_max()));
            let u = random_divfree(
                grid,
                &profile,
                &SpectrumSpec {
                    kind: SpectrumKind::PowerLaw { alpha: src.alpha },
                    band,
                    seed: src.seed,
                },
            )
            .map_err(|e| e.to_string())?;
            (grid, u)
        }
    };
    let profile = LpProfile::build(grid).map_err(|e| e.to_string())?;
    let b = match &src.b {
        Some(path) => load_vector(path)?,
        None => {
            let seed_b = src.seed_b.unwrap_or(src.seed + 1000);
            let band = src.band.unwrap_or((profile.k_min(), profile.k_max()));
            random_divfree(
                grid,
                &profile,
                &SpectrumSpec {
                    kind: SpectrumKind::PowerLaw { alpha: src.alpha },
                    band,
                    seed: seed_b,
                },
            )
            .map_err(|e| e.to_string())?
        }
    };
    let seeds = vec![src.seed, src.seed_b.unwrap_or(src.seed + 1000)];
    Ok(PairSetup {
        grid,
        profile,
        u,
        b,
        seeds,
    })
}

fn parse_lp(s: &str) -> Result<Lp, String> {
    if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
        Ok(Lp::Infinity)
    } else {
        let p: f64 = s.parse().map_err(|_| format!("bad exponent {s:?}"))?;
        Lp::parse(p).map_err(|e| e.to_string())
    }
}

fn run() -> Result<i32, (i32, String)> {
    let cli = Cli::try_parse().map_err(|e| {
        let code = match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
            _ => 3,
        };
        (code, e.render().to_string())
    })?;
    let input_err = |msg: String| (3, msg);

    match cli.command {
        Command::Gen {
            grid,
            kind,
            alpha,
            band,
            shells,
            seed,
            params,
            out,
        } => {
            let g =
                Grid::new(grid.grid_n, grid.box_length).map_err(|e| input_err(e.to_string()))?;
            let field = match kind.as_str() {
                "abc" | "taylor-green" => {
                    let flow = if kind == "abc" {
                        FlowKind::Abc
                    } else {
                        FlowKind::TaylorGreen
                    };
                    let p: Vec<f64> = params
                        .split(',')
                        .map(|x| {
                            x.trim()
                                .parse()
                                .map_err(|_| input_err(format!("bad params {params:?}")))
                        })
                        .collect::<Result<_, _>>()?;
                    if p.len() != 3 {
                        return Err(input_err("params must be A,B,C".into()));
                    }
                    named_flow(g, flow, [p[0], p[1], p[2]]).map_err(|e| input_err(e.to_string()))?
                }
                "power-law" | "band" | "shell-list" => {
                    let profile = LpProfile::build(g).map_err(|e| input_err(e.to_string()))?;
                    let band = band.unwrap_or((profile.k_min(), profile.k_max()));
                    let skind = match kind.as_str() {
                        "power-law" => SpectrumKind::PowerLaw { alpha },
                        "band" => SpectrumKind::Band,
                        _ => {
                            let list: Vec<i32> = shells
                                .as_deref()
                                .ok_or_else(|| {
                                    input_err("--shells required for shell-list".into())
                                })?
                                .split(',')
                                .map(|x| {
                                    x.trim()
                                        .parse()
                                        .map_err(|_| input_err("bad shell list".into()))
                                })
                                .collect::<Result<_, _>>()?;
                            SpectrumKind::ShellList(list)
                        }
                    };
                    random_divfree(
                        g,
                        &profile,
                        &SpectrumSpec {
                            kind: skind,
                            band,
                            seed,
                        },
                    )
                    .map_err(|e| input_err(e.to_string()))?
                }
                other => return Err(input_err(format!("unknown kind {other:?}"))),
            };
            write_field(&out, &FieldValue::Vector(field)).map_err(|e| input_err(e.to_string()))?;
            eprintln!("wrote {}", out.display());
            Ok(0)
        }

        Command::Decompose {
            input,
            out_dir,
            format,
            out,
        } => {
            let value = read_field(&input).map_err(|e| input_err(e.to_string()))?;
            let grid = match &value {
                FieldValue::Scalar(f) => *f.grid(),
                FieldValue::Vector(v) => *v.grid(),
            };
            let profile = LpProfile::build(grid).map_err(|e| input_err(e.to_string()))?;
            let summaries = match &value {
                FieldValue::Scalar(f) => {
                    let dec = DyadicDecomposition::new(&profile, f);
                    if let Some(dir) = &out_dir {
                        std::fs::create_dir_all(dir).map_err(|e| input_err(e.to_string()))?;
                        for (k, block) in &dec.blocks {
                            write_field(
                                &dir.join(format!("block_{k}.lpf")),
                                &FieldValue::Scalar(block.clone()),
                            )
                            .map_err(|e| input_err(e.to_string()))?;
                        }
                    }
                    dec.summaries()
                }
                FieldValue::Vector(v) => {
                    let dec = DyadicDecomposition::new(&profile, v);
                    if let Some(dir) = &out_dir {
                        std::fs::create_dir_all(dir).map_err(|e| input_err(e.to_string()))?;
                        for (k, block) in &dec.blocks {
                            write_field(
                                &dir.join(format!("block_{k}.lpf")),
                                &FieldValue::Vector(block.clone()),
                            )
                            .map_err(|e| input_err(e.to_string()))?;
                        }
                    }
                    dec.summaries()
                }
            };
            let text = if format == "csv" {
                decompose_csv(&summaries)
            } else {
                let manifest = RunManifest::new("decompose", &grid, Some(&profile), &[]);
                canonical_json(&with_manifest(&manifest, decompose_value(&summaries)))
                    .map_err(|e| input_err(e.to_string()))?
            };
            emit(&out, &text).map_err(|e| input_err(e.to_string()))?;
            Ok(0)
        }

        Command::Norms {
            input,
            norm,
            s,
            p,
            q,
            method,
            refine,
            b,
            out,
        } => {
            let value = read_field(&input).map_err(|e| input_err(e.to_string()))?;
            let operand = match value {
                FieldValue::Scalar(f) => NormOperand::Scalar(f),
                FieldValue::Vector(v) => NormOperand::Vector(v),
            };
            let grid = *operand.grid();
            let report = match norm.as_str() {
                "lebesgue" => {
                    let lp = parse_lp(p.as_deref().unwrap_or("2")).map_err(input_err)?;
                    let value = lebesgue_norm(&operand, lp, refine.max(1));
                    let (p_val, method) = match lp {
                        Lp::Infinity => (f64::INFINITY, NormMethod::PhysicalMax),
                        Lp::Finite(x) => (x, NormMethod::Integral),
                    };
                    NormReport {
                        norm_kind: "lebesgue".into(),
                        s: None,
                        p: Some(p_val),
                        q: None,
                        value,
                        method,
                    }
                }
                "sobolev" => {
                    let s = s.ok_or_else(|| input_err("--s required for sobolev".into()))?;
                    let (value, method) = match method.as_str() {
                        "lp_sum" => {
                            let profile =
                                LpProfile::build(grid).map_err(|e| input_err(e.to_string()))?;
                            (
                                sobolev_norm_lp_sum(&profile, &operand, s)
                                    .map_err(|e| input_err(e.to_string()))?,
                                NormMethod::LpSum,
                            )
                        }
                        _ => (
                            sobolev_norm_integral(&operand, s)
                                .map_err(|e| input_err(e.to_string()))?,
                            NormMethod::Integral,
                        ),
                    };
                    NormReport {
                        norm_kind: "sobolev".into(),
                        s: Some(s),
                        p: None,
                        q: None,
                        value,
                        method,
                    }
                }
                "besov" => {
                    let s = s.ok_or_else(|| input_err("--s required for besov".into()))?;
                    let lp = parse_lp(p.as_deref().unwrap_or("inf")).map_err(input_err)?;
                    let lq = parse_lp(q.as_deref().unwrap_or("inf")).map_err(input_err)?;
                    let profile = LpProfile::build(grid).map_err(|e| input_err(e.to_string()))?;
                    let value = besov_norm(&profile, &operand, s, lp, lq)
                        .map_err(|e| input_err(e.to_string()))?;
                    let as_f = |l: Lp| match l {
                        Lp::Infinity => f64::INFINITY,
                        Lp::Finite(x) => x,
                    };
                    NormReport {
                        norm_kind: "besov".into(),
                        s: Some(s),
                        p: Some(as_f(lp)),
                        q: Some(as_f(lq)),
                        value,
                        method: NormMethod::LpSum,
                    }
                }
                "dirichlet" => {
                    let u = match operand {
                        NormOperand::Vector(ref v) => v.clone(),
                        _ => return Err(input_err("dirichlet needs a vector field".into())),
                    };
                    let bfield = match &b {
                        Some(path) => load_vector(path).map_err(input_err)?,
                        None => SpectralVectorField::zeros(grid),
                    };
                    let value =
                        dirichlet_energy(&u, &bfield).map_err(|e| input_err(e.to_string()))?;
                    NormReport {
                        norm_kind: "dirichlet".into(),
                        s: None,
                        p: None,
                        q: None,
                        value,
                        method: NormMethod::Integral,
                    }
                }
                other => return Err(input_err(format!("unknown norm {other:?}"))),
            };
            let manifest = RunManifest::new("norms", &grid, None, &[]);
            let text = canonical_json(&with_manifest(&manifest, report.to_value()))
                .map_err(|e| input_err(e.to_string()))?;
            emit(&out, &text).map_err(|e| input_err(e.to_string()))?;
            Ok(0)
        }

        Command::Bernstein { input, format, out } => {
            let value = read_field(&input).map_err(|e| input_err(e.to_string()))?;
            let operand = match value {
                FieldValue::Scalar(f) => NormOperand::Scalar(f),
                FieldValue::Vector(v) => NormOperand::Vector(v),
            };
            let grid = *operand.grid();
            let profile = LpProfile::build(grid).map_err(|e| input_err(e.to_string()))?;
            let report =
                bernstein_check(&profile, &operand).map_err(|e| input_err(e.to_string()))?;
            let text = if format == "json" {
                let manifest = RunManifest::new("bernstein", &grid, Some(&profile), &[]);
                canonical_json(&with_manifest(&manifest, bernstein_value(&report)))
                    .map_err(|e| input_err(e.to_string()))?
            } else {
                bernstein_csv(&report)
            };
            emit(&out, &text).map_err(|e| input_err(e.to_string()))?;
            Ok(0)
        }

        Command::VerifyIdentity {
            grid,
            fields,
            k,
            sweep,
            format,
            out,
        } => {
            let setup = resolve_pair(&grid, &fields).map_err(input_err)?;
            let mut lab = IdentityLab::new(&setup.profile, &setup.u, &setup.b)
                .map_err(|e| input_err(e.to_string()))?;
            let ks: Vec<i32> = if sweep || k.is_none() {
                setup.profile.usable_range().collect()
            } else {
                vec![k.unwrap()]
            };
            let mut all_ok = true;
            let mut rows = Vec::new();
            let mut csv = String::from("k,imbalance,i232,i232_envelope,transport_gap_max\n");
            for &kk in &ks {
                let identity = lab.energy_identity(kk).map_err(|e| input_err(e.to_string()))?;
                let iterms = lab.i_terms(kk).map_err(|e| input_err(e.to_string()))?;
                let transport = lab
                    .transport_identities(kk)
                    .map_err(|e| input_err(e.to_string()))?;
                let scale = lab.scale();
                let tgap = transport
                    .eq_velocity
                    .gap()
                    .max(transport.eq_mixed.gap())
                    .max(transport.eq_magnetic.gap());
                all_ok &= identity.imbalance <= tol::IDENTITY;
                all_ok &= tgap <= tol::TRANSPORT * scale;
                for piece in ["I11", "I21", "I22"] {
                    all_ok &= iterms.terms[piece].abs() <= tol::VANISHING * scale;
                }
                csv.push_str(&format!(
                    "{},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                    kk, identity.imbalance, iterms.terms["I232"], iterms.i232_envelope, tgap
                ));
                let mut m = Map::new();
                m.insert("identity".into(), identity_value(&identity));
                m.insert("i_terms".into(), i_term_value(&iterms));
                m.insert("transport".into(), transport_value(&transport));
                rows.push(Value::Object(m));
            }
            let text = if format == "csv" {
                csv
            } else {
                let manifest = RunManifest::new(
                    "verify-identity",
                    &setup.grid,
                    Some(&setup.profile),
                    &setup.seeds,
                );
                canonical_json(&with_manifest(&manifest, Value::Array(rows)))
                    .map_err(|e| input_err(e.to_string()))?
            };
            emit(&out, &text).map_err(|e| input_err(e.to_string()))?;
            Ok(if all_ok { 0 } else { 2 })
        }

        Command::VerifyBounds {
            grid,
            fields,
            flavor,
            k,
            out,
        } => {
            let setup = resolve_pair(&grid, &fields).map_err(input_err)?;
            let flavor = match flavor.as_str() {
                "linf" => BoundFlavor::Linf,
                "l3" => BoundFlavor::L3,
                other => return Err(input_err(format!("unknown flavor {other:?}"))),
            };
            let mut lab = IdentityLab::new(&setup.profile, &setup.u, &setup.b)
                .map_err(|e| input_err(e.to_string()))?;
            let ks: Vec<i32> = match k {
                Some(kk) => vec![kk],
                None => setup.profile.usable_range().collect(),
            };
            let mut all_ok = true;
            let mut rows = Vec::new();
            for &kk in &ks {
                let rep = lab.j_bounds(kk, flavor).map_err(|e| input_err(e.to_string()))?;
                for rec in &rep.terms {
                    match rec.ratio {
                        Some(r) => all_ok &= r.is_finite(),
                        None => all_ok &= rec.lhs <= tol::VANISHING * lab.scale(),
                    }
                }
                rows.push(bound_value(&rep));
            }
            let manifest = RunManifest::new(
                "verify-bounds",
                &setup.grid,
                Some(&setup.profile),
                &setup.seeds,
            );
            let text = canonical_json(&with_manifest(&manifest, Value::Array(rows)))
                .map_err(|e| input_err(e.to_string()))?;
            emit(&out, &text).map_err(|e| input_err(e.to_string()))?;
            Ok(if all_ok { 0 } else { 2 })
        }

        Command::Conditions {
            grid,
            fields,
            kmin,
            kmax,
            format,
            out,
        } => {
            let setup = resolve_pair(&grid, &fields).map_err(input_err)?;
            let lo = kmin.unwrap_or_else(|| setup.profile.k_min());
            let hi = kmax.unwrap_or_else(|| setup.profile.k_max());
            let mut lab = IdentityLab::new(&setup.profile, &setup.u, &setup.b)
                .map_err(|e| input_err(e.to_string()))?;
            let series = lab
                .liouville_conditions((lo, hi))
                .map_err(|e| input_err(e.to_string()))?;
            let text = if format == "csv" {
                conditions_csv(&series)
            } else {
                let manifest = RunManifest::new(
                    "conditions",
                    &setup.grid,
                    Some(&setup.profile),
                    &setup.seeds,
                );
                canonical_json(&with_manifest(&manifest, conditions_value(&series)))
                    .map_err(|e| input_err(e.to_string()))?
            };
            emit(&out, &text).map_err(|e| input_err(e.to_string()))?;
            Ok(0)
        }

        Command::AllChecks {
            grid,
            seeds,
            fields,
            alpha,
            out,
        } => {
            let mut cfg = CheckConfig::new(grid.grid_n, grid.box_length, seeds.clone());
            cfg.alpha = alpha;
            cfg.zero_fields = match fields.as_str() {
                "zero" => true,
                "random" => false,
                other => return Err(input_err(format!("unknown field profile {other:?}"))),
            };
            let outcomes = run_all_checks(&cfg).map_err(|e| input_err(e.to_string()))?;
            for o in &outcomes {
                eprintln!("[{}] {}", if o.passed { "PASS" } else { "FAIL" }, o.name);
            }
            let g = Grid::new(cfg.grid_n, cfg.box_length).map_err(|e| input_err(e.to_string()))?;
            let profile = LpProfile::build(g).map_err(|e| input_err(e.to_string()))?;
            let mut tols = BTreeMap::new();
            tols.insert("reconstruction".to_string(), tol::RECONSTRUCTION);
            tols.insert("telescoping".to_string(), tol::TELESCOPING);
            tols.insert("support_leak".to_string(), tol::SUPPORT_LEAK);
            tols.insert("vanishing".to_string(), tol::VANISHING);
            tols.insert("transport".to_string(), tol::TRANSPORT);
            tols.insert("identity".to_string(), tol::IDENTITY);
            tols.insert("consistency".to_string(), tol::CONSISTENCY);
            let manifest =
                RunManifest::new("all-checks", &g, Some(&profile), &seeds).with_tolerances(tols);
            let text = canonical_json(&with_manifest(&manifest, checks_value(&outcomes)))
                .map_err(|e| input_err(e.to_string()))?;
            emit(&out, &text).map_err(|e| input_err(e.to_string()))?;
            Ok(if outcomes.iter().all(|o| o.passed) { 0 } else { 2 })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err((code, msg)) => {
            eprintln!("{msg}");
            ExitCode::from(code as u8)
        }
    }
}
