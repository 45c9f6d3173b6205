//! Scratch measurements behind frozen baselines (manual, ignored).
use std::f64::consts::PI;
use lplab::gen::{random_divfree, SpectrumKind, SpectrumSpec};
use lplab::identity::IdentityLab;
use lplab::norms::{bernstein_check, NormOperand};
use lplab::{Grid, LpProfile};

#[test]
#[ignore]
fn bernstein_running_max_stability() {
    let grid = Grid::new(32, 2.0 * PI).unwrap();
    let profile = LpProfile::build(grid).unwrap();
    let mut running = [0.0f64; 4];
    let mut at_half = [0.0f64; 4];
    for seed in 0..100u64 {
        let u = random_divfree(grid, &profile, &SpectrumSpec {
            kind: SpectrumKind::PowerLaw { alpha: 1.5 },
            band: (profile.k_min(), profile.k_max()),
            seed: 2000 + seed,
        }).unwrap();
        let rep = bernstein_check(&profile, &NormOperand::Vector(u)).unwrap();
        for rec in &rep.records {
            for (i, (_, r)) in rec.lp_lq.iter().enumerate() {
                running[i] = running[i].max(*r);
            }
        }
        if seed == 49 { at_half = running; }
    }
    for i in 0..4 {
        println!("pair {i}: max50 {:.5} max100 {:.5} drift {:.4}", at_half[i], running[i], (running[i]-at_half[i])/running[i]);
    }
}

#[test]
#[ignore]
fn i232_shape_study() {
    let grid = Grid::new(96, 8.0 * PI).unwrap();
    let profile = LpProfile::build(grid).unwrap();
    for alpha in [0.5f64] {
        println!("==== alpha {alpha}");
        let mut c_abs = Vec::new();
        for idx in 0..8u64 {
            let seed = 1000 + idx;
            let spec = |s| SpectrumSpec {
                kind: SpectrumKind::PowerLaw { alpha },
                band: (profile.k_min(), profile.k_max()),
                seed: s,
            };
            let u = random_divfree(grid, &profile, &spec(seed)).unwrap();
            let b = random_divfree(grid, &profile, &spec(seed + 7000)).unwrap();
            let mut lab = IdentityLab::new(&profile, &u, &b).unwrap();
            let mut signed_series = Vec::new();
            let mut abs_series = Vec::new();
            let mut ratios = Vec::new();
            for k in profile.usable_range() {
                let it = lab.i_terms(k).unwrap();
                signed_series.push(it.terms["I232"].abs());
                abs_series.push(it.terms["I232_abs_sum"]);
                if it.i232_envelope > 0.0 {
                    ratios.push((k, it.terms["I232_abs_sum"] / it.i232_envelope));
                }
            }
            signed_series.reverse();
            abs_series.reverse();
            let runlen = |v: &[f64]| {
                let mut run = 1usize; let mut best = 1usize;
                for w in v.windows(2) {
                    if w[1] <= w[0] * 1.10 { run += 1; } else { run = 1; }
                    best = best.max(run);
                }
                best
            };
            let c = ratios.iter().map(|r| r.1).fold(0.0f64, f64::max);
            c_abs.push(c);
            println!(
                "seed {idx}: run_signed {} run_abs {} ratios {:?} signed {:?}",
                runlen(&signed_series),
                runlen(&abs_series),
                ratios.iter().map(|(k, r)| format!("k{k}:{r:.2e}")).collect::<Vec<_>>(),
                signed_series.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>()
            );
        }
        let lo = c_abs.iter().cloned().fold(f64::MAX, f64::min);
        let hi = c_abs.iter().cloned().fold(f64::MIN, f64::max);
        println!("alpha {alpha}: C_abs in [{lo:.3e}, {hi:.3e}] spread {:.2}", hi / lo);
    }
}
