//! Manual timing probe for the full-shell sweep on the large grid.
//! Run with: cargo test -p lplab --test sweep_timing -- --ignored --nocapture

use std::f64::consts::PI;
use std::time::Instant;

use lplab::gen::{random_divfree, SpectrumKind, SpectrumSpec};
use lplab::identity::{BoundFlavor, IdentityLab};
use lplab::{Grid, LpProfile};

#[test]
#[ignore]
fn time_one_seed_full_sweep() {
    let grid = Grid::new(64, 4.0 * PI).unwrap();
    let t0 = Instant::now();
    let profile = LpProfile::build(grid).unwrap();
    println!("profile build: {:.2?} (k {}..{})", t0.elapsed(), profile.k_min(), profile.k_max());

    let t0 = Instant::now();
    let mk = |seed| {
        random_divfree(
            grid,
            &profile,
            &SpectrumSpec {
                kind: SpectrumKind::PowerLaw { alpha: 1.5 },
                band: (profile.k_min(), profile.k_max()),
                seed,
            },
        )
        .unwrap()
    };
    let (u, b) = (mk(1), mk(2));
    println!("generation: {:.2?}", t0.elapsed());

    let t0 = Instant::now();
    let mut lab = IdentityLab::new(&profile, &u, &b).unwrap();
    println!("lab setup (residual): {:.2?}", t0.elapsed());

    for k in profile.usable_range() {
        let tk = Instant::now();
        let _t = lab.transport_identities(k).unwrap();
        let _i = lab.i_terms(k).unwrap();
        let _e = lab.energy_identity(k).unwrap();
        let _j1 = lab.j_bounds(k, BoundFlavor::Linf).unwrap();
        let _j2 = lab.j_bounds(k, BoundFlavor::L3).unwrap();
        println!("shell k={k}: {:.2?} lhs={:.6e} res_u={:.3e} imbalance={:.2e} scale={:.2e}", tk.elapsed(), _e.lhs, _e.residual_corrections["res_u"], _e.imbalance, _e.scale);
    }
}
