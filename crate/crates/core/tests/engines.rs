use sticky_core::continuum::{build_lagrangian, solve_finite_size, solve_with_state, solve_zero_pressure};
use sticky_core::harness::compare::compare_system;
use sticky_core::harness::presets::Preset;
use sticky_core::particles::init_particles;
use sticky_core::{l1_distance, ParticleSystem, PiecewiseLinear};

#[test]
fn head_on_blocks_match_simulator() {
    let n_grid = 4096;
    let big_n = 1024;
    let data = Preset::TwoBlockHeadon.build(0.5, n_grid).unwrap();
    let t = 3.0;
    let sol = solve_finite_size(&data, t, n_grid).unwrap();
    let mut sys = init_particles(&data, big_n).unwrap();
    sys.advance_to(t).unwrap();
    let w1 = l1_distance(&sol.cumulation, &sys.mass_cumulation());
    let h = sol.density.h();
    assert!(w1 <= 5.0 / big_n as f64 + 5.0 * h, "{w1}");
    // all mass in one packed block at rest
    assert_eq!(sys.clusters().len(), 1);
    assert!(sys.clusters()[0].velocity.abs() < 1e-12);
    let peak = sol.density.max_abs();
    assert!((peak - 2.0).abs() < 1e-9, "{peak}");
}

#[test]
fn two_particle_head_on_identity() {
    let sys = ParticleSystem::from_particles(0.5, &[-1.0, 0.75], &[1.0, -1.0]).unwrap();
    for n in [256, 1024, 4096] {
        let h = 1.0 / n as f64;
        for rep in compare_system(&sys, &[0.5, 1.0, 3.0], n).unwrap() {
            assert!(rep.sup_psi <= 10.0 * h, "n={n} {rep:?}");
        }
    }
}

#[test]
fn random_system_identity_refines() {
    let data = Preset::RandomBump(11).build(0.5, 4096).unwrap();
    let sys = init_particles(&data, 128).unwrap();
    let t = 2.0;
    let fine = compare_system(&sys, &[t], 4096).unwrap()[0].clone();
    let coarse = compare_system(&sys, &[t], 1024).unwrap()[0].clone();
    assert!(fine.collisions > 10);
    let c_est = coarse.sup_psi * 1024.0;
    assert!(fine.sup_psi <= 1.5 * c_est / 4096.0, "{fine:?} {coarse:?}");
}

#[test]
fn zero_pressure_atoms_collide() {
    let data = Preset::PointPair.build(0.0, 4096).unwrap();
    // before contact the blocks are untouched translates; afterwards one atom
    let early = solve_zero_pressure(&data, 0.2, 4096).unwrap();
    assert!(early.density.max_abs() < 6.0);
    let late = solve_zero_pressure(&data, 1.0, 4096).unwrap();
    let step = PiecewiseLinear::new(vec![0.0, 0.0], vec![0.0, 1.0]).unwrap();
    assert!(l1_distance(&late.cumulation, &step) <= 5.0 * late.mass.h());
    assert!(late.density.max_abs() > 100.0);
}

#[test]
fn continuum_invariants_along_time() {
    for preset in [Preset::Triangular, Preset::RiemannShear, Preset::RandomBump(4)] {
        let eps = 0.4;
        let n = 2048;
        let data = preset.build(eps, n).unwrap();
        let c = data.velocity_bound();
        let p0 = solve_finite_size(&data, 0.0, n).unwrap().momentum();
        for t in [0.5, 1.0, 2.0] {
            let (state, sol) = solve_with_state(&data, t, n, eps).unwrap();
            let h = sol.density.h();
            assert!((sol.density.integral() - 1.0).abs() <= 5.0 * h);
            assert!((sol.momentum() - p0).abs() <= 10.0 * h * c, "{}", preset.name());
            assert!(sol.density.max_abs() <= (1.0 / eps) * (1.0 + 5.0 * h / eps));
            let slopes = sticky_core::derivative(&sol.phi);
            assert!(slopes.values().windows(2).all(|w| w[1] >= w[0] - 1e-12));
            // four substeps agree with one step
            let input = build_lagrangian(&data, n).unwrap().propagator_input().unwrap();
            let sched: Vec<f64> = (1..=4).map(|k| t * k as f64 / 4.0).collect();
            let stepped = sticky_core::evolve_schedule(&input, &sched).unwrap();
            let err = stepped[3].sup_distance(&state.psi).unwrap();
            assert!(err <= 10.0 * state.psi.h() * state.psi.max_abs().max(1.0));
        }
    }
}
