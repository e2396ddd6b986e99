//! Inputs shared by the kernel benchmarks.

use sticky_core::continuum::build_lagrangian;
use sticky_core::harness::Preset;
use sticky_core::particles::init_particles;
use sticky_core::{GridFunction, ParticleSystem, PropagatorInput};

/// Particle size used by every benchmark input.
pub const EPS: f64 = 0.25;

/// A rough, non-convex function on `[0, 1]` with `n` cells.
pub fn rough_function(n: usize) -> GridFunction {
    GridFunction::from_fn(0.0, 1.0, n, |m| {
        0.5 * m * m + 0.05 * (37.0 * m).sin() + 0.02 * (113.0 * m).cos()
    })
    .expect("valid grid")
}

/// A convex function on `[-1, 1]` for the Legendre transform.
pub fn convex_function(n: usize) -> GridFunction {
    GridFunction::from_fn(-1.0, 1.0, n, |x| x * x + 0.25 * x.abs().powi(3)).expect("valid grid")
}

/// Head-on collision of two blocks with `n` particles.
pub fn headon_system(n: usize) -> ParticleSystem {
    let data = Preset::TwoBlockHeadon.build(EPS, 4096).expect("preset");
    init_particles(&data, n).expect("particles")
}

/// Lagrangian data of the head-on preset on an `n`-cell mass grid.
pub fn headon_input(n: usize) -> PropagatorInput {
    let data = Preset::TwoBlockHeadon.build(EPS, n).expect("preset");
    build_lagrangian(&data, n)
        .expect("lagrangian")
        .propagator_input()
        .expect("input")
}
