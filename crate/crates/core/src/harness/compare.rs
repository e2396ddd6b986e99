//! Particle simulator against the propagator at finite `N`.
//!
//! For `N` particles the potential `Ψ̃_N(m, t) = ∫_0^m X_N` built from the
//! simulator equals `F_t[Ψ̃_N(·, 0)]` with the particle velocity potential,
//! for every `t`. The two sides are computed independently and compared.

use std::time::Instant;

use serde::Serialize;

use crate::continuum::mass_cumulation;
use crate::cumulative::{l1_distance, sup_distance};
use crate::error::Result;
use crate::particles::ParticleSystem;
use crate::propagator::{propagate, PropagatorInput};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub time: f64,
    /// `sup_m |Ψ̃_N − Ψ_N|` over the mass grid.
    pub sup_psi: f64,
    /// `∫ |M_sim − M_prop| dx`.
    pub w1: f64,
    /// `sup_x |M_sim − M_prop|`.
    pub sup_cumulative: f64,
    /// Collision instants up to `time`.
    pub collisions: usize,
    #[serde(skip)]
    pub runtime_sim_ms: f64,
    #[serde(skip)]
    pub runtime_prop_ms: f64,
}

/// Propagator input for a particle system: its potential and its velocity
/// potential on the mass grid with `n` cells.
pub fn particle_potentials(sys: &ParticleSystem, n: usize) -> Result<PropagatorInput> {
    PropagatorInput::new(sys.psi_tilde(n)?, sys.velocity_potential(n)?, sys.eps())
}

/// Compares both engines at each of `times` (nondecreasing), starting from
/// `sys` at time 0.
pub fn compare_system(sys: &ParticleSystem, times: &[f64], n: usize) -> Result<Vec<ComparisonReport>> {
    let input = particle_potentials(sys, n)?;
    let mut sim = sys.clone();
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let clock = Instant::now();
        sim.advance_to(t)?;
        let psi_sim = sim.psi_tilde(n)?;
        let m_sim = sim.mass_cumulation();
        let runtime_sim_ms = ms(clock);

        let clock = Instant::now();
        let psi_prop = propagate(&input, t)?;
        let m_prop = mass_cumulation(&psi_prop)?;
        let runtime_prop_ms = ms(clock);

        out.push(ComparisonReport {
            time: t,
            sup_psi: psi_sim.sup_distance(&psi_prop)?,
            w1: l1_distance(&m_sim, &m_prop),
            sup_cumulative: sup_distance(&m_sim, &m_prop),
            collisions: sim.collision_log().len(),
            runtime_sim_ms,
            runtime_prop_ms,
        });
    }
    Ok(out)
}

/// Time of the first collision of `sys`, if any.
pub fn first_collision_time(sys: &ParticleSystem) -> Option<f64> {
    sys.next_collision().map(|c| c.time)
}

fn ms(clock: Instant) -> f64 {
    clock.elapsed().as_secs_f64() * 1e3
}
