//! Continuum solution through the Lagrangian potential.
//!
//! With `M̄` the initial mass cumulation and `X̄` its generalized inverse,
//! the Lagrangian potential is `Ψ̄(m) = ∫_0^m X̄` and the velocity potential
//! `V̄(m) = ∫_0^m ū(X̄)`. At time `t`
//!
//! ```text
//! Ψ(·, t) = [Ψ̄ + t V̄]_ε
//! ```
//!
//! and `∂_m Ψ(m, t)` is the position of mass coordinate `m`. The Eulerian
//! fields follow by inverting that map: `M(·, t)` is the inverse of
//! `∂_m Ψ`, `Φ = ∫ M` is the Legendre dual of `Ψ`, `ρ = ∂_x M`.
//! `ε = 0` gives the zero-pressure (point-particle) flow.

use std::io::Write;

use crate::convex::{cluster_decomposition, default_contact_tol};
use crate::cumulative::PiecewiseLinear;
use crate::error::{invalid, Result};
use crate::grid::GridFunction;
use crate::initial::InitialData;
use crate::legendre::{derivative, inverse_many};
use crate::propagator::{flatten_velocity, propagate, PropagatorInput};

/// Density below which the reported velocity is zero.
pub const VACUUM: f64 = 1e-12;

/// Smallest accepted mass grid.
pub const MIN_CELLS: usize = 16;

/// `Ψ(·, t)` and the initial velocity potential `V̄` on the mass grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianState {
    pub psi: GridFunction,
    pub v_potential: GridFunction,
    pub eps: f64,
    pub time: f64,
}

impl LagrangianState {
    pub fn propagator_input(&self) -> Result<PropagatorInput> {
        PropagatorInput::new(self.psi.clone(), self.v_potential.clone(), self.eps)
    }

    /// Position of each mass node, `∂_m Ψ`.
    pub fn positions(&self) -> GridFunction {
        derivative(&self.psi)
    }

    /// The state at `time + dt`.
    pub fn advance(&self, dt: f64) -> Result<Self> {
        let psi = propagate(&self.propagator_input()?, dt)?;
        Ok(Self {
            psi,
            v_potential: self.v_potential.clone(),
            eps: self.eps,
            time: self.time + dt,
        })
    }

    /// `V̄` made linear across the clusters of `Ψ(·, t)`; its slope is the
    /// velocity of each mass coordinate.
    pub fn flattened_velocity(&self) -> Result<GridFunction> {
        let d = cluster_decomposition(&self.psi, self.eps, default_contact_tol(&self.psi))?;
        flatten_velocity(&self.v_potential, &d)
    }

    /// Columns `m,psi,V`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["m", "psi", "V"])?;
        for (i, m) in self.psi.nodes().enumerate() {
            w.write_record([
                m.to_string(),
                self.psi.get(i).to_string(),
                self.v_potential.get(i).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Eulerian fields at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerianSolution {
    /// `Φ(x) = ∫_lo^x M`.
    pub phi: GridFunction,
    pub density: GridFunction,
    pub velocity: GridFunction,
    /// `M(x)` sampled on the x-grid.
    pub mass: GridFunction,
    /// `M(x)` exactly, as the inverse of the piecewise-linear position map.
    pub cumulation: PiecewiseLinear,
    pub time: f64,
}

impl EulerianSolution {
    /// `∫ ρ u dx` by the rectangle rule matching the forward-difference density.
    pub fn momentum(&self) -> f64 {
        let h = self.density.h();
        let n = self.density.n();
        (0..n)
            .map(|i| self.density.get(i) * self.velocity.get(i) * h)
            .sum()
    }

    /// Columns `x,rho,u`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "rho", "u"])?;
        for (i, x) in self.density.nodes().enumerate() {
            w.write_record([
                x.to_string(),
                self.density.get(i).to_string(),
                self.velocity.get(i).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Initial Lagrangian state with the particle size of `data`.
pub fn build_lagrangian(data: &InitialData, n: usize) -> Result<LagrangianState> {
    build_with_eps(data, n, data.eps())
}

fn build_with_eps(data: &InitialData, n: usize, eps: f64) -> Result<LagrangianState> {
    if n < MIN_CELLS {
        return Err(invalid("n", format!("need at least {MIN_CELLS} cells, got {n}")));
    }
    // midpoint rule: exact for velocities that jump between mass cells
    let h = 1.0 / n as f64;
    let levels: Vec<f64> = (0..n).map(|k| (k as f64 + 0.5) * h).collect();
    let x_mid = inverse_many(&data.mass_cumulative(), &levels)?;
    let mut psi = Vec::with_capacity(n + 1);
    let mut vpot = Vec::with_capacity(n + 1);
    let (mut p, mut v) = (0.0, 0.0);
    psi.push(p);
    vpot.push(v);
    for &x in &x_mid {
        p += h * x;
        v += h * data.velocity().eval(x);
        psi.push(p);
        vpot.push(v);
    }
    Ok(LagrangianState {
        psi: GridFunction::new(0.0, 1.0, psi)?,
        v_potential: GridFunction::new(0.0, 1.0, vpot)?,
        eps,
        time: 0.0,
    })
}

/// Eulerian fields of a Lagrangian state on the x-grid `[lo, hi]` with
/// `n_x` cells.
pub fn eulerian(state: &LagrangianState, lo: f64, hi: f64, n_x: usize) -> Result<EulerianSolution> {
    let cumulation = mass_cumulation(&state.psi)?;
    let mass = GridFunction::from_fn(lo, hi, n_x, |x| cumulation.eval(x))?;
    let base = cumulation.integral_to(lo);
    let phi = mass.map(|x, _| cumulation.integral_to(x) - base)?;
    let density = derivative(&mass).map(|_, r| r.max(0.0))?;

    let v_flat = state.flattened_velocity()?;
    let hm = v_flat.h();
    let nm = v_flat.n();
    let slope = |m: f64| {
        let j = ((m / hm).floor().max(0.0) as usize).min(nm - 1);
        (v_flat.get(j + 1) - v_flat.get(j)) / hm
    };
    let hx = mass.h();
    let velocity = density.map(|x, r| {
        if r < VACUUM {
            0.0
        } else {
            slope(cumulation.eval((x + 0.5 * hx).min(hi)))
        }
    })?;
    Ok(EulerianSolution {
        phi,
        density,
        velocity,
        mass,
        cumulation,
        time: state.time,
    })
}

/// Mass cumulation `M(x)` of a Lagrangian potential, the inverse of the
/// position map `m ↦ ∂_m Ψ(m)`.
pub fn mass_cumulation(psi: &GridFunction) -> Result<PiecewiseLinear> {
    position_map(psi)?.inverse()
}

/// Piecewise-linear position map `m ↦ X(m)`: difference quotients of `Ψ` at
/// cell midpoints, extended linearly to `m = 0` and `m = 1` and made
/// nondecreasing.
fn position_map(psi: &GridFunction) -> Result<PiecewiseLinear> {
    let h = psi.h();
    let n = psi.n();
    let v = psi.values();
    let mid: Vec<f64> = v.windows(2).map(|w| (w[1] - w[0]) / h).collect();
    let mut ms = Vec::with_capacity(n + 2);
    let mut xs = Vec::with_capacity(n + 2);
    let (first, last) = if n >= 2 {
        (
            mid[0] - 0.5 * (mid[1] - mid[0]),
            mid[n - 1] + 0.5 * (mid[n - 1] - mid[n - 2]),
        )
    } else {
        (mid[0], mid[0])
    };
    ms.push(0.0);
    xs.push(first.min(mid[0]));
    for (j, &x) in mid.iter().enumerate() {
        ms.push((j as f64 + 0.5) * h);
        xs.push(x);
    }
    ms.push(1.0);
    xs.push(last.max(mid[n - 1]));
    for k in 1..xs.len() {
        xs[k] = xs[k].max(xs[k - 1]);
    }
    PiecewiseLinear::new(ms, xs)
}

/// The x-grid used for a solution at time `t`: the data interval widened by
/// the largest distance mass can travel.
pub fn solution_interval(data: &InitialData, t: f64) -> (f64, f64) {
    let reach = data.velocity_bound() * t;
    (data.density().lo() - reach, data.density().hi() + reach)
}

fn solve_with_eps(data: &InitialData, t: f64, n: usize, eps: f64) -> Result<EulerianSolution> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid("t", format!("must be finite and >= 0, got {t}")));
    }
    let state = build_with_eps(data, n, eps)?.advance(t)?;
    let (lo, hi) = solution_interval(data, t);
    eulerian(&state, lo, hi, n)
}

/// Finite-size solution at time `t` on mass and space grids with `n` cells.
pub fn solve_finite_size(data: &InitialData, t: f64, n: usize) -> Result<EulerianSolution> {
    if !(data.eps() > 0.0) {
        return Err(invalid("eps", "finite-size solver needs eps > 0"));
    }
    solve_with_eps(data, t, n, data.eps())
}

/// Zero-pressure (`ε = 0`) solution; atoms appear as one-cell spikes.
pub fn solve_zero_pressure(data: &InitialData, t: f64, n: usize) -> Result<EulerianSolution> {
    solve_with_eps(data, t, n, 0.0)
}

/// The Lagrangian state at `t` together with its Eulerian fields.
pub fn solve_with_state(data: &InitialData, t: f64, n: usize, eps: f64) -> Result<(LagrangianState, EulerianSolution)> {
    let state = build_with_eps(data, n, eps)?.advance(t)?;
    let (lo, hi) = solution_interval(data, t);
    let sol = eulerian(&state, lo, hi, n)?;
    Ok((state, sol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::is_eps_convex;
    use crate::cumulative::l1_distance;
    use crate::legendre::legendre;

    fn data(
        lo: f64,
        hi: f64,
        n: usize,
        rho: impl Fn(f64) -> f64,
        u: impl Fn(f64) -> f64,
        eps: f64,
    ) -> InitialData {
        let r = GridFunction::from_fn(lo, hi, n, rho).unwrap();
        let v = GridFunction::from_fn(lo, hi, n, u).unwrap();
        InitialData::normalized(r, v, eps).unwrap()
    }

    fn uniform_block(v0: f64, eps: f64, n: usize) -> InitialData {
        data(-0.5, 1.5, n, |x| if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 }, move |_| v0, eps)
    }

    #[test]
    fn uniform_block_potential() {
        let n = 1024;
        let s = build_lagrangian(&uniform_block(0.0, 0.5, n), n).unwrap();
        let h = 1.0 / n as f64;
        for (j, m) in s.psi.nodes().enumerate() {
            assert!((s.psi.get(j) - 0.5 * m * m).abs() <= 2.0 * h, "{m}");
        }
        assert!(is_eps_convex(&s.psi, 0.5, 1e-12));
    }

    #[test]
    fn constant_velocity_potential() {
        let v0 = 0.8;
        let s = build_lagrangian(&uniform_block(v0, 0.5, 512), 512).unwrap();
        for (j, m) in s.v_potential.nodes().enumerate() {
            assert!((s.v_potential.get(j) - v0 * m).abs() < 1e-14);
        }
    }

    #[test]
    fn triangular_velocity_potential_matches_quadrature() {
        let n = 4096;
        let d = data(-1.25, 1.25, n, |x| (1.0 - x.abs()).max(0.0), |x| -x, 0.5);
        let s = build_lagrangian(&d, n).unwrap();
        // X(m) for the triangle, then V(m) = -∫_0^m X by fine midpoint rule
        let x_of = |m: f64| {
            if m <= 0.5 {
                (2.0 * m).sqrt() - 1.0
            } else {
                1.0 - (2.0 * (1.0 - m)).sqrt()
            }
        };
        for j in (0..=n).step_by(256) {
            let m = j as f64 / n as f64;
            let k = 20_000;
            let quad: f64 = (0..k)
                .map(|i| -x_of((i as f64 + 0.5) * m / k as f64) * m / k as f64)
                .sum();
            assert!((s.v_potential.get(j) - quad).abs() < 1e-6, "{m}");
        }
    }

    #[test]
    fn rejects_small_grids() {
        assert!(build_lagrangian(&uniform_block(0.0, 0.5, 64), 8).is_err());
    }

    #[test]
    fn translation() {
        let (v0, t, n) = (0.5, 1.0, 2048);
        let d = uniform_block(v0, 0.5, n);
        let sol = solve_finite_size(&d, t, n).unwrap();
        let h = sol.density.h();
        // the sampled block has one-cell ramps; compare cell averages away from them
        for (i, x) in sol.density.nodes().enumerate() {
            let y = x - v0 * t;
            if (y - 0.0).abs() > 2.0 * h && (y - 1.0).abs() > 2.0 * h {
                let expect = d.density().eval(y);
                assert!((sol.density.get(i) - expect).abs() < 1e-9, "{x}");
                if expect > 0.0 {
                    assert!((sol.velocity.get(i) - v0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn round_trip_at_zero() {
        let n = 2048;
        let d = data(-1.25, 1.25, n, |x| (1.0 - x.abs()).max(0.0), |x| -x, 0.5);
        let sol = solve_finite_size(&d, 0.0, n).unwrap();
        let h = sol.density.h();
        for (i, x) in sol.density.nodes().enumerate() {
            if x.abs() < 0.95 && x.abs() > 0.05 {
                assert!((sol.density.get(i) - (1.0 - x.abs())).abs() < 10.0 * h, "{x}");
                assert!((sol.velocity.get(i) + x).abs() < 10.0 * h, "{x}");
            }
        }
        assert!((sol.density.integral() - 1.0).abs() < 5.0 * h);
    }

    #[test]
    fn head_on_blocks_form_packed_block() {
        let eps = 0.5;
        let n = 2048;
        let d = data(
            -1.0,
            1.0,
            n,
            |x| if (0.25..=0.75).contains(&x.abs()) { 1.0 } else { 0.0 },
            |x| if x < 0.0 { 1.0 } else { -1.0 },
            eps,
        );
        let sol = solve_finite_size(&d, 2.0, n).unwrap();
        let h = sol.density.h();
        // all mass stops in [-eps/2, eps/2] at density 1/eps
        for (i, x) in sol.density.nodes().enumerate() {
            if x.abs() < 0.25 - 2.0 * h {
                assert!((sol.density.get(i) - 1.0 / eps).abs() < 1e-6, "{x}");
                assert!(sol.velocity.get(i).abs() < 1e-12, "{x}");
            }
            if x.abs() > 0.25 + 2.0 * h {
                assert!(sol.density.get(i) < 1e-9);
            }
        }
        let max = sol.density.max_abs();
        assert!(max <= (1.0 / eps) * (1.0 + 5.0 * h / eps));
        let exact = PiecewiseLinear::new(vec![-0.25, 0.25], vec![0.0, 1.0]).unwrap();
        assert!(l1_distance(&sol.cumulation, &exact) < 5.0 * h);
    }

    #[test]
    fn phi_is_legendre_dual_of_psi() {
        let n = 1024;
        let d = data(-1.25, 1.25, n, |x| (1.0 - x.abs()).max(0.0), |x| -x, 0.5);
        let (state, sol) = solve_with_state(&d, 0.7, n, 0.5).unwrap();
        let dual = legendre(&state.psi, sol.phi.lo(), sol.phi.hi(), sol.phi.n()).unwrap();
        // Φ is fixed up to a constant by Φ(lo) = 0 on the vacuum side
        let shift = dual.get(0) - sol.phi.get(0);
        let err = dual
            .values()
            .iter()
            .zip(sol.phi.values())
            .fold(0.0f64, |e, (a, b)| e.max((a - shift - b).abs()));
        assert!(err < 10.0 * sol.phi.h(), "{err}");
        let slopes = derivative(&sol.phi);
        assert!(slopes.values().windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn zero_pressure_point_pair_collapses() {
        let n = 4096;
        let d = data(
            -1.0,
            1.0,
            n,
            |x| if (x.abs() - 0.5).abs() < 0.05 { 1.0 } else { 0.0 },
            |x| if x < 0.0 { 1.0 } else { -1.0 },
            0.0,
        );
        let sol = solve_zero_pressure(&d, 1.0, n).unwrap();
        let step = PiecewiseLinear::new(vec![0.0, 0.0], vec![0.0, 1.0]).unwrap();
        assert!(l1_distance(&sol.cumulation, &step) < 5.0 * sol.mass.h());
        assert!(sol.momentum().abs() < 1e-9);
    }

    #[test]
    fn momentum_is_conserved() {
        let n = 2048;
        let d = data(-1.25, 1.25, n, |x| (1.0 - x.abs()).max(0.0), |x| 0.3 - x, 0.4);
        let c = d.velocity_bound();
        let p0 = solve_finite_size(&d, 0.0, n).unwrap().momentum();
        for t in [0.5, 1.0, 2.0] {
            let sol = solve_finite_size(&d, t, n).unwrap();
            let h = sol.density.h();
            assert!((sol.momentum() - p0).abs() < 10.0 * h * c, "{t}");
            assert!((sol.density.integral() - 1.0).abs() < 5.0 * h);
        }
    }
}
