//! Exact event-driven simulation of sticky finite-size particles.
//!
//! `N` identical rigid rods of length `ν = ε/N` and mass `1/N` move freely
//! and stick on contact. Between collisions every cluster moves
//! ballistically, so the state is advanced from one collision time to the
//! next in closed form.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::cumulative::PiecewiseLinear;
use crate::error::{invalid, Error, Result};
use crate::grid::GridFunction;
use crate::initial::InitialData;
use crate::legendre::inverse_many;

/// Relative tolerance for grouping simultaneous collisions and for contact.
pub const TIME_TOL: f64 = 1e-12;

/// A rigid compound particle made of the consecutive particles
/// `first..=last` (1-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cluster {
    pub left_edge: f64,
    pub size: f64,
    pub mass: f64,
    pub velocity: f64,
    pub first: usize,
    pub last: usize,
}

impl Cluster {
    pub fn count(&self) -> usize {
        self.last - self.first + 1
    }

    pub fn right_edge(&self) -> f64 {
        self.left_edge + self.size
    }

    pub fn momentum(&self) -> f64 {
        self.mass * self.velocity
    }
}

/// Sticks `b` onto the right of `a`, conserving mass and momentum.
///
/// `nu` and `n` are the particle size and count; size and mass are recomputed
/// from the particle count so they stay exact multiples.
pub fn merge(a: &Cluster, b: &Cluster, nu: f64, n: usize) -> Result<Cluster> {
    if a.last + 1 != b.first {
        return Err(Error::InvalidCluster(format!(
            "clusters {}..={} and {}..={} are not adjacent",
            a.first, a.last, b.first, b.last
        )));
    }
    let gap = b.left_edge - a.right_edge();
    let scale = a.left_edge.abs().max(b.right_edge().abs()).max(1.0);
    if gap.abs() > TIME_TOL * scale {
        return Err(Error::InvalidCluster(format!(
            "clusters {}..={} and {}..={} are not touching (gap {gap:e})",
            a.first, a.last, b.first, b.last
        )));
    }
    let mass = a.mass + b.mass;
    let count = a.count() + b.count();
    Ok(Cluster {
        left_edge: a.left_edge,
        size: count as f64 * nu,
        mass: count as f64 / n as f64,
        velocity: (a.momentum() + b.momentum()) / mass,
        first: a.first,
        last: b.last,
    })
}

/// One collision instant and the clusters formed at it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub t: f64,
    /// Particle ranges `[first, last]` of the clusters formed.
    pub merged: Vec<[usize; 2]>,
}

/// The earliest upcoming collision.
#[derive(Debug, Clone, PartialEq)]
pub struct NextCollision {
    pub time: f64,
    /// Indices `i` of colliding neighbour pairs `(i, i + 1)`, increasing.
    pub pairs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSystem {
    clusters: Vec<Cluster>,
    n_particles: usize,
    eps: f64,
    nu: f64,
    time: f64,
    collision_log: Vec<CollisionEvent>,
}

impl ParticleSystem {
    /// Builds a system from clusters of single particles given by their left
    /// edges and velocities.
    pub fn from_particles(eps: f64, left_edges: &[f64], velocities: &[f64]) -> Result<Self> {
        let n = left_edges.len();
        if n == 0 || velocities.len() != n {
            return Err(invalid(
                "N",
                format!("need N >= 1 positions and velocities, got {} and {}", n, velocities.len()),
            ));
        }
        if !(eps.is_finite() && eps > 0.0) {
            return Err(invalid("eps", format!("particles need eps > 0, got {eps}")));
        }
        let nu = eps / n as f64;
        let clusters: Vec<Cluster> = left_edges
            .iter()
            .zip(velocities)
            .enumerate()
            .map(|(k, (&x, &v))| Cluster {
                left_edge: x,
                size: nu,
                mass: 1.0 / n as f64,
                velocity: v,
                first: k + 1,
                last: k + 1,
            })
            .collect();
        let sys = Self {
            clusters,
            n_particles: n,
            eps,
            nu,
            time: 0.0,
            collision_log: Vec::new(),
        };
        if let Some((i, g)) = sys.gaps().enumerate().find(|(_, g)| *g < -sys.contact_tol()) {
            return Err(Error::InvalidCluster(format!(
                "particles {} and {} overlap by {}",
                i + 1,
                i + 2,
                -g
            )));
        }
        Ok(sys)
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn collision_log(&self) -> &[CollisionEvent] {
        &self.collision_log
    }

    /// Gaps between neighbouring clusters.
    pub fn gaps(&self) -> impl Iterator<Item = f64> + '_ {
        self.clusters
            .windows(2)
            .map(|w| w[1].left_edge - w[0].right_edge())
    }

    pub fn min_gap(&self) -> Option<f64> {
        self.gaps().reduce(f64::min)
    }

    pub fn total_mass(&self) -> f64 {
        self.clusters.iter().map(|c| c.mass).sum()
    }

    pub fn momentum(&self) -> f64 {
        self.clusters.iter().map(Cluster::momentum).sum()
    }

    /// `(first, last)` particle ranges of the clusters.
    pub fn partition(&self) -> Vec<(usize, usize)> {
        self.clusters.iter().map(|c| (c.first, c.last)).collect()
    }

    fn length_scale(&self) -> f64 {
        let a = self.clusters[0].left_edge.abs();
        let b = self.clusters[self.clusters.len() - 1].right_edge().abs();
        a.max(b).max(1.0)
    }

    fn contact_tol(&self) -> f64 {
        TIME_TOL * self.length_scale()
    }

    /// Earliest time at which an approaching neighbour pair touches, with all
    /// pairs touching within the grouping tolerance of it.
    pub fn next_collision(&self) -> Option<NextCollision> {
        let candidates: Vec<(usize, f64)> = self
            .clusters
            .windows(2)
            .enumerate()
            .filter_map(|(i, w)| {
                let dv = w[0].velocity - w[1].velocity;
                (dv > 0.0).then(|| {
                    let gap = (w[1].left_edge - w[0].right_edge()).max(0.0);
                    (i, gap / dv)
                })
            })
            .collect();
        let dt = candidates.iter().map(|c| c.1).reduce(f64::min)?;
        let group_tol = TIME_TOL * (self.time + dt).max(1.0);
        let pairs = candidates
            .iter()
            .filter(|c| c.1 <= dt + group_tol)
            .map(|c| c.0)
            .collect();
        Some(NextCollision {
            time: self.time + dt,
            pairs,
        })
    }

    fn translate(&mut self, t: f64) {
        let dt = t - self.time;
        if dt > 0.0 {
            for c in &mut self.clusters {
                c.left_edge += c.velocity * dt;
            }
        }
        self.time = t;
    }

    /// Merges every run of consecutive colliding pairs into one cluster.
    fn merge_pairs(&mut self, pairs: &[usize]) -> Result<Vec<[usize; 2]>> {
        let mut is_pair = vec![false; self.clusters.len()];
        for &i in pairs {
            is_pair[i] = true;
        }
        let mut out: Vec<Cluster> = Vec::with_capacity(self.clusters.len());
        let mut formed = Vec::new();
        let mut i = 0;
        while i < self.clusters.len() {
            let mut c = self.clusters[i];
            let start = i;
            while i < is_pair.len() && is_pair[i] {
                let mut next = self.clusters[i + 1];
                // positions agree to rounding; glue exactly
                next.left_edge = c.right_edge();
                c = merge(&c, &next, self.nu, self.n_particles)?;
                i += 1;
            }
            if i > start {
                formed.push([c.first, c.last]);
            }
            out.push(c);
            i += 1;
        }
        self.clusters = out;
        Ok(formed)
    }

    /// Runs the event loop up to time `t`.
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        if !(t >= self.time) {
            return Err(invalid(
                "t",
                format!("cannot advance backwards from {} to {t}", self.time),
            ));
        }
        let limit = self.n_particles - 1;
        while let Some(next) = self.next_collision() {
            if next.time > t {
                break;
            }
            self.translate(next.time);
            let formed = self.merge_pairs(&next.pairs)?;
            self.log(next.time, formed);
            if self.collision_log.len() > limit {
                return Err(Error::EventOverflow { limit });
            }
        }
        self.translate(t);
        Ok(())
    }

    /// Records clusters formed at `t`, folding cascades at the same instant
    /// into one event.
    fn log(&mut self, t: f64, formed: Vec<[usize; 2]>) {
        if let Some(last) = self.collision_log.last_mut() {
            if t - last.t <= TIME_TOL * t.max(1.0) {
                last.merged.retain(|r| !formed.iter().any(|f| f[0] <= r[0] && r[1] <= f[1]));
                last.merged.extend(formed);
                last.merged.sort_unstable();
                return;
            }
        }
        self.collision_log.push(CollisionEvent { t, merged: formed });
    }

    /// Writes the collision log as JSON lines.
    pub fn write_collision_log<W: Write>(&self, mut out: W) -> Result<()> {
        for e in &self.collision_log {
            serde_json::to_writer(&mut out, e)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    fn sample(&self, lo: f64, hi: f64, n: usize, value: impl Fn(&Cluster) -> f64) -> Result<GridFunction> {
        GridFunction::from_fn(lo, hi, n, |x| {
            let k = self.clusters.partition_point(|c| c.right_edge() <= x);
            match self.clusters.get(k) {
                Some(c) if c.left_edge <= x => value(c),
                _ => 0.0,
            }
        })
    }

    /// `1/ε` inside clusters, 0 elsewhere, sampled at the nodes of `[lo, hi]`.
    pub fn density_profile(&self, lo: f64, hi: f64, n: usize) -> Result<GridFunction> {
        let rho = 1.0 / self.eps;
        self.sample(lo, hi, n, |_| rho)
    }

    /// Cluster velocity inside clusters, 0 elsewhere.
    pub fn velocity_profile(&self, lo: f64, hi: f64, n: usize) -> Result<GridFunction> {
        self.sample(lo, hi, n, |c| c.velocity)
    }

    /// Exact mass cumulation `M_N(x)`: piecewise linear with slope `1/ε`
    /// inside clusters and flat across gaps.
    pub fn mass_cumulation(&self) -> PiecewiseLinear {
        let mut xs = Vec::with_capacity(2 * self.clusters.len());
        let mut ys = Vec::with_capacity(2 * self.clusters.len());
        let mut count = 0usize;
        let mut x_prev = f64::NEG_INFINITY;
        for c in &self.clusters {
            let a = c.left_edge.max(x_prev);
            xs.push(a);
            ys.push(count as f64 / self.n_particles as f64);
            count += c.count();
            x_prev = c.right_edge().max(a);
            xs.push(x_prev);
            ys.push(count as f64 / self.n_particles as f64);
        }
        PiecewiseLinear::new(xs, ys).expect("knots are sorted")
    }

    /// `(left edge, velocity)` of each particle, 1-based index `k` at `k - 1`.
    fn particle_states(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.n_particles);
        for c in &self.clusters {
            for j in 0..c.count() {
                out.push((c.left_edge + j as f64 * self.nu, c.velocity));
            }
        }
        out
    }

    /// Position `X_N(m)` of mass coordinate `m_j = j/n`, left-continuous, with
    /// `X_N(0) = X_N(0+)`.
    pub fn positions_in_mass(&self, n: usize) -> Vec<f64> {
        let parts = self.particle_states();
        let big_n = self.n_particles as u128;
        let nn = n as u128;
        (0..=n)
            .map(|j| {
                let jn = j as u128 * big_n;
                if j == 0 {
                    return parts[0].0;
                }
                // particle k = ceil(jN/n) holds mass level j/n
                let k = jn.div_ceil(nn);
                let below = (k - 1) * nn;
                let frac = (jn - below) as f64 / (nn * big_n) as f64;
                parts[(k - 1) as usize].0 + frac * self.eps
            })
            .collect()
    }

    /// `Ψ̃_N(m) = ∫_0^m X_N(s) ds` on the mass grid with `n` cells, integrated
    /// by the trapezoid rule from the left-continuous samples of `X_N`.
    pub fn psi_tilde(&self, n: usize) -> Result<GridFunction> {
        if n == 0 {
            return Err(invalid("n", "need at least one cell"));
        }
        GridFunction::new(0.0, 1.0, self.positions_in_mass(n))
            .map(|x| x.cumulative())
    }

    /// `V_N(m) = ∫_0^m v_N(s) ds` where `v_N` is the particle velocity as a
    /// step function of mass; integrated exactly.
    pub fn velocity_potential(&self, n: usize) -> Result<GridFunction> {
        if n == 0 {
            return Err(invalid("n", "need at least one cell"));
        }
        let parts = self.particle_states();
        let big_n = self.n_particles;
        let mut prefix = Vec::with_capacity(big_n + 1);
        prefix.push(0.0);
        for p in &parts {
            prefix.push(prefix[prefix.len() - 1] + p.1 / big_n as f64);
        }
        let values = (0..=n)
            .map(|j| {
                let jn = j as u128 * big_n as u128;
                let full = (jn / n as u128) as usize;
                if full >= big_n {
                    return prefix[big_n];
                }
                let rem = (jn - full as u128 * n as u128) as f64 / (n as f64 * big_n as f64);
                prefix[full] + rem * parts[full].1
            })
            .collect();
        GridFunction::new(0.0, 1.0, values)
    }
}

/// Places `N` particles at the quantiles of the initial density.
///
/// Particle `i` is centred at `x` with `M̄(x) = (i - 1/2)/N`; a left-to-right
/// pass then shifts particles right as little as needed to remove overlaps.
/// Velocities are `ū` at the unshifted centres.
pub fn init_particles(data: &InitialData, n: usize) -> Result<ParticleSystem> {
    if n == 0 {
        return Err(invalid("N", "need at least one particle"));
    }
    let eps = data.eps();
    if !(eps > 0.0) {
        return Err(invalid("eps", format!("particles need eps > 0, got {eps}")));
    }
    let (a, b) = data.support();
    if eps > (b - a) + data.density().h() {
        return Err(Error::InvalidInitialData(format!(
            "total particle length {eps} exceeds the support length {}",
            b - a
        )));
    }
    let nu = eps / n as f64;
    let levels: Vec<f64> = (1..=n).map(|i| (i as f64 - 0.5) / n as f64).collect();
    let centres = inverse_many(&data.mass_cumulative(), &levels)?;
    let velocities: Vec<f64> = centres.iter().map(|&c| data.velocity().eval(c)).collect();
    let mut lefts: Vec<f64> = centres.iter().map(|c| c - 0.5 * nu).collect();
    for k in 1..n {
        lefts[k] = lefts[k].max(lefts[k - 1] + nu);
    }
    ParticleSystem::from_particles(eps, &lefts, &velocities)
}
