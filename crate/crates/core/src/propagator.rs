//! The Lagrangian propagator `F_t[Ψ] = [Ψ + t V_Ψ]_ε`.

use crate::convex::{cluster_decomposition, default_contact_tol, eps_convex_hull, is_eps_convex, worst_eps_deficit, ClusterDecomposition};
use crate::error::{invalid, Error, Result};
use crate::grid::GridFunction;

/// Relative tolerance on second differences when validating `Ψ`.
const CONVEXITY_REL: f64 = 1e-10;

/// An eps-convex potential `Ψ` on `[0, 1]` with a velocity potential `V`
/// on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorInput {
    psi: GridFunction,
    v_potential: GridFunction,
    eps: f64,
}

impl PropagatorInput {
    /// Checks that the grids agree, lie on `[0, 1]`, and that `psi` is
    /// eps-convex. `eps = 0` is accepted and gives the zero-pressure flow.
    pub fn new(psi: GridFunction, v_potential: GridFunction, eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(invalid("eps", format!("must be finite and >= 0, got {eps}")));
        }
        psi.ensure_same_grid(&v_potential)?;
        if psi.lo() != 0.0 || psi.hi() != 1.0 {
            return Err(Error::GridMismatch(format!(
                "mass grid must be [0, 1], got [{}, {}]",
                psi.lo(),
                psi.hi()
            )));
        }
        let tol = CONVEXITY_REL * psi.max_abs().max(1.0);
        if !is_eps_convex(&psi, eps, tol) {
            let (index, deficit) = worst_eps_deficit(&psi, eps).expect("interior node");
            return Err(Error::NotEpsConvex { eps, index, deficit });
        }
        Ok(Self {
            psi,
            v_potential,
            eps,
        })
    }

    pub fn psi(&self) -> &GridFunction {
        &self.psi
    }

    pub fn v_potential(&self) -> &GridFunction {
        &self.v_potential
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Cluster decomposition of `psi` at the default contact tolerance.
    pub fn decomposition(&self) -> ClusterDecomposition {
        cluster_decomposition(&self.psi, self.eps, default_contact_tol(&self.psi))
            .expect("eps validated")
    }
}

/// `V_Ψ`: equal to `V` at exposed nodes and linear across every cluster
/// interval.
pub fn flatten_velocity(v_potential: &GridFunction, decomp: &ClusterDecomposition) -> Result<GridFunction> {
    if decomp.node_count() != v_potential.len() {
        return Err(Error::GridMismatch(format!(
            "decomposition has {} nodes, velocity potential has {}",
            decomp.node_count(),
            v_potential.len()
        )));
    }
    let mut out = v_potential.values().to_vec();
    for &(a, b) in &decomp.clusters {
        let (va, vb) = (out[a], out[b]);
        let span = (b - a) as f64;
        for (j, v) in out.iter_mut().enumerate().take(b).skip(a + 1) {
            *v = va + (vb - va) * ((j - a) as f64 / span);
        }
    }
    v_potential.with_values(out)
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(invalid("t", format!("must be finite and >= 0, got {t}")))
    }
}

fn step(psi: &GridFunction, v_potential: &GridFunction, eps: f64, t: f64) -> Result<GridFunction> {
    if t == 0.0 {
        return Ok(psi.clone());
    }
    let decomp = cluster_decomposition(psi, eps, default_contact_tol(psi))?;
    let v_flat = flatten_velocity(v_potential, &decomp)?;
    eps_convex_hull(&psi.axpy(t, &v_flat)?, eps)
}

/// `F_t[Ψ] = [Ψ + t V_Ψ]_ε`.
pub fn propagate(input: &PropagatorInput, t: f64) -> Result<GridFunction> {
    check_time(t)?;
    step(&input.psi, &input.v_potential, input.eps, t)
}

/// `F_t[Ψ]` for each `t` in `times`, computed incrementally: each state is
/// propagated from the previous one with its own cluster decomposition and
/// the original `V`.
pub fn evolve_schedule(input: &PropagatorInput, times: &[f64]) -> Result<Vec<GridFunction>> {
    let mut last: Option<f64> = None;
    for &t in times {
        check_time(t)?;
        if let Some(p) = last.filter(|&p| t <= p) {
            return Err(invalid(
                "times",
                format!("schedule must be strictly increasing, got {t} after {p}"),
            ));
        }
        last = Some(t);
    }
    let mut out: Vec<GridFunction> = Vec::with_capacity(times.len());
    let mut prev = 0.0;
    for &t in times {
        let base = out.last().unwrap_or(&input.psi);
        let next = step(base, &input.v_potential, input.eps, t - prev)?;
        out.push(next);
        prev = t;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::parabola_splice;

    fn unit(n: usize, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction::from_fn(0.0, 1.0, n, f).unwrap()
    }

    fn strictly_convex(eps: f64, n: usize) -> GridFunction {
        unit(n, |m| 0.5 * (eps + 1.0) * m * m + 0.3 * (m - 0.2).powi(4) - 0.4 * m)
    }

    #[test]
    fn flatten_without_clusters_is_identity() {
        let eps = 0.2;
        let psi = strictly_convex(eps, 64);
        let d = cluster_decomposition(&psi, eps, default_contact_tol(&psi)).unwrap();
        let v = unit(64, |m| (5.0 * m).sin());
        assert_eq!(flatten_velocity(&v, &d).unwrap(), v);
    }

    #[test]
    fn flatten_linear_is_identity() {
        let eps = 0.3;
        let psi = unit(64, |m| 0.5 * eps * m * m);
        let d = cluster_decomposition(&psi, eps, default_contact_tol(&psi)).unwrap();
        assert_eq!(d.clusters, vec![(0, 64)]);
        let v = unit(64, |m| 0.7 * m);
        assert_eq!(flatten_velocity(&v, &d).unwrap(), v);
    }

    #[test]
    fn flatten_one_cluster_is_chord() {
        let eps = 0.25;
        let n = 100;
        let psi = parabola_splice(&strictly_convex(eps, n), 30, 70, eps).unwrap();
        let d = cluster_decomposition(&psi, eps, default_contact_tol(&psi)).unwrap();
        assert_eq!(d.clusters.len(), 1);
        let (a, b) = d.clusters[0];
        let v = unit(n, |m| m * m);
        let flat = flatten_velocity(&v, &d).unwrap();
        let (ma, mb) = (v.node(a), v.node(b));
        for (j, m) in v.nodes().enumerate() {
            let expect = if j > a && j < b {
                ma * ma + (mb * mb - ma * ma) * (m - ma) / (mb - ma)
            } else {
                m * m
            };
            assert!((flat.get(j) - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn flatten_rejects_mismatch() {
        let psi = strictly_convex(0.1, 16);
        let d = cluster_decomposition(&psi, 0.1, 1e-12).unwrap();
        assert!(flatten_velocity(&unit(32, |m| m), &d).is_err());
    }

    #[test]
    fn zero_time_and_linear_velocity() {
        let eps = 0.4;
        let psi = strictly_convex(eps, 128);
        let v0 = -0.7;
        let v = unit(128, |m| v0 * m);
        let input = PropagatorInput::new(psi.clone(), v.clone(), eps).unwrap();
        assert_eq!(propagate(&input, 0.0).unwrap(), psi);
        for t in [0.5, 1.0, 3.0] {
            assert_eq!(propagate(&input, t).unwrap(), psi.axpy(t, &v).unwrap());
        }
        assert!(propagate(&input, -1.0).is_err());
    }

    #[test]
    fn rejects_non_convex_potential() {
        let psi = unit(32, |m| m);
        let v = unit(32, |_| 0.0);
        assert!(matches!(
            PropagatorInput::new(psi, v, 0.5),
            Err(Error::NotEpsConvex { .. })
        ));
    }

    #[test]
    fn schedule_cases() {
        let eps = 0.2;
        let n = 256;
        let psi = strictly_convex(eps, n);
        let v = unit(n, |m| -(3.0 * m).sin());
        let input = PropagatorInput::new(psi.clone(), v, eps).unwrap();
        let one = evolve_schedule(&input, &[0.8]).unwrap();
        assert_eq!(one[0], propagate(&input, 0.8).unwrap());
        let two = evolve_schedule(&input, &[0.4, 0.8]).unwrap();
        let err = two[1].sup_distance(&one[0]).unwrap();
        assert!(err <= 10.0 * psi.h() * psi.max_abs().max(1.0), "{err}");
        assert!(evolve_schedule(&input, &[0.4, 0.4]).is_err());

        let still = PropagatorInput::new(psi.clone(), unit(n, |_| 0.0), eps).unwrap();
        for s in evolve_schedule(&still, &[0.1, 0.2, 0.3]).unwrap() {
            assert_eq!(s, psi);
        }
    }
}
