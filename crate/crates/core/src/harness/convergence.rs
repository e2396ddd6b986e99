//! Convergence in `N` and in `ε`.

use serde::Serialize;

use crate::continuum::{solve_finite_size, solve_zero_pressure};
use crate::cumulative::l1_distance;
use crate::error::{invalid, Result};
use crate::initial::InitialData;
use crate::particles::init_particles;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    #[serde(rename = "N")]
    pub n_particles: usize,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log error` against `log N`.
    pub slope: f64,
}

/// `sup_x |Φ̃_N(x, t) − Φ(x, t)|` on the continuum x-grid for each `N`, where
/// `Φ̃_N = ∫ M_N` comes from the simulator and `Φ` from the continuum solver
/// with `grid_n` cells.
pub fn convergence_study(data: &InitialData, t: f64, n_values: &[usize], grid_n: usize) -> Result<ConvergenceStudy> {
    let sol = solve_finite_size(data, t, grid_n)?;
    let mut rows = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let mut sys = init_particles(data, n)?;
        sys.advance_to(t)?;
        let m_n = sys.mass_cumulation();
        let base = m_n.integral_to(sol.phi.lo());
        let error = sol
            .phi
            .nodes()
            .zip(sol.phi.values())
            .map(|(x, phi)| (m_n.integral_to(x) - base - phi).abs())
            .fold(0.0, f64::max);
        rows.push(ConvergenceRow { n_particles: n, error });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.n_particles as f64).ln(), r.error.ln()))
        .collect();
    Ok(ConvergenceStudy {
        slope: fit_slope(&pts)?,
        rows,
    })
}

/// Least-squares slope through `(x, y)` points.
pub fn fit_slope(pts: &[(f64, f64)]) -> Result<f64> {
    if pts.len() < 2 {
        return Err(invalid("n_values", "need at least two points to fit a slope"));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if !(sxx > 0.0) || !sxy.is_finite() {
        return Err(invalid("n_values", "points do not determine a slope"));
    }
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsSweepRow {
    pub eps: f64,
    /// `∫ |M_ε − M_0| dx`.
    pub l1: f64,
    /// Mass-grid spacing used.
    pub h: f64,
}

/// Distance between finite-size and zero-pressure solutions at time `t`.
pub fn eps_sweep(data: &InitialData, t: f64, eps_values: &[f64], grid_n: usize) -> Result<Vec<EpsSweepRow>> {
    let zero = solve_zero_pressure(data, t, grid_n)?;
    eps_values
        .iter()
        .map(|&eps| {
            let sol = solve_finite_size(&data.with_eps(eps)?, t, grid_n)?;
            Ok(EpsSweepRow {
                eps,
                l1: l1_distance(&sol.cumulation, &zero.cumulation),
                h: 1.0 / grid_n as f64,
            })
        })
        .collect()
}
