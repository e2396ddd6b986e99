//! Initial density and velocity.

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// Tolerance on the total mass of the initial density.
pub const MASS_TOL: f64 = 1e-6;

/// Bounded, compactly supported initial density `ρ̄` and velocity `ū`,
/// sampled on a common grid, together with the particle size parameter `ε`.
///
/// Invariants checked by [`InitialData::new`]: `ρ̄ >= 0`, `∫ρ̄ = 1` within
/// [`MASS_TOL`], `ρ̄` vanishes at both grid ends, and `max ρ̄ < 1/ε` when
/// `ε > 0`. With `ε = 0` only the zero-pressure solver applies.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    density: GridFunction,
    velocity: GridFunction,
    eps: f64,
}

impl InitialData {
    pub fn new(density: GridFunction, velocity: GridFunction, eps: f64) -> Result<Self> {
        density.ensure_same_grid(&velocity)?;
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::InvalidInitialData(format!(
                "eps must be finite and >= 0, got {eps}"
            )));
        }
        if let Some(i) = density.values().iter().position(|&r| r < 0.0) {
            return Err(Error::InvalidInitialData(format!(
                "density is negative at node {i} ({})",
                density.get(i)
            )));
        }
        let mass = density.integral();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidInitialData(format!(
                "density integrates to {mass}, expected 1"
            )));
        }
        if density.get(0) != 0.0 || density.get(density.n()) != 0.0 {
            return Err(Error::InvalidInitialData(
                "density must vanish at both ends of its grid (compact support)".into(),
            ));
        }
        let data = Self {
            density,
            velocity,
            eps,
        };
        data.check_packing(eps)?;
        Ok(data)
    }

    /// Rescales `density` to unit mass before validating.
    pub fn normalized(density: GridFunction, velocity: GridFunction, eps: f64) -> Result<Self> {
        let mass = density.integral();
        if !(mass > 0.0) {
            return Err(Error::InvalidInitialData(format!(
                "density has no positive mass ({mass})"
            )));
        }
        let density = density.map(|_, r| r / mass)?;
        Self::new(density, velocity, eps)
    }

    fn check_packing(&self, eps: f64) -> Result<()> {
        let max = self.max_density();
        if eps > 0.0 && max * eps >= 1.0 {
            return Err(Error::InvalidInitialData(format!(
                "max density {max} is not below 1/eps = {}",
                1.0 / eps
            )));
        }
        Ok(())
    }

    /// The same data with another particle size; rechecks the packing bound.
    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        Self::new(self.density.clone(), self.velocity.clone(), eps)
    }

    pub fn density(&self) -> &GridFunction {
        &self.density
    }

    pub fn velocity(&self) -> &GridFunction {
        &self.velocity
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn max_density(&self) -> f64 {
        self.density.values().iter().fold(0.0, |m, &r| m.max(r))
    }

    /// Smallest interval `[a, b]` of grid nodes outside of which the density
    /// vanishes.
    pub fn support(&self) -> (f64, f64) {
        let v = self.density.values();
        let first = v.iter().position(|&r| r > 0.0).unwrap_or(0);
        let last = v.iter().rposition(|&r| r > 0.0).unwrap_or(v.len() - 1);
        (
            self.density.node(first.saturating_sub(1)),
            self.density.node((last + 1).min(v.len() - 1)),
        )
    }

    /// `max |ū|` over the support.
    pub fn velocity_bound(&self) -> f64 {
        let (a, b) = self.support();
        self.velocity
            .nodes()
            .zip(self.velocity.values())
            .filter(|(x, _)| *x >= a && *x <= b)
            .fold(0.0, |m, (_, u)| m.max(u.abs()))
    }

    /// Mass cumulation `M̄(x)` by the trapezoid rule, rescaled so that it
    /// ends exactly at 1.
    pub fn mass_cumulative(&self) -> GridFunction {
        let c = self.density.cumulative();
        let total = c.get(c.n());
        c.map(|_, v| (v / total).min(1.0)).expect("finite")
    }
}
