//! Piecewise-linear cumulative functions and the transport metrics between them.

use crate::error::{Error, Result};

/// A piecewise-linear function through knots `(xs[k], ys[k])` with
/// nondecreasing `xs`. Repeated abscissae encode jumps. Outside the knot
/// range the function is constant, equal to the nearest end value.
///
/// Mass cumulations `M(x)` of both solvers are represented this way, which
/// makes the transport distance `∫|M1 - M2| dx` computable exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.is_empty() {
            return Err(Error::Numerical(format!(
                "knot arrays must be nonempty and of equal length ({} vs {})",
                xs.len(),
                ys.len()
            )));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite knot".into()));
        }
        if let Some(k) = xs.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::Numerical(format!(
                "knot abscissae decrease at {}: {} < {}",
                k + 1,
                xs[k + 1],
                xs[k]
            )));
        }
        Ok(Self { xs, ys })
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn first_x(&self) -> f64 {
        self.xs[0]
    }

    pub fn last_x(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    /// Value just right of `x` (right-continuous evaluation).
    pub fn eval(&self, x: f64) -> f64 {
        // first knot strictly right of x
        let k = self.xs.partition_point(|&t| t <= x);
        if k == 0 {
            return self.ys[0];
        }
        if k == self.xs.len() {
            return self.ys[k - 1];
        }
        self.lerp(k - 1, k, x)
    }

    /// Value just left of `x`.
    pub fn eval_left(&self, x: f64) -> f64 {
        // first knot at or right of x
        let k = self.xs.partition_point(|&t| t < x);
        if k == 0 {
            return self.ys[0];
        }
        if k == self.xs.len() {
            return self.ys[k - 1];
        }
        self.lerp(k - 1, k, x)
    }

    fn lerp(&self, a: usize, b: usize, x: f64) -> f64 {
        let (x0, x1) = (self.xs[a], self.xs[b]);
        if x1 <= x0 {
            return self.ys[b];
        }
        let w = (x - x0) / (x1 - x0);
        self.ys[a] + w * (self.ys[b] - self.ys[a])
    }

    /// `∫_{first_x}^{x} f`, with the constant extension beyond the last knot.
    /// Returns zero for `x <= first_x`.
    pub fn integral_to(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for k in 0..self.xs.len() - 1 {
            let (x0, x1) = (self.xs[k], self.xs[k + 1]);
            if x <= x0 {
                return acc;
            }
            if x1 > x0 {
                let xe = x.min(x1);
                let ye = self.lerp(k, k + 1, xe);
                acc += 0.5 * (self.ys[k] + ye) * (xe - x0);
            }
        }
        let last = self.last_x();
        if x > last {
            acc += self.ys[self.ys.len() - 1] * (x - last);
        }
        acc
    }

    /// `x ↦ f(x - dx)`.
    pub fn shifted(&self, dx: f64) -> Self {
        Self {
            xs: self.xs.iter().map(|x| x + dx).collect(),
            ys: self.ys.clone(),
        }
    }

    /// Generalized inverse of a nondecreasing function: swaps the roles of
    /// the axes, so flat pieces become jumps and vice versa.
    pub fn inverse(&self) -> Result<Self> {
        Self::new(self.ys.clone(), self.xs.clone())
    }

    fn breakpoints(a: &Self, b: &Self) -> Vec<f64> {
        let mut pts: Vec<f64> = a.xs.iter().chain(&b.xs).copied().collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

/// `∫ |a - b| dx` over the real line, computed exactly on the common
/// refinement of the two knot sets. Both functions must agree at `±∞`
/// (e.g. two cumulative distributions of the same total mass); otherwise
/// the integral is taken over the union of the knot ranges.
pub fn l1_distance(a: &PiecewiseLinear, b: &PiecewiseLinear) -> f64 {
    let pts = PiecewiseLinear::breakpoints(a, b);
    let mut total = 0.0;
    for w in pts.windows(2) {
        let (p, q) = (w[0], w[1]);
        let d0 = a.eval(p) - b.eval(p);
        let d1 = a.eval_left(q) - b.eval_left(q);
        let len = q - p;
        total += if d0 * d1 >= 0.0 {
            0.5 * (d0.abs() + d1.abs()) * len
        } else {
            0.5 * (d0 * d0 + d1 * d1) / (d0.abs() + d1.abs()) * len
        };
    }
    total
}

/// Sup-norm distance; attained at a breakpoint (one-sided limits included).
pub fn sup_distance(a: &PiecewiseLinear, b: &PiecewiseLinear) -> f64 {
    PiecewiseLinear::breakpoints(a, b)
        .into_iter()
        .map(|x| {
            (a.eval(x) - b.eval(x))
                .abs()
                .max((a.eval_left(x) - b.eval_left(x)).abs())
        })
        .fold(0.0, f64::max)
}
