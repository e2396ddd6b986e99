//! Discrete Legendre transform, difference quotients and monotone inverses.

use crate::convex::lower_hull;
use crate::error::{invalid, Error, Result};
use crate::grid::{node_of, GridFunction};

/// `g(m_j) = max_i (x_i m_j - f(x_i))` on the dual grid `[dual_lo, dual_hi]`
/// with `dual_n` cells.
///
/// Only the lower-hull vertices of `f` can attain the maximum, and the
/// maximising vertex moves monotonically with `m`, so one merge pass over
/// both sequences gives the transform in `O(n + dual_n)`.
pub fn legendre(f: &GridFunction, dual_lo: f64, dual_hi: f64, dual_n: usize) -> Result<GridFunction> {
    if !(dual_hi > dual_lo) {
        return Err(invalid(
            "dual_hi",
            format!("need dual_hi > dual_lo, got [{dual_lo}, {dual_hi}]"),
        ));
    }
    if dual_n == 0 {
        return Err(invalid("dual_n", "need at least one cell"));
    }
    let verts = lower_hull(f.values());
    let xs: Vec<f64> = verts.iter().map(|&i| f.node(i)).collect();
    let ys: Vec<f64> = verts.iter().map(|&i| f.get(i)).collect();
    let objective = |k: usize, m: f64| xs[k] * m - ys[k];

    let mut k = 0;
    let mut out = Vec::with_capacity(dual_n + 1);
    for j in 0..=dual_n {
        let m = node_of(dual_lo, dual_hi, dual_n, j);
        while k + 1 < xs.len() && objective(k + 1, m) >= objective(k, m) {
            k += 1;
        }
        out.push(objective(k, m));
    }
    GridFunction::new(dual_lo, dual_hi, out)
}

/// Forward difference quotients; the last node repeats the last quotient.
pub fn derivative(f: &GridFunction) -> GridFunction {
    let h = f.h();
    let v = f.values();
    let mut out: Vec<f64> = v.windows(2).map(|w| (w[1] - w[0]) / h).collect();
    out.push(out[out.len() - 1]);
    f.with_values(out).expect("same length")
}

fn check_monotone(m: &GridFunction) -> Result<()> {
    let tol = 1e-12 * m.max_abs().max(1.0);
    for (i, w) in m.values().windows(2).enumerate() {
        if w[1] < w[0] - tol {
            return Err(Error::NotMonotone {
                index: i + 1,
                drop: w[0] - w[1],
            });
        }
    }
    Ok(())
}

/// Generalized inverse of a nondecreasing cumulative function, sampled on
/// `[0, 1]` with `range_n` cells.
///
/// `X(m)` is the least abscissa of the piecewise-linear interpolant of `cdf`
/// reaching level `m`. At `m = 0` the right limit `X(0+)` is returned, i.e.
/// the left end of the support rather than the left end of the grid.
pub fn generalized_inverse(cdf: &GridFunction, range_n: usize) -> Result<GridFunction> {
    if range_n == 0 {
        return Err(invalid("range_n", "need at least one cell"));
    }
    check_monotone(cdf)?;
    let mut cursor = InverseCursor::new(cdf);
    let values = (0..=range_n)
        .map(|j| cursor.at(node_of(0.0, 1.0, range_n, j)))
        .collect();
    GridFunction::new(0.0, 1.0, values)
}

/// Evaluates the generalized inverse of `cdf` at a single level `m`.
pub fn inverse_at(cdf: &GridFunction, m: f64) -> Result<f64> {
    check_monotone(cdf)?;
    Ok(InverseCursor::new(cdf).at(m))
}

/// Evaluates the generalized inverse at many levels; sorted levels are
/// answered in one pass.
pub fn inverse_many(cdf: &GridFunction, levels: &[f64]) -> Result<Vec<f64>> {
    check_monotone(cdf)?;
    let mut cursor = InverseCursor::new(cdf);
    Ok(levels.iter().map(|&m| cursor.at(m)).collect())
}

/// Monotone scan over a nondecreasing grid function. Queries with
/// nondecreasing levels cost amortized O(1).
struct InverseCursor<'a> {
    cdf: &'a GridFunction,
    j: usize,
}

impl<'a> InverseCursor<'a> {
    fn new(cdf: &'a GridFunction) -> Self {
        Self { cdf, j: 0 }
    }

    fn at(&mut self, m: f64) -> f64 {
        let v = self.cdf.values();
        let n = self.cdf.n();
        if m <= 0.0 {
            // X(0+): last node still at or below zero mass
            let mut j = 0;
            while j < n && v[j + 1] <= 0.0 {
                j += 1;
            }
            return self.cdf.node(j);
        }
        if self.j > 0 && v[self.j - 1] >= m {
            self.j = 0;
        }
        while self.j <= n && v[self.j] < m {
            self.j += 1;
        }
        let j = self.j;
        if j > n {
            return self.cdf.hi();
        }
        if j == 0 {
            return self.cdf.lo();
        }
        let (a, b) = (v[j - 1], v[j]);
        let w = ((m - a) / (b - a)).clamp(0.0, 1.0);
        self.cdf.node(j - 1) + w * self.cdf.h()
    }
}
