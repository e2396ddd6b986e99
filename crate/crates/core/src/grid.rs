//! Uniformly sampled functions on a closed interval.

use std::io::{Read, Write};

use crate::error::{Error, Result};

/// Samples of a real function at `n + 1` equispaced nodes of `[lo, hi]`.
///
/// This is the carrier for every potential in the crate: mass cumulations,
/// Eulerian and Lagrangian potentials, velocity potentials.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    lo: f64,
    hi: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(lo: f64, hi: f64, values: Vec<f64>) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::InvalidGrid(format!(
                "interval [{lo}, {hi}] must be finite with hi > lo"
            )));
        }
        if values.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 samples, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "sample {i} is not finite ({})",
                values[i]
            )));
        }
        Ok(Self { lo, hi, values })
    }

    /// Samples `f` at the nodes of `[lo, hi]` divided into `n` cells.
    pub fn from_fn(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid("need at least one cell".into()));
        }
        let values = (0..=n).map(|i| f(node_of(lo, hi, n, i))).collect();
        Self::new(lo, hi, values)
    }

    pub fn constant(lo: f64, hi: f64, n: usize, c: f64) -> Result<Self> {
        Self::new(lo, hi, vec![c; n + 1])
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Number of cells.
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell width.
    pub fn h(&self) -> f64 {
        (self.hi - self.lo) / self.n() as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        node_of(self.lo, self.hi, self.n(), i)
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.node(i))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Same grid, new samples.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} samples, got {}",
                self.values.len(),
                values.len()
            )));
        }
        Self::new(self.lo, self.hi, values)
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(self.node(i), v))
            .collect();
        self.with_values(values)
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.lo == other.lo && self.hi == other.hi && self.values.len() == other.values.len()
    }

    pub fn ensure_same_grid(&self, other: &Self) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "[{}, {}] with {} nodes vs [{}, {}] with {} nodes",
                self.lo,
                self.hi,
                self.len(),
                other.lo,
                other.hi,
                other.len()
            )))
        }
    }

    /// Nodewise `self + scale * other`.
    pub fn axpy(&self, scale: f64, other: &Self) -> Result<Self> {
        self.ensure_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + scale * b)
            .collect();
        self.with_values(values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sup-norm of the nodewise difference.
    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        self.ensure_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Piecewise-linear interpolation, clamped to the end values outside `[lo, hi]`.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.lo {
            return self.values[0];
        }
        if x >= self.hi {
            return self.values[self.n()];
        }
        let s = (x - self.lo) / self.h();
        let i = (s.floor() as usize).min(self.n() - 1);
        let w = s - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    /// Running trapezoid integral from `lo`, sampled at the same nodes.
    pub fn cumulative(&self) -> Self {
        let h = self.h();
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.len());
        out.push(0.0);
        for w in self.values.windows(2) {
            acc += 0.5 * h * (w[0] + w[1]);
            out.push(acc);
        }
        Self {
            lo: self.lo,
            hi: self.hi,
            values: out,
        }
    }

    /// Trapezoid integral over `[lo, hi]`.
    pub fn integral(&self) -> f64 {
        let h = self.h();
        self.values
            .windows(2)
            .map(|w| 0.5 * h * (w[0] + w[1]))
            .sum()
    }

    /// Writes two columns `<label>,value`.
    pub fn write_csv<W: Write>(&self, label: &str, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([label, "value"])?;
        for (i, v) in self.values.iter().enumerate() {
            w.write_record([self.node(i).to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the two-column format written by [`GridFunction::write_csv`].
    ///
    /// Node coordinates must be equispaced; they are checked against the
    /// reconstructed grid to 1e-9 relative.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            if rec.len() != 2 {
                return Err(Error::InvalidGrid(format!(
                    "expected 2 columns, got {}",
                    rec.len()
                )));
            }
            xs.push(parse_f64(&rec[0])?);
            vs.push(parse_f64(&rec[1])?);
        }
        if xs.len() < 2 {
            return Err(Error::InvalidGrid("fewer than 2 rows".into()));
        }
        let g = Self::new(xs[0], xs[xs.len() - 1], vs)?;
        check_equispaced(&g, &xs)?;
        Ok(g)
    }
}

pub(crate) fn node_of(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if i == n {
        hi
    } else {
        lo + (hi - lo) * (i as f64 / n as f64)
    }
}

pub(crate) fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::InvalidGrid(format!("cannot parse `{s}` as a number: {e}")))
}

pub(crate) fn check_equispaced(g: &GridFunction, xs: &[f64]) -> Result<()> {
    let tol = 1e-9 * (g.hi() - g.lo()).abs().max(1.0);
    for (i, &x) in xs.iter().enumerate() {
        if (x - g.node(i)).abs() > tol {
            return Err(Error::InvalidGrid(format!(
                "node {i} at {x} is not on the uniform grid (expected {})",
                g.node(i)
            )));
        }
    }
    Ok(())
}
