//! Named initial data.

use std::f64::consts::PI;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::grid::{check_equispaced, parse_f64, GridFunction};
use crate::initial::InitialData;

/// Random bumps are scaled so that `max ρ̄ <= BUMP_PACKING / ε`.
const BUMP_PACKING: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `ρ̄ = 1` on `[0, 1]`, `ū = 0.5`: rigid translation.
    UniformBlock,
    /// Two unit blocks on `0.25 <= |x| <= 0.75` approaching at speed 1/4.
    TwoBlockHeadon,
    /// `ρ̄ = 1 - |x|`, `ū = -x`: focusing, a single growing cluster.
    Triangular,
    /// `ρ̄ = 1/2` on `[-1, 1]` with a piecewise-constant velocity: one
    /// compression front and one rarefaction.
    RiemannShear,
    /// Seeded smooth bumps with a random compressive velocity.
    RandomBump(u64),
    /// Two narrow dense blocks at `±1/2` colliding head-on; mollified atoms.
    PointPair,
}

pub const PRESET_NAMES: [&str; 6] = [
    "uniform-block",
    "two-block-headon",
    "triangular",
    "riemann-shear",
    "random-bump",
    "point-pair",
];

impl FromStr for Preset {
    type Err = Error;

    /// Accepts the names in [`PRESET_NAMES`]; `random-bump:<seed>` sets the
    /// seed, plain `random-bump` uses seed 0.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "uniform-block" => Self::UniformBlock,
            "two-block-headon" => Self::TwoBlockHeadon,
            "triangular" => Self::Triangular,
            "riemann-shear" => Self::RiemannShear,
            "random-bump" => Self::RandomBump(0),
            "point-pair" => Self::PointPair,
            _ => match s.strip_prefix("random-bump:") {
                Some(seed) => Self::RandomBump(seed.parse().map_err(|e| {
                    invalid("initial", format!("bad seed in `{s}`: {e}"))
                })?),
                None => {
                    return Err(invalid(
                        "initial",
                        format!("unknown preset `{s}`; expected one of {}", PRESET_NAMES.join(", ")),
                    ))
                }
            },
        })
    }
}

impl Preset {
    pub fn name(&self) -> String {
        match self {
            Self::UniformBlock => "uniform-block".into(),
            Self::TwoBlockHeadon => "two-block-headon".into(),
            Self::Triangular => "triangular".into(),
            Self::RiemannShear => "riemann-shear".into(),
            Self::RandomBump(seed) => format!("random-bump:{seed}"),
            Self::PointPair => "point-pair".into(),
        }
    }

    pub fn interval(&self) -> (f64, f64) {
        match self {
            Self::UniformBlock => (-0.5, 1.5),
            Self::TwoBlockHeadon | Self::PointPair => (-1.0, 1.0),
            Self::Triangular | Self::RiemannShear | Self::RandomBump(_) => (-1.25, 1.25),
        }
    }

    /// Samples the preset on `n` cells and normalizes it to unit mass.
    pub fn build(&self, eps: f64, n: usize) -> Result<InitialData> {
        let (lo, hi) = self.interval();
        let sample = |f: &dyn Fn(f64) -> f64| GridFunction::from_fn(lo, hi, n, f);
        let (rho, u) = match *self {
            Self::UniformBlock => (
                sample(&|x| indicator(x, 0.0, 1.0))?,
                sample(&|_| 0.5)?,
            ),
            Self::TwoBlockHeadon => (
                sample(&|x| indicator(x.abs(), 0.25, 0.75))?,
                sample(&|x| if x < 0.0 { 0.25 } else { -0.25 })?,
            ),
            Self::Triangular => (sample(&|x| (1.0 - x.abs()).max(0.0))?, sample(&|x| -x)?),
            Self::RiemannShear => (
                sample(&|x| 0.5 * indicator(x, -1.0, 1.0))?,
                sample(&|x| {
                    if x < -0.5 {
                        -1.0
                    } else if x < 0.0 {
                        1.0
                    } else {
                        -0.5
                    }
                })?,
            ),
            Self::RandomBump(seed) => return random_bump(seed, eps, n),
            Self::PointPair => (
                sample(&|x| 5.0 * indicator((x.abs() - 0.5).abs(), 0.0, 0.05))?,
                sample(&|x| if x < 0.0 { 1.0 } else { -1.0 })?,
            ),
        };
        InitialData::normalized(rho, u, eps)
    }
}

fn indicator(x: f64, a: f64, b: f64) -> f64 {
    if (a..=b).contains(&x) {
        1.0
    } else {
        0.0
    }
}

fn random_bump(seed: u64, eps: f64, n: usize) -> Result<InitialData> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bumps: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| {
            let c = rng.gen_range(-0.6..0.6);
            let w = rng.gen_range(0.2..0.4);
            let a = rng.gen_range(0.5..1.5);
            (c, w, a)
        })
        .collect();
    let slope = rng.gen_range(0.3..0.8);
    let modes: Vec<(f64, f64)> = (0..3)
        .map(|_| (rng.gen_range(-0.3..0.3), rng.gen_range(0.0..2.0 * PI)))
        .collect();

    let (lo, hi) = (-1.25, 1.25);
    let bump = GridFunction::from_fn(lo, hi, n, |x| {
        bumps
            .iter()
            .map(|&(c, w, a)| {
                let r = (x - c) / w;
                a * (1.0 - r * r).max(0.0).powi(2)
            })
            .sum()
    })?;
    let bump = bump.map(|_, r| r / bump.integral())?;
    let flat = GridFunction::from_fn(lo, hi, n, |x| 0.5 * indicator(x, -1.0, 1.0))?;
    let flat = flat.map(|_, r| r / flat.integral())?;

    // mix with the flat background until the packing margin holds
    let cap = if eps > 0.0 { BUMP_PACKING / eps } else { f64::INFINITY };
    let peak = bump.max_abs();
    let floor = flat.max_abs();
    if cap <= floor {
        return Err(invalid(
            "eps",
            format!("random-bump needs eps < {}, got {eps}", BUMP_PACKING / floor),
        ));
    }
    let lambda = if peak <= cap { 1.0 } else { (cap - floor) / (peak - floor) };
    let rho = bump.map(|x, r| lambda * r + (1.0 - lambda) * flat.eval(x))?;
    let u = GridFunction::from_fn(lo, hi, n, |x| {
        -slope * x
            + modes
                .iter()
                .enumerate()
                .map(|(k, &(b, phase))| b * ((k + 1) as f64 * PI * x / 1.25 + phase).sin())
                .sum::<f64>()
    })?;
    InitialData::normalized(rho, u, eps)
}

/// Reads initial data from CSV with columns `x,rho,u` on a uniform grid.
pub fn read_initial_csv(path: &Path, eps: f64) -> Result<InitialData> {
    let mut r = csv::Reader::from_path(path)?;
    let (mut xs, mut rho, mut u) = (Vec::new(), Vec::new(), Vec::new());
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(Error::InvalidInitialData(format!(
                "{}: expected columns x,rho,u",
                path.display()
            )));
        }
        xs.push(parse_f64(&rec[0])?);
        rho.push(parse_f64(&rec[1])?);
        u.push(parse_f64(&rec[2])?);
    }
    if xs.len() < 2 {
        return Err(Error::InvalidInitialData(format!("{}: fewer than 2 rows", path.display())));
    }
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    let rho = GridFunction::new(lo, hi, rho)?;
    check_equispaced(&rho, &xs)?;
    InitialData::normalized(rho, GridFunction::new(lo, hi, u)?, eps)
}

/// Resolves `initial` as a preset name, or else as a CSV path.
pub fn load_initial(initial: &str, eps: f64, n: usize, seed: u64) -> Result<InitialData> {
    match initial.parse::<Preset>() {
        Ok(Preset::RandomBump(0)) if initial == "random-bump" => Preset::RandomBump(seed).build(eps, n),
        Ok(p) => p.build(eps, n),
        Err(e) => {
            let path = Path::new(initial);
            if path.exists() {
                read_initial_csv(path, eps)
            } else {
                Err(e)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all(seed: u64) -> Vec<Preset> {
        vec![
            Preset::UniformBlock,
            Preset::TwoBlockHeadon,
            Preset::Triangular,
            Preset::RiemannShear,
            Preset::RandomBump(seed),
            Preset::PointPair,
        ]
    }

    #[test]
    fn presets_satisfy_invariants() {
        for seed in 0..20 {
            for p in all(seed) {
                for eps in [0.0, 0.05, 0.1] {
                    let d = p.build(eps, 1024).unwrap();
                    assert!((d.density().integral() - 1.0).abs() < 1e-12);
                    if eps > 0.0 {
                        assert!(d.max_density() < 1.0 / eps);
                    }
                }
            }
        }
        let d = Preset::RandomBump(3).build(1.0, 1024).unwrap();
        assert!(d.max_density() <= 0.8 + 1e-12);
    }

    #[test]
    fn names_round_trip() {
        for p in all(42) {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("nope".parse::<Preset>().is_err());
    }

    #[test]
    fn random_bump_is_seeded() {
        let a = Preset::RandomBump(7).build(0.5, 256).unwrap();
        let b = Preset::RandomBump(7).build(0.5, 256).unwrap();
        let c = Preset::RandomBump(8).build(0.5, 256).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn csv_initial_data() {
        let dir = std::env::temp_dir().join(format!("sticky-initial-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("init.csv");
        let mut s = String::from("x,rho,u\n");
        for k in 0..=100 {
            let x = -1.0 + 2.0 * k as f64 / 100.0;
            s += &format!("{x},{},{}\n", (1.0 - 2.0 * x.abs()).max(0.0), -x);
        }
        std::fs::write(&path, s).unwrap();
        let d = load_initial(path.to_str().unwrap(), 0.2, 64, 0).unwrap();
        assert!((d.density().integral() - 1.0).abs() < 1e-12);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
