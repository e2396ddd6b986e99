//! Command-line driver: parses flags or a JSON config, runs one mode, and
//! writes its outputs plus `manifest.json` into the output directory.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;
use serde::Serialize;
use serde_json::{json, Value};

use sticky_core::continuum::{solution_interval, solve_with_state};
use sticky_core::harness::compare::compare_system;
use sticky_core::harness::config::{Mode, Resolved, RunConfig};
use sticky_core::harness::convergence::{convergence_study, eps_sweep};
use sticky_core::harness::{load_initial, write_rows};
use sticky_core::particles::init_particles;
use sticky_core::{Error, InitialData};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "sticky", version, about = "Sticky finite-size particles: simulator and continuum solver")]
struct Args {
    /// simulate, solve, solve-zp, compare, converge or eps-sweep
    #[arg(long)]
    mode: Option<String>,
    /// Preset name (random-bump:<seed> allowed) or CSV file with x,rho,u
    #[arg(long)]
    initial: Option<String>,
    /// Number of particles
    #[arg(long = "N")]
    n_particles: Option<usize>,
    /// Particle size
    #[arg(long)]
    eps: Option<f64>,
    /// Final time
    #[arg(long = "t")]
    t_final: Option<f64>,
    /// Comma-separated output times
    #[arg(long, value_delimiter = ',')]
    times: Option<Vec<f64>>,
    /// Cells in the mass and space grids
    #[arg(long)]
    grid_n: Option<usize>,
    /// Output directory (default: out)
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Seed for random-bump
    #[arg(long)]
    seed: Option<u64>,
    /// JSON file with the same fields; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated particle counts for converge
    #[arg(long, value_delimiter = ',')]
    n_values: Option<Vec<usize>>,
    /// Comma-separated particle sizes for eps-sweep
    #[arg(long, value_delimiter = ',')]
    eps_values: Option<Vec<f64>>,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument { .. } | Error::InvalidInitialData(_) | Error::Json(_) => {
                Failure::Config(e.to_string())
            }
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Numerical(format!("{}: {e}", path.display()))
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(args) {
        Ok(summary) => {
            println!("{summary}");
            EXIT_OK
        }
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            EXIT_CONFIG
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            EXIT_NUMERICAL
        }
    }
}

fn build_config(args: Args) -> Result<RunConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("config: {}: {e}", path.display())))?;
            RunConfig::from_json(&text).map_err(|e| Failure::Config(format!("config: {e}")))?
        }
        None => {
            let mode = args
                .mode
                .as_deref()
                .ok_or_else(|| Failure::Config("invalid argument `mode`: required".into()))?;
            RunConfig::new(parse_mode(mode)?)
        }
    };
    if let Some(m) = &args.mode {
        cfg.mode = parse_mode(m)?;
    }
    macro_rules! set {
        ($($field:ident),*) => {$(if args.$field.is_some() { cfg.$field = args.$field.clone(); })*};
    }
    set!(initial, n_particles, eps, t_final, times, grid_n, out_dir, seed, n_values, eps_values);
    Ok(cfg)
}

fn parse_mode(s: &str) -> Result<Mode, Failure> {
    serde_json::from_value(Value::String(s.into())).map_err(|_| {
        Failure::Config(format!(
            "invalid argument `mode`: unknown mode `{s}`; expected simulate, solve, solve-zp, compare, converge or eps-sweep"
        ))
    })
}

struct Outputs {
    dir: PathBuf,
    metrics: BTreeMap<String, Value>,
    wall_ms: BTreeMap<String, f64>,
    files: Vec<String>,
}

impl Outputs {
    fn write(&mut self, name: &str, body: impl FnOnce(&mut Vec<u8>) -> sticky_core::Result<()>) -> Result<(), Failure> {
        let mut buf = Vec::new();
        body(&mut buf)?;
        let path = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp"));
        fs::File::create(&tmp)
            .and_then(|mut f| f.write_all(&buf).and_then(|_| f.sync_all()))
            .map_err(|e| io_failure(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| io_failure(&path, e))?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn metric(&mut self, key: &str, v: impl Serialize) {
        self.metrics
            .insert(key.into(), serde_json::to_value(v).expect("serializable metric"));
    }

    fn time<R>(&mut self, key: &str, f: impl FnOnce() -> R) -> R {
        let clock = Instant::now();
        let r = f();
        self.wall_ms.insert(key.into(), clock.elapsed().as_secs_f64() * 1e3);
        r
    }
}

fn run(args: Args) -> Result<String, Failure> {
    let cfg = build_config(args)?.resolve()?;
    let data_eps = match cfg.mode {
        Mode::SolveZp | Mode::EpsSweep => 0.0,
        _ => cfg.eps,
    };
    let data = load_initial(&cfg.initial, data_eps, cfg.grid_n, cfg.seed)?;
    fs::create_dir_all(&cfg.out_dir).map_err(|e| io_failure(&cfg.out_dir, e))?;
    let mut out = Outputs {
        dir: cfg.out_dir.clone(),
        metrics: BTreeMap::new(),
        wall_ms: BTreeMap::new(),
        files: Vec::new(),
    };
    let clock = Instant::now();
    match cfg.mode {
        Mode::Simulate => simulate(&cfg, &data, &mut out)?,
        Mode::Solve => solve(&cfg, &data, cfg.eps, &mut out)?,
        Mode::SolveZp => solve(&cfg, &data, 0.0, &mut out)?,
        Mode::Compare => compare(&cfg, &data, &mut out)?,
        Mode::Converge => converge(&cfg, &data, &mut out)?,
        Mode::EpsSweep => sweep(&cfg, &data, &mut out)?,
    }
    out.wall_ms.insert("total".into(), clock.elapsed().as_secs_f64() * 1e3);
    let manifest = json!({
        "config": cfg,
        "metrics": out.metrics,
        "outputs": out.files,
        "versions": {
            "sticky-cli": env!("CARGO_PKG_VERSION"),
        },
        "wall_times_ms": out.wall_ms,
    });
    out.write("manifest.json", |buf| {
        serde_json::to_writer_pretty(&mut *buf, &manifest)?;
        buf.push(b'\n');
        Ok(())
    })?;
    Ok(format!(
        "{}: wrote {} to {}",
        cfg.mode.name(),
        out.files.join(", "),
        cfg.out_dir.display()
    ))
}

fn simulate(cfg: &Resolved, data: &InitialData, out: &mut Outputs) -> Result<(), Failure> {
    let mut sys = init_particles(data, cfg.n_particles)?;
    let p0 = sys.momentum();
    out.time("simulate", || -> Result<(), Failure> {
        for &t in &cfg.times {
            sys.advance_to(t)?;
        }
        Ok(())
    })?;
    let t = cfg.t_final();
    let (lo, hi) = solution_interval(data, t);
    let rho = sys.density_profile(lo, hi, cfg.grid_n)?;
    let u = sys.velocity_profile(lo, hi, cfg.grid_n)?;
    let psi = sys.psi_tilde(cfg.grid_n)?;
    let v = sys.velocity_potential(cfg.grid_n)?;
    out.write("collisions.jsonl", |buf| sys.write_collision_log(buf))?;
    out.write("profile.csv", |buf| write_columns(buf, ["x", "rho", "u"], rho.nodes(), [rho.values(), u.values()]))?;
    out.write("lagrangian.csv", |buf| write_columns(buf, ["m", "psi", "V"], psi.nodes(), [psi.values(), v.values()]))?;
    out.metric("time", t);
    out.metric("clusters", sys.clusters().len());
    out.metric("collisions", sys.collision_log().len());
    out.metric("momentum_drift", (sys.momentum() - p0).abs());
    Ok(())
}

fn write_columns(
    buf: &mut Vec<u8>,
    header: [&str; 3],
    nodes: impl Iterator<Item = f64>,
    cols: [&[f64]; 2],
) -> sticky_core::Result<()> {
    writeln!(buf, "{}", header.join(","))?;
    for (i, x) in nodes.enumerate() {
        writeln!(buf, "{x},{},{}", cols[0][i], cols[1][i])?;
    }
    Ok(())
}

fn solve(cfg: &Resolved, data: &InitialData, eps: f64, out: &mut Outputs) -> Result<(), Failure> {
    let t = cfg.t_final();
    let (state, sol) = out.time("solve", || solve_with_state(data, t, cfg.grid_n, eps))?;
    out.write("solution.csv", |buf| sol.write_csv(buf))?;
    out.write("lagrangian.csv", |buf| state.write_csv(buf))?;
    out.metric("time", t);
    out.metric("eps", eps);
    out.metric("mass", sol.density.integral());
    out.metric("momentum", sol.momentum());
    out.metric("max_density", sol.density.max_abs());
    Ok(())
}

fn compare(cfg: &Resolved, data: &InitialData, out: &mut Outputs) -> Result<(), Failure> {
    let sys = init_particles(data, cfg.n_particles)?;
    let reports = compare_system(&sys, &cfg.times, cfg.grid_n)?;
    out.write("comparison.csv", |buf| write_rows(&reports, buf))?;
    out.wall_ms
        .insert("simulator".into(), reports.iter().map(|r| r.runtime_sim_ms).sum());
    out.wall_ms
        .insert("propagator".into(), reports.iter().map(|r| r.runtime_prop_ms).sum());
    let worst = reports.iter().map(|r| r.sup_psi).fold(0.0, f64::max);
    out.metric("max_sup_psi", worst);
    out.metric("reports", &reports);
    Ok(())
}

fn converge(cfg: &Resolved, data: &InitialData, out: &mut Outputs) -> Result<(), Failure> {
    let study = out.time("converge", || convergence_study(data, cfg.t_final(), &cfg.n_values, cfg.grid_n))?;
    out.write("convergence.csv", |buf| write_rows(&study.rows, buf))?;
    out.metric("slope", study.slope);
    Ok(())
}

fn sweep(cfg: &Resolved, data: &InitialData, out: &mut Outputs) -> Result<(), Failure> {
    let rows = out.time("eps_sweep", || eps_sweep(data, cfg.t_final(), &cfg.eps_values, cfg.grid_n))?;
    out.write("eps_sweep.csv", |buf| write_rows(&rows, buf))?;
    out.metric("rows", &rows);
    Ok(())
}
