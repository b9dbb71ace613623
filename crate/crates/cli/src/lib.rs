//! Command-line front end: configuration loading, command dispatch and file
//! output. [`run_command`] is the whole program; `main` only forwards argv.

pub mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use kuramoto3::acceptance;
use kuramoto3::continuation::{write_branch_csv, ContinuationError};
use kuramoto3::scan::{write_scan_csv, write_scan_ppm, ColorTable, ScanError};
use kuramoto3::{
    classify, detect_hysteresis, integrate, jacobian_eigen, phase_locked_offset, rhs, scan_plane, stability_boundaries,
    summarize_all, sweep, sync_velocity, IntegrateError, Params, State, Traj,
};
use serde_json::{json, Value};
use thiserror::Error;

pub use config::{load_config, ConfigError, Equilibrium, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_BLOWUP: i32 = 2;
pub const EXIT_ACCEPTANCE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Invalid(String),
    #[error("{0} exists; pass --force to overwrite")]
    Exists(PathBuf),
    #[error("numerical blow-up: {0}")]
    BlowUp(String),
    #[error("{failed} acceptance criteria failed")]
    Acceptance { failed: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::BlowUp(_) => EXIT_BLOWUP,
            CliError::Acceptance { .. } => EXIT_ACCEPTANCE,
            _ => EXIT_INVALID,
        }
    }
}

impl From<IntegrateError> for CliError {
    fn from(e: IntegrateError) -> Self {
        match e {
            IntegrateError::NonFinite { .. } => CliError::BlowUp(e.to_string()),
            IntegrateError::InvalidConfig { .. } => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<ScanError> for CliError {
    fn from(e: ScanError) -> Self {
        match e {
            ScanError::Integrator(e) => e.into(),
            ScanError::Io(e) => CliError::Io(e),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<ContinuationError> for CliError {
    fn from(e: ContinuationError) -> Self {
        match e {
            ContinuationError::Integrator(e) => e.into(),
            ContinuationError::Io(e) => CliError::Io(e),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "kuramoto3", version, about = "Three inertial phase oscillators with pairwise and triadic coupling")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Scan worker threads; 0 uses every logical core.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Overwrite existing output files.
    #[arg(long, global = true)]
    pub force: bool,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    #[arg(long, global = true)]
    pub t_transient: Option<f64>,
    #[arg(long, global = true)]
    pub t_measure: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one trajectory and write it as CSV.
    Simulate,
    /// Classify the attractors of a (mu, gamma) grid; writes CSV and PPM.
    Scan,
    /// Sweep mu or alpha up and back down; writes branch CSVs and hysteresis intervals.
    Bifurcate,
    /// Print closed-form quantities and Jacobian spectra as JSON.
    Analytic,
    /// Run the acceptance criteria.
    Verify {
        /// Comma-separated criterion ids; all when absent.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

/// Parses argv (program name first), runs the command and returns the
/// process exit code. Diagnostics go to standard error.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Config file, then command-line overrides, then validation.
pub fn resolve_config(args: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    let overrides = [
        (&mut cfg.model.mu, args.mu),
        (&mut cfg.model.gamma, args.gamma),
        (&mut cfg.model.alpha, args.alpha),
        (&mut cfg.integrator.dt, args.dt),
        (&mut cfg.integrator.t_transient, args.t_transient),
        (&mut cfg.integrator.t_measure, args.t_measure),
    ];
    for (slot, v) in overrides {
        if let Some(v) = v {
            *slot = v;
        }
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    if let Command::Verify { only } = &cli.command {
        return verify(only);
    }
    let cfg = resolve_config(&cli.common)?;
    let out = Output {
        dir: cfg.out.clone(),
        force: cli.common.force,
    };
    match cli.command {
        Command::Simulate => simulate(&cfg, &out),
        Command::Scan => scan(&cfg, &out, cli.common.jobs),
        Command::Bifurcate => bifurcate(&cfg, &out),
        Command::Analytic => {
            println!("{}", serde_json::to_string_pretty(&analytic_report(&cfg)?).expect("plain json"));
            Ok(())
        }
        Command::Verify { .. } => unreachable!(),
    }
}

struct Output {
    dir: PathBuf,
    force: bool,
}

impl Output {
    /// Resolves `name` inside the output directory, refusing to clobber.
    fn path(&self, name: &str) -> Result<PathBuf, CliError> {
        let p = self.dir.join(name);
        if p.exists() && !self.force {
            return Err(CliError::Exists(p));
        }
        Ok(p)
    }

    fn create(&self, names: &[&str]) -> Result<Vec<PathBuf>, CliError> {
        // Check every target before writing any of them.
        let paths = names.iter().map(|n| self.path(n)).collect::<Result<Vec<_>, _>>()?;
        std::fs::create_dir_all(&self.dir)?;
        Ok(paths)
    }
}

fn writer(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path)?))
}

pub const TRAJECTORY_HEADER: &str = "t,theta1,theta2,theta3,omega1,omega2,omega3";

/// Trajectory CSV with unwrapped phases; floats use the shortest
/// representation that parses back to the same value.
pub fn write_trajectory_csv<W: Write>(traj: &Traj, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for (t, s) in traj.iter_timed() {
        let [a, b, c] = s.theta;
        let [x, y, z] = s.omega;
        writeln!(out, "{t},{a},{b},{c},{x},{y},{z}")?;
    }
    out.flush()
}

fn simulate(cfg: &RunConfig, out: &Output) -> Result<(), CliError> {
    let [path] = <[PathBuf; 1]>::try_from(out.create(&["trajectory.csv"])?).expect("one path");
    let traj = integrate(&cfg.initial_state(), &cfg.params(), &cfg.integrator())?;
    write_trajectory_csv(&traj, writer(&path)?)?;
    // Short runs are still written; they are just too short to label.
    let summary = summarize_all(&traj).ok();
    let label = summary.map(|s| classify(&s, &cfg.classifier));
    let report = json!({ "trajectory": path, "summary": summary, "label": label });
    println!("{}", serde_json::to_string_pretty(&report).expect("plain json"));
    Ok(())
}

fn scan(cfg: &RunConfig, out: &Output, jobs: usize) -> Result<(), CliError> {
    let paths = out.create(&["scan.csv", "scan.ppm"])?;
    let res = scan_plane(&cfg.scan_grid(), &cfg.params(), &cfg.integrator(), &cfg.classifier, jobs)?;
    write_scan_csv(&res, writer(&paths[0])?)?;
    write_scan_ppm(&res, &ColorTable::default(), writer(&paths[1])?)?;
    let blowups: usize = res.cells.iter().map(|c| c.blowups).sum();
    eprintln!(
        "scanned {} cells: chimera fraction {:.3}, {blowups} blow-ups; wrote {} and {}",
        res.cells.len(),
        res.chimera_fraction(),
        paths[0].display(),
        paths[1].display()
    );
    Ok(())
}

fn bifurcate(cfg: &RunConfig, out: &Output) -> Result<(), CliError> {
    let spec = cfg.sweep_spec();
    let down_wanted = cfg.command.bifurcate.down;
    let names: &[&str] = if down_wanted {
        &["branch_up.csv", "branch_down.csv", "hysteresis.json"]
    } else {
        &["branch_up.csv"]
    };
    let paths = out.create(names)?;
    let up = sweep(&spec)?;
    write_branch_csv(&up, writer(&paths[0])?)?;
    if !down_wanted {
        return Ok(());
    }
    let down_spec = kuramoto3::SweepSpec {
        initial: up.records.last().map(|r| r.state),
        ..spec.reversed()
    };
    let down = sweep(&down_spec)?;
    write_branch_csv(&down, writer(&paths[1])?)?;
    let intervals = detect_hysteresis(&up, &down, &cfg.classifier)?;
    let report = json!({
        "axis": spec.axis,
        "intervals": intervals.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
    });
    let text = serde_json::to_string_pretty(&report).expect("plain json");
    let mut w = writer(&paths[2])?;
    writeln!(w, "{text}")?;
    w.flush()?;
    println!("{text}");
    Ok(())
}

fn eigen_json(state: &State, params: &Params) -> Result<Value, CliError> {
    let eig = jacobian_eigen(state, params).map_err(|e| CliError::Invalid(format!("eigenvalues: {e}")))?;
    Ok(json!(eig.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()))
}

/// Closed-form velocities, reference lines, the 2+1 locked branch and
/// Jacobian spectra of the requested states.
pub fn analytic_report(cfg: &RunConfig) -> Result<Value, CliError> {
    let p = cfg.params();
    let ws = sync_velocity(&p);
    let lines: Vec<Value> = stability_boundaries(p.alpha)
        .iter()
        .map(|l| {
            json!({
                "kind": l.kind,
                "slope": l.slope,
                "gamma_at_mu": l.gamma_at(p.mu),
                "applies": l.applies_at(p.alpha),
            })
        })
        .collect();
    let locked = phase_locked_offset(&p);
    let mut eigen = serde_json::Map::new();
    for eq in &cfg.command.analytic.equilibria {
        let (name, state) = match eq {
            Equilibrium::Sync => ("sync", Some(State::new([0.0; 3], [ws; 3]))),
            Equilibrium::Splay => {
                let s = State::splay();
                let w = rhs(&s, &p).domega[0] * p.m / p.epsilon;
                ("splay", Some(State::new(s.theta, [w; 3])))
            }
            Equilibrium::PhaseLocked => ("phase_locked", locked.map(|b| b.state_at(0.0))),
        };
        let v = match state {
            Some(s) => eigen_json(&s, &p)?,
            None => Value::Null,
        };
        eigen.insert(name.to_string(), v);
    }
    Ok(json!({
        "params": cfg.model,
        "sync_velocity": ws,
        "boundaries": lines,
        "phase_locked": locked.map(|b| json!({ "delta": b.delta, "omega": b.omega })),
        "eigenvalues": eigen,
    }))
}

fn verify(only: &[u8]) -> Result<(), CliError> {
    if let Some(bad) = only.iter().find(|id| !acceptance::CRITERIA.iter().any(|(c, _)| c == *id)) {
        return Err(CliError::Invalid(format!("unknown criterion {bad}")));
    }
    let mut failed = 0;
    let mut summary = String::new();
    for r in acceptance::run(only) {
        println!("{r}");
        failed += usize::from(!r.passed);
        let _ = write!(summary, "{}", if r.passed { '.' } else { 'F' });
    }
    eprintln!("{summary}");
    if failed > 0 {
        return Err(CliError::Acceptance { failed });
    }
    Ok(())
}
