//! Command-line front end. Every command writes one CSV table; exit codes are
//! 0 (success), 1 (validation failure), 2 (configuration error) and
//! 3 (numerical failure).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{ConfigError, RunConfig};
use crate::error::Error;
use crate::motion::{IntegratorSettings, MotionFrame};
use crate::observables::{self, hamilton_residual, records, uniform_grid, wavefunction};
use crate::states::{overlap, parameters, photon_statistics};

#[derive(Debug, Parser)]
#[command(name = "tdcss", version, about = "Coherent squeezed states of time-dependent quadratic Hamiltonians")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trajectory of the motion integrals and observables on the configured grid.
    Evolve(CommonArgs),
    /// Photon-number distributions at the requested times.
    Fock(CommonArgs),
    /// Position-space wavefunction at one time.
    Density(DensityArgs),
    /// Overlap of the states of two configurations at one time.
    Overlap(CommonArgs),
    /// Invariant checks on the configured run.
    Validate(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Run configuration (TOML); `overlap` takes it twice.
    #[arg(long, required = true)]
    pub config: Vec<PathBuf>,
    /// Comma-separated times.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub times: Option<Vec<f64>>,
    /// Read `--times` as Mathieu time τ = ω₀t/2 (preset only).
    #[arg(long)]
    pub tau: bool,
    /// Output file; defaults to `[output] path`, then standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Position grid as `xmin,xmax,points`.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
    pub grid: Option<Vec<f64>>,
}

/// Why a command stopped.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Config(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Config(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::InvalidSchedule(_) | Error::Evaluation { .. } => Failure::Config(e.to_string()),
            Error::Numerical { .. } | Error::Convergence { .. } => Failure::Numerical(e.to_string()),
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("{}", f.message());
            f.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> Result<(), Failure> {
    match command {
        Command::Evolve(a) => cmd_evolve(a),
        Command::Fock(a) => cmd_fock(a),
        Command::Density(a) => cmd_density(a),
        Command::Overlap(a) => cmd_overlap(a),
        Command::Validate(a) => cmd_validate(a),
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV table with a header row; rejects non-finite values.
struct Table {
    text: String,
}

impl Table {
    fn new(columns: &[String]) -> Self {
        Self {
            text: columns.join(",") + "\n",
        }
    }

    fn row(&mut self, values: &[f64]) -> Result<(), Failure> {
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Failure::Numerical(format!("non-finite value {v} in output")));
        }
        let cells: Vec<String> = values.iter().map(|&v| num(v)).collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
        Ok(())
    }

    fn raw_row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }
}

fn write_output(args: &CommonArgs, cfg: &RunConfig, table: &Table) -> Result<(), Failure> {
    match args.out.as_ref().or(cfg.output.path.as_ref()) {
        Some(path) => std::fs::write(path, &table.text)
            .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(table.text.as_bytes()).and_then(|_| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(Failure::Config(format!("cannot write to standard output: {e}")))
                }
                _ => Ok(()),
            }
        }
    }
}

fn single_config(args: &CommonArgs) -> Result<RunConfig, Failure> {
    match args.config.as_slice() {
        [path] => Ok(RunConfig::load(path)?),
        _ => Err(Failure::Config("exactly one --config is required".into())),
    }
}

/// Requested times converted to physical time.
fn requested_times(args: &CommonArgs, cfg: &RunConfig) -> Result<Vec<f64>, Failure> {
    let Some(times) = &args.times else {
        return Err(Failure::Config("--times is required".into()));
    };
    if times.is_empty() {
        return Err(Failure::Config("--times is empty".into()));
    }
    if !args.tau {
        return Ok(times.clone());
    }
    match cfg.mathieu() {
        Some(m) => Ok(times.iter().map(|&tau| m.t_of_tau(tau)).collect()),
        None => Err(Failure::Config("--tau requires preset = \"mathieu\"".into())),
    }
}

/// Frames at arbitrary (unsorted, repeated) times, in the order requested.
fn frames_in_order(cfg: &RunConfig, times: &[f64], settings: &IntegratorSettings) -> Result<Vec<MotionFrame>, Failure> {
    let mut sorted = times.to_vec();
    sorted.sort_by(f64::total_cmp);
    let frames = cfg.frames_at(&sorted, settings)?;
    Ok(times
        .iter()
        .map(|t| frames[sorted.partition_point(|s| s < t)])
        .collect())
}

fn label(x: f64) -> String {
    format!("{x}")
}

fn cmd_evolve(args: &CommonArgs) -> Result<(), Failure> {
    let cfg = single_config(args)?;
    if args.times.is_some() || args.tau {
        return Err(Failure::Config("evolve uses the [integration] grid; --times is not accepted".into()));
    }
    let Some(grid) = &cfg.grid else {
        return Err(Failure::Config("evolve needs integration.t_end, tau_end or times".into()));
    };
    let frames = cfg.frames_at(grid, &cfg.settings)?;
    let schedule = cfg.schedule();
    let recs = records(&frames, &schedule)?;
    let preset = cfg.mathieu();

    let mut columns: Vec<String> = vec!["t".into()];
    if preset.is_some() {
        columns.push("tau".into());
    }
    columns.extend(
        [
            "re_f", "im_f", "re_g", "im_g", "re_phi", "im_phi", "xi_re", "xi_im", "zeta_re", "zeta_im", "xbar",
            "pbar", "sigma_x", "sigma_p", "sigma_xp", "heisenberg", "sr", "energy",
        ]
        .map(String::from),
    );
    let mut table = Table::new(&columns);
    for (fr, rec) in frames.iter().zip(&recs) {
        let p = parameters(fr);
        let mut row = vec![fr.t];
        if let Some(m) = preset {
            row.push(m.tau_of_t(fr.t));
        }
        row.extend([
            fr.f.re,
            fr.f.im,
            fr.g.re,
            fr.g.im,
            fr.varphi.re,
            fr.varphi.im,
            p.xi.re,
            p.xi.im,
            p.zeta.re,
            p.zeta.im,
            rec.xbar,
            rec.pbar,
            rec.sigma_x,
            rec.sigma_p,
            rec.sigma_xp,
            rec.heisenberg,
            rec.sr_invariant,
            rec.mean_energy,
        ]);
        table.row(&row)?;
    }
    write_output(args, &cfg, &table)
}

fn cmd_fock(args: &CommonArgs) -> Result<(), Failure> {
    let cfg = single_config(args)?;
    let times = requested_times(args, &cfg)?;
    let frames = frames_in_order(&cfg, &times, &cfg.settings)?;
    let keep = cfg.output.rows.unwrap_or(usize::MAX);
    let stats = frames
        .iter()
        .map(|fr| photon_statistics(fr, cfg.output.tail_tolerance, cfg.output.n_max, keep))
        .collect::<Result<Vec<_>, _>>()?;

    let prefix = if args.tau { "p_tau=" } else { "p_t=" };
    let shown = args.times.as_ref().expect("checked by requested_times");
    let mut columns = vec!["n".to_string()];
    columns.extend(shown.iter().map(|&t| format!("{prefix}{}", label(t))));
    let mut table = Table::new(&columns);
    let rows = stats.iter().map(|s| s.head.len()).max().unwrap_or(0);
    for n in 0..rows {
        let mut cells = vec![n.to_string()];
        for s in &stats {
            cells.push(num(s.head.get(n).copied().unwrap_or(0.0)));
        }
        table.raw_row(&cells);
    }
    write_output(args, &cfg, &table)
}

fn cmd_density(args: &DensityArgs) -> Result<(), Failure> {
    let common = &args.common;
    let cfg = single_config(common)?;
    let times = requested_times(common, &cfg)?;
    let [t] = times.as_slice() else {
        return Err(Failure::Config("density takes exactly one time in --times".into()));
    };
    let frame = frames_in_order(&cfg, &[*t], &cfg.settings)?[0];
    let units = cfg.units();
    let xs = match &args.grid {
        Some(spec) => match spec.as_slice() {
            [a, b, n] if a.is_finite() && b.is_finite() && *n >= 2.0 && n.fract() == 0.0 && a < b => {
                uniform_grid(*a, *b, *n as usize)
            }
            _ => return Err(Failure::Config("--grid must be xmin,xmax,points with xmin < xmax, points >= 2".into())),
        },
        None => {
            let (xbar, _) = observables::means(&frame, &units);
            let (sx, _, _) = observables::deviations(&frame, &units);
            let half = cfg.output.density_sigmas * sx;
            uniform_grid(xbar - half, xbar + half, cfg.output.density_points)
        }
    };
    let w = wavefunction(&frame, &xs, &units)?;
    let mut table = Table::new(&["x", "re_psi", "im_psi", "rho"].map(String::from));
    for i in 0..w.x.len() {
        table.row(&[w.x[i], w.psi[i].re, w.psi[i].im, w.rho[i]])?;
    }
    write_output(common, &cfg, &table)
}

fn cmd_overlap(args: &CommonArgs) -> Result<(), Failure> {
    let [path_a, path_b] = args.config.as_slice() else {
        return Err(Failure::Config("overlap needs exactly two --config arguments".into()));
    };
    let a = RunConfig::load(path_a)?;
    let b = RunConfig::load(path_b)?;
    if args.tau && (a.mathieu().is_none() || b.mathieu().is_none()) {
        return Err(Failure::Config("--tau requires both configurations to use the mathieu preset".into()));
    }
    let t_a = requested_times(args, &a)?;
    let t_b = requested_times(args, &b)?;
    let ([ta], [tb]) = (t_a.as_slice(), t_b.as_slice()) else {
        return Err(Failure::Config("overlap takes exactly one time in --times".into()));
    };
    let fa = frames_in_order(&a, &[*ta], &a.settings)?[0];
    let fb = frames_in_order(&b, &[*tb], &b.settings)?[0];
    let ov = overlap(&fa, &fb);
    let mut table = Table::new(&["re_overlap", "im_overlap", "abs_overlap"].map(String::from));
    table.row(&[ov.re, ov.im, ov.norm()])?;
    write_output(args, &a, &table)
}

/// One named invariant check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub description: &'static str,
    pub value: f64,
    pub threshold: f64,
    /// `true` when `value` must be at least `threshold` rather than at most.
    pub at_least: bool,
}

impl Check {
    pub fn passed(&self) -> bool {
        if self.at_least {
            self.value >= self.threshold
        } else {
            self.value <= self.threshold
        }
    }
}

/// Unitarity, Schrödinger–Robertson minimization, second-order convergence of
/// the Hamilton residual, and normalization of the final Fock distribution.
/// Drift monitoring is disabled so that a poorly resolved run is reported by
/// the checks rather than aborted.
pub fn validation_checks(cfg: &RunConfig) -> Result<Vec<Check>, Failure> {
    let Some(grid) = &cfg.grid else {
        return Err(Failure::Config("validate needs integration.t_end, tau_end or times".into()));
    };
    let settings = IntegratorSettings {
        drift_threshold: f64::INFINITY,
        ..cfg.settings
    };
    let units = cfg.units();
    let hbar2 = 0.25 * units.hbar() * units.hbar();
    let frames = cfg.frames_at(grid, &settings)?;
    let schedule = cfg.schedule();
    let recs = records(&frames, &schedule)?;

    let unitarity = frames.iter().map(|f| (f.invariant() - 1.0).abs()).fold(0.0, f64::max);
    let sr = recs
        .iter()
        .map(|r| (r.sr_invariant - hbar2).abs() / hbar2)
        .fold(0.0, f64::max);

    let t_end = grid.last().copied().unwrap_or(0.0);
    let mut convergence = f64::INFINITY;
    if t_end > 0.0 {
        let mut residuals = Vec::new();
        for n in [1000, 2000] {
            let ts = uniform_grid(0.0, t_end, n + 1);
            let fr = cfg.frames_at(&ts, &settings)?;
            residuals.push(hamilton_residual(&records(&fr, &schedule)?, &schedule)?);
        }
        let (coarse, fine) = (residuals[0], residuals[1]);
        let ratio = |c: f64, f: f64| if c <= 1e-12 { f64::INFINITY } else { c / f };
        convergence = ratio(coarse.0, fine.0).min(ratio(coarse.1, fine.1));
    }

    let tol = cfg.output.tail_tolerance;
    let last = frames.last().expect("grid is non-empty");
    let normalization = match photon_statistics(last, tol, cfg.output.n_max, 0) {
        Ok(s) => (s.total - 1.0).abs(),
        Err(Error::Convergence { .. }) => f64::INFINITY,
        Err(e) => return Err(e.into()),
    };

    Ok(vec![
        Check {
            name: "unitarity",
            description: "max | |f|^2 - |g|^2 - 1 |",
            value: unitarity,
            threshold: 1e-8,
            at_least: false,
        },
        Check {
            name: "schrodinger_robertson",
            description: "max |sigma_x^2 sigma_p^2 - sigma_xp^2 - hbar^2/4| / (hbar^2/4)",
            value: sr,
            threshold: 1e-8,
            at_least: false,
        },
        Check {
            name: "hamilton_convergence",
            description: "Hamilton residual ratio when halving h",
            value: convergence,
            threshold: 3.5,
            at_least: true,
        },
        Check {
            name: "normalization",
            description: "|sum P_n - 1| at the final time",
            value: normalization,
            threshold: 2.0 * tol,
            at_least: false,
        },
    ])
}

fn cmd_validate(args: &CommonArgs) -> Result<(), Failure> {
    let cfg = single_config(args)?;
    let checks = validation_checks(&cfg)?;
    let mut table = Table::new(&["check", "value", "threshold", "passed"].map(String::from));
    let mut report = String::new();
    for c in &checks {
        let verdict = if c.passed() { "PASS" } else { "FAIL" };
        let relation = if c.at_least { ">=" } else { "<=" };
        let _ = writeln!(
            report,
            "{verdict} {}: {} = {:e} (required {relation} {:e})",
            c.name, c.description, c.value, c.threshold
        );
        table.raw_row(&[
            c.name.to_string(),
            num(c.value),
            num(c.threshold),
            u8::from(c.passed()).to_string(),
        ]);
    }
    eprint!("{report}");
    write_output(args, &cfg, &table)?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed()).map(|c| c.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Validation(format!("failed checks: {}", failed.join(", "))))
    }
}
