//! `lzs-sim`: rates, stationary populations, trajectories and population maps
//! for the driven four-level flux qubit.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use lzs_core::config::{load_config, RunConfig};
use lzs_core::dynamics::{integrate, max_step};
use lzs_core::output::{format_value, write_grid_csv, write_grid_pgm, write_trajectory_csv};
use lzs_core::steady_state::solve_model;
use lzs_core::sweep::{left_population, point_rates, study_matrix, sweep_grid};
use lzs_core::{verify, DriveSpec, Model, PopulationVector, RateMatrix, SweepGrid};

#[derive(Debug, Parser)]
#[command(
    name = "lzs-sim",
    version,
    about = "Landau-Zener-Stückelberg interference in a four-level flux qubit"
)]
struct Cli {
    /// Worker threads for grid sweeps (default: one per core).
    #[arg(long, global = true, env = "LZS_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the transition rate of one crossing at one point.
    Rate {
        #[command(flatten)]
        point: Point,
        /// Crossing as two level indices, e.g. `0,2`.
        #[arg(long, default_value = "0,2", value_parser = parse_crossing)]
        crossing: (usize, usize),
    },
    /// Print the stationary populations at one point.
    Steady {
        #[command(flatten)]
        point: Point,
        #[arg(long)]
        model: Option<Model>,
    },
    /// Integrate the rate equations from the ground state and write a CSV trajectory.
    Dynamics {
        #[command(flatten)]
        point: Point,
        #[arg(long)]
        model: Option<Model>,
        /// Step, ns (default: the stability limit).
        #[arg(long)]
        dt: Option<f64>,
        /// End time, ns.
        #[arg(long)]
        tmax: f64,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Map the left-well population over the configured grid.
    Sweep {
        #[command(flatten)]
        common: GridArgs,
        /// Output file; with `--format both` the extension is replaced.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One map per (gamma2, omega) pair, written into a directory.
    Study {
        #[command(flatten)]
        common: GridArgs,
        /// Drive frequencies, GHz.
        #[arg(long, value_delimiter = ',', required = true)]
        omegas: Vec<f64>,
        /// Dephasing rates, GHz.
        #[arg(long, value_delimiter = ',', required = true)]
        gamma2s: Vec<f64>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the built-in oracle checks.
    Verify,
}

#[derive(Debug, Args)]
struct Point {
    #[arg(long)]
    config: PathBuf,
    /// Static flux detuning, mΦ₀.
    #[arg(long, allow_negative_numbers = true)]
    dphi: f64,
    /// Drive amplitude, mΦ₀.
    #[arg(long)]
    phirf: f64,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    model: Option<Model>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Population mapped to black in PGM output.
    #[arg(long, default_value_t = 0.0)]
    vmin: f64,
    /// Population mapped to white in PGM output.
    #[arg(long, default_value_t = 1.0)]
    vmax: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Pgm,
    Both,
}

fn parse_crossing(s: &str) -> Result<(usize, usize), String> {
    let digits: Vec<&str> = if s.contains(',') {
        s.split(',').map(str::trim).collect()
    } else {
        s.split_terminator("").skip(1).collect()
    };
    match digits.as_slice() {
        [a, b] => Ok((
            a.parse().map_err(|_| format!("bad level `{a}`"))?,
            b.parse().map_err(|_| format!("bad level `{b}`"))?,
        )),
        _ => Err(format!("expected two level indices like `0,2`, got `{s}`")),
    }
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<lzs_core::Error> for Failure {
    fn from(error: lzs_core::Error) -> Self {
        anyhow::Error::from(error).into()
    }
}

impl From<std::io::Error> for Failure {
    fn from(error: std::io::Error) -> Self {
        anyhow::Error::from(error).into()
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let usage = error.chain().any(|e| {
            e.downcast_ref::<lzs_core::Error>()
                .is_some_and(lzs_core::Error::is_usage)
        });
        Failure {
            code: if usage { 2 } else { 1 },
            error,
        }
    }
}

fn usage(msg: &str) -> Failure {
    Failure {
        code: 2,
        error: anyhow!("{msg}"),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().context("starting worker pool")?;
    pool.install(|| dispatch(cli.command))
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Rate { point, crossing } => rate(&point, crossing)?,
        Command::Steady { point, model } => steady(&point, model)?,
        Command::Dynamics {
            point,
            model,
            dt,
            tmax,
            out,
        } => dynamics(&point, model, dt, tmax, out.as_deref())?,
        Command::Sweep { common, out } => sweep(&common, out)?,
        Command::Study {
            common,
            omegas,
            gamma2s,
            out,
        } => study(&common, &omegas, &gamma2s, &out)?,
        Command::Verify => return verify_all(),
    }
    Ok(())
}

/// Any failure to load a config is a usage error, including an unreadable file.
fn config(path: &Path) -> Result<RunConfig, Failure> {
    load_config(path).map_err(|e| Failure {
        code: 2,
        error: anyhow::Error::from(e).context(format!("loading {}", path.display())),
    })
}

fn drive(cfg: &RunConfig, point: &Point) -> Result<DriveSpec, Failure> {
    Ok(DriveSpec::new(
        cfg.omega,
        point.phirf,
        point.dphi,
        cfg.gamma2,
    )?)
}

fn rate(point: &Point, (i, j): (usize, usize)) -> Result<(), Failure> {
    let cfg = config(&point.config)?;
    let d = drive(&cfg, point)?;
    let ch = cfg.qubit.channel(&d, i, j)?;
    let r = point_rates(&cfg.qubit, &d)?;
    let w = match (i, j) {
        (0, 2) => r.w02,
        (1, 2) => r.w12,
        (0, 3) => r.w03,
        _ => r.w13,
    };
    println!("crossing = {i},{j}");
    println!("epsilon_ghz = {}", format_value(ch.epsilon));
    println!("amplitude_ghz = {}", format_value(ch.amplitude));
    println!("rate_ghz = {}", format_value(w));
    Ok(())
}

fn print_populations(model: Model, p: &PopulationVector) {
    println!("model = {model}");
    for (k, v) in p.0.iter().enumerate() {
        println!("p{k} = {}", format_value(*v));
    }
    println!("p_left = {}", format_value(left_population(model, p)));
}

fn steady(point: &Point, model: Option<Model>) -> Result<(), Failure> {
    let cfg = config(&point.config)?;
    let model = model.unwrap_or(cfg.model);
    let rates = point_rates(&cfg.qubit, &drive(&cfg, point)?)?;
    let p = solve_model(model, &rates)?;
    print_populations(model, &p);
    Ok(())
}

fn dynamics(
    point: &Point,
    model: Option<Model>,
    dt: Option<f64>,
    tmax: f64,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let cfg = config(&point.config)?;
    let model = model.unwrap_or(cfg.model);
    let rates = point_rates(&cfg.qubit, &drive(&cfg, point)?)?;
    let g = RateMatrix::for_model(model, &rates);
    let dt = match dt {
        Some(dt) => dt,
        None => {
            let limit = max_step(&g);
            if limit.is_finite() {
                limit
            } else {
                tmax.max(1.0)
            }
        }
    };
    let traj = integrate(&g, &PopulationVector::GROUND, dt, tmax)?;
    info!("{} steps of {dt} ns", traj.times.len() - 1);
    match out {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            write_trajectory_csv(&traj, &mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = BufWriter::new(io::stdout().lock());
            write_trajectory_csv(&traj, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn write_outputs(
    grid: &SweepGrid,
    args: &GridArgs,
    csv: Option<&Path>,
    pgm: Option<&Path>,
) -> Result<(), Failure> {
    if let Some(path) = csv {
        write_grid_csv(grid, path)?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = pgm {
        write_grid_pgm(grid, path, args.vmin, args.vmax)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn sweep(args: &GridArgs, out: Option<PathBuf>) -> Result<(), Failure> {
    let cfg = config(&args.config)?;
    let (csv, pgm) = match (out, args.format) {
        (Some(p), Format::Csv) => (Some(p), None),
        (Some(p), Format::Pgm) => (None, Some(p)),
        (Some(p), Format::Both) => (Some(p.with_extension("csv")), Some(p.with_extension("pgm"))),
        (None, f) => (
            cfg.output_csv.clone().filter(|_| f != Format::Pgm),
            cfg.output_pgm.clone().filter(|_| f != Format::Csv),
        ),
    };
    if csv.is_none() && pgm.is_none() {
        return Err(usage(
            "no output path: pass --out or set output.csv / output.pgm in the config",
        ));
    }
    if pgm.is_some() && !(args.vmax > args.vmin) {
        return Err(usage("--vmax must exceed --vmin"));
    }
    let model = args.model.unwrap_or(cfg.model);
    let grid = sweep_grid(&cfg.qubit, cfg.omega, cfg.gamma2, &cfg.grid, model)?;
    write_outputs(&grid, args, csv.as_deref(), pgm.as_deref())?;
    Ok(())
}

fn study(args: &GridArgs, omegas: &[f64], gamma2s: &[f64], dir: &Path) -> Result<(), Failure> {
    let cfg = config(&args.config)?;
    let model = args.model.unwrap_or(cfg.model);
    if args.format != Format::Csv && !(args.vmax > args.vmin) {
        return Err(usage("--vmax must exceed --vmin"));
    }
    let grids = study_matrix(&cfg.qubit, omegas, gamma2s, &cfg.grid, model)?;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for grid in &grids {
        let stem = format!("omega_{}_gamma2_{}", grid.omega, grid.gamma2);
        let csv = (args.format != Format::Pgm).then(|| dir.join(format!("{stem}.csv")));
        let pgm = (args.format != Format::Csv).then(|| dir.join(format!("{stem}.pgm")));
        write_outputs(grid, args, csv.as_deref(), pgm.as_deref())?;
    }
    Ok(())
}

fn verify_all() -> Result<(), Failure> {
    let report = verify::run_all();
    for c in &report.checks {
        println!("{c}");
    }
    if report.passed() {
        Ok(())
    } else {
        Err(anyhow!("oracle checks failed").into())
    }
}
