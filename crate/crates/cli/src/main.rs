//! Batch CLI for the two-tier heterogeneous network simulator.
//!
//! Exit codes: 0 success, 1 usage error, 2 configuration error,
//! 3 runtime or convergence failure.

use clap::{Args, Parser, Subcommand};
use hetsim::game::{
    enumerate_ne_bruteforce, find_ne, AccessGameSpec, PlayerPopulation, PricingSpec,
    StrategyProfile,
};
use hetsim::output::{
    write_cdf_csv, write_grid_csv, write_grid_svg, write_sweep_csv, write_trace_csv, GridField,
};
use hetsim::rng::derive_rng;
use hetsim::scenario::{
    capacity_cdf, coverage_map, parse_events, replay_trace, run_sweep, ScenarioConfig, SweepSpec,
    SweepVariable,
};
use rand::Rng;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_USAGE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "hetsim", version, about = "Two-tier heterogeneous network simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// Scenario configuration file (flat key = value); defaults apply when
    /// omitted.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write coverage loss / received-power grids as CSV and SVG.
    Map {
        #[command(flatten)]
        config: ConfigArg,
        /// Include the femtocell as a candidate server.
        #[arg(long, conflicts_with = "without_femtocell")]
        with_femtocell: bool,
        /// Macro-only baseline map.
        #[arg(long)]
        without_femtocell: bool,
        /// Grid cells as NxM, e.g. 100x100.
        #[arg(long, default_value = "100x100", value_parser = parse_grid)]
        grid: (usize, usize),
        /// Output basename; writes <out>.csv, <out>_loss.svg, <out>_rp.svg.
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte Carlo sweep over distance, price, users or beta.
    Sweep {
        #[command(flatten)]
        config: ConfigArg,
        /// Swept variable: distance | price | users | beta.
        #[arg(long, value_parser = parse_variable)]
        variable: SweepVariable,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Master seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Empirical capacity CDFs at the equilibrium.
    Cdf {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the best-response solver against the brute-force oracle on
    /// randomized games.
    NeCheck {
        #[command(flatten)]
        config: ConfigArg,
        /// Largest player count to test (2^P enumeration).
        #[arg(long, default_value_t = 12)]
        max_players: usize,
        /// Randomized games per player count.
        #[arg(long, default_value_t = 200)]
        games: usize,
    },
    /// Replay an allocation event file against the femto/optical pools.
    AllocTrace {
        #[command(flatten)]
        config: ConfigArg,
        /// Events file: request,voice|data,<id> / release,<id> / rebalance.
        #[arg(long)]
        events: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_grid(text: &str) -> Result<(usize, usize), String> {
    let (nx, ny) = text.split_once(['x', 'X']).ok_or("expected NxM, e.g. 100x100")?;
    let nx: usize = nx.trim().parse().map_err(|_| "bad cell count".to_string())?;
    let ny: usize = ny.trim().parse().map_err(|_| "bad cell count".to_string())?;
    if nx == 0 || ny == 0 {
        return Err("grid needs at least one cell per axis".into());
    }
    Ok((nx, ny))
}

fn parse_variable(text: &str) -> Result<SweepVariable, String> {
    SweepVariable::from_label(text)
        .ok_or_else(|| format!("unknown variable '{text}', expected distance|price|users|beta"))
}

enum AppError {
    Config(String),
    Runtime(String),
}

impl AppError {
    fn code(&self) -> u8 {
        match self {
            AppError::Config(_) => EXIT_CONFIG,
            AppError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    fn message(&self) -> &str {
        match self {
            AppError::Config(m) | AppError::Runtime(m) => m,
        }
    }
}

fn load_config(arg: &ConfigArg) -> Result<ScenarioConfig, AppError> {
    match &arg.config {
        None => Ok(ScenarioConfig::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| AppError::Config(format!("cannot read {}: {e}", path.display())))?;
            ScenarioConfig::parse(&text)
                .map_err(|e| AppError::Config(format!("{}: {e}", path.display())))
        }
    }
}

fn runtime<E: std::fmt::Display>(e: E) -> AppError {
    AppError::Runtime(e.to_string())
}

fn run_map(
    config: &ConfigArg,
    with_femtocell: bool,
    grid: (usize, usize),
    out: &Path,
) -> Result<(), AppError> {
    let cfg = load_config(config)?;
    let map = coverage_map(&cfg, grid.0, grid.1, with_femtocell).map_err(runtime)?;
    let csv = out.with_extension("csv");
    write_grid_csv(&map, &csv).map_err(runtime)?;
    let stem = out.with_extension("");
    let loss_svg = stem.with_file_name(format!(
        "{}_loss.svg",
        stem.file_name().unwrap_or_default().to_string_lossy()
    ));
    let rp_svg = stem.with_file_name(format!(
        "{}_rp.svg",
        stem.file_name().unwrap_or_default().to_string_lossy()
    ));
    write_grid_svg(&map, GridField::LossDb, &loss_svg).map_err(runtime)?;
    write_grid_svg(&map, GridField::RpDbm, &rp_svg).map_err(runtime)?;
    println!(
        "map: {} cells ({} femto-served) -> {}, {}, {}",
        map.cells.len(),
        map.cells.iter().filter(|c| c.server == hetsim::scenario::Server::Fbs).count(),
        csv.display(),
        loss_svg.display(),
        rp_svg.display(),
    );
    Ok(())
}

// Randomized game spec spanning the scales the scenario produces.
fn random_game<R: Rng + ?Sized>(players: usize, rng: &mut R) -> AccessGameSpec {
    let p_non = rng.random_range(0..16);
    AccessGameSpec::new(
        10f64.powf(rng.random_range(5.0..7.2)),
        rng.random_range(0.0..1.0),
        PlayerPopulation { p_sub: rng.random_range(0..8), p_non, p_players: players },
        PricingSpec::new(10f64.powf(rng.random_range(3.0..6.5)), rng.random_range(0.0..1.5), 1.0)
            .expect("valid pricing"),
        10f64.powf(rng.random_range(-14.0..-11.0)),
        10f64.powf(rng.random_range(0.0..3.5)),
        10f64.powf(rng.random_range(-3.0..-1.0)),
        10f64.powf(rng.random_range(-9.0..-5.0)),
        10f64.powf(rng.random_range(-13.0..-10.0)),
        rng.random_range(0.0..8.0),
        rng.random_range(0.0..8.0),
        rng.random_range(0..=(p_non + players).min(6)),
    )
    .expect("valid random game")
}

fn run_ne_check(config: &ConfigArg, max_players: usize, games: usize) -> Result<(), AppError> {
    let cfg = load_config(config)?;
    if max_players == 0 || max_players > 20 {
        return Err(AppError::Config("max-players must be in 1..=20".into()));
    }
    let mut all_ok = true;
    for players in 1..=max_players {
        let mut failures = 0usize;
        for g in 0..games {
            let mut rng = derive_rng(cfg.seed, 0xcafe, (players * 10_000 + g) as u64);
            let game = random_game(players, &mut rng);
            let start = if g % 2 == 0 {
                StrategyProfile::all_mbs(players)
            } else {
                StrategyProfile::all_fbs(players)
            };
            let solved = find_ne(&game, &start, 1 << players.min(16)).map_err(runtime)?;
            let oracle = enumerate_ne_bruteforce(&game).map_err(runtime)?;
            if !oracle.contains(&solved.profile) {
                failures += 1;
            }
        }
        let status = if failures == 0 { "pass" } else { "FAIL" };
        println!("ne-check P={players}: {status} ({games} games, {failures} mismatches)");
        all_ok &= failures == 0;
    }
    if all_ok {
        Ok(())
    } else {
        Err(AppError::Runtime("solver disagreed with the brute-force oracle".into()))
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Map { config, with_femtocell: _, without_femtocell, grid, out } => {
            run_map(&config, !without_femtocell, grid, &out)
        }
        Command::Sweep { config, variable, from, to, steps, trials, seed, out } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let spec = SweepSpec { variable, from, to, steps, trials };
            let records = run_sweep(&cfg, &spec).map_err(runtime)?;
            write_sweep_csv(&records, &out).map_err(runtime)?;
            println!("sweep: {} grid points x {trials} trials -> {}", records.len(), out.display());
            Ok(())
        }
        Command::Cdf { config, trials, seed, out } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let cdf = capacity_cdf(&cfg, trials).map_err(runtime)?;
            write_cdf_csv(&cdf, &out).map_err(runtime)?;
            println!("cdf: {trials} trials -> {}", out.display());
            Ok(())
        }
        Command::NeCheck { config, max_players, games } => run_ne_check(&config, max_players, games),
        Command::AllocTrace { config, events, out } => {
            let cfg = load_config(&config)?;
            let text = std::fs::read_to_string(&events)
                .map_err(|e| AppError::Config(format!("cannot read {}: {e}", events.display())))?;
            let parsed = parse_events(&text)
                .map_err(|e| AppError::Config(format!("{}: {e}", events.display())))?;
            let rows = replay_trace(&cfg, &parsed).map_err(runtime)?;
            write_trace_csv(&rows, &out).map_err(runtime)?;
            println!("alloc-trace: {} events -> {}", rows.len(), out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            use clap::error::ErrorKind;
            let kind = e.kind();
            let _ = e.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_USAGE)
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
