use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use der_sizer::io::{
    load_profile_csv, parse_load_profile, parse_results_csv, parse_wind_series, render, render_csv,
    resolve_bounds, write_atomic, write_report, Format, PipelineConfigFile, SyntheticLoad,
};
use der_sizer::metrics::evaluate;
use der_sizer::search::{run_exhaustive, run_pipeline};
use der_sizer::{non_dominated, DesignSpace, Error, EvaluatedDesign, LoadProfile, MicrogridDesign};
use der_sizer::{ReferenceSimulator, Result, Simulator};

#[derive(Parser)]
#[command(name = "der-sizer", version, about = "Enumerate right-sized microgrid designs for a load profile")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full sizing pipeline.
    Size(RunArgs),
    /// Simulate every design on a single grid (slow; used as a reference).
    Exhaustive(RunArgs),
    /// Simulate one design and print its metrics.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated capacities in config order.
        #[arg(long, value_delimiter = ',', required = true)]
        capacities: Vec<f64>,
    },
    /// Keep the non-dominated rows of a results CSV.
    Filter {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        deficit_threshold: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic load profile CSV.
    SynthLoad {
        /// Number of time steps.
        #[arg(long, default_value_t = 5040)]
        steps: usize,
        #[arg(long, default_value_t = 240)]
        step_seconds: i64,
        #[arg(long, default_value_t = 120.0)]
        peak_kw: f64,
        /// Relative noise amplitude.
        #[arg(long, default_value_t = 0.04)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Grid points per DER (fine grid for `size`).
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    deficit_threshold: Option<f64>,
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Output file; defaults to the config's output_path, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::SafetyCap { .. } => 3,
        Error::Config(_) | Error::Parse { .. } | Error::InvalidArgument(_) | Error::Json(_) | Error::Csv(_) => 2,
        Error::Io(_) => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(exit_code(&e));
    }
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("DER_SIZER_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("DER_SIZER_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Config(e.to_string()))
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Size(args) => run(args, false),
        Command::Exhaustive(args) => run(args, true),
        Command::Simulate { config, capacities } => simulate(&config, capacities),
        Command::Filter {
            input,
            deficit_threshold,
            out,
        } => filter(&input, deficit_threshold, out.as_deref()),
        Command::SynthLoad {
            steps,
            step_seconds,
            peak_kw,
            noise,
            seed,
            out,
        } => {
            let load = SyntheticLoad {
                steps,
                step_seconds,
                peak_kw,
                noise,
                seed,
                ..SyntheticLoad::two_weeks(peak_kw, seed)
            }
            .generate()?;
            emit(out.as_deref(), &load_profile_csv(&load))
        }
    }
}

struct Instance {
    config: PipelineConfigFile,
    space: DesignSpace,
    load: LoadProfile,
    simulator: ReferenceSimulator,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

fn instance(path: &Path) -> Result<Instance> {
    let config = PipelineConfigFile::load(path)?;
    let load = parse_load_profile(&read(&config.load_path)?)?;
    let space = resolve_bounds(&config, &load)?;
    let mut simulator = ReferenceSimulator::new(space.clone(), config.dispatch.clone())?;
    if let Some(wind) = &config.wind_series_path {
        simulator = simulator.with_wind_series(parse_wind_series(&read(wind)?)?);
    }
    info!(
        "{} DERs, {} load steps, peak {} kW",
        space.len(),
        load.len(),
        load.peak()
    );
    Ok(Instance {
        config,
        space,
        load,
        simulator,
    })
}

fn run(args: RunArgs, exhaustive: bool) -> Result<()> {
    let inst = instance(&args.config)?;
    let mut search = inst.config.search.clone();
    if let Some(seed) = args.seed {
        search.rng_seed = seed;
    }
    if let Some(t) = args.deficit_threshold {
        search.deficit_display_threshold = t;
    }
    let report = if exhaustive {
        let levels = args.levels.unwrap_or(search.fine_level_points);
        run_exhaustive(&inst.simulator, &inst.space, &inst.load, levels, &search)?
    } else {
        if let Some(levels) = args.levels {
            search.fine_level_points = levels;
        }
        run_pipeline(&inst.simulator, &inst.space, &inst.load, &search)?
    };
    info!(
        "{} designs, {} simulations in {:.2}s",
        report.final_designs.len(),
        report.all_simulated,
        report.elapsed.as_secs_f64()
    );
    match args.out.or(inst.config.output_path) {
        Some(path) => write_report(&inst.space, &report, args.format, &path),
        None => {
            if report.final_designs.is_empty() {
                warn!("no designs passed the final filter");
            }
            emit(None, &render(&inst.space, &report, args.format)?)
        }
    }
}

fn simulate(config: &Path, capacities: Vec<f64>) -> Result<()> {
    let inst = instance(config)?;
    let design = MicrogridDesign::new(capacities);
    inst.space.check(&design)?;
    let outcome = inst.simulator.operate(&design, &inst.load)?;
    let e = evaluate(&design, &outcome, &inst.load)?;
    let mut text = format!("deficit ratio {:.4}\n", e.deficit_ratio);
    for (der, ratio) in inst.space.ders().iter().zip(&e.unused_ratios) {
        text.push_str(&format!("{} unused ratio {ratio:.4}\n", der.name));
    }
    emit(None, &text)
}

fn filter(input: &Path, threshold: Option<f64>, out: Option<&Path>) -> Result<()> {
    let (columns, rows) = parse_results_csv(&read(input)?)?;
    let designs: Vec<EvaluatedDesign> = rows.into_iter().map(EvaluatedDesign::from).collect();
    let before = designs.len();
    let kept: Vec<EvaluatedDesign> = non_dominated(designs)
        .into_iter()
        .filter(|e| threshold.is_none_or(|t| e.deficit_ratio <= t))
        .collect();
    info!("kept {} of {before} rows", kept.len());
    emit(out, &render_csv(&columns, &kept)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}
