use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use log::{warn, LevelFilter};
use seirs_cli::{parse_config, run, write_trajectory, CliError, Command};

/// SEIRS epidemic model with latency delay: simulation and stability analysis.
#[derive(Debug, Parser)]
#[command(name = "seirs", version)]
struct Args {
    /// Analysis to run.
    #[arg(value_enum)]
    command: Command,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed, overrides ensemble.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Replica count, overrides ensemble.n_rep.
    #[arg(long)]
    reps: Option<usize>,
    /// CSV trajectory path, overrides run.trajectory.
    #[arg(long)]
    trajectory: Option<PathBuf>,
}

fn init_logging() {
    let level = match std::env::var("SEIRS_LOG").as_deref() {
        Ok("quiet") => LevelFilter::Off,
        Ok("info") => LevelFilter::Info,
        Ok("debug") => LevelFilter::Debug,
        _ => LevelFilter::Warn,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
}

fn execute(args: Args) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", args.config.display())))?;
    let parsed = parse_config(&text)?;
    let mut cfg = parsed.config;
    if let Some(seed) = args.seed {
        cfg.ensemble.seed = seed;
    }
    if let Some(reps) = args.reps {
        cfg.ensemble.n_rep = reps;
    }
    if args.trajectory.is_some() {
        cfg.trajectory = args.trajectory;
    }
    for w in &parsed.warnings {
        warn!("{w}");
    }

    let mut output = run(args.command, &cfg)?;
    for w in parsed.warnings.into_iter().rev() {
        output.report.warnings.insert(0, w);
    }
    if let (Some(path), Some(tr)) = (&cfg.trajectory, &output.trajectory) {
        let file = File::create(path).map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        write_trajectory(&mut w, tr)?;
        w.flush()?;
    }
    let text = output.report.render();
    match &args.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?
        }
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    init_logging();
    match execute(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("seirs: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
