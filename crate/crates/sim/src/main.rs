use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use eit_sim::scenario::StudyKind;
use eit_sim::{load_scenario, run_study, write_results, OutputFormat, SimError};

/// Channel-model studies driven by scenario files.
///
/// Log verbosity is read from EITSIM_LOG (error, warn, info, debug, trace).
#[derive(Parser)]
#[command(name = "eitsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the study described by a scenario file and write its tables.
    Run {
        scenario: PathBuf,
        /// Overrides the scenario's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Multiplies Monte Carlo counts.
        #[arg(long)]
        scale: Option<f64>,
        /// Output directory (default: the scenario's output.directory).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Worker threads (default: all cores). Results do not depend on it.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a scenario file and report every problem found.
    Validate { scenario: PathBuf },
    /// List the available studies.
    ListStudies,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

fn run(cli: Cli) -> Result<(), SimError> {
    match cli.command {
        Command::ListStudies => {
            for kind in StudyKind::ALL {
                println!("{:<20} {}", kind.as_str(), kind.description());
            }
            Ok(())
        }
        Command::Validate { scenario } => {
            let s = load_scenario(&scenario)?;
            println!("{}: valid {} scenario", scenario.display(), s.study.as_str());
            Ok(())
        }
        Command::Run {
            scenario,
            seed,
            scale,
            out,
            format,
            threads,
        } => {
            let mut s = load_scenario(&scenario)?;
            if let Some(seed) = seed {
                s.seed = seed;
            }
            if let Some(scale) = scale {
                s.scale = scale;
            }
            if let Some(f) = format {
                s.output.format = f.into();
            }
            if let Some(n) = threads {
                if n == 0 {
                    return Err(SimError::Validation(vec!["--threads: must be at least 1".into()]));
                }
                // only fails if a pool already exists, which cannot happen here
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            let dir = out.unwrap_or_else(|| PathBuf::from(&s.output.directory));
            let output = run_study(&s)?;
            for path in write_results(&output, &dir, s.output.format)? {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("EITSIM_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
