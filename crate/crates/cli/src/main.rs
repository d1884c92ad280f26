use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{info, warn};

use toa_core::scenario::{
    figure_preset, parse_config, run_scenario, summary_text, write_outputs, ScenarioConfig, ScenarioError, PRESET_NAMES,
};

const EXIT_VALIDATION: u8 = 2;
const EXIT_AUDIT: u8 = 3;
const EXIT_OTHER: u8 = 1;

#[derive(Parser)]
#[command(name = "toa", version, about = "Quantum time-of-arrival scenarios")]
struct Cli {
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario described by a config file.
    Run {
        config: PathBuf,
        /// Overrides `output.directory`.
        #[arg(short, long)]
        out_dir: Option<PathBuf>,
    },
    /// Run one of the built-in figure scenarios.
    Preset {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
        name: String,
        /// Print the preset as a config file instead of running it.
        #[arg(long)]
        emit_config: bool,
        #[arg(short, long)]
        out_dir: Option<PathBuf>,
    },
    /// Check a config file without running it.
    Validate { config: PathBuf },
}

fn read_config(path: &Path) -> Result<ScenarioConfig, ExitCode> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(EXIT_VALIDATION)
    })?;
    parse_config(&text).map_err(|e| {
        eprintln!("{}: invalid config\n{e}", path.display());
        ExitCode::from(EXIT_VALIDATION)
    })
}

fn exit_for(err: &ScenarioError) -> ExitCode {
    ExitCode::from(match err {
        ScenarioError::Schema(_) | ScenarioError::UnknownPreset(_) => EXIT_VALIDATION,
        ScenarioError::NonFinite { .. } => EXIT_AUDIT,
        ScenarioError::Variant { .. } | ScenarioError::Sink { .. } => EXIT_OTHER,
    })
}

fn execute(mut config: ScenarioConfig, out_dir: Option<PathBuf>) -> ExitCode {
    if let Some(dir) = out_dir {
        config.output.directory = dir;
    }
    info!("running {} ({} variants)", config.name, config.variant_labels().len());
    let run = match run_scenario(&config) {
        Ok(run) => run,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_for(&e);
        }
    };
    let written = match write_outputs(
        &config.output.directory,
        &config.output.prefix,
        &run.series,
        &run.reports,
    ) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_for(&e);
        }
    };
    print!("{}", summary_text(&run.reports));
    for path in written
        .series
        .iter()
        .chain([&written.summary_text, &written.summary_kv])
    {
        println!("wrote {}", path.display());
    }
    for label in run.window_warnings() {
        warn!("{label}: time window cuts off part of the arrivals");
    }
    if run.convergence_failed() {
        eprintln!("error: convergence audit failed");
        return ExitCode::from(EXIT_AUDIT);
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot set up {n} threads: {e}");
            return ExitCode::from(EXIT_OTHER);
        }
    }
    match cli.command {
        Command::Run { config, out_dir } => match read_config(&config) {
            Ok(c) => execute(c, out_dir),
            Err(code) => code,
        },
        Command::Preset {
            name,
            emit_config,
            out_dir,
        } => {
            let config = match figure_preset(&name) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return exit_for(&e);
                }
            };
            if emit_config {
                print!("{}", config.to_toml());
                ExitCode::SUCCESS
            } else {
                execute(config, out_dir)
            }
        }
        Command::Validate { config } => match read_config(&config) {
            Ok(c) => {
                println!(
                    "{}: ok ({}, variants: {})",
                    config.display(),
                    c.kind.name(),
                    c.variant_labels().join(", ")
                );
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
    }
}
