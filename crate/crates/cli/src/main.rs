use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use quench_lab::config::{resolve, ExperimentConfig};
use quench_lab::experiments::{self, CATALOG};
use quench_lab::output::{error_json, report_error, write_outcome};

#[derive(Parser)]
#[command(
    name = "quench-lab",
    version,
    about = "Phase-space simulations of quenched oscillators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its artifacts.
    Run {
        experiment: String,
        /// TOML config, or a run_meta.json from an earlier run.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        trajectories: Option<usize>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        /// Worker threads (results do not depend on this).
        #[arg(long)]
        threads: Option<usize>,
        /// Also write a gnuplot script next to every CSV.
        #[arg(long)]
        gnuplot: bool,
    },
    /// Check a config file and print it with all defaults filled in.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Show the available experiments.
    List,
}

fn config_failure(messages: Vec<String>) -> ExitCode {
    report_error(None, &error_json("config", &messages));
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for (e, source, what) in CATALOG {
                println!("{:<8}{:<12}{what}", e.name(), source);
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config } => {
            let file = match ExperimentConfig::load(&config) {
                Ok(f) => f,
                Err(e) => return config_failure(vec![e]),
            };
            let Some(name) = file.experiment.clone() else {
                return config_failure(vec![format!(
                    "config has no 'experiment' key; expected one of {}",
                    experiments::names().join(", ")
                )]);
            };
            match resolve(&name, Some(&file), &ExperimentConfig::default()) {
                Ok(r) => {
                    print!("{}", r.config.to_toml());
                    ExitCode::SUCCESS
                }
                Err(errors) => config_failure(errors),
            }
        }
        Command::Run {
            experiment,
            config,
            seed,
            out_dir,
            trajectories,
            dt,
            t_end,
            threads,
            gnuplot,
        } => {
            let file = match config.as_deref().map(ExperimentConfig::load).transpose() {
                Ok(f) => f,
                Err(e) => return config_failure(vec![e]),
            };
            let flags = ExperimentConfig {
                seed,
                out_dir,
                trajectories,
                dt,
                t_end,
                ..Default::default()
            };
            let resolved = match resolve(&experiment, file.as_ref(), &flags) {
                Ok(r) => r,
                Err(errors) => return config_failure(errors),
            };
            if let Some(n) = threads {
                if n == 0 {
                    return config_failure(vec!["threads must be positive".into()]);
                }
                if let Err(e) = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                {
                    return config_failure(vec![e.to_string()]);
                }
            }
            let dir = resolved.out_dir();
            let start = Instant::now();
            let outcome = match experiments::run(resolved.experiment, &resolved.config) {
                Ok(o) => o,
                Err(e) => {
                    report_error(Some(&dir), &error_json("run", &[e.to_string()]));
                    return ExitCode::FAILURE;
                }
            };
            match write_outcome(&resolved, &outcome, gnuplot) {
                Ok(paths) => {
                    for p in paths {
                        println!("{}", p.display());
                    }
                    eprintln!(
                        "{} finished in {:.1} s",
                        resolved.experiment.name(),
                        start.elapsed().as_secs_f64()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    report_error(
                        None,
                        &error_json("io", &[format!("{}: {e}", dir.display())]),
                    );
                    ExitCode::FAILURE
                }
            }
        }
    }
}
