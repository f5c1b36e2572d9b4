use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use capmono::config::{ExperimentConfig, SUITES};
use capmono::models::{describe_families, parse_model_id, parse_param};
use capmono::{execute, exit_status, output, resolve_jobs, resolve_output_dir, EXIT_USAGE, JOBS_ENV};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "capmono", version, about = "Monotone quantities of exterior potentials on model manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured suites and write the four artifacts.
    Run {
        /// TOML config; the built-in defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (overrides CAPMONO_JOBS and the config).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Describe the built-in model families.
    ListModels,
    /// Run one suite on one model and print the verdicts.
    Check {
        /// One of geometry, potential, monotone, willmore, mcf.
        suite: String,
        /// Model id, e.g. `cone(alpha=0.5)` or `euclidean/2`.
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Extra family parameter as `name=value`; repeatable.
        #[arg(long = "param")]
        params: Vec<String>,
        #[arg(long)]
        r0: Option<f64>,
        /// Also write the artifacts here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn usage_error(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_USAGE as u8)
}

fn finish(config: &ExperimentConfig, jobs: Option<usize>, out: Option<PathBuf>, print: bool) -> ExitCode {
    let env = std::env::var(JOBS_ENV).ok();
    let jobs = match resolve_jobs(jobs, env.as_deref(), config) {
        Ok(j) => j,
        Err(e) => return usage_error(e),
    };
    let result = execute(config, jobs);
    if print {
        print!("{}", output::summary(&result.findings));
    }
    if !print || out.is_some() {
        let dir = resolve_output_dir(out.as_deref(), config);
        if let Err(e) = output::write_all(&dir, &result.rows, &result.traces, &result.findings) {
            return usage_error(format!("cannot write to {}: {e}", dir.display()));
        }
        let counts: Vec<String> = output::tally(&result.findings).iter().map(|(s, c)| format!("{s} {c}")).collect();
        eprintln!("wrote {} ({})", dir.display(), counts.join(", "));
    }
    ExitCode::from(exit_status(&result.findings) as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListModels => {
            print!("{}", describe_families());
            ExitCode::SUCCESS
        }
        Command::Run { config, out, jobs } => {
            let config = match config {
                Some(path) => ExperimentConfig::load(&path),
                None => Ok(ExperimentConfig::default()),
            };
            match config {
                Ok(config) => finish(&config, jobs, out, false),
                Err(e) => usage_error(e),
            }
        }
        Command::Check { suite, model, n, params, r0, out, jobs } => {
            if !SUITES.contains(&suite.as_str()) {
                return usage_error(format!("unknown suite `{suite}` (known: {})", SUITES.join(", ")));
            }
            if n < 3 {
                return usage_error(format!("invalid config key `n`: dimension must be at least 3, got {n}"));
            }
            let mut extra = BTreeMap::new();
            for pair in &params {
                match parse_param(pair) {
                    Ok((k, v)) => {
                        extra.insert(k, v);
                    }
                    Err(e) => return usage_error(e),
                }
            }
            let spec = match parse_model_id(&model, n, &extra) {
                Ok(spec) => spec,
                Err(e) => return usage_error(e),
            };
            let mut config = ExperimentConfig { models: vec![spec], suites: vec![suite], ..Default::default() };
            if let Some(r0) = r0 {
                let m = config.models[0].manifold().expect("parsed above");
                if !(r0 > 0.0 && m.warp().contains(r0)) {
                    return usage_error(format!("invalid config key `r0`: {r0} lies outside the model's domain"));
                }
                config.r0 = r0;
            }
            finish(&config, jobs, out, true)
        }
    }
}
