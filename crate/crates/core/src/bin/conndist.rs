//! Command-line front end for the simulation grid and normative analysis.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 experiment failed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use conndist::connectivity::{IcohFold, Metric};
use conndist::distribution::{summarize, upper_triangle, DEFAULT_BINS};
use conndist::matrix_io;
use conndist::pipeline::normative::expand_inputs;
use conndist::pipeline::{run_normative_analysis, run_simulation_experiment, write_results, ExperimentConfig};
use conndist::signal_model::{generate_synthetic_leadfield, generate_synthetic_sources};
use conndist::spectral::Band;
use conndist::Error;

#[derive(Parser)]
#[command(name = "conndist", version, about = "Connectivity-weight distributions of scalp EEG networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the montage x metric x band simulation grid.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Overrides `master_seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        /// Comma-separated channel counts, e.g. `19,64`.
        #[arg(long, value_delimiter = ',')]
        montages: Option<Vec<usize>>,
        /// Comma-separated metrics, e.g. `COH,PLV`.
        #[arg(long, value_delimiter = ',')]
        metrics: Option<Vec<String>>,
        /// Comma-separated bands: `alpha` or `name:lo:hi`.
        #[arg(long)]
        bands: Option<String>,
    },
    /// Analyze stored cross-spectrum files (COH and iCOH only).
    Normative {
        /// Glob matching the cross-spectrum CSV files, one per subject.
        #[arg(long)]
        input: String,
        #[arg(long, default_value = "delta,theta,alpha,beta")]
        bands: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        #[arg(long)]
        jobs: Option<usize>,
        /// Collapse iCOH as the mean of |Im C| instead of |mean Im C|.
        #[arg(long)]
        icoh_mean_magnitude: bool,
    },
    /// Write a synthetic source library matrix.
    GenSources {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 200)]
        n_sources: usize,
        #[arg(long, default_value_t = 10_000)]
        n_samples: usize,
        #[arg(long, default_value_t = 200.0)]
        fs: f64,
        #[arg(long, default_value_t = 10.0)]
        alpha_hz: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Write a synthetic lead field for a built-in montage.
    GenLeadfield {
        #[arg(long)]
        out: PathBuf,
        /// std19, egi32, egi64, egi128 (or the bare channel count).
        #[arg(long)]
        montage: String,
        #[arg(long, default_value_t = 3002)]
        n_sources: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Distribution summary of a stored connectivity matrix, as JSON.
    Summarize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
    },
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) => Failure::Usage(e.to_string()),
            e => Failure::Data(e),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            if matches!(e, Error::ExperimentFailed { .. }) {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(Failure::Usage("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Failure::Usage(e.to_string())),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            seed,
            jobs,
            trials,
            montages,
            metrics,
            bands,
        } => {
            let mut cfg = match config {
                Some(path) => ExperimentConfig::load(&path)?,
                None => ExperimentConfig::default(),
            };
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(m) = montages {
                cfg.montages = m;
            }
            if let Some(m) = metrics {
                cfg.metrics = m
                    .iter()
                    .map(|s| s.parse::<Metric>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| Failure::Usage(e.to_string()))?;
            }
            if let Some(b) = bands {
                cfg.bands = Band::parse_list(&b).map_err(|e| Failure::Usage(e.to_string()))?;
            }
            cfg.validate()?;
            let tables = with_jobs(jobs, || run_simulation_experiment(&cfg))??;
            report(&tables);
            let echo = serde_json::to_value(&cfg).expect("config serializes");
            write_results(&tables, &out, &echo)?;
            eprintln!(
                "wrote {} trial rows and {} correlation rows to {}",
                tables.trials.len(),
                tables.correlations.len(),
                out.display()
            );
            Ok(())
        }
        Command::Normative {
            input,
            bands,
            out,
            bins,
            jobs,
            icoh_mean_magnitude,
        } => {
            let bands = Band::parse_list(&bands).map_err(|e| Failure::Usage(e.to_string()))?;
            let files = expand_inputs(&input)?;
            let fold = if icoh_mean_magnitude {
                IcohFold::MeanMagnitude
            } else {
                IcohFold::SignedMean
            };
            let tables = with_jobs(jobs, || run_normative_analysis(&files, &bands, bins, fold))??;
            report(&tables);
            let echo = serde_json::json!({
                "mode": "normative",
                "input": input,
                "files": files,
                "bands": bands,
                "n_bins": bins,
                "icoh_fold": fold,
            });
            write_results(&tables, &out, &echo)?;
            Ok(())
        }
        Command::GenSources {
            out,
            n_sources,
            n_samples,
            fs,
            alpha_hz,
            seed,
        } => {
            generate_synthetic_sources(n_sources, n_samples, fs, alpha_hz, seed)?.write(&out)?;
            Ok(())
        }
        Command::GenLeadfield {
            out,
            montage,
            n_sources,
            seed,
        } => {
            let lf = generate_synthetic_leadfield(&montage, n_sources, seed)
                .map_err(|e| match e {
                    Error::UnknownMontage(_) => Failure::Usage(e.to_string()),
                    e => Failure::Data(e),
                })?;
            lf.write(&out)?;
            Ok(())
        }
        Command::Summarize { input, bins } => {
            let (m, meta) = matrix_io::read_matrix(&input)?;
            let summary = summarize(&upper_triangle(&m)?, bins)?;
            let json = serde_json::json!({
                "input": input,
                "metric": meta.metric,
                "band": meta.band,
                "montage": meta.montage,
                "summary": summary,
            });
            println!("{}", serde_json::to_string_pretty(&json).expect("serializable"));
            Ok(())
        }
    }
}

fn report(tables: &conndist::pipeline::ResultTables) {
    for d in &tables.diagnostics {
        eprintln!("note: {d}");
    }
    for (cell, err) in &tables.failures {
        eprintln!("failed: {cell}: {err}");
    }
}
