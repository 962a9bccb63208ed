use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use raop_cli::experiment::{run_experiment, write_outputs, ExperimentConfig};
use raop_cli::verify::run_all;
use raop_cli::{bounds_for_instance, generate_to_dir, read_instance, report_json, solve_instance};
use raop_core::bounds::LpVariant;
use raop_core::instance_gen::{Alignment, GeneratorConfig, PriceDist};
use raop_core::raop::SolverOptions;

/// Refined assortment optimization: generate instances, run solvers and
/// bounds, replicate experiment grids, and verify the reference values.
#[derive(Parser)]
#[command(name = "raop", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SolverFlags {
    /// Uniform grid size for the univariate line searches.
    #[arg(long, default_value_t = 256)]
    grid_points: usize,
    /// Golden-section stopping width for the line searches.
    #[arg(long, default_value_t = 1e-9)]
    line_tol: f64,
    /// Largest product count solved by exact enumeration.
    #[arg(long, default_value_t = 25)]
    enum_cap: usize,
    /// Points per axis for the small-instance grid oracle.
    #[arg(long, default_value_t = 101)]
    grid_per_axis: usize,
}

impl SolverFlags {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            grid_points: self.grid_points,
            line_tol: self.line_tol,
            enum_cap: self.enum_cap,
            grid_per_axis: self.grid_per_axis,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic mixture instances as JSON files.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Utility similarity parameter in (0, 1].
        #[arg(long)]
        epsilon: f64,
        /// Target revenue ratio r_min/r_max.
        #[arg(long)]
        alpha: f64,
        /// uniform | normal | multimodal | exponential | skewnormal
        #[arg(long, default_value = "uniform")]
        dist: PriceDist,
        /// random | aligned | anti
        #[arg(long, default_value = "random")]
        alignment: Alignment,
        /// Replications (files) to emit; each gets a derived seed.
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, default_value_t = 17)]
        seed: u64,
        #[arg(long, default_value = "instances")]
        out_dir: PathBuf,
    },
    /// Run solvers on an instance file and report revenues.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// Comma-separated solver names: ro,ro1,ro2,ro3,enum,grid,sacp.
        #[arg(long, value_delimiter = ',', required = true)]
        solvers: Vec<String>,
        #[command(flatten)]
        solver_flags: SolverFlags,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute every applicable upper bound for an instance file.
    Bounds {
        #[arg(long)]
        instance: PathBuf,
        /// printed | corrected
        #[arg(long, default_value = "corrected")]
        lp_variant: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a factorial experiment grid and write CSV reports.
    Experiment {
        #[arg(long, value_delimiter = ',', default_values_t = [5usize, 10, 15, 50, 100])]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 5, 10, 50, 100])]
        m: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.5])]
        epsilon: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.1, 0.2])]
        alpha: Vec<f64>,
        /// Price distributions to cross.
        #[arg(long, value_delimiter = ',', default_values = ["uniform", "normal", "multimodal", "exponential", "skewnormal"])]
        dists: Vec<PriceDist>,
        #[arg(long, value_delimiter = ',', default_values = ["random", "aligned", "anti"])]
        alignments: Vec<Alignment>,
        #[arg(long, default_value_t = 50)]
        reps: usize,
        #[arg(long, default_value_t = 17)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_values = ["ro1", "ro2", "ro3"])]
        solvers: Vec<String>,
        /// Worker threads (defaults to all cores). Outputs do not depend on
        /// this.
        #[arg(long)]
        workers: Option<usize>,
        #[command(flatten)]
        solver_flags: SolverFlags,
        #[arg(long, default_value = "experiment-out")]
        out_dir: PathBuf,
    },
    /// Re-derive the reference values and exit nonzero on any
    /// mismatch.
    VerifyPaper,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate {
            n,
            m,
            epsilon,
            alpha,
            dist,
            alignment,
            reps,
            seed,
            out_dir,
        } => {
            let base = GeneratorConfig {
                n,
                m,
                epsilon,
                price_dist: dist,
                alpha_target: alpha,
                alignment,
                seed,
            };
            let paths = generate_to_dir(&base, reps, &out_dir)?;
            for path in paths {
                println!("{}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve {
            instance,
            solvers,
            solver_flags,
            out,
        } => {
            let parsed = read_instance(&instance)?;
            let report = solve_instance(&parsed, &solvers, &solver_flags.options())?;
            let json = report_json(&report, &instance)?;
            match out {
                Some(path) => std::fs::write(&path, json + "\n")
                    .with_context(|| format!("writing {}", path.display()))?,
                None => println!("{json}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bounds {
            instance,
            lp_variant,
            out,
        } => {
            let parsed = read_instance(&instance)?;
            let variant: LpVariant = lp_variant.parse()?;
            let report = bounds_for_instance(&parsed, variant)?;
            let json = serde_json::to_string_pretty(&report)?;
            match out {
                Some(path) => std::fs::write(&path, json + "\n")
                    .with_context(|| format!("writing {}", path.display()))?,
                None => println!("{json}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Experiment {
            n,
            m,
            epsilon,
            alpha,
            dists,
            alignments,
            reps,
            seed,
            solvers,
            workers,
            solver_flags,
            out_dir,
        } => {
            let config = ExperimentConfig {
                n_values: n,
                m_values: m,
                epsilons: epsilon,
                alphas: alpha,
                dists,
                alignments,
                replications: reps,
                master_seed: seed,
                solvers,
                enum_cap: solver_flags.enum_cap,
                grid_points: solver_flags.grid_points,
                line_tol: solver_flags.line_tol,
                workers,
            };
            let output = run_experiment(&config)?;
            let paths = write_outputs(&output, &out_dir)?;
            for path in paths {
                println!("{}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyPaper => {
            let results = run_all();
            let mut failed = 0usize;
            for result in &results {
                println!("{}", result.line());
                if !result.pass {
                    failed += 1;
                }
            }
            println!(
                "verify-paper: {} checks, {} failed",
                results.len(),
                failed
            );
            Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}
