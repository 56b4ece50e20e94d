use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use reinforced_perc::bounds::DEFAULT_CUTOFF;
use reinforced_perc::cli::{
    any_failed, bounds_table, dump_environment, render, run, run_suite, BoundsRequest,
    ExperimentConfig, RunOptions, Suite, VerifyOptions,
};
use reinforced_perc::environment::RadiusLaw;
use reinforced_perc::graph::{GraphKind, GraphSpec};
use reinforced_perc::Error;

const EXIT_VALIDATION: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;

#[derive(Parser)]
#[command(name = "reinforced-perc", version, about = "Percolation experiments on G x Z with reinforced regions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Oracle,
    Identities,
    Statistics,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Oracle => Suite::Oracle,
            SuiteArg::Identities => Suite::Identities,
            SuiteArg::Statistics => Suite::Statistics,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Worker threads (output does not depend on it).
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Fill the wall_time column of the estimates CSV.
        #[arg(long)]
        wall_time: bool,
    },
    /// Run a self-check suite and print a pass/fail table.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        /// Random instances per oracle comparison.
        #[arg(long, default_value_t = 1000)]
        instances: usize,
        /// Samples per statistical check.
        #[arg(long, default_value_t = 20_000)]
        replicas: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Evaluate the closed-form bounds and print them as CSV.
    Bounds {
        /// Base graph, e.g. "integer_lattice dim=1" or "regular_tree degree=3".
        #[arg(long)]
        graph: String,
        /// Radius law, e.g. "geometric theta=0.5".
        #[arg(long)]
        law: String,
        /// Decay rate c of the two-point function.
        #[arg(long)]
        decay_rate: f64,
        #[arg(long, default_value_t = 0.9)]
        q: f64,
        /// Value the entropy series must reach when searching n0.
        #[arg(long, default_value_t = 0.5)]
        target: f64,
        #[arg(long, default_value_t = DEFAULT_CUTOFF)]
        cutoff: u64,
    },
    /// Print one environment of a config as an "index radius" table.
    DumpEnv {
        config: PathBuf,
        /// Environment index i, drawn with env_seed(master_seed, i).
        #[arg(long, default_value_t = 0)]
        index: u64,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn fail(err: Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(if err.is_validation() { EXIT_VALIDATION } else { EXIT_RUNTIME })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run {
            config,
            threads,
            wall_time,
        } => {
            let cfg = match ExperimentConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            match run(&cfg, &RunOptions { threads, wall_time }) {
                Ok(summary) => {
                    eprintln!(
                        "wrote {} rows to {}",
                        summary.rows.len(),
                        summary.estimates_path.display()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Verify {
            suite,
            instances,
            replicas,
            seed,
        } => {
            let opts = VerifyOptions {
                instances,
                replicas,
                seed,
            };
            match run_suite(suite.into(), &opts) {
                Ok(checks) => {
                    print!("{}", render(&checks));
                    if any_failed(&checks) {
                        ExitCode::from(EXIT_VERIFICATION)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(e) => fail(e),
            }
        }
        Command::Bounds {
            graph,
            law,
            decay_rate,
            q,
            target,
            cutoff,
        } => {
            let request = (|| {
                let kind: GraphKind = graph.parse()?;
                Ok::<_, Error>(BoundsRequest {
                    spec: GraphSpec::new(kind)?,
                    law: law.parse::<RadiusLaw>()?,
                    decay_rate,
                    q,
                    target,
                    cutoff,
                })
            })();
            let request = match request {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            match bounds_table(&request) {
                Ok((table, notes)) => {
                    print!("{}", table.to_csv());
                    for n in notes {
                        eprintln!("note: {n}");
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::DumpEnv { config, index, out } => {
            let text = match ExperimentConfig::load(&config).and_then(|c| dump_environment(&c, index)) {
                Ok(t) => t,
                Err(e) => return fail(e),
            };
            match out {
                Some(path) => match std::fs::write(&path, text) {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => fail(e.into()),
                },
                None => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
            }
        }
    }
}
