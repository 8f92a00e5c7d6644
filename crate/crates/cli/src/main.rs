use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use catassoc_cli::{
    cmd_bounds, cmd_experiment, cmd_oracle_diameter, cmd_transform, cmd_worst_case, CliError,
};

/// Search trees on caterpillar graphs: entropy bounds, rotation
/// transformations, exact small-scale oracles, and experiment sweeps.
#[derive(Parser)]
#[command(name = "catassoc", version)]
struct Cli {
    /// Seed for randomized choices; sweeps are deterministic given it
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Worker threads for experiment rows
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Tree-count budget for exhaustive oracle searches
    #[arg(long, global = true, default_value_t = 1_000_000)]
    budget: u64,

    /// Write output to this file instead of standard output
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy, lower/upper diameter bounds, and the general envelope
    Bounds {
        /// Caterpillar as JSON, e.g. `{"legs":[2,0,1]}`
        #[arg(long)]
        caterpillar: String,
    },
    /// Verified rotation trace between the two trees of a pair file
    Transform {
        /// Path to a JSON file {"t1": <tree>, "t2": <tree>}
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
    },
    /// Worst-case access instance for the given weights
    WorstCase {
        /// Access frequencies as JSON, e.g. `[1,1,1,1]`
        #[arg(long)]
        weights: String,
    },
    /// Exact rotation-graph computations
    Oracle {
        #[command(subcommand)]
        what: OracleCommand,
    },
    /// Sweep caterpillar families into a CSV
    Experiment {
        /// Family to sweep (repeatable): path, uniform, heavy, geometric
        #[arg(long = "family", required = true)]
        families: Vec<String>,

        /// Smallest spine length
        #[arg(long, default_value_t = 2)]
        n_min: usize,

        /// Largest spine length
        #[arg(long, default_value_t = 6)]
        n_max: usize,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Exact diameter with a witness pair (all-sources search; quadratic in
    /// the number of trees)
    Diameter {
        /// Caterpillar as JSON, e.g. `{"legs":[0,0,0]}`
        #[arg(long)]
        caterpillar: String,
    },
}

fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Bounds { caterpillar } => cmd_bounds(caterpillar),
        Command::Transform { input } => {
            let pair = fs::read_to_string(input)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", input.display())))?;
            cmd_transform(&pair)
        }
        Command::WorstCase { weights } => cmd_worst_case(weights),
        Command::Oracle { what } => match what {
            OracleCommand::Diameter { caterpillar } => cmd_oracle_diameter(caterpillar, cli.budget),
        },
        Command::Experiment {
            families,
            n_min,
            n_max,
        } => {
            let (csv, warnings) =
                cmd_experiment(families, *n_min, *n_max, cli.seed, cli.jobs, cli.budget)?;
            for w in warnings {
                eprintln!("{w}");
            }
            Ok(csv)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => {
            match &cli.out {
                Some(path) => {
                    if let Err(e) = fs::write(path, ensure_newline(output)) {
                        eprintln!("cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => println!("{}", output.trim_end_matches('\n')),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn ensure_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}
