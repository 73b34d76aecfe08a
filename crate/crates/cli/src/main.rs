use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use faircap_cli::generate::{generate, write_generated, GeneratorSpec};
use faircap_cli::report::cmd_report;
use faircap_cli::sweep::cmd_run;
use faircap_cli::validate::{cmd_validate, ValidateArgs};
use faircap_cli::{CliError, CliResult, Exit};

#[derive(Parser)]
#[command(name = "faircap", version, about = "Fair-capacitated clustering experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a Gaussian-blob CSV with a binary `protected` column.
    Generate {
        #[arg(long)]
        n: usize,
        /// Minority over majority count.
        #[arg(long)]
        balance: f64,
        #[arg(long, default_value_t = 3)]
        clusters: usize,
        /// Per-coordinate standard deviation of each blob.
        #[arg(long, default_value_t = 0.05)]
        noise: f64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Relative blob sizes, comma separated.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Run every (method, k) cell of a configured sweep.
    Run {
        config: PathBuf,
        #[arg(long, env = "FAIRCAP_OUTPUT_DIR")]
        output_dir: Option<PathBuf>,
    },
    /// Render cost, balance and size panels from sweep records.
    Report {
        /// A run directory, a dataset directory, or a records.jsonl file.
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Audit fairlet decompositions for the configured datasets.
    Validate {
        config: PathBuf,
        #[arg(long)]
        dataset: Option<String>,
        /// Exported decomposition (JSON) to audit.
        #[arg(long)]
        decomposition: Option<PathBuf>,
        /// Directory to export the computed decompositions to.
        #[arg(long)]
        export: Option<PathBuf>,
        /// Print the audit as JSON.
        #[arg(long)]
        json: bool,
    },
}

fn execute(command: Command) -> CliResult<Exit> {
    match command {
        Command::Generate { n, balance, clusters, noise, dim, weights, seed, out } => {
            let spec = GeneratorSpec { n, balance, clusters, noise, dim, weights, seed: None };
            let data = generate(&spec, seed).map_err(CliError::usage)?;
            write_generated(&data, &out).map_err(CliError::data)?;
            let [c0, c1] = data.group_counts();
            println!("wrote {} rows ({c1} protected, {c0} other) to {}", data.len(), out.display());
            Ok(Exit::Success)
        }
        Command::Run { config, output_dir } => {
            let outcome = cmd_run(&config, output_dir.as_deref())?;
            for d in &outcome.datasets {
                let ok = d.records.iter().filter(|r| r.is_ok()).count();
                println!("{}: {ok}/{} runs ok -> {}", d.name, d.records.len(), d.dir.display());
                for r in d.records.iter().filter(|r| !r.is_ok()) {
                    eprintln!("  {} k={}: {}", r.method, r.k, r.message.as_deref().unwrap_or(""));
                }
            }
            Ok(outcome.exit)
        }
        Command::Report { input, out } => {
            for path in cmd_report(&input, out.as_deref())? {
                println!("{}", path.display());
            }
            Ok(Exit::Success)
        }
        Command::Validate { config, dataset, decomposition, export, json } => {
            let args = ValidateArgs { config, dataset, decomposition, export };
            let (audits, exit) = cmd_validate(&args)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&audits).map_err(CliError::data)?);
            } else {
                for a in &audits {
                    println!("{}", a.describe());
                }
            }
            Ok(exit)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Exit::Usage.code() as u8 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(exit) => ExitCode::from(exit.code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit.code() as u8)
        }
    }
}
