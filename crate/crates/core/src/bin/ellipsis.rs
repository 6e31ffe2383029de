use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ellipsis_core::report::{run_corpus, run_text, CorpusReport, RunOptions, Status};

#[derive(Parser)]
#[command(name = "ellipsis", version, about = "Resolve elliptical sentences by higher-order unification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Antecedent-linking filter; overrides the problem file.
    #[arg(long, global = true, value_enum)]
    linking: Option<Switch>,
    /// Unification search depth; overrides the problem file
    #[arg(long, global = true)]
    budget_depth: Option<usize>,
    /// Unifiers kept per equation; overrides the problem file
    #[arg(long, global = true)]
    max_solutions: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    report: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more problem files.
    Run { files: Vec<PathBuf> },
    /// Run every `.ell` file in a directory.
    Corpus {
        #[arg(long, default_value = "corpus")]
        corpus: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.budget_depth == Some(0) || cli.max_solutions == Some(0) {
        eprintln!("error: budget limits must be positive");
        return ExitCode::from(3);
    }
    let opts = RunOptions {
        linking: cli.linking.map(|s| matches!(s, Switch::On)),
        max_depth: cli.budget_depth,
        max_solutions: cli.max_solutions,
    };
    let report = match &cli.command {
        Command::Run { files } => {
            let mut runs = Vec::new();
            for f in files {
                let shown = f.display().to_string();
                match std::fs::read_to_string(f) {
                    Ok(text) => runs.push(run_text(&text, &shown, &opts)),
                    Err(e) => {
                        eprintln!("error: {shown}: {e}");
                        return ExitCode::from(3);
                    }
                }
            }
            CorpusReport::new(runs)
        }
        Command::Corpus { corpus } => match run_corpus(corpus, &opts) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {}: {e}", corpus.display());
                return ExitCode::from(3);
            }
        },
    };
    match cli.report {
        Format::Json => println!("{}", report.to_json()),
        Format::Text => print!("{}", report.to_text()),
    }
    let code: Status = report.status;
    ExitCode::from(code.exit_code() as u8)
}
