//! Command-line front end: scan, diff, inject, detect, delta, evolve.
//! Every command renders a canonical JSON report (tables are derived from
//! the same JSON), and identical inputs plus an identical seed reproduce
//! byte-identical output.

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::config::Analysis;
use crate::error::{CliError, CliResult};

pub const DEFAULT_CALLER: &str = "support/Caller";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PatternArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    #[value(name = "all")]
    All,
}

impl PatternArg {
    /// Short tag used in default output names and the run configuration.
    pub fn suffix(self) -> &'static str {
        match self {
            PatternArg::One => "p1",
            PatternArg::Two => "p2",
            PatternArg::Three => "p3",
            PatternArg::All => "all",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "gadgetry",
    version,
    about = "Class-level serializability measurement, gadget-enabling archive edits, \
             and dormant chain detection for JVM artifacts"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct OutputArgs {
    /// Output rendering.
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct CatalogArgs {
    /// Platform type catalog file (defaults to the built-in JCL subset).
    #[arg(long)]
    pub catalog: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct DetectArgs {
    /// Entry-point catalog file (defaults to the built-in set).
    #[arg(long)]
    pub entries: Option<PathBuf>,
    /// Sink catalog file (defaults to the built-in set).
    #[arg(long)]
    pub sinks: Option<PathBuf>,
    /// Keep chains ending at filtered sinks too, not only the kept tier.
    #[arg(long)]
    pub all_sinks: bool,
    /// Longest chain length explored, in frames.
    #[arg(long, default_value_t = gadgetry::detect::DEFAULT_MAX_DEPTH)]
    pub max_depth: usize,
    /// Worker threads for directory corpora.
    #[arg(long, default_value_t = 4)]
    pub workers: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report per-class serializability and the implemented JCL interfaces.
    Scan {
        artifact: PathBuf,
        #[command(flatten)]
        catalog: CatalogArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Report serializability membership changes between two artifact versions.
    Diff {
        old: PathBuf,
        new: PathBuf,
        #[command(flatten)]
        catalog: CatalogArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Apply a gadget-enabling modification pattern and write the result.
    Inject {
        artifact: PathBuf,
        /// Modification pattern: 1 marker spread, 2 constant extraction,
        /// 3 interface housing, or all three staged together.
        #[arg(long, value_enum)]
        pattern: PatternArg,
        /// Internal name of the synthesized housing class.
        #[arg(long, default_value = DEFAULT_CALLER)]
        caller_name: String,
        /// Where to write the modified archive (defaults to a sibling file).
        #[arg(long)]
        out_artifact: Option<PathBuf>,
        #[command(flatten)]
        catalog: CatalogArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// List gadget chains reachable from deserialization entry points.
    Detect {
        /// An artifact file or a directory corpus of artifacts.
        path: PathBuf,
        #[command(flatten)]
        detect: DetectArgs,
        #[command(flatten)]
        catalog: CatalogArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Report chains present after a modification but absent before it.
    Delta {
        /// Original state: artifact, directory corpus, or detect report.
        original: PathBuf,
        /// Modified state: artifact, directory corpus, or detect report.
        modified: PathBuf,
        /// Housing class whose synthetic frames are ignored when matching.
        #[arg(long, default_value = DEFAULT_CALLER)]
        caller_name: String,
        #[command(flatten)]
        detect: DetectArgs,
        #[command(flatten)]
        catalog: CatalogArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Correlate serializable-count growth with time across release histories.
    Evolve {
        /// Release table, .csv or .json.
        input: PathBuf,
        /// Reference year for the recently-updated label (defaults to the
        /// newest release year in the table).
        #[arg(long)]
        now_year: Option<i32>,
        /// Sampled pairs per dependency for the overall correlation.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// RNG seed for the overall correlation.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Year range FROM-TO for the overall correlation (defaults to the
        /// span of the table).
        #[arg(long)]
        years: Option<String>,
        #[command(flatten)]
        catalog: CatalogArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn emit(report: &Value, output: &OutputArgs) -> CliResult<()> {
    let json = serde_json::to_string_pretty(report).expect("report serializes") + "\n";
    match &output.out {
        Some(path) => std::fs::write(path, &json)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
        None => match output.format {
            Format::Json => print!("{json}"),
            Format::Table => print!("{}", table::render_table(report)),
        },
    }
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Scan { artifact, catalog, output } => {
            let analysis = Analysis::load(&catalog.catalog, &None, &None)?;
            emit(&commands::scan::run(&artifact, &analysis)?, &output)
        }
        Command::Diff { old, new, catalog, output } => {
            let analysis = Analysis::load(&catalog.catalog, &None, &None)?;
            emit(&commands::diff::run(&old, &new, &analysis)?, &output)
        }
        Command::Inject { artifact, pattern, caller_name, out_artifact, catalog, output } => {
            let analysis = Analysis::load(&catalog.catalog, &None, &None)?;
            let report =
                commands::inject::run(&artifact, pattern, &caller_name, &out_artifact, &analysis)?;
            emit(&report, &output)
        }
        Command::Detect { path, detect, catalog, output } => {
            let analysis = Analysis::load(&catalog.catalog, &detect.entries, &detect.sinks)?;
            let report = commands::detect::run(
                &path,
                &analysis,
                detect.max_depth,
                detect.all_sinks,
                detect.workers,
            )?;
            emit(&report, &output)
        }
        Command::Delta { original, modified, caller_name, detect, catalog, output } => {
            let analysis = Analysis::load(&catalog.catalog, &detect.entries, &detect.sinks)?;
            let report = commands::delta::run(
                &original,
                &modified,
                &analysis,
                detect.max_depth,
                detect.all_sinks,
                &caller_name,
                detect.workers,
            )?;
            emit(&report, &output)
        }
        Command::Evolve { input, now_year, samples, seed, years, catalog, output } => {
            let analysis = Analysis::load(&catalog.catalog, &None, &None)?;
            let report =
                commands::evolve::run(&input, &analysis, now_year, samples, seed, &years)?;
            emit(&report, &output)
        }
    }
}

/// Parse arguments, run the selected command, and map the outcome to an
/// exit code: 0 success, 1 usage error, 2 input error, 3 internal error.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    1
                }
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
