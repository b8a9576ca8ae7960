//! `hmp`: experiment runner for the Hidden Matching laboratory.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "hmp",
    version,
    about = "Hidden Matching Problem simulation laboratory"
)]
struct Cli {
    /// Root seed; every random stream is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a matching family.
    GenFamily(FamilyArgs),
    /// Run the quantum SMP protocol on random or fixed instances.
    RunQuantum(QuantumArgs),
    /// Smallest two-party one-way cost for a family.
    BruteforceClassical(BruteArgs),
    /// Greedy extraction and information accounting for a protocol.
    Extract(ExtractArgs),
    /// Quantum and classical costs of the cyclic families over several n.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    /// Cyclic shifts of K_{n/2,n/2}.
    Cyclic,
    /// Incidence graph of PG(2, q), q prime.
    Pg,
    /// Randomized search for a graph without cycles of length <= 2d.
    Girth,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FamilyArgs {
    /// Read the family from a file (a family file or `gen-family` output).
    #[arg(long, conflicts_with = "kind")]
    pub family: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kind: Option<FamilyKind>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    /// Attempts for the girth search.
    #[arg(long, default_value_t = 100)]
    pub max_attempts: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct QuantumArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 1000)]
    pub runs: usize,
    /// Fix the hidden string instead of drawing it.
    #[arg(long)]
    pub c: Option<String>,
    /// Fix the matching index (1-based) instead of drawing it.
    #[arg(long)]
    pub index: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BruteArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    /// Search protocols whose senders share this many public seeds.
    #[arg(long)]
    pub shared_seeds: Option<usize>,
    #[arg(long, default_value_t = 8)]
    pub max_bits: usize,
    #[arg(long, default_value_t = 200_000_000)]
    pub max_nodes: u64,
    /// Also save the optimal protocol as JSON.
    #[arg(long)]
    pub protocol_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    /// Constant messages of `--bits` zeros.
    Constant,
    /// Sender 1 sends c.
    Verbatim,
    /// Sender 1 sends the first-edge parity of every matching.
    Parity,
    /// No messages; random parity.
    Guess,
    /// Pseudo-random tables of `--bits` bits.
    Random,
    /// The optimum found by the exhaustive search at `--epsilon` (two players).
    Bruteforce,
    /// Load from `--protocol-file`.
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExtractArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = ProtocolKind::Parity)]
    pub protocol: ProtocolKind,
    #[arg(long)]
    pub protocol_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub bits: usize,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Hidden string for the example extraction trace (default all zeros).
    #[arg(long)]
    pub c: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 4, 6])]
    pub ns: Vec<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 8)]
    pub max_bits: usize,
    #[arg(long, default_value_t = 200_000_000)]
    pub max_nodes: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::GenFamily(a) => commands::gen_family(a, cli.seed),
        Command::RunQuantum(a) => commands::run_quantum(a, cli.seed),
        Command::BruteforceClassical(a) => commands::bruteforce(a, cli.seed),
        Command::Extract(a) => commands::extract(a, cli.seed),
        Command::Sweep(a) => commands::sweep(a, cli.seed),
    }
    .and_then(|mut doc| {
        if let serde_json::Value::Object(m) = &mut doc.config {
            m.insert("seed".into(), cli.seed.into());
            m.insert(
                "format".into(),
                serde_json::to_value(cli.format).expect("serializable"),
            );
        }
        output::emit(&doc.render(cli.format)?, cli.out.as_deref())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hmp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
