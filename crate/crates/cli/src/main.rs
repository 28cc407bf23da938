use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

/// Exact-rational stability checkers for random matchings.
#[derive(Parser, Debug)]
#[command(name = "matchstab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate stability concepts on a random matching.
    Check(CheckArgs),
    /// Decompose a random matching into deterministic matchings.
    Decompose(DecomposeArgs),
    /// Build the associated square instance (and matching).
    Transform(TransformArgs),
    /// List deterministic matchings of an instance.
    Enumerate(EnumerateArgs),
    /// Random audit of the implications between concepts.
    Audit(AuditArgs),
    /// Run the built-in corpus of hand-checked cases.
    Examples(ExamplesArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Instance file.
    #[arg(long, short)]
    instance: PathBuf,
    /// Model tier: base, weak or generalized. Defaults to the detected tier.
    #[arg(long)]
    tier: Option<String>,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
    /// Write the output to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    common: Common,
    /// Matching file.
    #[arg(long, short)]
    matching: PathBuf,
    /// Concept name, or `all`.
    #[arg(long, short, default_value = "all")]
    concept: String,
    /// Exit with status 1 if any evaluated concept fails.
    #[arg(long)]
    assert: bool,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, short)]
    matching: PathBuf,
    /// Decompose into weakly stable matchings only (the ex-post certificate).
    #[arg(long)]
    stable: bool,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, short)]
    matching: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[command(flatten)]
    common: Common,
    /// Only weakly stable matchings.
    #[arg(long)]
    stable: bool,
}

#[derive(Args, Debug)]
struct AuditArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Samples per tier.
    #[arg(long, default_value_t = 500)]
    count: usize,
    /// Largest number of agents (and objects).
    #[arg(long, default_value_t = 4)]
    max_n: usize,
    /// Restrict to these tiers (repeatable).
    #[arg(long)]
    tier: Vec<String>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExamplesArgs {
    /// Run a single case.
    #[arg(long)]
    id: Option<String>,
    /// List the cases without running them.
    #[arg(long)]
    list: bool,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(a) => commands::check(a),
        Command::Decompose(a) => commands::decompose(a),
        Command::Transform(a) => commands::transform(a),
        Command::Enumerate(a) => commands::enumerate(a),
        Command::Audit(a) => commands::audit(a),
        Command::Examples(a) => commands::examples(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("matchstab: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
