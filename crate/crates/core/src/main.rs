use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use opembed::cli::{run, Command, JobConfig};

#[derive(Parser)]
#[command(name = "opembed", version, about = "Classify operators by C0-semigroup embeddability")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Decide embeddability and write the verdict.
    Classify(WithInput),
    /// Construct the embedding semigroup and verify it.
    Embed(WithInput),
    /// Embed, then add generator convergence and Wold data.
    Verify(WithInput),
    /// Write the continuity profile `h,continuity_sup` as CSV.
    Sweep(WithInput),
    /// Run the built-in corpus and write a summary table.
    Demo(Flags),
}

#[derive(Args)]
struct WithInput {
    /// Operator spec file (TOML).
    input: PathBuf,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args)]
struct Flags {
    /// Override the endpoint and cocycle tolerances.
    #[arg(long)]
    tol: Option<f64>,
    /// Contour quadrature nodes per circle.
    #[arg(long)]
    nodes: Option<usize>,
    /// Grid cells per unit time for translation semigroups.
    #[arg(long)]
    grid: Option<usize>,
    /// Logarithm branch per diagonal entry.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    branch: Option<Vec<i64>>,
    /// Wold decomposition depth.
    #[arg(long)]
    depth: Option<usize>,
    /// Seed for random test vectors (and the demo corpus).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, input, flags) = match cli.command {
        Sub::Classify(w) => (Command::Classify, Some(w.input), w.flags),
        Sub::Embed(w) => (Command::Embed, Some(w.input), w.flags),
        Sub::Verify(w) => (Command::Verify, Some(w.input), w.flags),
        Sub::Sweep(w) => (Command::Sweep, Some(w.input), w.flags),
        Sub::Demo(f) => (Command::Demo, None, f),
    };
    let config = JobConfig {
        command,
        input,
        tol: flags.tol,
        nodes: flags.nodes,
        grid: flags.grid,
        branch: flags.branch,
        depth: flags.depth,
        seed: flags.seed,
        out: flags.out,
    };
    let outcome = run(&config);
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    println!("{}", outcome.summary);
    ExitCode::from(outcome.status.code() as u8)
}
