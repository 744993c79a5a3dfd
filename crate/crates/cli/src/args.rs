use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qudit-verify", version, about = "Verify qudit-assisted Toffoli constructions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format; `table1` defaults to csv, the rest to json.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,

    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Add wall-clock duration to the report. Off by default so that
    /// output bytes are reproducible.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Circuit-model checks against the brute-force oracle.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
    /// Run a linear optical scheme on one logical input.
    Optics(OpticsArgs),
    /// Coincidence expectations of the partial-swap scheme.
    Table1 {
        /// Only `pswap` has a coincidence table.
        #[arg(long, default_value = "pswap")]
        scheme: String,
    },
    /// Gate cost of an m-qubit Toffoli.
    Cost {
        #[arg(long)]
        qubits: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyTarget {
    Circuit {
        #[arg(long, value_enum)]
        gate: GateKind,
        /// Number of controls; Toffoli only, default 2.
        #[arg(long)]
        controls: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GateKind {
    Cnot,
    Toffoli,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Pswap,
    Cnot,
    Toffoli,
}

#[derive(Debug, Args)]
pub struct OpticsArgs {
    #[arg(long, value_enum)]
    pub scheme: SchemeArg,

    /// Basis levels, one digit per site (e.g. `10`), or `random`.
    #[arg(long)]
    pub input: String,

    /// Seed for `--input random` (ChaCha8).
    #[arg(long)]
    pub seed: Option<u64>,

    /// Include the scheme descriptor (networks, post-selection,
    /// feed-forward) in the results.
    #[arg(long)]
    pub describe: bool,
}
