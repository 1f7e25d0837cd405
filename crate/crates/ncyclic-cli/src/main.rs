//! Batch front end for ncyclic.
//!
//! Exit status: 0 when every requested check passes, 1 when a check fails,
//! 2 on unreadable input or bad flags.

mod commands;
mod table;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ncyclic::homology::DEFAULT_SIZE_CAP;

#[derive(Parser, Debug)]
#[command(name = "ncyclic", version, about = "Exact cyclic homology and Chern character checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Largest form degree or homology degree.
    #[arg(long, global = true, default_value_t = 4)]
    pub max_degree: usize,
    /// Truncation order of T A/(J A)^k.
    #[arg(long, global = true, default_value_t = 3, value_parser = positive)]
    pub k: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest matrix dimension any single step may build.
    #[arg(long, global = true, default_value_t = DEFAULT_SIZE_CAP)]
    pub size_cap: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Structured,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Idempotent,
    Invertible,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParityArg {
    Even,
    Odd,
}

/// An algebra file, or a builtin name such as `m2` when no such file exists.
#[derive(Args, Debug, Clone)]
pub struct AlgebraArg {
    #[arg(long)]
    pub algebra: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse input files and check their defining identities.
    Validate {
        #[arg(long)]
        algebra: Option<String>,
        #[arg(long)]
        extension: Option<String>,
        #[arg(long)]
        fredholm: Option<String>,
        #[arg(long)]
        homotopy: Option<String>,
    },
    /// Run the operator-identity suite.
    Identities {
        #[command(flatten)]
        algebra: AlgebraArg,
        /// Random inputs per identity.
        #[arg(long, default_value_t = 100)]
        random_count: usize,
        /// Largest degree of exhaustive basis inputs (capped by --max-degree).
        #[arg(long, default_value_t = 4)]
        exhaustive_degree: usize,
    },
    /// Hochschild homology.
    Hh {
        #[command(flatten)]
        algebra: AlgebraArg,
    },
    /// Cyclic homology.
    Hc {
        #[command(flatten)]
        algebra: AlgebraArg,
    },
    /// Homology of the Hodge tower levels and the periodic estimate.
    Tower {
        #[command(flatten)]
        algebra: AlgebraArg,
    },
    /// Exactness of the SBI sequence.
    Sbi {
        #[command(flatten)]
        algebra: AlgebraArg,
    },
    /// Quasi-freeness decision and the connection projector.
    Quasifree {
        #[command(flatten)]
        algebra: AlgebraArg,
    },
    /// Lift an idempotent or invertible to the truncated tensor algebra.
    Lift {
        #[command(flatten)]
        algebra: AlgebraArg,
        #[arg(long, value_enum)]
        mode: Mode,
        /// `e` for idempotents, `x` with `1 + x` invertible otherwise.
        #[arg(long)]
        element: String,
    },
    /// Chern character pairing with the cocycles of Fredholm data.
    Chern {
        #[arg(long)]
        fredholm: String,
        /// `e` for even data, `x` with `1 + x` invertible for odd data.
        #[arg(long)]
        element: String,
        #[arg(long, value_enum)]
        parity: ParityArg,
    },
    /// Excision sequence of a split extension.
    Excision {
        #[arg(long)]
        extension: String,
    },
    /// Homotopy formula for a polynomial family of homomorphisms.
    Homotopy {
        #[arg(long)]
        homotopy: String,
    },
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".to_string()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(table) => {
            let out = match cli.global.format {
                Format::Table => table.render_tsv(),
                Format::Structured => table.render_json(),
            };
            print!("{out}");
            if table.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
