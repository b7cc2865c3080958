use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Schwarz symmetrization, rearrangement functionals and counterexamples.
///
/// Exit status: 0 when the checked property holds, 1 when a violation is
/// found or certified, 2 on input or hypothesis errors.
#[derive(Debug, Parser)]
#[command(name = "rearrange-lab", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the report here instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    /// Summary table with columns R_or_pair, lhs, rhs, gap, I_eps, I_R, stderr.
    Csv,
}

#[derive(Debug, Args, Clone)]
pub struct IntegrandArgs {
    /// Expression in x1..xM, e.g. "x1*x2 - x1^2*x2^2".
    #[arg(long)]
    pub integrand: String,

    #[arg(long)]
    pub arity: Option<usize>,
}

#[derive(Debug, Args, Clone)]
pub struct LatticeArgs {
    #[arg(long, default_value_t = 4.0)]
    pub ymax: f64,

    #[arg(long, default_value_t = 0.5)]
    pub step: f64,
}

#[derive(Debug, Args, Clone)]
pub struct SamplingArgs {
    /// Monte Carlo sample pairs per piece pair (dimension >= 2 only).
    #[arg(long)]
    pub samples: Option<u64>,

    /// Falls back to the config, then REARRANGE_LAB_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan the lattice for a negative mixed increment.
    CheckSupermodular {
        #[command(flatten)]
        integrand: IntegrandArgs,
        /// Look for a zero or negative mixed increment instead.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        lattice: LatticeArgs,
    },

    /// Symmetric decreasing rearrangement of a simple function.
    Rearrange {
        #[arg(long, value_name = "FILE")]
        f: PathBuf,
    },

    /// Hardy–Littlewood functional of one or more simple functions.
    EvalHl {
        #[command(flatten)]
        integrand: IntegrandArgs,
        #[arg(long, value_name = "FILE", num_args = 1.., required = true)]
        functions: Vec<PathBuf>,
    },

    /// Two-function Riesz functional.
    EvalRiesz {
        #[command(flatten)]
        integrand: IntegrandArgs,
        /// Kernel as JSON, or a path to a JSON file.
        #[arg(long)]
        kernel: String,
        #[arg(long, value_name = "FILE")]
        f: PathBuf,
        #[arg(long, value_name = "FILE")]
        g: PathBuf,
        #[command(flatten)]
        sampling: SamplingArgs,
    },

    /// Most negative mixed increment and its Hardy–Littlewood counterexample.
    FindWitness {
        #[command(flatten)]
        integrand: IntegrandArgs,
        #[command(flatten)]
        lattice: LatticeArgs,
    },

    /// Run a counterexample construction from a JSON config.
    Demo {
        #[arg(value_enum)]
        which: Demo,
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    /// Hardy–Littlewood counterexample from a non-supermodular integrand.
    Prop31,
    /// Riesz counterexample from a non-supermodular Psi and a radial kernel.
    Prop32,
    /// Riesz counterexample from a kernel that is not radially nonincreasing.
    Prop33,
}

impl Demo {
    pub fn name(self) -> &'static str {
        match self {
            Demo::Prop31 => "prop31",
            Demo::Prop32 => "prop32",
            Demo::Prop33 => "prop33",
        }
    }
}
