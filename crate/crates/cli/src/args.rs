use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "serint",
    version,
    about = "Integrate expressions with derivative series and check the results",
    args_override_self = true
)]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,

    /// File with one request per line, in the same syntax as the command line
    #[arg(long, global = true, value_name = "FILE")]
    pub batch: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Absolute term tolerance for convergence
    #[arg(
        long,
        global = true,
        default_value = "1e-12",
        allow_hyphen_values = true
    )]
    pub tol_abs: String,

    /// Tolerance relative to the running sum
    #[arg(long, global = true, default_value = "0", allow_hyphen_values = true)]
    pub tol_rel: String,

    #[arg(long, global = true, default_value_t = 200)]
    pub max_terms: usize,

    /// Working precision of floating-point values, in bits
    #[arg(
        long,
        global = true,
        env = "SERINT_PRECISION_BITS",
        default_value_t = 128
    )]
    pub precision_bits: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub output: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Antiderivative series of EXPR evaluated at a point
    Integrate {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// Also print the symbolic partial sum through index N
        #[arg(long, value_name = "N")]
        symbolic: Option<usize>,
    },
    /// Definite integral from the endpoint series, checked by quadrature
    Defint {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Table of series terms 0..=N with running sums
    Terms {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(short = 'n')]
        n: usize,
    },
    /// Repeated integration by parts of u dv for a tabulated v
    Udv {
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        /// One of exp(c*x), sin, cos, x^k
        #[arg(long)]
        v: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// Number of symbolic terms to print
        #[arg(long, value_name = "N", default_value_t = 4)]
        symbolic: usize,
    },
    /// Compare the derivative of the partial sum with its predicted residual
    Check {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(short = 'n')]
        n: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Integrate { .. } => "integrate",
            Command::Defint { .. } => "defint",
            Command::Terms { .. } => "terms",
            Command::Udv { .. } => "udv",
            Command::Check { .. } => "check",
        }
    }
}
