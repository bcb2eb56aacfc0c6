use clap::{Parser, Subcommand, ValueEnum};
use hecke_core::level_one_oracle::DEFAULT_SEED;
use serde_json::{json, Map, Value};

#[derive(Debug, Parser)]
#[command(name = "hecke", version, about = "Hecke traces, eigenvalues and vertical Sato-Tate statistics")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact trace of T_n on S(N, k).
    Trace {
        #[arg(long, default_value_t = 1)]
        level: u64,
        #[arg(long)]
        weight: u32,
        #[arg(long)]
        n: u64,
        /// Include the four formula terms.
        #[arg(long)]
        breakdown: bool,
    },
    /// Dimension of S(N, k).
    Dim {
        #[arg(long, default_value_t = 1)]
        level: u64,
        #[arg(long)]
        weight: u32,
    },
    /// Normalized traces Tr T'_{p^m}, cosine sums and their Weyl limits.
    Moments {
        #[arg(long, alias = "primes")]
        prime: u64,
        #[arg(long, default_value_t = 1)]
        level: u64,
        #[arg(long)]
        weight: u32,
        #[arg(long, default_value_t = 6)]
        max_m: u32,
    },
    /// Masses of mu_p (or the Sato-Tate measure, `inf`) and Weyl limits.
    Measure {
        #[arg(long = "primes", alias = "prime", value_delimiter = ',', required = true)]
        primes: Vec<String>,
        /// Comma list of 2r endpoints; defaults to the full box.
        #[arg(long = "box", allow_hyphen_values = true)]
        bx: Option<String>,
        #[arg(long, default_value_t = 6)]
        max_m: u32,
    },
    /// Normalized Hecke eigenvalues on S(1, k) from q-expansions.
    Eigen {
        #[arg(long)]
        weight: u32,
        #[arg(long = "primes", alias = "prime", value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Joint cosine products over a grid of exponents.
    Joint {
        #[arg(long = "primes", alias = "prime", value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        level: u64,
        #[arg(long)]
        weight: u32,
        /// Exponents m_i range over 1..=max-m on every axis.
        #[arg(long, default_value_t = 3)]
        max_m: u32,
    },
    /// Box discrepancy, Erdős–Turán bound, or a rate sweep over weights (level 1).
    Discrepancy {
        #[arg(long, conflicts_with = "weights", required_unless_present = "weights")]
        weight: Option<u32>,
        /// Range `a..b`, stepping by 2.
        #[arg(long)]
        weights: Option<String>,
        #[arg(long = "primes", alias = "prime", value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        #[arg(long = "box", allow_hyphen_values = true)]
        bx: Option<String>,
        /// Truncation M of the Erdős–Turán bound; defaults to floor(log k / log prod p).
        #[arg(long)]
        max_m: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Run the built-in cross-check suite.
    Verify,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Trace { .. } => "trace",
            Command::Dim { .. } => "dim",
            Command::Moments { .. } => "moments",
            Command::Measure { .. } => "measure",
            Command::Eigen { .. } => "eigen",
            Command::Joint { .. } => "joint",
            Command::Discrepancy { .. } => "discrepancy",
            Command::Verify => "verify",
        }
    }

    /// Effective parameters, defaults included, for the output envelope.
    pub fn params(&self) -> Map<String, Value> {
        let v = match self {
            Command::Trace { level, weight, n, breakdown } => {
                json!({"level": level, "weight": weight, "n": n, "breakdown": breakdown})
            }
            Command::Dim { level, weight } => json!({"level": level, "weight": weight}),
            Command::Moments { prime, level, weight, max_m } => {
                json!({"prime": prime, "level": level, "weight": weight, "max_m": max_m})
            }
            Command::Measure { primes, bx, max_m } => json!({"primes": primes, "box": bx, "max_m": max_m}),
            Command::Eigen { weight, primes, seed } => json!({"weight": weight, "primes": primes, "seed": seed}),
            Command::Joint { primes, level, weight, max_m } => {
                json!({"primes": primes, "level": level, "weight": weight, "max_m": max_m})
            }
            Command::Discrepancy { weight, weights, primes, bx, max_m, seed } => json!({
                "weight": weight, "weights": weights, "primes": primes, "box": bx, "max_m": max_m, "seed": seed
            }),
            Command::Verify => json!({}),
        };
        match v {
            Value::Object(m) => m.into_iter().filter(|(_, v)| !v.is_null()).collect(),
            _ => unreachable!(),
        }
    }
}
