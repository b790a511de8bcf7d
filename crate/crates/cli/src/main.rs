//! `cxo`: automatic complexity, deficiency options and run options from the
//! command line.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cxo_core::complexity::DEFAULT_MAX_SEARCH_LEN;
use cxo_core::pricing::DEFAULT_TREE_LIMIT;
use cxo_core::robustness::Measure;
use cxo_core::{AnCache, ComplexityEngine, OptionStyle};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_LIMIT: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "cxo",
    version,
    about = "Automatic complexity and complexity options"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: Config,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Args, Debug)]
pub struct Config {
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Decimal places in rendered values.
    #[arg(long, global = true, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..=64))]
    pub precision: u32,
    /// Largest expiry priced over the full path tree.
    #[arg(long, global = true, default_value_t = DEFAULT_TREE_LIMIT, value_parser = positive)]
    pub limit: usize,
    /// Longest string the complexity search accepts.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_SEARCH_LEN, value_parser = positive)]
    pub max_len: usize,
    /// Append-only A_N cache file.
    #[arg(long, global = true, env = "CXO_CACHE")]
    pub cache: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, value_parser = positive)]
    pub threads: Option<usize>,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".to_string()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Args, Debug, Clone)]
pub struct MarketArgs {
    /// Interest rate per step, decimal or fraction.
    #[arg(long, default_value = "0")]
    pub rate: String,
    /// Risk-neutral probability of an up tick.
    #[arg(long, conflicts_with_all = ["up", "down"])]
    pub p: Option<String>,
    /// Up factor; with --d, implies p = (1 + r - d) / (u - d).
    #[arg(long = "u", requires = "down")]
    pub up: Option<String>,
    #[arg(long = "d", requires = "up")]
    pub down: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Complexity, deficiency and witness automaton of a 0/1 or H/T string.
    An { string: String },
    /// Price a European or American deficiency option.
    Price {
        #[arg(long, value_enum, default_value_t = StyleArg::American)]
        style: StyleArg,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        market: MarketArgs,
        /// Print every node of the price tree.
        #[arg(long)]
        tree: bool,
    },
    /// Expected deficiency against the American price, by expiry.
    Table {
        #[arg(long, default_value_t = 12)]
        max_n: usize,
        /// Include odd expiries.
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        market: MarketArgs,
    },
    /// American prices for every expiry up to --max-n.
    Trend {
        #[arg(long, default_value_t = 12)]
        max_n: usize,
        #[command(flatten)]
        market: MarketArgs,
    },
    /// Monte Carlo value of an exercise policy.
    Simulate {
        /// static:n, deficiency-threshold:k or run-threshold:g
        #[arg(long)]
        policy: String,
        #[arg(long)]
        horizon: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[command(flatten)]
        market: MarketArgs,
    },
    /// Exact run-option price, the longest-run mean and a simulated
    /// threshold policy.
    RunOption {
        #[arg(long = "N", visible_alias = "horizon")]
        horizon: usize,
        /// `auto` or an integer.
        #[arg(long, default_value = "auto")]
        t: String,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[command(flatten)]
        market: MarketArgs,
    },
    /// Complexity over the Hamming ball of radius 1.
    Perturb {
        string: String,
        #[arg(long, value_enum, default_value_t = MeasureArg::An)]
        measure: MeasureArg,
        #[arg(long, default_value_t = 1)]
        radius: usize,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum StyleArg {
    European,
    American,
}

impl From<StyleArg> for OptionStyle {
    fn from(s: StyleArg) -> Self {
        match s {
            StyleArg::European => OptionStyle::European,
            StyleArg::American => OptionStyle::American,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    An,
    Run,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::An => Measure::An,
            MeasureArg::Run => Measure::Run,
        }
    }
}

fn exit_code(err: &cxo_core::Error) -> u8 {
    use cxo_core::Error;
    match err {
        Error::LimitExceeded { .. } => EXIT_LIMIT,
        Error::InvalidInput(_) | Error::Precondition(_) | Error::UnknownPolicy(_) => EXIT_USAGE,
        Error::Io(_) => EXIT_FAILURE,
    }
}

fn open_engine(config: &Config) -> cxo_core::Result<ComplexityEngine> {
    let cache = match &config.cache {
        Some(path) => {
            let (cache, stats) = AnCache::open(path)?;
            if stats.skipped > 0 {
                eprintln!(
                    "cxo: skipped {} unreadable record(s) in {}",
                    stats.skipped,
                    path.display()
                );
            }
            cache
        }
        None => AnCache::new(),
    };
    Ok(ComplexityEngine::new(cache).with_max_len(config.max_len))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.config.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("cxo: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    }
    let result = open_engine(&cli.config)
        .and_then(|engine| commands::run(&cli.command, &cli.config, &engine));
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("cxo: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
