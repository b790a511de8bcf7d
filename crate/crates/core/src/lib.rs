//! Automatic complexity of binary price paths and options paying its
//! deficiency.

pub mod bits;
pub mod cache;
pub mod complexity;
pub mod error;
pub mod exact;
pub mod nfa;
pub mod policy;
pub mod pricing;
pub mod robustness;
pub mod run_option;
mod search;

pub use bits::BitString;
pub use cache::AnCache;
pub use complexity::{ComplexityEngine, ComplexityResult, DeficiencyValue};
pub use error::{Error, Result};
pub use nfa::{Automaton, SaturatingCount};
pub use policy::{simulate_policy, Policy, PolicyResult};
pub use pricing::{MarketParams, OptionStyle, PriceTree, Pricer};
pub use robustness::{hamming_sweep, run_perturbation_bound_check, Measure, PerturbationReport};
