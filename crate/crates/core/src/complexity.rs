//! Nondeterministic automatic complexity, deficiency, and run statistics.
//!
//! `A_N(x)` is the least number of states of an NFA that accepts `x` and has
//! no other accepting walk of length `|x|`. It never exceeds
//! `b(n) = floor(n/2) + 1`, and the deficiency is `b(n) - A_N(x)`.
//!
//! The search only needs automata induced by a single state sequence with a
//! single accepting state: restricting a uniquely accepting automaton to the
//! edges of its accepting walk keeps acceptance unique.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::cache::AnCache;
use crate::error::{Error, Result};
use crate::nfa::Automaton;
use crate::search::find_witness;

/// Default longest string the complexity search accepts.
pub const DEFAULT_MAX_SEARCH_LEN: usize = 24;

/// `floor(n/2) + 1`, the largest possible complexity at length `n`.
pub fn max_complexity(n: usize) -> usize {
    n / 2 + 1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityResult {
    pub string: BitString,
    pub complexity: usize,
    /// The unique accepting state sequence, `|x| + 1` states from state 0.
    pub witness: Vec<usize>,
    pub witness_automaton: Automaton,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeficiencyValue {
    pub n: usize,
    pub b_n: usize,
    pub deficiency: usize,
}

fn witness_at(x: &BitString, q: usize) -> Option<ComplexityResult> {
    let path = find_witness(x.bits(), q, q)?;
    let witness_automaton =
        Automaton::from_path(&path, x).expect("search produced a malformed path");
    Some(ComplexityResult {
        string: x.clone(),
        complexity: witness_automaton.num_states(),
        witness: path,
        witness_automaton,
    })
}

/// Uncached search. Tries `q = 1, 2, ..` and returns the first witness.
pub fn an_complexity(x: &BitString) -> ComplexityResult {
    an_complexity_from(x, 1)
}

fn an_complexity_from(x: &BitString, start: usize) -> ComplexityResult {
    // The path through n + 1 distinct states always works, so this ends.
    (start.max(1)..=x.len() + 1)
        .find_map(|q| witness_at(x, q))
        .expect("the all-distinct path is always a unique witness")
}

/// Longest run of `symbol`, or of either symbol when `None`.
pub fn longest_run(x: &BitString, symbol: Option<u8>) -> usize {
    let mut best = 0;
    let mut current = 0;
    let mut prev = None;
    for &b in x.bits() {
        if Some(b) == prev {
            current += 1;
        } else {
            current = 1;
            prev = Some(b);
        }
        if symbol.is_none_or(|s| s == b) {
            best = best.max(current);
        }
    }
    best
}

/// Number of trailing 1s (the current run of heads).
pub fn current_run(x: &BitString) -> usize {
    x.bits().iter().rev().take_while(|&&b| b == 1).count()
}

/// `n + 1 - r` for the longest run `r` of either symbol.
pub fn run_complexity(x: &BitString) -> Result<usize> {
    if x.is_empty() {
        return Err(Error::Precondition(
            "run complexity is undefined for the empty string".to_string(),
        ));
    }
    Ok(x.len() + 1 - longest_run(x, None))
}

/// Cached complexity evaluation with a length budget.
#[derive(Debug)]
pub struct ComplexityEngine {
    cache: AnCache,
    max_len: usize,
}

impl Default for ComplexityEngine {
    fn default() -> Self {
        ComplexityEngine::new(AnCache::new())
    }
}

impl ComplexityEngine {
    pub fn new(cache: AnCache) -> Self {
        ComplexityEngine {
            cache,
            max_len: DEFAULT_MAX_SEARCH_LEN,
        }
    }

    pub fn with_max_len(mut self, max_len: usize) -> Self {
        self.max_len = max_len;
        self
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn cache(&self) -> &AnCache {
        &self.cache
    }

    fn check_budget(&self, x: &BitString) -> Result<()> {
        if x.len() > self.max_len {
            return Err(Error::LimitExceeded {
                what: "string length",
                requested: x.len(),
                limit: self.max_len,
            });
        }
        Ok(())
    }

    /// A_N with a witness. A cached value skips the failing smaller sizes;
    /// the witness is the same one the full search would return.
    pub fn an_complexity(&self, x: &BitString) -> Result<ComplexityResult> {
        self.check_budget(x)?;
        let start = self.cache.get(x).unwrap_or(1);
        let result = an_complexity_from(x, start);
        self.cache.insert(x, result.complexity)?;
        Ok(result)
    }

    /// A_N only, served from the cache when possible.
    pub fn complexity(&self, x: &BitString) -> Result<usize> {
        if let Some(v) = self.cache.get(x) {
            return Ok(v);
        }
        self.check_budget(x)?;
        let v = an_complexity_from(x, 1).complexity;
        self.cache.insert(x, v)?;
        Ok(v)
    }

    pub fn deficiency(&self, x: &BitString) -> Result<DeficiencyValue> {
        let b_n = max_complexity(x.len());
        let a = self.complexity(x)?;
        Ok(DeficiencyValue {
            n: x.len(),
            b_n,
            deficiency: b_n - a,
        })
    }

    /// Decides `D(x) >= k` by looking for a witness with at most
    /// `b(n) - k` states, without pinning down A_N exactly.
    pub fn deficiency_decision(&self, x: &BitString, k: usize) -> Result<bool> {
        let b_n = max_complexity(x.len());
        if k == 0 {
            return Ok(true);
        }
        if k >= b_n {
            return Ok(false);
        }
        if let Some(a) = self.cache.get(x) {
            return Ok(b_n - a >= k);
        }
        self.check_budget(x)?;
        for q in 1..=b_n - k {
            if find_witness(x.bits(), q, q).is_some() {
                // Sizes are tried in order, so this is A_N itself.
                self.cache.insert(x, q)?;
                return Ok(true);
            }
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        BitString::parse(s).unwrap()
    }

    fn zeros_with_one(before: usize, after: usize) -> BitString {
        let mut bits = vec![0u8; before];
        bits.push(1);
        bits.extend(std::iter::repeat_n(0, after));
        BitString::from_bits(bits).unwrap()
    }

    #[test]
    fn small_complexities() {
        assert_eq!(an_complexity(&BitString::new()).complexity, 1);
        assert_eq!(an_complexity(&bs("1010")).complexity, 2);
        assert_eq!(an_complexity(&BitString::repeat(0, 23)).complexity, 1);
        assert_eq!(an_complexity(&zeros_with_one(22, 0)).complexity, 2);
    }

    #[test]
    fn witness_is_valid() {
        let r = an_complexity(&bs("1010"));
        assert_eq!(r.witness, vec![0, 1, 0, 1, 0]);
        assert!(r.witness_automaton.accepts_uniquely(&bs("1010")));
        assert_eq!(r.witness_automaton.num_states(), 2);
        assert_eq!(r.witness_automaton.accepting(), &[0]);
    }

    #[test]
    fn empty_string_witness() {
        let r = an_complexity(&BitString::new());
        assert_eq!(r.witness, vec![0]);
        assert!(r.witness_automaton.transitions().is_empty());
        assert!(r.witness_automaton.accepts_uniquely(&BitString::new()));
    }

    #[test]
    fn deficiency_tree_values() {
        let engine = ComplexityEngine::default();
        for (s, d) in [
            ("", 0),
            ("11", 1),
            ("10", 0),
            ("111", 1),
            ("1111", 2),
            ("1101", 0),
            ("0000", 2),
        ] {
            assert_eq!(engine.deficiency(&bs(s)).unwrap().deficiency, d, "{s}");
        }
    }

    #[test]
    fn decision_problem() {
        let engine = ComplexityEngine::default();
        assert!(engine.deficiency_decision(&bs("0000"), 2).unwrap());
        assert!(!engine.deficiency_decision(&bs("0000"), 3).unwrap());
        assert!(!engine.deficiency_decision(&bs("1101"), 1).unwrap());
        assert!(engine.deficiency_decision(&bs("1101"), 0).unwrap());
        assert!(engine.deficiency_decision(&BitString::new(), 0).unwrap());
        assert!(!engine.deficiency_decision(&BitString::new(), 1).unwrap());
    }

    #[test]
    fn runs() {
        assert_eq!(longest_run(&bs("0011101"), Some(1)), 3);
        assert_eq!(longest_run(&bs("0000"), Some(1)), 0);
        assert_eq!(longest_run(&bs("0011101"), None), 3);
        assert_eq!(longest_run(&BitString::new(), None), 0);
        assert_eq!(current_run(&bs("0111")), 3);
        assert_eq!(current_run(&bs("1110")), 0);
        assert_eq!(current_run(&BitString::new()), 0);
        assert_eq!(run_complexity(&BitString::repeat(0, 9)).unwrap(), 1);
        assert_eq!(run_complexity(&bs("0101")).unwrap(), 4);
        assert_eq!(run_complexity(&bs("000111")).unwrap(), 4);
        assert!(run_complexity(&BitString::new()).is_err());
    }

    #[test]
    fn budget() {
        let engine = ComplexityEngine::default().with_max_len(4);
        let err = engine.an_complexity(&bs("00000")).unwrap_err();
        assert!(err.is_limit());
        assert!(engine.deficiency(&bs("00000")).is_err());
    }

    #[test]
    fn cached_witness_matches_fresh_search() {
        let engine = ComplexityEngine::default();
        let x = bs("0110100110");
        let first = engine.an_complexity(&x).unwrap();
        let second = engine.an_complexity(&x).unwrap();
        assert_eq!(first, second);
        assert_eq!(first, an_complexity(&x));
    }
}
