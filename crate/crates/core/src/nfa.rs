//! Nondeterministic finite automata over the binary alphabet, and the
//! saturating walk count that decides unique acceptance.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};

/// A labeled edge `(from, symbol, to)`.
pub type Transition = (usize, u8, usize);

/// A walk count clamped at "two or more".
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SaturatingCount {
    #[default]
    Zero,
    One,
    Many,
}

impl SaturatingCount {
    pub fn from_count(n: u64) -> Self {
        match n {
            0 => SaturatingCount::Zero,
            1 => SaturatingCount::One,
            _ => SaturatingCount::Many,
        }
    }

    fn as_u8(self) -> u8 {
        self as u8
    }

    fn from_u8(v: u8) -> Self {
        match v {
            0 => SaturatingCount::Zero,
            1 => SaturatingCount::One,
            _ => SaturatingCount::Many,
        }
    }
}

impl Add for SaturatingCount {
    type Output = SaturatingCount;

    fn add(self, rhs: SaturatingCount) -> SaturatingCount {
        SaturatingCount::from_u8((self.as_u8() + rhs.as_u8()).min(2))
    }
}

impl AddAssign for SaturatingCount {
    fn add_assign(&mut self, rhs: SaturatingCount) {
        *self = *self + rhs;
    }
}

impl fmt::Display for SaturatingCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SaturatingCount::Zero => "0",
            SaturatingCount::One => "1",
            SaturatingCount::Many => "2+",
        })
    }
}

/// Largest state count [`Automaton::new`] accepts.
pub const MAX_STATES: usize = 1 << 16;

/// An NFA with initial state 0. Transitions are kept sorted and free of
/// duplicates; every state index lies in `0..num_states`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "AutomatonRepr", into = "AutomatonRepr")]
pub struct Automaton {
    num_states: usize,
    transitions: Vec<Transition>,
    accepting: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct AutomatonRepr {
    num_states: usize,
    initial_state: usize,
    accepting: Vec<usize>,
    transitions: Vec<Transition>,
}

impl TryFrom<AutomatonRepr> for Automaton {
    type Error = Error;

    fn try_from(r: AutomatonRepr) -> Result<Self> {
        if r.initial_state != 0 {
            return Err(Error::InvalidInput(format!(
                "initial state must be 0, got {}",
                r.initial_state
            )));
        }
        Automaton::new(r.num_states, r.transitions, r.accepting)
    }
}

impl From<Automaton> for AutomatonRepr {
    fn from(a: Automaton) -> Self {
        AutomatonRepr {
            num_states: a.num_states,
            initial_state: 0,
            accepting: a.accepting,
            transitions: a.transitions,
        }
    }
}

impl Automaton {
    /// Validates and normalizes. Duplicate transitions or accepting states
    /// are rejected rather than silently merged.
    pub fn new(
        num_states: usize,
        transitions: impl IntoIterator<Item = Transition>,
        accepting: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        if num_states == 0 {
            return Err(Error::InvalidInput(
                "an automaton needs at least one state".to_string(),
            ));
        }
        if num_states > MAX_STATES {
            return Err(Error::InvalidInput(format!(
                "{num_states} states exceeds the maximum of {MAX_STATES}"
            )));
        }
        let mut edges = BTreeSet::new();
        for (from, symbol, to) in transitions {
            if from >= num_states || to >= num_states {
                return Err(Error::InvalidInput(format!(
                    "transition {from},{symbol},{to} refers to a state outside 0..{num_states}"
                )));
            }
            if symbol > 1 {
                return Err(Error::InvalidInput(format!(
                    "transition {from},{symbol},{to} has a non-binary symbol"
                )));
            }
            if !edges.insert((from, symbol, to)) {
                return Err(Error::InvalidInput(format!(
                    "duplicate transition {from},{symbol},{to}"
                )));
            }
        }
        let mut acc = BTreeSet::new();
        for s in accepting {
            if s >= num_states {
                return Err(Error::InvalidInput(format!(
                    "accepting state {s} outside 0..{num_states}"
                )));
            }
            if !acc.insert(s) {
                return Err(Error::InvalidInput(format!(
                    "accepting state {s} listed twice"
                )));
            }
        }
        Ok(Automaton {
            num_states,
            transitions: edges.into_iter().collect(),
            accepting: acc.into_iter().collect(),
        })
    }

    /// The automaton whose edges are exactly those traversed by the state
    /// sequence `path` reading `x`, accepting only the last state.
    pub fn from_path(path: &[usize], x: &BitString) -> Result<Self> {
        if path.len() != x.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "a path for a string of length {} needs {} states, got {}",
                x.len(),
                x.len() + 1,
                path.len()
            )));
        }
        if path[0] != 0 {
            return Err(Error::InvalidInput(
                "a path must start in state 0".to_string(),
            ));
        }
        let num_states = path.iter().copied().max().unwrap_or(0) + 1;
        let edges: BTreeSet<Transition> = path
            .windows(2)
            .zip(x.bits())
            .map(|(w, &b)| (w[0], b, w[1]))
            .collect();
        Automaton::new(num_states, edges, [path[path.len() - 1]])
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn initial_state(&self) -> usize {
        0
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn accepting(&self) -> &[usize] {
        &self.accepting
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting.binary_search(&state).is_ok()
    }

    /// Returns a copy with one more transition. Fails on duplicates and
    /// out-of-range states.
    pub fn with_transition(&self, t: Transition) -> Result<Self> {
        let mut ts = self.transitions.clone();
        ts.push(t);
        Automaton::new(self.num_states, ts, self.accepting.iter().copied())
    }

    /// Number of labeled walks of length `n` from the initial state ending
    /// in an accepting state, clamped at two.
    pub fn count_accepting_walks(&self, n: usize) -> SaturatingCount {
        let mut layer = vec![SaturatingCount::Zero; self.num_states];
        layer[0] = SaturatingCount::One;
        for _ in 0..n {
            let mut next = vec![SaturatingCount::Zero; self.num_states];
            for &(from, _, to) in &self.transitions {
                next[to] += layer[from];
            }
            layer = next;
        }
        self.accepting
            .iter()
            .fold(SaturatingCount::Zero, |acc, &s| acc + layer[s])
    }

    /// True iff some walk from the initial state reading `x` ends accepting.
    pub fn spells(&self, x: &BitString) -> bool {
        let mut current = vec![false; self.num_states];
        current[0] = true;
        for &b in x.bits() {
            let mut next = vec![false; self.num_states];
            for &(from, symbol, to) in &self.transitions {
                if symbol == b && current[from] {
                    next[to] = true;
                }
            }
            current = next;
        }
        self.accepting.iter().any(|&s| current[s])
    }

    /// True iff `x` is accepted and is the only accepting walk of its length.
    pub fn accepts_uniquely(&self, x: &BitString) -> bool {
        self.spells(x) && self.count_accepting_walks(x.len()) == SaturatingCount::One
    }

    /// Compact text form: `q; init; accepting-list; from,symbol,to; ...`.
    /// The accepting list is comma separated and may be empty.
    pub fn to_text(&self) -> String {
        let acc: Vec<String> = self.accepting.iter().map(|s| s.to_string()).collect();
        let mut out = format!("{}; 0; {}", self.num_states, acc.join(","));
        for (from, symbol, to) in &self.transitions {
            out.push_str(&format!("; {from},{symbol},{to}"));
        }
        out
    }

    pub fn parse_text(s: &str) -> Result<Self> {
        let fields: Vec<&str> = s.trim().split(';').map(str::trim).collect();
        if fields.len() < 3 {
            return Err(Error::InvalidInput(
                "expected `q; init; accepting-list` followed by transitions".to_string(),
            ));
        }
        let num_states = parse_index(fields[0], "state count")?;
        let init = parse_index(fields[1], "initial state")?;
        if init != 0 {
            return Err(Error::InvalidInput(format!(
                "initial state must be 0, got {init}"
            )));
        }
        let accepting = if fields[2].is_empty() {
            Vec::new()
        } else {
            fields[2]
                .split(',')
                .map(|t| parse_index(t.trim(), "accepting state"))
                .collect::<Result<Vec<_>>>()?
        };
        let mut transitions = Vec::new();
        for field in &fields[3..] {
            if field.is_empty() {
                continue;
            }
            let parts: Vec<&str> = field.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(Error::InvalidInput(format!(
                    "transition `{field}` is not `from,symbol,to`"
                )));
            }
            let from = parse_index(parts[0], "transition source")?;
            let symbol = match parts[1] {
                "0" => 0,
                "1" => 1,
                other => {
                    return Err(Error::InvalidInput(format!(
                        "transition symbol `{other}` is not 0 or 1"
                    )))
                }
            };
            let to = parse_index(parts[2], "transition target")?;
            transitions.push((from, symbol, to));
        }
        Automaton::new(num_states, transitions, accepting)
    }
}

fn parse_index(s: &str, what: &str) -> Result<usize> {
    s.parse::<usize>()
        .map_err(|_| Error::InvalidInput(format!("{what} `{s}` is not a nonnegative integer")))
}

impl fmt::Display for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Automaton {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Automaton::parse_text(s)
    }
}
