//! Depth-first search over canonical state sequences.
//!
//! A candidate witness for `x` is a sequence `s_0 = 0, s_1, .., s_n` in which
//! every state index is at most one more than the largest index seen so far.
//! The sequence induces the automaton made of exactly its traversed edges,
//! accepting only `s_n`. That automaton accepts `x` uniquely iff there is
//! exactly one walk of length `n` from 0 to `s_n`.
//!
//! Pruning: if the partial automaton already has two walks of length `j`
//! from 0 to `s_j` for some placed `j`, each of them extends along the rest of
//! the path to an accepting walk of length `n`, and adding edges only adds
//! walks. So the whole subtree is dead.

use rayon::prelude::*;

/// Levels of the tree enumerated before handing subtrees to worker threads.
const SPLIT_DEPTH: usize = 8;

/// Strings shorter than this are searched on the calling thread.
const PARALLEL_MIN_LEN: usize = 18;

struct PathSearch<'a> {
    x: &'a [u8],
    q: usize,
    min_states: usize,
    path: Vec<usize>,
    /// Per placed step: the largest state index before the step, and whether
    /// the step introduced a new edge.
    undo: Vec<(usize, bool)>,
    edge_set: Vec<bool>,
    /// Edges as (from, to); the label does not matter for counting walks.
    edges: Vec<(usize, usize)>,
    /// `layers[j * q + s]` = walks of length j from 0 to s, saturated at 2.
    layers: Vec<u8>,
    max_used: usize,
}

impl<'a> PathSearch<'a> {
    fn new(x: &'a [u8], q: usize, min_states: usize) -> Self {
        let n = x.len();
        let mut layers = vec![0u8; (n + 1) * q];
        layers[0] = 1;
        PathSearch {
            x,
            q,
            min_states,
            path: vec![0],
            undo: Vec::with_capacity(n),
            edge_set: vec![false; 2 * q * q],
            edges: Vec::with_capacity(n),
            layers,
            max_used: 0,
        }
    }

    fn n(&self) -> usize {
        self.x.len()
    }

    fn compute_layer(&mut self, j: usize) {
        let q = self.q;
        let (done, rest) = self.layers.split_at_mut(j * q);
        let prev = &done[(j - 1) * q..];
        let next = &mut rest[..q];
        next.fill(0);
        for &(from, to) in &self.edges {
            next[to] = (next[to] + prev[from]).min(2);
        }
    }

    /// Extends the path by state `t`. Returns false if the extension is
    /// dead; the caller must `unplace` either way.
    fn place(&mut self, t: usize) -> bool {
        let m = self.path.len() - 1;
        let from = self.path[m];
        let key = (from * 2 + self.x[m] as usize) * self.q + t;
        let is_new = !self.edge_set[key];
        self.undo.push((self.max_used, is_new));
        self.max_used = self.max_used.max(t);
        self.path.push(t);
        if is_new {
            self.edge_set[key] = true;
            self.edges.push((from, t));
            for j in 1..=m + 1 {
                self.compute_layer(j);
            }
            (1..=m + 1).all(|j| self.layers[j * self.q + self.path[j]] <= 1)
        } else {
            self.compute_layer(m + 1);
            self.layers[(m + 1) * self.q + t] <= 1
        }
    }

    fn unplace(&mut self) {
        let t = self.path.pop().expect("cannot unplace the initial state");
        let (old_max, is_new) = self.undo.pop().expect("undo stack out of sync");
        self.max_used = old_max;
        if is_new {
            let m = self.path.len() - 1;
            let from = self.path[m];
            let key = (from * 2 + self.x[m] as usize) * self.q + t;
            self.edge_set[key] = false;
            self.edges.pop();
            for j in 1..=m {
                self.compute_layer(j);
            }
        }
    }

    /// Candidate next states, lowest first, that can still reach the
    /// required number of distinct states.
    fn candidates(&self) -> impl Iterator<Item = usize> {
        let m = self.path.len() - 1;
        let remaining_after = self.n() - (m + 1);
        let hi = (self.max_used + 1).min(self.q - 1);
        let max_used = self.max_used;
        let min_states = self.min_states;
        (0..=hi).filter(move |&t| {
            let used = max_used.max(t) + 1;
            min_states.saturating_sub(used) <= remaining_after
        })
    }

    fn dfs(&mut self) -> bool {
        if self.path.len() == self.n() + 1 {
            return true;
        }
        let cands: Vec<usize> = self.candidates().collect();
        for t in cands {
            if self.place(t) && self.dfs() {
                return true;
            }
            self.unplace();
        }
        false
    }

    /// Collects every live path prefix with `depth` placed steps, in DFS
    /// order.
    fn collect_prefixes(&mut self, depth: usize, out: &mut Vec<Vec<usize>>) {
        if self.path.len() == depth + 1 {
            out.push(self.path.clone());
            return;
        }
        let cands: Vec<usize> = self.candidates().collect();
        for t in cands {
            if self.place(t) {
                self.collect_prefixes(depth, out);
            }
            self.unplace();
        }
    }
}

/// Finds the canonically-first state sequence using at least `min_states`
/// and at most `max_states` states whose induced automaton accepts `x`
/// uniquely.
pub(crate) fn find_witness(x: &[u8], max_states: usize, min_states: usize) -> Option<Vec<usize>> {
    if max_states == 0 || min_states > max_states {
        return None;
    }
    if x.is_empty() {
        return (min_states <= 1).then(|| vec![0]);
    }
    if x.len() < PARALLEL_MIN_LEN {
        let mut search = PathSearch::new(x, max_states, min_states);
        return search.dfs().then_some(search.path);
    }

    let depth = SPLIT_DEPTH.min(x.len());
    let mut prefixes = Vec::new();
    PathSearch::new(x, max_states, min_states).collect_prefixes(depth, &mut prefixes);
    prefixes.par_iter().find_map_first(|prefix| {
        let mut search = PathSearch::new(x, max_states, min_states);
        for &t in &prefix[1..] {
            let live = search.place(t);
            debug_assert!(live, "replayed prefix must stay live");
        }
        search.dfs().then_some(search.path)
    })
}
