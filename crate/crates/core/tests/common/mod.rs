//! Brute-force reference implementations shared by the integration tests.
//! Nothing here calls into the search, the tree induction or the DP.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Edge = (usize, u8, usize);

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn bits_of(s: &str) -> Vec<u8> {
    s.bytes().map(|c| c - b'0').collect()
}

pub fn all_strings(n: usize) -> Vec<Vec<u8>> {
    (0..1u32 << n)
        .map(|v| (0..n).map(|i| ((v >> (n - 1 - i)) & 1) as u8).collect())
        .collect()
}

/// Every labeled walk of length `n` from state 0, as the list of states
/// visited and the labels read.
pub fn all_walks(edges: &[Edge], n: usize) -> Vec<(Vec<usize>, Vec<u8>)> {
    let mut out = Vec::new();
    let mut states = vec![0];
    let mut labels = Vec::new();
    fn go(
        edges: &[Edge],
        n: usize,
        states: &mut Vec<usize>,
        labels: &mut Vec<u8>,
        out: &mut Vec<(Vec<usize>, Vec<u8>)>,
    ) {
        if labels.len() == n {
            out.push((states.clone(), labels.clone()));
            return;
        }
        let here = *states.last().unwrap();
        for &(from, sym, to) in edges {
            if from == here {
                states.push(to);
                labels.push(sym);
                go(edges, n, states, labels, out);
                states.pop();
                labels.pop();
            }
        }
    }
    go(edges, n, &mut states, &mut labels, &mut out);
    out
}

pub fn count_accepting(edges: &[Edge], accepting: &[usize], n: usize) -> usize {
    all_walks(edges, n)
        .iter()
        .filter(|(s, _)| accepting.contains(s.last().unwrap()))
        .count()
}

pub fn spells(edges: &[Edge], accepting: &[usize], x: &[u8]) -> bool {
    all_walks(edges, x.len())
        .iter()
        .any(|(s, l)| l == x && accepting.contains(s.last().unwrap()))
}

/// Accepting walks of length `n`, stopping once two are found.
fn accepting_walks_capped(edges: &[Edge], accept: usize, state: usize, left: usize) -> usize {
    if left == 0 {
        return usize::from(state == accept);
    }
    let mut total = 0;
    for &(from, _, to) in edges {
        if from == state {
            total += accepting_walks_capped(edges, accept, to, left - 1);
            if total >= 2 {
                return 2;
            }
        }
    }
    total
}

/// Least state count of a path-induced automaton accepting `x` uniquely,
/// by trying every first-appearance state sequence.
pub fn brute_complexity(x: &[u8]) -> usize {
    (1..).find(|&q| exists_unique_with(x, q)).unwrap()
}

pub fn exists_unique_with(x: &[u8], states: usize) -> bool {
    let mut seq = vec![0usize];
    fn go(x: &[u8], limit: usize, seq: &mut Vec<usize>) -> bool {
        let i = seq.len() - 1;
        if i == x.len() {
            let used = seq.iter().max().unwrap() + 1;
            if used > limit {
                return false;
            }
            let edges: Vec<Edge> = (0..x.len())
                .map(|j| (seq[j], x[j], seq[j + 1]))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            return accepting_walks_capped(&edges, seq[x.len()], 0, x.len()) == 1;
        }
        let next_new = (seq.iter().max().unwrap() + 1).min(limit - 1);
        for s in 0..=next_new {
            seq.push(s);
            if go(x, limit, seq) {
                return true;
            }
            seq.pop();
        }
        false
    }
    go(x, states, &mut seq)
}

pub fn brute_deficiency(x: &[u8]) -> usize {
    x.len() / 2 + 1 - brute_complexity(x)
}

pub fn longest_run_scan(x: &[u8]) -> usize {
    let mut best = 0;
    for i in 0..x.len() {
        let mut j = i;
        while j < x.len() && x[j] == x[i] {
            j += 1;
        }
        best = best.max(j - i);
    }
    best
}

pub fn longest_heads(x: &[u8]) -> usize {
    x.split(|&b| b == 0).map(|r| r.len()).max().unwrap_or(0)
}

pub fn trailing_heads(x: &[u8]) -> usize {
    x.iter().rev().take_while(|&&b| b == 1).count()
}

/// Optimal stopping value over the full path tree by direct recursion on
/// prefixes. `american = false` only allows stopping at `n`.
pub fn snell_value<F>(
    payoff: &F,
    n: usize,
    p: &BigRational,
    discount: &BigRational,
    american: bool,
) -> BigRational
where
    F: Fn(&[u8]) -> BigRational,
{
    fn go<F: Fn(&[u8]) -> BigRational>(
        payoff: &F,
        prefix: &mut Vec<u8>,
        n: usize,
        p: &BigRational,
        discount: &BigRational,
        american: bool,
    ) -> BigRational {
        let now = payoff(prefix);
        if prefix.len() == n {
            return now;
        }
        prefix.push(1);
        let up = go(payoff, prefix, n, p, discount, american);
        prefix.pop();
        prefix.push(0);
        let down = go(payoff, prefix, n, p, discount, american);
        prefix.pop();
        let hold = (p * up + (BigRational::one() - p) * down) * discount;
        if american && now > hold {
            now
        } else {
            hold
        }
    }
    go(payoff, &mut Vec::new(), n, p, discount, american)
}

/// Discounted value of a stopping rule, averaged over all `2^n` paths.
pub fn policy_value<S>(
    stop: &S,
    payoff: &dyn Fn(&[u8]) -> usize,
    n: usize,
    p: &BigRational,
    discount: &BigRational,
) -> BigRational
where
    S: Fn(&[u8]) -> bool,
{
    let mut total = BigRational::zero();
    for path in all_strings(n) {
        let ones = path.iter().filter(|&&b| b == 1).count();
        let prob =
            num_traits::pow(p.clone(), ones) * num_traits::pow(BigRational::one() - p, n - ones);
        let m = (0..=n).find(|&m| m == n || stop(&path[..m])).unwrap();
        total += prob * int(payoff(&path[..m])) * num_traits::pow(discount.clone(), m);
    }
    total
}

/// [`brute_deficiency`] for every string up to length 8, computed once.
pub fn memo_deficiency(x: &[u8]) -> usize {
    use std::collections::HashMap;
    use std::sync::OnceLock;
    static TABLE: OnceLock<HashMap<Vec<u8>, usize>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        (0..=8)
            .flat_map(all_strings)
            .map(|x| {
                let d = brute_deficiency(&x);
                (x, d)
            })
            .collect()
    });
    match table.get(x) {
        Some(&d) => d,
        None => brute_deficiency(x),
    }
}
