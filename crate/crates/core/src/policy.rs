//! Monte Carlo evaluation of exercise policies.
//!
//! Samples are split into fixed-size shards. Shard `i` draws from a ChaCha
//! stream `i` under the user's seed, and shard sums are merged in shard
//! order, so results do not depend on the thread count.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::complexity::{current_run, ComplexityEngine};
use crate::error::{Error, Result};
use crate::exact::to_f64;
use crate::pricing::MarketParams;

const SHARD_SIZE: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "param", rename_all = "kebab-case")]
pub enum Policy {
    /// Exercise at time `n` regardless of the path.
    Static(usize),
    /// Exercise the first time the deficiency reaches `k`, else at the horizon.
    DeficiencyThreshold(usize),
    /// Exercise the first time the current run of heads reaches `g`, else at
    /// the horizon.
    RunThreshold(usize),
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::Static(n) => write!(f, "static:{n}"),
            Policy::DeficiencyThreshold(k) => write!(f, "deficiency-threshold:{k}"),
            Policy::RunThreshold(g) => write!(f, "run-threshold:{g}"),
        }
    }
}

impl FromStr for Policy {
    type Err = Error;

    /// Accepts `name:param` or `name(param)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, param) = match s.split_once(':') {
            Some((name, param)) => (name, param),
            None => match s.strip_suffix(')').and_then(|t| t.split_once('(')) {
                Some((name, param)) => (name, param),
                None => return Err(Error::UnknownPolicy(s.to_string())),
            },
        };
        let param: usize = param.trim().parse().map_err(|_| {
            Error::InvalidInput(format!(
                "policy parameter `{param}` is not a nonnegative integer"
            ))
        })?;
        match name.trim() {
            "static" => Ok(Policy::Static(param)),
            "deficiency-threshold" => Ok(Policy::DeficiencyThreshold(param)),
            "run-threshold" => Ok(Policy::RunThreshold(param)),
            other => Err(Error::UnknownPolicy(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyResult {
    pub policy: String,
    pub horizon: usize,
    pub samples: u64,
    pub estimate: f64,
    pub std_error: f64,
    /// `histogram[m]` counts samples exercised at time `m`.
    pub histogram: Vec<u64>,
    /// Samples that never exercised (payoff 0).
    pub never_exercised: u64,
}

/// One simulated outcome: exercise time (if any) and discounted payoff.
pub(crate) type Outcome = (Option<usize>, f64);

/// Runs `samples` independent paths of `draw` and aggregates them.
pub(crate) fn monte_carlo<F>(
    label: String,
    horizon: usize,
    samples: u64,
    seed: u64,
    draw: F,
) -> Result<PolicyResult>
where
    F: Fn(&mut ChaCha8Rng) -> Result<Outcome> + Sync,
{
    if samples == 0 {
        return Err(Error::Precondition(
            "samples must be at least 1".to_string(),
        ));
    }
    let shards = samples.div_ceil(SHARD_SIZE);
    let partials: Vec<(f64, f64, Vec<u64>, u64)> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard);
            let count = SHARD_SIZE.min(samples - shard * SHARD_SIZE);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            let mut histogram = vec![0u64; horizon + 1];
            let mut never = 0;
            for _ in 0..count {
                let (time, payoff) = draw(&mut rng)?;
                sum += payoff;
                sum_sq += payoff * payoff;
                match time {
                    Some(m) => histogram[m] += 1,
                    None => never += 1,
                }
            }
            Ok((sum, sum_sq, histogram, never))
        })
        .collect::<Result<_>>()?;

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut histogram = vec![0u64; horizon + 1];
    let mut never_exercised = 0;
    for (s, s2, h, nev) in partials {
        sum += s;
        sum_sq += s2;
        for (acc, v) in histogram.iter_mut().zip(h) {
            *acc += v;
        }
        never_exercised += nev;
    }
    let n = samples as f64;
    let estimate = sum / n;
    let variance = if samples > 1 {
        ((sum_sq - n * estimate * estimate) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(PolicyResult {
        policy: label,
        horizon,
        samples,
        estimate,
        std_error: (variance / n).sqrt(),
        histogram,
        never_exercised,
    })
}

/// Estimates the discounted payoff of `policy` over paths of length
/// `horizon`. Deficiency policies are paid `D_m` of the prefix at exercise;
/// run policies are paid the current run of heads.
pub fn simulate_policy(
    engine: &ComplexityEngine,
    policy: Policy,
    horizon: usize,
    params: &MarketParams,
    samples: u64,
    seed: u64,
) -> Result<PolicyResult> {
    if let Policy::Static(n) = policy {
        if n > horizon {
            return Err(Error::Precondition(format!(
                "static exercise time {n} is past the horizon {horizon}"
            )));
        }
    }
    if matches!(policy, Policy::Static(_) | Policy::DeficiencyThreshold(_))
        && horizon > engine.max_len()
    {
        return Err(Error::LimitExceeded {
            what: "horizon",
            requested: horizon,
            limit: engine.max_len(),
        });
    }
    let p = to_f64(params.p());
    let discount = to_f64(&params.discount());
    let discounted = |payoff: usize, m: usize| payoff as f64 * discount.powi(m as i32);

    monte_carlo(policy.to_string(), horizon, samples, seed, |rng| {
        let mut path = BitString::new();
        for m in 0..=horizon {
            if m > 0 {
                path.push(rng.random_bool(p) as u8);
            }
            let stop = match policy {
                Policy::Static(n) => {
                    (m == n).then(|| engine.deficiency(&path).map(|d| d.deficiency))
                }
                Policy::DeficiencyThreshold(k) => {
                    let d = engine.deficiency(&path)?.deficiency;
                    (d >= k || m == horizon).then_some(Ok(d))
                }
                Policy::RunThreshold(g) => {
                    let run = current_run(&path);
                    (run >= g || m == horizon).then_some(Ok(run))
                }
            };
            if let Some(payoff) = stop {
                return Ok((Some(m), discounted(payoff?, m)));
            }
        }
        unreachable!("every policy exercises by the horizon")
    })
}
