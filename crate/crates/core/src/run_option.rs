//! The American run option: exercise at time `k` pays the current run of
//! heads `G_k`.
//!
//! Exact prices come from backward induction over `(time, current run)`,
//! which is Markov. The longest-run distribution is computed exactly from
//! the count of strings without `r` consecutive heads,
//! `a_m = a_{m-1} + .. + a_{m-r}` with `a_m = 2^m` for `m < r`.

use std::f64::consts::{LN_2, PI};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::to_f64;
use crate::policy::{monte_carlo, PolicyResult};
use crate::pricing::MarketParams;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Extra run lengths tracked past `2 log2 n` by [`exact_run_distribution`].
pub const RUN_CUTOFF_SLACK: usize = 32;

/// Asymptotic mean of the longest run of heads in `n` fair tosses,
/// `log2 n + gamma/ln 2 - 3/2`, without the small periodic term.
pub fn boyd_expectation(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Precondition(format!(
            "the longest-run asymptotic needs n >= 2, got {n}"
        )));
    }
    Ok((n as f64).log2() + EULER_GAMMA / LN_2 - 1.5)
}

/// Limiting variance of the longest run, `1/12 + pi^2 / (6 ln^2 2)`.
pub fn boyd_variance_constant() -> f64 {
    1.0 / 12.0 + PI * PI / (6.0 * LN_2 * LN_2)
}

/// Exact law of the longest run of heads `R_n` under the fair coin, for run
/// lengths up to a cutoff, plus the exact mass beyond it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunDistribution {
    pub n: usize,
    /// `pmf[r] = P(R_n = r)` for `r = 0..=cutoff`.
    pub pmf: Vec<BigRational>,
    /// `P(R_n > cutoff)`; zero when the cutoff reaches `n`.
    pub tail: BigRational,
}

impl RunDistribution {
    pub fn cutoff(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn is_complete(&self) -> bool {
        self.tail.is_zero()
    }

    /// Exact mean when the distribution is complete.
    pub fn exact_mean(&self) -> Option<BigRational> {
        self.is_complete().then(|| {
            self.pmf
                .iter()
                .enumerate()
                .map(|(r, p)| p * BigRational::from_usize(r).expect("usize fits"))
                .sum()
        })
    }

    /// Mean; tail mass is counted at `cutoff + 1`, which is exact for
    /// complete distributions and otherwise off by less than
    /// `n * tail`.
    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.moment(2) - m * m
    }

    fn moment(&self, k: i32) -> f64 {
        let body: f64 = self
            .pmf
            .iter()
            .enumerate()
            .map(|(r, p)| to_f64(p) * (r as f64).powi(k))
            .sum();
        body + to_f64(&self.tail) * ((self.cutoff() + 1) as f64).powi(k)
    }

    /// `P(R_n >= r)`, for `r` up to one past the cutoff.
    pub fn at_least(&self, r: usize) -> Option<BigRational> {
        if r > self.cutoff() + 1 {
            return None;
        }
        Some(
            self.pmf[r.min(self.pmf.len())..]
                .iter()
                .sum::<BigRational>()
                + &self.tail,
        )
    }
}

/// Number of length-`n` strings with no run of `r` heads.
fn count_without_run(n: usize, r: usize) -> BigUint {
    if r == 0 {
        return BigUint::zero();
    }
    // a_m = 2 a_{m-1} - a_{m-1-r} for m > r, a_r = 2^r - 1.
    let mut window: std::collections::VecDeque<BigUint> = (0..r.min(n + 1))
        .map(|m| BigUint::from(1u32) << m)
        .collect();
    if n < r {
        return window.pop_back().expect("nonempty");
    }
    window.push_back((BigUint::from(1u32) << r) - 1u32);
    for _ in r + 1..=n {
        let last = window.back().expect("nonempty");
        let next = (last << 1usize) - window.front().expect("nonempty");
        window.pop_front();
        window.push_back(next);
    }
    window.pop_back().expect("nonempty")
}

/// Distribution of `R_n` with the cutoff at `min(n, 2 log2 n + slack)`.
pub fn exact_run_distribution(n: usize) -> RunDistribution {
    let log = if n > 1 {
        (n as f64).log2().ceil() as usize
    } else {
        0
    };
    run_distribution_with_cutoff(n, (2 * log + RUN_CUTOFF_SLACK).min(n))
}

pub fn run_distribution_with_cutoff(n: usize, cutoff: usize) -> RunDistribution {
    let cutoff = cutoff.min(n);
    let total = BigInt::from(BigUint::from(1u32) << n);
    // below[r] = #{R_n < r}, for r = 0..=cutoff + 1.
    let below: Vec<BigInt> = (0..=cutoff + 1)
        .map(|r| BigInt::from(count_without_run(n, r)))
        .collect();
    let pmf = (0..=cutoff)
        .map(|r| BigRational::new(&below[r + 1] - &below[r], total.clone()))
        .collect();
    let tail = BigRational::new(&total - &below[cutoff + 1], total);
    RunDistribution { n, pmf, tail }
}

/// Value of the run option and the exercise frontier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOptionPrice<T> {
    pub value: T,
    /// For each time `k`, the smallest current run at which exercising is
    /// optimal, if any run `<= k` is.
    pub frontier: Vec<Option<usize>>,
}

/// Backward induction on `V(k, g) = max(g, [p V(k+1, g+1) + (1-p) V(k+1, 0)] / (1 + r))`,
/// with `V(N, g) = g`. Generic so small cases can run in exact arithmetic.
pub fn run_option_dp<T>(horizon: usize, p: &T, discount: &T) -> RunOptionPrice<T>
where
    T: Clone + Num + PartialOrd + FromPrimitive,
{
    let q = T::one() - p.clone();
    let num = |g: usize| T::from_usize(g).expect("run length fits");
    // values[g] = V(k, g) for the current k; only g <= k is reachable.
    let mut values: Vec<T> = (0..=horizon + 1).map(num).collect();
    let mut frontier = vec![None; horizon + 1];
    frontier[horizon] = Some(0);
    for k in (0..horizon).rev() {
        let reset = values[0].clone();
        let mut first = None;
        for g in 0..=k {
            let hold =
                (p.clone() * values[g + 1].clone() + q.clone() * reset.clone()) * discount.clone();
            let payoff = num(g);
            if payoff >= hold {
                first.get_or_insert(g);
                values[g] = payoff;
            } else {
                values[g] = hold;
            }
        }
        frontier[k] = first;
    }
    RunOptionPrice {
        value: values[0].clone(),
        frontier,
    }
}

/// The run option priced in floating point, O(N^2) time and O(N) space.
pub fn run_option_price_exact(horizon: usize, params: &MarketParams) -> RunOptionPrice<f64> {
    run_option_dp(horizon, &to_f64(params.p()), &to_f64(&params.discount()))
}

/// The run option priced in rational arithmetic.
pub fn run_option_price_rational(
    horizon: usize,
    params: &MarketParams,
) -> RunOptionPrice<BigRational> {
    run_option_dp(horizon, params.p(), &params.discount())
}

/// Value of exercising the first time the current run reaches `threshold`.
/// If it never does, the holder gets the run at the horizon when
/// `settle_at_expiry`, and nothing otherwise.
pub fn threshold_policy_value(
    horizon: usize,
    threshold: usize,
    params: &MarketParams,
    settle_at_expiry: bool,
) -> f64 {
    if threshold == 0 {
        return 0.0;
    }
    let p = to_f64(params.p());
    let q = 1.0 - p;
    let discount = to_f64(&params.discount());
    // w[g] for g < threshold: value at time k with current run g, not yet stopped.
    let mut w: Vec<f64> = (0..threshold)
        .map(|g| if settle_at_expiry { g as f64 } else { 0.0 })
        .collect();
    for _ in 0..horizon {
        let reset = w[0];
        let next: Vec<f64> = (0..threshold)
            .map(|g| {
                let up = if g + 1 >= threshold {
                    threshold as f64
                } else {
                    w[g + 1]
                };
                (p * up + q * reset) * discount
            })
            .collect();
        w = next;
    }
    w[0]
}

/// Waits for a run of `[E R_N] - t` heads, using the asymptotic mean.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauPolicy {
    pub horizon: usize,
    pub t: usize,
    pub target: usize,
}

pub fn tau_t_policy(horizon: usize, t: usize) -> Result<TauPolicy> {
    if t < 1 {
        return Err(Error::Precondition("t must be at least 1".to_string()));
    }
    let nearest = boyd_expectation(horizon)?.round() as i64;
    let target = nearest - t as i64;
    if target < 1 {
        return Err(Error::Precondition(format!(
            "target run [E R_N] - t = {nearest} - {t} is below 1"
        )));
    }
    Ok(TauPolicy {
        horizon,
        t,
        target: target as usize,
    })
}

impl TauPolicy {
    /// First time the current run of heads reaches the target.
    pub fn exercise_time(&self, ticks: &[u8]) -> Option<usize> {
        let mut run = 0;
        for (i, &b) in ticks.iter().take(self.horizon).enumerate() {
            run = if b == 1 { run + 1 } else { 0 };
            if run == self.target {
                return Some(i + 1);
            }
        }
        None
    }

    /// Exact value; never hitting the target pays nothing.
    pub fn exact_value(&self, params: &MarketParams) -> f64 {
        threshold_policy_value(self.horizon, self.target, params, false)
    }

    pub fn simulate(&self, params: &MarketParams, samples: u64, seed: u64) -> Result<PolicyResult> {
        let p = to_f64(params.p());
        let discount = to_f64(&params.discount());
        let label = format!("tau:{}", self.t);
        monte_carlo(label, self.horizon, samples, seed, |rng| {
            let mut run = 0;
            for m in 1..=self.horizon {
                run = if rng.random_bool(p) { run + 1 } else { 0 };
                if run == self.target {
                    return Ok((Some(m), self.target as f64 * discount.powi(m as i32)));
                }
            }
            Ok((None, 0.0))
        })
    }
}

/// The lower-bound objective `(a - t - 1)(1 - 4/(t-1)^2)`.
pub fn tau_objective(a: f64, t: usize) -> f64 {
    let s = t as f64 - 1.0;
    (a - t as f64 - 1.0) * (1.0 - 4.0 / (s * s))
}

/// The integer `t >= 2` maximizing [`tau_objective`] at `a = E R_N`
/// (asymptotic), scanning `t in [2, a]`; ties go to the smaller `t`.
///
/// The real maximizer has a closed form that behaves like
/// `(4 / ln 2)^(1/3) (ln N)^(1/3)`; the scan avoids it.
pub fn choose_t(horizon: usize) -> Result<usize> {
    if horizon < 16 {
        return Err(Error::Precondition(format!(
            "choose_t needs N >= 16, got {horizon}"
        )));
    }
    let a = boyd_expectation(horizon)?;
    let hi = (a.floor() as usize).max(2);
    let mut best = 2;
    let mut best_val = tau_objective(a, 2);
    for t in 3..=hi {
        let v = tau_objective(a, t);
        if v > best_val {
            best = t;
            best_val = v;
        }
    }
    Ok(best)
}

/// One row of the run-option report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOptionRow {
    pub horizon: usize,
    pub exact_mean: f64,
    pub boyd_mean: f64,
    pub t: usize,
    pub target: usize,
    pub simulated: f64,
    pub simulated_std_error: f64,
    pub exact_value: f64,
}

impl RunOptionRow {
    pub const CSV_HEADER: &'static str =
        "N,exact_E_R_N,boyd_E_R_N,t_N,target,simulated_tau_value,simulated_std_error,exact_V_A";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{:.6},{:.6},{},{},{:.6},{:.6},{:.6}",
            self.horizon,
            self.exact_mean,
            self.boyd_mean,
            self.t,
            self.target,
            self.simulated,
            self.simulated_std_error,
            self.exact_value
        )
    }
}

/// Computes a report row. `t = None` picks [`choose_t`].
pub fn run_option_report(
    horizon: usize,
    t: Option<usize>,
    params: &MarketParams,
    samples: u64,
    seed: u64,
) -> Result<RunOptionRow> {
    let t = match t {
        Some(t) => t,
        None => choose_t(horizon)?,
    };
    let policy = tau_t_policy(horizon, t)?;
    let sim = policy.simulate(params, samples, seed)?;
    Ok(RunOptionRow {
        horizon,
        exact_mean: exact_run_distribution(horizon).mean(),
        boyd_mean: boyd_expectation(horizon)?,
        t,
        target: policy.target,
        simulated: sim.estimate,
        simulated_std_error: sim.std_error,
        exact_value: run_option_price_exact(horizon, params).value,
    })
}

/// Exact mean of `R_n` as f64, for convenience.
pub fn exact_run_expectation(n: usize) -> f64 {
    exact_run_distribution(n).mean()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_distributions() {
        let d = exact_run_distribution(2);
        assert_eq!(d.pmf, vec![q(1, 4), q(2, 4), q(1, 4)]);
        assert!(d.is_complete());
        assert_eq!(exact_run_distribution(3).exact_mean(), Some(q(11, 8)));
        assert_eq!(exact_run_distribution(0).pmf, vec![q(1, 1)]);
    }

    #[test]
    fn counts() {
        assert_eq!(count_without_run(4, 1), BigUint::from(1u32));
        assert_eq!(count_without_run(4, 2), BigUint::from(8u32));
        assert_eq!(count_without_run(4, 5), BigUint::from(16u32));
        assert_eq!(count_without_run(3, 3), BigUint::from(7u32));
        assert_eq!(count_without_run(5, 0), BigUint::zero());
    }

    #[test]
    fn boyd_values() {
        assert!(boyd_expectation(1).is_err());
        let v = boyd_variance_constant();
        assert!(v > 3.4 && v < 3.6, "{v}");
        assert!(boyd_expectation(1024).unwrap() < boyd_expectation(1025).unwrap());
    }

    #[test]
    fn dp_small_cases() {
        let fair = MarketParams::default();
        assert_eq!(run_option_price_rational(0, &fair).value, q(0, 1));
        // One toss: exercise at 1 pays 1 w.p. 1/2.
        assert_eq!(run_option_price_rational(1, &fair).value, q(1, 2));
        let f = run_option_price_exact(1, &fair);
        assert_eq!(f.value, 0.5);
        assert_eq!(f.frontier, vec![None, Some(0)]);
    }

    #[test]
    fn tau_policy_targets() {
        // boyd(1024) = 10 + 0.8327 - 1.5 = 9.333, nearest integer 9.
        assert_eq!(tau_t_policy(1024, 2).unwrap().target, 7);
        assert!(tau_t_policy(1024, 0).is_err());
        assert!(tau_t_policy(1024, 9).is_err());
        let p = tau_t_policy(1024, 8).unwrap();
        assert_eq!(p.target, 1);
        assert_eq!(p.exercise_time(&[0, 0, 1]), Some(3));
        assert_eq!(p.exercise_time(&[0, 0, 0]), None);
    }

    #[test]
    fn target_one_closed_form() {
        let p = TauPolicy {
            horizon: 10,
            t: 1,
            target: 1,
        };
        let exact = p.exact_value(&MarketParams::default());
        assert!((exact - (1.0 - 2f64.powi(-10))).abs() < 1e-12);
    }

    #[test]
    fn choose_t_scan() {
        assert!(choose_t(15).is_err());
        assert_eq!(choose_t(1 << 10).unwrap(), 5);
        assert_eq!(choose_t(1 << 20).unwrap(), 6);
        let a = boyd_expectation(1 << 14).unwrap();
        let t = choose_t(1 << 14).unwrap();
        assert!(tau_objective(a, t) >= tau_objective(a, t + 1));
        assert!(tau_objective(a, t) >= tau_objective(a, t - 1));
    }

    #[test]
    fn threshold_values() {
        let fair = MarketParams::default();
        assert_eq!(threshold_policy_value(5, 0, &fair, true), 0.0);
        // Threshold 1 with settlement: pays 1 on the first head, else G_N = 0.
        let v = threshold_policy_value(3, 1, &fair, true);
        assert!((v - 0.875).abs() < 1e-12);
    }
}
