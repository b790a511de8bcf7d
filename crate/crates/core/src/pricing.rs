//! Binomial-model prices of options paying the complexity deficiency.
//!
//! All tree prices are exact rationals. A node is identified by the tick
//! prefix that reaches it; level `L` holds the `2^L` prefixes of length `L`
//! in index order, so the children of `(L, i)` are `(L + 1, 2i)` after a
//! down tick and `(L + 1, 2i + 1)` after an up tick.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::bits::BitString;
use crate::complexity::{max_complexity, ComplexityEngine};
use crate::error::{Error, Result};
use crate::exact::{self, format_decimal, from_usize};

/// Default largest expiry priced by full enumeration.
pub const DEFAULT_TREE_LIMIT: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptionStyle {
    European,
    American,
}

impl fmt::Display for OptionStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OptionStyle::European => "european",
            OptionStyle::American => "american",
        })
    }
}

impl std::str::FromStr for OptionStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "european" => Ok(OptionStyle::European),
            "american" => Ok(OptionStyle::American),
            other => Err(Error::InvalidInput(format!(
                "unknown option style `{other}` (expected european or american)"
            ))),
        }
    }
}

/// Per-step interest rate and risk-neutral up probability.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawMarketParams")]
pub struct MarketParams {
    #[serde(with = "exact::serde_fraction")]
    rate: BigRational,
    #[serde(with = "exact::serde_fraction")]
    risk_neutral_p: BigRational,
    #[serde(
        default,
        with = "exact::serde_opt_fraction",
        skip_serializing_if = "Option::is_none"
    )]
    up_factor: Option<BigRational>,
    #[serde(
        default,
        with = "exact::serde_opt_fraction",
        skip_serializing_if = "Option::is_none"
    )]
    down_factor: Option<BigRational>,
}

#[derive(Deserialize)]
struct RawMarketParams {
    #[serde(with = "exact::serde_fraction")]
    rate: BigRational,
    #[serde(with = "exact::serde_fraction")]
    risk_neutral_p: BigRational,
    #[serde(default, with = "exact::serde_opt_fraction")]
    up_factor: Option<BigRational>,
    #[serde(default, with = "exact::serde_opt_fraction")]
    down_factor: Option<BigRational>,
}

impl TryFrom<RawMarketParams> for MarketParams {
    type Error = Error;

    fn try_from(raw: RawMarketParams) -> Result<Self> {
        let params = match (raw.up_factor, raw.down_factor) {
            (Some(up), Some(down)) => MarketParams::from_factors(raw.rate, up, down)?,
            (None, None) => MarketParams::new(raw.rate, raw.risk_neutral_p.clone())?,
            _ => {
                return Err(Error::InvalidInput(
                    "up and down factors come in pairs".to_string(),
                ))
            }
        };
        if params.risk_neutral_p != raw.risk_neutral_p {
            return Err(Error::InvalidInput(
                "risk-neutral probability disagrees with the factors".to_string(),
            ));
        }
        Ok(params)
    }
}

impl Default for MarketParams {
    /// Fair coin, zero interest.
    fn default() -> Self {
        MarketParams::fair(BigRational::zero()).expect("zero rate is valid")
    }
}

impl MarketParams {
    pub fn new(rate: BigRational, p: BigRational) -> Result<Self> {
        if rate < BigRational::zero() {
            return Err(Error::InvalidInput(format!(
                "interest rate {} is negative",
                exact::to_fraction_string(&rate)
            )));
        }
        if p <= BigRational::zero() || p >= BigRational::one() {
            return Err(Error::InvalidInput(format!(
                "risk-neutral probability {} is not strictly between 0 and 1",
                exact::to_fraction_string(&p)
            )));
        }
        Ok(MarketParams {
            rate,
            risk_neutral_p: p,
            up_factor: None,
            down_factor: None,
        })
    }

    /// p = 1/2.
    pub fn fair(rate: BigRational) -> Result<Self> {
        MarketParams::new(rate, BigRational::new(1.into(), 2.into()))
    }

    /// Derives `p = ((1 + r) - d) / (u - d)`; requires `0 < d < 1 + r < u`.
    pub fn from_factors(rate: BigRational, up: BigRational, down: BigRational) -> Result<Self> {
        let growth = BigRational::one() + &rate;
        if !(down > BigRational::zero() && down < growth && growth < up) {
            return Err(Error::InvalidInput(
                "factors must satisfy 0 < d < 1 + r < u".to_string(),
            ));
        }
        let p = (&growth - &down) / (&up - &down);
        let mut params = MarketParams::new(rate, p)?;
        params.up_factor = Some(up);
        params.down_factor = Some(down);
        Ok(params)
    }

    /// Parses decimal or fraction strings, e.g. `("0.25", "1/2")`.
    pub fn parse(rate: &str, p: &str) -> Result<Self> {
        MarketParams::new(exact::parse_rational(rate)?, exact::parse_rational(p)?)
    }

    pub fn rate(&self) -> &BigRational {
        &self.rate
    }

    pub fn p(&self) -> &BigRational {
        &self.risk_neutral_p
    }

    pub fn up_factor(&self) -> Option<&BigRational> {
        self.up_factor.as_ref()
    }

    pub fn down_factor(&self) -> Option<&BigRational> {
        self.down_factor.as_ref()
    }

    /// `1 / (1 + r)`.
    pub fn discount(&self) -> BigRational {
        (BigRational::one() + &self.rate).recip()
    }

    /// `(1 + r)^-m`.
    pub fn discount_to(&self, m: usize) -> BigRational {
        exact::pow(&self.discount(), m)
    }

    /// Risk-neutral probability of a particular path.
    pub fn path_probability(&self, x: &BitString) -> BigRational {
        let ones = x.count_ones();
        let q = BigRational::one() - &self.risk_neutral_p;
        exact::pow(&self.risk_neutral_p, ones) * exact::pow(&q, x.len() - ones)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriceNode {
    /// Deficiency of the prefix, paid on exercise.
    pub payoff: usize,
    /// Discounted expected value of holding; absent at expiry.
    pub continuation: Option<BigRational>,
    pub value: BigRational,
    pub exercise: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriceTree {
    pub style: OptionStyle,
    pub n: usize,
    pub params: MarketParams,
    levels: Vec<Vec<PriceNode>>,
}

impl PriceTree {
    pub fn root(&self) -> &PriceNode {
        &self.levels[0][0]
    }

    pub fn value(&self) -> &BigRational {
        &self.root().value
    }

    pub fn node(&self, prefix: &BitString) -> Option<&PriceNode> {
        if prefix.len() > self.n {
            return None;
        }
        self.levels[prefix.len()].get(prefix.to_index() as usize)
    }

    pub fn level(&self, len: usize) -> &[PriceNode] {
        &self.levels[len]
    }

    /// First time the tree's exercise flags fire along `path`. Expiry always
    /// exercises, so this is defined for any path of length at least `n`.
    pub fn exercise_time(&self, path: &BitString) -> usize {
        (0..=self.n)
            .find(|&m| self.levels[m][path.prefix(m).to_index() as usize].exercise)
            .unwrap_or(self.n)
    }

    /// The tree as JSON: a map from prefix to node, values rounded to
    /// `precision` decimals.
    pub fn to_json(&self, precision: usize) -> Value {
        let number = |x: &BigRational| -> Value {
            let s = format_decimal(x, precision);
            json!(s.parse::<f64>().expect("rendered decimal parses"))
        };
        let mut nodes = Map::new();
        for (len, level) in self.levels.iter().enumerate() {
            for (i, node) in level.iter().enumerate() {
                let key = BitString::from_index(i as u64, len).to_string();
                nodes.insert(
                    key,
                    json!({
                        "payoff": node.payoff,
                        "continuation": node.continuation.as_ref().map(number),
                        "value": number(&node.value),
                        "exercise": node.exercise,
                    }),
                );
            }
        }
        json!({
            "style": self.style,
            "n": self.n,
            "params": self.params,
            "value": number(self.value()),
            "exact": exact::to_fraction_string(self.value()),
            "nodes": nodes,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummaryRow {
    pub n: usize,
    pub expected_deficiency: BigRational,
    pub european: BigRational,
    pub american: BigRational,
}

/// `(n/2)(1+r)^-n`, the most a position held from time 0 to time `n` can be
/// worth today, since deficiency grows by at most one per two ticks.
/// Meaningful for `r > 0`.
pub fn exercise_bound(n: usize, rate: &BigRational) -> BigRational {
    let growth = BigRational::one() + rate;
    BigRational::new(BigInt::from(n), BigInt::from(2)) / exact::pow(&growth, n)
}

/// Prices over the full path tree, backed by a complexity engine.
#[derive(Clone, Copy, Debug)]
pub struct Pricer<'a> {
    engine: &'a ComplexityEngine,
    limit: usize,
}

impl<'a> Pricer<'a> {
    pub fn new(engine: &'a ComplexityEngine) -> Self {
        Pricer {
            engine,
            limit: DEFAULT_TREE_LIMIT,
        }
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn engine(&self) -> &'a ComplexityEngine {
        self.engine
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.limit {
            return Err(Error::LimitExceeded {
                what: "expiry",
                requested: n,
                limit: self.limit,
            });
        }
        Ok(())
    }

    /// Deficiencies of all strings of length `n`, in index order. Only
    /// canonical representatives are searched.
    pub fn deficiency_level(&self, n: usize) -> Result<Vec<usize>> {
        self.check(n)?;
        let reps: Vec<BitString> = BitString::all_of_length(n)
            .filter(|x| x.canonical() == *x)
            .collect();
        reps.par_iter()
            .try_for_each(|x| self.engine.complexity(x).map(|_| ()))?;
        let b = max_complexity(n);
        BitString::all_of_length(n)
            .map(|x| self.engine.complexity(&x).map(|a| b - a))
            .collect()
    }

    fn deficiency_levels(&self, n: usize) -> Result<Vec<Vec<usize>>> {
        self.check(n)?;
        (0..=n).map(|len| self.deficiency_level(len)).collect()
    }

    /// `E D_n` under the fair coin, enumerating one string per symmetry
    /// class and weighting by class size.
    pub fn expected_deficiency(&self, n: usize) -> Result<BigRational> {
        let total = self.deficiency_sum(n)?;
        Ok(BigRational::new(BigInt::from(total), BigInt::one() << n))
    }

    /// Sum of `D_n(x)` over all `2^n` strings.
    fn deficiency_sum(&self, n: usize) -> Result<u64> {
        self.check(n)?;
        let b = max_complexity(n);
        let reps: Vec<BitString> = BitString::all_of_length(n)
            .filter(|x| x.canonical() == *x)
            .collect();
        let weighted: Vec<u64> = reps
            .par_iter()
            .map(|x| {
                self.engine
                    .complexity(x)
                    .map(|a| ((b - a) * x.orbit_size()) as u64)
            })
            .collect::<Result<_>>()?;
        Ok(weighted.into_iter().sum())
    }

    /// `W_n`: the discounted risk-neutral expectation of `D_n`.
    pub fn european_price(&self, n: usize, params: &MarketParams) -> Result<BigRational> {
        let level = self.deficiency_level(n)?;
        let mut total = BigRational::zero();
        for (i, &d) in level.iter().enumerate() {
            if d > 0 {
                let x = BitString::from_index(i as u64, n);
                total += params.path_probability(&x) * from_usize(d);
            }
        }
        Ok(total * params.discount_to(n))
    }

    pub fn american_price(&self, n: usize, params: &MarketParams) -> Result<PriceTree> {
        self.price_tree(n, params, OptionStyle::American)
    }

    pub fn price_tree(
        &self,
        n: usize,
        params: &MarketParams,
        style: OptionStyle,
    ) -> Result<PriceTree> {
        let payoffs = self.deficiency_levels(n)?;
        Ok(induct(&payoffs, n, params, style))
    }

    /// Decides `W_n >= k / 2^n` at `p = 1/2, r = 0` in exact integers.
    pub fn price_decision(&self, n: usize, k: u64) -> Result<bool> {
        self.check(n)?;
        let max_k = (max_complexity(n) as u64) << n;
        if k > max_k {
            return Err(Error::Precondition(format!(
                "k = {k} is outside 0..={max_k} for n = {n}"
            )));
        }
        Ok(self.deficiency_sum(n)? >= k)
    }

    /// `V_n` for `n = 0..=max_n`.
    pub fn perpetual_trend_report(
        &self,
        max_n: usize,
        params: &MarketParams,
    ) -> Result<Vec<(usize, BigRational)>> {
        let payoffs = self.deficiency_levels(max_n)?;
        Ok((0..=max_n)
            .map(|n| (n, american_root(&payoffs, n, params)))
            .collect())
    }

    /// `(n, E D_n, W_n, V_n)` rows for `n = 0..=max_n`.
    pub fn summary(&self, max_n: usize, params: &MarketParams) -> Result<Vec<SummaryRow>> {
        let payoffs = self.deficiency_levels(max_n)?;
        (0..=max_n)
            .map(|n| {
                Ok(SummaryRow {
                    n,
                    expected_deficiency: self.expected_deficiency(n)?,
                    european: self.european_price(n, params)?,
                    american: american_root(&payoffs, n, params),
                })
            })
            .collect()
    }
}

fn induct(
    payoffs: &[Vec<usize>],
    n: usize,
    params: &MarketParams,
    style: OptionStyle,
) -> PriceTree {
    let p = params.p().clone();
    let q = BigRational::one() - &p;
    let discount = params.discount();

    let mut levels: Vec<Vec<PriceNode>> = Vec::with_capacity(n + 1);
    levels.push(
        payoffs[n]
            .iter()
            .map(|&d| PriceNode {
                payoff: d,
                continuation: None,
                value: from_usize(d),
                exercise: true,
            })
            .collect(),
    );
    for len in (0..n).rev() {
        let children = levels.last().expect("expiry level exists");
        let level: Vec<PriceNode> = payoffs[len]
            .par_iter()
            .enumerate()
            .map(|(i, &d)| {
                let down = &children[2 * i].value;
                let up = &children[2 * i + 1].value;
                let continuation = (&p * up + &q * down) * &discount;
                let payoff = from_usize(d);
                let (value, exercise) = match style {
                    OptionStyle::American if payoff >= continuation => (payoff, true),
                    _ => (continuation.clone(), false),
                };
                PriceNode {
                    payoff: d,
                    continuation: Some(continuation),
                    value,
                    exercise,
                }
            })
            .collect();
        levels.push(level);
    }
    levels.reverse();
    PriceTree {
        style,
        n,
        params: params.clone(),
        levels,
    }
}

fn american_root(payoffs: &[Vec<usize>], n: usize, params: &MarketParams) -> BigRational {
    let p = params.p().clone();
    let q = BigRational::one() - &p;
    let discount = params.discount();
    let mut values: Vec<BigRational> = payoffs[n].iter().map(|&d| from_usize(d)).collect();
    for len in (0..n).rev() {
        values = payoffs[len]
            .par_iter()
            .enumerate()
            .map(|(i, &d)| {
                let continuation = (&p * &values[2 * i + 1] + &q * &values[2 * i]) * &discount;
                let payoff = from_usize(d);
                if payoff >= continuation {
                    payoff
                } else {
                    continuation
                }
            })
            .collect();
    }
    values.pop().expect("root value")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn bs(s: &str) -> BitString {
        BitString::parse(s).unwrap()
    }

    #[test]
    fn market_params_validation() {
        assert!(MarketParams::new(q(-1, 4), q(1, 2)).is_err());
        assert!(MarketParams::new(q(1, 4), q(0, 1)).is_err());
        assert!(MarketParams::new(q(1, 4), q(1, 1)).is_err());
        let derived = MarketParams::from_factors(q(1, 4), q(2, 1), q(1, 2)).unwrap();
        assert_eq!(derived.p(), &q(1, 2));
        assert!(MarketParams::from_factors(q(1, 4), q(1, 1), q(1, 2)).is_err());
        assert!(MarketParams::from_factors(q(1, 4), q(2, 1), q(0, 1)).is_err());
        assert_eq!(MarketParams::parse("0.25", "1/2").unwrap().rate(), &q(1, 4));
    }

    #[test]
    fn expiry_over_limit_fails_before_any_search() {
        let engine = ComplexityEngine::default().with_max_len(0);
        let pricer = Pricer::new(&engine).with_limit(3);
        let params = MarketParams::default();
        assert!(pricer.american_price(4, &params).unwrap_err().is_limit());
        assert!(pricer
            .perpetual_trend_report(4, &params)
            .unwrap_err()
            .is_limit());
        assert!(pricer.summary(4, &params).unwrap_err().is_limit());
    }

    #[test]
    fn params_json_is_validated() {
        for bad in [
            r#"{"rate":"1/4","risk_neutral_p":"0"}"#,
            r#"{"rate":"-1","risk_neutral_p":"1/2"}"#,
            r#"{"rate":"1/4","risk_neutral_p":"1/2","up_factor":"2"}"#,
            r#"{"rate":"1/4","risk_neutral_p":"1/3","up_factor":"2","down_factor":"1/2"}"#,
        ] {
            assert!(serde_json::from_str::<MarketParams>(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn params_json() {
        let derived = MarketParams::from_factors(q(1, 4), q(2, 1), q(1, 2)).unwrap();
        let json = serde_json::to_string(&derived).unwrap();
        assert_eq!(
            json,
            r#"{"rate":"1/4","risk_neutral_p":"1/2","up_factor":"2","down_factor":"1/2"}"#
        );
        assert_eq!(
            serde_json::from_str::<MarketParams>(&json).unwrap(),
            derived
        );
    }

    #[test]
    fn worked_european_prices() {
        let engine = ComplexityEngine::default();
        let pricer = Pricer::new(&engine);
        let shreve = MarketParams::fair(q(1, 4)).unwrap();
        assert_eq!(pricer.european_price(2, &shreve).unwrap(), q(16, 50));
        assert!(pricer.european_price(0, &shreve).unwrap().is_zero());
        assert!(pricer.european_price(1, &shreve).unwrap().is_zero());
        let flat = MarketParams::default();
        assert_eq!(pricer.european_price(4, &flat).unwrap(), q(625, 1000));
        assert_eq!(pricer.expected_deficiency(2).unwrap(), q(1, 2));
    }

    #[test]
    fn american_tree_n4() {
        let engine = ComplexityEngine::default();
        let pricer = Pricer::new(&engine);
        let tree = pricer
            .american_price(4, &MarketParams::fair(q(1, 4)).unwrap())
            .unwrap();
        assert_eq!(tree.value(), &q(4224, 10000));
        assert_eq!(tree.node(&bs("1")).unwrap().value, q(528, 1000));
        assert_eq!(tree.node(&bs("11")).unwrap().value, q(1, 1));
        assert!(tree.node(&bs("11")).unwrap().exercise);
        assert_eq!(tree.node(&bs("111")).unwrap().value, q(12, 10));
        assert!(!tree.node(&bs("111")).unwrap().exercise);
        assert_eq!(tree.node(&bs("10")).unwrap().value, q(32, 100));
        assert_eq!(tree.node(&bs("110")).unwrap().value, q(0, 1));
        assert!(tree.node(&bs("11111")).is_none());
    }

    #[test]
    fn european_tree_matches_direct_sum() {
        let engine = ComplexityEngine::default();
        let pricer = Pricer::new(&engine);
        let params = MarketParams::new(q(1, 10), q(2, 3)).unwrap();
        for n in 0..=7 {
            let tree = pricer
                .price_tree(n, &params, OptionStyle::European)
                .unwrap();
            assert_eq!(
                tree.value(),
                &pricer.european_price(n, &params).unwrap(),
                "n={n}"
            );
        }
    }

    #[test]
    fn decision_problem() {
        let engine = ComplexityEngine::default();
        let pricer = Pricer::new(&engine);
        assert!(pricer.price_decision(2, 2).unwrap());
        assert!(!pricer.price_decision(2, 3).unwrap());
        assert!(pricer.price_decision(1, 0).unwrap());
        assert!(pricer.price_decision(1, 5).is_err());
    }

    #[test]
    fn bound_values() {
        assert_eq!(exercise_bound(4, &q(1, 4)), q(8192, 10000));
        assert_eq!(exercise_bound(5, &q(1, 4)), q(8192, 10000));
        assert!(exercise_bound(0, &q(1, 4)).is_zero());
        assert!(exercise_bound(3, &q(1, 4)) < exercise_bound(4, &q(1, 4)));
        assert!(exercise_bound(6, &q(1, 4)) < exercise_bound(5, &q(1, 4)));
    }

    #[test]
    fn limit_is_enforced() {
        let engine = ComplexityEngine::default();
        let pricer = Pricer::new(&engine).with_limit(3);
        assert!(pricer
            .american_price(4, &MarketParams::default())
            .unwrap_err()
            .is_limit());
        assert!(pricer.expected_deficiency(4).unwrap_err().is_limit());
    }

    #[test]
    fn tree_json_shape() {
        let engine = ComplexityEngine::default();
        let tree = Pricer::new(&engine)
            .american_price(2, &MarketParams::fair(q(1, 4)).unwrap())
            .unwrap();
        let json = tree.to_json(4);
        assert_eq!(json["style"], "american");
        assert_eq!(json["nodes"].as_object().unwrap().len(), 7);
        assert_eq!(json["nodes"]["00"]["payoff"], 1);
        assert_eq!(json["nodes"]["00"]["continuation"], Value::Null);
        assert_eq!(json["value"], 0.32);
    }
}
