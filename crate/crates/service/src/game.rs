//! Game sessions: the player watches ticks arrive and decides when to
//! exercise a deficiency option; the optimal American policy is replayed on
//! the same ticks for scoring.

use std::sync::Arc;

use cxo_core::exact::{format_decimal, to_f64, to_fraction_string};
use cxo_core::{BitString, MarketParams, PriceTree};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Active,
    Exercised,
    Expired,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Hold,
    Exercise,
}

#[derive(Debug, PartialEq, Eq)]
pub enum GameError {
    NotActive(Status),
    NotFinished,
}

/// A discounted payoff, as a float and as an exact fraction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Amount {
    pub value: f64,
    pub display: String,
    pub exact: String,
}

impl Amount {
    pub fn new(x: &BigRational) -> Self {
        Amount {
            value: to_f64(x),
            display: format_decimal(x, 4),
            exact: to_fraction_string(x),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settlement {
    pub time: usize,
    pub deficiency: usize,
    pub payoff: Amount,
    /// True when the option was settled at expiry rather than exercised.
    pub forced: bool,
}

/// What the player may see: only ticks already revealed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameView {
    pub id: String,
    pub n: usize,
    pub time: usize,
    pub revealed: String,
    pub steps_remaining: usize,
    pub deficiency: usize,
    pub exercise_value: Amount,
    pub status: Status,
    pub settlement: Option<Settlement>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameReport {
    pub id: String,
    pub n: usize,
    pub seed: u64,
    pub params: MarketParams,
    pub ticks: String,
    pub player: Settlement,
    pub optimal: Settlement,
    pub optimal_value: Amount,
}

/// The tick sequence for `seed`; 1 (up) with probability `p`.
pub fn draw_ticks(seed: u64, n: usize, params: &MarketParams) -> BitString {
    let p = to_f64(params.p());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bits = (0..n).map(|_| rng.random_bool(p) as u8).collect();
    BitString::from_bits(bits).expect("draws are bits")
}

/// Persistent form of a session. The seed determines the undisclosed ticks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SessionRecord {
    pub id: String,
    pub n: usize,
    pub params: MarketParams,
    pub seed: u64,
    pub time: usize,
    pub status: Status,
    pub settlement: Option<Settlement>,
}

pub struct Session {
    id: String,
    seed: u64,
    ticks: BitString,
    time: usize,
    status: Status,
    settlement: Option<Settlement>,
    tree: Arc<PriceTree>,
}

impl Session {
    /// `tree` must be the American tree for the session's expiry and market.
    pub fn new(id: String, seed: u64, tree: Arc<PriceTree>) -> Self {
        let ticks = draw_ticks(seed, tree.n, &tree.params);
        let mut session = Session {
            id,
            seed,
            ticks,
            time: 0,
            status: Status::Active,
            settlement: None,
            tree,
        };
        if session.n() == 0 {
            session.settle(true);
        }
        session
    }

    /// Rebuilds a session from its record. A record left active at expiry
    /// is settled there.
    pub fn restore(record: SessionRecord, tree: Arc<PriceTree>) -> Self {
        let mut session = Session {
            ticks: draw_ticks(record.seed, tree.n, &tree.params),
            id: record.id,
            seed: record.seed,
            time: record.time.min(tree.n),
            status: record.status,
            settlement: record.settlement,
            tree,
        };
        if session.status == Status::Active && session.time == session.n() {
            session.settle(true);
        }
        session
    }

    pub fn record(&self) -> SessionRecord {
        SessionRecord {
            id: self.id.clone(),
            n: self.n(),
            params: self.tree.params.clone(),
            seed: self.seed,
            time: self.time,
            status: self.status,
            settlement: self.settlement.clone(),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn n(&self) -> usize {
        self.tree.n
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn optimal_value(&self) -> &BigRational {
        self.tree.value()
    }

    fn revealed(&self) -> BitString {
        self.ticks.prefix(self.time)
    }

    fn settlement_at(&self, time: usize, forced: bool) -> Settlement {
        let deficiency = self
            .tree
            .node(&self.ticks.prefix(time))
            .expect("time is within the tree")
            .payoff;
        let payoff =
            BigRational::from_integer(deficiency.into()) * self.tree.params.discount_to(time);
        Settlement {
            time,
            deficiency,
            payoff: Amount::new(&payoff),
            forced,
        }
    }

    fn settle(&mut self, forced: bool) {
        self.settlement = Some(self.settlement_at(self.time, forced));
        self.status = if forced {
            Status::Expired
        } else {
            Status::Exercised
        };
    }

    pub fn view(&self) -> GameView {
        let now = self.settlement_at(self.time, false);
        GameView {
            id: self.id.clone(),
            n: self.n(),
            time: self.time,
            revealed: self.revealed().to_string(),
            steps_remaining: self.n() - self.time,
            deficiency: now.deficiency,
            exercise_value: now.payoff,
            status: self.status,
            settlement: self.settlement.clone(),
        }
    }

    /// Holding reveals the next tick; holding into expiry settles there.
    pub fn step(&mut self, action: Action) -> Result<GameView, GameError> {
        if self.status != Status::Active {
            return Err(GameError::NotActive(self.status));
        }
        match action {
            Action::Exercise => self.settle(false),
            Action::Hold => {
                self.time += 1;
                if self.time == self.n() {
                    self.settle(true);
                }
            }
        }
        Ok(self.view())
    }

    /// Player result against the tree's exercise flags on the same ticks.
    pub fn report(&self) -> Result<GameReport, GameError> {
        let player = self.settlement.clone().ok_or(GameError::NotFinished)?;
        let stop = self.tree.exercise_time(&self.ticks);
        Ok(GameReport {
            id: self.id.clone(),
            n: self.n(),
            seed: self.seed,
            params: self.tree.params.clone(),
            ticks: self.ticks.to_string(),
            player,
            optimal: self.settlement_at(stop, stop == self.n()),
            optimal_value: Amount::new(self.optimal_value()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cxo_core::{ComplexityEngine, Pricer};

    fn tree(n: usize, rate: &str) -> Arc<PriceTree> {
        let engine = ComplexityEngine::default();
        let params = MarketParams::parse(rate, "1/2").unwrap();
        Arc::new(Pricer::new(&engine).american_price(n, &params).unwrap())
    }

    fn seed_with_prefix(n: usize, rate: &str, prefix: &str) -> u64 {
        let params = MarketParams::parse(rate, "1/2").unwrap();
        (0..)
            .find(|&s| draw_ticks(s, n, &params).to_string().starts_with(prefix))
            .unwrap()
    }

    #[test]
    fn exercise_after_two_zeros_pays_discounted_one() {
        let seed = seed_with_prefix(4, "1/4", "00");
        let mut s = Session::new("a".into(), seed, tree(4, "1/4"));
        s.step(Action::Hold).unwrap();
        let view = s.step(Action::Hold).unwrap();
        assert_eq!(view.revealed, "00");
        assert_eq!(view.deficiency, 1);
        let view = s.step(Action::Exercise).unwrap();
        assert_eq!(view.status, Status::Exercised);
        let settlement = view.settlement.unwrap();
        assert_eq!(settlement.payoff.exact, "16/25");
        assert_eq!(settlement.payoff.display, "0.6400");
        assert_eq!(
            s.step(Action::Hold),
            Err(GameError::NotActive(Status::Exercised))
        );
    }

    #[test]
    fn zero_expiry_is_settled_at_creation() {
        let s = Session::new("z".into(), 3, tree(0, "1/4"));
        assert_eq!(s.status(), Status::Expired);
        let report = s.report().unwrap();
        assert_eq!(report.player.payoff.value, 0.0);
        assert_eq!(report.optimal.payoff.value, 0.0);
    }

    #[test]
    fn immediate_exercise_pays_nothing() {
        let mut s = Session::new("e".into(), 11, tree(4, "1/4"));
        let view = s.step(Action::Exercise).unwrap();
        assert_eq!(view.settlement.unwrap().payoff.value, 0.0);
    }

    #[test]
    fn holding_to_the_end_forces_settlement() {
        let t = tree(5, "0");
        let mut s = Session::new("h".into(), 5, t.clone());
        for _ in 0..4 {
            assert_eq!(s.step(Action::Hold).unwrap().status, Status::Active);
        }
        let view = s.step(Action::Hold).unwrap();
        assert_eq!(view.status, Status::Expired);
        let settlement = view.settlement.unwrap();
        assert!(settlement.forced);
        assert_eq!(settlement.time, 5);
        assert_eq!(view.revealed.len(), 5);
    }

    #[test]
    fn report_requires_a_finished_game() {
        let mut s = Session::new("r".into(), 1, tree(3, "0"));
        assert_eq!(s.report().unwrap_err(), GameError::NotFinished);
        s.step(Action::Exercise).unwrap();
        assert!(s.report().is_ok());
    }

    #[test]
    fn views_never_show_future_ticks() {
        let mut s = Session::new("v".into(), 99, tree(6, "0"));
        for m in 0..6 {
            let view = s.view();
            assert_eq!(view.revealed, s.ticks.prefix(m).to_string());
            let json = serde_json::to_string(&view).unwrap();
            assert!(!json.contains("ticks") && !json.contains("seed"), "{json}");
            s.step(Action::Hold).unwrap();
        }
    }

    #[test]
    fn restore_settles_a_record_left_at_expiry() {
        let t = tree(3, "0");
        let params = t.params.clone();
        let record = SessionRecord {
            id: "x".into(),
            n: 3,
            params,
            seed: 8,
            time: 7,
            status: Status::Active,
            settlement: None,
        };
        let mut s = Session::restore(record, t);
        assert_eq!(s.status(), Status::Expired);
        assert_eq!(s.view().time, 3);
        assert!(s.step(Action::Hold).is_err());
        assert!(s.report().is_ok());
    }

    #[test]
    fn restore_reproduces_the_session() {
        let t = tree(4, "1/4");
        let mut s = Session::new("s".into(), 42, t.clone());
        s.step(Action::Hold).unwrap();
        let json = serde_json::to_string(&s.record()).unwrap();
        let back: SessionRecord = serde_json::from_str(&json).unwrap();
        let r = Session::restore(back, t);
        assert_eq!(r.view(), s.view());
        assert_eq!(r.ticks, s.ticks);
    }
}
