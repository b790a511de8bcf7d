//! HTTP service: complexity lookup, option prices and game sessions.

pub mod api;
pub mod game;
pub mod store;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use cxo_core::{ComplexityEngine, MarketParams, OptionStyle, PriceTree, Pricer};

pub use api::router;
use game::{Session, SessionRecord};
use store::SessionStore;

pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(30 * 60);

#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

struct Inner {
    engine: ComplexityEngine,
    limit: usize,
    sessions: SessionStore,
    trees: Mutex<HashMap<String, Arc<PriceTree>>>,
}

impl AppState {
    pub fn new(engine: ComplexityEngine, limit: usize, idle_timeout: Duration) -> Self {
        AppState {
            inner: Arc::new(Inner {
                engine,
                limit,
                sessions: SessionStore::new(idle_timeout),
                trees: Mutex::new(HashMap::new()),
            }),
        }
    }

    pub fn engine(&self) -> &ComplexityEngine {
        &self.inner.engine
    }

    pub fn pricer(&self) -> Pricer<'_> {
        Pricer::new(&self.inner.engine).with_limit(self.inner.limit)
    }

    pub fn sessions(&self) -> &SessionStore {
        &self.inner.sessions
    }

    /// American tree for a game, shared between sessions with the same terms.
    pub fn game_tree(&self, n: usize, params: &MarketParams) -> cxo_core::Result<Arc<PriceTree>> {
        let key = format!(
            "{n}|{}",
            serde_json::to_string(params).expect("params serialize")
        );
        if let Some(tree) = self.inner.trees.lock().unwrap().get(&key) {
            return Ok(tree.clone());
        }
        let tree = Arc::new(self.pricer().price_tree(n, params, OptionStyle::American)?);
        self.inner
            .trees
            .lock()
            .unwrap()
            .entry(key)
            .or_insert(tree.clone());
        Ok(tree)
    }

    /// Reinstates snapshotted sessions; returns how many were restored.
    /// Records whose terms no longer fit the limit are dropped.
    pub fn restore(&self, records: Vec<SessionRecord>) -> usize {
        let mut restored = 0;
        for record in records {
            if let Ok(tree) = self.game_tree(record.n, &record.params) {
                self.sessions().insert(Session::restore(record, tree));
                restored += 1;
            }
        }
        restored
    }
}
