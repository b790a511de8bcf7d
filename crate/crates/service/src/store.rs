//! In-memory game sessions with idle expiry and JSON snapshots.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::Path;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use crate::game::{Session, SessionRecord};

struct Slot {
    session: Session,
    last_access: Instant,
}

pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Mutex<Slot>>>>,
    idle_timeout: Duration,
}

impl SessionStore {
    pub fn new(idle_timeout: Duration) -> Self {
        SessionStore {
            sessions: RwLock::new(HashMap::new()),
            idle_timeout,
        }
    }

    pub fn insert(&self, session: Session) {
        let id = session.id().to_string();
        let slot = Slot {
            session,
            last_access: Instant::now(),
        };
        self.sessions
            .write()
            .unwrap()
            .insert(id, Arc::new(Mutex::new(slot)));
    }

    /// Runs `f` on the session under its own lock. `None` if the id is
    /// unknown or the session has been idle too long.
    pub fn with<T>(&self, id: &str, f: impl FnOnce(&mut Session) -> T) -> Option<T> {
        let slot = self.sessions.read().unwrap().get(id).cloned()?;
        let mut slot = slot.lock().unwrap();
        let now = Instant::now();
        if now.duration_since(slot.last_access) > self.idle_timeout {
            drop(slot);
            self.sessions.write().unwrap().remove(id);
            return None;
        }
        slot.last_access = now;
        Some(f(&mut slot.session))
    }

    /// Drops sessions idle for longer than the timeout; returns how many.
    pub fn evict_idle(&self) -> usize {
        let now = Instant::now();
        let mut sessions = self.sessions.write().unwrap();
        let before = sessions.len();
        sessions.retain(|_, slot| {
            let slot = slot.lock().unwrap();
            now.duration_since(slot.last_access) <= self.idle_timeout
        });
        before - sessions.len()
    }

    pub fn len(&self) -> usize {
        self.sessions.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn records(&self) -> Vec<SessionRecord> {
        let slots: Vec<_> = self.sessions.read().unwrap().values().cloned().collect();
        let mut records: Vec<SessionRecord> = slots
            .iter()
            .map(|slot| slot.lock().unwrap().session.record())
            .collect();
        records.sort_by(|a, b| a.id.cmp(&b.id));
        records
    }

    /// Writes all sessions to `path` through a temporary file.
    pub fn snapshot(&self, path: &Path) -> io::Result<usize> {
        let records = self.records();
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_vec_pretty(&records)?)?;
        fs::rename(&tmp, path)?;
        Ok(records.len())
    }
}

/// Reads a snapshot; a missing file is an empty snapshot.
pub fn read_snapshot(path: &Path) -> io::Result<Vec<SessionRecord>> {
    match fs::read(path) {
        Ok(bytes) => Ok(serde_json::from_slice(&bytes)?),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Vec::new()),
        Err(e) => Err(e),
    }
}
