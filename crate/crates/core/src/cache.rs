//! Memo table for A_N keyed by the canonical form of a string.
//!
//! The on-disk format is one record per line, `canonical_string, A_N`,
//! appended as values are computed. Lines that do not parse, or whose key is
//! not canonical, or whose value is out of range, are skipped on load; this
//! covers a record torn by a crash mid-write.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use crate::bits::BitString;
use crate::complexity::max_complexity;
use crate::error::Result;

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct LoadStats {
    pub loaded: usize,
    pub skipped: usize,
}

#[derive(Debug, Default)]
pub struct AnCache {
    map: RwLock<HashMap<BitString, usize>>,
    sink: Option<Mutex<File>>,
    path: Option<PathBuf>,
}

impl AnCache {
    /// An in-memory cache.
    pub fn new() -> Self {
        AnCache::default()
    }

    /// Loads `path` if it exists and appends new records to it.
    pub fn open(path: impl AsRef<Path>) -> Result<(Self, LoadStats)> {
        let path = path.as_ref();
        let (map, stats) = if path.exists() {
            read_records(BufReader::new(File::open(path)?))?
        } else {
            (HashMap::new(), LoadStats::default())
        };
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        // A torn last record has no newline; start ours on a fresh line.
        if stats.skipped > 0 {
            file.write_all(b"\n")?;
        }
        Ok((
            AnCache {
                map: RwLock::new(map),
                sink: Some(Mutex::new(file)),
                path: Some(path.to_path_buf()),
            },
            stats,
        ))
    }

    /// An in-memory cache seeded from records in the on-disk format.
    pub fn from_reader(reader: impl BufRead) -> Result<(Self, LoadStats)> {
        let (map, stats) = read_records(reader)?;
        Ok((
            AnCache {
                map: RwLock::new(map),
                ..AnCache::default()
            },
            stats,
        ))
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, x: &BitString) -> Option<usize> {
        let key = x.canonical();
        self.map
            .read()
            .expect("cache lock poisoned")
            .get(&key)
            .copied()
    }

    pub fn insert(&self, x: &BitString, complexity: usize) -> Result<()> {
        let key = x.canonical();
        let fresh = self
            .map
            .write()
            .expect("cache lock poisoned")
            .insert(key.clone(), complexity)
            .is_none();
        if fresh {
            if let Some(sink) = &self.sink {
                let line = format!("{key}, {complexity}\n");
                sink.lock()
                    .expect("cache file lock poisoned")
                    .write_all(line.as_bytes())?;
            }
        }
        Ok(())
    }
}

fn read_records(reader: impl BufRead) -> Result<(HashMap<BitString, usize>, LoadStats)> {
    let mut map = HashMap::new();
    let mut stats = LoadStats::default();
    for line in reader.split(b'\n') {
        let line = line?;
        match std::str::from_utf8(&line).ok().and_then(parse_record) {
            Some((key, value)) => {
                map.insert(key, value);
                stats.loaded += 1;
            }
            None if line.iter().all(u8::is_ascii_whitespace) => {}
            None => stats.skipped += 1,
        }
    }
    Ok((map, stats))
}

/// Parses one `canonical_string, A_N` record. `None` for anything that is
/// not a well-formed, canonical, in-range record.
pub fn parse_record(line: &str) -> Option<(BitString, usize)> {
    let (key, value) = line.split_once(',')?;
    let key = key.trim();
    if !key.bytes().all(|c| c == b'0' || c == b'1') {
        return None;
    }
    let key = BitString::parse(key).ok()?;
    let value: usize = value.trim().parse().ok()?;
    if key.canonical() != key || value == 0 || value > max_complexity(key.len()) {
        return None;
    }
    Some((key, value))
}
