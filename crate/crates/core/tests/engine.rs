mod common;

use std::sync::Arc;
use std::thread;

use common::{all_strings, brute_complexity, longest_run_scan};
use cxo_core::complexity::{longest_run, run_complexity};
use cxo_core::{AnCache, BitString, ComplexityEngine};
use proptest::prelude::*;

fn temp_path(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("cxo-engine-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("an.cache");
    let _ = std::fs::remove_file(&path);
    path
}

#[test]
fn cache_file_survives_a_restart() {
    let path = temp_path("restart");
    let strings: Vec<BitString> = all_strings(9)
        .into_iter()
        .map(|x| BitString::from_bits(x).unwrap())
        .collect();
    let first: Vec<usize> = {
        let (cache, stats) = AnCache::open(&path).unwrap();
        assert_eq!(stats.loaded, 0);
        let engine = ComplexityEngine::new(cache);
        strings
            .iter()
            .map(|x| engine.complexity(x).unwrap())
            .collect()
    };
    let (cache, stats) = AnCache::open(&path).unwrap();
    assert_eq!(stats.skipped, 0);
    assert_eq!(stats.loaded, cache.len());
    // One record per symmetry class.
    let classes = strings.iter().filter(|x| x.canonical() == **x).count();
    assert_eq!(cache.len(), classes);
    let engine = ComplexityEngine::new(cache).with_max_len(0);
    let second: Vec<usize> = strings
        .iter()
        .map(|x| engine.complexity(x).unwrap())
        .collect();
    assert_eq!(first, second);
}

#[test]
fn torn_and_bogus_records_are_ignored() {
    let path = temp_path("torn");
    std::fs::write(
        &path,
        "0000, 1\n0001, 2\n1111, 1\n0011, 9\nhello\n0101, 2\n000000, ",
    )
    .unwrap();
    let (cache, stats) = AnCache::open(&path).unwrap();
    assert_eq!(stats.loaded, 3);
    assert_eq!(stats.skipped, 4);
    let engine = ComplexityEngine::new(cache);
    engine
        .complexity(&BitString::parse("000000").unwrap())
        .unwrap();
    drop(engine);
    let (cache, stats) = AnCache::open(&path).unwrap();
    assert_eq!(stats.loaded, 4);
    assert_eq!(cache.get(&BitString::parse("111111").unwrap()), Some(1));
}

#[test]
fn concurrent_lookups_agree() {
    let engine = Arc::new(ComplexityEngine::default());
    let strings: Vec<Vec<u8>> = all_strings(8);
    let handles: Vec<_> = (0..4)
        .map(|t| {
            let engine = Arc::clone(&engine);
            let strings = strings.clone();
            thread::spawn(move || {
                strings
                    .iter()
                    .cycle()
                    .skip(t * 61)
                    .take(strings.len())
                    .map(|x| {
                        (
                            x.clone(),
                            engine
                                .complexity(&BitString::from_bits(x.clone()).unwrap())
                                .unwrap(),
                        )
                    })
                    .collect::<Vec<_>>()
            })
        })
        .collect();
    for h in handles {
        for (x, a) in h.join().unwrap() {
            assert_eq!(a, brute_complexity(&x), "{x:?}");
        }
    }
}

#[test]
fn budget_is_enforced() {
    let engine = ComplexityEngine::default().with_max_len(6);
    let long = BitString::parse("0110100").unwrap();
    assert!(engine.complexity(&long).unwrap_err().is_limit());
    assert!(engine.deficiency_decision(&long, 1).unwrap_err().is_limit());
    assert!(engine.deficiency_decision(&long, 0).unwrap());
}

proptest! {
    #[test]
    fn run_statistics_match_a_scan(x in prop::collection::vec(0..2u8, 1..40)) {
        let s = BitString::from_bits(x.clone()).unwrap();
        let r = longest_run_scan(&x);
        prop_assert_eq!(longest_run(&s, None), r);
        prop_assert_eq!(run_complexity(&s).unwrap(), x.len() + 1 - r);
        prop_assert_eq!(longest_run(&s, Some(1)), common::longest_heads(&x));
    }

    #[test]
    fn deficiency_decision_thresholds(x in prop::collection::vec(0..2u8, 0..=14)) {
        let engine = ComplexityEngine::default();
        let s = BitString::from_bits(x).unwrap();
        // Decide first so the search path is exercised, then compare.
        let decisions: Vec<bool> = (0..=s.len() / 2 + 2)
            .map(|k| engine.deficiency_decision(&s, k).unwrap())
            .collect();
        let d = engine.deficiency(&s).unwrap().deficiency;
        for (k, &dec) in decisions.iter().enumerate() {
            prop_assert_eq!(dec, d >= k);
        }
    }
}
