#![no_main]

use cxo_core::cache::parse_record;
use cxo_core::complexity::max_complexity;
use cxo_core::AnCache;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let (cache, stats) = AnCache::from_reader(data).unwrap();
    let lines = data.split(|&b| b == b'\n').count();
    assert!(stats.loaded + stats.skipped <= lines);
    assert!(cache.len() <= stats.loaded);
    for line in data.split(|&b| b == b'\n') {
        if let Some((key, value)) = std::str::from_utf8(line).ok().and_then(parse_record) {
            assert_eq!(key.canonical(), key);
            assert!(value >= 1 && value <= max_complexity(key.len()));
            assert!(cache.get(&key).is_some());
        }
    }
});
