#![no_main]

use cxo_core::MarketParams;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = serde_json::from_slice::<MarketParams>(data) {
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<MarketParams>(&json).unwrap(), m);
    }
});
