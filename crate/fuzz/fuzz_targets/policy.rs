#![no_main]

use cxo_core::Policy;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Ok(p) = s.parse::<Policy>() {
        assert_eq!(p.to_string().parse::<Policy>().unwrap(), p);
    }
});
