#![no_main]

use cxo_core::BitString;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Ok(x) = BitString::parse(s) {
        assert!(x.len() <= s.len());
        let back = BitString::parse(&x.to_string()).unwrap();
        assert_eq!(back, x);
        assert_eq!(BitString::parse(&x.to_coins()).unwrap(), x);
        let c = x.canonical();
        assert_eq!(c.canonical(), c);
    }
});
