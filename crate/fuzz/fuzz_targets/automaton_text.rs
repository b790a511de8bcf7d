#![no_main]

use cxo_core::{Automaton, BitString};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Ok(a) = Automaton::parse_text(s) {
        let back = Automaton::parse_text(&a.to_text()).unwrap();
        assert_eq!(back, a);
        if a.num_states() <= 64 {
            for n in 0..6 {
                let _ = a.count_accepting_walks(n);
            }
            let _ = a.spells(&BitString::parse("0110").unwrap());
        }
    }
});
