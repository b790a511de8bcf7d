#![no_main]

use cxo_core::Automaton;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(a) = serde_json::from_slice::<Automaton>(data) {
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<Automaton>(&json).unwrap(), a);
        assert_eq!(Automaton::parse_text(&a.to_text()).unwrap(), a);
    }
});
