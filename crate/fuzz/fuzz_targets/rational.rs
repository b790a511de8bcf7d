#![no_main]

use cxo_core::exact::{format_decimal, parse_rational, to_fraction_string, truncate_decimal};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Ok(x) = parse_rational(s) {
        let back = parse_rational(&to_fraction_string(&x)).unwrap();
        assert_eq!(back, x);
        let ulp = parse_rational("1e-6").unwrap();
        let half = parse_rational("5e-7").unwrap();
        let rounded = parse_rational(&format_decimal(&x, 6)).unwrap() - &x;
        let truncated = parse_rational(&truncate_decimal(&x, 6)).unwrap() - &x;
        assert!(&rounded * &rounded <= &half * &half);
        assert!(&truncated * &truncated < &ulp * &ulp);
    }
});
