#![no_main]

use digitfn::value::{format_rational, parse_rational};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Ok(x) = parse_rational(s) {
        assert_eq!(parse_rational(&format_rational(&x)).expect("printed rational parses"), x);
    }
});
