#![no_main]

use digitfn::regular::io::{transducer_from_json, transducer_to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    let Ok(t) = transducer_from_json(s) else { return };
    let again = transducer_from_json(&transducer_to_json(&t)).expect("printed transducer parses");
    for n in 0..64 {
        assert_eq!(again.eval(n), t.eval(n));
        assert_eq!(t.to_linear_representation().eval(n), t.eval(n));
    }
    for r in 0..4 {
        let _ = t.check_conditions(r);
    }
});
