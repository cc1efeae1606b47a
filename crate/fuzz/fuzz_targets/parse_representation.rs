#![no_main]

use digitfn::regular::io::{representation_from_json, representation_to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    let Ok(rep) = representation_from_json(s) else { return };
    let again = representation_from_json(&representation_to_json(&rep)).expect("printed representation parses");
    assert_eq!(again.dim(), rep.dim());
    for n in 0..16 {
        assert_eq!(again.eval(n), rep.eval(n));
    }
    let _ = rep.minimize();
});
