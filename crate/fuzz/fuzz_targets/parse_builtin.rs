#![no_main]

use digitfn::funcs::Builtin;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    let Ok(b) = s.parse::<Builtin>() else { return };
    assert_eq!(b.to_string().parse::<Builtin>().expect("name parses"), b);
    let f = b.spec().expect("parsed builtins have a spec");
    for n in 0..32 {
        let _ = f.eval(n);
    }
});
