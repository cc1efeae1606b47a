#![no_main]

use digitfn::digits::parse_block;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: (u8, &str)| {
    let (q, s) = data;
    let q = 2 + q as u32 % 15;
    if let Ok(block) = parse_block(s, q) {
        assert_eq!(block.len(), s.chars().count());
        assert!(block.iter().all(|&d| d < q));
    }
});
