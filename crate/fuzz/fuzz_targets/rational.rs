#![no_main]

use libfuzzer_sys::fuzz_target;
use progeny_core::analysis::lp::{format_q, parse_q};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if text.len() > 4096 {
        return;
    }
    if let Some(x) = parse_q(text) {
        assert_eq!(parse_q(&format_q(&x)), Some(x));
    }
});
