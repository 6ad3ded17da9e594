#![no_main]

use libfuzzer_sys::fuzz_target;
use progeny_core::generators::GraphFamily;

/// Keeps builds cheap; the parser itself sees every input.
const MAX_BUILD: usize = 512;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(family) = text.parse::<GraphFamily>() else {
        return;
    };
    let reparsed: GraphFamily = family.to_string().parse().expect("display round-trips");
    assert_eq!(reparsed.to_string(), family.to_string());
    let size = match family {
        GraphFamily::TwoStar { y } => y.saturating_mul(2),
        GraphFamily::LmTightChain { m } => m,
        GraphFamily::Random { n, .. } => n,
        _ => 0,
    };
    if size <= MAX_BUILD {
        let _ = family.build();
    }
});
