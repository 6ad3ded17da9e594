#![no_main]

use libfuzzer_sys::fuzz_target;
use progeny_core::mechanisms::parse_beta;
use progeny_core::Mechanism;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(beta) = parse_beta(text) {
        assert!((0.0..=1.0).contains(&beta));
    }
    if let Ok(m) = text.parse::<Mechanism>() {
        let again: Mechanism = m.to_string().parse().expect("display round-trips");
        assert_eq!(again.k(), m.k());
    }
});
