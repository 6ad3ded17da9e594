#![no_main]

use libfuzzer_sys::fuzz_target;
use progeny_core::{Dag, Mechanism};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(g) = Dag::from_json(text) else {
        return;
    };
    // accepted graphs round-trip and are safe to run mechanisms on
    assert_eq!(Dag::from_json(&g.to_json()).unwrap(), g);
    if g.n() <= 64 {
        for m in [Mechanism::optimal_lm(), Mechanism::Ldm, Mechanism::Lald] {
            let d = m.run(&g).unwrap();
            assert!(d.validate().is_ok());
        }
    }
});
