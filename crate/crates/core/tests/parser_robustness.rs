use progeny_core::analysis::lp::{format_q, parse_q};
use progeny_core::generators::GraphFamily;
use progeny_core::mechanisms::parse_beta;
use progeny_core::{Dag, Mechanism};
use proptest::prelude::*;

fn family_text() -> impl Strategy<Value = String> {
    let name = prop::sample::select(vec![
        "figure1",
        "two_star",
        "figure3",
        "figure4",
        "lm_tight_chain",
        "random",
        "x",
    ]);
    let key = prop::sample::select(vec![
        "y",
        "m",
        "n",
        "p",
        "seed",
        "net",
        "max_out_degree",
        "z",
    ]);
    let value = prop_oneof![
        (0u32..40).prop_map(|v| v.to_string()),
        (0.0f64..1.2).prop_map(|v| v.to_string()),
        "[a-c]",
        ".{0,4}",
    ];
    (name, prop::collection::vec((key, value), 0..4)).prop_map(|(name, params)| {
        if params.is_empty() {
            return name.to_string();
        }
        let body: Vec<String> = params
            .into_iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        format!("{name}:{}", body.join(","))
    })
}

proptest! {
    #[test]
    fn graph_json_never_panics(text in ".{0,64}", n in 0usize..6, edges in prop::collection::vec((0u32..7, 0u32..7), 0..8)) {
        let _ = Dag::from_json(&text);
        let json = format!(r#"{{"n":{n},"edges":{:?}}}"#, edges.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>());
        if let Ok(g) = Dag::from_json(&json) {
            prop_assert_eq!(Dag::from_json(&g.to_json()).unwrap(), g);
        }
    }

    #[test]
    fn family_specs_round_trip(text in family_text()) {
        if let Ok(family) = text.parse::<GraphFamily>() {
            let again: GraphFamily = family.to_string().parse().unwrap();
            prop_assert_eq!(&again, &family);
            let _ = family.build();
        }
    }

    #[test]
    fn mechanism_specs_round_trip(beta in -0.5f64..1.5, junk in ".{0,12}") {
        for text in [format!("beta-lm({beta})"), beta.to_string(), junk.clone()] {
            if let Ok(b) = parse_beta(&text) {
                prop_assert!((0.0..=1.0).contains(&b));
            }
            if let Ok(m) = text.parse::<Mechanism>() {
                let again: Mechanism = m.to_string().parse().unwrap();
                prop_assert_eq!(again, m);
            }
        }
    }

    #[test]
    fn rationals_round_trip(num in any::<i64>(), den in any::<i64>(), junk in "[-0-9/ ]{0,12}") {
        for text in [format!("{num}/{den}"), junk.clone()] {
            if let Some(x) = parse_q(&text) {
                prop_assert_eq!(parse_q(&format_q(&x)), Some(x));
            }
        }
    }
}
