mod common;

use common::{influential_bruteforce, superiors_after};
use progeny_core::generators::{enumerate_dags, RandomCorpus};
use progeny_core::{check_structure, influential_set, InfluenceProfile};

#[test]
fn membership_matches_definition_on_all_small_dags() {
    for n in 1..=5 {
        for g in enumerate_dags(n).unwrap() {
            for k in [1, 2] {
                let got = influential_set(&g, k).unwrap();
                assert_eq!(got.members, influential_bruteforce(&g, k), "k={k} {g:?}");
            }
        }
    }
}

#[test]
fn hiding_everything_is_the_best_rank_move() {
    for n in 1..=5 {
        for g in enumerate_dags(n).unwrap() {
            for i in g.agents() {
                let out = g.out_edges(i).unwrap();
                let best = superiors_after(&g, i, &out);
                for mask in 0u32..(1 << out.len()) {
                    let subset: Vec<_> = out
                        .iter()
                        .enumerate()
                        .filter(|(b, _)| mask >> b & 1 == 1)
                        .map(|(_, &e)| e)
                        .collect();
                    assert!(
                        superiors_after(&g, i, &subset) >= best,
                        "agent {i} subset {subset:?} in {g:?}"
                    );
                }
            }
        }
    }
}

#[test]
fn structure_holds_on_small_dags_and_random_corpus() {
    let mut corpus = Vec::new();
    for n in 1..=5 {
        corpus.extend(enumerate_dags(n).unwrap());
    }
    corpus.extend(
        RandomCorpus {
            count: 1000,
            max_n: 12,
            seed: 7,
            max_out_degree: None,
        }
        .generate()
        .unwrap(),
    );
    for g in &corpus {
        let profile = InfluenceProfile::new(g);
        for s in [&profile.s1, &profile.s2] {
            let report = check_structure(g, s);
            assert!(
                report.passed(),
                "{g:?}: {:?}",
                report.failures().collect::<Vec<_>>()
            );
        }
        if g.n() >= 2 {
            let top2 = &profile.ranking.order[..2];
            assert!(top2.iter().all(|&i| profile.s2.contains(i)));
        }
        assert!(profile.s1.contains(profile.ranking.first()));
    }
}
