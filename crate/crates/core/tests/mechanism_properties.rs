mod common;

use std::f64::consts::LN_2;

use common::{influential_bruteforce, progeny_counts};
use progeny_core::generators::{
    enumerate_dags, figure1_fixture, figure4_fixture, two_star, two_star_hubs, FIGURE1_MARKED,
    FIGURE4_MARKED,
};
use progeny_core::mechanisms::PROB_TOLERANCE;
use progeny_core::{beta_lm, lald, ldm, AgentId, Dag, Mechanism, OPTIMAL_BETA};

const BETAS: [f64; 5] = [0.0, 0.3, 0.5, OPTIMAL_BETA, 1.0];

fn small_dags() -> impl Iterator<Item = Dag> {
    (1..=5).flat_map(|n| enumerate_dags(n).unwrap())
}

fn log_mass(counts: &[usize], a: AgentId, b: AgentId, beta: f64) -> f64 {
    (1.0 - beta) * (counts[(a - 1) as usize] as f64 / counts[(b - 1) as usize] as f64).log2()
}

/// Closed-form β-LM marginals over a `≻`-ordered chain, from the mechanism box.
fn lm_closed_form(chain: &[AgentId], counts: &[usize], beta: f64, n: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    let m = chain.len();
    x[(chain[m - 1] - 1) as usize] = beta;
    for t in 0..m - 1 {
        x[(chain[t] - 1) as usize] = log_mass(counts, chain[t], chain[t + 1], beta);
    }
    x
}

fn assert_close(got: &[f64], want: &[f64], ctx: &dyn std::fmt::Debug) {
    for (i, (a, b)) in got.iter().zip(want).enumerate() {
        assert!(
            (a - b).abs() <= PROB_TOLERANCE,
            "agent {}: {a} vs {b} in {ctx:?}",
            i + 1
        );
    }
}

#[test]
fn distributions_are_valid_everywhere() {
    for g in small_dags() {
        for beta in BETAS {
            beta_lm(&g, beta).unwrap().validate().unwrap();
        }
        ldm(&g).validate().unwrap();
        lald(&g).validate().unwrap();
    }
}

#[test]
fn marginals_match_closed_forms() {
    for g in small_dags() {
        let n = g.n();
        let counts = progeny_counts(n, g.edges());
        let s1 = influential_bruteforce(&g, 1);
        let s2 = influential_bruteforce(&g, 2);

        for beta in BETAS {
            let got = beta_lm(&g, beta).unwrap().marginals();
            assert_close(&got, &lm_closed_form(&s1, &counts, beta, n), &g);
        }

        let mut want = vec![0.0; n];
        for &i in s1.iter().rev().take(2) {
            want[(i - 1) as usize] = 1.0;
        }
        assert_close(&ldm(&g).marginals(), &want, &g);

        let last = *s2.last().unwrap();
        let want = if s2 == s1 {
            let mut x = if s2.len() >= 2 {
                lm_closed_form(&s2[..s2.len() - 1], &counts, OPTIMAL_BETA, n)
            } else {
                vec![0.0; n]
            };
            x[(last - 1) as usize] = 1.0;
            x
        } else {
            let mut x = lm_closed_form(&s1, &counts, OPTIMAL_BETA, n);
            x[(last - 1) as usize] = 1.0;
            x
        };
        assert_close(&lald(&g).marginals(), &want, &g);
    }
}

#[test]
fn lm_singleton_mass_telescopes_and_stays_below_one() {
    for g in small_dags() {
        let counts = progeny_counts(g.n(), g.edges());
        let s1 = influential_bruteforce(&g, 1);
        let (first, last) = (s1[0], *s1.last().unwrap());
        for beta in BETAS {
            let d = beta_lm(&g, beta).unwrap();
            let singleton: f64 = d
                .outcomes
                .iter()
                .filter(|o| o.set.len() == 1)
                .map(|o| o.p)
                .sum();
            let want = beta + log_mass(&counts, first, last, beta);
            assert!((singleton - want).abs() <= PROB_TOLERANCE, "{g:?}");
            assert!(singleton <= 1.0 + PROB_TOLERANCE);
        }
    }
}

#[test]
fn ldm_picks_the_tail_of_the_one_influential_set() {
    for g in small_dags() {
        let s1 = influential_bruteforce(&g, 1);
        let d = ldm(&g);
        assert_eq!(d.outcomes.len(), 1);
        assert_eq!(d.outcomes[0].p, 1.0);
        let mut want: Vec<AgentId> = s1.iter().rev().take(2).copied().collect();
        want.sort_unstable();
        assert_eq!(d.outcomes[0].set, want, "{g:?}");
    }
}

#[test]
fn lald_always_selects_the_last_two_influential_agent() {
    for g in small_dags() {
        let last = *influential_bruteforce(&g, 2).last().unwrap();
        let d = lald(&g);
        assert!(d.outcomes.iter().all(|o| o.set.contains(&last)), "{g:?}");
    }
}

#[test]
fn figure1_lm_example() {
    let g = figure1_fixture();
    let [i1, i2, i3, i4] = FIGURE1_MARKED.i;
    let d = beta_lm(&g, OPTIMAL_BETA).unwrap();
    let k = LN_2 / (1.0 + LN_2);
    assert!((d.marginal(i4) - 1.0 / (1.0 + LN_2)).abs() < 1e-12);
    assert!((d.marginal(i3) - k * (5.0f64 / 4.0).log2()).abs() < 1e-12);
    assert!((d.marginal(i2) - k * (6.0f64 / 5.0).log2()).abs() < 1e-12);
    assert!((d.marginal(i1) - k * (7.0f64 / 6.0).log2()).abs() < 1e-12);
    for (i, reported) in [(i4, 0.59), (i3, 0.13), (i2, 0.11), (i1, 0.09)] {
        assert!((d.marginal(i) - reported).abs() <= 0.005, "agent {i}");
    }
    assert_eq!(d.marginal(FIGURE1_MARKED.j), 0.0);
}

#[test]
fn ldm_examples() {
    let g = figure1_fixture();
    let [_, _, i3, i4] = FIGURE1_MARKED.i;
    assert_eq!(ldm(&g).prob_of(&[i3, i4]), 1.0);
    let (hub, _) = two_star_hubs(5);
    assert_eq!(ldm(&two_star(5).unwrap()).prob_of(&[hub]), 1.0);
}

#[test]
fn lald_examples() {
    let g = figure1_fixture();
    let [i1, i2, i3, i4] = FIGURE1_MARKED.i;
    let d = lald(&g);
    assert_eq!(d.marginal(i4), 1.0);
    for (i, reported) in [(i3, 0.59), (i2, 0.11), (i1, 0.09)] {
        assert!((d.marginal(i) - reported).abs() <= 0.005, "agent {i}");
    }

    let g = figure4_fixture();
    let [i1, _, _, i4] = FIGURE4_MARKED.i;
    let d = lald(&g);
    assert!((d.marginal(i4) - 1.0).abs() < 1e-12);
    assert!((d.prob_of(&[i1, i4]) - OPTIMAL_BETA).abs() < 1e-12);
    assert!((d.prob_of(&[i4]) - (1.0 - OPTIMAL_BETA)).abs() < 1e-12);
    assert_eq!(d.outcomes.len(), 2);
}

#[test]
fn mechanism_enum_agrees_with_free_functions() {
    let g = figure4_fixture();
    assert_eq!(Mechanism::Lald.run(&g).unwrap(), lald(&g));
    assert_eq!(Mechanism::Ldm.run(&g).unwrap(), ldm(&g));
    assert_eq!(
        Mechanism::optimal_lm().run(&g).unwrap(),
        beta_lm(&g, OPTIMAL_BETA).unwrap()
    );
}
