//! Brute-force incentive-compatibility audit.
//!
//! For every agent `i` and every nonempty `S ⊆ E_i`, the mechanism is rerun
//! on the graph where `i` hides `S`; any rise in `x_i` above the tolerance
//! is a violation. Cost is `Σ_i 2^|E_i|` mechanism evaluations.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{AgentId, Dag, Edge};
use crate::influential::InfluenceProfile;
use crate::mechanisms::{Mechanism, PROB_TOLERANCE};

pub const DEFAULT_IC_BUDGET: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub agent: AgentId,
    pub hidden: Vec<Edge>,
    pub x_before: f64,
    pub x_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IcReport {
    pub mechanism: String,
    pub graph: Dag,
    pub subsets_examined: u64,
    pub violations: Vec<Violation>,
}

impl IcReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Number of nonempty hiding subsets the audit of `g` will examine.
pub fn subsets_needed(g: &Dag) -> u64 {
    g.agents()
        .map(|i| {
            let d = g.out_degree(i) as u32;
            if d >= 63 {
                u64::MAX
            } else {
                (1u64 << d) - 1
            }
        })
        .fold(0u64, u64::saturating_add)
}

/// Audits one mechanism on `g`.
pub fn ic_check(mechanism: &Mechanism, g: &Dag, budget: u64) -> Result<IcReport> {
    let mut reports = ic_check_all(std::slice::from_ref(mechanism), g, budget)?;
    Ok(reports.pop().expect("one report per mechanism"))
}

/// Audits several mechanisms on `g`, sharing the influence computation of
/// each manipulated graph between them.
pub fn ic_check_all(mechanisms: &[Mechanism], g: &Dag, budget: u64) -> Result<Vec<IcReport>> {
    let needed = subsets_needed(g);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    for m in mechanisms {
        if let Mechanism::BetaLm { beta } = *m {
            Mechanism::beta_lm(beta)?;
        }
    }
    let n = g.n();
    let base = InfluenceProfile::new(g);
    let before: Vec<Vec<f64>> = mechanisms
        .iter()
        .map(|m| m.run_on(&base, n).marginals())
        .collect();
    let mut reports: Vec<IcReport> = mechanisms
        .iter()
        .map(|m| IcReport {
            mechanism: m.to_string(),
            graph: g.clone(),
            subsets_examined: needed,
            violations: Vec::new(),
        })
        .collect();

    for i in g.agents() {
        let out = g.out_edges(i)?;
        let idx = (i - 1) as usize;
        for mask in 1u64..(1u64 << out.len()) {
            let hidden: Vec<Edge> = out
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let manipulated = g.hide_edges(i, &hidden)?;
            let profile = InfluenceProfile::new(&manipulated);
            for (k, m) in mechanisms.iter().enumerate() {
                let x_after = m.run_on(&profile, n).marginal(i);
                let x_before = before[k][idx];
                if x_after > x_before + PROB_TOLERANCE {
                    reports[k].violations.push(Violation {
                        agent: i,
                        hidden: hidden.clone(),
                        x_before,
                        x_after,
                    });
                }
            }
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_out_edges_means_nothing_to_examine() {
        let g = Dag::empty(3).unwrap();
        let report = ic_check(&Mechanism::Ldm, &g, 0).unwrap();
        assert_eq!(report.subsets_examined, 0);
        assert!(report.passed());
    }

    #[test]
    fn budget_is_enforced() {
        let g = Dag::new(4, [(1, 2), (1, 3), (1, 4)]).unwrap();
        assert_eq!(subsets_needed(&g), 7);
        assert_eq!(
            ic_check(&Mechanism::Ldm, &g, 6),
            Err(Error::BudgetExceeded {
                needed: 7,
                budget: 6
            })
        );
        assert!(ic_check(&Mechanism::Ldm, &g, 7).is_ok());
    }

    #[test]
    fn low_beta_is_manipulable_on_a_three_chain() {
        // 3 -> 2 -> 1: S1 = {1, 2}. Agent 2 is last and gets beta; by hiding
        // (2, 1) it becomes first of S1 = {2, 3} with (1 - beta) log2(2) > beta.
        let g = Dag::new(3, [(3, 2), (2, 1)]).unwrap();
        let report = ic_check(&Mechanism::BetaLm { beta: 0.3 }, &g, DEFAULT_IC_BUDGET).unwrap();
        assert!(!report.passed());
        let v = &report.violations[0];
        assert_eq!(v.agent, 2);
        assert_eq!(v.hidden, vec![(2, 1)]);
        assert!((v.x_before - 0.3).abs() < 1e-12);
        assert!((v.x_after - 0.7).abs() < 1e-12);
        assert!(
            ic_check(&Mechanism::BetaLm { beta: 0.5 }, &g, DEFAULT_IC_BUDGET)
                .unwrap()
                .passed()
        );
    }
}
