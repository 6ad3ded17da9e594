//! Verification machinery: expected progeny and approximation ratios, the
//! brute-force IC oracle, corpus sweeps and the exact upper-bound LP.

pub mod ic;
pub mod lp;
pub mod upper_bound;

use std::f64::consts::LN_2;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Closure, Dag};
use crate::influential::InfluenceProfile;
use crate::mechanisms::{Mechanism, SelectionDistribution, OPTIMAL_BETA};

pub use ic::{ic_check, ic_check_all, IcReport, Violation, DEFAULT_IC_BUDGET};
pub use upper_bound::{verify_upper_bound, LpCertificate};

/// Worst-case ratio of β-LM: `min{(β + (1-β)/ln 2) / 2, β}`.
pub fn lm_ratio_floor(beta: f64) -> f64 {
    (0.5 * (beta + (1.0 - beta) / LN_2)).min(beta)
}

pub const LDM_RATIO_FLOOR: f64 = 0.5;

/// `(3 + ln 2) / (4 (1 + ln 2))`.
pub const LALD_RATIO_FLOOR: f64 = (3.0 + LN_2) / (4.0 * (1.0 + LN_2));

/// Proven approximation guarantee, when one exists for the parameters.
pub fn ratio_floor(mechanism: &Mechanism) -> Option<f64> {
    match *mechanism {
        Mechanism::BetaLm { beta } if beta >= 0.5 => Some(lm_ratio_floor(beta)),
        Mechanism::BetaLm { .. } => None,
        Mechanism::Ldm => Some(LDM_RATIO_FLOOR),
        Mechanism::Lald => Some(LALD_RATIO_FLOOR),
    }
}

fn check_pairing(dist: &SelectionDistribution, g: &Dag) -> Result<()> {
    if dist.n != g.n() {
        return Err(Error::DistributionGraphMismatch {
            dist_n: dist.n,
            graph_n: g.n(),
        });
    }
    Ok(())
}

/// `E_{S ~ dist}[Σ_{i in S} P(i)]`.
pub fn expected_progeny(dist: &SelectionDistribution, g: &Dag) -> Result<f64> {
    check_pairing(dist, g)?;
    Ok(expected_with_counts(dist, &Closure::new(g).counts()))
}

fn expected_with_counts(dist: &SelectionDistribution, counts: &[usize]) -> f64 {
    dist.outcomes
        .iter()
        .map(|o| {
            let total: usize = o.set.iter().map(|&i| counts[(i - 1) as usize]).sum();
            o.p * total as f64
        })
        .sum()
}

/// Sum of the `k` largest progenies.
pub fn optimal_sum(g: &Dag, k: usize) -> Result<usize> {
    if k > g.n() {
        return Err(Error::KExceedsN { k, n: g.n() });
    }
    let mut counts = Closure::new(g).counts();
    counts.sort_unstable_by(|a, b| b.cmp(a));
    Ok(counts[..k].iter().sum())
}

/// Expected selected progeny over the best achievable total.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ratio {
    pub expected: f64,
    pub optimum: usize,
    pub value: f64,
    /// Exact value when the mechanism is deterministic on this graph.
    #[serde(skip)]
    pub exact: Option<BigRational>,
}

fn ratio_of(dist: &SelectionDistribution, counts: &[usize]) -> Ratio {
    let k = dist.k.min(counts.len());
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let optimum: usize = sorted[..k].iter().sum();
    let expected = expected_with_counts(dist, counts);
    let exact = match dist.outcomes.as_slice() {
        [only] if only.p == 1.0 => {
            let total: usize = only.set.iter().map(|&i| counts[(i - 1) as usize]).sum();
            Some(BigRational::new(BigInt::from(total), BigInt::from(optimum)))
        }
        _ => None,
    };
    Ratio {
        expected,
        optimum,
        value: expected / optimum as f64,
        exact,
    }
}

/// Approximation ratio of `mechanism` on `g`. The denominator is the best
/// total over `min(k, n)` agents, so graphs smaller than `k` stay comparable.
pub fn approx_ratio(mechanism: &Mechanism, g: &Dag) -> Result<Ratio> {
    let dist = mechanism.run(g)?;
    Ok(ratio_of(&dist, &Closure::new(g).counts()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioEntry {
    pub graph_hash: String,
    pub n: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub mechanism: String,
    pub k: usize,
    pub floor: Option<f64>,
    pub entries: Vec<RatioEntry>,
    pub min: f64,
    pub argmin: Option<Dag>,
}

impl RatioReport {
    /// Graphs whose ratio falls below `floor - tolerance`.
    pub fn below(&self, floor: f64, tolerance: f64) -> impl Iterator<Item = &RatioEntry> {
        self.entries
            .iter()
            .filter(move |e| e.ratio < floor - tolerance)
    }
}

/// Ratio of `mechanism` on every graph of `corpus`, with the minimum and a
/// graph attaining it (the first one, in corpus order).
pub fn ratio_sweep(mechanism: &Mechanism, corpus: &[Dag]) -> Result<RatioReport> {
    if let Mechanism::BetaLm { beta } = *mechanism {
        Mechanism::beta_lm(beta)?;
    }
    let entries: Vec<RatioEntry> = corpus
        .par_iter()
        .map(|g| {
            let profile = InfluenceProfile::new(g);
            let dist = mechanism.run_on(&profile, g.n());
            RatioEntry {
                graph_hash: g.fingerprint(),
                n: g.n(),
                ratio: ratio_of(&dist, &profile.counts).value,
            }
        })
        .collect();
    let argmin = entries
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.ratio.total_cmp(&b.ratio))
        .map(|(idx, _)| idx);
    Ok(RatioReport {
        mechanism: mechanism.to_string(),
        k: mechanism.k(),
        floor: ratio_floor(mechanism),
        min: argmin.map_or(f64::INFINITY, |idx| entries[idx].ratio),
        argmin: argmin.map(|idx| corpus[idx].clone()),
        entries,
    })
}

/// Per-graph summary of an IC sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IcSweepEntry {
    pub graph_hash: String,
    pub mechanism: String,
    pub ratio: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IcSweep {
    pub graphs: usize,
    pub subsets_examined: u64,
    pub entries: Vec<IcSweepEntry>,
    /// Full reports of every failing (graph, mechanism) pair.
    pub failures: Vec<IcReport>,
}

impl IcSweep {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Audits every mechanism on every graph of `corpus`, in parallel.
pub fn ic_sweep(mechanisms: &[Mechanism], corpus: &[Dag], budget: u64) -> Result<IcSweep> {
    let per_graph: Vec<(Vec<IcReport>, Vec<f64>)> = corpus
        .par_iter()
        .map(|g| {
            let reports = ic_check_all(mechanisms, g, budget)?;
            let profile = InfluenceProfile::new(g);
            let ratios = mechanisms
                .iter()
                .map(|m| ratio_of(&m.run_on(&profile, g.n()), &profile.counts).value)
                .collect();
            Ok((reports, ratios))
        })
        .collect::<Result<_>>()?;
    let mut sweep = IcSweep {
        graphs: corpus.len(),
        subsets_examined: 0,
        entries: Vec::new(),
        failures: Vec::new(),
    };
    for (reports, ratios) in per_graph {
        if let Some(first) = reports.first() {
            sweep.subsets_examined += first.subsets_examined;
        }
        for (report, ratio) in reports.into_iter().zip(ratios) {
            sweep.entries.push(IcSweepEntry {
                graph_hash: report.graph.fingerprint(),
                mechanism: report.mechanism.clone(),
                ratio,
                violations: report.violations.len(),
            });
            if !report.passed() {
                sweep.failures.push(report);
            }
        }
    }
    Ok(sweep)
}

/// The three mechanisms with proven guarantees, plus the β-LM grid used in
/// the exhaustive IC audit.
pub fn audited_mechanisms() -> Vec<Mechanism> {
    vec![
        Mechanism::BetaLm { beta: 0.5 },
        Mechanism::BetaLm { beta: OPTIMAL_BETA },
        Mechanism::BetaLm { beta: 0.75 },
        Mechanism::BetaLm { beta: 1.0 },
        Mechanism::Ldm,
        Mechanism::Lald,
    ]
}
