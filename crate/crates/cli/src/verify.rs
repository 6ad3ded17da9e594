//! The `verify` suites. Each produces a summary report (JSON or per-graph
//! CSV rows) and, on failure, a witness file naming the offending graphs.

use anyhow::bail;
use progeny_core::analysis::lp::format_q;
use progeny_core::analysis::{
    audited_mechanisms, ic_sweep, ratio_floor, ratio_sweep, verify_upper_bound, IcReport,
};
use progeny_core::generators::{exhaustive_corpus, RandomCorpus};
use progeny_core::influential::StructureCheck;
use progeny_core::{check_structure, Dag, Error, InfluenceProfile, Mechanism};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::output::{csv_bytes, emit, write_json};
use crate::{Format, Status, Suite, VerifyArgs};

/// Witness entries kept per mechanism; the report still counts all of them.
const WITNESS_EXAMPLES: usize = 10;

const FLOOR_TOLERANCE: f64 = 1e-9;

pub fn run(args: VerifyArgs) -> anyhow::Result<Status> {
    let mechanism = args.mechanism.resolve()?;
    match args.suite {
        Suite::IcExhaustive => {
            let corpus = exhaustive_corpus(args.exhaustive_n)?;
            let desc = json!({ "exhaustive_n": args.exhaustive_n });
            ic_suite(&args, mechanism, &corpus, desc)
        }
        Suite::IcRandom => {
            let spec = RandomCorpus {
                count: args.count,
                max_n: args.max_n.unwrap_or(10),
                seed: args.seed,
                max_out_degree: Some(args.max_out_degree.unwrap_or(6)),
            };
            let desc = random_desc(&spec);
            ic_suite(&args, mechanism, &spec.generate()?, desc)
        }
        Suite::RatioFloors => {
            let (corpus, desc) = mixed_corpus(&args)?;
            ratio_suite(&args, mechanism, &corpus, desc)
        }
        Suite::Observations => {
            if mechanism.is_some() {
                bail!("the observations suite does not take a mechanism");
            }
            let (corpus, desc) = mixed_corpus(&args)?;
            observations_suite(&args, &corpus, desc)
        }
        Suite::UpperBound => {
            if mechanism.is_some() {
                bail!("the upper-bound suite does not take a mechanism");
            }
            upper_bound_suite(&args)
        }
    }
}

fn random_desc(spec: &RandomCorpus) -> serde_json::Value {
    json!({
        "count": spec.count,
        "max_n": spec.max_n,
        "seed": spec.seed,
        "max_out_degree": spec.max_out_degree,
    })
}

/// Exhaustive corpus followed by a seeded random one.
fn mixed_corpus(args: &VerifyArgs) -> anyhow::Result<(Vec<Dag>, serde_json::Value)> {
    let mut corpus = exhaustive_corpus(args.exhaustive_n)?;
    let spec = RandomCorpus {
        count: args.count,
        max_n: args.max_n.unwrap_or(12),
        seed: args.seed,
        max_out_degree: args.max_out_degree,
    };
    corpus.extend(spec.generate()?);
    let desc = json!({ "exhaustive_n": args.exhaustive_n, "random": random_desc(&spec) });
    Ok((corpus, desc))
}

fn finish<R: Serialize>(
    args: &VerifyArgs,
    summary: &serde_json::Value,
    header: &[&str],
    rows: &[R],
    witness: Option<serde_json::Value>,
) -> anyhow::Result<Status> {
    match args.format {
        Format::Json => write_json(args.output.as_deref(), summary)?,
        Format::Csv => emit(args.output.as_deref(), &csv_bytes(header, rows)?)?,
    }
    match witness {
        None => Ok(Status::Pass),
        Some(w) => {
            write_json(Some(&args.witness), &w)?;
            eprintln!(
                "violation found; witness written to {}",
                args.witness.display()
            );
            Ok(Status::Violation)
        }
    }
}

fn suite_name(suite: Suite) -> &'static str {
    match suite {
        Suite::IcExhaustive => "ic-exhaustive",
        Suite::IcRandom => "ic-random",
        Suite::RatioFloors => "ratio-floors",
        Suite::UpperBound => "upper-bound",
        Suite::Observations => "observations",
    }
}

fn ic_suite(
    args: &VerifyArgs,
    mechanism: Option<Mechanism>,
    corpus: &[Dag],
    corpus_desc: serde_json::Value,
) -> anyhow::Result<Status> {
    let mechanisms = mechanism.map_or_else(audited_mechanisms, |m| vec![m]);
    let sweep = ic_sweep(&mechanisms, corpus, args.budget)?;
    let per_mechanism: Vec<_> = mechanisms
        .iter()
        .map(|m| {
            let name = m.to_string();
            let failing: Vec<&IcReport> = sweep
                .failures
                .iter()
                .filter(|f| f.mechanism == name)
                .collect();
            json!({
                "mechanism": name,
                "ic_guaranteed": m.ic_guaranteed(),
                "violating_graphs": failing.len(),
                "violations": failing.iter().map(|f| f.violations.len()).sum::<usize>(),
            })
        })
        .collect();
    let summary = json!({
        "suite": suite_name(args.suite),
        "corpus": corpus_desc,
        "graphs": sweep.graphs,
        "subsets_examined": sweep.subsets_examined,
        "mechanisms": per_mechanism,
        "passed": sweep.passed(),
    });
    let witness = (!sweep.passed()).then(|| {
        let failures: Vec<_> = mechanisms
            .iter()
            .flat_map(|m| {
                let name = m.to_string();
                sweep
                    .failures
                    .iter()
                    .filter(move |f| f.mechanism == name)
                    .take(WITNESS_EXAMPLES)
            })
            .collect();
        json!({ "suite": suite_name(args.suite), "failures": failures })
    });
    finish(
        args,
        &summary,
        &["graph_hash", "mechanism", "ratio", "violations"],
        &sweep.entries,
        witness,
    )
}

#[derive(Serialize)]
struct RatioRow<'a> {
    graph_hash: &'a str,
    mechanism: &'a str,
    ratio: f64,
    violations: usize,
}

fn ratio_suite(
    args: &VerifyArgs,
    mechanism: Option<Mechanism>,
    corpus: &[Dag],
    corpus_desc: serde_json::Value,
) -> anyhow::Result<Status> {
    let mechanisms = mechanism.map_or_else(
        || vec![Mechanism::optimal_lm(), Mechanism::Ldm, Mechanism::Lald],
        |m| vec![m],
    );
    let mut reports = Vec::new();
    for m in &mechanisms {
        let Some(floor) = ratio_floor(m) else {
            bail!("{m} has no proven ratio floor to verify");
        };
        reports.push((floor, ratio_sweep(m, corpus)?));
    }
    let mut per_mechanism = Vec::new();
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for (floor, report) in &reports {
        let below: Vec<usize> = report
            .entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.ratio < floor - FLOOR_TOLERANCE)
            .map(|(idx, _)| idx)
            .collect();
        per_mechanism.push(json!({
            "mechanism": report.mechanism,
            "k": report.k,
            "floor": floor,
            "min": report.min,
            "argmin": report.argmin.as_ref().map(Dag::fingerprint),
            "below_floor": below.len(),
        }));
        if !below.is_empty() {
            let examples: Vec<_> = below
                .iter()
                .take(WITNESS_EXAMPLES)
                .map(|&idx| json!({ "graph": corpus[idx], "ratio": report.entries[idx].ratio }))
                .collect();
            failures.push(json!({
                "mechanism": report.mechanism,
                "floor": floor,
                "min": report.min,
                "argmin": report.argmin,
                "below_floor": below.len(),
                "examples": examples,
            }));
        }
        rows.extend(report.entries.iter().map(|e| RatioRow {
            graph_hash: &e.graph_hash,
            mechanism: &report.mechanism,
            ratio: e.ratio,
            violations: usize::from(e.ratio < floor - FLOOR_TOLERANCE),
        }));
    }
    let summary = json!({
        "suite": "ratio-floors",
        "corpus": corpus_desc,
        "graphs": corpus.len(),
        "tolerance": FLOOR_TOLERANCE,
        "mechanisms": per_mechanism,
        "passed": failures.is_empty(),
    });
    let witness =
        (!failures.is_empty()).then(|| json!({ "suite": "ratio-floors", "failures": failures }));
    finish(
        args,
        &summary,
        &["graph_hash", "mechanism", "ratio", "violations"],
        &rows,
        witness,
    )
}

#[derive(Serialize)]
struct ObservationRow {
    graph_hash: String,
    k: usize,
    checks: usize,
    failed: usize,
}

fn observations_suite(
    args: &VerifyArgs,
    corpus: &[Dag],
    corpus_desc: serde_json::Value,
) -> anyhow::Result<Status> {
    let audited: Vec<(ObservationRow, Vec<StructureCheck>)> = corpus
        .par_iter()
        .flat_map_iter(|g| {
            let profile = InfluenceProfile::new(g);
            let hash = g.fingerprint();
            [&profile.s1, &profile.s2]
                .into_iter()
                .map(|s| {
                    let report = check_structure(g, s);
                    let failed: Vec<StructureCheck> = report.failures().cloned().collect();
                    let row = ObservationRow {
                        graph_hash: hash.clone(),
                        k: s.k,
                        checks: report.checks.len(),
                        failed: failed.len(),
                    };
                    (row, failed)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let checks: usize = audited.iter().map(|(r, _)| r.checks).sum();
    let failing: Vec<usize> = (0..audited.len())
        .filter(|&i| audited[i].0.failed > 0)
        .collect();
    let summary = json!({
        "suite": "observations",
        "corpus": corpus_desc,
        "graphs": corpus.len(),
        "checks": checks,
        "failed_checks": audited.iter().map(|(r, _)| r.failed).sum::<usize>(),
        "passed": failing.is_empty(),
    });
    let witness = (!failing.is_empty()).then(|| {
        let examples: Vec<_> = failing
            .iter()
            .take(WITNESS_EXAMPLES)
            .map(|&i| {
                // two rows per graph, in corpus order
                json!({ "graph": corpus[i / 2], "k": audited[i].0.k, "failed": audited[i].1 })
            })
            .collect();
        json!({ "suite": "observations", "failures": examples })
    });
    let rows: Vec<ObservationRow> = audited.into_iter().map(|(r, _)| r).collect();
    finish(
        args,
        &summary,
        &["graph_hash", "k", "checks", "failed"],
        &rows,
        witness,
    )
}

fn upper_bound_suite(args: &VerifyArgs) -> anyhow::Result<Status> {
    match verify_upper_bound() {
        Ok(cert) => {
            println!("{}", format_q(&cert.lp_optimum));
            if let Some(path) = args.output.as_deref() {
                write_json(Some(path), &cert)?;
            }
            Ok(Status::Pass)
        }
        Err(Error::CertificateViolation(detail)) => {
            write_json(
                Some(&args.witness),
                &json!({ "suite": "upper-bound", "violation": detail }),
            )?;
            eprintln!("certificate check failed: {detail}");
            Ok(Status::Violation)
        }
        Err(other) => Err(other.into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_has_a_name() {
        for s in [
            Suite::IcExhaustive,
            Suite::IcRandom,
            Suite::RatioFloors,
            Suite::UpperBound,
            Suite::Observations,
        ] {
            assert!(!suite_name(s).is_empty());
        }
    }
}
