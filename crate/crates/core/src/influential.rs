//! k-influential sets: agents who would rank among the top `k` after
//! hiding all of their out-edges.
//!
//! Hiding *all* of `E_i` is the strongest rank-improving move available to
//! `i`: its own progeny never depends on its out-edges, and every rival's
//! progeny can only shrink as more edges disappear. Membership is therefore
//! decided on `G' = (N, E \ E_i)` alone.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{beats, AgentId, Closure, Dag, RankingSequence};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InfluentialSet {
    pub k: usize,
    /// Ordered by `≻` of the original graph, highest first.
    pub members: Vec<AgentId>,
}

impl InfluentialSet {
    pub fn contains(&self, agent: AgentId) -> bool {
        self.members.contains(&agent)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn last(&self) -> AgentId {
        *self
            .members
            .last()
            .expect("influential sets are never empty")
    }
}

/// Everything the mechanisms need about one graph, computed once.
#[derive(Debug, Clone)]
pub struct InfluenceProfile {
    pub closure: Closure,
    pub counts: Vec<usize>,
    pub ranking: RankingSequence,
    pub s1: InfluentialSet,
    pub s2: InfluentialSet,
}

impl InfluenceProfile {
    pub fn new(g: &Dag) -> Self {
        let closure = Closure::new(g);
        let counts = closure.counts();
        let ranking = RankingSequence::from_counts(&counts);
        let superiors: Vec<usize> = g
            .agents()
            .map(|i| superiors_after_hiding(g, &closure, &counts, i, 2))
            .collect();
        let select = |k: usize| InfluentialSet {
            k,
            members: ranking
                .order
                .iter()
                .copied()
                .filter(|&i| superiors[(i - 1) as usize] < k)
                .collect(),
        };
        let s1 = select(1);
        let s2 = select(2);
        Self {
            closure,
            counts,
            ranking,
            s1,
            s2,
        }
    }

    /// `|P(i)|` in the original graph.
    pub fn progeny(&self, i: AgentId) -> usize {
        self.counts[(i - 1) as usize]
    }

    pub fn set(&self, k: usize) -> Result<&InfluentialSet> {
        match k {
            1 => Ok(&self.s1),
            2 => Ok(&self.s2),
            _ => Err(Error::UnsupportedK(k)),
        }
    }
}

/// Number of agents ranked strictly above `i` once `i` hides every
/// out-edge, saturating at `cap`.
fn superiors_after_hiding(
    g: &Dag,
    closure: &Closure,
    counts: &[usize],
    i: AgentId,
    cap: usize,
) -> usize {
    let mut superiors = 0;
    let mut affected = false;
    // Agents outside i's reach keep their progeny.
    for j in g.agents().filter(|&j| j != i) {
        if closure.contains(j, i) {
            affected = true;
        } else if beats(counts, j, i) {
            superiors += 1;
            if superiors >= cap {
                return cap;
            }
        }
    }
    if affected {
        let reduced = Closure::without_out_edges(g, i).counts();
        for j in g.agents().filter(|&j| j != i && closure.contains(j, i)) {
            if beats(&reduced, j, i) {
                superiors += 1;
                if superiors >= cap {
                    return cap;
                }
            }
        }
    }
    superiors
}

/// `S^inf_k(G)` for `k ∈ {1, 2}`.
pub fn influential_set(g: &Dag, k: usize) -> Result<InfluentialSet> {
    if !(1..=2).contains(&k) {
        return Err(Error::UnsupportedK(k));
    }
    InfluenceProfile::new(g).set(k).cloned()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of auditing an influential set against its known structure.
/// A failed check means the library is wrong, not the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub k: usize,
    pub members: Vec<AgentId>,
    pub checks: Vec<StructureCheck>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &StructureCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: impl Into<String>) {
        self.checks.push(StructureCheck {
            name,
            passed,
            detail: detail.into(),
        });
    }
}

/// Audits `s` (computed from `g`) against the chain, ratio, containment and
/// decomposition properties of 1- and 2-influential sets.
pub fn check_structure(g: &Dag, s: &InfluentialSet) -> StructureReport {
    let profile = InfluenceProfile::new(g);
    let mut report = StructureReport {
        k: s.k,
        members: s.members.clone(),
        checks: Vec::new(),
    };
    let m = &s.members;
    let p = |i: AgentId| profile.progeny(i);
    let in_progeny =
        |member: AgentId, of: AgentId| member != of && profile.closure.contains(of, member);
    let top = profile.ranking.first();

    match s.k {
        1 => {
            report.push(
                "first member is i_1^*",
                m.first() == Some(&top),
                format!("first = {:?}, i_1^* = {top}", m.first()),
            );
            let broken: Vec<_> = m
                .windows(2)
                .filter(|w| !in_progeny(w[1], w[0]))
                .map(|w| (w[0], w[1]))
                .collect();
            report.push(
                "chain: i_{t+1} in P(i_t) \\ {i_t}",
                broken.is_empty(),
                format!("broken links {broken:?}"),
            );
            let head = m.first().map(|&i| p(i)).unwrap_or(0);
            let weak: Vec<_> = m
                .iter()
                .skip(1)
                .filter(|&&i| 2 * p(i) < head)
                .copied()
                .collect();
            report.push(
                "half bound: 2 P(i_t) >= P(i_1)",
                weak.is_empty(),
                format!("P(i_1) = {head}, violating members {weak:?}"),
            );
        }
        2 => {
            let s1 = &profile.s1;
            let missing: Vec<_> = s1
                .members
                .iter()
                .filter(|&&i| !s.contains(i))
                .copied()
                .collect();
            report.push(
                "S1 subset of S2",
                missing.is_empty(),
                format!("S1 members absent from S2: {missing:?}"),
            );
            let top2: Vec<AgentId> = profile.ranking.order.iter().take(2).copied().collect();
            report.push(
                "i_1^*, i_2^* lead S2",
                m.len() >= top2.len() && m[..top2.len()] == top2[..],
                format!("S2 = {m:?}, top ranks = {top2:?}"),
            );
            if g.n() >= 2 && m.len() >= 2 {
                let (i1, i2) = (m[0], m[1]);
                let tail_links_ok =
                    m.len() < 4 || m.windows(2).skip(2).all(|w| in_progeny(w[1], w[0]));
                if in_progeny(i2, i1) {
                    let ok = m.len() < 3 || (in_progeny(m[2], i2) && tail_links_ok);
                    report.push(
                        "nested case: S2 is a chain through i_2^*",
                        ok,
                        format!("S2 = {m:?}"),
                    );
                } else {
                    let ok = m.len() < 3
                        || ((in_progeny(m[2], i1) || in_progeny(m[2], i2)) && tail_links_ok);
                    report.push(
                        "split case: chain hangs off i_1^* or i_2^*",
                        ok,
                        format!("S2 = {m:?}"),
                    );
                }
            }
        }
        k => report.push("supported k", false, format!("k = {k}")),
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node() {
        let g = Dag::empty(1).unwrap();
        let s = influential_set(&g, 1).unwrap();
        assert_eq!(s.members, vec![1]);
        let report = check_structure(&g, &s);
        assert!(report.passed(), "{report:?}");
        assert_eq!(influential_set(&g, 2).unwrap().members, vec![1]);
    }

    #[test]
    fn unsupported_k() {
        let g = Dag::empty(3).unwrap();
        assert_eq!(influential_set(&g, 0), Err(Error::UnsupportedK(0)));
        assert_eq!(influential_set(&g, 3), Err(Error::UnsupportedK(3)));
    }

    #[test]
    fn isolated_pair() {
        // 2 outranks 1 on the tiebreak and 1 has nothing to hide.
        let g = Dag::empty(2).unwrap();
        assert_eq!(influential_set(&g, 1).unwrap().members, vec![2]);
        assert_eq!(influential_set(&g, 2).unwrap().members, vec![2, 1]);
    }

    #[test]
    fn chain_upper_half() {
        // 6 -> 5 -> ... -> 1; t is a member iff 7 - t >= t - 1
        let g = Dag::new(6, (2..=6).map(|t| (t, t - 1))).unwrap();
        assert_eq!(influential_set(&g, 1).unwrap().members, vec![1, 2, 3, 4]);
        let s2 = influential_set(&g, 2).unwrap();
        assert!(check_structure(&g, &s2).passed());
    }

    #[test]
    fn broken_set_is_reported() {
        let g = Dag::new(3, [(3, 2), (2, 1)]).unwrap();
        let bogus = InfluentialSet {
            k: 1,
            members: vec![1, 3],
        };
        let report = check_structure(&g, &bogus);
        // 3 is in P(1), but 2 * P(3) = 2 < 3
        assert!(!report.passed());
        assert_eq!(report.failures().count(), 1);
    }
}
