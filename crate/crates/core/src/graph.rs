//! Immutable labeled DAGs and progeny (in-reachability).
//!
//! An edge `(i, j)` means *agent `i` follows agent `j`*. Influence flows
//! against the edge direction: the **progeny** of `j` is the set of agents
//! that have a directed path *to* `j`, plus `j` itself. This is the reverse
//! of the usual "descendants" reading, so `P(j)` collects the ancestors of
//! `j` in graph terms.
//!
//! Agents are 1-based ids `1..=n` on every public surface. Internal storage
//! is 0-based.

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub type AgentId = u32;
pub type Edge = (AgentId, AgentId);

/// Largest accepted graph. Adjacency is allocated up front, so this bounds
/// what a malformed `n` in untrusted JSON can cost.
pub const MAX_AGENTS: usize = 1 << 20;

/// Wire format of a graph: `{"n": <int>, "edges": [[i, j], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<Edge>,
}

/// A validated directed acyclic graph. Never mutated after construction.
#[derive(Clone)]
pub struct Dag {
    n: usize,
    /// Sorted, deduplicated, 1-based.
    edges: Vec<Edge>,
    out_adj: Vec<Vec<u32>>,
    in_adj: Vec<Vec<u32>>,
    topo: Vec<u32>,
}

impl Dag {
    /// Validates and builds a graph on agents `1..=n`.
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        if n > MAX_AGENTS {
            return Err(Error::TooManyAgents { n, max: MAX_AGENTS });
        }
        let mut seen = BTreeSet::new();
        for (i, j) in edges {
            for id in [i, j] {
                if id == 0 || id as usize > n {
                    return Err(Error::IdOutOfRange { id, n });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            if !seen.insert((i, j)) {
                return Err(Error::DuplicateEdge(i, j));
            }
        }
        let edges: Vec<Edge> = seen.into_iter().collect();
        let (out_adj, in_adj) = adjacency(n, &edges);
        let topo = match topological_order(n, &out_adj, &in_adj) {
            Ok(order) => order,
            Err(remaining) => {
                let (u, v) = cycle_edge(&in_adj, &remaining);
                return Err(Error::CyclicGraph(u + 1, v + 1));
            }
        };
        Ok(Self {
            n,
            edges,
            out_adj,
            in_adj,
            topo,
        })
    }

    /// Graph with `n` agents and no edges.
    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, [])
    }

    /// Rebuilds from a subset of this graph's edges; the existing
    /// topological order remains valid so no cycle check is needed.
    fn with_edges(&self, edges: Vec<Edge>) -> Self {
        let (out_adj, in_adj) = adjacency(self.n, &edges);
        Self {
            n: self.n,
            edges,
            out_adj,
            in_adj,
            topo: self.topo.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> + Clone {
        1..=self.n as AgentId
    }

    pub fn check_agent(&self, id: AgentId) -> Result<()> {
        if id == 0 || id as usize > self.n {
            Err(Error::IdOutOfRange { id, n: self.n })
        } else {
            Ok(())
        }
    }

    /// `E_i`: the edges leaving `i`, in ascending target order.
    pub fn out_edges(&self, i: AgentId) -> Result<Vec<Edge>> {
        self.check_agent(i)?;
        Ok(self.out_adj[(i - 1) as usize]
            .iter()
            .map(|&j| (i, j + 1))
            .collect())
    }

    pub fn out_degree(&self, i: AgentId) -> usize {
        self.out_adj[(i - 1) as usize].len()
    }

    pub fn max_out_degree(&self) -> usize {
        self.out_adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, i: AgentId, j: AgentId) -> bool {
        self.edges.binary_search(&(i, j)).is_ok()
    }

    /// Agents in a topological order (every follower before the agent it follows).
    pub fn topological_order(&self) -> Vec<AgentId> {
        self.topo.iter().map(|&v| v + 1).collect()
    }

    /// `P(i)` by a breadth-first walk over in-edges.
    pub fn progeny(&self, i: AgentId) -> Result<ProgenySet> {
        self.check_agent(i)?;
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::new();
        let start = (i - 1) as usize;
        seen[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &u in &self.in_adj[v] {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    queue.push_back(u as usize);
                }
            }
        }
        let members: BTreeSet<AgentId> = seen
            .iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(v, _)| v as AgentId + 1)
            .collect();
        Ok(ProgenySet {
            agent: i,
            count: members.len(),
            members,
        })
    }

    /// The ranking sequence `i_1^* ≻ i_2^* ≻ ... ≻ i_n^*`.
    pub fn ranking(&self) -> RankingSequence {
        RankingSequence::from_counts(&Closure::new(self).counts())
    }

    /// Returns the graph in which agent `i` has hidden `subset ⊆ E_i`.
    pub fn hide_edges(&self, i: AgentId, subset: &[Edge]) -> Result<Dag> {
        self.check_agent(i)?;
        for &(a, b) in subset {
            if a != i || !self.has_edge(a, b) {
                return Err(Error::NotAnOutEdge(i, a, b));
            }
        }
        let hidden: BTreeSet<Edge> = subset.iter().copied().collect();
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|e| !hidden.contains(e))
            .collect();
        Ok(self.with_edges(edges))
    }

    /// `G' = (N, E \ E_i)`.
    pub fn without_out_edges(&self, i: AgentId) -> Result<Dag> {
        let all = self.out_edges(i)?;
        self.hide_edges(i, &all)
    }

    /// Renames every agent `a` to `perm[a - 1]`. `perm` must be a permutation of `1..=n`.
    pub fn relabel(&self, perm: &[AgentId]) -> Result<Dag> {
        let mut check = perm.to_vec();
        check.sort_unstable();
        if check.len() != self.n || check.iter().enumerate().any(|(k, &v)| v as usize != k + 1) {
            return Err(Error::InvalidSize(format!(
                "relabeling is not a permutation of 1..={}",
                self.n
            )));
        }
        let map = |a: AgentId| perm[(a - 1) as usize];
        Dag::new(self.n, self.edges.iter().map(|&(a, b)| (map(a), map(b))))
    }

    pub fn to_graph_json(&self) -> GraphJson {
        GraphJson {
            n: self.n,
            edges: self.edges.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_graph_json()).expect("graph JSON is always serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: GraphJson = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
        Self::try_from(raw)
    }

    /// Short stable fingerprint of the canonical JSON encoding.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.to_json().as_bytes());
        hex::encode(&digest[..8])
    }
}

impl TryFrom<GraphJson> for Dag {
    type Error = Error;

    fn try_from(raw: GraphJson) -> Result<Self> {
        Dag::new(raw.n, raw.edges)
    }
}

impl Serialize for Dag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_graph_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Dag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GraphJson::deserialize(d)?;
        Dag::try_from(raw).map_err(serde::de::Error::custom)
    }
}

impl PartialEq for Dag {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl Eq for Dag {}

impl fmt::Debug for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dag(n={}, edges={:?})", self.n, self.edges)
    }
}

fn adjacency(n: usize, edges: &[Edge]) -> (Vec<Vec<u32>>, Vec<Vec<u32>>) {
    let mut out_adj = vec![Vec::new(); n];
    let mut in_adj = vec![Vec::new(); n];
    for &(i, j) in edges {
        out_adj[(i - 1) as usize].push(j - 1);
        in_adj[(j - 1) as usize].push(i - 1);
    }
    (out_adj, in_adj)
}

/// Kahn's algorithm. On failure returns the mask of nodes never released.
fn topological_order(
    n: usize,
    out_adj: &[Vec<u32>],
    in_adj: &[Vec<u32>],
) -> std::result::Result<Vec<u32>, Vec<bool>> {
    let mut indeg: Vec<usize> = in_adj.iter().map(Vec::len).collect();
    let mut queue: VecDeque<u32> = (0..n as u32).filter(|&v| indeg[v as usize] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &out_adj[v as usize] {
            indeg[w as usize] -= 1;
            if indeg[w as usize] == 0 {
                queue.push_back(w);
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        Err(indeg.iter().map(|&d| d > 0).collect())
    }
}

/// Every node left over by Kahn's algorithm has a left-over predecessor, so
/// walking predecessors must revisit a node; the closing step is a cycle edge.
fn cycle_edge(in_adj: &[Vec<u32>], remaining: &[bool]) -> (u32, u32) {
    let start = remaining.iter().position(|&r| r).expect("cycle exists");
    let mut visited = vec![false; remaining.len()];
    let mut v = start as u32;
    loop {
        visited[v as usize] = true;
        let u = *in_adj[v as usize]
            .iter()
            .find(|&&u| remaining[u as usize])
            .expect("remaining node has a remaining predecessor");
        if visited[u as usize] {
            return (u, v);
        }
        v = u;
    }
}

/// `P(i, G)` together with its size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProgenySet {
    pub agent: AgentId,
    pub members: BTreeSet<AgentId>,
    pub count: usize,
}

/// Progeny sets of every agent at once, as bitsets, via one pass in
/// topological order.
#[derive(Debug, Clone)]
pub struct Closure {
    progeny: Vec<FixedBitSet>,
}

impl Closure {
    pub fn new(g: &Dag) -> Self {
        Self::build(g, None)
    }

    /// Closure of `(N, E \ E_i)` without materializing that graph.
    pub fn without_out_edges(g: &Dag, i: AgentId) -> Self {
        Self::build(g, Some((i - 1) as usize))
    }

    fn build(g: &Dag, muted: Option<usize>) -> Self {
        let n = g.n;
        let mut progeny = vec![FixedBitSet::new(); n];
        for &v in &g.topo {
            let v = v as usize;
            let mut set = FixedBitSet::with_capacity(n);
            set.insert(v);
            for &u in &g.in_adj[v] {
                if Some(u as usize) != muted {
                    set.union_with(&progeny[u as usize]);
                }
            }
            progeny[v] = set;
        }
        Self { progeny }
    }

    pub fn n(&self) -> usize {
        self.progeny.len()
    }

    /// `|P(i)|`.
    pub fn count(&self, i: AgentId) -> usize {
        self.progeny[(i - 1) as usize].count_ones(..)
    }

    /// Whether `member ∈ P(of)`.
    pub fn contains(&self, of: AgentId, member: AgentId) -> bool {
        self.progeny[(of - 1) as usize].contains((member - 1) as usize)
    }

    /// Progeny counts indexed by `agent - 1`.
    pub fn counts(&self) -> Vec<usize> {
        self.progeny.iter().map(|s| s.count_ones(..)).collect()
    }

    pub fn members(&self, i: AgentId) -> BTreeSet<AgentId> {
        self.progeny[(i - 1) as usize]
            .ones()
            .map(|v| v as AgentId + 1)
            .collect()
    }
}

/// The strict order `≻`: larger progeny first, ties go to the larger id.
pub fn rank_cmp(counts: &[usize], a: AgentId, b: AgentId) -> Ordering {
    let (pa, pb) = (counts[(a - 1) as usize], counts[(b - 1) as usize]);
    pb.cmp(&pa).then(b.cmp(&a))
}

/// `a ≻ b` under the given progeny counts.
pub fn beats(counts: &[usize], a: AgentId, b: AgentId) -> bool {
    rank_cmp(counts, a, b) == Ordering::Less
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankingSequence {
    /// `order[t - 1]` is `i_t^*`.
    pub order: Vec<AgentId>,
}

impl RankingSequence {
    pub fn from_counts(counts: &[usize]) -> Self {
        let mut order: Vec<AgentId> = (1..=counts.len() as AgentId).collect();
        order.sort_by(|&a, &b| rank_cmp(counts, a, b));
        Self { order }
    }

    /// `i_t^*` for 1-based rank `t`.
    pub fn at(&self, t: usize) -> Option<AgentId> {
        t.checked_sub(1).and_then(|k| self.order.get(k).copied())
    }

    pub fn first(&self) -> AgentId {
        self.order[0]
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain4() -> Dag {
        Dag::new(4, [(4, 3), (3, 2), (2, 1)]).unwrap()
    }

    #[test]
    fn single_node_is_valid() {
        let g = Dag::new(1, []).unwrap();
        assert_eq!(g.n(), 1);
        let p = g.progeny(1).unwrap();
        assert_eq!(p.count, 1);
        assert_eq!(p.members, BTreeSet::from([1]));
        assert_eq!(g.ranking().order, vec![1]);
    }

    #[test]
    fn construction_errors_name_the_offender() {
        assert_eq!(Dag::new(2, [(1, 2), (2, 1)]), Err(Error::CyclicGraph(1, 2)));
        assert_eq!(Dag::new(3, [(2, 2)]), Err(Error::SelfLoop(2)));
        assert_eq!(
            Dag::new(3, [(1, 2), (1, 2)]),
            Err(Error::DuplicateEdge(1, 2))
        );
        assert_eq!(
            Dag::new(3, [(1, 4)]),
            Err(Error::IdOutOfRange { id: 4, n: 3 })
        );
        assert_eq!(
            Dag::new(3, [(0, 1)]),
            Err(Error::IdOutOfRange { id: 0, n: 3 })
        );
        assert_eq!(Dag::new(0, []), Err(Error::EmptyGraph));
        assert_eq!(
            Dag::from_json(r#"{"n": 18446744073709551615, "edges": []}"#),
            Err(Error::TooManyAgents {
                n: usize::MAX,
                max: MAX_AGENTS
            })
        );
    }

    #[test]
    fn reported_cycle_edge_lies_on_a_cycle() {
        // 5 -> 1 -> 2 -> 3 -> 1, 3 -> 4
        let err = Dag::new(5, [(5, 1), (1, 2), (2, 3), (3, 1), (3, 4)]).unwrap_err();
        let Error::CyclicGraph(u, v) = err else {
            panic!("expected cycle, got {err:?}");
        };
        assert!([(1, 2), (2, 3), (3, 1)].contains(&(u, v)), "({u}, {v})");
    }

    #[test]
    fn chain_progeny() {
        let g = chain4();
        let p = g.progeny(1).unwrap();
        assert_eq!(p.members, BTreeSet::from([1, 2, 3, 4]));
        assert_eq!(p.count, 4);
        assert_eq!(g.progeny(4).unwrap().count, 1);
        assert_eq!(g.progeny(5), Err(Error::IdOutOfRange { id: 5, n: 4 }));
        assert_eq!(Closure::new(&g).counts(), vec![4, 3, 2, 1]);
    }

    #[test]
    fn ties_rank_higher_id_first() {
        let g = Dag::empty(2).unwrap();
        assert_eq!(g.ranking().order, vec![2, 1]);
    }

    #[test]
    fn hide_edges_on_chain() {
        let g = chain4();
        assert_eq!(g.hide_edges(2, &[]).unwrap(), g);
        let h = g.hide_edges(2, &[(2, 1)]).unwrap();
        assert_eq!(h.progeny(1).unwrap().count, 1);
        assert_eq!(h.progeny(2).unwrap().count, 3);
        // the original is untouched
        assert_eq!(g.progeny(1).unwrap().count, 4);

        let c = g.hide_edges(3, &[(3, 2)]).unwrap();
        assert_eq!(Closure::new(&c).counts(), vec![2, 1, 2, 1]);
    }

    #[test]
    fn hide_edges_rejects_foreign_edges() {
        let g = chain4();
        assert_eq!(
            g.hide_edges(2, &[(3, 2)]),
            Err(Error::NotAnOutEdge(2, 3, 2))
        );
        assert_eq!(
            g.hide_edges(2, &[(2, 4)]),
            Err(Error::NotAnOutEdge(2, 2, 4))
        );
    }

    #[test]
    fn muted_closure_matches_materialized_graph() {
        let g = Dag::new(5, [(5, 3), (4, 3), (3, 1), (3, 2), (2, 1)]).unwrap();
        for i in g.agents() {
            let muted = Closure::without_out_edges(&g, i).counts();
            let explicit = Closure::new(&g.without_out_edges(i).unwrap()).counts();
            assert_eq!(muted, explicit, "agent {i}");
        }
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let g = chain4();
        let text = g.to_json();
        assert_eq!(text, r#"{"n":4,"edges":[[2,1],[3,2],[4,3]]}"#);
        assert_eq!(Dag::from_json(&text).unwrap(), g);
        assert!(matches!(
            Dag::from_json(r#"{"n":2,"edges":[[1,2],[2,1]]}"#),
            Err(Error::CyclicGraph(_, _))
        ));
        assert!(matches!(
            Dag::from_json(r#"{"n":2,"edges":[[1]]}"#),
            Err(Error::Json(_))
        ));
        assert!(matches!(Dag::from_json(r#"{"n":2}"#), Err(Error::Json(_))));
    }

    #[test]
    fn relabel_permutes_ids() {
        let g = chain4();
        let r = g.relabel(&[4, 3, 2, 1]).unwrap();
        assert_eq!(r.edges(), &[(1, 2), (2, 3), (3, 4)]);
        assert!(g.relabel(&[1, 1, 2, 3]).is_err());
    }
}
