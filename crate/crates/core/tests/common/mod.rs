//! Brute-force oracles that share no code path with the library's
//! reachability or influential-set routines.

#![allow(dead_code)]

use progeny_core::{AgentId, Dag};

/// `reach[u][v]`: a directed path (possibly empty) leads from `u` to `v`.
/// Warshall's algorithm on the raw edge list.
pub fn reach_matrix(n: usize, edges: &[(AgentId, AgentId)]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for (v, row) in r.iter_mut().enumerate() {
        row[v] = true;
    }
    for &(a, b) in edges {
        r[(a - 1) as usize][(b - 1) as usize] = true;
    }
    for k in 0..n {
        let through = r[k].clone();
        for row in r.iter_mut() {
            if row[k] {
                for (cell, &via) in row.iter_mut().zip(&through) {
                    *cell |= via;
                }
            }
        }
    }
    r
}

/// Progeny counts from the reach matrix: column sums.
pub fn progeny_counts(n: usize, edges: &[(AgentId, AgentId)]) -> Vec<usize> {
    let r = reach_matrix(n, edges);
    (0..n)
        .map(|v| (0..n).filter(|&u| r[u][v]).count())
        .collect()
}

/// `a ≻ b`, spelled out literally.
pub fn naive_beats(counts: &[usize], a: AgentId, b: AgentId) -> bool {
    let (pa, pb) = (counts[(a - 1) as usize], counts[(b - 1) as usize]);
    pa > pb || (pa == pb && a > b)
}

/// Ranking by counting superiors for each agent.
pub fn naive_ranking(counts: &[usize]) -> Vec<AgentId> {
    let n = counts.len();
    let mut order = vec![0; n];
    for a in 1..=n as AgentId {
        let above = (1..=n as AgentId)
            .filter(|&b| b != a && naive_beats(counts, b, a))
            .count();
        order[above] = a;
    }
    order
}

/// Number of agents strictly above `i` after `i` hides `hidden ⊆ E_i`.
pub fn superiors_after(g: &Dag, i: AgentId, hidden: &[(AgentId, AgentId)]) -> usize {
    let edges: Vec<_> = g
        .edges()
        .iter()
        .copied()
        .filter(|e| !hidden.contains(e))
        .collect();
    let counts = progeny_counts(g.n(), &edges);
    (1..=g.n() as AgentId)
        .filter(|&j| j != i && naive_beats(&counts, j, i))
        .count()
}

/// Definition of the k-influential set, evaluated literally.
pub fn influential_bruteforce(g: &Dag, k: usize) -> Vec<AgentId> {
    let counts = progeny_counts(g.n(), g.edges());
    naive_ranking(&counts)
        .into_iter()
        .filter(|&i| {
            let all: Vec<_> = g.edges().iter().copied().filter(|&(a, _)| a == i).collect();
            superiors_after(g, i, &all) < k
        })
        .collect()
}

/// Labeled DAG counts by Robinson's recurrence
/// `a(n) = Σ_{k=1..n} (-1)^{k+1} C(n,k) 2^{k(n-k)} a(n-k)`.
pub fn labeled_dag_count(n: usize) -> i128 {
    let mut a = vec![1i128];
    for m in 1..=n {
        let mut total = 0i128;
        for k in 1..=m {
            let binom = (0..k).fold(1i128, |acc, t| acc * (m - t) as i128 / (t + 1) as i128);
            let term = binom * (1i128 << (k * (m - k))) * a[m - k];
            total += if k % 2 == 1 { term } else { -term };
        }
        a.push(total);
    }
    a[n]
}

/// Random DAG from a strictly-upper-triangular bit pattern under a
/// permutation; used to feed proptest.
pub fn dag_from_bits(n: usize, bits: &[bool], perm: &[usize]) -> Dag {
    let mut edges = Vec::new();
    let mut t = 0;
    for a in 0..n {
        for b in a + 1..n {
            if bits[t] {
                edges.push((perm[a] as AgentId + 1, perm[b] as AgentId + 1));
            }
            t += 1;
        }
    }
    Dag::new(n, edges).expect("forward edges are acyclic")
}
