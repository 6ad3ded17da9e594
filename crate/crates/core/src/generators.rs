//! Fixtures, adversarial families and corpora.
//!
//! The hand-built fixtures are defined by the properties they must exhibit
//! (progeny profiles, influential-set membership), and every constructor
//! checks those properties before returning. A fixture that fails its own
//! contract panics with a diagnostic.
//!
//! # Seeded generation
//!
//! Random graphs are reproducible from a `u64` seed using only these steps,
//! so they can be regenerated outside Rust:
//!
//! 1. `rng = ChaCha8(seed)` seeded via `rand_core`'s `seed_from_u64`
//!    (PCG32 expansion of the seed into the 32-byte key).
//! 2. `below(b) = (next_u64() * b) >> 64` computed in 128 bits.
//! 3. `unit() = (next_u64() >> 11) * 2^-53`.
//! 4. A topological order is drawn by Fisher-Yates: for `i = n-1 .. 1`,
//!    swap `order[i]` with `order[below(i + 1)]`, starting from `[1..=n]`.
//! 5. For every position pair `a < b` in lexicographic order, draw `unit()`;
//!    the edge `order[a] -> order[b]` is kept when the draw is `< p` and
//!    `order[a]` is still below the out-degree cap.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{AgentId, Closure, Dag, Edge};
use crate::influential::InfluenceProfile;

/// Marked agents of a figure fixture: `i_1 ≻ i_2 ≻ i_3 ≻ i_4 ≻ j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Marked {
    pub i: [AgentId; 4],
    pub j: AgentId,
}

pub const FIGURE1_MARKED: Marked = Marked {
    i: [1, 2, 3, 4],
    j: 8,
};
pub const FIGURE4_MARKED: Marked = Marked {
    i: [1, 2, 3, 4],
    j: 12,
};

fn contract(name: &'static str, ok: bool, detail: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::FixtureContract {
            name,
            detail: detail(),
        })
    }
}

fn checked(name: &'static str, g: Result<Dag>, check: impl FnOnce(&Dag) -> Result<()>) -> Dag {
    let g = g.unwrap_or_else(|e| panic!("fixture {name} is not a DAG: {e}"));
    if let Err(e) = check(&g) {
        panic!("{e}");
    }
    g
}

/// Path `i_4 -> i_3 -> i_2 -> i_1` with three leaves following `i_4`, and an
/// isolated agent `j`. Progeny of `i_1..i_4` is `(7, 6, 5, 4)` and all four
/// form the 1-influential set.
pub fn figure1_fixture() -> Dag {
    let [i1, i2, i3, i4] = FIGURE1_MARKED.i;
    let j = FIGURE1_MARKED.j;
    let g = Dag::new(8, [(i2, i1), (i3, i2), (i4, i3), (5, i4), (6, i4), (7, i4)]);
    checked("figure1", g, |g| {
        let p = InfluenceProfile::new(g);
        let profile: Vec<usize> = FIGURE1_MARKED.i.iter().map(|&i| p.progeny(i)).collect();
        contract("figure1", profile == [7, 6, 5, 4], || {
            format!("progeny profile {profile:?}")
        })?;
        contract("figure1", p.s1.members == FIGURE1_MARKED.i, || {
            format!("S1 = {:?}", p.s1.members)
        })?;
        contract(
            "figure1",
            !p.s1.contains(j)
                && p.ranking.order.iter().position(|&a| a == i4)
                    < p.ranking.order.iter().position(|&a| a == j),
            || format!("j = {j} must rank below i_4 and stay out of S1"),
        )
    })
}

/// Hub agents of [`two_star`]: `(i_1, j)` with `i_1 > j`.
pub fn two_star_hubs(y: usize) -> (AgentId, AgentId) {
    (y as AgentId + 1, 1)
}

/// Two disjoint stars whose hubs both have progeny `y`. Hub `j = 1` owns
/// leaves `2..=y`; hub `i_1 = y + 1` owns leaves `y+2..=2y`.
pub fn two_star(y: usize) -> Result<Dag> {
    if y == 0 {
        return Err(Error::InvalidSize("two_star needs y >= 1".into()));
    }
    let (hub, other) = two_star_hubs(y);
    let y32 = y as AgentId;
    let edges = (2..=y32)
        .map(|leaf| (leaf, other))
        .chain((y32 + 2..=2 * y32).map(|leaf| (leaf, hub)));
    let g = Dag::new(2 * y, edges)?;
    let p = InfluenceProfile::new(&g);
    contract(
        "two_star",
        p.progeny(hub) == y && p.progeny(other) == y,
        || "hub progeny differs from y".into(),
    )?;
    contract("two_star", p.s1.members == [hub], || {
        format!("S1 = {:?}", p.s1.members)
    })?;
    Ok(g)
}

/// The three four-agent networks behind the two-selection upper bound:
/// (a) the chain `4 -> 3 -> 2 -> 1`, (b) (a) after agent 2 hides `(2, 1)`,
/// (c) (a) after agent 3 hides `(3, 2)`.
pub fn figure3_networks() -> (Dag, Dag, Dag) {
    let a = Dag::new(4, [(4, 3), (3, 2), (2, 1)]).expect("chain is acyclic");
    let b = a.hide_edges(2, &[(2, 1)]).expect("(2, 1) is in E_2");
    let c = a.hide_edges(3, &[(3, 2)]).expect("(3, 2) is in E_3");
    for (g, want) in [(&a, [4, 3, 2, 1]), (&b, [1, 3, 2, 1]), (&c, [2, 1, 2, 1])] {
        let got = Closure::new(g).counts();
        assert_eq!(got, want, "figure3 progeny profile of {g:?}");
    }
    (a, b, c)
}

/// Agent `i_1` with a private star of five leaves (progeny 6), and a
/// separate chain `i_4 -> i_3 -> i_2` where `i_4` has two leaves (progeny
/// 3, 4, 5 for `i_4, i_3, i_2`), plus an isolated `j`. Only `i_1` can reach
/// rank one, while `i_2, i_3, i_4` can each reach rank two.
pub fn figure4_fixture() -> Dag {
    let [i1, i2, i3, i4] = FIGURE4_MARKED.i;
    let j = FIGURE4_MARKED.j;
    let mut edges: Vec<Edge> = (5..=9).map(|leaf| (leaf, i1)).collect();
    edges.extend([(i3, i2), (i4, i3), (10, i4), (11, i4)]);
    checked("figure4", Dag::new(12, edges), |g| {
        let p = InfluenceProfile::new(g);
        contract("figure4", p.s1.members == [i1], || {
            format!("S1 = {:?}", p.s1.members)
        })?;
        contract("figure4", p.s2.members == FIGURE4_MARKED.i, || {
            format!("S2 = {:?}", p.s2.members)
        })?;
        contract("figure4", !p.closure.contains(i1, i2), || {
            "i_2 must lie outside P(i_1)".into()
        })?;
        contract(
            "figure4",
            p.ranking.order[..4] == FIGURE4_MARKED.i && !p.s2.contains(j),
            || format!("ranking prefix {:?}", &p.ranking.order[..4]),
        )
    })
}

/// Directed path `m -> m-1 -> ... -> 1`; agent `t` has progeny `m - t + 1`.
pub fn lm_tight_chain(m: usize) -> Result<Dag> {
    if m < 2 {
        return Err(Error::InvalidSize("lm_tight_chain needs m >= 2".into()));
    }
    Dag::new(m, (2..=m as AgentId).map(|t| (t, t - 1)))
}

/// Labeled DAGs on 1..=5 nodes: 1, 3, 25, 543, 29281.
pub const MAX_ENUMERATION_N: usize = 5;

/// Every labeled DAG on `n` agents exactly once. Each unordered pair is
/// absent, forward or backward; cyclic assignments are skipped.
pub fn enumerate_dags(n: usize) -> Result<DagEnumeration> {
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if n > MAX_ENUMERATION_N {
        return Err(Error::NTooLarge(n));
    }
    let pairs: Vec<Edge> = (1..=n as AgentId)
        .flat_map(|a| (a + 1..=n as AgentId).map(move |b| (a, b)))
        .collect();
    let total = 3u64.pow(pairs.len() as u32);
    Ok(DagEnumeration {
        n,
        pairs,
        next_code: 0,
        total,
    })
}

/// Every labeled DAG with `1..=max_n` agents.
pub fn exhaustive_corpus(max_n: usize) -> Result<Vec<Dag>> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        out.extend(enumerate_dags(n)?);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct DagEnumeration {
    n: usize,
    pairs: Vec<Edge>,
    next_code: u64,
    total: u64,
}

impl Iterator for DagEnumeration {
    type Item = Dag;

    fn next(&mut self) -> Option<Dag> {
        while self.next_code < self.total {
            let mut code = self.next_code;
            self.next_code += 1;
            let mut edges = Vec::new();
            for &(a, b) in &self.pairs {
                match code % 3 {
                    1 => edges.push((a, b)),
                    2 => edges.push((b, a)),
                    _ => {}
                }
                code /= 3;
            }
            if let Ok(g) = Dag::new(self.n, edges) {
                return Some(g);
            }
        }
        None
    }
}

fn below(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    ((rng.next_u64() as u128 * bound as u128) >> 64) as u64
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Random DAG: uniform topological order, each forward pair kept with
/// probability `edge_prob`. Deterministic in `seed`.
pub fn random_dag(n: usize, edge_prob: f64, seed: u64) -> Result<Dag> {
    random_dag_capped(n, edge_prob, seed, None)
}

/// [`random_dag`] with an optional cap on every agent's out-degree.
pub fn random_dag_capped(
    n: usize,
    edge_prob: f64,
    seed: u64,
    max_out_degree: Option<usize>,
) -> Result<Dag> {
    if n == 0 {
        return Err(Error::InvalidSize("random graph needs n >= 1".into()));
    }
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::BadParameter(format!(
            "edge probability {edge_prob} outside [0, 1]"
        )));
    }
    let cap = max_out_degree.unwrap_or(usize::MAX);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<AgentId> = (1..=n as AgentId).collect();
    for i in (1..n).rev() {
        let j = below(&mut rng, i as u64 + 1) as usize;
        order.swap(i, j);
    }
    let mut out_deg = vec![0usize; n + 1];
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let draw = unit(&mut rng);
            let (u, v) = (order[a], order[b]);
            if draw < edge_prob && out_deg[u as usize] < cap {
                out_deg[u as usize] += 1;
                edges.push((u, v));
            }
        }
    }
    Dag::new(n, edges)
}

/// Parameters for a seeded random corpus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomCorpus {
    pub count: usize,
    pub max_n: usize,
    pub seed: u64,
    pub max_out_degree: Option<usize>,
}

impl RandomCorpus {
    /// Graph `t` draws `n = 1 + below(max_n)`, `p = unit()` and its own
    /// seed `next_u64()` from a corpus-level generator seeded with `seed`.
    pub fn generate(&self) -> Result<Vec<Dag>> {
        if self.max_n == 0 {
            return Err(Error::InvalidSize("corpus needs max_n >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.count)
            .map(|_| {
                let n = 1 + below(&mut rng, self.max_n as u64) as usize;
                let p = unit(&mut rng);
                let seed = rng.next_u64();
                random_dag_capped(n, p, seed, self.max_out_degree)
            })
            .collect()
    }
}

/// A named, parameterized graph constructor addressable from the command line.
///
/// Text form: `name` or `name:key=value,key=value`, e.g. `two_star:y=5`,
/// `random:n=10,p=0.3,seed=42`.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphFamily {
    Figure1,
    TwoStar {
        y: usize,
    },
    Figure3 {
        network: char,
    },
    Figure4,
    LmTightChain {
        m: usize,
    },
    Random {
        n: usize,
        p: f64,
        seed: u64,
        max_out_degree: Option<usize>,
    },
}

pub const FAMILY_NAMES: &[&str] = &[
    "figure1",
    "two_star",
    "figure3",
    "figure4",
    "lm_tight_chain",
    "random",
];

impl GraphFamily {
    /// Builds a family from its name and a parameter map. Unknown or
    /// missing parameters are rejected.
    pub fn from_parts(name: &str, params: &BTreeMap<String, String>) -> Result<Self> {
        let allowed: &[&str] = match name {
            "figure1" | "figure4" => &[],
            "two_star" => &["y"],
            "figure3" => &["net"],
            "lm_tight_chain" => &["m"],
            "random" => &["n", "p", "seed", "max_out_degree"],
            _ => return Err(Error::UnknownFamily(name.to_string())),
        };
        if let Some(key) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::BadParameter(format!(
                "family {name} takes no parameter '{key}'"
            )));
        }
        let get = |key: &str| -> Result<&str> {
            params
                .get(key)
                .map(String::as_str)
                .ok_or_else(|| Error::BadParameter(format!("family {name} needs '{key}'")))
        };
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.trim()
                .parse()
                .map_err(|_| Error::BadParameter(format!("'{key}' = '{v}' is not a valid number")))
        }
        Ok(match name {
            "figure1" => GraphFamily::Figure1,
            "figure4" => GraphFamily::Figure4,
            "two_star" => GraphFamily::TwoStar {
                y: num("y", get("y")?)?,
            },
            "figure3" => {
                let net = get("net")?;
                match net {
                    "a" | "b" | "c" => GraphFamily::Figure3 {
                        network: net.chars().next().expect("non-empty"),
                    },
                    _ => {
                        return Err(Error::BadParameter(format!(
                            "figure3 net must be a, b or c, got '{net}'"
                        )))
                    }
                }
            }
            "lm_tight_chain" => GraphFamily::LmTightChain {
                m: num("m", get("m")?)?,
            },
            "random" => GraphFamily::Random {
                n: num("n", get("n")?)?,
                p: num("p", get("p")?)?,
                seed: params
                    .get("seed")
                    .map(|v| num("seed", v))
                    .transpose()?
                    .unwrap_or(0),
                max_out_degree: params
                    .get("max_out_degree")
                    .map(|v| num("max_out_degree", v))
                    .transpose()?,
            },
            _ => unreachable!(),
        })
    }

    pub fn build(&self) -> Result<Dag> {
        match *self {
            GraphFamily::Figure1 => Ok(figure1_fixture()),
            GraphFamily::TwoStar { y } => two_star(y),
            GraphFamily::Figure3 { network } => {
                let (a, b, c) = figure3_networks();
                Ok(match network {
                    'a' => a,
                    'b' => b,
                    _ => c,
                })
            }
            GraphFamily::Figure4 => Ok(figure4_fixture()),
            GraphFamily::LmTightChain { m } => lm_tight_chain(m),
            GraphFamily::Random {
                n,
                p,
                seed,
                max_out_degree,
            } => random_dag_capped(n, p, seed, max_out_degree),
        }
    }
}

impl FromStr for GraphFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = match s.split_once(':') {
            Some((name, rest)) => (name.trim(), Some(rest)),
            None => (s.trim(), None),
        };
        let mut params = BTreeMap::new();
        for item in rest
            .into_iter()
            .flat_map(|r| r.split(','))
            .filter(|i| !i.trim().is_empty())
        {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::BadParameter(format!("expected key=value, got '{item}'")))?;
            if params
                .insert(k.trim().to_string(), v.trim().to_string())
                .is_some()
            {
                return Err(Error::BadParameter(format!(
                    "parameter '{}' given twice",
                    k.trim()
                )));
            }
        }
        GraphFamily::from_parts(name, &params)
    }
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphFamily::Figure1 => write!(f, "figure1"),
            GraphFamily::TwoStar { y } => write!(f, "two_star:y={y}"),
            GraphFamily::Figure3 { network } => write!(f, "figure3:net={network}"),
            GraphFamily::Figure4 => write!(f, "figure4"),
            GraphFamily::LmTightChain { m } => write!(f, "lm_tight_chain:m={m}"),
            GraphFamily::Random {
                n,
                p,
                seed,
                max_out_degree,
            } => {
                write!(f, "random:n={n},p={p},seed={seed}")?;
                if let Some(cap) = max_out_degree {
                    write!(f, ",max_out_degree={cap}")?;
                }
                Ok(())
            }
        }
    }
}
