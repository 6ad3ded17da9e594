//! Exact check of the 23/27 ceiling for incentive-compatible two-agent
//! selection.
//!
//! Three four-agent networks are tied together by single-agent hiding moves.
//! Each move yields an IC constraint `x_{target}(to) <= x_{agent}(from)` once
//! the hidden-edge graph is matched to the target network through a
//! relabeling. Together with "at most two agents" capacity rows this gives a
//! 12-variable LP whose best achievable worst-case ratio is 23/27.

use num_traits::{One, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::lp::{dot, format_q, q, LinearProgram, LpSolution, Q};
use super::optimal_sum;
use crate::error::{Error, Result};
use crate::generators::figure3_networks;
use crate::graph::{AgentId, Closure, Dag, Edge};

pub const NETWORKS: [char; 3] = ['a', 'b', 'c'];

/// One hiding move from network (a), matched to a target network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HidingMove {
    pub agent: AgentId,
    pub hidden: Vec<Edge>,
    pub target: char,
    /// `relabel[v - 1]` is the target-network name of agent `v` after the move.
    pub relabel: [AgentId; 4],
}

impl HidingMove {
    /// The agent of the target network constrained by this move.
    pub fn target_agent(&self) -> AgentId {
        self.relabel[(self.agent - 1) as usize]
    }
}

/// The four moves used in the bound: agents 2 and 4 of (a) can produce (b);
/// agent 3 of (a) produces (c), which is symmetric under swapping its two
/// components.
pub fn hiding_moves() -> Vec<HidingMove> {
    vec![
        HidingMove {
            agent: 2,
            hidden: vec![(2, 1)],
            target: 'b',
            relabel: [1, 2, 3, 4],
        },
        HidingMove {
            agent: 4,
            hidden: vec![(4, 3)],
            target: 'b',
            relabel: [2, 3, 4, 1],
        },
        HidingMove {
            agent: 3,
            hidden: vec![(3, 2)],
            target: 'c',
            relabel: [1, 2, 3, 4],
        },
        HidingMove {
            agent: 3,
            hidden: vec![(3, 2)],
            target: 'c',
            relabel: [3, 4, 1, 2],
        },
    ]
}

/// Selection probabilities `x_i` for agents 1..=4 in each of the networks.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment(pub [[Q; 4]; 3]);

impl Assignment {
    pub fn zeros() -> Self {
        Assignment(std::array::from_fn(|_| std::array::from_fn(|_| Q::zero())))
    }

    pub fn get(&self, network: char, agent: AgentId) -> &Q {
        &self.0[network_index(network)][(agent - 1) as usize]
    }

    fn from_flat(x: &[Q]) -> Self {
        Assignment(std::array::from_fn(|g| {
            std::array::from_fn(|i| x[4 * g + i].clone())
        }))
    }
}

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(3))?;
        for (g, name) in NETWORKS.iter().enumerate() {
            let row: Vec<String> = self.0[g].iter().map(format_q).collect();
            map.serialize_entry(&name.to_string(), &row)?;
        }
        map.end()
    }
}

fn network_index(network: char) -> usize {
    NETWORKS
        .iter()
        .position(|&c| c == network)
        .unwrap_or_else(|| panic!("unknown network '{network}'"))
}

/// The published solution, every ratio at 23/27.
pub fn published_assignment() -> Assignment {
    Assignment([
        [q(2, 3), q(17, 27), q(19, 27), q(0, 1)],
        [q(0, 1), q(17, 27), q(1, 1), q(10, 27)],
        [q(19, 27), q(16, 27), q(19, 27), q(0, 1)],
    ])
}

/// Ratio weights of one network: progeny per agent and the best two-agent total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioWeights {
    pub progeny: [usize; 4],
    pub optimum: usize,
}

/// The LP instance derived from the networks and moves.
#[derive(Debug, Clone)]
pub struct UpperBoundInstance {
    pub networks: [Dag; 3],
    pub weights: [RatioWeights; 3],
    pub moves: Vec<HidingMove>,
}

impl UpperBoundInstance {
    /// Rebuilds the networks and checks every move lands on its target.
    pub fn build() -> Result<Self> {
        let (a, b, c) = figure3_networks();
        let networks = [a, b, c];
        let expected_profiles = [[4, 3, 2, 1], [1, 3, 2, 1], [2, 1, 2, 1]];
        let mut weights = Vec::new();
        for (g, want) in networks.iter().zip(expected_profiles) {
            let counts = Closure::new(g).counts();
            if counts != want {
                return Err(Error::CertificateViolation(format!(
                    "progeny profile {counts:?}, expected {want:?}"
                )));
            }
            weights.push(RatioWeights {
                progeny: [counts[0], counts[1], counts[2], counts[3]],
                optimum: optimal_sum(g, 2)?,
            });
        }
        let optima: Vec<usize> = weights.iter().map(|w| w.optimum).collect();
        if optima != [7, 5, 4] {
            return Err(Error::CertificateViolation(format!(
                "ratio denominators {optima:?}, expected [7, 5, 4]"
            )));
        }
        let moves = hiding_moves();
        for mv in &moves {
            let after = networks[0]
                .hide_edges(mv.agent, &mv.hidden)?
                .relabel(&mv.relabel)?;
            let target = &networks[network_index(mv.target)];
            if after != *target {
                return Err(Error::CertificateViolation(format!(
                    "agent {} hiding {:?} gives {after:?}, not network ({})",
                    mv.agent, mv.hidden, mv.target
                )));
            }
        }
        Ok(Self {
            networks,
            weights: weights.try_into().expect("three networks"),
            moves,
        })
    }

    /// `Σ_i P(i) x_i / optimum` for network `g`.
    pub fn ratio(&self, x: &Assignment, g: usize) -> Q {
        let w = &self.weights[g];
        let total = (0..4).fold(Q::zero(), |acc, i| {
            acc + q(w.progeny[i] as i64, 1) * &x.0[g][i]
        });
        total / q(w.optimum as i64, 1)
    }

    pub fn min_ratio(&self, x: &Assignment) -> Q {
        (0..3)
            .map(|g| self.ratio(x, g))
            .min()
            .expect("three networks")
    }

    /// Every violated constraint of `x`, as text. Empty means feasible.
    pub fn violations(&self, x: &Assignment) -> Vec<String> {
        let mut out = Vec::new();
        for (g, name) in NETWORKS.iter().enumerate() {
            for i in 0..4 {
                let v = &x.0[g][i];
                if *v < Q::zero() || *v > Q::one() {
                    out.push(format!(
                        "x_{}^({name}) = {} outside [0, 1]",
                        i + 1,
                        format_q(v)
                    ));
                }
            }
            let sum: Q = x.0[g].iter().sum();
            if sum > q(2, 1) {
                out.push(format!(
                    "network ({name}) selects {} > 2 agents",
                    format_q(&sum)
                ));
            }
        }
        for mv in &self.moves {
            let lhs = x.get(mv.target, mv.target_agent());
            let rhs = x.get('a', mv.agent);
            if lhs > rhs {
                out.push(format!(
                    "IC: x_{}^({}) = {} exceeds x_{}^(a) = {}",
                    mv.target_agent(),
                    mv.target,
                    format_q(lhs),
                    mv.agent,
                    format_q(rhs)
                ));
            }
        }
        out
    }

    /// Variables `x_{g,i}` at `4g + i - 1`, then `t` at 12; maximize `t`.
    pub fn linear_program(&self) -> LinearProgram {
        let nv = 13;
        let var = |g: usize, agent: AgentId| 4 * g + (agent - 1) as usize;
        let mut lp = LinearProgram::new(nv);
        lp.objective[12] = Q::one();
        for g in 0..3 {
            // optimum * t - Σ P(i) x_i <= 0
            let mut row = vec![Q::zero(); nv];
            for i in 0..4 {
                row[4 * g + i] = -q(self.weights[g].progeny[i] as i64, 1);
            }
            row[12] = q(self.weights[g].optimum as i64, 1);
            lp.add_le(row, Q::zero());
        }
        for mv in &self.moves {
            let mut row = vec![Q::zero(); nv];
            row[var(network_index(mv.target), mv.target_agent())] += Q::one();
            row[var(0, mv.agent)] -= Q::one();
            lp.add_le(row, Q::zero());
        }
        for g in 0..3 {
            let mut row = vec![Q::zero(); nv];
            for i in 0..4 {
                row[4 * g + i] = Q::one();
            }
            lp.add_le(row, q(2, 1));
        }
        for v in 0..12 {
            let mut row = vec![Q::zero(); nv];
            row[v] = Q::one();
            lp.add_le(row, Q::one());
        }
        lp
    }
}

/// Result of [`verify_upper_bound`]. Rationals serialize as `"p/q"`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpCertificate {
    pub published: Assignment,
    pub published_min_ratio: Q,
    pub lp_solution: Assignment,
    pub lp_optimum: Q,
    pub dual: Vec<Q>,
}

impl Serialize for LpCertificate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(5))?;
        map.serialize_entry("published", &self.published)?;
        map.serialize_entry("published_min_ratio", &format_q(&self.published_min_ratio))?;
        map.serialize_entry("lp_solution", &self.lp_solution)?;
        map.serialize_entry("lp_optimum", &format_q(&self.lp_optimum))?;
        let dual: Vec<String> = self.dual.iter().map(format_q).collect();
        map.serialize_entry("dual", &dual)?;
        map.end()
    }
}

/// Reconstructs the three networks, checks the published assignment, solves
/// the LP exactly and checks its dual certificate. Any mismatch is a
/// [`Error::CertificateViolation`].
pub fn verify_upper_bound() -> Result<LpCertificate> {
    let inst = UpperBoundInstance::build()?;
    let target = q(23, 27);
    let fail = |msg: String| Err(Error::CertificateViolation(msg));

    let published = published_assignment();
    let violations = inst.violations(&published);
    if !violations.is_empty() {
        return fail(format!(
            "published assignment infeasible: {}",
            violations.join("; ")
        ));
    }
    let published_min_ratio = inst.min_ratio(&published);
    if published_min_ratio != target {
        return fail(format!(
            "published min ratio is {}",
            format_q(&published_min_ratio)
        ));
    }

    let lp = inst.linear_program();
    let LpSolution { x, value, dual, .. } = lp
        .maximize()
        .map_err(|e| Error::CertificateViolation(format!("LP solve failed: {e}")))?;
    if value != target {
        return fail(format!("LP optimum is {}", format_q(&value)));
    }
    let lp_solution = Assignment::from_flat(&x[..12]);
    let violations = inst.violations(&lp_solution);
    if !violations.is_empty() {
        return fail(format!("LP solution infeasible: {}", violations.join("; ")));
    }
    if inst.min_ratio(&lp_solution) != target {
        return fail("LP solution does not attain its objective".into());
    }
    // Dual feasibility and a zero duality gap certify optimality independently
    // of the pivoting path.
    if dual.iter().any(|y| *y < Q::zero()) {
        return fail("negative dual multiplier".into());
    }
    for j in 0..lp.num_vars() {
        let col: Vec<Q> = lp
            .constraints
            .iter()
            .map(|(row, _)| row[j].clone())
            .collect();
        if dot(&col, &dual) < lp.objective[j] {
            return fail(format!("dual constraint for variable {j} violated"));
        }
    }
    let rhs: Vec<Q> = lp.constraints.iter().map(|(_, b)| b.clone()).collect();
    if dot(&rhs, &dual) != target {
        return fail(format!("dual objective is {}", format_q(&dot(&rhs, &dual))));
    }
    Ok(LpCertificate {
        published,
        published_min_ratio,
        lp_solution,
        lp_optimum: value,
        dual,
    })
}
