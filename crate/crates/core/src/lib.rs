//! Incentive-compatible selection of influential agents on directed acyclic
//! graphs, where an agent's influence is its progeny.
//!
//! * [`graph`]: validated DAGs, progeny, ranking, edge hiding.
//! * [`influential`]: 1- and 2-influential sets and their structural audit.
//! * [`mechanisms`]: β-LM, LDM and LALD as full selection distributions.
//! * [`analysis`]: brute-force IC audit, approximation ratios, and the exact
//!   LP behind the 23/27 upper bound for two-agent selection.
//! * [`generators`]: fixtures, adversarial families, exhaustive and seeded
//!   random DAG corpora.

pub mod analysis;
pub mod error;
pub mod generators;
pub mod graph;
pub mod influential;
pub mod mechanisms;

pub use error::{Error, Result};
pub use graph::{AgentId, Closure, Dag, Edge, ProgenySet, RankingSequence};
pub use influential::{
    check_structure, influential_set, InfluenceProfile, InfluentialSet, StructureReport,
};
pub use mechanisms::{beta_lm, lald, ldm, Mechanism, SelectionDistribution, OPTIMAL_BETA};
