use thiserror::Error;

use crate::graph::AgentId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("graph must contain at least one agent")]
    EmptyGraph,
    #[error("agent {id} is out of range 1..={n}")]
    IdOutOfRange { id: AgentId, n: usize },
    #[error("self-loop on agent {0}")]
    SelfLoop(AgentId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(AgentId, AgentId),
    #[error("edge ({0}, {1}) closes a directed cycle")]
    CyclicGraph(AgentId, AgentId),
    #[error("edge ({1}, {2}) is not an out-edge of agent {0}")]
    NotAnOutEdge(AgentId, AgentId, AgentId),
    #[error("malformed graph JSON: {0}")]
    Json(String),

    #[error("k = {0} is not supported (only 1 and 2)")]
    UnsupportedK(usize),
    #[error("beta = {0} is outside [0, 1]")]
    InvalidBeta(f64),

    #[error("k = {k} exceeds agent count {n}")]
    KExceedsN { k: usize, n: usize },
    #[error("distribution over {dist_n} agents does not belong to a graph with {graph_n} agents")]
    DistributionGraphMismatch { dist_n: usize, graph_n: usize },
    #[error("IC audit needs {needed} hiding subsets, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("upper-bound certificate check failed: {0}")]
    CertificateViolation(String),

    #[error("invalid size parameter: {0}")]
    InvalidSize(String),
    #[error("graph has {n} agents, the limit is {max}")]
    TooManyAgents { n: usize, max: usize },
    #[error("exhaustive enumeration is capped at n = 5, got {0}")]
    NTooLarge(usize),
    #[error("unknown graph family '{0}'")]
    UnknownFamily(String),
    #[error("bad family parameter: {0}")]
    BadParameter(String),
    #[error("fixture '{name}' violates its contract: {detail}")]
    FixtureContract { name: &'static str, detail: String },
}
