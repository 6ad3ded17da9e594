//! Selection mechanisms. Each returns the full distribution over selected
//! subsets; drawing from it is left to the caller's generator.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{AgentId, Dag};
use crate::influential::InfluenceProfile;

/// `1 / (1 + ln 2)`, the β that maximizes the worst-case ratio of β-LM.
pub const OPTIMAL_BETA: f64 = 1.0 / (1.0 + LN_2);

/// Tolerance for comparing probabilities.
pub const PROB_TOLERANCE: f64 = 1e-9;

/// Leftover mass below this is treated as rounding noise and dropped.
const LEFTOVER_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Sorted ascending, no duplicates. Empty means "select nobody".
    pub set: Vec<AgentId>,
    pub p: f64,
}

/// A distribution over subsets of at most `k` agents of an `n`-agent graph.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionDistribution {
    pub mechanism: String,
    pub k: usize,
    pub n: usize,
    pub outcomes: Vec<Outcome>,
    /// False when the parameters fall outside the range where the
    /// mechanism is known to be incentive compatible.
    pub ic_guaranteed: bool,
}

impl SelectionDistribution {
    fn from_masses(mechanism: &Mechanism, n: usize, masses: BTreeMap<Vec<AgentId>, f64>) -> Self {
        let outcomes = masses
            .into_iter()
            .filter(|(_, p)| *p > 0.0)
            .map(|(set, p)| Outcome { set, p })
            .collect();
        Self {
            mechanism: mechanism.to_string(),
            k: mechanism.k(),
            n,
            outcomes,
            ic_guaranteed: mechanism.ic_guaranteed(),
        }
    }

    /// `x_i`: total probability of the outcomes containing `i`.
    pub fn marginal(&self, i: AgentId) -> f64 {
        self.outcomes
            .iter()
            .filter(|o| o.set.contains(&i))
            .map(|o| o.p)
            .sum()
    }

    /// Marginals for agents `1..=n`, indexed by `agent - 1`.
    pub fn marginals(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for o in &self.outcomes {
            for &i in &o.set {
                x[(i - 1) as usize] += o.p;
            }
        }
        x
    }

    pub fn total(&self) -> f64 {
        self.outcomes.iter().map(|o| o.p).sum()
    }

    /// Probability of exactly `set` (order-insensitive).
    pub fn prob_of(&self, set: &[AgentId]) -> f64 {
        let mut key = set.to_vec();
        key.sort_unstable();
        self.outcomes
            .iter()
            .find(|o| o.set == key)
            .map_or(0.0, |o| o.p)
    }

    /// The outcome at cumulative position `u ∈ [0, 1)` in outcome order.
    /// Rounding slack at the top end falls to the last outcome.
    pub fn sample(&self, u: f64) -> &[AgentId] {
        let mut acc = 0.0;
        for o in &self.outcomes {
            acc += o.p;
            if u < acc {
                return &o.set;
            }
        }
        self.outcomes.last().map_or(&[], |o| &o.set)
    }

    /// Checks the distribution invariants; returns a description of the
    /// first violation.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let total = self.total();
        if (total - 1.0).abs() > PROB_TOLERANCE {
            return Err(format!("probabilities sum to {total}"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for o in &self.outcomes {
            if !(0.0..=1.0 + PROB_TOLERANCE).contains(&o.p) {
                return Err(format!("outcome {:?} has probability {}", o.set, o.p));
            }
            if o.set.len() > self.k {
                return Err(format!("outcome {:?} exceeds k = {}", o.set, self.k));
            }
            if o.set.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("outcome {:?} is not a sorted set", o.set));
            }
            if o.set.iter().any(|&i| i == 0 || i as usize > self.n) {
                return Err(format!("outcome {:?} names an unknown agent", o.set));
            }
            if !seen.insert(&o.set) {
                return Err(format!("outcome {:?} listed twice", o.set));
            }
        }
        if let Some((i, x)) = self
            .marginals()
            .into_iter()
            .enumerate()
            .find(|(_, x)| !(-PROB_TOLERANCE..=1.0 + PROB_TOLERANCE).contains(x))
        {
            return Err(format!("marginal of agent {} is {x}", i + 1));
        }
        Ok(())
    }
}

/// `{"mechanism", "k", "n", "ic_guaranteed", "outcomes":[{"set","p"}], "marginals":{"1":p,...}}`
impl Serialize for SelectionDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Outcomes<'a>(&'a [Outcome]);
        impl Serialize for Outcomes<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_seq(self.0.iter().map(|o| OutcomeJson {
                    set: &o.set,
                    p: o.p,
                }))
            }
        }
        #[derive(Serialize)]
        struct OutcomeJson<'a> {
            set: &'a [AgentId],
            p: f64,
        }
        struct Marginals(Vec<f64>);
        impl Serialize for Marginals {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(self.0.len()))?;
                for (i, x) in self.0.iter().enumerate() {
                    map.serialize_entry(&(i + 1).to_string(), x)?;
                }
                map.end()
            }
        }

        let mut st = s.serialize_struct("SelectionDistribution", 6)?;
        st.serialize_field("mechanism", &self.mechanism)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("ic_guaranteed", &self.ic_guaranteed)?;
        st.serialize_field("outcomes", &Outcomes(&self.outcomes))?;
        st.serialize_field("marginals", &Marginals(self.marginals()))?;
        st.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mechanism {
    /// β-logarithmic mechanism, selects at most one agent.
    BetaLm { beta: f64 },
    /// Least deterministic mechanism, selects at most two agents.
    Ldm,
    /// Logarithm after least deterministic, selects at most two agents.
    Lald,
}

impl Mechanism {
    pub fn beta_lm(beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidBeta(beta));
        }
        Ok(Mechanism::BetaLm { beta })
    }

    pub fn optimal_lm() -> Self {
        Mechanism::BetaLm { beta: OPTIMAL_BETA }
    }

    pub fn k(&self) -> usize {
        match self {
            Mechanism::BetaLm { .. } => 1,
            Mechanism::Ldm | Mechanism::Lald => 2,
        }
    }

    pub fn ic_guaranteed(&self) -> bool {
        match *self {
            Mechanism::BetaLm { beta } => beta >= 0.5,
            Mechanism::Ldm | Mechanism::Lald => true,
        }
    }

    pub fn run(&self, g: &Dag) -> Result<SelectionDistribution> {
        if let Mechanism::BetaLm { beta } = *self {
            Mechanism::beta_lm(beta)?;
        }
        Ok(self.run_on(&InfluenceProfile::new(g), g.n()))
    }

    /// Evaluates on a precomputed profile. Assumes a validated β.
    pub fn run_on(&self, profile: &InfluenceProfile, n: usize) -> SelectionDistribution {
        let masses = match *self {
            Mechanism::BetaLm { beta } => beta_lm_masses(profile, beta),
            Mechanism::Ldm => ldm_masses(profile),
            Mechanism::Lald => lald_masses(profile),
        };
        SelectionDistribution::from_masses(self, n, masses)
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mechanism::BetaLm { beta } if *beta == OPTIMAL_BETA => write!(f, "beta-lm(optimal)"),
            Mechanism::BetaLm { beta } => write!(f, "beta-lm({beta})"),
            Mechanism::Ldm => write!(f, "ldm"),
            Mechanism::Lald => write!(f, "lald"),
        }
    }
}

/// Parses `ldm`, `lald`, `beta-lm` (optimal β), `beta-lm(<beta>)` or
/// `beta-lm(optimal)`.
impl FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "ldm" => return Ok(Mechanism::Ldm),
            "lald" => return Ok(Mechanism::Lald),
            "beta-lm" => return Ok(Mechanism::optimal_lm()),
            _ => {}
        }
        let beta = s
            .strip_prefix("beta-lm(")
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(|| Error::BadParameter(format!("unknown mechanism '{s}'")))?;
        Mechanism::beta_lm(parse_beta(beta)?)
    }
}

/// Accepts a number in `[0, 1]` or the word `optimal`.
pub fn parse_beta(s: &str) -> Result<f64> {
    let s = s.trim();
    if s == "optimal" {
        return Ok(OPTIMAL_BETA);
    }
    let beta: f64 = s
        .parse()
        .map_err(|_| Error::BadParameter(format!("beta '{s}' is not a number")))?;
    Mechanism::beta_lm(beta).map(|_| beta)
}

/// Logarithmic masses over a `≻`-ordered chain: the last member gets `beta`,
/// every other member `(1 - beta) log2(P(i_t) / P(i_{t+1}))`.
fn log_chain(profile: &InfluenceProfile, chain: &[AgentId], beta: f64) -> Vec<(AgentId, f64)> {
    let Some((&last, _)) = chain.split_last() else {
        return Vec::new();
    };
    let mut out: Vec<(AgentId, f64)> = chain
        .windows(2)
        .map(|w| {
            let ratio = profile.progeny(w[0]) as f64 / profile.progeny(w[1]) as f64;
            (w[0], (1.0 - beta) * ratio.log2())
        })
        .collect();
    out.push((last, beta));
    out
}

fn leftover(masses: &BTreeMap<Vec<AgentId>, f64>) -> f64 {
    let rest = 1.0 - masses.values().sum::<f64>();
    debug_assert!(rest > -PROB_TOLERANCE, "over-allocated probability: {rest}");
    rest
}

fn add(masses: &mut BTreeMap<Vec<AgentId>, f64>, mut set: Vec<AgentId>, p: f64) {
    set.sort_unstable();
    set.dedup();
    *masses.entry(set).or_insert(0.0) += p;
}

fn beta_lm_masses(profile: &InfluenceProfile, beta: f64) -> BTreeMap<Vec<AgentId>, f64> {
    let mut masses = BTreeMap::new();
    for (i, p) in log_chain(profile, &profile.s1.members, beta) {
        add(&mut masses, vec![i], p);
    }
    let rest = leftover(&masses);
    if rest > LEFTOVER_EPS {
        add(&mut masses, vec![], rest);
    }
    masses
}

fn ldm_masses(profile: &InfluenceProfile) -> BTreeMap<Vec<AgentId>, f64> {
    let s1 = &profile.s1.members;
    let chosen = match s1.len() {
        1 => vec![s1[0]],
        m => vec![s1[m - 2], s1[m - 1]],
    };
    BTreeMap::from([(sorted(chosen), 1.0)])
}

fn lald_masses(profile: &InfluenceProfile) -> BTreeMap<Vec<AgentId>, f64> {
    let (s1, s2) = (&profile.s1, &profile.s2);
    let last = s2.last();
    let mut masses = BTreeMap::new();
    let nested = s2.members.iter().all(|&i| s1.contains(i));
    let companions = if nested {
        // S2 = S1 = {i_1..i_m}: the log chain runs over i_1..i_{m-1}.
        let m = s2.len();
        log_chain(profile, &s2.members[..m - 1], OPTIMAL_BETA)
    } else {
        log_chain(profile, &s1.members, OPTIMAL_BETA)
    };
    for (j, p) in companions {
        // A draw equal to `last` collapses to the singleton {last}.
        add(&mut masses, vec![last, j], p);
    }
    let rest = leftover(&masses);
    if rest > LEFTOVER_EPS {
        add(&mut masses, vec![last], rest);
    }
    masses
}

fn sorted(mut v: Vec<AgentId>) -> Vec<AgentId> {
    v.sort_unstable();
    v
}

/// `β`-LM on `g`.
pub fn beta_lm(g: &Dag, beta: f64) -> Result<SelectionDistribution> {
    Mechanism::beta_lm(beta)?.run(g)
}

pub fn ldm(g: &Dag) -> SelectionDistribution {
    Mechanism::Ldm.run_on(&InfluenceProfile::new(g), g.n())
}

pub fn lald(g: &Dag) -> SelectionDistribution {
    Mechanism::Lald.run_on(&InfluenceProfile::new(g), g.n())
}
