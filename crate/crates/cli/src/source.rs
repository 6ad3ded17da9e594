use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::Args;
use progeny_core::generators::GraphFamily;
use progeny_core::Dag;

/// Where the graph comes from: a JSON file or a named family whose
/// parameters are given inline (`two_star:y=5`) or as flags.
#[derive(Args, Debug)]
pub struct GraphSource {
    /// Graph JSON file (`{"n": .., "edges": [[i, j], ..]}`).
    #[arg(long, conflicts_with = "family")]
    pub input: Option<PathBuf>,
    /// figure1, two_star, figure3, figure4, lm_tight_chain or random.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub y: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Network of figure3: a, b or c.
    #[arg(long)]
    pub net: Option<char>,
    /// Seed of the random family.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_out_degree: Option<usize>,
}

impl GraphSource {
    fn family_spec(&self, family: &str) -> String {
        let mut params: Vec<String> = Vec::new();
        let mut push = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                params.push(format!("{key}={v}"));
            }
        };
        push("y", self.y.map(|v| v.to_string()));
        push("m", self.m.map(|v| v.to_string()));
        push("n", self.n.map(|v| v.to_string()));
        push("p", self.p.map(|v| v.to_string()));
        push("net", self.net.map(|v| v.to_string()));
        // only the random family takes a seed
        if family.split(':').next().map(str::trim) == Some("random") {
            push("seed", self.seed.map(|v| v.to_string()));
        }
        push("max_out_degree", self.max_out_degree.map(|v| v.to_string()));
        if params.is_empty() {
            return family.to_string();
        }
        let sep = if family.contains(':') { "," } else { ":" };
        format!("{family}{sep}{}", params.join(","))
    }

    pub fn load(&self) -> anyhow::Result<Dag> {
        match (&self.input, &self.family) {
            (Some(path), None) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                Dag::from_json(&text).with_context(|| format!("parsing {}", path.display()))
            }
            (None, Some(family)) => {
                let spec = self.family_spec(family);
                let family: GraphFamily =
                    spec.parse().with_context(|| format!("family '{spec}'"))?;
                Ok(family.build()?)
            }
            (None, None) => bail!("give a graph with --input or --family"),
            (Some(_), Some(_)) => bail!("--input and --family are mutually exclusive"),
        }
    }
}
