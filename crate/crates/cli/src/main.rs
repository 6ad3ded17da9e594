mod output;
mod source;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use progeny_core::analysis::DEFAULT_IC_BUDGET;
use progeny_core::mechanisms::parse_beta;
use progeny_core::Mechanism;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::source::GraphSource;

/// Environment variable that caps the worker threads used by the suites.
const THREADS_ENV: &str = "PROGENY_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "progeny",
    version,
    about = "Incentive-compatible selection on follower networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a mechanism on one graph and write its selection distribution.
    Select(SelectArgs),
    /// Run a verification suite; exits 1 when a violation is found.
    Verify(VerifyArgs),
    /// Build a graph from a named family and write it as JSON.
    Generate(GenerateArgs),
}

#[derive(Args, Debug)]
struct MechanismArgs {
    /// beta-lm, ldm or lald (also `beta-lm(<beta>)`).
    #[arg(long)]
    mechanism: Option<String>,
    /// β for beta-lm: a number in [0, 1] or `optimal`.
    #[arg(long)]
    beta: Option<String>,
}

impl MechanismArgs {
    fn resolve(&self) -> anyhow::Result<Option<Mechanism>> {
        let Some(name) = self.mechanism.as_deref() else {
            if self.beta.is_some() {
                bail!("--beta needs --mechanism beta-lm");
            }
            return Ok(None);
        };
        let mechanism: Mechanism = name.parse()?;
        match (&mechanism, &self.beta) {
            (_, None) => Ok(Some(mechanism)),
            (Mechanism::BetaLm { .. }, Some(_)) if name.trim() != "beta-lm" => {
                bail!("give β either inside the mechanism name or with --beta, not both")
            }
            (Mechanism::BetaLm { .. }, Some(beta)) => {
                Ok(Some(Mechanism::beta_lm(parse_beta(beta)?)?))
            }
            (_, Some(_)) => bail!("--beta only applies to beta-lm, not {mechanism}"),
        }
    }
}

#[derive(Args, Debug)]
struct SelectArgs {
    #[command(flatten)]
    source: GraphSource,
    #[command(flatten)]
    mechanism: MechanismArgs,
    /// Expected selection size; must match the mechanism when given.
    #[arg(long)]
    k: Option<usize>,
    /// Draw this many subsets and print them, one per line.
    #[arg(long)]
    sample: Option<usize>,
    /// Seed for `--sample`; defaults to `--seed`, then 0.
    #[arg(long)]
    sample_seed: Option<u64>,
    /// Distribution JSON destination (stdout when omitted).
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    IcExhaustive,
    IcRandom,
    RatioFloors,
    UpperBound,
    Observations,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    suite: Suite,
    #[command(flatten)]
    mechanism: MechanismArgs,
    /// Number of random graphs (0 skips the random part of a suite).
    #[arg(long, default_value_t = 10_000)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest random graph; defaults to 10 for ic-random and 12 otherwise.
    #[arg(long)]
    max_n: Option<usize>,
    /// Largest size of the exhaustive corpus.
    #[arg(long, default_value_t = 5)]
    exhaustive_n: usize,
    /// Out-degree cap of random graphs; defaults to 6 for ic-random.
    #[arg(long)]
    max_out_degree: Option<usize>,
    /// Most hiding subsets examined per graph.
    #[arg(long, default_value_t = DEFAULT_IC_BUDGET)]
    budget: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Report destination (stdout when omitted).
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Where witnesses go when the suite fails.
    #[arg(long, default_value = "witness.json")]
    witness: PathBuf,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// Outcome of a command that ran to completion.
#[derive(Debug, PartialEq, Eq)]
enum Status {
    Pass,
    Violation,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(err) = configure_threads() {
        eprintln!("error: {err:#}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Select(args) => select(args),
        Command::Verify(args) => verify::run(args),
        Command::Generate(args) => generate(args),
    };
    match result {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Violation) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .with_context(|| format!("{THREADS_ENV}={value} is not a thread count"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring the worker pool")?;
    Ok(())
}

fn select(args: SelectArgs) -> anyhow::Result<Status> {
    let g = args.source.load()?;
    let mechanism = args
        .mechanism
        .resolve()?
        .context("select needs --mechanism")?;
    if let Some(k) = args.k {
        if k != mechanism.k() {
            bail!(
                "{mechanism} selects up to {} agents, not k = {k}",
                mechanism.k()
            );
        }
    }
    let dist = mechanism.run(&g)?;
    output::write_json(args.output.as_deref(), &dist)?;
    if let Some(draws) = args.sample {
        let mut rng = ChaCha8Rng::seed_from_u64(args.sample_seed.or(args.source.seed).unwrap_or(0));
        let mut lines = String::new();
        for _ in 0..draws {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            lines.push_str(&serde_json::to_string(dist.sample(u))?);
            lines.push('\n');
        }
        print!("{lines}");
    }
    Ok(Status::Pass)
}

fn generate(args: GenerateArgs) -> anyhow::Result<Status> {
    let g = args.source.load()?;
    output::write_json(args.output.as_deref(), &g)?;
    Ok(Status::Pass)
}
