use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bubblecut::config::RunConfig;
use bubblecut::run::{run, EXIT_ERROR};
use bubblecut::Error;

#[derive(Parser)]
#[command(name = "bubblecut", version, about = "φ-bubbles, bubble schedules and certified mean-convex functions on 2-D grids")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(clap::Args)]
struct Common {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed of the Morse perturbation; overrides the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Print the report to stderr.
    #[arg(long)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Verb {
    /// Run whatever operation the configuration names.
    Run(Common),
    SolveBubble(Common),
    Shrink(Common),
    Grow(Common),
    Separate(Common),
    Classify(Common),
    Trichotomy(Common),
    Staircase(Common),
    Verify(Common),
    Distance(Common),
}

impl Verb {
    fn split(&self) -> (Option<&'static str>, &Common) {
        match self {
            Verb::Run(c) => (None, c),
            Verb::SolveBubble(c) => (Some("solve-bubble"), c),
            Verb::Shrink(c) => (Some("shrink"), c),
            Verb::Grow(c) => (Some("grow"), c),
            Verb::Separate(c) => (Some("separate"), c),
            Verb::Classify(c) => (Some("classify"), c),
            Verb::Trichotomy(c) => (Some("trichotomy"), c),
            Verb::Staircase(c) => (Some("staircase"), c),
            Verb::Verify(c) => (Some("verify"), c),
            Verb::Distance(c) => (Some("distance"), c),
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, Error> {
    let (verb, common) = cli.verb.split();
    let config = RunConfig::read(&common.config)?;
    if let Some(v) = verb {
        if v != config.operation.verb() {
            return Err(Error::Config(format!("configuration runs '{}', not '{v}'", config.operation.verb())));
        }
    }
    let outcome = run(&config, common.out.as_deref(), common.seed)?;
    if common.verbose {
        eprintln!("{}", serde_json::to_string_pretty(&outcome.report).unwrap_or_default());
        eprintln!("artifacts in {}", outcome.out_dir.display());
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("BUBBLECUT_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e.qualified());
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
