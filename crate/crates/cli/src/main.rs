use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use htent::harness::{run, RunConfig};
use htent::Error;

/// Entanglement entropies from Hamiltonian truncation, driven by a JSON run configuration.
#[derive(Parser, Debug)]
#[command(name = "htent", version)]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; overrides the configuration, stdout when neither is set.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Directory for cached transforms and Hamiltonians.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Worker threads; all cores by default.
    #[arg(long)]
    threads: Option<usize>,
    /// Accept cuts that are not multiples of L/s_F under the constant-density scheme.
    #[arg(long)]
    allow_incommensurate: bool,
    /// Largest derivative order the tree overlap method may expand.
    #[arg(long)]
    budget: Option<u32>,
}

fn execute(args: Args) -> Result<(), Error> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg: RunConfig = serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
    if let Some(o) = args.output {
        cfg.output = Some(o);
    }
    if let Some(c) = args.cache {
        cfg.cache = Some(c);
    }
    if let Some(b) = args.budget {
        cfg.budget = b;
    }
    cfg.allow_incommensurate |= args.allow_incommensurate;
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let out = run(&cfg)?;
    for line in &out.diagnostics {
        eprintln!("{line}");
    }
    match &cfg.output {
        Some(path) => std::fs::write(path, &out.csv)?,
        None => print!("{}", out.csv),
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
