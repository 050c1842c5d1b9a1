use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use softpart_cli::{cmd_design, cmd_forward, cmd_simulate, cmd_validate, CliError, PipelineConfig};

#[derive(Parser)]
#[command(name = "softpart", version, about = "Design particle distributions that produce a radiation pattern")]
struct Cli {
    /// JSON configuration; omitted keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Single seed (overrides `seeds`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for the parallel kernels.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the direct problem for a potential file.
    Forward {
        #[arg(long)]
        q: PathBuf,
    },
    /// Synthesize h, q (and N) for a target pattern file.
    Design {
        #[arg(long)]
        target: PathBuf,
    },
    /// Sample particle ensembles and compare Foldy–Lax with the effective medium.
    Simulate {
        /// Density (x,y,z,n) or potential field file.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Run the invariant suite.
    Validate,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::validation(format!("threads: {e}")))?;
    }
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(out) = cli.out {
        cfg.output_dir = out;
    }
    if let Some(seed) = cli.seed {
        cfg.seeds = vec![seed];
    }
    match cli.command {
        Command::Forward { q } => {
            let r = cmd_forward(&cfg, &q)?;
            println!(
                "residual {:e}, |A| {:e}, born diff {:e}",
                r.residual, r.pattern_norm, r.born_relative_diff
            );
        }
        Command::Design { target } => {
            let r = cmd_design(&cfg, &target)?;
            println!(
                "eps1 {:e}, eps2 {:e}, final error {:e}, bound {:e}",
                r.synthesis.eps1, r.synthesis.eps2, r.synthesis.final_error, r.synthesis.bound
            );
        }
        Command::Simulate { input } => {
            let r = cmd_simulate(&cfg, input.as_deref())?;
            for (m, e) in &r.medians {
                println!("M = {m}: median relative error {e:e}");
            }
        }
        Command::Validate => {
            cmd_validate(&cfg)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
