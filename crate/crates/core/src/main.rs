use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use shifted_funk::exec;
use shifted_funk::experiment::{
    cmd_diagnose, cmd_forward, cmd_invert_single, cmd_reconstruct_two, load_config, phantom_list, ExpResult,
    ExperimentConfig, ExperimentError,
};

#[derive(Parser)]
#[command(name = "shifted-funk", version, about = "Shifted Funk transform experiments on the sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (overrides the config; default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Seed for sampled plane families (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Forward transform of a phantom on a plane family.
    Forward(RunArgs),
    /// Single-center inversion, compared with the even part of the phantom.
    InvertSingle(RunArgs),
    /// Two-center reconstruction with a convergence report.
    ReconstructTwo(RunArgs),
    /// Convergence diagnostics of W^m f and the attractor escape time.
    Diagnose(RunArgs),
    /// Phantom registry.
    Phantom {
        #[command(subcommand)]
        action: PhantomAction,
    },
}

#[derive(Subcommand)]
enum PhantomAction {
    /// List phantom kinds.
    List,
}

fn prepare(args: &RunArgs) -> ExpResult<ExperimentConfig> {
    let mut cfg = load_config(&args.config)?;
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.threads.is_some() {
        cfg.threads = args.threads;
    }
    if cfg.threads == Some(0) {
        return Err(ExperimentError::Config("threads must be >= 1".into()));
    }
    exec::init_threads(cfg.threads).map_err(ExperimentError::Config)?;
    Ok(cfg)
}

fn run(cli: Cli) -> ExpResult<()> {
    let (args, cmd): (&RunArgs, fn(&ExperimentConfig) -> ExpResult<PathBuf>) = match &cli.command {
        Command::Forward(a) => (a, cmd_forward),
        Command::InvertSingle(a) => (a, cmd_invert_single),
        Command::ReconstructTwo(a) => (a, cmd_reconstruct_two),
        Command::Diagnose(a) => (a, cmd_diagnose),
        Command::Phantom { action: PhantomAction::List } => {
            for line in phantom_list() {
                println!("{line}");
            }
            return Ok(());
        }
    };
    let cfg = prepare(args)?;
    let dir = cmd(&cfg)?;
    log::info!("wrote results to {}", dir.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
