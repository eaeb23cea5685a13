use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bvsweep::run::{self, config, RunConfig};
use bvsweep::scenarios::REGISTRY;
use bvsweep::Error;

#[derive(Parser)]
#[command(
    name = "bvsweep",
    version,
    about = "Vanishing-viscosity sweeps with certified limit curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve, sweep and certify a scenario or configured problem.
    Run(RunArgs),
    /// List the built-in scenarios.
    Scenarios,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Built-in scenario name (see `bvsweep scenarios`).
    #[arg(long, conflicts_with = "config")]
    scenario: Option<String>,
    /// Configuration file (grammar in docs/config.ebnf).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Viscosity ladder, strictly decreasing: `0.2,0.1,0.05`.
    #[arg(long)]
    eps: Option<String>,
    /// Mesh rule `c=0.5` or `c=2.5,power=2` for `Δ <= c ε^power`.
    #[arg(long)]
    mesh: Option<String>,
    /// Uniform partition with this many steps instead of the mesh rule.
    #[arg(long)]
    steps: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Recompute certificates of a stored curve CSV instead of solving.
    #[arg(long, value_name = "CURVE_CSV")]
    certify_only: Option<PathBuf>,
    /// Seed for the multi-start ordering of nonconvex steps.
    #[arg(long)]
    seed: Option<u64>,
}

fn build_config(args: &RunArgs) -> bvsweep::Result<RunConfig> {
    let mut cfg = match (&args.scenario, &args.config) {
        (Some(name), _) => RunConfig::for_scenario(name),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            config::parse(&text)?
        }
        (None, None) => {
            return Err(Error::Config {
                line: 0,
                message: "give --scenario or --config".into(),
            })
        }
    };
    if let Some(eps) = &args.eps {
        cfg.set_eps(config::parse_eps(0, eps)?);
    }
    if let Some(mesh) = &args.mesh {
        cfg.mesh = Some(config::parse_mesh(0, mesh)?);
    }
    if let Some(n) = args.steps {
        cfg.set_steps(n);
    }
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn execute(args: &RunArgs) -> i32 {
    let fallback = args.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let cfg = match build_config(args) {
        Ok(c) => c,
        Err(e) => {
            let rec = run::record_error(&fallback, &e);
            eprintln!("error: {e}");
            return rec.exit_code;
        }
    };
    let outcome = match &args.certify_only {
        Some(path) => run::certify_only(&cfg, path),
        None => run::run(&cfg),
    };
    match outcome {
        Ok(o) => {
            print!("{}", o.report.render());
            if let Some(err) = &o.error {
                eprintln!("error: {}", err.message);
            }
            println!("artifacts in {}", o.out.display());
            o.exit_code()
        }
        Err(e) => {
            let rec = run::record_error(&cfg.out, &e);
            eprintln!("error: {e}");
            rec.exit_code
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Run(args) => execute(args),
        Command::Scenarios => {
            for name in REGISTRY {
                println!("{name}");
            }
            println!("chain<N>, chain<N>-symmetric, chain<N>-zero for any N >= 2");
            0
        }
    };
    ExitCode::from(code as u8)
}
