use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lr_cooling_cli::commands::{self, failures, CliError, Context, Written};
use lr_cooling_cli::RunConfig;

/// Invariant-based cooling ramps for a charged mechanical resonator.
#[derive(Parser)]
#[command(name = "lrcool", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coupling, stiffness ratio and thermal occupations; no dynamics.
    Params(Common),
    /// Sampled f(t), omega_eff(t) and b(t) for each ramp duration.
    Design(Common),
    /// Propagate the thermal state along each designed ramp.
    Simulate(Common),
    /// Scale the control by (1 + eps) over the eps x t_f grid.
    Sweep(Common),
    /// All of the above plus a hashed manifest and reference checks.
    Reproduce(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `tolerance`.
    #[arg(long)]
    tol: Option<f64>,
    /// Overrides `samples`.
    #[arg(long)]
    samples: Option<usize>,
    /// Overrides `propagator` (transfer, covariance).
    #[arg(long)]
    propagator: Option<String>,
    /// Overrides `integrator` (dopri5, rkf78).
    #[arg(long)]
    integrator: Option<String>,
}

impl Common {
    fn context(&self) -> Result<Context, CliError> {
        let mut config = RunConfig::load(&self.config)?;
        if let Some(out) = &self.out {
            config.out_dir = out.clone();
        }
        if let Some(tol) = self.tol {
            config.tolerance = tol;
        }
        if let Some(samples) = self.samples {
            config.samples = samples;
        }
        if let Some(name) = &self.propagator {
            config.propagator = name.clone();
        }
        if let Some(name) = &self.integrator {
            config.integrator = Some(name.clone());
        }
        Context::new(config)
    }
}

fn list(written: &[Written]) {
    for w in written {
        println!("wrote {}", w.path.display());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Params(args) => {
            let ctx = args.context()?;
            print!("{}", commands::cmd_params(&ctx)?.to_text(ctx.config.precision));
        }
        Command::Design(args) => list(&commands::cmd_design(&args.context()?)?),
        Command::Simulate(args) => list(&commands::cmd_simulate(&args.context()?)?.1),
        Command::Sweep(args) => list(&[commands::cmd_sweep(&args.context()?)?.1]),
        Command::Reproduce(args) => {
            let ctx = args.context()?;
            let outcome = commands::cmd_reproduce(&ctx)?;
            print!("{}", outcome.report.to_text(ctx.config.precision));
            for check in &outcome.manifest.checks {
                let verdict = if check.passed { "PASS" } else { "FAIL" };
                let bound = match check.kind {
                    "below" => format!("below {:e}", check.target),
                    kind => format!("target {:e}, {kind} tolerance {:e}", check.target, check.tolerance),
                };
                println!("{verdict} {} = {:e} ({bound})", check.name, check.value);
            }
            println!("wrote {}", outcome.manifest_path.display());
            let failed = failures(&outcome.manifest);
            if !failed.is_empty() {
                return Err(CliError::ChecksFailed(failed));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("lrcool: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
