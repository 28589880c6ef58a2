use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use realembed::embedding::suite::Fault;
use realembed_cli::{
    emit, run, Command, Failure, Format, RunConfig, DEFAULT_SEED, EXIT_INPUT, SEED_VAR,
};

/// Embed complex quantum models into real quantum theory and check that
/// every observable statistic survives.
#[derive(Parser, Debug)]
#[command(name = "realembed", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Numerical tolerance (defaults depend on the command).
    #[arg(long, global = true, allow_negative_numbers = true)]
    tol: Option<f64>,

    /// Write the report (for `embed`: the embedded bundle) to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,

    /// Largest number of phase folds to allow.
    #[arg(long, global = true)]
    max_fold: Option<usize>,

    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Corrupt an internal object to exercise failure paths.
    #[arg(long, global = true, hide = true, value_enum)]
    inject_fault: Option<FaultArg>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run the algebraic identity suite.
    CheckAlgebra,
    /// Embed a scenario or protocol and compare all statistics.
    Verify { input: PathBuf },
    /// Embed a scenario or protocol and write the real model with its certificate.
    Embed { input: PathBuf },
    /// Local versus global distinguishability of the witness states.
    Witness { input: Option<PathBuf> },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FaultArg {
    /// Perturb one entry of the two-fold J.
    PerturbJ,
}

fn seed() -> Result<u64, Failure> {
    match std::env::var(SEED_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::input(format!("{SEED_VAR} must be an unsigned integer, got {v:?}"))
        }),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn config(cli: Cli) -> Result<RunConfig, Failure> {
    let command = match cli.command {
        Cmd::CheckAlgebra => Command::CheckAlgebra,
        Cmd::Verify { input } => Command::Verify { input },
        Cmd::Embed { input } => Command::Embed { input },
        Cmd::Witness { input } => Command::Witness { input },
    };
    Ok(RunConfig {
        command,
        tol: cli.tol,
        out: cli.out,
        format: match cli.format {
            FormatArg::Json => Format::Json,
            FormatArg::Text => Format::Text,
        },
        max_fold: cli.max_fold,
        threads: cli.threads,
        seed: seed()?,
        fault: cli.inject_fault.map(|FaultArg::PerturbJ| Fault::PerturbJ {
            n: 2,
            epsilon: 1e-6,
        }),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are input errors; help and version are not errors
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let result = config(cli).and_then(|cfg| {
        if let Some(n) = cfg.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Failure::input(format!("--threads: {e}")))?;
        }
        let outcome = run(&cfg)?;
        emit(&cfg, &outcome).map_err(|e| Failure::input(format!("writing output: {e}")))?;
        Ok(outcome.code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(if f.code == 0 { EXIT_INPUT } else { f.code })
        }
    }
}
