use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use graded_kms::report::emit_report;
use graded_kms::scenario::{NetSpec, RhoSpec, DEFAULT_SPECTRAL_BOUND, DEFAULT_TOLERANCE};
use graded_kms::suite::{run_net, run_suite_with, SuiteOptions, DEFAULT_NET_BUDGET};
use graded_kms::{generate_scenario, Check, Error, Report, Scenario, ScenarioConfig};

/// Graded-KMS laboratory: generate scenarios, verify them, probe local nets.
#[derive(Parser)]
#[command(name = "gkms", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded scenario bundle.
    Generate(GenerateArgs),
    /// Run certification checks on a scenario bundle.
    Verify(VerifyArgs),
    /// Run the local-net checks on a seeded chain.
    Net(NetArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    n_plus: usize,
    #[arg(long)]
    n_minus: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    beta: f64,
    #[arg(long, default_value_t = DEFAULT_SPECTRAL_BOUND, allow_negative_numbers = true)]
    spectral_bound: f64,
    /// Explicit spectrum, `+` sector first; replaces the Gibbs construction.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    eigenvalues: Option<Vec<f64>>,
    /// Rotate an explicit spectrum by a seeded even unitary.
    #[arg(long)]
    rotate: bool,
    #[arg(long)]
    unit_trace: bool,
    /// Chain for the net checks, e.g. `+-,+-`.
    #[arg(long)]
    sites: Option<String>,
    #[arg(long)]
    entangled: bool,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    scenario: PathBuf,
    /// Comma-separated subset of algebra,jordan,flow,gns,prop1,prop2,prop3,net,prop4 or `all`.
    #[arg(long, default_value = "all")]
    checks: String,
    /// Defaults to the scenario's tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_NET_BUDGET)]
    budget: usize,
}

#[derive(Args)]
struct NetArgs {
    #[arg(long)]
    sites: String,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    entangled: bool,
    #[arg(long, default_value_t = DEFAULT_NET_BUDGET)]
    budget: usize,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn check_tolerance(tol: f64) -> graded_kms::Result<f64> {
    if tol > 0.0 && tol.is_finite() {
        Ok(tol)
    } else {
        Err(Error::Config(format!("tolerance must be positive, got {tol}")))
    }
}

fn generate(args: GenerateArgs) -> graded_kms::Result<ExitCode> {
    let rho = match args.eigenvalues {
        Some(eigenvalues) => RhoSpec::Explicit {
            eigenvalues,
            rotate: args.rotate,
        },
        None => RhoSpec::Gibbs {
            beta: args.beta,
            spectral_bound: args.spectral_bound,
        },
    };
    let config = ScenarioConfig {
        seed: args.seed,
        n_plus: args.n_plus,
        n_minus: args.n_minus,
        rho,
        unit_trace: args.unit_trace,
        net: args
            .sites
            .map(|s| NetSpec::parse(&s, args.entangled))
            .transpose()?,
        tolerance: check_tolerance(args.tol)?,
    };
    let scenario = generate_scenario(&config)?;
    scenario.save(&args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn finish(report: &Report, path: Option<PathBuf>) -> graded_kms::Result<ExitCode> {
    print!("{}", report.summary());
    if let Some(path) = path {
        emit_report(report, &path)?;
    }
    Ok(ExitCode::from(report.exit_code() as u8))
}

fn verify(args: VerifyArgs) -> graded_kms::Result<ExitCode> {
    let scenario = Scenario::load(&args.scenario).map_err(|e| match e {
        Error::Io(_) | Error::Json(_) => Error::Config(format!("{}: {e}", args.scenario.display())),
        other => other,
    })?;
    let checks = Check::parse_list(&args.checks)?;
    let tol = check_tolerance(args.tol.unwrap_or(scenario.config.tolerance))?;
    let options = SuiteOptions {
        net: None,
        net_budget: args.budget,
    };
    let report = run_suite_with(&scenario, &checks, tol, &options);
    finish(&report, args.report)
}

fn net(args: NetArgs) -> graded_kms::Result<ExitCode> {
    let spec = NetSpec::parse(&args.sites, args.entangled)?;
    if args.budget == 0 {
        return Err(Error::Config("budget must be positive".into()));
    }
    let report = run_net(&spec, args.seed, args.budget, check_tolerance(args.tol)?)?;
    finish(&report, args.report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(args) => generate(args),
        Command::Verify(args) => verify(args),
        Command::Net(args) => net(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
