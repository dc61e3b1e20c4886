//! `caplab` — capacities, volumes and systolic ratios of convex bodies,
//! plus the theorem verification suite.
//!
//! Exit codes: 0 success / all checks pass, 1 check failure, 2 usage or
//! spec error, 3 invariant violation at body load, 4 I/O error.

use caplab_core::ehz::{self, SolverOptions};
use caplab_core::gh;
use caplab_core::report::VerificationReport;
use caplab_core::specfile::{self, ParsedBody, SpecError};
use caplab_core::verify;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "caplab", version, about = "Symplectic capacities of convex bodies at desk scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Capacity of a body: Gutt-Hutchings for toric specs, the EHZ
    /// closed form or the Clarke-dual solver otherwise.
    Capacity(CapacityArgs),
    /// Volume of a body: exact closed form, or Monte Carlo.
    Volume(VolumeArgs),
    /// Systolic ratio c/(n!·Vol)^{1/n}.
    Systolic(SystolicArgs),
    /// Estimate of the normalized capacity limit c^k/k for toric specs.
    Cinf(CinfArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
    /// Re-emit a saved JSON report as json, csv, or a table.
    Report(ReportArgs),
}

#[derive(Args)]
struct SpecArg {
    /// Body spec: a path to a JSON file, or inline JSON starting with '{'.
    #[arg(long)]
    spec: String,
}

#[derive(Args)]
struct CapacityArgs {
    #[command(flatten)]
    spec: SpecArg,
    /// Capacity index k (toric bodies).
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Print the whole sequence c^1..c^kmax instead of a single index.
    #[arg(long)]
    kmax: Option<usize>,
    /// Use the Clarke-dual solver instead of closed forms (smooth bodies).
    #[arg(long)]
    solver: bool,
    /// Functional exponent of the solver objective.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct VolumeArgs {
    #[command(flatten)]
    spec: SpecArg,
    /// Force the Monte-Carlo estimator even when a closed form exists.
    #[arg(long)]
    mc: bool,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SystolicArgs {
    #[command(flatten)]
    spec: SpecArg,
}

#[derive(Args)]
struct CinfArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[arg(long, default_value_t = 2000)]
    kmax: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated check names; all checks when omitted.
    #[arg(long, value_delimiter = ',')]
    checks: Vec<String>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output format on stdout.
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Also write the report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Keep wall-clock timings in machine-readable output (breaks
    /// byte-stability across runs).
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct ReportArgs {
    /// Path of a previously saved JSON report.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    CheckFailure,
    Usage(String),
    Invariant(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailure => 1,
            CliError::Usage(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        match e {
            SpecError::Invariant(msg) => CliError::Invariant(msg),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::CheckFailure => eprintln!("caplab: one or more checks failed"),
                CliError::Usage(msg) => eprintln!("caplab: {msg}"),
                CliError::Invariant(msg) => eprintln!("caplab: invariant violation: {msg}"),
                CliError::Io(msg) => eprintln!("caplab: io error: {msg}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Capacity(args) => capacity(args),
        Command::Volume(args) => volume(args),
        Command::Systolic(args) => systolic(args),
        Command::Cinf(args) => cinf(args),
        Command::Verify(args) => run_verify(args),
        Command::Report(args) => report(args),
    }
}

fn load_spec(arg: &SpecArg) -> Result<ParsedBody, CliError> {
    let text = if arg.spec.trim_start().starts_with('{') {
        arg.spec.clone()
    } else {
        std::fs::read_to_string(&arg.spec)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", arg.spec)))?
    };
    Ok(specfile::parse_body_spec(&text)?)
}

fn capacity(args: CapacityArgs) -> Result<(), CliError> {
    let parsed = load_spec(&args.spec)?;
    if let Some(profile) = parsed.profile() {
        let k_top = args.kmax.unwrap_or(args.k);
        if args.kmax.is_some() {
            for k in 1..=k_top {
                let c = gh::capacity(profile, k).map_err(|e| CliError::Usage(e.to_string()))?;
                println!("{k},{c}");
            }
        } else {
            let c = gh::capacity(profile, args.k).map_err(|e| CliError::Usage(e.to_string()))?;
            println!("{c}");
        }
        return Ok(());
    }
    let body = parsed.body();
    if args.k != 1 || args.kmax.is_some() {
        return Err(CliError::Usage(
            "higher-order capacities (--k/--kmax) are computed for toric specs only".into(),
        ));
    }
    if args.solver {
        let options = SolverOptions {
            functional_p: args.p,
            seed: args.seed,
            ..SolverOptions::default()
        };
        let result =
            ehz::clarke_dual_solve(body, &options).map_err(|e| CliError::Usage(e.to_string()))?;
        println!("{}", result.capacity);
        eprintln!(
            "solver: {} of {} restarts converged, gradient norm {:.2e}",
            result.converged_restarts,
            options.restarts,
            result.gradient_norm
        );
        return Ok(());
    }
    match body.kind().closed_form_ehz() {
        Some(c) => {
            println!("{c}");
            Ok(())
        }
        None => Err(CliError::Usage(
            "no closed-form capacity for this body; try --solver for smooth bodies, \
             or a toric spec for lattice capacities"
                .into(),
        )),
    }
}

fn volume(args: VolumeArgs) -> Result<(), CliError> {
    let parsed = load_spec(&args.spec)?;
    let body = parsed.body();
    match (body.closed_form_volume(), args.mc) {
        (Some(v), false) => {
            println!("{v}");
            Ok(())
        }
        _ => {
            if args.samples == 0 {
                return Err(CliError::Usage("need at least one sample".into()));
            }
            let est = caplab_core::bodies::volume_monte_carlo(body, args.samples, args.seed);
            println!("{}", est.value);
            eprintln!("monte carlo: std error {:.3e} over {} samples", est.std_error, est.samples);
            Ok(())
        }
    }
}

fn systolic(args: SystolicArgs) -> Result<(), CliError> {
    let parsed = load_spec(&args.spec)?;
    let body = parsed.body();
    if body.dim() % 2 != 0 {
        return Err(CliError::Usage(format!(
            "systolic ratio needs an even-dimensional body, got dim {}",
            body.dim()
        )));
    }
    let capacity = if let Some(profile) = parsed.profile() {
        gh::capacity(profile, 1).map_err(|e| CliError::Usage(e.to_string()))?
    } else {
        body.kind().closed_form_ehz().ok_or_else(|| {
            CliError::Usage("no closed-form capacity for this body".into())
        })?
    };
    let volume = body
        .closed_form_volume()
        .ok_or_else(|| CliError::Usage("no closed-form volume for this body".into()))?;
    println!("{}", caplab_core::systolic::systolic_ratio(capacity, volume, body.half_dim()));
    Ok(())
}

fn cinf(args: CinfArgs) -> Result<(), CliError> {
    let parsed = load_spec(&args.spec)?;
    let profile = parsed
        .profile()
        .ok_or_else(|| CliError::Usage("cinf needs a toric spec".into()))?;
    let estimate = gh::c_infinity_estimate(|k| gh::capacity(profile, k), args.kmax)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    println!("{}", estimate.estimate);
    eprintln!(
        "tail slope {:.3e} over k in [{}, {}]; cube capacity {}",
        estimate.tail_slope,
        estimate.samples.first().map(|(k, _)| *k).unwrap_or(0),
        args.kmax,
        gh::cube_capacity(profile)
    );
    Ok(())
}

fn run_verify(args: VerifyArgs) -> Result<(), CliError> {
    let report = verify::run_verification_suite(&args.checks, args.seed)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let emitted = if args.timings { report.clone() } else { report.without_timings() };
    if let Some(path) = &args.out {
        let payload = match args.format {
            Format::Json | Format::Table => emitted.to_json(),
            Format::Csv => emitted.to_csv(),
        };
        std::fs::write(path, payload)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    match args.format {
        Format::Json => println!("{}", emitted.to_json()),
        Format::Csv => print!("{}", emitted.to_csv()),
        Format::Table => print!("{}", report.to_table()),
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::CheckFailure)
    }
}

fn report(args: ReportArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", args.input.display())))?;
    let report = VerificationReport::from_json(&text)
        .map_err(|e| CliError::Usage(format!("not a report file: {e}")))?;
    let payload = match args.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
        Format::Table => report.to_table(),
    };
    match &args.out {
        Some(path) => std::fs::write(path, payload)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{payload}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_mapping() {
        assert_eq!(CliError::CheckFailure.exit_code(), 1);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::Invariant("x".into()).exit_code(), 3);
        assert_eq!(CliError::Io("x".into()).exit_code(), 4);
        // Spec invariant violations map to exit 3, schema errors to 2.
        let invariant: CliError = SpecError::Invariant("bad".into()).into();
        assert_eq!(invariant.exit_code(), 3);
        let schema: CliError = SpecError::Schema("bad".into()).into();
        assert_eq!(schema.exit_code(), 2);
    }
}
