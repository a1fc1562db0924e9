//! Batch experiment runner: the doped-circuit and Ising-quench simulations
//! plus the closed-form step distribution, each emitting a versioned CSV and
//! a JSON sidecar with the full configuration for reproducibility.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use camps_core::analytics;
use camps_core::dynamics::{evolve_camps, QuenchConfig};
use camps_core::experiments::{run_doped_circuit, DopedCircuitConfig};
use camps_core::pauli::PauliAxis;
use camps_core::records;

#[derive(Parser)]
#[command(name = "camps", version, about = "CAMPS simulation experiments")]
struct Cli {
    /// Worker threads for instance-level parallelism (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Deep random Clifford layers doped with one phase gate per step.
    Circuit(CircuitArgs),
    /// Ising quench from the +Y product state with TDVP and disentangling.
    Hamiltonian(HamiltonianArgs),
    /// Closed-form distribution of the last fully disentanglable step.
    Analytics(AnalyticsArgs),
    /// Aggregate trajectory CSVs: per-step means and standard deviations.
    Summarize(SummarizeArgs),
}

#[derive(Args, Serialize)]
struct OutputArgs {
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,

    /// Overwrite an existing output file.
    #[arg(long)]
    force: bool,
}

/// Doping gate: `t` (φ = -π/8 about Z), `sqrt_t` (φ = -π/16), or
/// `phase:<φ>` with an explicit angle in radians.
#[derive(Clone, Copy, Debug, Serialize)]
enum GateKind {
    T,
    SqrtT,
    Phase(f64),
}

impl GateKind {
    fn angle(self) -> f64 {
        match self {
            GateKind::T => -std::f64::consts::FRAC_PI_8,
            GateKind::SqrtT => -std::f64::consts::FRAC_PI_8 / 2.0,
            GateKind::Phase(phi) => phi,
        }
    }
}

fn parse_gate_kind(raw: &str) -> Result<GateKind, String> {
    match raw {
        "t" => Ok(GateKind::T),
        "sqrt_t" | "sqrt-t" => Ok(GateKind::SqrtT),
        _ => {
            let phi: f64 = raw
                .strip_prefix("phase:")
                .ok_or_else(|| format!("unknown gate {raw:?}; use t, sqrt_t, or phase:<angle>"))?
                .parse()
                .map_err(|e| format!("bad phase angle in {raw:?}: {e}"))?;
            if !(phi > -std::f64::consts::PI && phi <= std::f64::consts::PI) {
                return Err("phase angle must lie in (-pi, pi]".into());
            }
            Ok(GateKind::Phase(phi))
        }
    }
}

#[derive(Args, Serialize)]
struct CircuitArgs {
    /// Number of qubits (at least 2).
    #[arg(long)]
    n: usize,

    /// Layer+gate steps per instance.
    #[arg(long)]
    steps: usize,

    /// Doping gate: `t`, `sqrt_t`, or `phase:<angle>` (radians, about Z).
    #[arg(long, default_value = "t", value_parser = parse_gate_kind)]
    gate: GateKind,

    /// Independent circuit instances.
    #[arg(long)]
    instances: usize,

    /// Master random seed (mandatory: runs are reproducible by contract).
    #[arg(long)]
    seed: u64,

    #[arg(long, default_value_t = 256)]
    chi_max: usize,

    #[arg(long, default_value_t = 1e-12)]
    svd_cutoff: f64,

    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct HamiltonianArgs {
    /// Number of sites (at least 2).
    #[arg(long)]
    n: usize,

    /// Transverse field strength.
    #[arg(long)]
    hx: f64,

    #[arg(long, default_value_t = 0.5)]
    hz: f64,

    /// Nearest-neighbor XX coupling (the frequency reference).
    #[arg(long, default_value_t = 1.0)]
    j: f64,

    #[arg(long, default_value_t = 0.05)]
    dt: f64,

    #[arg(long)]
    t_max: f64,

    #[arg(long, default_value_t = 256)]
    chi_max: usize,

    #[arg(long, default_value_t = 1e-10)]
    svd_cutoff: f64,

    /// Disentangle every this many steps (0 disables).
    #[arg(long, default_value_t = 1)]
    disentangle_every: usize,

    /// Trotter slice for matchgate back-propagation.
    #[arg(long, default_value_t = 0.0125)]
    trotter_dt: f64,

    /// Skip the matchgate back-propagation column.
    #[arg(long)]
    no_backprop: bool,

    /// Master random seed, recorded for provenance (the quench itself is
    /// deterministic).
    #[arg(long)]
    seed: u64,

    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct AnalyticsArgs {
    /// System size for the finite-size distribution.
    #[arg(long)]
    n: usize,

    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct SummarizeArgs {
    /// Trajectory CSVs with a common schema.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,

    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

enum CliError {
    /// Invalid configuration or I/O precondition; exit code 2.
    Config(String),
    /// Simulation failure; exit code 3.
    Numerical(String),
}

impl CliError {
    fn report(self) -> ExitCode {
        match self {
            CliError::Config(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
            CliError::Numerical(msg) => {
                eprintln!("numerical failure: {msg}");
                ExitCode::from(3)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return CliError::Config("--threads must be positive".into()).report();
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            return CliError::Config(format!("thread pool: {e}")).report();
        }
    }
    let result = match cli.command {
        Command::Circuit(args) => run_circuit(args),
        Command::Hamiltonian(args) => run_hamiltonian(args),
        Command::Analytics(args) => run_analytics(args),
        Command::Summarize(args) => run_summarize(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}

fn run_circuit(args: CircuitArgs) -> Result<(), CliError> {
    if args.n < 2 {
        return Err(CliError::Config("circuit needs --n of at least 2".into()));
    }
    if args.steps == 0 || args.instances == 0 {
        return Err(CliError::Config(
            "--steps and --instances must be positive".into(),
        ));
    }
    if args.chi_max == 0 {
        return Err(CliError::Config("--chi-max must be positive".into()));
    }
    if !args.svd_cutoff.is_finite() || args.svd_cutoff < 0.0 {
        return Err(CliError::Config("--svd-cutoff must be non-negative".into()));
    }
    let phi = args.gate.angle();
    check_output(&args.output)?;
    let cfg = DopedCircuitConfig {
        n: args.n,
        steps: args.steps,
        phi,
        axis: PauliAxis::Z,
        instances: args.instances,
        seed: args.seed,
        chi_max: args.chi_max,
        svd_cutoff: args.svd_cutoff,
    };
    let recs = run_doped_circuit::<f64>(&cfg);
    write_outputs(
        &args.output,
        &records::to_csv(&recs),
        &sidecar("circuit", &args),
    )?;
    println!("wrote {} rows to {}", recs.len(), args.output.out.display());
    Ok(())
}

fn run_hamiltonian(args: HamiltonianArgs) -> Result<(), CliError> {
    if args.n < 2 {
        return Err(CliError::Config(
            "hamiltonian needs --n of at least 2".into(),
        ));
    }
    if !args.dt.is_finite() || args.dt <= 0.0 || args.t_max < args.dt {
        return Err(CliError::Config("need --dt > 0 and --t-max >= --dt".into()));
    }
    if !args.trotter_dt.is_finite() || args.trotter_dt <= 0.0 {
        return Err(CliError::Config("--trotter-dt must be positive".into()));
    }
    if args.chi_max == 0 {
        return Err(CliError::Config("--chi-max must be positive".into()));
    }
    check_output(&args.output)?;
    let cfg = QuenchConfig {
        n: args.n,
        j_coupling: args.j,
        h_x: args.hx,
        h_z: args.hz,
        dt: args.dt,
        t_max: args.t_max,
        chi_max: args.chi_max,
        svd_cutoff: args.svd_cutoff,
        disentangle_every: args.disentangle_every,
        trotter_dt: args.trotter_dt,
        variant: camps_core::dynamics::TdvpVariant::TwoSite,
        track_backprop: !args.no_backprop,
    };
    let out = evolve_camps::<f64>(&cfg).map_err(|e| CliError::Numerical(e.to_string()))?;
    write_outputs(
        &args.output,
        &records::to_csv(&out.records),
        &sidecar("hamiltonian", &args),
    )?;
    println!(
        "wrote {} rows to {}",
        out.records.len(),
        args.output.out.display()
    );
    Ok(())
}

fn run_analytics(args: AnalyticsArgs) -> Result<(), CliError> {
    if args.n == 0 {
        return Err(CliError::Config("analytics needs --n of at least 1".into()));
    }
    check_output(&args.output)?;
    let dist = analytics::disentanglable_dist(args.n);
    let mut csv = String::from("# schema: camps-analytics-v1\nt,pr_n,pr_asymptotic\n");
    for (t, p) in dist.probs.iter().enumerate() {
        let _ = writeln!(csv, "{},{},{}", t, p, analytics::asymptotic_pr(args.n - t));
    }
    write_outputs(&args.output, &csv, &sidecar("analytics", &args))?;
    println!(
        "wrote {} rows to {}",
        dist.probs.len(),
        args.output.out.display()
    );
    Ok(())
}

fn run_summarize(args: SummarizeArgs) -> Result<(), CliError> {
    check_output(&args.output)?;
    let mut all = Vec::new();
    for path in &args.inputs {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let recs = records::from_csv(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        all.extend(recs);
    }
    if all.is_empty() {
        return Err(CliError::Config("no records in the input files".into()));
    }
    let rows = records::summarize(&all);
    write_outputs(
        &args.output,
        &records::summary_to_csv(&rows),
        &sidecar("summarize", &args),
    )?;
    println!("wrote {} rows to {}", rows.len(), args.output.out.display());
    Ok(())
}

fn check_output(out: &OutputArgs) -> Result<(), CliError> {
    if out.out.exists() && !out.force {
        return Err(CliError::Config(format!(
            "output {} exists; pass --force to overwrite",
            out.out.display()
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct Sidecar<'a, C: Serialize> {
    command: &'a str,
    version: &'a str,
    config: &'a C,
}

fn sidecar<C: Serialize>(command: &str, config: &C) -> String {
    let payload = Sidecar {
        command,
        version: env!("CARGO_PKG_VERSION"),
        config,
    };
    serde_json::to_string_pretty(&payload).expect("config serializes")
}

/// Writes CSV + JSON sidecar atomically: temp file, then rename.
fn write_outputs(out: &OutputArgs, csv: &str, sidecar_json: &str) -> Result<(), CliError> {
    atomic_write(&out.out, csv)?;
    let mut sidecar_path = out.out.clone().into_os_string();
    sidecar_path.push(".json");
    atomic_write(Path::new(&sidecar_path), sidecar_json)?;
    Ok(())
}

fn atomic_write(path: &Path, contents: &str) -> Result<(), CliError> {
    let mut tmp = path.to_path_buf().into_os_string();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents)
        .map_err(|e| CliError::Config(format!("{}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
