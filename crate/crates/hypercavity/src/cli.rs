//! `hypercavity` command line. Exit codes: 0 success, 1 usage or input
//! error, 2 reference mismatch or failed self-check, 3 script parse failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hypercavity_core::interactions::PhaseConvention;
use hypercavity_core::noise::{evolve, uniform_grid, NoiseMode, NoiseParams};
use hypercavity_core::params::PhysicalParams;
use hypercavity_core::protocol::{self, execute, ProtocolTrace, Script, TimeExpr, MAX_CHAIN, MAX_RING, MIN_RING};
use hypercavity_core::StateVector;

use crate::export::{self, StateDump, TraceOptions};
use crate::presets::{Loaded, Preset};
use crate::{dsl, oracle};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "HYPERCAVITY_OUT";
const DEFAULT_OUT: &str = "hypercavity-out";

#[derive(Debug, Parser)]
#[command(name = "hypercavity", version, about = "Exact simulation of cavity-QED hyperentangled graph-state protocols")]
struct Cli {
    /// Output directory [default: $HYPERCAVITY_OUT, else ./hypercavity-out]
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a built-in protocol and compare every outcome with its reference state
    Protocol(ProtocolArgs),
    /// Parse and execute a .qproto script
    Run(RunArgs),
    /// Entanglement-witness dynamics under frozen or telegraph noise
    Noise(NoiseArgs),
    /// Run every built-in protocol and tabulate reference agreement
    Verify(VerifyArgs),
    /// Check tensor-structured gates against dense Kronecker products
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProtocolName {
    TagChain,
    LinearCluster,
    #[value(name = "cluster-2d")]
    Cluster2d,
    RingGraph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Convention {
    Paper,
    Hamiltonian,
}

impl From<Convention> for PhaseConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Paper => PhaseConvention::Paper,
            Convention::Hamiltonian => PhaseConvention::Hamiltonian,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PresetArg {
    Natural,
    Rb85,
    Helium,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Frozen,
    Telegraph,
}

#[derive(Debug, Args)]
struct ExecOpts {
    #[arg(long, value_enum, default_value = "paper")]
    convention: Convention,
    #[arg(long, value_enum, default_value = "natural")]
    preset: PresetArg,
    /// Vacuum Rabi frequency μ
    #[arg(long)]
    mu: Option<f64>,
    /// Atom–field detuning Δ
    #[arg(long)]
    delta: Option<f64>,
    /// Recoil frequency ω_r
    #[arg(long)]
    omega_r: Option<f64>,
    /// Dispersive coupling λ
    #[arg(long)]
    lambda: Option<f64>,
    /// Classical Rabi frequency Ω
    #[arg(long)]
    omega: Option<f64>,
    /// Amplitudes at or below this are left out of state dumps and reports
    #[arg(long, default_value_t = 1e-9)]
    threshold: f64,
    /// Tolerance for reference agreement
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Include gate matrices in the step log
    #[arg(long)]
    gates: bool,
}

#[derive(Debug, Args)]
struct ProtocolArgs {
    #[arg(value_enum)]
    name: ProtocolName,
    /// Number of atoms (tag-chain) or ring size (ring-graph)
    #[arg(short = 'n')]
    n: Option<usize>,
    /// Link time for linear-cluster / cluster-2d (endpoint, pi/lambda, pi/2lambda, pi/omega or a number)
    #[arg(long)]
    link_time: Option<String>,
    #[command(flatten)]
    exec: ExecOpts,
}

#[derive(Debug, Args)]
struct RunArgs {
    script: PathBuf,
    #[command(flatten)]
    exec: ExecOpts,
}

#[derive(Debug, Args)]
struct NoiseArgs {
    /// Comma-separated coupling values; one output file per value
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,1")]
    lambda: Vec<f64>,
    #[arg(long, default_value_t = 10.0)]
    t_max: f64,
    /// Number of grid points on [0, t-max]
    #[arg(long, default_value_t = 1001)]
    grid: usize,
    #[arg(long, value_enum, default_value = "frozen")]
    mode: Mode,
    /// Trajectories (telegraph mode)
    #[arg(long, default_value_t = 200)]
    traj: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Telegraph flip rate γ
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Common energy shift ξ
    #[arg(long, default_value_t = 0.0)]
    xi: f64,
    /// Per-qubit initial Δ values (±1), comma-separated [default: all +1]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    delta: Option<Vec<f64>>,
    /// Witness state: a linear-cluster outcome block (gg, ge, eg, ee) or a JSON state dump
    #[arg(long, default_value = "gg")]
    state: String,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    exec: ExecOpts,
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Skip layouts and protocol steps above this total dimension
    #[arg(long, default_value_t = 4096)]
    max_dim: usize,
    /// Corrupt the dense references (negative control; must fail)
    #[arg(long)]
    inject_fault: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// A failure that ends the command with a given exit code.
struct Exit(i32, String);

fn usage(msg: impl Into<String>) -> Exit {
    Exit(EXIT_USAGE, msg.into())
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

macro_rules! say {
    ($io:expr, $($arg:tt)*) => {{ let _ = writeln!($io.out, $($arg)*); }};
}

/// Runs the CLI on `args` (including the program name).
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(out, "{text}");
                    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { EXIT_USAGE } else { EXIT_OK }
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let out_dir = cli
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let mut io = Io { out, err };
    let r = match cli.command {
        Command::Protocol(a) => cmd_protocol(a, &out_dir, &mut io),
        Command::Run(a) => cmd_run(a, &out_dir, &mut io),
        Command::Noise(a) => cmd_noise(a, &out_dir, &mut io),
        Command::Verify(a) => cmd_verify(a, &mut io),
        Command::Oracle(a) => cmd_oracle(a, &mut io),
    };
    match r {
        Ok(code) => code,
        Err(Exit(code, msg)) => {
            let _ = writeln!(io.err, "error: {msg}");
            code
        }
    }
}

fn params(o: &ExecOpts) -> Result<PhysicalParams, Exit> {
    Ok(loaded(o)?.params)
}

/// Parameters after overrides, with the preset's seconds per time unit.
fn loaded(o: &ExecOpts) -> Result<Loaded, Exit> {
    let preset = match o.preset {
        PresetArg::Natural => Preset::Natural,
        PresetArg::Rb85 => Preset::Rb85,
        PresetArg::Helium => Preset::Helium,
    };
    let Loaded { params: mut p, time_unit_s } = preset.load();
    let set = |slot: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *slot = v;
        }
    };
    set(&mut p.mu, o.mu);
    set(&mut p.delta, o.delta);
    set(&mut p.omega_r, o.omega_r);
    set(&mut p.lambda_disp, o.lambda);
    set(&mut p.omega_classical, o.omega);
    p.validate().map_err(|e| usage(e.to_string()))?;
    Ok(Loaded { params: p, time_unit_s })
}

fn builtin(a: &ProtocolArgs) -> Result<(String, Script), Exit> {
    let link = a.link_time.as_deref().map(dsl::parse_time).transpose().map_err(usage)?;
    let no_n = |name: &str| -> Result<(), Exit> {
        match a.n {
            Some(_) => Err(usage(format!("{name} takes no -n"))),
            None => Ok(()),
        }
    };
    if link.is_some() && matches!(a.name, ProtocolName::TagChain | ProtocolName::RingGraph) {
        return Err(usage("--link-time applies to linear-cluster and cluster-2d only"));
    }
    Ok(match a.name {
        ProtocolName::TagChain => {
            let n = a.n.ok_or_else(|| usage(format!("tag-chain requires -n (1 to {MAX_CHAIN})")))?;
            if !(1..=MAX_CHAIN).contains(&n) {
                return Err(usage(format!("tag-chain -n must be between 1 and {MAX_CHAIN}, got {n}")));
            }
            (format!("tag-chain-{n}"), protocol::tag_chain_script(n).map_err(|e| usage(e.to_string()))?)
        }
        ProtocolName::LinearCluster => {
            no_n("linear-cluster")?;
            ("linear-cluster".into(), protocol::linear_cluster_script(link.unwrap_or(TimeExpr::PiOverLambda)))
        }
        ProtocolName::Cluster2d => {
            no_n("cluster-2d")?;
            ("cluster-2d".into(), protocol::cluster_2d_script(link.unwrap_or(TimeExpr::PiOver2Lambda)))
        }
        ProtocolName::RingGraph => {
            let n = a.n.ok_or_else(|| usage(format!("ring-graph requires -n ({MIN_RING} to {MAX_RING})")))?;
            if n < MIN_RING {
                return Err(usage(format!(
                    "ring-graph needs j ⩾ {MIN_RING} atoms (the ring closes through at least two cavities), got -n {n}"
                )));
            }
            if n > MAX_RING {
                return Err(usage(format!("ring-graph -n is capped at {MAX_RING}, got {n}")));
            }
            (format!("ring-graph-{n}"), protocol::ring_graph_script(n).map_err(|e| usage(e.to_string()))?)
        }
    })
}

/// `true` when every compared outcome matches its reference exactly.
fn reports_match(t: &ProtocolTrace, tol: f64) -> bool {
    t.reports
        .iter()
        .flatten()
        .all(|r| (r.branch_magnitude_fidelity - 1.0).abs() <= tol && (r.fidelity - 1.0).abs() <= tol)
}

fn summarize(name: &str, t: &ProtocolTrace, tol: f64, io: &mut Io<'_>) -> bool {
    say!(
        io,
        "{name} ({}): {} outcome(s), total probability {:.12}, reference {}",
        t.convention.name(),
        t.outcomes.len(),
        t.total_probability(),
        t.reference.map(|r| r.name()).unwrap_or("none")
    );
    say!(io, "  {:<14} {:>14} {:>14} {:>14} {:>10}", "outcome", "probability", "fidelity", "bmf", "spread");
    let mut all = true;
    for (o, r) in t.outcomes.iter().zip(&t.reports) {
        let label = if o.assignments.is_empty() { "-".to_string() } else { o.label() };
        match r {
            Some(r) => {
                let ok = (r.branch_magnitude_fidelity - 1.0).abs() <= tol && (r.fidelity - 1.0).abs() <= tol;
                all &= ok;
                say!(
                    io,
                    "  {:<14} {:>14.12} {:>14.12} {:>14.12} {:>10.6}{}",
                    label,
                    o.probability,
                    r.fidelity,
                    r.branch_magnitude_fidelity,
                    r.relative_phase_spread(),
                    if ok { "" } else { "  MISMATCH" }
                );
            }
            None => say!(io, "  {:<14} {:>14.12} {:>14} {:>14} {:>10}", label, o.probability, "-", "-", "-"),
        }
    }
    for rem in t.removals() {
        say!(io, "  removed {} (purity {:.12})", rem.label, rem.purity);
    }
    if !all {
        say!(io, "phase residuals of mismatched outcomes:");
        for (o, r) in t.outcomes.iter().zip(&t.reports) {
            let Some(r) = r else { continue };
            if (r.branch_magnitude_fidelity - 1.0).abs() <= tol && (r.fidelity - 1.0).abs() <= tol {
                continue;
            }
            let label = if o.assignments.is_empty() { "-".to_string() } else { o.label() };
            say!(io, "  {label} (bmf {:.12}):", r.branch_magnitude_fidelity);
            for p in &r.phase_residuals {
                say!(io, "    |{}⟩  {:+.6} rad ({:+.4}π)", p.label, p.phase, p.phase / std::f64::consts::PI);
            }
            for m in &r.support_mismatch {
                say!(io, "    |{m}⟩  present in only one state");
            }
        }
    }
    all
}

fn finish(name: &str, t: &ProtocolTrace, dir: &Path, o: &ExecOpts, io: &mut Io<'_>) -> Result<i32, Exit> {
    let ok = summarize(name, t, o.tol, io);
    if let Some(unit) = loaded(o)?.time_unit_s {
        let total: f64 = t.steps.iter().filter_map(|s| s.time).sum();
        say!(io, "  time unit {unit:.6e} s; interaction time {total:.6} = {:.6e} s", total * unit);
        for s in t.steps.iter().filter(|s| s.time.is_some_and(|x| x > 0.0)) {
            let x = s.time.unwrap_or(0.0);
            say!(io, "    {:<40} {:>12.6} = {:.4e} s", s.description, x, x * unit);
        }
    }
    let opts = TraceOptions { threshold: o.threshold, include_gates: o.gates };
    let files = export::write_trace(dir, t, opts).map_err(|e| usage(format!("cannot write to {}: {e}", dir.display())))?;
    for f in files {
        say!(io, "wrote {}", f.display());
    }
    Ok(if ok { EXIT_OK } else { EXIT_MISMATCH })
}

fn cmd_protocol(a: ProtocolArgs, out: &Path, io: &mut Io<'_>) -> Result<i32, Exit> {
    let (name, script) = builtin(&a)?;
    let p = params(&a.exec)?;
    let t = execute(&script, a.exec.convention.into(), &p).map_err(|e| usage(e.to_string()))?;
    finish(&name, &t, &out.join(&name), &a.exec, io)
}

fn cmd_run(a: RunArgs, out: &Path, io: &mut Io<'_>) -> Result<i32, Exit> {
    let src = std::fs::read_to_string(&a.script).map_err(|e| usage(format!("cannot read {}: {e}", a.script.display())))?;
    let script = match dsl::parse(&src) {
        Ok(s) => s,
        Err(diags) => {
            for d in &diags {
                let _ = writeln!(io.err, "{}:{d}", a.script.display());
            }
            let _ = writeln!(io.err, "{} diagnostic(s); nothing executed", diags.len());
            return Ok(EXIT_PARSE);
        }
    };
    let p = params(&a.exec)?;
    let t = execute(&script, a.exec.convention.into(), &p).map_err(|e| usage(format!("{}: {e}", a.script.display())))?;
    let stem = a.script.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "script".into());
    finish(&stem, &t, &out.join(&stem), &a.exec, io)
}

fn witness_state(spec: &str) -> Result<StateVector, Exit> {
    let digits = match spec {
        "gg" => Some([0, 0]),
        "ge" => Some([0, 1]),
        "eg" => Some([1, 0]),
        "ee" => Some([1, 1]),
        _ => None,
    };
    if let Some(d) = digits {
        let t = protocol::linear_cluster(PhaseConvention::Paper, TimeExpr::PiOverLambda, &PhysicalParams::default())
            .map_err(|e| usage(e.to_string()))?;
        return t
            .outcome(&d)
            .and_then(|(_, o)| o.post_state.clone())
            .ok_or_else(|| usage(format!("outcome {spec} has no state")));
    }
    let text = std::fs::read_to_string(spec).map_err(|e| usage(format!("--state: expected gg, ge, eg, ee or a JSON state dump; {spec}: {e}")))?;
    let dump: StateDump = serde_json::from_str(&text).map_err(|e| usage(format!("{spec}: {e}")))?;
    dump.to_state().map_err(|e| usage(format!("{spec}: {e}")))
}

fn cmd_noise(a: NoiseArgs, out: &Path, io: &mut Io<'_>) -> Result<i32, Exit> {
    if a.lambda.is_empty() || a.lambda.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(usage("--lambda values must be positive"));
    }
    let mode = match a.mode {
        Mode::Frozen => NoiseMode::Frozen,
        Mode::Telegraph => NoiseMode::Telegraph,
    };
    if mode == NoiseMode::Telegraph {
        if a.traj == 0 {
            return Err(usage("--traj must be at least 1 in telegraph mode"));
        }
        if !(a.gamma > 0.0 && a.gamma.is_finite()) {
            return Err(usage("--gamma must be positive in telegraph mode"));
        }
    }
    let grid = uniform_grid(a.t_max, a.grid).map_err(|e| usage(format!("invalid grid: {e}")))?;
    let w = witness_state(&a.state)?;
    let qubits = w.layout().len();
    let deltas = a.delta.clone().unwrap_or_else(|| vec![1.0; qubits]);
    if deltas.len() != qubits {
        return Err(usage(format!("--delta needs {qubits} values, got {}", deltas.len())));
    }
    let start = Instant::now();
    let dir = out.join("noise");
    for &lambda in &a.lambda {
        let mut p = NoiseParams::frozen(lambda, qubits, grid.clone());
        p.deltas = deltas.clone();
        p.xi = a.xi;
        p.seed = a.seed;
        if mode == NoiseMode::Telegraph {
            p.flip_rate = a.gamma;
            p.n_traj = a.traj;
        }
        let s = evolve(&w, &p).map_err(|e| usage(e.to_string()))?;
        let crossings = s.ew.windows(2).filter(|w| (w[0] < 0.0) != (w[1] < 0.0)).count();
        let (lo, hi) = s.ew.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &e| (lo.min(e), hi.max(e)));
        say!(io, "λ={lambda} ({}): EW in [{lo:.6}, {hi:.6}], {crossings} sign change(s)", mode.name());
        let stem = format!("ew_{}_lambda_{lambda}", mode.name());
        let files = export::write_witness(&dir, &stem, &s, &a.state).map_err(|e| usage(format!("cannot write to {}: {e}", dir.display())))?;
        for f in files {
            say!(io, "wrote {}", f.display());
        }
    }
    say!(io, "{} series in {:.3} s", a.lambda.len(), start.elapsed().as_secs_f64());
    Ok(EXIT_OK)
}

fn cmd_verify(a: VerifyArgs, io: &mut Io<'_>) -> Result<i32, Exit> {
    let p = params(&a.exec)?;
    let conv: PhaseConvention = a.exec.convention.into();
    let mut jobs: Vec<(String, Script)> = Vec::new();
    for n in 1..=MAX_CHAIN {
        jobs.push((format!("tag-chain-{n}"), protocol::tag_chain_script(n).expect("within cap")));
    }
    jobs.push(("linear-cluster".into(), protocol::linear_cluster_script(TimeExpr::PiOverLambda)));
    jobs.push(("cluster-2d".into(), protocol::cluster_2d_script(TimeExpr::PiOver2Lambda)));
    for n in MIN_RING..=MAX_RING {
        jobs.push((format!("ring-graph-{n}"), protocol::ring_graph_script(n).expect("within cap")));
    }
    say!(io, "{:<16} {:>9} {:>14} {:>14} {:>9}  result", "protocol", "outcomes", "min fidelity", "min bmf", "seconds");
    let mut failed = 0;
    for (name, script) in jobs {
        let start = Instant::now();
        let t = execute(&script, conv, &p).map_err(|e| usage(format!("{name}: {e}")))?;
        let min = |f: fn(&hypercavity_core::analysis::CompareReport) -> f64| t.reports.iter().flatten().map(f).fold(f64::INFINITY, f64::min);
        let ok = reports_match(&t, a.exec.tol);
        failed += usize::from(!ok);
        say!(
            io,
            "{:<16} {:>9} {:>14.12} {:>14.12} {:>9.3}  {}",
            name,
            t.outcomes.len(),
            min(|r| r.fidelity),
            min(|r| r.branch_magnitude_fidelity),
            start.elapsed().as_secs_f64(),
            if ok { "PASS" } else { "FAIL" }
        );
    }
    Ok(if failed == 0 { EXIT_OK } else { EXIT_MISMATCH })
}

fn cmd_oracle(a: OracleArgs, io: &mut Io<'_>) -> Result<i32, Exit> {
    let cfg = oracle::OracleConfig { max_dim: a.max_dim, inject_fault: a.inject_fault, seed: a.seed };
    let start = Instant::now();
    let results = oracle::run(&cfg);
    say!(io, "{:<48} {:>6} {:>8} {:>12} {:>8}  result", "suite", "cases", "skipped", "max dev", "tol");
    for r in &results {
        say!(
            io,
            "{:<48} {:>6} {:>8} {:>12.3e} {:>8.0e}  {}",
            r.name,
            r.cases,
            r.skipped,
            r.max_deviation,
            r.tolerance,
            if r.passed() { "PASS" } else { "FAIL" }
        );
        for f in r.failures.iter().take(5) {
            say!(io, "    {f}");
        }
        if r.failures.len() > 5 {
            say!(io, "    … {} more", r.failures.len() - 5);
        }
    }
    say!(io, "max dimension {}, {:.3} s", cfg.max_dim, start.elapsed().as_secs_f64());
    Ok(if results.iter().all(oracle::SuiteResult::passed) { EXIT_OK } else { EXIT_MISMATCH })
}
