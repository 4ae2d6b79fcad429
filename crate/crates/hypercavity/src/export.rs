//! JSON and CSV artifacts. Every JSON document carries `schema_version`;
//! floats are written in their shortest round-trip form, and nothing
//! depends on wall-clock time, so re-running a command reproduces its files
//! byte for byte.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use hypercavity_core::analysis::{CompareReport, DEFAULT_THRESHOLD};
use hypercavity_core::noise::WitnessSeries;
use hypercavity_core::params::PhysicalParams;
use hypercavity_core::protocol::ProtocolTrace;
use hypercavity_core::{GateOp, StateVector, Subsystem, SubsystemKind, SubsystemLayout, C64};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsystemDto {
    pub label: String,
    pub kind: String,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeDto {
    pub basis: Vec<String>,
    pub re: f64,
    pub im: f64,
}

/// Layout plus the amplitudes whose modulus exceeds `threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDump {
    pub layout: Vec<SubsystemDto>,
    pub threshold: f64,
    pub amplitudes: Vec<AmplitudeDto>,
}

fn layout_dto(l: &SubsystemLayout) -> Vec<SubsystemDto> {
    l.subsystems()
        .iter()
        .map(|s| SubsystemDto { label: s.label.clone(), kind: s.kind.name().into(), dim: s.dim })
        .collect()
}

impl StateDump {
    pub fn new(s: &StateVector, threshold: f64) -> Self {
        let l = s.layout();
        let amplitudes = s
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > threshold)
            .map(|(i, a)| {
                let basis = l.digits(i).iter().zip(l.subsystems()).map(|(&d, sub)| sub.kind.basis_label(d, true)).collect();
                AmplitudeDto { basis, re: a.re, im: a.im }
            })
            .collect();
        StateDump { layout: layout_dto(l), threshold, amplitudes }
    }

    /// Rebuilds the (renormalized) state; dropped amplitudes come back as 0.
    pub fn to_state(&self) -> Result<StateVector, String> {
        let subs = self
            .layout
            .iter()
            .map(|s| {
                let kind = SubsystemKind::from_name(&s.kind).ok_or_else(|| format!("unknown subsystem kind `{}`", s.kind))?;
                Ok(Subsystem::new(s.label.clone(), kind, s.dim))
            })
            .collect::<Result<Vec<_>, String>>()?;
        let layout = SubsystemLayout::new(subs).map_err(|e| e.to_string())?;
        let mut amps = vec![C64::new(0.0, 0.0); layout.total_dim()];
        for a in &self.amplitudes {
            if a.basis.len() != layout.len() {
                return Err(format!("basis label {:?} does not match the layout", a.basis));
            }
            let digits = a
                .basis
                .iter()
                .zip(layout.subsystems())
                .map(|(b, s)| s.kind.parse_basis(b).filter(|&d| d < s.dim).ok_or_else(|| format!("bad basis label `{b}` for {}", s.label)))
                .collect::<Result<Vec<_>, String>>()?;
            amps[layout.flat_index(&digits)] = C64::new(a.re, a.im);
        }
        StateVector::new(layout, amps).map_err(|e| e.to_string())
    }
}

/// Row-major matrix of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateDump {
    pub targets: Vec<String>,
    pub dims: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl GateDump {
    pub fn new(g: &GateOp) -> Self {
        let m = g.matrix();
        let matrix = (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect();
        GateDump { targets: g.targets().to_vec(), dims: g.target_dims().to_vec(), matrix }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsDto {
    pub mu: f64,
    pub delta: f64,
    pub omega_r: f64,
    pub lambda: f64,
    pub omega: f64,
}

impl From<&PhysicalParams> for ParamsDto {
    fn from(p: &PhysicalParams) -> Self {
        ParamsDto { mu: p.mu, delta: p.delta, omega_r: p.omega_r, lambda: p.lambda_disp, omega: p.omega_classical }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualDto {
    pub basis: String,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDto {
    pub fidelity: f64,
    pub branch_magnitude_fidelity: f64,
    pub relative_phase_spread: f64,
    pub phase_residuals: Vec<ResidualDto>,
    pub support_mismatch: Vec<String>,
}

impl From<&CompareReport> for ReportDto {
    fn from(r: &CompareReport) -> Self {
        ReportDto {
            fidelity: r.fidelity,
            branch_magnitude_fidelity: r.branch_magnitude_fidelity,
            relative_phase_spread: r.relative_phase_spread(),
            phase_residuals: r.phase_residuals.iter().map(|p| ResidualDto { basis: p.label.clone(), phase: p.phase }).collect(),
            support_mismatch: r.support_mismatch.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovalDto {
    pub label: String,
    pub purity: f64,
    pub factor: StateDump,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepDto {
    pub index: usize,
    /// Line of the statement in the trace's `script` text.
    pub line: usize,
    pub statement: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub removal: Option<RemovalDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateDump>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentDto {
    pub subsystem: String,
    pub level: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDto {
    pub index: usize,
    pub label: String,
    pub assignments: Vec<AssignmentDto>,
    pub probability: f64,
    /// `false` for zero-probability outcomes, which have no state.
    pub possible: bool,
    pub state: Option<StateDump>,
    pub reference: Option<StateDump>,
    pub report: Option<ReportDto>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDto {
    pub schema_version: u32,
    pub convention: String,
    pub reference: Option<String>,
    pub params: ParamsDto,
    pub script: String,
    pub initial: StateDump,
    pub steps: Vec<StepDto>,
    pub pre_detection: StateDump,
    pub total_probability: f64,
    pub outcomes: Vec<OutcomeDto>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    pub threshold: f64,
    pub include_gates: bool,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { threshold: DEFAULT_THRESHOLD, include_gates: false }
    }
}

pub fn trace_dto(t: &ProtocolTrace, opts: TraceOptions) -> TraceDto {
    let dump = |s: &StateVector| StateDump::new(s, opts.threshold);
    // Steps are numbered by their position in the canonical script text, so
    // a built-in protocol and an equivalent file export identically.
    let first_step_line = t.script.settings.len() + t.script.declarations.len() + 1;
    let steps = t
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| StepDto {
            index: i,
            line: first_step_line + i,
            statement: s.description.clone(),
            kind: s.kind.keyword().into(),
            time: s.time,
            dim: s.layout.total_dim(),
            removal: s.removal.as_ref().map(|r| RemovalDto { label: r.label.clone(), purity: r.purity, factor: dump(&r.factor) }),
            gate: s.gate.as_ref().filter(|_| opts.include_gates).map(GateDump::new),
        })
        .collect();
    let layout = t.pre_detection.layout().clone();
    let outcomes = t
        .outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| OutcomeDto {
            index: i,
            label: o.label(),
            assignments: o
                .assignments
                .iter()
                .map(|(s, v)| {
                    let kind = layout.get(s).map(|x| x.kind).unwrap_or(SubsystemKind::Auxiliary);
                    AssignmentDto { subsystem: s.clone(), level: kind.basis_label(*v, true) }
                })
                .collect(),
            probability: o.probability,
            possible: o.is_possible(),
            state: o.post_state.as_ref().map(dump),
            reference: t.references[i].as_ref().map(dump),
            report: t.reports[i].as_ref().map(ReportDto::from),
        })
        .collect();
    TraceDto {
        schema_version: SCHEMA_VERSION,
        convention: t.convention.name().into(),
        reference: t.reference.map(|r| r.name().into()),
        params: (&t.params).into(),
        script: t.script.to_string(),
        initial: dump(&t.initial),
        steps,
        pre_detection: dump(&t.pre_detection),
        total_probability: t.total_probability(),
        outcomes,
    }
}

pub fn trace_json(t: &ProtocolTrace, opts: TraceOptions) -> String {
    let mut s = serde_json::to_string_pretty(&trace_dto(t, opts)).expect("trace serializes");
    s.push('\n');
    s
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// `outcome,probability,possible,fidelity,branch_magnitude_fidelity,relative_phase_spread,state_ref`
pub fn outcome_csv(t: &ProtocolTrace) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["outcome", "probability", "possible", "fidelity", "branch_magnitude_fidelity", "relative_phase_spread", "state_ref"])
        .expect("in-memory write");
    for (i, o) in t.outcomes.iter().enumerate() {
        let r = t.reports[i].as_ref();
        let state_ref = if o.is_possible() { format!("trace.json#/outcomes/{i}/state") } else { String::new() };
        w.write_record([
            o.label(),
            o.probability.to_string(),
            o.is_possible().to_string(),
            fmt_opt(r.map(|r| r.fidelity)),
            fmt_opt(r.map(|r| r.branch_magnitude_fidelity)),
            fmt_opt(r.map(|r| r.relative_phase_spread())),
            state_ref,
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// Writes `trace.json` and `outcomes.csv` into `dir`.
pub fn write_trace(dir: &Path, t: &ProtocolTrace, opts: TraceOptions) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let json = dir.join("trace.json");
    fs::write(&json, trace_json(t, opts))?;
    let csv = dir.join("outcomes.csv");
    fs::write(&csv, outcome_csv(t))?;
    Ok(vec![json, csv])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessMeta {
    pub schema_version: u32,
    pub mode: String,
    pub state: String,
    pub lambda: f64,
    pub xi: f64,
    pub deltas: Vec<f64>,
    pub flip_rate: f64,
    pub n_traj: u64,
    pub seed: u64,
    pub points: usize,
    pub t_max: f64,
    pub max_trace_deviation: f64,
    pub csv: String,
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// `# key=value …` line, then `time,ew,stderr` rows.
pub fn witness_csv(s: &WitnessSeries, state: &str) -> String {
    let p = &s.params;
    let mut out = format!(
        "# mode={} state={state} lambda={} xi={} deltas={} flip_rate={} n_traj={} seed={}\n",
        s.mode.name(),
        p.lambda_c,
        p.xi,
        join(&p.deltas),
        p.flip_rate,
        p.n_traj,
        p.seed
    );
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["time", "ew", "stderr"]).expect("in-memory write");
    for (i, (t, e)) in s.times.iter().zip(&s.ew).enumerate() {
        let se = s.stderr.as_ref().map(|v| v[i].to_string()).unwrap_or_default();
        w.write_record([t.to_string(), e.to_string(), se]).expect("in-memory write");
    }
    out.push_str(std::str::from_utf8(&w.into_inner().expect("flush")).expect("utf-8"));
    out
}

pub fn witness_meta(s: &WitnessSeries, state: &str, csv_name: &str) -> WitnessMeta {
    let p = &s.params;
    WitnessMeta {
        schema_version: SCHEMA_VERSION,
        mode: s.mode.name().into(),
        state: state.into(),
        lambda: p.lambda_c,
        xi: p.xi,
        deltas: p.deltas.clone(),
        flip_rate: p.flip_rate,
        n_traj: p.n_traj as u64,
        seed: p.seed,
        points: s.times.len(),
        t_max: s.times.last().copied().unwrap_or(0.0),
        max_trace_deviation: s.max_trace_deviation,
        csv: csv_name.into(),
    }
}

/// Writes `<stem>.csv` and `<stem>.json` into `dir`.
pub fn write_witness(dir: &Path, stem: &str, s: &WitnessSeries, state: &str) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let csv_name = format!("{stem}.csv");
    let csv = dir.join(&csv_name);
    fs::write(&csv, witness_csv(s, state))?;
    let json = dir.join(format!("{stem}.json"));
    let mut meta = serde_json::to_string_pretty(&witness_meta(s, state, &csv_name)).expect("meta serializes");
    meta.push('\n');
    fs::write(&json, meta)?;
    Ok(vec![csv, json])
}
