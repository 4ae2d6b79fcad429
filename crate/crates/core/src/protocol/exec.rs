//! Replays a [`Script`] through the interaction primitives.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::analysis::{compare, CompareReport, DEFAULT_THRESHOLD};
use crate::interactions::{
    bragg_gate, classical_pulse, dispersive_gate_with, jc_swap, ramsey_transform, DispersivePhases, PhaseConvention,
};
use crate::math::{real, ONE, ZERO};
use crate::measurement::{detect_all, split_off, DetectionOutcome};
use crate::params::PhysicalParams;
use crate::tensor::{atom_labels, GateOp, Subsystem, SubsystemKind, SubsystemLayout};
use crate::{Error, Result, StateVector};

use super::reference::{reference_state, ReferenceContext, ReferenceFamily};
use super::script::{CavityInit, Declaration, PaperTable, Script, Step, StepKind, TimeExpr};

/// States are kept per step only up to this dimension.
pub const SNAPSHOT_CAP: usize = 4096;

/// A subsystem factored out by a `remove` step.
#[derive(Debug, Clone, PartialEq)]
pub struct RemovalRecord {
    pub label: String,
    /// Purity of its reduced state before removal.
    pub purity: f64,
    pub factor: StateVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// Source line of the statement.
    pub line: usize,
    /// The statement as printed.
    pub description: String,
    pub kind: StepKind,
    /// Resolved interaction time, if the step has one.
    pub time: Option<f64>,
    /// The applied unitary, for interaction steps.
    pub gate: Option<GateOp>,
    /// Layout the step acted on.
    pub layout: SubsystemLayout,
    pub removal: Option<RemovalRecord>,
}

/// Everything a protocol run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolTrace {
    pub script: Script,
    pub convention: PhaseConvention,
    pub params: PhysicalParams,
    pub initial: StateVector,
    pub steps: Vec<StepRecord>,
    /// `snapshots[0]` is the initial state, `snapshots[k]` the state after
    /// step `k`; `None` above [`SNAPSHOT_CAP`] and for the detect step.
    pub snapshots: Vec<Option<StateVector>>,
    /// State right before detection (the final state if nothing is detected).
    pub pre_detection: StateVector,
    pub outcomes: Vec<DetectionOutcome>,
    pub reference: Option<ReferenceFamily>,
    /// One entry per outcome.
    pub references: Vec<Option<StateVector>>,
    pub reports: Vec<Option<CompareReport>>,
}

impl ProtocolTrace {
    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    /// Outcome whose detection digits equal `digits`.
    pub fn outcome(&self, digits: &[usize]) -> Option<(usize, &DetectionOutcome)> {
        self.outcomes
            .iter()
            .enumerate()
            .find(|(_, o)| o.assignments.iter().map(|(_, v)| *v).eq(digits.iter().copied()))
    }

    /// `true` when every compared outcome has branch-magnitude fidelity 1
    /// within `tol`.
    pub fn all_magnitudes_match(&self, tol: f64) -> bool {
        self.reports.iter().flatten().all(|r| (r.branch_magnitude_fidelity - 1.0).abs() <= tol)
    }

    /// Removal records in step order.
    pub fn removals(&self) -> impl Iterator<Item = &RemovalRecord> {
        self.steps.iter().filter_map(|s| s.removal.as_ref())
    }
}

fn initial_state(script: &Script) -> Result<StateVector> {
    let mut subs = Vec::new();
    let mut factors: Vec<Vec<crate::C64>> = Vec::new();
    let onehot = |dim: usize, i: usize, label: &str| -> Result<Vec<crate::C64>> {
        if i >= dim {
            return Err(Error::IndexOutOfRange { label: label.to_string(), index: i, dim });
        }
        let mut v = alloc::vec![ZERO; dim];
        v[i] = ONE;
        Ok(v)
    };
    for d in &script.declarations {
        let line = d.line;
        let push = |subs: &mut Vec<Subsystem>, factors: &mut Vec<_>, s: Subsystem, i: usize| -> Result<()> {
            factors.push(onehot(s.dim, i, &s.label)?);
            subs.push(s);
            Ok(())
        };
        let r = match &d.item {
            Declaration::Cavity { label, fock, init } => {
                let s = Subsystem::new(label.clone(), SubsystemKind::Cavity, *fock);
                match init {
                    CavityInit::Fock(n) => push(&mut subs, &mut factors, s, *n),
                    CavityInit::Plus => {
                        let mut v = alloc::vec![ZERO; *fock];
                        v[0] = real(core::f64::consts::FRAC_1_SQRT_2);
                        if *fock > 1 {
                            v[1] = real(core::f64::consts::FRAC_1_SQRT_2);
                        }
                        factors.push(v);
                        subs.push(s);
                        Ok(())
                    }
                }
            }
            Declaration::Atom { label, internal, momentum } => {
                let (int, mom) = atom_labels(label);
                push(&mut subs, &mut factors, Subsystem::new(int, SubsystemKind::Internal, 2), *internal)
                    .and_then(|_| push(&mut subs, &mut factors, Subsystem::new(mom, SubsystemKind::Momentum, 2), *momentum))
            }
            Declaration::Aux { label, init } => {
                push(&mut subs, &mut factors, Subsystem::new(label.clone(), SubsystemKind::Auxiliary, 2), *init)
            }
        };
        r.map_err(|e| e.at_line(line))?;
    }
    let layout = SubsystemLayout::new(subs)?;
    // Row-major Kronecker product of the factors.
    let mut amps = alloc::vec![ONE];
    for f in &factors {
        let mut next = Vec::with_capacity(amps.len() * f.len());
        for a in &amps {
            for b in f {
                next.push(a * b);
            }
        }
        amps = next;
    }
    StateVector::new(layout, amps)
}

fn step_gate(step: &Step, layout: &SubsystemLayout, p: &PhysicalParams, conv: PhaseConvention) -> Result<(GateOp, f64)> {
    let kind = step.kind();
    let time = |t: &TimeExpr| t.resolve(kind, p);
    match step {
        Step::Bragg { atom, cavity, t } => {
            let (_, mom) = atom_labels(atom);
            let t = time(t);
            Ok((bragg_gate(layout, cavity, &mom, t, p)?, t))
        }
        Step::Pulse { atom, sel, t, phi, paper_phi } => {
            let (int, mom) = atom_labels(atom);
            let chosen = match conv {
                PhaseConvention::Paper => paper_phi.or(*phi),
                PhaseConvention::Hamiltonian => *phi,
            };
            let phase = chosen.map(|x| x.radians()).unwrap_or(0.0);
            let t = time(t);
            Ok((classical_pulse(layout, &int, &mom, *sel, t, p.omega_classical, phase)?, t))
        }
        Step::Jc { aux, cavity, t } => {
            let t = time(t);
            Ok((jc_swap(layout, cavity, aux, t, p.mu)?, t))
        }
        Step::Dispersive { aux, cavity, t, table } => {
            let phases = match (conv, table) {
                (PhaseConvention::Hamiltonian, _) => DispersivePhases::Hamiltonian,
                (PhaseConvention::Paper, Some(PaperTable::Cluster)) => DispersivePhases::PrintedCluster,
                (PhaseConvention::Paper, _) => DispersivePhases::Printed,
            };
            let t = time(t);
            Ok((dispersive_gate_with(layout, cavity, aux, t, p.lambda_disp, phases)?, t))
        }
        Step::Ramsey { aux } => Ok((ramsey_transform(layout, aux)?, 0.0)),
        Step::Detect { .. } | Step::Remove { .. } => unreachable!("not a gate step"),
    }
}

fn snapshot(s: &StateVector) -> Option<StateVector> {
    (s.dim() <= SNAPSHOT_CAP).then(|| s.clone())
}

/// Runs `script` under `convention`, starting from `base` rates overridden by
/// the script's `set` statements. Errors carry the originating line.
pub fn execute(script: &Script, convention: PhaseConvention, base: &PhysicalParams) -> Result<ProtocolTrace> {
    let params = script.params(base);
    params.validate()?;
    let initial = initial_state(script)?;
    let mut state = initial.clone();
    let mut steps = Vec::with_capacity(script.steps.len());
    let mut snapshots = alloc::vec![snapshot(&state)];
    let mut outcomes = None;
    let mut last_dispersive = None;

    for (k, located) in script.steps.iter().enumerate() {
        let line = located.line;
        let step = &located.item;
        let layout = state.layout().clone();
        let mut record = StepRecord {
            line,
            description: step.to_string(),
            kind: step.kind(),
            time: None,
            gate: None,
            layout: layout.clone(),
            removal: None,
        };
        match step {
            Step::Detect { targets } => {
                if k + 1 != script.steps.len() {
                    return Err(Error::Script("detect must be the last step".into()).at_line(line));
                }
                let t: Vec<&str> = targets.iter().map(String::as_str).collect();
                outcomes = Some(detect_all(&state, &t).map_err(|e| e.at_line(line))?);
                snapshots.push(None);
            }
            Step::Remove { label } => {
                let r = split_off(&state, label).map_err(|e| e.at_line(line))?;
                record.removal = Some(RemovalRecord { label: label.clone(), purity: r.purity, factor: r.factor });
                state = r.state;
                snapshots.push(snapshot(&state));
            }
            _ => {
                let (gate, t) = step_gate(step, &layout, &params, convention).map_err(|e| e.at_line(line))?;
                state = state.apply(&gate).map_err(|e| e.at_line(line))?;
                if step.kind() == StepKind::Dispersive {
                    last_dispersive = Some(t);
                }
                record.time = Some(t);
                record.gate = Some(gate);
                snapshots.push(snapshot(&state));
            }
        }
        steps.push(record);
    }

    let pre_detection = state.clone();
    let outcomes = outcomes.unwrap_or_else(|| {
        alloc::vec![DetectionOutcome { assignments: Vec::new(), probability: 1.0, post_state: Some(state) }]
    });

    let reference = script.reference();
    let (references, reports) = match reference {
        None => (alloc::vec![None; outcomes.len()], alloc::vec![None; outcomes.len()]),
        Some(family) => {
            let lambda_t = params.lambda_disp
                * match script.reference_time() {
                    Some(t) => t.resolve(StepKind::Dispersive, &params),
                    None => last_dispersive.unwrap_or(0.0),
                };
            build_references(script, family, &outcomes, lambda_t)?
        }
    };

    Ok(ProtocolTrace {
        script: script.clone(),
        convention,
        params,
        initial,
        steps,
        snapshots,
        pre_detection,
        outcomes,
        reference,
        references,
        reports,
    })
}

type RefRows = (Vec<Option<StateVector>>, Vec<Option<CompareReport>>);

fn build_references(
    script: &Script,
    family: ReferenceFamily,
    outcomes: &[DetectionOutcome],
    lambda_t: f64,
) -> Result<RefRows> {
    let mut refs = Vec::with_capacity(outcomes.len());
    let mut reports = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        let Some(post) = &o.post_state else {
            refs.push(None);
            reports.push(None);
            continue;
        };
        let digits: Vec<usize> = o.assignments.iter().map(|(_, v)| *v).collect();
        // The ring reference exists only for the all-ground pattern.
        if family == ReferenceFamily::RingGraph && digits.iter().any(|&d| d != 0) {
            refs.push(None);
            reports.push(None);
            continue;
        }
        let layout = post.layout();
        let ctx = ReferenceContext {
            cavities: layout
                .subsystems()
                .iter()
                .filter(|s| s.kind == SubsystemKind::Cavity)
                .map(|s| s.label.clone())
                .collect(),
            atoms: script
                .declarations
                .iter()
                .filter_map(|d| match &d.item {
                    Declaration::Atom { label, .. } => Some(label.clone()),
                    _ => None,
                })
                .collect(),
            outcome: family.needs_outcome().then_some(digits),
            lambda_t,
        };
        let r = reference_state(family, &ctx)?;
        let report = compare(post, &r, DEFAULT_THRESHOLD).ok();
        refs.push(Some(r));
        reports.push(report);
    }
    Ok((refs, reports))
}
