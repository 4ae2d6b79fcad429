//! The self-check behind `hypercavity oracle`: tensor-structured gate
//! application against dense Kronecker products, plus invariant checks.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use hypercavity_core::analysis::state_negativity;
use hypercavity_core::interactions::*;
use hypercavity_core::params::PhysicalParams;
use hypercavity_core::protocol::*;
use hypercavity_core::tensor::{max_abs_diff, unitarity_deviation, CMatrix};
use hypercavity_core::{inner, kron_oracle, GateOp, StateVector, SubsystemLayout, C64, UNITARY_TOL};

pub const EQUIVALENCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Skip anything whose total dimension exceeds this.
    pub max_dim: usize,
    /// Perturbs every dense reference matrix; the equivalence suites must then fail.
    pub inject_fault: bool,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_dim: 4096, inject_fault: false, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub skipped: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(name: &'static str, tolerance: f64) -> Self {
        SuiteResult { name, cases: 0, skipped: 0, max_deviation: 0.0, tolerance, failures: Vec::new() }
    }

    fn record(&mut self, what: impl FnOnce() -> String, deviation: f64) {
        self.cases += 1;
        self.max_deviation = self.max_deviation.max(deviation);
        if deviation.is_nan() || deviation > self.tolerance {
            self.failures.push(format!("{}: {deviation:e}", what()));
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.cases > 0
    }
}

fn random_state(layout: &SubsystemLayout, rng: &mut ChaCha8Rng) -> StateVector {
    let mut u = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
    let amps = (0..layout.total_dim()).map(|_| C64::new(u(), u())).collect();
    StateVector::new(layout.clone(), amps).expect("nonzero random state")
}

/// Zeroes the components a gate's leak guard forbids.
fn admissible(s: StateVector, g: &GateOp) -> StateVector {
    let Some(guard) = g.guard() else { return s };
    let l = s.layout().clone();
    let pos: Vec<usize> = g.targets().iter().map(|t| l.position(t).expect("target in layout")).collect();
    let mut a = s.amplitudes().to_vec();
    for (i, amp) in a.iter_mut().enumerate() {
        let d = l.digits(i);
        let local = pos.iter().zip(g.target_dims()).fold(0, |acc, (&p, &dim)| acc * dim + d[p]);
        if guard.forbidden.contains(&local) {
            *amp = C64::new(0.0, 0.0);
        }
    }
    StateVector::new(l, a).expect("guarded state stays nonzero")
}

fn dense(g: &GateOp, l: &SubsystemLayout, cfg: &OracleConfig) -> CMatrix {
    let mut m = kron_oracle(g, l, cfg.max_dim.max(1)).expect("dimension checked by caller");
    if cfg.inject_fault {
        m[(0, 0)] += C64::new(1e-6, 0.0);
    }
    m
}

fn diff(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn layouts() -> Vec<SubsystemLayout> {
    vec![
        SubsystemLayout::builder().cavity("c", 2).atom("a").aux("x").build().unwrap(),
        SubsystemLayout::builder().aux("x").cavity("c", 3).atom("a").aux("y").build().unwrap(),
        SubsystemLayout::builder().atom("a").cavity("c", 4).aux("x").cavity("d", 2).atom("b").build().unwrap(),
    ]
}

/// Every primitive on every test layout with random times and phases.
fn primitive_gates(l: &SubsystemLayout, p: &PhysicalParams, rng: &mut ChaCha8Rng) -> Vec<(String, GateOp)> {
    let mut u = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let cavities: Vec<String> = l.subsystems().iter().filter(|s| s.kind == hypercavity_core::SubsystemKind::Cavity).map(|s| s.label.clone()).collect();
    let auxes: Vec<String> = l.subsystems().iter().filter(|s| s.kind == hypercavity_core::SubsystemKind::Auxiliary).map(|s| s.label.clone()).collect();
    let atoms: Vec<String> = l.labels().filter_map(|s| s.strip_suffix(".int")).map(String::from).collect();
    let mut out = Vec::new();
    for c in &cavities {
        for a in &atoms {
            let t = 2.0 * u() * p.bragg_endpoint();
            out.push((format!("bragg {a} {c} t={t}"), bragg_gate(l, c, &format!("{a}.mom"), t, p).unwrap()));
        }
        for x in &auxes {
            let t = 4.0 * u() * p.jc_endpoint();
            out.push((format!("jc {x} {c} t={t}"), jc_swap(l, c, x, t, p.mu).unwrap()));
            let t = 2.0 * u() * p.dispersive_endpoint();
            out.push((format!("dispersive {x} {c} t={t} (hamiltonian)"), dispersive_gate(l, c, x, t, p.lambda_disp, PhaseConvention::Hamiltonian).unwrap()));
            if l.get(c).unwrap().dim == 2 {
                for phases in [DispersivePhases::Printed, DispersivePhases::PrintedCluster] {
                    out.push((format!("dispersive {x} {c} t={t} ({phases:?})"), dispersive_gate_with(l, c, x, t, p.lambda_disp, phases).unwrap()));
                }
            }
        }
    }
    for a in &atoms {
        for sel in 0..2 {
            let (t, phi) = (2.0 * u() * p.pulse_endpoint(), 6.0 * u() - 3.0);
            out.push((format!("pulse {a} sel={sel} t={t} phi={phi}"), classical_pulse(l, &format!("{a}.int"), &format!("{a}.mom"), sel, t, p.omega_classical, phi).unwrap()));
        }
    }
    for x in &auxes {
        out.push((format!("ramsey {x}"), ramsey_transform(l, x).unwrap()));
    }
    out
}

fn primitive_suite(cfg: &OracleConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let p = PhysicalParams::default();
    let mut r = SuiteResult::new("primitive gates vs dense Kronecker", EQUIVALENCE_TOL);
    for l in layouts() {
        let gates = primitive_gates(&l, &p, rng);
        if l.total_dim() > cfg.max_dim {
            r.skipped += gates.len();
            continue;
        }
        for (name, g) in gates {
            let s = admissible(random_state(&l, rng), &g);
            let fast = s.apply(&g).expect("gate applies");
            let slow = s.apply_dense(&dense(&g, &l, cfg)).expect("dense applies");
            r.record(|| format!("{name} on dim {}", l.total_dim()), diff(&fast, &slow));
        }
    }
    r
}

/// Total dimension before each step, read off the declarations.
fn step_dims(script: &Script) -> Vec<usize> {
    let mut dims: Vec<(String, usize)> = Vec::new();
    for d in &script.declarations {
        match &d.item {
            Declaration::Cavity { label, fock, .. } => dims.push((label.clone(), *fock)),
            Declaration::Atom { label, .. } => dims.push((label.clone(), 4)),
            Declaration::Aux { label, .. } => dims.push((label.clone(), 2)),
        }
    }
    let total = |d: &[(String, usize)]| d.iter().fold(1usize, |acc, (_, n)| acc.saturating_mul(*n));
    let mut out = Vec::new();
    for s in &script.steps {
        out.push(total(&dims));
        if let Step::Remove { label } = &s.item {
            dims.retain(|(l, _)| l != label);
        }
    }
    out
}

/// Built-in protocols with at least one step small enough to check.
fn protocol_traces(max_dim: usize) -> (Vec<(String, ProtocolTrace)>, usize) {
    let p = PhysicalParams::default();
    let mut scripts = Vec::new();
    for n in 1..=MAX_CHAIN {
        scripts.push((format!("tag-chain {n}"), tag_chain_script(n).unwrap()));
    }
    scripts.push(("linear-cluster".into(), linear_cluster_script(TimeExpr::PiOverLambda)));
    scripts.push(("cluster-2d".into(), cluster_2d_script(TimeExpr::PiOver2Lambda)));
    for n in MIN_RING..=MAX_RING {
        scripts.push((format!("ring-graph {n}"), ring_graph_script(n).unwrap()));
    }
    let mut out = Vec::new();
    let mut skipped = 0;
    for conv in [PhaseConvention::Paper, PhaseConvention::Hamiltonian] {
        for (name, script) in &scripts {
            let dims = step_dims(script);
            if dims.iter().all(|&d| d > max_dim) {
                skipped += dims.len();
                continue;
            }
            out.push((format!("{name} ({})", conv.name()), execute(script, conv, &p).unwrap()));
        }
    }
    (out, skipped)
}

fn protocol_suite(cfg: &OracleConfig) -> SuiteResult {
    let mut r = SuiteResult::new("protocol steps vs dense Kronecker", EQUIVALENCE_TOL);
    let (traces, skipped) = protocol_traces(cfg.max_dim);
    r.skipped = skipped;
    for (name, t) in &traces {
        for (k, s) in t.steps.iter().enumerate() {
            let Some(g) = &s.gate else { continue };
            let (Some(before), Some(after)) = (&t.snapshots[k], &t.snapshots[k + 1]) else {
                r.skipped += 1;
                continue;
            };
            if before.dim() > cfg.max_dim {
                r.skipped += 1;
                continue;
            }
            let slow = before.apply_dense(&dense(g, before.layout(), cfg)).expect("dense applies");
            r.record(|| format!("{name} step {k} `{}`", s.description), diff(&slow, after));
        }
    }
    r
}

fn property_suite(cfg: &OracleConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let p = PhysicalParams::default();
    let mut r = SuiteResult::new("unitarity, norm and inner-product invariants", UNITARY_TOL);
    for l in layouts() {
        if l.total_dim() > cfg.max_dim {
            r.skipped += 1;
            continue;
        }
        for (name, g) in primitive_gates(&l, &p, rng) {
            r.record(|| format!("{name}: unitarity"), unitarity_deviation(g.matrix()));
            let a = admissible(random_state(&l, rng), &g);
            let b = admissible(random_state(&l, rng), &g);
            let (ga, gb) = (a.apply(&g).unwrap(), b.apply(&g).unwrap());
            r.record(|| format!("{name}: norm"), (ga.norm() - 1.0).abs());
            let d = (inner(&ga, &gb).unwrap() - inner(&a, &b).unwrap()).norm();
            r.record(|| format!("{name}: inner product"), d);
        }
    }
    // products are pure on each factor and carry no negativity
    for _ in 0..8 {
        let la = SubsystemLayout::builder().cavity("c", 3).aux("x").build().unwrap();
        let lb = SubsystemLayout::builder().atom("a").build().unwrap();
        let s = random_state(&la, rng).tensor(&random_state(&lb, rng)).unwrap();
        if s.dim() > cfg.max_dim {
            r.skipped += 1;
            continue;
        }
        let rho = s.reduced_density(&["c", "x"]).unwrap();
        r.record(|| "product marginal purity".into(), (rho.purity() - 1.0).abs());
        r.record(|| "product negativity".into(), state_negativity(&s, &["c", "x"]).unwrap());
        let whole = s.density().partial_trace(&["c", "x"]).unwrap();
        r.record(|| "partial trace paths agree".into(), max_abs_diff(whole.matrix(), rho.matrix()));
    }
    r
}

/// Runs all suites in a fixed order.
pub fn run(cfg: &OracleConfig) -> Vec<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    vec![primitive_suite(cfg, &mut rng), protocol_suite(cfg), property_suite(cfg, &mut rng)]
}
