//! The four built-in pipelines, expressed as scripts so that the corpus
//! files and the builders share one execution path.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::interactions::PhaseConvention;
use crate::math::arg;
use crate::params::PhysicalParams;
use crate::{Error, Result};

use super::exec::{execute, ProtocolTrace};
use super::reference::{chain_coefficient, ReferenceFamily};
use super::script::{CavityInit, Declaration, PaperTable, PhaseExpr, Script, Setting, Step, TimeExpr};

pub const MAX_CHAIN: usize = 6;
pub const MIN_RING: usize = 2;
pub const MAX_RING: usize = 5;

/// Momentum index of `P₋₂`.
const P_MINUS_2: usize = 1;

fn cavity(s: &mut Script, label: &str) {
    s.declare(Declaration::Cavity { label: label.into(), fock: 2, init: CavityInit::Plus });
}

fn atom(s: &mut Script, label: &str) {
    s.declare(Declaration::Atom { label: label.into(), internal: 0, momentum: 0 });
}

fn aux(s: &mut Script, label: &str) {
    s.declare(Declaration::Aux { label: label.into(), init: 0 });
}

/// Bragg split at the endpoint followed by the `P₋₂`-selective pulse.
fn tag(s: &mut Script, atom: &str, cavity: &str, paper_phi: Option<PhaseExpr>) {
    s.step(Step::Bragg { atom: atom.into(), cavity: cavity.into(), t: TimeExpr::Endpoint });
    s.step(Step::Pulse { atom: atom.into(), sel: P_MINUS_2, t: TimeExpr::Endpoint, phi: None, paper_phi });
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|j| format!("{prefix}{j}")).collect()
}

/// Phase `kπ/2` that turns `(−i)ⁿ` into the tagged-chain coefficient.
fn chain_phase(n: usize) -> Option<PhaseExpr> {
    let minus_i_n = crate::math::cis(-core::f64::consts::FRAC_PI_2 * n as f64);
    let ratio = chain_coefficient(n) / minus_i_n;
    let k = libm::round(arg(ratio) / core::f64::consts::FRAC_PI_2) as i64;
    match k.rem_euclid(4) {
        0 => None,
        1 => Some(PhaseExpr::PiFraction { num: 1, den: 2 }),
        2 => Some(PhaseExpr::PI),
        _ => Some(PhaseExpr::PiFraction { num: -1, den: 2 }),
    }
}

/// `n` atoms tagged one after another by a single cavity.
pub fn tag_chain_script(n: usize) -> Result<Script> {
    tag_chain_script_capped(n, MAX_CHAIN)
}

pub fn tag_chain_script_capped(n: usize, max: usize) -> Result<Script> {
    if n < 1 || n > max {
        return Err(Error::OutOfRange { what: "chain length", value: n, min: 1, max });
    }
    let mut s = Script::default();
    s.set(Setting::Reference(ReferenceFamily::TaggedChain));
    cavity(&mut s, "c");
    let atoms = labels("a", n);
    for a in &atoms {
        atom(&mut s, a);
    }
    for (j, a) in atoms.iter().enumerate() {
        tag(&mut s, a, "c", if j == 0 { chain_phase(n) } else { None });
    }
    Ok(s)
}

/// Two tagged atoms linked through two auxiliary atoms; `t2` is the
/// dispersive time.
pub fn linear_cluster_script(t2: TimeExpr) -> Script {
    let mut s = Script::default();
    s.set(Setting::Reference(ReferenceFamily::LinearCluster));
    cavity(&mut s, "c1");
    cavity(&mut s, "c2");
    atom(&mut s, "a1");
    atom(&mut s, "a2");
    aux(&mut s, "x1");
    aux(&mut s, "x2");
    tag(&mut s, "a1", "c1", Some(PhaseExpr::PI));
    tag(&mut s, "a2", "c2", None);
    s.step(Step::Jc { aux: "x1".into(), cavity: "c1".into(), t: TimeExpr::Endpoint });
    s.step(Step::Dispersive { aux: "x1".into(), cavity: "c2".into(), t: t2, table: None });
    s.step(Step::Jc { aux: "x2".into(), cavity: "c2".into(), t: TimeExpr::Endpoint });
    s.step(Step::Remove { label: "c1".into() });
    s.step(Step::Remove { label: "c2".into() });
    s.step(Step::Ramsey { aux: "x1".into() });
    s.step(Step::Ramsey { aux: "x2".into() });
    s.step(Step::Detect { targets: alloc::vec!["x1".into(), "x2".into()] });
    s
}

/// Two GHZ pairs, one per cavity, linked by a dispersive pass of the first
/// auxiliary atom through the second cavity for `t_d`.
pub fn cluster_2d_script(t_d: TimeExpr) -> Script {
    let mut s = Script::default();
    s.set(Setting::Reference(ReferenceFamily::Cluster2d));
    s.set(Setting::ReferenceTime(t_d));
    cavity(&mut s, "c1");
    cavity(&mut s, "c2");
    for a in ["a1", "a2", "a3", "a4"] {
        atom(&mut s, a);
    }
    aux(&mut s, "x1");
    aux(&mut s, "x2");
    tag(&mut s, "a1", "c1", Some(PhaseExpr::PI));
    tag(&mut s, "a2", "c1", None);
    tag(&mut s, "a3", "c2", Some(PhaseExpr::PI));
    tag(&mut s, "a4", "c2", None);
    s.step(Step::Jc { aux: "x1".into(), cavity: "c1".into(), t: TimeExpr::Endpoint });
    s.step(Step::Dispersive { aux: "x1".into(), cavity: "c2".into(), t: t_d, table: Some(PaperTable::Cluster) });
    s.step(Step::Jc { aux: "x2".into(), cavity: "c2".into(), t: TimeExpr::Endpoint });
    s.step(Step::Remove { label: "c1".into() });
    s.step(Step::Remove { label: "c2".into() });
    s.step(Step::Ramsey { aux: "x1".into() });
    s.step(Step::Ramsey { aux: "x2".into() });
    s.step(Step::Detect { targets: alloc::vec!["x1".into(), "x2".into()] });
    s
}

/// `n` atoms in `n` cavities joined by one roving auxiliary atom `r` that
/// passes every cavity and then the first again, followed by one eraser
/// atom per cavity.
pub fn ring_graph_script(n: usize) -> Result<Script> {
    if !(MIN_RING..=MAX_RING).contains(&n) {
        return Err(Error::OutOfRange { what: "ring size", value: n, min: MIN_RING, max: MAX_RING });
    }
    let cavities = labels("c", n);
    let atoms = labels("a", n);
    let erasers = labels("x", n);
    let mut s = Script::default();
    s.set(Setting::Reference(ReferenceFamily::RingGraph));
    for c in &cavities {
        cavity(&mut s, c);
    }
    for a in &atoms {
        atom(&mut s, a);
    }
    aux(&mut s, "r");
    for x in &erasers {
        aux(&mut s, x);
    }
    for (j, (a, c)) in atoms.iter().zip(&cavities).enumerate() {
        tag(&mut s, a, c, (j == 0).then_some(PhaseExpr::PI));
    }
    for c in cavities.iter().chain(core::iter::once(&cavities[0])) {
        s.step(Step::Dispersive { aux: "r".into(), cavity: c.clone(), t: TimeExpr::PiOverLambda, table: None });
    }
    s.step(Step::Ramsey { aux: "r".into() });
    for (x, c) in erasers.iter().zip(&cavities) {
        s.step(Step::Jc { aux: x.clone(), cavity: c.clone(), t: TimeExpr::Endpoint });
        s.step(Step::Remove { label: c.clone() });
        s.step(Step::Ramsey { aux: x.clone() });
    }
    let mut targets = alloc::vec![String::from("r")];
    targets.extend(erasers);
    s.step(Step::Detect { targets });
    Ok(s)
}

pub fn tag_chain(n: usize, convention: PhaseConvention, params: &PhysicalParams) -> Result<ProtocolTrace> {
    execute(&tag_chain_script(n)?, convention, params)
}

pub fn linear_cluster(convention: PhaseConvention, t2: TimeExpr, params: &PhysicalParams) -> Result<ProtocolTrace> {
    execute(&linear_cluster_script(t2), convention, params)
}

pub fn cluster_2d(convention: PhaseConvention, t_d: TimeExpr, params: &PhysicalParams) -> Result<ProtocolTrace> {
    execute(&cluster_2d_script(t_d), convention, params)
}

pub fn ring_graph(n: usize, convention: PhaseConvention, params: &PhysicalParams) -> Result<ProtocolTrace> {
    execute(&ring_graph_script(n)?, convention, params)
}
