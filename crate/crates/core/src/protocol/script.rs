//! Straight-line protocol scripts: subsystem declarations, interaction steps
//! and settings. Scripts print in the `.qproto` surface syntax.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::params::PhysicalParams;
use crate::tensor::SubsystemKind;

use super::reference::ReferenceFamily;

/// An item tagged with its source line. Equality ignores the line, so a
/// printed-then-parsed script compares equal to the original.
#[derive(Debug, Clone)]
pub struct Located<T> {
    pub line: usize,
    pub item: T,
}

impl<T: PartialEq> PartialEq for Located<T> {
    fn eq(&self, other: &Self) -> bool {
        self.item == other.item
    }
}

impl<T> Located<T> {
    pub fn new(line: usize, item: T) -> Self {
        Located { line, item }
    }
}

/// Interaction time, resolved against [`PhysicalParams`] at execution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeExpr {
    /// The natural endpoint of the step kind (see [`StepKind::endpoint`]).
    Endpoint,
    PiOverLambda,
    PiOver2Lambda,
    PiOverOmega,
    Value(f64),
}

impl TimeExpr {
    pub fn resolve(self, kind: StepKind, p: &PhysicalParams) -> f64 {
        match self {
            TimeExpr::Endpoint => kind.endpoint(p),
            TimeExpr::PiOverLambda => PI / p.lambda_disp,
            TimeExpr::PiOver2Lambda => PI / (2.0 * p.lambda_disp),
            TimeExpr::PiOverOmega => PI / p.omega_classical,
            TimeExpr::Value(v) => v,
        }
    }
}

impl fmt::Display for TimeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeExpr::Endpoint => f.write_str("endpoint"),
            TimeExpr::PiOverLambda => f.write_str("pi/lambda"),
            TimeExpr::PiOver2Lambda => f.write_str("pi/2lambda"),
            TimeExpr::PiOverOmega => f.write_str("pi/omega"),
            TimeExpr::Value(v) => write!(f, "{v:?}"),
        }
    }
}

/// A phase: either `num·π/den` or a literal in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseExpr {
    PiFraction { num: i64, den: u64 },
    Value(f64),
}

impl PhaseExpr {
    pub const ZERO: PhaseExpr = PhaseExpr::Value(0.0);
    pub const PI: PhaseExpr = PhaseExpr::PiFraction { num: 1, den: 1 };

    pub fn radians(self) -> f64 {
        match self {
            PhaseExpr::PiFraction { num, den } => num as f64 * PI / den as f64,
            PhaseExpr::Value(v) => v,
        }
    }
}

impl fmt::Display for PhaseExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PhaseExpr::PiFraction { num, den } => {
                match num {
                    1 => f.write_str("pi")?,
                    -1 => f.write_str("-pi")?,
                    n => write!(f, "{n}pi")?,
                }
                if den != 1 {
                    write!(f, "/{den}")?;
                }
                Ok(())
            }
            PhaseExpr::Value(v) => write!(f, "{v:?}"),
        }
    }
}

/// Initial state of a cavity mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CavityInit {
    Fock(usize),
    /// `(|0⟩ + |1⟩)/√2`.
    Plus,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Declaration {
    Cavity { label: String, fock: usize, init: CavityInit },
    /// Type-1 atom with internal and momentum basis indices; expands to the
    /// subsystems `label.int` and `label.mom`.
    Atom { label: String, internal: usize, momentum: usize },
    /// Auxiliary atom with its initial level (`0 = g`).
    Aux { label: String, init: usize },
}

impl Declaration {
    pub fn label(&self) -> &str {
        match self {
            Declaration::Cavity { label, .. } | Declaration::Atom { label, .. } | Declaration::Aux { label, .. } => {
                label
            }
        }
    }
}

impl fmt::Display for Declaration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Declaration::Cavity { label, fock, init } => {
                write!(f, "cavity {label} fock={fock} init=")?;
                match init {
                    CavityInit::Plus => f.write_str("plus"),
                    CavityInit::Fock(n) => write!(f, "{n}"),
                }
            }
            Declaration::Atom { label, internal, momentum } => write!(
                f,
                "atom {label} init={},{}",
                SubsystemKind::Internal.basis_label(*internal, true),
                SubsystemKind::Momentum.basis_label(*momentum, true)
            ),
            Declaration::Aux { label, init } => {
                write!(f, "aux {label} init={}", SubsystemKind::Auxiliary.basis_label(*init, true))
            }
        }
    }
}

/// Which printed dispersive table a step uses under the paper convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaperTable {
    Standard,
    Cluster,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    Bragg,
    Pulse,
    Jc,
    Dispersive,
    Ramsey,
    Detect,
    Remove,
}

impl StepKind {
    pub fn keyword(self) -> &'static str {
        match self {
            StepKind::Bragg => "bragg",
            StepKind::Pulse => "pulse",
            StepKind::Jc => "jc",
            StepKind::Dispersive => "dispersive",
            StepKind::Ramsey => "ramsey",
            StepKind::Detect => "detect",
            StepKind::Remove => "remove",
        }
    }

    /// `2πΔ/μ²`, `π/Ω`, `π/2μ` or `π/λ`; zero for steps without a time.
    pub fn endpoint(self, p: &PhysicalParams) -> f64 {
        match self {
            StepKind::Bragg => p.bragg_endpoint(),
            StepKind::Pulse => p.pulse_endpoint(),
            StepKind::Jc => p.jc_endpoint(),
            StepKind::Dispersive => p.dispersive_endpoint(),
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Bragg { atom: String, cavity: String, t: TimeExpr },
    /// Classical pulse on the `sel` momentum branch. `paper_phi`, when set,
    /// replaces `phi` under the paper convention.
    Pulse { atom: String, sel: usize, t: TimeExpr, phi: Option<PhaseExpr>, paper_phi: Option<PhaseExpr> },
    Jc { aux: String, cavity: String, t: TimeExpr },
    Dispersive { aux: String, cavity: String, t: TimeExpr, table: Option<PaperTable> },
    Ramsey { aux: String },
    Detect { targets: Vec<String> },
    Remove { label: String },
}

impl Step {
    pub fn kind(&self) -> StepKind {
        match self {
            Step::Bragg { .. } => StepKind::Bragg,
            Step::Pulse { .. } => StepKind::Pulse,
            Step::Jc { .. } => StepKind::Jc,
            Step::Dispersive { .. } => StepKind::Dispersive,
            Step::Ramsey { .. } => StepKind::Ramsey,
            Step::Detect { .. } => StepKind::Detect,
            Step::Remove { .. } => StepKind::Remove,
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Bragg { atom, cavity, t } => write!(f, "bragg {atom} {cavity} t={t}"),
            Step::Pulse { atom, sel, t, phi, paper_phi } => {
                let sel = SubsystemKind::Momentum.basis_label(*sel, true);
                write!(f, "pulse {atom} sel={sel} t={t}")?;
                if let Some(p) = phi {
                    write!(f, " phi={p}")?;
                }
                if let Some(p) = paper_phi {
                    write!(f, " paper_phi={p}")?;
                }
                Ok(())
            }
            Step::Jc { aux, cavity, t } => write!(f, "jc {aux} {cavity} t={t}"),
            Step::Dispersive { aux, cavity, t, table } => {
                write!(f, "dispersive {aux} {cavity} t={t}")?;
                match table {
                    Some(PaperTable::Standard) => f.write_str(" paper_table=standard"),
                    Some(PaperTable::Cluster) => f.write_str(" paper_table=cluster"),
                    None => Ok(()),
                }
            }
            Step::Ramsey { aux } => write!(f, "ramsey {aux}"),
            Step::Detect { targets } => write!(f, "detect {}", targets.join(" ")),
            Step::Remove { label } => write!(f, "remove {label}"),
        }
    }
}

/// `set key=value` statements.
#[derive(Debug, Clone, PartialEq)]
pub enum Setting {
    Mu(f64),
    Delta(f64),
    OmegaR(f64),
    Lambda(f64),
    Omega(f64),
    Reference(ReferenceFamily),
    ReferenceTime(TimeExpr),
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Setting::Mu(v) => write!(f, "set mu={v:?}"),
            Setting::Delta(v) => write!(f, "set delta={v:?}"),
            Setting::OmegaR(v) => write!(f, "set omega_r={v:?}"),
            Setting::Lambda(v) => write!(f, "set lambda={v:?}"),
            Setting::Omega(v) => write!(f, "set omega={v:?}"),
            Setting::Reference(r) => write!(f, "set reference={}", r.name()),
            Setting::ReferenceTime(t) => write!(f, "set reference_time={t}"),
        }
    }
}

/// A parsed protocol: settings, then declarations, then steps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Script {
    pub settings: Vec<Located<Setting>>,
    pub declarations: Vec<Located<Declaration>>,
    pub steps: Vec<Located<Step>>,
}

impl Script {
    /// `base` with this script's rate settings applied in order.
    pub fn params(&self, base: &PhysicalParams) -> PhysicalParams {
        let mut p = *base;
        for s in &self.settings {
            match s.item {
                Setting::Mu(v) => p.mu = v,
                Setting::Delta(v) => p.delta = v,
                Setting::OmegaR(v) => p.omega_r = v,
                Setting::Lambda(v) => p.lambda_disp = v,
                Setting::Omega(v) => p.omega_classical = v,
                Setting::Reference(_) | Setting::ReferenceTime(_) => {}
            }
        }
        p
    }

    /// The last `set reference=` value.
    pub fn reference(&self) -> Option<ReferenceFamily> {
        self.settings.iter().rev().find_map(|s| match s.item {
            Setting::Reference(r) => Some(r),
            _ => None,
        })
    }

    pub fn reference_time(&self) -> Option<TimeExpr> {
        self.settings.iter().rev().find_map(|s| match s.item {
            Setting::ReferenceTime(t) => Some(t),
            _ => None,
        })
    }

    pub fn set(&mut self, s: Setting) -> &mut Self {
        let line = self.next_line();
        self.settings.push(Located::new(line, s));
        self
    }

    pub fn declare(&mut self, d: Declaration) -> &mut Self {
        let line = self.next_line();
        self.declarations.push(Located::new(line, d));
        self
    }

    pub fn step(&mut self, s: Step) -> &mut Self {
        let line = self.next_line();
        self.steps.push(Located::new(line, s));
        self
    }

    fn next_line(&self) -> usize {
        1 + self.settings.len() + self.declarations.len() + self.steps.len()
    }
}

impl fmt::Display for Script {
    /// One statement per line, in the order settings, declarations, steps.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.settings {
            writeln!(f, "{}", s.item)?;
        }
        for d in &self.declarations {
            writeln!(f, "{}", d.item)?;
        }
        for s in &self.steps {
            writeln!(f, "{}", s.item)?;
        }
        Ok(())
    }
}
