//! The physical interaction primitives as exact unitaries.
//!
//! Every constructor reads subsystem dimensions from the layout the gate is
//! meant for, checks the subsystem kinds, and returns a [`GateOp`] whose
//! targets are listed in argument order.

use alloc::string::{String, ToString};
use alloc::vec;
use core::f64::consts::FRAC_1_SQRT_2;

use crate::math::{cis, cos, real, sin, sqrt, I, ONE};
use crate::params::PhysicalParams;
use crate::tensor::{CMatrix, GateOp, LeakGuard, SubsystemKind, SubsystemLayout};
use crate::{Error, Result, C64};

/// Which phase table the dispersive link uses in a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PhaseConvention {
    /// `U = exp(−i H_d t)`.
    Hamiltonian,
    /// The printed endpoint phases.
    #[default]
    Paper,
}

impl PhaseConvention {
    pub fn name(self) -> &'static str {
        match self {
            PhaseConvention::Hamiltonian => "hamiltonian",
            PhaseConvention::Paper => "paper",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "hamiltonian" => Some(PhaseConvention::Hamiltonian),
            "paper" => Some(PhaseConvention::Paper),
            _ => None,
        }
    }
}

/// Diagonal phase table of the dispersive link on `{|g,n⟩, |e,n⟩}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DispersivePhases {
    /// `|g,n⟩ → e^{+iλnt}`, `|e,n⟩ → e^{−iλ(n+1)t}`; any cutoff.
    Hamiltonian,
    /// `(g0, g1, e0, e1) = (1, e^{−iλt}, e^{−2iλt}, e^{+iλt})`; cutoff 2 only.
    Printed,
    /// `(g0, g1, e0, e1) = (1, −e^{−iλt}, i·e^{−2iλt}, i·e^{+iλt})`, the table
    /// implied by the printed four-atom cluster stage; cutoff 2 only.
    PrintedCluster,
}

impl DispersivePhases {
    pub fn for_convention(convention: PhaseConvention) -> Self {
        match convention {
            PhaseConvention::Hamiltonian => DispersivePhases::Hamiltonian,
            PhaseConvention::Paper => DispersivePhases::Printed,
        }
    }

    /// Phase factor on `|s, n⟩` with `s = 0` for `g` and `1` for `e`.
    pub fn factor(self, excited: bool, n: usize, lambda_t: f64) -> C64 {
        let x = lambda_t;
        let nf = n as f64;
        match (self, excited, n) {
            (DispersivePhases::Hamiltonian, false, _) => cis(nf * x),
            (DispersivePhases::Hamiltonian, true, _) => cis(-(nf + 1.0) * x),
            (DispersivePhases::Printed, false, _) => cis(-nf * x),
            (DispersivePhases::Printed, true, 0) => cis(-2.0 * x),
            (DispersivePhases::Printed, true, _) => cis(x),
            (DispersivePhases::PrintedCluster, false, 0) => ONE,
            (DispersivePhases::PrintedCluster, false, _) => -cis(-x),
            (DispersivePhases::PrintedCluster, true, 0) => I * cis(-2.0 * x),
            (DispersivePhases::PrintedCluster, true, _) => I * cis(x),
        }
    }
}

fn expect_kind(layout: &SubsystemLayout, label: &str, kind: SubsystemKind, expected: &'static str) -> Result<usize> {
    let s = layout.get(label)?;
    if s.kind != kind {
        return Err(Error::WrongKind { label: label.to_string(), expected });
    }
    Ok(s.dim)
}

fn expect_qubit(layout: &SubsystemLayout, label: &str, kind: SubsystemKind, expected: &'static str) -> Result<()> {
    let dim = expect_kind(layout, label, kind, expected)?;
    if dim != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: dim });
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

fn targets(a: &str, b: &str) -> vec::Vec<String> {
    vec![a.to_string(), b.to_string()]
}

/// First-order Bragg scattering of `momentum` off the photons in `cavity`.
///
/// Within each photon-number block the momentum pair rotates by
/// `Θ(n, t) = μ² n t / 4Δ`, so at `t = 2πΔ/μ²` the vacuum block is the
/// identity and the one-photon block transfers `P₀ → P₋₂`.
pub fn bragg_gate(layout: &SubsystemLayout, cavity: &str, momentum: &str, t: f64, params: &PhysicalParams) -> Result<GateOp> {
    check_time(t)?;
    let d = expect_kind(layout, cavity, SubsystemKind::Cavity, "a cavity")?;
    expect_qubit(layout, momentum, SubsystemKind::Momentum, "a momentum subsystem")?;
    let mut m = CMatrix::zeros(2 * d, 2 * d);
    for n in 0..d {
        let theta = params.mu * params.mu * n as f64 * t / (4.0 * params.delta);
        let (c, s) = (cos(theta), sin(theta));
        let k = 2 * n;
        m[(k, k)] = real(c);
        m[(k + 1, k)] = real(s);
        m[(k, k + 1)] = real(-s);
        m[(k + 1, k + 1)] = real(c);
    }
    GateOp::new(targets(cavity, momentum), vec![d, 2], m)
}

/// Momentum-selective classical drive of the internal levels.
///
/// On the `selector` momentum subspace:
/// `|b⟩ → cos(Ωt/2)|b⟩ − i e^{iφ} sin(Ωt/2)|a⟩`,
/// `|a⟩ → −i e^{−iφ} sin(Ωt/2)|b⟩ + cos(Ωt/2)|a⟩`; identity elsewhere.
pub fn classical_pulse(
    layout: &SubsystemLayout,
    internal: &str,
    momentum: &str,
    selector: usize,
    t: f64,
    omega: f64,
    phi: f64,
) -> Result<GateOp> {
    check_time(t)?;
    expect_qubit(layout, internal, SubsystemKind::Internal, "an internal subsystem")?;
    let dm = expect_kind(layout, momentum, SubsystemKind::Momentum, "a momentum subsystem")?;
    if selector >= dm {
        return Err(Error::IndexOutOfRange { label: momentum.to_string(), index: selector, dim: dm });
    }
    let half = omega * t / 2.0;
    let (c, s) = (cos(half), sin(half));
    let mut m = CMatrix::identity(2 * dm, 2 * dm);
    // local index = internal · dm + momentum
    let b = selector;
    let a = dm + selector;
    m[(b, b)] = real(c);
    m[(a, a)] = real(c);
    m[(a, b)] = -I * cis(phi) * s;
    m[(b, a)] = -I * cis(-phi) * s;
    GateOp::new(targets(internal, momentum), vec![2, dm], m)
}

/// Resonant Jaynes–Cummings exchange between `cavity` and auxiliary `aux`.
///
/// Each block `{|g,n⟩, |e,n−1⟩}` rotates by `μ√n t` with off-diagonal `−i`.
/// `|e, D−1⟩` would couple to `|D, g⟩` beyond the cutoff; the gate carries a
/// guard that rejects any state populating it.
pub fn jc_swap(layout: &SubsystemLayout, cavity: &str, aux: &str, t: f64, mu: f64) -> Result<GateOp> {
    let d = expect_kind(layout, cavity, SubsystemKind::Cavity, "a cavity")?;
    expect_qubit(layout, aux, SubsystemKind::Auxiliary, "an auxiliary atom")?;
    let idx = |n: usize, s: usize| 2 * n + s;
    let mut m = CMatrix::identity(2 * d, 2 * d);
    for n in 1..d {
        let theta = mu * sqrt(n as f64) * t;
        let (c, s) = (cos(theta), sin(theta));
        let (gn, em) = (idx(n, 0), idx(n - 1, 1));
        m[(gn, gn)] = real(c);
        m[(em, em)] = real(c);
        m[(em, gn)] = -I * s;
        m[(gn, em)] = -I * s;
    }
    let guard = LeakGuard { forbidden: vec![idx(d - 1, 1)], cavity: cavity.to_string(), photons: d };
    Ok(GateOp::new(targets(cavity, aux), vec![d, 2], m)?.with_guard(guard))
}

/// Dispersive link: diagonal phases on `{cavity, aux}` from the given table.
pub fn dispersive_gate_with(
    layout: &SubsystemLayout,
    cavity: &str,
    aux: &str,
    t: f64,
    lambda: f64,
    phases: DispersivePhases,
) -> Result<GateOp> {
    let d = expect_kind(layout, cavity, SubsystemKind::Cavity, "a cavity")?;
    expect_qubit(layout, aux, SubsystemKind::Auxiliary, "an auxiliary atom")?;
    if phases != DispersivePhases::Hamiltonian && d > 2 {
        return Err(Error::CutoffTooLarge { label: cavity.to_string(), dim: d });
    }
    let mut m = CMatrix::zeros(2 * d, 2 * d);
    for n in 0..d {
        m[(2 * n, 2 * n)] = phases.factor(false, n, lambda * t);
        m[(2 * n + 1, 2 * n + 1)] = phases.factor(true, n, lambda * t);
    }
    GateOp::new(targets(cavity, aux), vec![d, 2], m)
}

/// Dispersive link with the default table of `convention`.
pub fn dispersive_gate(
    layout: &SubsystemLayout,
    cavity: &str,
    aux: &str,
    t: f64,
    lambda: f64,
    convention: PhaseConvention,
) -> Result<GateOp> {
    dispersive_gate_with(layout, cavity, aux, t, lambda, DispersivePhases::for_convention(convention))
}

/// Ramsey zone: `|g⟩ → (|g⟩+|e⟩)/√2`, `|e⟩ → (|g⟩−|e⟩)/√2`.
pub fn ramsey_transform(layout: &SubsystemLayout, aux: &str) -> Result<GateOp> {
    expect_qubit(layout, aux, SubsystemKind::Auxiliary, "an auxiliary atom")?;
    let h = real(FRAC_1_SQRT_2);
    let m = CMatrix::from_row_slice(2, 2, &[h, h, h, -h]);
    GateOp::new(vec![aux.to_string()], vec![2], m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{basis_state, max_abs_diff, StateVector};
    use core::f64::consts::PI;

    fn l1() -> SubsystemLayout {
        SubsystemLayout::builder().cavity("c", 2).atom("a").build().unwrap()
    }

    fn l_aux(fock: usize) -> SubsystemLayout {
        SubsystemLayout::builder().cavity("c", fock).aux("x").build().unwrap()
    }

    #[test]
    fn bragg_vacuum_block_is_identity() {
        let p = PhysicalParams::default();
        let g = bragg_gate(&l1(), "c", "a.mom", 3.7, &p).unwrap();
        let m = g.matrix();
        assert_eq!(m[(0, 0)], ONE);
        assert_eq!(m[(1, 1)], ONE);
        assert_eq!(m[(0, 1)], real(0.0));
    }

    #[test]
    fn bragg_rejects_negative_time_and_wrong_kind() {
        let p = PhysicalParams::default();
        assert_eq!(bragg_gate(&l1(), "c", "a.mom", -1.0, &p), Err(Error::NegativeTime(-1.0)));
        assert!(matches!(bragg_gate(&l1(), "a.int", "a.mom", 1.0, &p), Err(Error::WrongKind { .. })));
    }

    #[test]
    fn pulse_full_cycle_is_minus_one_on_selected_branch() {
        let g = classical_pulse(&l1(), "a.int", "a.mom", 1, 2.0 * PI, 1.0, 0.3).unwrap();
        let m = g.matrix();
        let mut expect = CMatrix::identity(4, 4);
        expect[(1, 1)] = real(-1.0);
        expect[(3, 3)] = real(-1.0);
        assert!(max_abs_diff(m, &expect) < 1e-12);
        assert!(classical_pulse(&l1(), "a.int", "a.mom", 2, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn jc_full_cycle_and_guard() {
        let l = l_aux(2);
        let g = jc_swap(&l, "c", "x", PI, 1.0).unwrap();
        let s = basis_state(&l, &[("c", 1), ("x", 0)]).unwrap();
        let out = s.apply(&g).unwrap();
        assert!((out.amplitudes()[2] + ONE).norm() < 1e-12);
        let top = basis_state(&l, &[("c", 1), ("x", 1)]).unwrap();
        assert_eq!(top.apply(&g), Err(Error::FockOverflow { label: "c".into(), photons: 2 }));
    }

    #[test]
    fn jc_larger_cutoff_uses_sqrt_n() {
        let l = l_aux(3);
        let t = PI / (2.0 * sqrt(2.0));
        let g = jc_swap(&l, "c", "x", t, 1.0).unwrap();
        let s = basis_state(&l, &[("c", 2), ("x", 0)]).unwrap();
        let out = s.apply(&g).unwrap();
        let e1 = basis_state(&l, &[("c", 1), ("x", 1)]).unwrap();
        let ov = crate::inner(&e1, &out).unwrap();
        assert!((ov + I).norm() < 1e-12);
    }

    #[test]
    fn dispersive_tables() {
        let l = l_aux(2);
        let x = 0.37;
        let h = dispersive_gate(&l, "c", "x", x, 1.0, PhaseConvention::Hamiltonian).unwrap();
        let p = dispersive_gate(&l, "c", "x", x, 1.0, PhaseConvention::Paper).unwrap();
        let hd = [ONE, cis(-x), cis(x), cis(-2.0 * x)];
        let pd = [ONE, cis(-2.0 * x), cis(-x), cis(x)];
        for i in 0..4 {
            assert!((h.matrix()[(i, i)] - hd[i]).norm() < 1e-15);
            assert!((p.matrix()[(i, i)] - pd[i]).norm() < 1e-15);
        }
        assert!(matches!(
            dispersive_gate(&l_aux(3), "c", "x", 1.0, 1.0, PhaseConvention::Paper),
            Err(Error::CutoffTooLarge { .. })
        ));
        assert!(dispersive_gate(&l_aux(3), "c", "x", 1.0, 1.0, PhaseConvention::Hamiltonian).is_ok());
    }

    #[test]
    fn ramsey_maps_minus_to_excited() {
        let l = SubsystemLayout::builder().aux("x").build().unwrap();
        let g = ramsey_transform(&l, "x").unwrap();
        let minus = StateVector::new(l.clone(), vec![ONE, -ONE]).unwrap();
        let out = minus.apply(&g).unwrap();
        assert!((out.amplitudes()[1] - ONE).norm() < 1e-15);
    }
}
