//! Projective detection of auxiliary atoms and removal of factored-out
//! subsystems.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::math::{sqrt, ZERO};
use crate::tensor::{split_index, StateVector, SubsystemKind};
use crate::{Error, Result};

/// Probability below which an outcome has no post-measurement state.
pub const ZERO_PROBABILITY: f64 = 1e-12;
/// Purity threshold for removing a subsystem.
pub const REMOVAL_PURITY_TOL: f64 = 1e-9;

/// One detection pattern with its Born probability and conditional state.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionOutcome {
    /// `(label, basis index)` in target order; `0 = g`, `1 = e`.
    pub assignments: Vec<(String, usize)>,
    pub probability: f64,
    /// Renormalized state over the remaining subsystems; `None` when the
    /// probability is below [`ZERO_PROBABILITY`].
    pub post_state: Option<StateVector>,
}

impl DetectionOutcome {
    /// `"g,e"`-style label in target order.
    pub fn label(&self) -> String {
        let parts: Vec<&str> = self.assignments.iter().map(|(_, v)| if *v == 0 { "g" } else { "e" }).collect();
        parts.join(",")
    }

    pub fn is_possible(&self) -> bool {
        self.post_state.is_some()
    }
}

/// All `2^k` detection patterns of the auxiliary `targets`, ordered
/// lexicographically with the first target most significant and `g < e`.
pub fn detect_all(state: &StateVector, targets: &[&str]) -> Result<Vec<DetectionOutcome>> {
    let layout = state.layout();
    let mut pos = Vec::with_capacity(targets.len());
    for t in targets {
        let p = layout.position(t)?;
        let s = &layout.subsystems()[p];
        if s.kind != SubsystemKind::Auxiliary || s.dim != 2 {
            return Err(Error::WrongKind { label: t.to_string(), expected: "a two-level auxiliary atom" });
        }
        if pos.contains(&p) {
            return Err(Error::DuplicateLabel(t.to_string()));
        }
        pos.push(p);
    }
    let rest_layout = layout.without(&pos);
    let dims = layout.dims();
    let strides = layout.strides();
    let mut sorted = pos.clone();
    sorted.sort_unstable();

    let k = targets.len();
    let mut buckets = vec![vec![ZERO; rest_layout.total_dim()]; 1 << k];
    for (i, a) in state.amplitudes().iter().enumerate() {
        let mut outcome = 0usize;
        for &p in &pos {
            outcome = (outcome << 1) | ((i / strides[p]) % dims[p]);
        }
        let (_, r) = split_index(i, &dims, &sorted);
        buckets[outcome][r] = *a;
    }

    let mut out = Vec::with_capacity(1 << k);
    for (o, amps) in buckets.into_iter().enumerate() {
        let probability: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let assignments = (0..k).map(|j| (targets[j].to_string(), (o >> (k - 1 - j)) & 1)).collect();
        let post_state = if probability > ZERO_PROBABILITY {
            Some(StateVector::new(rest_layout.clone(), amps)?)
        } else {
            None
        };
        out.push(DetectionOutcome { assignments, probability, post_state });
    }
    Ok(out)
}

/// Result of factoring one subsystem out of a pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct Removal {
    pub state: StateVector,
    /// The removed factor `|φ⟩`, with its largest component real positive.
    pub factor: StateVector,
    /// `Tr ρ²` of the removed subsystem before removal.
    pub purity: f64,
}

/// Factors `label` out of `state`, returning `|ψ_rest⟩` with
/// `|ψ⟩ = |ψ_rest⟩ ⊗ |φ⟩` up to subsystem order.
pub fn split_off(state: &StateVector, label: &str) -> Result<Removal> {
    let rho = state.reduced_density(&[label])?;
    let purity = rho.purity();
    if purity < 1.0 - REMOVAL_PURITY_TOL {
        return Err(Error::Entangled { label: label.to_string(), purity });
    }
    let m = rho.matrix();
    let d = m.nrows();
    let j = (0..d)
        .max_by(|&a, &b| m[(a, a)].re.partial_cmp(&m[(b, b)].re).unwrap_or(core::cmp::Ordering::Equal))
        .unwrap_or(0);
    let scale = sqrt(m[(j, j)].re);
    let phi: Vec<_> = (0..d).map(|i| m[(i, j)] / scale).collect();

    let layout = state.layout();
    let p = layout.position(label)?;
    let rest_layout = layout.without(&[p]);
    let dims = layout.dims();
    let mut rest = vec![ZERO; rest_layout.total_dim()];
    for (i, a) in state.amplitudes().iter().enumerate() {
        let (k, r) = split_index(i, &dims, &[p]);
        rest[r] += phi[k].conj() * a;
    }
    let factor = StateVector::new(rho.layout().clone(), phi)?;
    Ok(Removal { state: StateVector::new(rest_layout, rest)?, factor, purity })
}

/// Removes a subsystem whose reduced state is pure within `1e-9`.
pub fn remove_disentangled(state: &StateVector, label: &str) -> Result<StateVector> {
    Ok(split_off(state, label)?.state)
}
