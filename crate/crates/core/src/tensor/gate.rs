use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{unitarity_deviation, CMatrix, StateVector};
use crate::math::ZERO;
use crate::{Error, Result, C64, UNITARY_TOL};

/// Amplitude below which a guarded basis state counts as unpopulated.
const GUARD_TOL: f64 = 1e-12;

/// Target-local basis states that must carry no amplitude when the gate is
/// applied, because the truncated matrix cannot represent their evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct LeakGuard {
    /// Row-major indices over the gate targets.
    pub forbidden: Vec<usize>,
    /// Cavity whose cutoff would be exceeded.
    pub cavity: String,
    /// Photon number that would be reached.
    pub photons: usize,
}

/// A unitary acting on an ordered list of target subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    targets: Vec<String>,
    dims: Vec<usize>,
    matrix: CMatrix,
    guard: Option<LeakGuard>,
}

impl GateOp {
    /// Checks that `matrix` is square of size `Π dims` and unitary within `1e-10`.
    pub fn new(targets: Vec<String>, dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        if targets.len() != dims.len() || targets.is_empty() {
            return Err(Error::DimensionMismatch { expected: targets.len(), found: dims.len() });
        }
        for (i, t) in targets.iter().enumerate() {
            if targets[..i].contains(t) {
                return Err(Error::DuplicateLabel(t.clone()));
            }
        }
        let d: usize = dims.iter().product();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: matrix.nrows() });
        }
        let deviation = unitarity_deviation(&matrix);
        if deviation.is_nan() || deviation >= UNITARY_TOL {
            return Err(Error::NonUnitary { deviation });
        }
        Ok(GateOp { targets, dims, matrix, guard: None })
    }

    pub fn with_guard(mut self, guard: LeakGuard) -> Self {
        self.guard = Some(guard);
        self
    }

    pub fn targets(&self) -> &[String] {
        &self.targets
    }

    pub fn target_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn guard(&self) -> Option<&LeakGuard> {
        self.guard.as_ref()
    }

    /// Composition `self · other` (apply `other` first); targets must match.
    pub fn then_after(&self, other: &GateOp) -> Result<GateOp> {
        if self.targets != other.targets || self.dims != other.dims {
            return Err(Error::LayoutMismatch);
        }
        Ok(GateOp {
            targets: self.targets.clone(),
            dims: self.dims.clone(),
            matrix: &self.matrix * &other.matrix,
            guard: self.guard.clone().or_else(|| other.guard.clone()),
        })
    }
}

/// Full-space offsets of every target-local basis index.
pub(crate) fn target_offsets(
    state_layout: &super::SubsystemLayout,
    gate: &GateOp,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let labels: Vec<&str> = gate.targets.iter().map(String::as_str).collect();
    let pos = state_layout.positions_of(&labels)?;
    let strides = state_layout.strides();
    for (&p, &d) in pos.iter().zip(&gate.dims) {
        let actual = state_layout.subsystems()[p].dim;
        if actual != d {
            return Err(Error::DimensionMismatch { expected: actual, found: d });
        }
    }
    let local_dim: usize = gate.dims.iter().product();
    let mut offsets = vec![0usize; local_dim];
    for (l, off) in offsets.iter_mut().enumerate() {
        let mut rem = l;
        for k in (0..pos.len()).rev() {
            *off += (rem % gate.dims[k]) * strides[pos[k]];
            rem /= gate.dims[k];
        }
    }
    Ok((pos, offsets))
}

/// `(U_targets ⊗ I_rest)|ψ⟩` without forming the full matrix.
pub fn apply_gate(state: &StateVector, gate: &GateOp) -> Result<StateVector> {
    let layout = state.layout();
    let (pos, offsets) = target_offsets(layout, gate)?;
    let dims = layout.dims();
    let strides = layout.strides();
    let amps = state.amplitudes();
    let mut out = amps.to_vec();
    let d = offsets.len();
    let mut local = vec![ZERO; d];
    let m = &gate.matrix;
    for base in 0..amps.len() {
        if pos.iter().any(|&p| !(base / strides[p]).is_multiple_of(dims[p])) {
            continue;
        }
        for (slot, off) in local.iter_mut().zip(&offsets) {
            *slot = amps[base + off];
        }
        if let Some(g) = &gate.guard {
            if g.forbidden.iter().any(|&l| local[l].norm_sqr() > GUARD_TOL * GUARD_TOL) {
                return Err(Error::FockOverflow { label: g.cavity.clone(), photons: g.photons });
            }
        }
        for (r, off) in offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (c, v) in local.iter().enumerate() {
                let u: C64 = m[(r, c)];
                if u != ZERO {
                    acc += u * v;
                }
            }
            out[base + off] = acc;
        }
    }
    Ok(StateVector::from_raw(layout.clone(), out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{real, ONE};
    use crate::tensor::{basis_state, SubsystemLayout};

    fn sigma_x(target: &str) -> GateOp {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = ONE;
        m[(1, 0)] = ONE;
        GateOp::new(vec![target.into()], vec![2], m).unwrap()
    }

    #[test]
    fn sigma_x_flips_one_subsystem() {
        let l = SubsystemLayout::builder().aux("x").aux("y").aux("z").build().unwrap();
        let s = basis_state(&l, &[("x", 0), ("y", 0), ("z", 0)]).unwrap();
        let out = s.apply(&sigma_x("y")).unwrap();
        assert_eq!(out, basis_state(&l, &[("x", 0), ("y", 1), ("z", 0)]).unwrap());
    }

    #[test]
    fn identity_gate_is_noop() {
        let l = SubsystemLayout::builder().cavity("c", 3).aux("x").build().unwrap();
        let amps: Vec<C64> = (0..6).map(|i| C64::new(1.0 + i as f64, -(i as f64))).collect();
        let s = StateVector::new(l, amps).unwrap();
        let id = GateOp::new(vec!["x".into(), "c".into()], vec![2, 3], CMatrix::identity(6, 6)).unwrap();
        assert_eq!(s.apply(&id).unwrap(), s);
    }

    #[test]
    fn construction_errors() {
        let m = CMatrix::identity(2, 2) * real(2.0);
        assert!(matches!(GateOp::new(vec!["x".into()], vec![2], m), Err(Error::NonUnitary { .. })));
        assert!(matches!(
            GateOp::new(vec!["x".into()], vec![3], CMatrix::identity(2, 2)),
            Err(Error::DimensionMismatch { .. })
        ));
        let l = SubsystemLayout::builder().cavity("c", 3).build().unwrap();
        let s = basis_state(&l, &[("c", 0)]).unwrap();
        let g = GateOp::new(vec!["c".into()], vec![2], CMatrix::identity(2, 2)).unwrap();
        assert!(matches!(s.apply(&g), Err(Error::DimensionMismatch { expected: 3, found: 2 })));
        assert_eq!(s.apply(&sigma_x("q")), Err(Error::UnknownLabel("q".into())));
    }
}
