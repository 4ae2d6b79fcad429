use alloc::vec;
use alloc::vec::Vec;

use super::{CMatrix, DensityMatrix, GateOp, SubsystemLayout};
use crate::math::{self, ZERO};
use crate::{Error, Result, C64, NORM_TOL};

/// Normalized pure state over a [`SubsystemLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: SubsystemLayout,
    amps: Vec<C64>,
}

impl StateVector {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn new(layout: SubsystemLayout, amps: Vec<C64>) -> Result<Self> {
        let dim = layout.total_dim();
        if amps.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: amps.len() });
        }
        let mut s = StateVector { layout, amps };
        let n = s.norm();
        if n <= f64::MIN_POSITIVE || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        if math::abs(n - 1.0) > 0.0 {
            let inv = 1.0 / n;
            s.amps.iter_mut().for_each(|a| *a *= inv);
        }
        Ok(s)
    }

    pub(crate) fn from_raw(layout: SubsystemLayout, amps: Vec<C64>) -> Self {
        debug_assert_eq!(layout.total_dim(), amps.len());
        StateVector { layout, amps }
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Amplitude of the basis state with the given per-subsystem indices.
    pub fn amplitude(&self, digits: &[usize]) -> C64 {
        self.amps[self.layout.flat_index(digits)]
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.amps.iter().map(|a| a.norm_sqr()).sum())
    }

    /// Normalized linear combination `Σ cᵢ|ψᵢ⟩` of states sharing a layout.
    pub fn superpose(terms: &[(C64, &StateVector)]) -> Result<StateVector> {
        let first = terms.first().ok_or(Error::ZeroNorm)?.1;
        let mut amps = vec![ZERO; first.dim()];
        for (c, s) in terms {
            if s.layout != first.layout {
                return Err(Error::LayoutMismatch);
            }
            for (acc, a) in amps.iter_mut().zip(&s.amps) {
                *acc += c * a;
            }
        }
        StateVector::new(first.layout.clone(), amps)
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let layout = self.layout.concat(&other.layout)?;
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Ok(StateVector::from_raw(layout, amps))
    }

    pub fn apply(&self, gate: &GateOp) -> Result<StateVector> {
        super::apply_gate(self, gate)
    }

    /// Multiplication by a dense full-space matrix (oracle path).
    pub fn apply_dense(&self, m: &CMatrix) -> Result<StateVector> {
        if m.nrows() != self.dim() || m.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: m.nrows() });
        }
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        let out = m * v;
        Ok(StateVector::from_raw(self.layout.clone(), out.iter().copied().collect()))
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> DensityMatrix {
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        DensityMatrix::from_parts(self.layout.clone(), &v * v.adjoint())
    }

    /// Reduced density matrix over `keep` (in layout order) computed straight
    /// from the amplitudes, without forming the full density matrix.
    pub fn reduced_density(&self, keep: &[&str]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::EmptyKeep);
        }
        let mut pos = self.layout.positions_of(keep)?;
        pos.sort_unstable();
        let kept = self.layout.only(&pos);
        let kdim = kept.total_dim();
        let rdim = self.dim() / kdim;
        let mut grouped = CMatrix::zeros(kdim, rdim);
        let dims = self.layout.dims();
        for (i, a) in self.amps.iter().enumerate() {
            let (k, r) = split_index(i, &dims, &pos);
            grouped[(k, r)] = *a;
        }
        let rho = &grouped * grouped.adjoint();
        Ok(DensityMatrix::from_parts(kept, rho))
    }

    /// Purity `Tr ρ²` of the reduced state of one subsystem.
    pub fn subsystem_purity(&self, label: &str) -> Result<f64> {
        Ok(self.reduced_density(&[label])?.purity())
    }

    pub fn permute(&self, new_order: &[&str]) -> Result<StateVector> {
        permute_subsystems(self, new_order)
    }

    /// `true` when every amplitude is finite and the norm is 1 within `1e-12`.
    pub fn is_normalized(&self) -> bool {
        math::abs(self.norm() - 1.0) <= NORM_TOL
    }
}

/// Splits a flat index into (index over `keep`, index over the rest), both
/// row-major in layout order. `keep` must be sorted.
pub(crate) fn split_index(mut i: usize, dims: &[usize], keep: &[usize]) -> (usize, usize) {
    let (mut k, mut r) = (0, 0);
    let (mut kmul, mut rmul) = (1, 1);
    for pos in (0..dims.len()).rev() {
        let d = dims[pos];
        let digit = i % d;
        i /= d;
        if keep.binary_search(&pos).is_ok() {
            k += digit * kmul;
            kmul *= d;
        } else {
            r += digit * rmul;
            rmul *= d;
        }
    }
    (k, r)
}

/// Computational basis state. Every subsystem of `layout` must be assigned.
pub fn basis_state(layout: &SubsystemLayout, assignments: &[(&str, usize)]) -> Result<StateVector> {
    let mut digits = vec![None; layout.len()];
    for (label, index) in assignments {
        let p = layout.position(label)?;
        let dim = layout.subsystems()[p].dim;
        if *index >= dim {
            return Err(Error::IndexOutOfRange { label: (*label).into(), index: *index, dim });
        }
        digits[p] = Some(*index);
    }
    let digits: Vec<usize> = digits
        .iter()
        .zip(layout.subsystems())
        .map(|(d, s)| d.ok_or_else(|| Error::MissingAssignment(s.label.clone())))
        .collect::<Result<_>>()?;
    let mut amps = vec![ZERO; layout.total_dim()];
    amps[layout.flat_index(&digits)] = math::ONE;
    Ok(StateVector::from_raw(layout.clone(), amps))
}

/// `⟨a|b⟩`.
pub fn inner(a: &StateVector, b: &StateVector) -> Result<C64> {
    if a.layout != b.layout {
        return Err(Error::LayoutMismatch);
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// Reorders the subsystems of `state` to `new_order`.
pub fn permute_subsystems(state: &StateVector, new_order: &[&str]) -> Result<StateVector> {
    let layout = state.layout();
    if new_order.len() != layout.len() {
        return Err(Error::NotAPermutation);
    }
    let perm = layout.positions_of(new_order).map_err(|_| Error::NotAPermutation)?;
    let new_layout =
        SubsystemLayout::new(perm.iter().map(|&p| layout.subsystems()[p].clone()).collect())?;
    let mut amps = vec![ZERO; state.dim()];
    let mut new_digits = vec![0; perm.len()];
    for (i, a) in state.amps.iter().enumerate() {
        let d = layout.digits(i);
        for (slot, &p) in new_digits.iter_mut().zip(&perm) {
            *slot = d[p];
        }
        amps[new_layout.flat_index(&new_digits)] = *a;
    }
    Ok(StateVector::from_raw(new_layout, amps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::real;
    use core::f64::consts::FRAC_1_SQRT_2;

    fn cab() -> SubsystemLayout {
        SubsystemLayout::builder().cavity("c", 2).atom("a").build().unwrap()
    }

    #[test]
    fn basis_state_sets_single_amplitude() {
        let s = basis_state(&cab(), &[("c", 0), ("a.int", 0), ("a.mom", 0)]).unwrap();
        assert_eq!(s.amplitudes()[0], math::ONE);
        assert!(s.amplitudes()[1..].iter().all(|a| *a == ZERO));
    }

    #[test]
    fn superposed_initial_state() {
        let l = cab();
        let s0 = basis_state(&l, &[("c", 0), ("a.int", 0), ("a.mom", 0)]).unwrap();
        let s1 = basis_state(&l, &[("c", 1), ("a.int", 0), ("a.mom", 0)]).unwrap();
        let psi = StateVector::superpose(&[(math::ONE, &s0), (math::ONE, &s1)]).unwrap();
        assert!((psi.amplitude(&[0, 0, 0]).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((psi.amplitude(&[1, 0, 0]).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(psi.is_normalized());
    }

    #[test]
    fn basis_state_errors() {
        let l = cab();
        assert!(matches!(
            basis_state(&l, &[("c", 2), ("a.int", 0), ("a.mom", 0)]),
            Err(Error::IndexOutOfRange { index: 2, dim: 2, .. })
        ));
        assert_eq!(
            basis_state(&l, &[("zz", 0)]).unwrap_err(),
            Error::UnknownLabel("zz".into())
        );
        assert_eq!(
            basis_state(&l, &[("c", 0), ("a.int", 0)]).unwrap_err(),
            Error::MissingAssignment("a.mom".into())
        );
    }

    #[test]
    fn inner_basics() {
        let l = cab();
        let a = basis_state(&l, &[("c", 0), ("a.int", 0), ("a.mom", 0)]).unwrap();
        let b = basis_state(&l, &[("c", 1), ("a.int", 0), ("a.mom", 0)]).unwrap();
        assert_eq!(inner(&a, &a).unwrap(), math::ONE);
        assert_eq!(inner(&a, &b).unwrap(), ZERO);
        let other = SubsystemLayout::builder().aux("x").build().unwrap();
        let x = basis_state(&other, &[("x", 0)]).unwrap();
        assert_eq!(inner(&a, &x), Err(Error::LayoutMismatch));
    }

    #[test]
    fn permutation_swap_is_involution() {
        let l = cab();
        let amps: Vec<C64> = (0..8).map(|i| C64::new(i as f64, 0.5 * i as f64)).collect();
        let s = StateVector::new(l, amps).unwrap();
        let same = s.permute(&["c", "a.int", "a.mom"]).unwrap();
        assert_eq!(same, s);
        let swapped = s.permute(&["a.mom", "a.int", "c"]).unwrap();
        let back = swapped.permute(&["c", "a.int", "a.mom"]).unwrap();
        assert_eq!(back, s);
        assert_eq!(s.permute(&["c", "c", "a.mom"]), Err(Error::NotAPermutation));
        assert_eq!(s.permute(&["c"]), Err(Error::NotAPermutation));
    }

    #[test]
    fn zero_vector_rejected() {
        assert_eq!(StateVector::new(cab(), vec![ZERO; 8]), Err(Error::ZeroNorm));
        assert!(matches!(
            StateVector::new(cab(), vec![real(1.0); 3]),
            Err(Error::DimensionMismatch { expected: 8, found: 3 })
        ));
    }
}
