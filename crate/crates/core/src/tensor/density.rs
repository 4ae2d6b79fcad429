use alloc::vec::Vec;

use super::state::split_index;
use super::{max_abs_diff, CMatrix, StateVector, SubsystemLayout};
use crate::math;
use crate::{Error, Result, C64, NORM_TOL};

const EIGEN_FLOOR: f64 = -1e-10;

/// Hermitian, unit-trace, positive semidefinite matrix over a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    layout: SubsystemLayout,
    m: CMatrix,
}

impl DensityMatrix {
    /// Validated construction: Hermitian and unit trace within `1e-12`,
    /// eigenvalues at least `−1e-10`.
    pub fn new(layout: SubsystemLayout, m: CMatrix) -> Result<Self> {
        let dim = layout.total_dim();
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: m.nrows() });
        }
        if max_abs_diff(&m, &m.adjoint()) > NORM_TOL {
            return Err(Error::InvalidDensity("not Hermitian"));
        }
        let rho = DensityMatrix { layout, m };
        if math::abs(rho.trace() - 1.0) > NORM_TOL {
            return Err(Error::InvalidDensity("trace differs from 1"));
        }
        if rho.eigenvalues().iter().any(|&l| l < EIGEN_FLOOR) {
            return Err(Error::InvalidDensity("negative eigenvalue"));
        }
        Ok(rho)
    }

    pub(crate) fn from_parts(layout: SubsystemLayout, m: CMatrix) -> Self {
        DensityMatrix { layout, m }
    }

    /// `Σ pᵢ|ψᵢ⟩⟨ψᵢ|` with weights normalized to sum 1.
    pub fn mixture(terms: &[(f64, &StateVector)]) -> Result<Self> {
        let first = terms.first().ok_or(Error::ZeroNorm)?.1;
        let total: f64 = terms.iter().map(|(p, _)| p).sum();
        if total <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let dim = first.dim();
        let mut m = CMatrix::zeros(dim, dim);
        for (p, s) in terms {
            if s.layout() != first.layout() {
                return Err(Error::LayoutMismatch);
            }
            m += s.density().m * C64::new(p / total, 0.0);
        }
        Ok(DensityMatrix { layout: first.layout().clone(), m })
    }

    pub fn maximally_mixed(layout: SubsystemLayout) -> Self {
        let d = layout.total_dim();
        let m = CMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0);
        DensityMatrix { layout, m }
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.m.diagonal().iter().map(|z| z.re).sum()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σᵢⱼ |ρᵢⱼ|² for Hermitian ρ.
        self.m.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Ascending eigenvalues of the Hermitian matrix.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.m)
    }

    /// `⟨w|ρ|w⟩` (real part; the imaginary part vanishes for Hermitian ρ).
    pub fn expectation(&self, w: &StateVector) -> Result<f64> {
        if w.layout() != &self.layout {
            return Err(Error::LayoutMismatch);
        }
        let v = nalgebra::DVector::from_column_slice(w.amplitudes());
        Ok((v.adjoint() * &self.m * &v)[(0, 0)].re)
    }

    /// `U ρ U†` for a full-space unitary.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<DensityMatrix> {
        if u.nrows() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: u.nrows() });
        }
        Ok(DensityMatrix { layout: self.layout.clone(), m: u * &self.m * u.adjoint() })
    }

    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityMatrix> {
        partial_trace(self, keep)
    }

    /// Partial transpose over the subsystems at `positions`.
    pub(crate) fn partial_transpose(&self, positions: &[usize]) -> CMatrix {
        let dims = self.layout.dims();
        let strides = self.layout.strides();
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                // Swap the digits of the transposed subsystems between row and column.
                let (mut ti, mut tj) = (i, j);
                for &p in positions {
                    let di = (i / strides[p]) % dims[p];
                    let dj = (j / strides[p]) % dims[p];
                    ti = ti - di * strides[p] + dj * strides[p];
                    tj = tj - dj * strides[p] + di * strides[p];
                }
                out[(ti, tj)] = self.m[(i, j)];
            }
        }
        out
    }
}

/// Ascending eigenvalues of a Hermitian matrix.
pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    ev
}

/// Reduced density matrix over `keep`, kept in layout order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[&str]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptyKeep);
    }
    let mut pos = rho.layout.positions_of(keep)?;
    pos.sort_unstable();
    let kept = rho.layout.only(&pos);
    let kdim = kept.total_dim();
    let dims = rho.layout.dims();
    let n = rho.dim();
    let split: Vec<(usize, usize)> = (0..n).map(|i| split_index(i, &dims, &pos)).collect();
    let mut out = CMatrix::zeros(kdim, kdim);
    for (i, &(ki, ri)) in split.iter().enumerate() {
        for (j, &(kj, rj)) in split.iter().enumerate() {
            if ri == rj {
                out[(ki, kj)] += rho.m[(i, j)];
            }
        }
    }
    Ok(DensityMatrix { layout: kept, m: out })
}
