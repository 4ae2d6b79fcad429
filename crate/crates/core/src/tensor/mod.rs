//! Dense complex linear algebra over tensor-structured hybrid Hilbert spaces.
//!
//! Amplitudes are indexed row-major over the declared subsystem order: the
//! last subsystem varies fastest.

mod density;
mod gate;
mod layout;
mod oracle;
mod state;

pub use density::{partial_trace, DensityMatrix};
pub use gate::{apply_gate, GateOp, LeakGuard};
pub use layout::{atom_labels, Subsystem, SubsystemKind, SubsystemLayout};
pub use oracle::kron_oracle;
pub use state::{basis_state, inner, permute_subsystems, StateVector};
pub(crate) use density::hermitian_eigenvalues;
pub(crate) use state::split_index;

use nalgebra::DMatrix;

use crate::C64;

/// Complex dense matrix used for gates, density matrices and oracles.
pub type CMatrix = DMatrix<C64>;

/// Largest entry-wise modulus of `a − b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| crate::math::modulus(x - y))
        .fold(0.0, f64::max)
}

/// `max |U†U − I|`.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let n = u.nrows();
    let prod = u.adjoint() * u;
    max_abs_diff(&prod, &CMatrix::identity(n, n))
}
