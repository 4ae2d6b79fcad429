//! State comparison, negativity, witness values and ket rendering.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::math::{abs, arg, modulus};
use crate::tensor::{hermitian_eigenvalues, DensityMatrix, StateVector};
use crate::{inner, Error, Result};

/// Default amplitude threshold for reports and renderings.
pub const DEFAULT_THRESHOLD: f64 = 1e-9;

/// Relative phase `arg(aᵢ / bᵢ)` of one basis branch present in both states.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseResidual {
    pub index: usize,
    pub label: String,
    /// In `(−π, π]`.
    pub phase: f64,
}

/// Agreement between a state and a reference over the same layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    /// `|⟨ref|state⟩|²`.
    pub fidelity: f64,
    /// `Σᵢ |aᵢ||bᵢ|`.
    pub branch_magnitude_fidelity: f64,
    pub phase_residuals: Vec<PhaseResidual>,
    /// Basis labels above threshold in exactly one of the two states.
    pub support_mismatch: Vec<String>,
}

impl CompareReport {
    /// Largest `|residual − first residual|`, wrapped; zero when all branches
    /// share one relative phase (a global phase).
    pub fn relative_phase_spread(&self) -> f64 {
        let Some(first) = self.phase_residuals.first() else { return 0.0 };
        self.phase_residuals
            .iter()
            .map(|r| abs(crate::math::wrap_phase(r.phase - first.phase)))
            .fold(0.0, f64::max)
    }
}

/// Compares `state` against `reference`; branches with modulus at or below
/// `threshold` count as absent.
pub fn compare(state: &StateVector, reference: &StateVector, threshold: f64) -> Result<CompareReport> {
    let ov = inner(reference, state)?;
    let layout = state.layout();
    let mut bmf = 0.0;
    let mut phase_residuals = Vec::new();
    let mut support_mismatch = Vec::new();
    for (i, (a, b)) in state.amplitudes().iter().zip(reference.amplitudes()).enumerate() {
        let (ma, mb) = (modulus(*a), modulus(*b));
        bmf += ma * mb;
        match (ma > threshold, mb > threshold) {
            (true, true) => phase_residuals.push(PhaseResidual {
                index: i,
                label: layout.ket_label(i, false),
                phase: arg(a / b),
            }),
            (false, false) => {}
            _ => support_mismatch.push(layout.ket_label(i, false)),
        }
    }
    Ok(CompareReport {
        fidelity: ov.norm_sqr().min(1.0),
        branch_magnitude_fidelity: bmf.min(1.0),
        phase_residuals,
        support_mismatch,
    })
}

/// `(‖ρ^{T_A}‖₁ − 1)/2` with side A given by `partition`.
pub fn negativity(rho: &DensityMatrix, partition: &[&str]) -> Result<f64> {
    let layout = rho.layout();
    if partition.is_empty() {
        return Err(Error::InvalidPartition("side A is empty"));
    }
    let pos = layout.positions_of(partition)?;
    if pos.len() == layout.len() {
        return Err(Error::InvalidPartition("side B is empty"));
    }
    let pt = rho.partial_transpose(&pos);
    let trace_norm: f64 = hermitian_eigenvalues(&pt).iter().map(|x| abs(*x)).sum();
    Ok(((trace_norm - 1.0) / 2.0).max(0.0))
}

/// Negativity of a pure state across `partition`.
pub fn state_negativity(state: &StateVector, partition: &[&str]) -> Result<f64> {
    negativity(&state.density(), partition)
}

/// `Tr[(½I − |w⟩⟨w|)ρ] = ½ − ⟨w|ρ|w⟩`.
pub fn witness_value(rho: &DensityMatrix, w: &StateVector) -> Result<f64> {
    Ok(0.5 - rho.expectation(w)?)
}

/// Sorted-basis rendering such as `0.7071|0,b,P₀⟩ + 0.7071|1,b,P₋₂⟩`.
///
/// Each term is the modulus to four decimals, followed by `e^(iφ)` when the
/// phase is nonzero at that precision.
pub fn ket_string(state: &StateVector, threshold: f64, ascii: bool) -> String {
    let layout = state.layout();
    let (open, close) = if ascii { ("|", ">") } else { ("|", "⟩") };
    let terms: Vec<String> = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| modulus(**a) > threshold)
        .map(|(i, a)| {
            let phase = arg(*a);
            let mut t = format!("{:.4}", modulus(*a));
            if abs(phase) >= 5e-5 {
                t.push_str(&format!("e^(i{:.4})", phase));
            }
            format!("{t}{open}{}{close}", layout.ket_label(i, ascii))
        })
        .collect();
    if terms.is_empty() {
        "(below threshold)".into()
    } else {
        terms.join(" + ")
    }
}
