//! Witness dynamics of a multi-qubit state under the single-qubit field
//! `H_n(t) = ξI + λΔ_n(t)σˣ`, with `Δ_n` frozen or switching as random
//! telegraph noise.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::math::{cis, cos, ln, sin, sqrt, I, ZERO};
use crate::tensor::{CMatrix, StateVector};
use crate::{Error, Result, C64};

/// A 2×2 complex matrix in row-major form.
pub type Mat2 = [[C64; 2]; 2];

/// `e^{−iξt}[cos(λt) I − iΔ sin(λt) σˣ]`.
pub fn qubit_propagator(lambda: f64, delta: f64, xi: f64, t: f64) -> Mat2 {
    let phase = cis(-xi * t);
    let c = phase * cos(lambda * t);
    let s = phase * (-I * delta * sin(lambda * t));
    [[c, s], [s, c]]
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat2_to_matrix(m: &Mat2) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseMode {
    Frozen,
    Telegraph,
}

impl NoiseMode {
    pub fn name(self) -> &'static str {
        match self {
            NoiseMode::Frozen => "frozen",
            NoiseMode::Telegraph => "telegraph",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseParams {
    /// Coupling λ.
    pub lambda_c: f64,
    /// Identity offset ξ.
    pub xi: f64,
    /// Initial `Δ_n ∈ {+1, −1}`, one per qubit.
    pub deltas: Vec<f64>,
    /// Telegraph switching rate γ; `0` freezes the field.
    pub flip_rate: f64,
    pub t_grid: Vec<f64>,
    pub n_traj: usize,
    pub seed: u64,
}

impl NoiseParams {
    /// Frozen field with all `Δ = +1` on `qubits` qubits.
    pub fn frozen(lambda_c: f64, qubits: usize, t_grid: Vec<f64>) -> Self {
        NoiseParams { lambda_c, xi: 0.0, deltas: vec![1.0; qubits], flip_rate: 0.0, t_grid, n_traj: 1, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.lambda_c.is_finite() || !self.xi.is_finite() {
            return Err(Error::InvalidNoise("lambda and xi must be finite"));
        }
        if self.t_grid.first() != Some(&0.0) {
            return Err(Error::InvalidNoise("time grid must start at 0"));
        }
        if !self.t_grid.windows(2).all(|w| w[1] > w[0]) || !self.t_grid.iter().all(|t| t.is_finite()) {
            return Err(Error::InvalidNoise("time grid must be finite and strictly increasing"));
        }
        if self.n_traj == 0 {
            return Err(Error::InvalidNoise("at least one trajectory is required"));
        }
        if !self.deltas.iter().all(|d| *d == 1.0 || *d == -1.0) {
            return Err(Error::InvalidNoise("every delta must be +1 or -1"));
        }
        if !self.flip_rate.is_finite() || self.flip_rate < 0.0 {
            return Err(Error::InvalidNoise("flip rate must be finite and non-negative"));
        }
        Ok(())
    }
}

/// `points` uniform samples on `[0, t_max]`, endpoints included.
pub fn uniform_grid(t_max: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !t_max.is_finite() || t_max <= 0.0 {
        return Err(Error::InvalidNoise("grid needs at least 2 points and a positive end time"));
    }
    let last = (points - 1) as f64;
    Ok((0..points).map(|i| t_max * i as f64 / last).collect())
}

/// EW(t) samples and ensemble statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessSeries {
    pub times: Vec<f64>,
    pub ew: Vec<f64>,
    /// Standard error of the ensemble mean (telegraph mode only).
    pub stderr: Option<Vec<f64>>,
    pub params: NoiseParams,
    pub mode: NoiseMode,
    /// Largest `|Tr ρ(t) − 1|` seen over the run.
    pub max_trace_deviation: f64,
}

fn check_qubits(w: &StateVector, params: &NoiseParams) -> Result<()> {
    params.validate()?;
    let dims = w.layout().dims();
    if dims.iter().any(|&d| d != 2) {
        return Err(Error::InvalidNoise("every subsystem of the witness state must be a qubit"));
    }
    if dims.len() != params.deltas.len() {
        return Err(Error::DimensionMismatch { expected: dims.len(), found: params.deltas.len() });
    }
    Ok(())
}

/// `(⊗ₙ Uₙ)|w⟩` with one 2×2 factor per qubit.
fn apply_local(w: &[C64], us: &[Mat2]) -> Vec<C64> {
    let mut v = w.to_vec();
    let n = us.len();
    for (q, u) in us.iter().enumerate() {
        let stride = 1usize << (n - 1 - q);
        for base in 0..v.len() {
            if base & stride != 0 {
                continue;
            }
            let (a, b) = (v[base], v[base + stride]);
            v[base] = u[0][0] * a + u[0][1] * b;
            v[base + stride] = u[1][0] * a + u[1][1] * b;
        }
    }
    v
}

/// `½ − |⟨w|ψ⟩|²` and `|‖ψ‖² − 1|`.
fn witness_of(w: &[C64], psi: &[C64]) -> (f64, f64) {
    let ov: C64 = w.iter().zip(psi).map(|(a, b)| a.conj() * b).sum();
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    (0.5 - ov.norm_sqr(), crate::math::abs(norm - 1.0))
}

/// Frozen-field series: `Δ_n` fixed at `params.deltas`.
pub fn evolve_frozen(w: &StateVector, params: &NoiseParams) -> Result<WitnessSeries> {
    check_qubits(w, params)?;
    let amps = w.amplitudes();
    let mut ew = Vec::with_capacity(params.t_grid.len());
    let mut dev: f64 = 0.0;
    for &t in &params.t_grid {
        let us: Vec<Mat2> = params.deltas.iter().map(|&d| qubit_propagator(params.lambda_c, d, params.xi, t)).collect();
        let (v, d) = witness_of(amps, &apply_local(amps, &us));
        ew.push(v);
        dev = dev.max(d);
    }
    Ok(WitnessSeries {
        times: params.t_grid.clone(),
        ew,
        stderr: None,
        params: params.clone(),
        mode: NoiseMode::Frozen,
        max_trace_deviation: dev,
    })
}

/// Uniform sample in `(0, 1]`.
fn unit_open(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Telegraph state of one qubit during a trajectory.
struct Field {
    delta: f64,
    last_flip: f64,
    next_flip: f64,
    /// Propagator from 0 to `last_flip`; `None` before the first flip.
    acc: Option<Mat2>,
}

/// One EW(t) trajectory with telegraph switching.
pub fn telegraph_trajectory(w: &StateVector, params: &NoiseParams, traj: u64) -> Result<Vec<f64>> {
    check_qubits(w, params)?;
    Ok(run_trajectory(w.amplitudes(), params, traj).0)
}

fn run_trajectory(amps: &[C64], params: &NoiseParams, traj: u64) -> (Vec<f64>, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(traj);
    let rate = params.flip_rate;
    let (lambda, xi) = (params.lambda_c, params.xi);
    let mut fields: Vec<Field> = params
        .deltas
        .iter()
        .map(|&delta| Field { delta, last_flip: 0.0, next_flip: -ln(unit_open(&mut rng)) / rate, acc: None })
        .collect();
    let mut ew = Vec::with_capacity(params.t_grid.len());
    let mut dev: f64 = 0.0;
    for &t in &params.t_grid {
        let mut us = Vec::with_capacity(fields.len());
        for f in fields.iter_mut() {
            while f.next_flip <= t {
                let piece = qubit_propagator(lambda, f.delta, xi, f.next_flip - f.last_flip);
                f.acc = Some(match &f.acc {
                    Some(a) => mat2_mul(&piece, a),
                    None => piece,
                });
                f.last_flip = f.next_flip;
                f.delta = -f.delta;
                f.next_flip += -ln(unit_open(&mut rng)) / rate;
            }
            let head = qubit_propagator(lambda, f.delta, xi, t - f.last_flip);
            us.push(match &f.acc {
                Some(a) => mat2_mul(&head, a),
                None => head,
            });
        }
        let (v, d) = witness_of(amps, &apply_local(amps, &us));
        ew.push(v);
        dev = dev.max(d);
    }
    (ew, dev)
}

/// Ensemble mean of EW(t) over `n_traj` telegraph trajectories.
///
/// Trajectory `k` draws from a ChaCha8 stream `k` seeded by `params.seed`;
/// the reduction runs in trajectory order, so the series depends only on
/// the parameters.
pub fn evolve_telegraph(w: &StateVector, params: &NoiseParams) -> Result<WitnessSeries> {
    check_qubits(w, params)?;
    if params.flip_rate.is_nan() || params.flip_rate <= 0.0 {
        return Err(Error::InvalidNoise("telegraph mode needs a positive flip rate"));
    }
    let m = params.t_grid.len();
    let mut mean = vec![0.0; m];
    let mut m2 = vec![0.0; m];
    let mut dev: f64 = 0.0;
    for k in 0..params.n_traj {
        let (ew, d) = run_trajectory(w.amplitudes(), params, k as u64);
        dev = dev.max(d);
        let count = (k + 1) as f64;
        for i in 0..m {
            let delta = ew[i] - mean[i];
            mean[i] += delta / count;
            m2[i] += delta * (ew[i] - mean[i]);
        }
    }
    let n = params.n_traj as f64;
    let stderr = m2
        .iter()
        .map(|s| if params.n_traj > 1 { sqrt(s / (n - 1.0) / n) } else { 0.0 })
        .collect();
    Ok(WitnessSeries {
        times: params.t_grid.clone(),
        ew: mean,
        stderr: Some(stderr),
        params: params.clone(),
        mode: NoiseMode::Telegraph,
        max_trace_deviation: dev,
    })
}

/// Runs the mode implied by `params.flip_rate`.
pub fn evolve(w: &StateVector, params: &NoiseParams) -> Result<WitnessSeries> {
    if params.flip_rate > 0.0 {
        evolve_telegraph(w, params)
    } else {
        evolve_frozen(w, params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::ONE;
    use crate::tensor::{unitarity_deviation, SubsystemLayout};
    use core::f64::consts::PI;

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        (0..2).all(|i| (0..2).all(|j| (a[i][j] - b[i][j]).norm() < tol))
    }

    #[test]
    fn propagator_special_points() {
        let id = [[ONE, ZERO], [ZERO, ONE]];
        assert!(close(&qubit_propagator(0.3, 1.0, 0.2, 0.0), &id, 0.0 + 1e-300));
        let minus = [[-ONE, ZERO], [ZERO, -ONE]];
        assert!(close(&qubit_propagator(1.0, 1.0, 0.0, PI), &minus, 1e-15));
        let mx = [[ZERO, -I], [-I, ZERO]];
        assert!(close(&qubit_propagator(1.0, 1.0, 0.0, PI / 2.0), &mx, 1e-15));
        let u = qubit_propagator(0.7, -1.0, 0.4, 2.3);
        assert!(unitarity_deviation(&mat2_to_matrix(&u)) < 1e-14);
    }

    #[test]
    fn validation() {
        let mut p = NoiseParams::frozen(1.0, 2, vec![0.0, 1.0]);
        p.validate().unwrap();
        p.t_grid = vec![0.0, 0.0];
        assert!(p.validate().is_err());
        p.t_grid = vec![0.5, 1.0];
        assert!(p.validate().is_err());
        p.t_grid = vec![0.0];
        p.deltas[0] = 0.5;
        assert!(p.validate().is_err());
        assert!(uniform_grid(10.0, 1).is_err());
        let g = uniform_grid(10.0, 1001).unwrap();
        assert_eq!((g[0], g[1000], g[500]), (0.0, 10.0, 5.0));
    }

    #[test]
    fn telegraph_needs_positive_rate() {
        let l = SubsystemLayout::builder().aux("x").build().unwrap();
        let w = StateVector::new(l, vec![ONE, ZERO]).unwrap();
        let p = NoiseParams::frozen(1.0, 1, vec![0.0, 1.0]);
        assert!(evolve_telegraph(&w, &p).is_err());
        assert!(evolve_frozen(&w, &NoiseParams::frozen(1.0, 2, vec![0.0])).is_err());
    }
}
