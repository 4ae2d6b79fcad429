//! Physical rates in natural units (ħ = 1).

use core::f64::consts::PI;

use crate::{Error, Result};

/// Rates entering the interaction unitaries, all in rad per unit time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Atom–field vacuum Rabi frequency μ.
    pub mu: f64,
    /// Atom–field detuning Δ used by Bragg scattering.
    pub delta: f64,
    /// Recoil frequency ω_r.
    pub omega_r: f64,
    /// Effective dispersive rate λ = μ_d²/Δ_d.
    pub lambda_disp: f64,
    /// Classical-pulse Rabi frequency Ω_R.
    pub omega_classical: f64,
}

impl Default for PhysicalParams {
    /// μ = 1, Δ = 100, ω_r = 1, λ = μ²/Δ, Ω = 1. The Bragg hierarchy
    /// Δ ≫ ω_r ≫ μ²/Δ then holds with both ratios equal to 100.
    fn default() -> Self {
        PhysicalParams { mu: 1.0, delta: 100.0, omega_r: 1.0, lambda_disp: 0.01, omega_classical: 1.0 }
    }
}

/// Outcome of the adiabatic Bragg-regime check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BraggValidity {
    /// Δ / ω_r.
    pub detuning_over_recoil: f64,
    /// ω_r Δ / μ².
    pub recoil_over_shift: f64,
    pub ratio_min: f64,
}

impl BraggValidity {
    pub fn holds(&self) -> bool {
        self.detuning_over_recoil >= self.ratio_min && self.recoil_over_shift >= self.ratio_min
    }
}

impl PhysicalParams {
    /// Rejects non-finite or non-positive rates.
    pub fn validate(&self) -> Result<()> {
        let all = [self.mu, self.delta, self.omega_r, self.lambda_disp, self.omega_classical];
        if all.iter().all(|x| x.is_finite() && *x > 0.0) {
            Ok(())
        } else {
            Err(Error::Script("physical rates must be finite and positive".into()))
        }
    }

    /// Evaluates Δ ≫ ω_r ≫ μ²/Δ. A violation is advisory only.
    pub fn bragg_validity(&self, ratio_min: f64) -> BraggValidity {
        BraggValidity {
            detuning_over_recoil: self.delta / self.omega_r,
            recoil_over_shift: self.omega_r * self.delta / (self.mu * self.mu),
            ratio_min,
        }
    }

    /// `2πΔ/μ²`: full first-order Bragg transfer for one photon.
    pub fn bragg_endpoint(&self) -> f64 {
        2.0 * PI * self.delta / (self.mu * self.mu)
    }

    /// `π/Ω`: the classical pulse maps `|b⟩ → −i|a⟩`.
    pub fn pulse_endpoint(&self) -> f64 {
        PI / self.omega_classical
    }

    /// `π/2μ`: one-photon resonant swap.
    pub fn jc_endpoint(&self) -> f64 {
        PI / (2.0 * self.mu)
    }

    /// `π/λ`.
    pub fn dispersive_endpoint(&self) -> f64 {
        PI / self.lambda_disp
    }
}
