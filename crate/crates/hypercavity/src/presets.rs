//! Parameter presets. Rates are expressed in units of the vacuum Rabi
//! frequency μ, so times are in units of 1/μ.

use std::f64::consts::PI;

use hypercavity_core::params::PhysicalParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Preset {
    /// μ = 1, Δ = 100, ω_r = 1, λ = 0.01, Ω = 1.
    #[default]
    Natural,
    /// ⁸⁵Rb: μ = 2π×16.4 MHz, Δ = 10⁹ s⁻¹, ω_r = 2.4×10⁴ rad/s.
    Rb85,
    /// He: ω_r = 1.06×10⁶ s⁻¹, Δ = 6.28×10⁹ s⁻¹, μ²/4Δ = 1.2×10⁵ s⁻¹.
    Helium,
}

/// A preset in natural units plus the SI size of the time unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Loaded {
    pub params: PhysicalParams,
    /// Seconds per unit of time (`1/μ`); `None` for the natural preset.
    pub time_unit_s: Option<f64>,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Natural, Preset::Rb85, Preset::Helium];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Natural => "natural",
            Preset::Rb85 => "rb85",
            Preset::Helium => "helium",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s)
    }

    pub fn load(self) -> Loaded {
        // (μ, Δ, ω_r) in s⁻¹
        let (mu, delta, omega_r) = match self {
            Preset::Natural => return Loaded { params: PhysicalParams::default(), time_unit_s: None },
            Preset::Rb85 => (2.0 * PI * 16.4e6, 1.0e9, 2.4e4),
            Preset::Helium => {
                let delta = 6.28e9;
                ((4.0 * delta * 1.2e5f64).sqrt(), delta, 1.06e6)
            }
        };
        let delta = delta / mu;
        let params = PhysicalParams {
            mu: 1.0,
            delta,
            omega_r: omega_r / mu,
            // dispersive shift μ²/Δ; the classical drive is taken at μ
            lambda_disp: 1.0 / delta,
            omega_classical: 1.0,
        };
        Loaded { params, time_unit_s: Some(1.0 / mu) }
    }
}
