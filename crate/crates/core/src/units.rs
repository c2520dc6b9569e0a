//! Physical constants and energy/frequency conversions.
//!
//! Model parameters are quoted in μeV. Dynamics run in angular frequency
//! units of ps⁻¹, so `ω = E / ħ`.

use crate::quantum::Operator4;

/// ħ in μeV·ps.
pub const HBAR_UEV_PS: f64 = 658.2119;

/// Boltzmann constant in μeV/K.
pub const K_B_UEV_PER_K: f64 = 86.173_33;

/// Radiative linewidth of the bare dot, μeV.
pub const GAMMA_0_UEV: f64 = 1.32;

/// Converts an energy in μeV to an angular frequency in ps⁻¹.
#[inline]
pub fn angular(e_uev: f64) -> f64 {
    e_uev / HBAR_UEV_PS
}

/// Converts an angular frequency in ps⁻¹ to an energy in μeV.
#[inline]
pub fn energy(w_per_ps: f64) -> f64 {
    w_per_ps * HBAR_UEV_PS
}

/// Thermal energy `k_B T` in μeV.
#[inline]
pub fn thermal_energy(temperature_k: f64) -> f64 {
    K_B_UEV_PER_K * temperature_k
}

/// Rescales an operator given in μeV to ps⁻¹.
pub fn angular_op(op: &Operator4) -> Operator4 {
    op.unscale(HBAR_UEV_PS)
}
