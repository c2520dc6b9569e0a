//! Short-pulse purity and cw background approximations.

use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

use crate::quantum::quadrature::integrate_real;
use crate::system::SystemParams;
use crate::units::angular;

/// Gaussian-pulse re-excitation factor `(2 ln 2)^{-1/2} ∫₀^∞ cos²[π erf(x)/2] dx`.
pub fn eta_g() -> f64 {
    static ETA: OnceLock<f64> = OnceLock::new();
    *ETA.get_or_init(|| {
        let f = |x: f64| (0.5 * PI * libm::erf(x)).cos().powi(2);
        let r = integrate_real(f, 0.0, 8.0, 1e-10, 0.0).expect("smooth integrand");
        r.value / (2.0 * LN_2).sqrt()
    })
}

/// `g²[0] ≈ η_G γ_X τ_p / N` with `tau_p` in ps and `gamma_x` in μeV.
pub fn g2_pulse_approx(tau_p: f64, gamma_x: f64, n: f64) -> f64 {
    eta_g() * angular(gamma_x) * tau_p / n
}

/// Warnings when the pulse is not short against the dressing or the decay.
pub fn pulse_validity(tau_p: f64, eta: f64, gamma_x: f64) -> Vec<String> {
    let mut w = Vec::new();
    for (name, rate) in [("η", eta), ("γ_X", gamma_x)] {
        let x = angular(rate) * tau_p;
        if x > 0.1 {
            w.push(format!("{name}·τ_p = {x:.3} is not small; short-pulse approximation degraded"));
        }
    }
    w
}

/// `E_cw ≈ γ_X T_rep ρ_X⁰ / N` with `ρ_X⁰ = Ω_cw²/(4(E_B + δ)²)`.
pub fn cw_error_approx(p: &SystemParams, n: f64) -> f64 {
    let rho0 = p.omega_cw.powi(2) / (4.0 * (p.binding_energy + p.delta).powi(2));
    angular(p.gamma_x) * p.t_rep_ps() * rho0 / n
}
