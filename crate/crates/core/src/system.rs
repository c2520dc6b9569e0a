//! Rotating-frame Hamiltonians of the biexciton cascade and the dressed basis.
//!
//! All energies are in μeV.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::quantum::ops::{ket, projector, sigma_x_b, sigma_x_x, sigma_z_b, transition, Ket4, Level, Operator4, C64};
use crate::quantum::superop::Collapse;
use crate::units::GAMMA_0_UEV;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Exciton radiative rate.
    pub gamma_x: f64,
    /// Total biexciton radiative rate.
    pub gamma_b: f64,
    /// cw Rabi amplitude on the B–X transition, already ⟨B⟩-renormalized.
    pub omega_cw: f64,
    /// Laser detuning from the B–X transition.
    pub delta: f64,
    /// Biexciton binding energy.
    pub binding_energy: f64,
    /// Laser repetition period in ns.
    pub t_rep_ns: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            gamma_x: GAMMA_0_UEV,
            gamma_b: 2.0 * GAMMA_0_UEV,
            omega_cw: 0.0,
            delta: 0.0,
            binding_energy: 3240.0,
            t_rep_ns: 12.5,
        }
    }
}

impl SystemParams {
    /// Checks hard constraints and returns soft warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let finite = [self.gamma_x, self.gamma_b, self.omega_cw, self.delta, self.binding_energy, self.t_rep_ns]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::invalid("params", "all parameters must be finite"));
        }
        if self.gamma_x <= 0.0 {
            return Err(Error::invalid("gamma_x", "must be positive"));
        }
        if self.gamma_b < 0.0 {
            return Err(Error::invalid("gamma_b", "must be non-negative"));
        }
        if self.omega_cw < 0.0 {
            return Err(Error::invalid("omega_cw", "must be non-negative"));
        }
        if self.binding_energy <= 0.0 {
            return Err(Error::invalid("binding_energy", "must be positive"));
        }
        if self.t_rep_ns <= 0.0 {
            return Err(Error::invalid("t_rep", "must be positive"));
        }
        let mut warnings = Vec::new();
        if self.binding_energy < 5.0 * self.delta.abs().max(self.omega_cw) {
            warnings.push(format!(
                "binding energy {} μeV is not well above max(|δ|, Ω_cw) = {} μeV",
                self.binding_energy,
                self.delta.abs().max(self.omega_cw)
            ));
        }
        for w in &warnings {
            log::warn!("{w}");
        }
        Ok(warnings)
    }

    pub fn with_drive(mut self, omega_cw: f64, delta: f64) -> Self {
        self.omega_cw = omega_cw;
        self.delta = delta;
        self
    }

    pub fn t_rep_ps(&self) -> f64 {
        self.t_rep_ns * 1e3
    }
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Cascade Hamiltonian including the far-detuned X–G coupling.
pub fn hamiltonian_full(p: &SystemParams) -> Operator4 {
    projector(Level::B) * c(2.0 * p.delta) + projector(Level::X) * c(p.delta)
        - projector(Level::G) * c(p.binding_energy)
        + (sigma_x_b() + sigma_x_x()) * c(p.omega_cw / 2.0)
}

/// B–X Hamiltonian `(δ/2)σ_z^B + (Ω/2)σ_x^B`.
pub fn hamiltonian_reduced(p: &SystemParams) -> Operator4 {
    sigma_z_b() * c(p.delta / 2.0) + sigma_x_b() * c(p.omega_cw / 2.0)
}

/// Radiative collapse channels in the lab frame, rates in ps⁻¹.
pub fn radiative_collapses(p: &SystemParams) -> Vec<Collapse> {
    let (gx, gb) = (crate::units::angular(p.gamma_x), crate::units::angular(p.gamma_b));
    vec![
        Collapse::new(gx, transition(Level::G, Level::X)),
        Collapse::new(gx, transition(Level::G, Level::Y)),
        Collapse::new(gb / 2.0, transition(Level::X, Level::B)),
        Collapse::new(gb / 2.0, transition(Level::Y, Level::B)),
    ]
}

/// Eigenbasis of the B–X Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedBasis {
    pub eta: f64,
    pub e_plus: f64,
    pub e_minus: f64,
    pub c_b_plus: f64,
    pub c_x_plus: f64,
    pub c_b_minus: f64,
    pub c_x_minus: f64,
}

impl DressedBasis {
    pub fn ket_plus(&self) -> Ket4 {
        ket(Level::B) * c(self.c_b_plus) + ket(Level::X) * c(self.c_x_plus)
    }

    pub fn ket_minus(&self) -> Ket4 {
        ket(Level::B) * c(self.c_b_minus) + ket(Level::X) * c(self.c_x_minus)
    }

    /// δ/η
    pub fn detuning_ratio(&self) -> f64 {
        (self.c_b_plus.powi(2) - self.c_x_plus.powi(2)).clamp(-1.0, 1.0)
    }
}

pub fn dressed_states(omega_cw: f64, delta: f64) -> Result<DressedBasis> {
    let eta = omega_cw.hypot(delta);
    if eta == 0.0 {
        return Err(Error::BasisDegenerate);
    }
    let d = delta / eta;
    Ok(DressedBasis {
        eta,
        e_plus: eta / 2.0,
        e_minus: -eta / 2.0,
        c_b_plus: ((1.0 + d) / 2.0).sqrt(),
        c_x_plus: ((1.0 - d) / 2.0).sqrt(),
        c_b_minus: ((1.0 - d) / 2.0).sqrt(),
        c_x_minus: -((1.0 + d) / 2.0).sqrt(),
    })
}

/// Frequency shift of the dominant sidepeak, `(δ/2)(η/|δ| − 1)`.
pub fn stark_shift(omega_cw: f64, delta: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::Domain(
            "Stark shift is undefined at δ = 0; the sidepeaks sit at ±Ω_cw/2".into(),
        ));
    }
    let eta = omega_cw.hypot(delta);
    Ok(0.5 * delta * (eta / delta.abs() - 1.0))
}

/// Drive amplitude producing the shift `delta_ac` at detuning `delta`.
pub fn drive_for_shift(delta_ac: f64, delta: f64) -> Result<f64> {
    let radicand = delta_ac * delta_ac + delta_ac * delta;
    if radicand < 0.0 {
        return Err(Error::Domain(format!(
            "no real drive gives Δ_ac = {delta_ac} μeV at δ = {delta} μeV"
        )));
    }
    Ok(2.0 * radicand.sqrt())
}

pub fn purcell_factor(g: f64, kappa: f64, gamma_0: f64) -> f64 {
    4.0 * g * g / (kappa * gamma_0)
}

/// Replaces γ_X by the cavity-enhanced rate `(1 + F_P)γ_0`.
pub fn purcell_scaled(p: &SystemParams, g: f64, kappa: f64, gamma_0: f64) -> Result<SystemParams> {
    if !(kappa > 0.0) {
        return Err(Error::invalid("kappa", "cavity linewidth must be positive"));
    }
    if !(gamma_0 > 0.0) {
        return Err(Error::invalid("gamma_0", "must be positive"));
    }
    if g / kappa > 0.1 {
        log::warn!("g/κ = {:.3} is not in the bad-cavity limit", g / kappa);
    }
    Ok(SystemParams { gamma_x: (1.0 + purcell_factor(g, kappa, gamma_0)) * gamma_0, ..*p })
}

/// Gaussian excitation pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    /// Intensity FWHM in ps.
    pub tau_p: f64,
    /// Pulse area in radians.
    pub area: f64,
    /// Pulse centre in ps.
    pub center: f64,
}

impl PulseParams {
    pub fn new(tau_p: f64) -> Self {
        Self { tau_p, area: PI, center: 5.0 * tau_p }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_p > 0.0) || !self.tau_p.is_finite() {
            return Err(Error::invalid("tau_p", "must be positive"));
        }
        if !self.area.is_finite() || !self.center.is_finite() {
            return Err(Error::invalid("pulse", "area and centre must be finite"));
        }
        Ok(())
    }

    /// Standard deviation of the amplitude envelope, ps.
    pub fn sigma(&self) -> f64 {
        self.tau_p / (2.0 * LN_2.sqrt())
    }

    /// Ω_p(t) in ps⁻¹ with `∫Ω_p dt = area`.
    pub fn amplitude(&self, t: f64) -> f64 {
        let s = self.sigma();
        let x = (t - self.center) / s;
        self.area / (s * (2.0 * PI).sqrt()) * (-0.5 * x * x).exp()
    }
}

/// `δσ⁺_Bσ⁻_B + (Ω_p(t)/2)σ_x^X + (Ω_cw/2)σ_x^B` in μeV, `t` in ps.
pub fn hamiltonian_pulsed(p: &SystemParams, pulse: &PulseParams, t: f64) -> Operator4 {
    let omega_p = crate::units::energy(pulse.amplitude(t));
    projector(Level::B) * c(p.delta) + sigma_x_x() * c(omega_p / 2.0) + sigma_x_b() * c(p.omega_cw / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::ops::hermiticity_error;
    use approx::assert_relative_eq;

    fn params(omega: f64, delta: f64) -> SystemParams {
        SystemParams::default().with_drive(omega, delta)
    }

    #[test]
    fn full_hamiltonian_elements() {
        let h = hamiltonian_full(&params(3.0, 0.0));
        assert_eq!(h[(3, 1)].re, 1.5);
        assert_eq!(h[(1, 0)].re, 1.5);
        assert_eq!(h[(0, 0)].re, -3240.0);
        assert_eq!(hermiticity_error(&hamiltonian_full(&params(2.0, -7.0))), 0.0);
    }

    #[test]
    fn reduced_eigenvalues() {
        let h = hamiltonian_reduced(&params(3.0, 4.0));
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        assert_relative_eq!(ev[0], -2.5, epsilon = 1e-12);
        assert_relative_eq!(ev[3], 2.5, epsilon = 1e-12);
    }

    #[test]
    fn dressed_coefficients() {
        let d = dressed_states(3.0, 4.0).unwrap();
        assert_relative_eq!(d.eta, 5.0);
        assert_relative_eq!(d.c_b_plus, 0.9f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(d.c_x_plus, 0.1f64.sqrt(), epsilon = 1e-14);
        let at = dressed_states(2.0, 0.0).unwrap();
        assert_relative_eq!(at.c_x_minus, -(0.5f64.sqrt()), epsilon = 1e-15);
        assert_eq!(dressed_states(0.0, 0.0), Err(Error::BasisDegenerate));
        let bare = dressed_states(0.0, 1.0).unwrap();
        assert_eq!((bare.c_b_plus, bare.c_x_minus), (1.0, -1.0));
    }

    #[test]
    fn dressed_states_diagonalize_reduced_hamiltonian() {
        for (om, de) in [(3.0, 4.0), (1.0, -10.0), (5.0, 0.0)] {
            let d = dressed_states(om, de).unwrap();
            let h = hamiltonian_reduced(&params(om, de));
            let (kp, km) = (d.ket_plus(), d.ket_minus());
            assert!((h * kp - kp * c(d.e_plus)).norm() < 1e-12);
            assert!((h * km - km * c(d.e_minus)).norm() < 1e-12);
            assert!(kp.dotc(&km).norm() < 1e-12);
        }
    }

    #[test]
    fn stark_shift_values() {
        assert_eq!(stark_shift(0.0, 2.0).unwrap(), 0.0);
        assert_relative_eq!(stark_shift(1.0, 1.0).unwrap(), 0.5 * (2f64.sqrt() - 1.0), epsilon = 1e-15);
        assert_relative_eq!(stark_shift(1.0, 1000.0).unwrap(), 1.0 / 4000.0, max_relative = 1e-5);
        assert!(stark_shift(1.0, 0.0).is_err());
        assert!(stark_shift(3.0, -2.0).unwrap() < 0.0);
    }

    #[test]
    fn drive_round_trip() {
        let g = 1.32;
        let om = drive_for_shift(5.0 * g, 100.0 * g).unwrap();
        assert_relative_eq!(stark_shift(om, 100.0 * g).unwrap(), 5.0 * g, max_relative = 1e-12);
        assert_eq!(drive_for_shift(0.0, 3.0).unwrap(), 0.0);
        assert!(drive_for_shift(-1.0, 2.0).is_err());
    }

    #[test]
    fn purcell_inversion() {
        let g = (10.0f64 * 300.0 * 1.32 / 4.0).sqrt();
        assert_relative_eq!(g, 31.464, epsilon = 1e-3);
        let p = purcell_scaled(&SystemParams::default(), g, 300.0, 1.32).unwrap();
        assert_relative_eq!(p.gamma_x, 11.0 * 1.32, max_relative = 1e-12);
        assert_eq!(p.gamma_b, SystemParams::default().gamma_b);
        assert!(purcell_scaled(&p, 1.0, 0.0, 1.32).is_err());
    }

    #[test]
    fn pulse_area_and_width() {
        let pulse = PulseParams::new(2.0);
        let area = crate::quantum::quadrature::integrate_real(|t| pulse.amplitude(t), -30.0, 40.0, 1e-12, 0.0).unwrap();
        assert_relative_eq!(area.value, PI, max_relative = 1e-10);
        // amplitude FWHM
        let half = pulse.amplitude(pulse.center) / 2.0;
        let fwhm = 2.0 * pulse.sigma() * (2.0 * (2.0f64).ln()).sqrt();
        assert_relative_eq!(pulse.amplitude(pulse.center + fwhm / 2.0), half, max_relative = 1e-12);
        assert_relative_eq!(fwhm / pulse.tau_p, 2f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn validation() {
        assert!(SystemParams { gamma_x: 0.0, ..Default::default() }.validate().is_err());
        assert_eq!(params(10.0, 5.0).validate().unwrap().len(), 0);
        assert_eq!(params(1000.0, 5.0).validate().unwrap().len(), 1);
    }
}
