//! Acoustic-phonon coupling in the polaron frame.
//!
//! Bath parameters use α in ps², ω_b in meV and T in K. Internally the
//! spectral function and correlation functions are evaluated in ps⁻¹.

mod bath;
mod pme;

pub use bath::{Channel, PhononBath};
pub use pme::{pme_dissipator, pme_dissipator_ops, secular_generator, secular_rates, PhononRates};

use crate::error::{Error, Result};
use crate::quantum::quadrature::integrate_panels;
use crate::quantum::C64;
use crate::units::{angular, energy, thermal_energy};

/// Upper limit of the frequency integrals in units of ω_b.
pub const OMEGA_MAX_FACTOR: f64 = 10.0;
/// Relative tolerance of the φ(τ) quadrature.
pub const PHI_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    I,
    II,
    III,
    Custom,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhononParams {
    /// Coupling strength, ps².
    pub alpha: f64,
    /// Cutoff frequency, meV.
    pub omega_b: f64,
    /// Temperature, K.
    pub temperature: f64,
    pub preset: Preset,
}

impl PhononParams {
    pub fn preset(p: Preset) -> Self {
        let (alpha, omega_b) = match p {
            Preset::I => (0.04, 0.9),
            Preset::II => (0.006, 5.5),
            Preset::III => (0.025, 2.5),
            Preset::Custom | Preset::None => (0.0, 1.0),
        };
        Self { alpha, omega_b, temperature: 4.0, preset: p }
    }

    pub fn custom(alpha: f64, omega_b: f64, temperature: f64) -> Result<Self> {
        let p = Self { alpha, omega_b, temperature, preset: Preset::Custom };
        p.validate()?;
        Ok(p)
    }

    /// Accepts `phonon-set-1|2|3` and `none`.
    pub fn from_name(name: &str) -> Result<Option<Self>> {
        match name {
            "phonon-set-1" | "I" => Ok(Some(Self::preset(Preset::I))),
            "phonon-set-2" | "II" => Ok(Some(Self::preset(Preset::II))),
            "phonon-set-3" | "III" => Ok(Some(Self::preset(Preset::III))),
            "none" => Ok(None),
            other => Err(Error::UnknownName {
                kind: "phonon preset",
                name: other.to_string(),
                known: "phonon-set-1, phonon-set-2, phonon-set-3, none".into(),
            }),
        }
    }

    pub fn label(&self) -> &'static str {
        match self.preset {
            Preset::I => "phonon-set-1",
            Preset::II => "phonon-set-2",
            Preset::III => "phonon-set-3",
            Preset::Custom => "custom",
            Preset::None => "none",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::invalid("alpha", "must be finite and ≥ 0"));
        }
        if !(self.omega_b > 0.0) || !self.omega_b.is_finite() {
            return Err(Error::invalid("omega_b", "must be positive"));
        }
        if !(self.temperature >= 0.0) || !self.temperature.is_finite() {
            return Err(Error::invalid("temperature", "must be finite and ≥ 0"));
        }
        Ok(())
    }

    /// Cutoff in ps⁻¹.
    pub fn omega_b_per_ps(&self) -> f64 {
        angular(1e3 * self.omega_b)
    }

    /// `k_B T` in ps⁻¹.
    pub fn kt_per_ps(&self) -> f64 {
        angular(thermal_energy(self.temperature))
    }
}

/// `J(ω) = αω³e^{−ω²/2ω_b²}` in ps⁻¹ for ω given in μeV.
pub fn spectral_function(omega_uev: f64, bath: &PhononParams) -> f64 {
    spectral_density(angular(omega_uev), bath.alpha, bath.omega_b_per_ps())
}

pub(crate) fn spectral_density(w: f64, alpha: f64, wb: f64) -> f64 {
    alpha * w.powi(3) * (-w * w / (2.0 * wb * wb)).exp()
}

/// `ω coth(ω/2k_BT)`, finite at ω = 0.
pub(crate) fn omega_coth(w: f64, kt: f64) -> f64 {
    if kt == 0.0 {
        return w;
    }
    let x = w / (2.0 * kt);
    if x < 1e-6 {
        2.0 * kt * (1.0 + x * x / 3.0)
    } else {
        w / x.tanh()
    }
}

fn phi_panels(tau: f64, wmax: f64) -> usize {
    ((wmax * tau / std::f64::consts::PI).ceil() as usize).clamp(1, 4000)
}

/// φ(τ) = ∫ J(ω)/ω² [coth(ω/2k_BT) cos ωτ − i sin ωτ] dω.
pub fn phi(tau: f64, bath: &PhononParams) -> Result<C64> {
    if !(tau >= 0.0) {
        return Err(Error::invalid("tau", "must be ≥ 0"));
    }
    bath.validate()?;
    if bath.alpha == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let (wb, kt, a) = (bath.omega_b_per_ps(), bath.kt_per_ps(), bath.alpha);
    let wmax = OMEGA_MAX_FACTOR * wb;
    let f = |w: f64| {
        let g = a * (-w * w / (2.0 * wb * wb)).exp();
        let (s, c) = (w * tau).sin_cos();
        C64::new(g * omega_coth(w, kt) * c, -g * w * s)
    };
    let r = integrate_panels(f, 0.0, wmax, phi_panels(tau, wmax), PHI_RTOL, 1e-15 * a * wb * wb)?;
    Ok(r.value)
}

/// dφ/dτ from the same frequency integral.
pub(crate) fn phi_derivative(tau: f64, bath: &PhononParams) -> Result<C64> {
    if bath.alpha == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let (wb, kt, a) = (bath.omega_b_per_ps(), bath.kt_per_ps(), bath.alpha);
    let wmax = OMEGA_MAX_FACTOR * wb;
    let f = |w: f64| {
        let g = a * w * (-w * w / (2.0 * wb * wb)).exp();
        let (s, c) = (w * tau).sin_cos();
        C64::new(-g * omega_coth(w, kt) * s, -g * w * c)
    };
    let r = integrate_panels(f, 0.0, wmax, phi_panels(tau, wmax), PHI_RTOL, 1e-15 * a * wb.powi(3))?;
    Ok(r.value)
}

/// ⟨B⟩ = e^{−φ(0)/2}.
pub fn b_factor(bath: &PhononParams) -> Result<f64> {
    Ok((-phi(0.0, bath)?.re / 2.0).exp())
}

/// Low-temperature series for ⟨B⟩², `exp[−αω_b²(1 + T̃²/3 − T̃⁴/15)]`, `T̃ = πk_BT/ω_b`.
pub fn b_factor_series(bath: &PhononParams) -> f64 {
    let wb = bath.omega_b_per_ps();
    let tt = std::f64::consts::PI * bath.kt_per_ps() / wb;
    (-bath.alpha * wb * wb * (1.0 + tt * tt / 3.0 - tt.powi(4) / 15.0)).exp()
}

/// Weak-coupling dressed-state rate `Γ′₀ = (π/2)(Ω/η)²J(η)` in μeV and the
/// thermal occupation at η. The downward rate is `Γ′₀(n + 1)`, the upward `Γ′₀n`.
pub fn weak_coupling_rate(omega_cw: f64, delta: f64, bath: &PhononParams) -> Result<(f64, f64)> {
    let eta = omega_cw.hypot(delta);
    if eta == 0.0 {
        return Err(Error::BasisDegenerate);
    }
    let w = angular(eta);
    let rate = std::f64::consts::FRAC_PI_2 * (omega_cw / eta).powi(2)
        * spectral_density(w, bath.alpha, bath.omega_b_per_ps());
    let kt = bath.kt_per_ps();
    let n = if kt == 0.0 { 0.0 } else { 1.0 / ((w / kt).exp_m1()) };
    Ok((energy(rate), n))
}

/// Fraction of photons left in the zero-phonon line, without and with a
/// Purcell-enhancing cavity.
pub fn sideband_efficiency(b: f64, purcell: Option<f64>) -> Result<(f64, Option<f64>)> {
    if !(b > 0.0 && b <= 1.0) {
        return Err(Error::invalid("b", "⟨B⟩ must lie in (0, 1]"));
    }
    let b2 = b * b;
    Ok((b2, purcell.map(|f| b2 * f / (1.0 + b2 * f))))
}
