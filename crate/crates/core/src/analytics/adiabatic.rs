//! Far-detuned dressing with the biexciton adiabatically eliminated.

use crate::error::{Error, Result};

/// Smallest |δ|/Ω_cw for which elimination is trusted without a warning.
const VALIDITY_RATIO: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticFom {
    /// Admixture amplitude `Ω_cw/2δ`.
    pub amplitude: f64,
    pub i: f64,
    /// Equal to `i` to second order in the admixture.
    pub n: f64,
    /// Effective pure dephasing rate, μeV.
    pub gamma_dephasing: f64,
    pub valid: bool,
}

pub fn adiabatic_fom(omega_cw: f64, delta: f64, gamma_x: f64, gamma_b: f64) -> Result<AdiabaticFom> {
    if delta == 0.0 {
        return Err(Error::Domain("adiabatic elimination needs δ ≠ 0".into()));
    }
    let valid = delta.abs() >= VALIDITY_RATIO * omega_cw.abs();
    if !valid {
        log::warn!("|δ|/Ω_cw = {:.2} is outside the adiabatic regime", delta.abs() / omega_cw.abs());
    }
    let a = omega_cw / (2.0 * delta);
    let i = 1.0 / (1.0 + gamma_b / (2.0 * gamma_x) * a * a);
    Ok(AdiabaticFom { amplitude: a, i, n: i, gamma_dephasing: a * a * gamma_b / 2.0, valid })
}

/// `δ/(δ + Δ_ac)`, the adiabatic indistinguishability at fixed shift.
pub fn stark_indistinguishability(delta: f64, delta_ac: f64) -> f64 {
    delta / (delta + delta_ac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::stark_shift;

    #[test]
    fn undriven_is_perfect() {
        let r = adiabatic_fom(0.0, 10.0, 1.32, 2.64).unwrap();
        assert_eq!(r.i, 1.0);
        assert_eq!(r.gamma_dephasing, 0.0);
    }

    #[test]
    fn equal_rates_reduce_to_detuning_form() {
        let (om, de) = (3.0, 40.0);
        let r = adiabatic_fom(om, de, 1.0, 2.0).unwrap();
        assert!((r.i - 4.0 * de * de / (4.0 * de * de + om * om)).abs() < 1e-15);
        let dac = stark_shift(om, de).unwrap();
        // Same to second order in Ω/δ.
        assert!((r.i - stark_indistinguishability(de, dac)).abs() < (om / de).powi(4));
    }

    #[test]
    fn zero_detuning_is_domain_error() {
        assert!(adiabatic_fom(1.0, 0.0, 1.0, 2.0).is_err());
    }
}
