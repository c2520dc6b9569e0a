//! Exact solution for resonant dressing with `γ_B = 2γ_X` and no phonons,
//! starting from `|X⟩`. Time is in ps and rates in ps⁻¹.

use crate::error::{Error, Result};
use crate::quantum::quadrature::integrate_panels;
use crate::quantum::C64;
use crate::units::angular;

const RTOL: f64 = 1e-8;
/// Integration horizon in units of 1/γ_X.
const HORIZON: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticAt {
    pub omega: f64,
    pub gamma: f64,
    /// `√(Ω² − γ²/4)`, imaginary below critical dressing.
    pub omega_t: C64,
    /// `√(Ω² − γ²/16)`
    pub omega_tp: C64,
    pub w0: f64,
}

fn csqrt(x: f64) -> C64 {
    C64::new(x, 0.0).sqrt()
}

impl AnalyticAt {
    /// `omega_cw` and `gamma_x` in μeV.
    pub fn new(omega_cw: f64, gamma_x: f64) -> Result<Self> {
        if !(omega_cw > 0.0) || !(gamma_x > 0.0) {
            return Err(Error::invalid("omega_cw", "drive and decay rate must be positive"));
        }
        let (omega, gamma) = (angular(omega_cw), angular(gamma_x));
        Ok(Self {
            omega,
            gamma,
            omega_t: csqrt(omega * omega - gamma * gamma / 4.0),
            omega_tp: csqrt(omega * omega - gamma * gamma / 16.0),
            w0: (omega * omega + gamma * gamma) / (omega * omega + gamma * gamma / 2.0),
        })
    }

    pub fn a_pm(&self, t: f64) -> (C64, C64) {
        let (o, g) = (self.omega, self.gamma);
        let pre = (o * o / 2.0) / (o * o + g * g / 2.0);
        let k = C64::new(0.0, 3.0 * g / 4.0) / self.omega_tp;
        let ph = C64::new(0.0, 1.0) * self.omega_tp * t;
        let decay = -0.75 * g * t;
        ((1.0 - k) * pre * (ph + decay).exp(), (1.0 + k) * pre * (-ph + decay).exp())
    }

    pub fn rho_x(&self, t: f64) -> f64 {
        let (ap, am) = self.a_pm(t);
        ((-self.gamma * t).exp() / 2.0 * (self.w0 + ap + am)).re
    }

    /// `⟨B|ρ|X⟩`
    pub fn rho_bx(&self, t: f64) -> C64 {
        let (o, g) = (self.omega, self.gamma);
        let (ap, am) = self.a_pm(t);
        let i = C64::new(0.0, 1.0);
        let bracket = (g / 4.0 + i * self.omega_tp) * ap + (g / 4.0 - i * self.omega_tp) * am
            - o * o * g / (o * o + g * g / 2.0);
        i * (-g * t).exp() / (2.0 * o) * bracket
    }

    pub fn rho_b(&self, t: f64) -> f64 {
        (-self.gamma * t).exp() - self.rho_x(t)
    }

    pub fn c_pm(&self, t: f64) -> (C64, C64) {
        let i = C64::new(0.0, 1.0);
        let tan_phi = self.gamma / (2.0 * self.omega_t);
        let sec_phi = self.omega / self.omega_t;
        let (rx, rbx) = (C64::from(self.rho_x(t)), self.rho_bx(t));
        (
            0.5 * (rx * (1.0 - i * tan_phi) - sec_phi * rbx),
            0.5 * (rx * (1.0 + i * tan_phi) + sec_phi * rbx),
        )
    }

    /// `∫₀^∞ |g¹(t, τ)|² dτ`
    pub fn t_fn(&self, t: f64) -> f64 {
        let i = C64::new(0.0, 1.0);
        let (cp, cm) = self.c_pm(t);
        let (w, wc) = (self.omega_t, self.omega_t.conj());
        let g = 1.5 * self.gamma;
        let v = cp.norm_sqr() / (g - 0.5 * i * (w - wc))
            + cm.norm_sqr() / (g + 0.5 * i * (w - wc))
            + cp * cm.conj() / (g - 0.5 * i * (w + wc))
            + cm * cp.conj() / (g + 0.5 * i * (w + wc));
        v.re
    }

    pub fn g1(&self, t: f64, tau: f64) -> C64 {
        let i = C64::new(0.0, 1.0);
        let (cp, cm) = self.c_pm(t);
        let half = 0.5 * self.omega_t * tau * i;
        C64::from((-0.75 * self.gamma * tau).exp()) * (cp * half.exp() + cm * (-half).exp())
    }

    pub fn f0(&self, t: f64) -> C64 {
        (C64::from(self.rho_x(t)) - self.rho_bx(t)) / 2f64.sqrt()
    }

    pub fn d_pm(&self, t: f64) -> (C64, C64) {
        let i = C64::new(0.0, 1.0);
        let (o, g, w) = (self.omega, self.gamma, self.omega_t);
        let f0 = self.f0(t);
        let common = -i * f0 / (2.0 * o);
        let bracket = (-g * t).exp() / (2f64.sqrt() * w) - f0 / w * (1.0 - i * g / (2.0 * o));
        (common + 0.5 * i * bracket, common - 0.5 * i * bracket)
    }

    pub fn s_fn(&self, t: f64) -> f64 {
        let (o, g, w) = (self.omega, self.gamma, self.omega_t.re);
        let i = C64::new(0.0, 1.0);
        let (dp, dm) = self.d_pm(t);
        let first = 2.0 * o / (3.0 * g) * (dp.norm_sqr() * (o - w) + dm.norm_sqr() * (o + w));
        let cross = dp * dm.conj() * (g / 2.0 - i * w) / (3.0 * g - 2.0 * i * w);
        first + g * 2.0 * cross.re
    }

    pub fn g1_pm(&self, t: f64, tau: f64) -> C64 {
        let i = C64::new(0.0, 1.0);
        let (o, g, w) = (self.omega, self.gamma, self.omega_t.re);
        let (dp, dm) = self.d_pm(t);
        let half = 0.5 * w * tau * i;
        let v = dp * half.exp() * (i * (o - w) + g / 2.0) + dm * (-half).exp() * (i * (o + w) + g / 2.0);
        v * ((-0.75 * g * tau).exp() / 2f64.sqrt())
    }

    /// Emitted photon number.
    pub fn n(&self) -> f64 {
        let (o2, g2) = (self.omega * self.omega, self.gamma * self.gamma);
        self.w0 / 2.0 + (5.0 * g2 * o2 / 4.0) / ((o2 + g2 / 2.0) * (o2 + 3.0 * g2))
    }

    /// Photon number per sidepeak.
    pub fn n_pm(&self) -> f64 {
        0.25
    }

    fn integrate_t(&self, f: impl Fn(f64) -> f64) -> Result<f64> {
        let end = HORIZON / self.gamma;
        let cycles = end * self.omega_tp.norm() / (2.0 * std::f64::consts::PI);
        let panels = (4.0 * cycles).ceil().clamp(8.0, 200_000.0) as usize;
        Ok(integrate_panels(|t| C64::from(f(t)), 0.0, end, panels, RTOL, 0.0)?.value.re)
    }

    pub fn indistinguishability(&self) -> Result<f64> {
        if self.omega_t.norm() < 1e-12 * self.omega {
            return Err(Error::Domain("critical dressing Ω_cw = γ_X/2: closed form is singular".into()));
        }
        let n = self.n();
        Ok(2.0 * self.gamma * self.gamma / (n * n) * self.integrate_t(|t| self.t_fn(t))?)
    }

    pub fn sidepeak_indistinguishability(&self) -> Result<f64> {
        if self.omega <= self.gamma / 2.0 {
            return Err(Error::Domain(format!(
                "sidepeak indistinguishability needs Ω_cw > γ_X/2 (Ω/γ = {:.3})",
                self.omega / self.gamma
            )));
        }
        Ok(8.0 * self.gamma * self.gamma * self.integrate_t(|t| self.s_fn(t))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GX: f64 = 1.32;

    #[test]
    fn initial_state_is_exciton() {
        let a = AnalyticAt::new(20.0 * GX, GX).unwrap();
        assert!((a.rho_x(0.0) - 1.0).abs() < 1e-14);
        assert!(a.rho_bx(0.0).norm() < 1e-14);
        assert!(a.rho_b(0.0).abs() < 1e-14);
    }

    #[test]
    fn well_dressed_limits() {
        let a = AnalyticAt::new(2000.0 * GX, GX).unwrap();
        assert!((a.n() - 0.5).abs() < 1e-5);
        assert!((a.indistinguishability().unwrap() - 11.0 / 21.0).abs() < 1e-3);
        assert!((a.sidepeak_indistinguishability().unwrap() - 2.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn tau_integral_matches_closed_form() {
        let a = AnalyticAt::new(3.0 * GX, GX).unwrap();
        let t = 150.0;
        let direct = integrate_panels(|tau| C64::from(a.g1(t, tau).norm_sqr()), 0.0, 60.0 / a.gamma, 64, 1e-10, 0.0)
            .unwrap()
            .value
            .re;
        assert!((direct / a.t_fn(t) - 1.0).abs() < 1e-8, "{direct} vs {}", a.t_fn(t));
    }

    #[test]
    fn weak_dressing_keeps_number_and_indistinguishability() {
        let a = AnalyticAt::new(0.3 * GX, GX).unwrap();
        assert!(a.omega_t.re.abs() < 1e-15);
        assert!(a.n().is_finite());
        assert!(a.indistinguishability().unwrap().is_finite());
        assert!(matches!(a.sidepeak_indistinguishability(), Err(Error::Domain(_))));
    }
}
