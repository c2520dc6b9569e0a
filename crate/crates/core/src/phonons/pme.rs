//! Polaron master equation: the full Born–Markov dissipator and its secular
//! form in the dressed-state frame.
//!
//! The drive Ω_cw is the ⟨B⟩-renormalized amplitude. The bare coupling
//! Ω_cw/⟨B⟩ in the system operators X_m combines with the ⟨B⟩² carried by
//! the polaron kernels, so both forms below use `X_m = (Ω_cw/2)σ_m` against
//! `G_x = cosh φ − 1` and `G_y = sinh φ`.

use super::bath::{Channel, PhononBath};
use crate::error::{Error, Result};
use crate::quantum::ops::{
    ensure_hermitian, outer, projector, sigma_x_b, sigma_x_x, sigma_y_b, sigma_y_x, transition, Level,
    Operator4, C64,
};
use crate::quantum::superop::{left_mul, right_mul, Collapse, Liouvillian};
use crate::system::DressedBasis;
use crate::units::{angular, HBAR_UEV_PS};

/// `Σ_m [Y_m ρ, X_m] + H.c.` with `Y_m = ∫₀^∞ G_m(τ) X̃_m(−τ) dτ` and
/// `X̃(−τ) = e^{−iHτ} X e^{iHτ}`. `h` and `x_ops` are in ps⁻¹.
pub fn pme_dissipator_ops(h: &Operator4, x_ops: &[Operator4; 2], bath: &PhononBath) -> Result<Liouvillian> {
    ensure_hermitian(h, "H_S")?;
    if bath.is_trivial() {
        return Ok(Liouvillian::zero());
    }
    let eig = h.symmetric_eigen();
    let v = eig.eigenvectors;
    let e = eig.eigenvalues;
    let mut total = Liouvillian::zero();
    for (x, ch) in x_ops.iter().zip([Channel::X, Channel::Y]) {
        let xe = v.adjoint() * x * v;
        let mut ye = Operator4::zeros();
        for a in 0..4 {
            for b in 0..4 {
                if xe[(a, b)].norm() > 0.0 {
                    ye[(a, b)] = xe[(a, b)] * bath.half_fourier(ch, e[b] - e[a]);
                }
            }
        }
        let y = v * ye * v.adjoint();
        let yd = y.adjoint();
        let m = left_mul(&y) * right_mul(x) - left_mul(&(x * y)) + left_mul(x) * right_mul(&yd) - right_mul(&(yd * x));
        total += Liouvillian { matrix: m };
    }
    Ok(total)
}

/// Phonon dissipator for the cascade Hamiltonian `h_s` (ps⁻¹) driven at
/// `omega_cw` (μeV) on B–X and, optionally, on X–G.
pub fn pme_dissipator(h_s: &Operator4, omega_cw: f64, bath: &PhononBath, include_x_drive: bool) -> Result<Liouvillian> {
    let half = C64::from(angular(omega_cw) / 2.0);
    let (mut xx, mut xy) = (sigma_x_b(), sigma_y_b());
    if include_x_drive {
        xx += sigma_x_x();
        xy += sigma_y_x();
    }
    pme_dissipator_ops(h_s, &[xx * half, xy * half], bath)
}

/// Complex dressed-frame scattering rates, μeV.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhononRates {
    pub gamma0_x: C64,
    pub gamma_plus_x: C64,
    pub gamma_minus_x: C64,
    pub gamma_plus_y: C64,
    pub gamma_minus_y: C64,
}

impl PhononRates {
    /// Total |+⟩ → |−⟩ rate.
    pub fn down(&self) -> f64 {
        (self.gamma_plus_x + self.gamma_plus_y).re
    }

    /// Total |−⟩ → |+⟩ rate.
    pub fn up(&self) -> f64 {
        (self.gamma_minus_x + self.gamma_minus_y).re
    }
}

pub fn secular_rates(omega_cw: f64, delta: f64, bath: &PhononBath) -> Result<PhononRates> {
    let eta_uev = omega_cw.hypot(delta);
    if eta_uev == 0.0 {
        return Err(Error::BasisDegenerate);
    }
    let (om, de, eta) = (angular(omega_cw), angular(delta), angular(eta_uev));
    let fx = |w: f64| bath.half_fourier(Channel::X, w);
    let fy = |w: f64| bath.half_fourier(Channel::Y, w);
    let px = om * om * de * de / (2.0 * eta * eta);
    let py = om * om / 2.0;
    let to_uev = |z: C64| z * HBAR_UEV_PS;
    Ok(PhononRates {
        gamma0_x: to_uev(fx(0.0) * (om.powi(4) / (2.0 * eta * eta))),
        gamma_plus_x: to_uev(fx(eta) * px),
        gamma_minus_x: to_uev(fx(-eta) * px),
        gamma_plus_y: to_uev(fy(eta) * py),
        gamma_minus_y: to_uev(fy(-eta) * py),
    })
}

fn nonnegative(rate_uev: f64, name: &'static str) -> Result<f64> {
    if rate_uev < -1e-10 {
        return Err(Error::invalid(name, format!("negative scattering rate {rate_uev:.3e} μeV")));
    }
    Ok(angular(rate_uev.max(0.0)))
}

/// Interaction-frame generator in the secular approximation (ps⁻¹), with
/// radiative decay, phonon scattering between |±⟩ and the phonon-induced
/// level shifts.
pub fn secular_generator(rates: &PhononRates, basis: &DressedBasis, gamma_x: f64, gamma_b: f64) -> Result<Liouvillian> {
    let (gx, gb) = (angular(gamma_x), angular(gamma_b));
    let (kp, km) = (basis.ket_plus(), basis.ket_minus());
    let ground = crate::quantum::ops::ket(Level::G);
    let ybra = crate::quantum::ops::ket(Level::Y);
    let d = basis.detuning_ratio();
    let s = outer(&kp, &km);
    let sd = s.adjoint();
    let sz = s * sd - sd * s;
    let c = C64::from;

    let mut terms = vec![
        Collapse::new(gx, outer(&ground, &kp) * c(basis.c_x_plus)),
        Collapse::new(gx, outer(&ground, &km) * c(basis.c_x_minus)),
        Collapse::new(gx, transition(Level::G, Level::Y)),
        Collapse::new(gb / 2.0, outer(&ybra, &kp) * c(basis.c_b_plus)),
        Collapse::new(gb / 2.0, outer(&ybra, &km) * c(basis.c_b_minus)),
        Collapse::new(gb / 2.0, s * c((1.0 - d) / 2.0)),
        Collapse::new(gb / 2.0, sd * c((1.0 + d) / 2.0)),
        Collapse::new(gb / 2.0, sz * c(basis.c_b_plus * basis.c_x_plus)),
    ];
    terms.push(Collapse::new(nonnegative(rates.gamma0_x.re, "gamma0_x")?, sz));
    terms.push(Collapse::new(nonnegative(rates.down(), "gamma_plus")?, sd));
    terms.push(Collapse::new(nonnegative(rates.up(), "gamma_minus")?, s));

    let shift = |z: C64| c(angular(z.im) / 2.0);
    let h = (projector(Level::X) + projector(Level::B)) * shift(rates.gamma0_x)
        + s * sd * shift(rates.gamma_plus_x + rates.gamma_plus_y)
        + sd * s * shift(rates.gamma_minus_x + rates.gamma_minus_y);
    crate::quantum::assemble_lindblad(&h, &terms)
}

/// Weak-coupling check used by tests: the secular down rate over `Γ′₀(n+1)`.
#[cfg(test)]
pub(crate) fn weak_coupling_ratio(omega_cw: f64, delta: f64, bath: &PhononBath) -> f64 {
    let r = secular_rates(omega_cw, delta, bath).unwrap();
    let (g, n) = super::weak_coupling_rate(omega_cw, delta, &bath.params).unwrap();
    r.down() / (g * (n + 1.0))
}

#[cfg(test)]
mod tests {
    use super::super::{PhononParams, Preset};
    use super::*;
    use crate::quantum::ops::{DensityMatrix, Level};
    use crate::system::{dressed_states, hamiltonian_reduced, SystemParams};
    use crate::units::angular_op;
    use std::sync::OnceLock;

    fn bath(p: Preset) -> &'static PhononBath {
        static B: OnceLock<[PhononBath; 3]> = OnceLock::new();
        let all = B.get_or_init(|| {
            [Preset::I, Preset::II, Preset::III].map(|p| PhononBath::new(PhononParams::preset(p)).unwrap())
        });
        &all[match p {
            Preset::I => 0,
            Preset::II => 1,
            _ => 2,
        }]
    }

    const GX: f64 = 1.32;

    #[test]
    fn rate_prefactor_limits() {
        let r = secular_rates(20.0 * GX, 0.0, bath(Preset::I)).unwrap();
        assert_eq!(r.gamma_plus_x, C64::new(0.0, 0.0));
        assert!(r.gamma_plus_y.re > 0.0);
        let z = secular_rates(0.0, 3.0, bath(Preset::I)).unwrap();
        assert_eq!(z.down(), 0.0);
    }

    #[test]
    fn detailed_balance_set_ii() {
        let b = bath(Preset::II);
        let kt = b.params.kt_per_ps();
        for k in 0..=10 {
            let delta = 10.0 * k as f64 * GX;
            let r = secular_rates(20.0 * GX, delta, b).unwrap();
            let eta = angular((20.0 * GX).hypot(delta));
            let ratio = r.gamma_plus_y.re / r.gamma_minus_y.re;
            assert!((ratio / (eta / kt).exp() - 1.0).abs() < 0.02, "δ = {delta}: {ratio}");
        }
    }

    #[test]
    fn rates_scale_quadratically_in_drive() {
        let b = bath(Preset::III);
        let delta = 50.0 * GX;
        let (r1, r2) = (secular_rates(0.5, delta, b).unwrap(), secular_rates(5.0, delta, b).unwrap());
        let slope = |a: f64, c: f64| (c / a).log10();
        assert!((slope(r1.down(), r2.down()) - 2.0).abs() < 0.05);
        assert!((slope(r1.up(), r2.up()) - 2.0).abs() < 0.05);
        assert!((slope(r1.gamma0_x.re, r2.gamma0_x.re) - 4.0).abs() < 0.05);
    }

    #[test]
    fn weak_coupling_agreement_set_ii() {
        let b = bath(Preset::II);
        for (om, de) in [(10.0 * GX, 20.0 * GX), (20.0 * GX, 60.0 * GX)] {
            let ratio = weak_coupling_ratio(om, de, b);
            assert!((ratio - 1.0).abs() < 0.05, "ratio {ratio}");
        }
    }

    #[test]
    fn full_dissipator_transfer_matches_secular() {
        let b = bath(Preset::I);
        for (om, de) in [(50.0 * GX, 0.0), (30.0 * GX, 60.0 * GX)] {
            let p = SystemParams::default().with_drive(om, de);
            let h = angular_op(&hamiltonian_reduced(&p));
            let l = pme_dissipator(&h, om, b, false).unwrap();
            assert!(l.trace_defect() < 1e-9);
            let basis = dressed_states(om, de).unwrap();
            let (kp, km) = (basis.ket_plus(), basis.ket_minus());
            let out = l.apply_op(&DensityMatrix::from_ket(&kp).0);
            let transfer = (km.adjoint() * out * km)[(0, 0)].re;
            let r = secular_rates(om, de, b).unwrap();
            assert!((transfer / angular(r.down()) - 1.0).abs() < 0.02, "{transfer} vs {}", angular(r.down()));
        }
    }

    #[test]
    fn zero_coupling_gives_zero_increment() {
        let free = PhononBath::new(PhononParams { alpha: 0.0, ..PhononParams::preset(Preset::I) }).unwrap();
        let h = angular_op(&hamiltonian_reduced(&SystemParams::default().with_drive(5.0, 1.0)));
        assert_eq!(pme_dissipator(&h, 5.0, &free, true).unwrap(), Liouvillian::zero());
    }

    #[test]
    fn secular_generator_without_phonons_at_resonance() {
        // From |X⟩ with γ_B = 2γ_X the dressed populations are e^{−γt}/2.
        let basis = dressed_states(40.0 * GX, 0.0).unwrap();
        let l = secular_generator(&PhononRates::default(), &basis, GX, 2.0 * GX).unwrap();
        assert!(l.trace_defect() < 1e-12);
        let gx = angular(GX);
        let t = 1.3 / gx;
        let y = (l.matrix * C64::from(t)).exp() * DensityMatrix::pure(Level::X).to_vec();
        let rho = DensityMatrix::from_vec(&y);
        for k in [basis.ket_plus(), basis.ket_minus()] {
            assert!((rho.expectation_ket(&k) - (-1.3f64).exp() / 2.0).abs() < 1e-12);
        }
    }
}
