//! Photons emitted by the far-detuned cw excitation of the X–G transition.

use std::f64::consts::PI;

use super::Numerics;
use crate::error::Result;
use crate::phonons::PhononBath;
use crate::phonons::pme_dissipator;
use crate::quantum::ops::{vec_index, DensityMatrix, Level, Vec16};
use crate::quantum::quadrature::UniformGrid;
use crate::quantum::steady::steady_state;
use crate::quantum::superop::{assemble_lindblad, Liouvillian};
use crate::system::{hamiltonian_full, radiative_collapses, SystemParams};
use crate::units::{angular, angular_op};

/// Intervals per propagation chunk over the repetition period.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CwError {
    pub e_cw: f64,
    /// Photons per period from the steady state.
    pub n0: f64,
    /// Photons per period after initialization in |X⟩.
    pub n_x: f64,
}

/// Generator with the full cascade Hamiltonian, including the X–G drive.
pub fn full_generator(p: &SystemParams, bath: Option<&PhononBath>) -> Result<Liouvillian> {
    let h = angular_op(&hamiltonian_full(p));
    let mut l = assemble_lindblad(&h, &radiative_collapses(p))?;
    if let Some(bath) = bath {
        l += pme_dissipator(&h, p.omega_cw, bath, true)?;
    }
    Ok(l)
}

/// `γ_X ∫₀^T ρ_XX dt`, propagating in bounded chunks.
fn photons_over(l: &Liouvillian, rho0: &DensityMatrix, gamma: f64, period: f64, numerics: &Numerics) -> Result<f64> {
    let propagator = numerics.propagator()?;
    let f = l.spectral_scales().max_freq;
    let step = if f > 0.0 { 2.0 * PI / (f * numerics.points_per_period) } else { period };
    let grid = UniformGrid::covering(0.0, period, step.min(period / numerics.min_intervals as f64));
    let mut y: Vec16 = rho0.to_vec();
    let mut total = 0.0;
    let mut k0 = 0;
    while k0 < grid.len - 1 {
        let k1 = (k0 + CHUNK).min(grid.len - 1);
        let times: Vec<f64> = (k0..=k1).map(|k| grid.point(k)).collect();
        let states = propagator.propagate(l, &y, &times)?;
        let sub = UniformGrid { start: times[0], step: grid.step, len: times.len() };
        total += sub.simpson_weights().iter().zip(&states).map(|(w, s)| w * s[vec_index(1, 1)].re).sum::<f64>();
        y = states[states.len() - 1];
        k0 = k1;
    }
    Ok(gamma * total)
}

/// `E_cw = N₀/N_X` over one repetition period.
pub fn cw_error_rate(p: &SystemParams, bath: Option<&PhononBath>, numerics: &Numerics) -> Result<CwError> {
    p.validate()?;
    let gamma = angular(p.gamma_x);
    let period = p.t_rep_ps();
    let l = full_generator(p, bath)?;
    // Without drive the ground state is stationary and the kernel is degenerate.
    let n0 = if p.omega_cw == 0.0 { 0.0 } else { gamma * period * steady_state(&l)?.population(Level::X) };
    let n_x = photons_over(&l, &DensityMatrix::pure(Level::X), gamma, period, numerics)?;
    Ok(CwError { e_cw: n0 / n_x, n0, n_x })
}
