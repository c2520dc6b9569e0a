//! HBT g²[0] under finite-duration pulse excitation.
//!
//! Emission of a photon at `t` projects the emitter onto `|G⟩`, so the τ
//! integral of the two-photon correlation reduces to
//! `h(t) = ∫_t^∞ Tr[P_X Φ(s, t)|G⟩⟨G|] ds`. The function `λ(t)` with
//! `h(t) = λ(t)ᵀ vec(|G⟩⟨G|)` obeys `λ̇ = −p − 𝓛(t)ᵀλ`, which is integrated
//! backwards over the pulse window once. After the pulse `|G⟩` is
//! stationary and `h` vanishes.

use std::f64::consts::PI;

use super::{evolve, Diagnostics, Numerics};
use crate::error::{Error, Result};
use crate::phonons::PhononBath;
use crate::phonons::pme_dissipator_ops;
use crate::quantum::ops::{
    projector, sigma_x_b, sigma_x_x, sigma_y_b, sigma_y_x, trace_functional, vec_index, DensityMatrix, Level,
    Operator4, Vec16, C64,
};
use crate::quantum::propagate::{Physicality, Trajectory};
use crate::quantum::quadrature::UniformGrid;
use crate::quantum::superop::{assemble_lindblad, Liouvillian};
use crate::system::{hamiltonian_pulsed, radiative_collapses, PulseParams, SystemParams};
use crate::units::{angular, angular_op};

/// Integrator steps required across six pulse widths.
pub const MIN_STEPS_PER_SIX_WIDTHS: f64 = 200.0;
/// Half-width of the pulse window in amplitude standard deviations.
const WINDOW_SIGMAS: f64 = 8.0;

#[derive(Debug, Clone)]
pub struct PulsedG2 {
    pub g2: f64,
    /// Photons emitted per pulse.
    pub n: f64,
    pub steps: usize,
    pub diagnostics: Diagnostics,
}

fn generator_at(p: &SystemParams, pulse: &PulseParams, bath: Option<&PhononBath>, t: f64) -> Result<Liouvillian> {
    let h = angular_op(&hamiltonian_pulsed(p, pulse, t));
    let mut l = assemble_lindblad(&h, &radiative_collapses(p))?;
    if let Some(bath) = bath {
        let (wc, wp) = (C64::from(angular(p.omega_cw) / 2.0), C64::from(pulse.amplitude(t) / 2.0));
        let x_ops = [sigma_x_b() * wc + sigma_x_x() * wp, sigma_y_b() * wc + sigma_y_x() * wp];
        l += pme_dissipator_ops(&h, &x_ops, bath)?;
    }
    Ok(l)
}

/// `q = ∫₀^∞ e^{𝓛ᵀu} p du` for a generator whose unique steady state is
/// `|G⟩⟨G|` with `Tr[P_X |G⟩⟨G|] = 0`: the solution of `𝓛ᵀq = −p`
/// orthogonal to that steady state.
fn terminal_adjoint(l: &Liouvillian, p: &Vec16) -> Result<Vec16> {
    let lt = l.matrix.transpose();
    let svd = lt.svd(true, true);
    let eps = 1e-12 * svd.singular_values.max();
    let q = svd.solve(&(-p), eps).map_err(|e| Error::Integration { t: f64::INFINITY, reason: e.to_string() })?;
    let residual = (lt * q + p).camax();
    if residual > 1e-8 * p.camax().max(1.0) {
        return Err(Error::Integration { t: f64::INFINITY, reason: format!("terminal adjoint residual {residual:.2e}") });
    }
    let identity = crate::quantum::ops::vectorize(&Operator4::identity());
    Ok(q - identity * q[vec_index(0, 0)])
}

/// g²[0] for a pulse starting from `|G⟩`, with the cw dressing on B–X and,
/// optionally, phonon coupling of both drives. `step` defaults to a value
/// resolving both the pulse and the dressed dynamics.
pub fn hbt_g2_pulsed(
    p: &SystemParams,
    pulse: &PulseParams,
    bath: Option<&PhononBath>,
    step: Option<f64>,
    numerics: &Numerics,
) -> Result<PulsedG2> {
    pulse.validate()?;
    p.validate()?;
    let limit = 6.0 * pulse.tau_p / MIN_STEPS_PER_SIX_WIDTHS;
    let after = generator_at(p, pulse, bath, f64::INFINITY)?;
    let step = match step {
        Some(h) if !(h > 0.0 && h <= limit) => return Err(Error::StepResolution { step: h, limit }),
        Some(h) => h,
        None => {
            let f = after.spectral_scales().max_freq;
            let dressed = if f > 0.0 { 2.0 * PI / (f * numerics.points_per_period) } else { f64::INFINITY };
            dressed.min(limit / 2.0)
        }
    };
    let start = pulse.center - WINDOW_SIGMAS * pulse.sigma();
    let end = pulse.center + WINDOW_SIGMAS * pulse.sigma();
    let grid = UniformGrid::covering(start, end, step);
    let h = grid.step;
    let n_steps = grid.len - 1;

    // Generators at nodes (even entries) and midpoints (odd entries).
    let table: Vec<Liouvillian> =
        (0..2 * n_steps + 1).map(|k| generator_at(p, pulse, bath, start + 0.5 * h * k as f64)).collect::<Result<_>>()?;
    let rk4 = |l0: &Liouvillian, lm: &Liouvillian, l1: &Liouvillian, y: &Vec16, h: f64, src: &Vec16| {
        let f = |l: &Liouvillian, y: &Vec16| l.apply(y) + src;
        let k1 = f(l0, y);
        let k2 = f(lm, &(y + k1.scale(h / 2.0)));
        let k3 = f(lm, &(y + k2.scale(h / 2.0)));
        let k4 = f(l1, &(y + k3.scale(h)));
        y + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0)
    };

    let mut states = Vec::with_capacity(grid.len);
    states.push(DensityMatrix::pure(Level::G).to_vec());
    let zero = Vec16::zeros();
    for k in 0..n_steps {
        let y = rk4(&table[2 * k], &table[2 * k + 1], &table[2 * k + 2], &states[k], h, &zero);
        states.push(y);
    }

    let px = trace_functional(&projector(Level::X));
    let neg_px = -px;
    let backward: Vec<Liouvillian> = table.iter().map(|l| Liouvillian { matrix: -l.matrix.transpose() }).collect();
    let mut lambda = vec![Vec16::zeros(); grid.len];
    lambda[n_steps] = terminal_adjoint(&after, &px)?;
    for k in (0..n_steps).rev() {
        // dλ/dt = −p − 𝓛ᵀλ, stepped from t_{k+1} to t_k.
        lambda[k] = rk4(&backward[2 * k + 2], &backward[2 * k + 1], &backward[2 * k], &lambda[k + 1], -h, &neg_px);
    }

    let rho_xx: Vec<f64> = states.iter().map(|s| s[vec_index(1, 1)].re).collect();
    let weights = grid.simpson_weights();
    let in_window: f64 = weights.iter().zip(&rho_xx).map(|(w, r)| w * r).sum();
    let paired: f64 = weights.iter().zip(&rho_xx).zip(&lambda).map(|((w, r), l)| w * r * l[vec_index(0, 0)].re).sum();

    let gamma = angular(p.gamma_x);
    let mut diagnostics = Diagnostics::default();
    diagnostics.absorb_physicality(Trajectory { times: grid.points(), states: states.clone() }.physicality());
    let tail = evolve(&after, &DensityMatrix::from_vec(&states[n_steps]), gamma, 0.0, numerics)?;
    if tail.truncated {
        diagnostics.warn("post-pulse evolution did not reach the population floor");
    }
    diagnostics.absorb_physicality(tail.physicality());
    let n = gamma * (in_window + tail.integral(&projector(Level::X)));
    let g2 = 2.0 * gamma * gamma * paired / (n * n);
    Ok(PulsedG2 { g2, n, steps: n_steps, diagnostics })
}

impl PulsedG2 {
    pub fn physicality(&self) -> Physicality {
        self.diagnostics.physicality.unwrap_or_default()
    }
}
