//! Emission figures-of-merit from a time-independent generator.

use std::f64::consts::PI;

use super::{Diagnostics, Numerics};
use crate::error::Result;
use crate::quantum::correlation::{correlation_surface, CorrelationTerm};
use crate::quantum::ops::{outer, projector, DensityMatrix, Ket4, Level, Operator4, Vec16, C64};
use crate::quantum::propagate::{Physicality, Tolerances, Trajectory};
use crate::quantum::quadrature::{double_time_integral, DoubleIntegral, UniformGrid, Weight};
use crate::quantum::superop::Liouvillian;
use crate::system::DressedBasis;

/// Horizon growth factor and cap for the population floor search.
const GROWTH: f64 = 1.3;
const MAX_EXTENSIONS: usize = 60;
/// τ horizon relative to the t horizon, and its growth when truncated.
const TAU_SPAN: f64 = 2.0;
const TAU_GROWTH: f64 = 1.5;
const MAX_TAU_EXTENSIONS: usize = 8;

/// States `ρ(tᵢ)` on a uniform grid reaching past the decay of the emitter.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub grid: UniformGrid,
    pub states: Vec<Vec16>,
    /// The population floor was not reached within the extension budget.
    pub truncated: bool,
}

impl Evolution {
    /// `∫ Tr[op ρ(t)] dt` by composite Simpson.
    pub fn integral(&self, op: &Operator4) -> f64 {
        let f = crate::quantum::ops::trace_functional(op);
        self.grid
            .simpson_weights()
            .iter()
            .zip(&self.states)
            .map(|(w, s)| w * (f.transpose() * s)[0].re)
            .sum()
    }

    pub fn physicality(&self) -> Physicality {
        Trajectory { times: self.grid.points(), states: self.states.clone() }.physicality()
    }
}

fn excited(state: &Vec16) -> f64 {
    1.0 - DensityMatrix::from_vec(state).population(Level::G)
}

/// Propagates `rho0` on a grid fine enough for the generator spectrum and
/// `extra_freq`, over `numerics.horizon / gamma_x` and further until the
/// excited population drops below the floor.
pub fn evolve(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    gamma_x: f64,
    extra_freq: f64,
    numerics: &Numerics,
) -> Result<Evolution> {
    // Resolve the decay below the population floor rather than at the
    // absolute tolerance.
    let tol = Tolerances { atol: numerics.tol.atol.min(1e-3 * numerics.population_floor), ..numerics.tol };
    let propagator = numerics.propagator_with(tol)?;
    let horizon = numerics.horizon / gamma_x;
    let max_freq = l.spectral_scales().max_freq.max(extra_freq.abs());
    let mut step = horizon / numerics.min_intervals as f64;
    if max_freq > 0.0 {
        step = step.min(2.0 * PI / (max_freq * numerics.points_per_period));
    }
    let mut grid = UniformGrid::covering(0.0, horizon, step);
    let mut states = propagator.propagate(l, &rho0.to_vec(), &grid.points())?;
    let mut extensions = 0;
    while excited(states.last().expect("grid is non-empty")) > numerics.population_floor {
        if extensions == MAX_EXTENSIONS {
            log::warn!("excited population {:.2e} above floor at t = {:.1} ps", excited(&states[states.len() - 1]), grid.end());
            return Ok(Evolution { grid, states, truncated: true });
        }
        let next = grid.extended_to(grid.end() * GROWTH);
        let times: Vec<f64> = (grid.len - 1..next.len).map(|k| next.point(k)).collect();
        let tail = propagator.propagate(l, &states[states.len() - 1], &times)?;
        states.extend_from_slice(&tail[1..]);
        grid = next;
        extensions += 1;
    }
    Ok(Evolution { grid, states, truncated: false })
}

/// Photon number together with the evolution it was computed from.
#[derive(Debug, Clone)]
pub struct Emission {
    pub n: f64,
    pub evolution: Evolution,
}

/// `N = γ_X ∫ ⟨σ⁺_X σ⁻_X⟩ dt` in the lab frame. `extra_freq` widens the grid
/// resolution for later correlation phases.
pub fn emitted_number(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    gamma_x: f64,
    extra_freq: f64,
    numerics: &Numerics,
) -> Result<Emission> {
    let evolution = evolve(l, rho0, gamma_x, extra_freq, numerics)?;
    let n = gamma_x * evolution.integral(&projector(Level::X));
    Ok(Emission { n, evolution })
}

/// `∫ ρ_±(t) dt` for the dressed states.
fn dressed_populations(ev: &Evolution, basis: &DressedBasis) -> (f64, f64) {
    let (p, m) = (basis.ket_plus(), basis.ket_minus());
    (ev.integral(&outer(&p, &p)), ev.integral(&outer(&m, &m)))
}

/// `N± = γ_X |c_X^±|² ∫ ρ_±(t) dt`.
pub fn sidepeak_numbers(ev: &Evolution, basis: &DressedBasis, gamma_x: f64) -> (f64, f64) {
    let (ip, im) = dressed_populations(ev, basis);
    (gamma_x * basis.c_x_plus.powi(2) * ip, gamma_x * basis.c_x_minus.powi(2) * im)
}

/// `∫∫ |Σ terms|² dt dτ`, growing the τ horizon until the surface decays
/// below the tail floor.
fn coherence_integral(
    l: &Liouvillian,
    ev: &Evolution,
    terms: &[CorrelationTerm],
    numerics: &Numerics,
    diag: &mut Diagnostics,
) -> Result<DoubleIntegral> {
    // Local errors at the absolute tolerance accumulate into a floor on the
    // τ tail, so the adjoint is integrated well below the tail floor.
    let tol = Tolerances { atol: numerics.tol.atol.min(1e-3 * numerics.tail_floor), ..numerics.tol };
    let propagator = numerics.propagator_with(tol)?;
    let mut tau = ev.grid.extended_to(ev.grid.end() * TAU_SPAN);
    let mut previous_edge = f64::INFINITY;
    for attempt in 0..=MAX_TAU_EXTENSIONS {
        let surface = correlation_surface(l, propagator.as_ref(), &ev.states, ev.grid, terms, tau)?;
        let r = double_time_integral(&surface, Weight::AbsSquared, numerics.tail_floor);
        let stalled = r.tau_edge > 0.5 * previous_edge;
        previous_edge = r.tau_edge;
        if r.tau_edge <= numerics.tail_floor || stalled || attempt == MAX_TAU_EXTENSIONS {
            if r.truncated {
                diag.warn(format!(
                    "correlation surface truncated (t edge {:.1e}, τ edge {:.1e})",
                    r.t_edge, r.tau_edge
                ));
            }
            return Ok(r);
        }
        tau = tau.extended_to(tau.end() * TAU_GROWTH);
    }
    unreachable!("loop returns on its last attempt")
}

/// `I = (2γ_X²/N²) ∫∫ |g¹(t, τ)|² dt dτ` where `g¹` is the sum of `terms`.
pub fn indistinguishability(
    l: &Liouvillian,
    ev: &Evolution,
    terms: &[CorrelationTerm],
    n: f64,
    gamma_x: f64,
    numerics: &Numerics,
    diag: &mut Diagnostics,
) -> Result<f64> {
    let r = coherence_integral(l, ev, terms, numerics, diag)?;
    Ok(2.0 * gamma_x * gamma_x * r.value / (n * n))
}

/// Correlation terms for `⟨σ⁺_X(t+τ)σ⁻_X(t)⟩` in the lab frame.
pub fn lab_emitter_terms() -> Vec<CorrelationTerm> {
    let s = crate::quantum::ops::sigma_minus_x();
    vec![CorrelationTerm::plain(s.adjoint(), s)]
}

/// Correlation terms for `⟨σ⁺_X(t+τ)σ⁻_X(t)⟩` evaluated with a generator in
/// the frame rotating with the dressed energies (`e_±` in ps⁻¹). Restoring
/// `σ⁻_X(t) = Σ_β c_X^β e^{−iE_β t}|G⟩⟨β|` gives four phase-carrying terms.
pub fn dressed_emitter_terms(basis: &DressedBasis, e_plus: f64, e_minus: f64) -> Vec<CorrelationTerm> {
    let g = crate::quantum::ops::ket(Level::G);
    let states = [(basis.ket_plus(), basis.c_x_plus, e_plus), (basis.ket_minus(), basis.c_x_minus, e_minus)];
    let mut terms = Vec::with_capacity(4);
    for (kb, cb, eb) in states {
        for (kb2, cb2, eb2) in states {
            terms.push(CorrelationTerm {
                weight: C64::from(cb * cb2),
                left: outer(&kb, &g),
                right: outer(&g, &kb2),
                t_freq: eb - eb2,
                tau_freq: eb,
            });
        }
    }
    terms
}

fn sidepeak_term(k: &Ket4) -> CorrelationTerm {
    let g = crate::quantum::ops::ket(Level::G);
    CorrelationTerm::plain(outer(k, &g), outer(&g, k))
}

/// `I± = ∫∫|g¹_±|² / (½ [∫ρ_±]²)` with `σ⁻_± = |G⟩⟨±|`. Valid in either
/// frame since the dressed phases drop out of `|g¹_±|`.
pub fn sidepeak_indistinguishability(
    l: &Liouvillian,
    ev: &Evolution,
    basis: &DressedBasis,
    numerics: &Numerics,
    diag: &mut Diagnostics,
) -> Result<(f64, f64)> {
    let (ip, im) = dressed_populations(ev, basis);
    let plus = coherence_integral(l, ev, &[sidepeak_term(&basis.ket_plus())], numerics, diag)?;
    let minus = coherence_integral(l, ev, &[sidepeak_term(&basis.ket_minus())], numerics, diag)?;
    Ok((2.0 * plus.value / (ip * ip), 2.0 * minus.value / (im * im)))
}
