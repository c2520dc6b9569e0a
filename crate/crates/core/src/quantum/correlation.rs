//! Two-time correlations from the quantum regression theorem.
//!
//! For a time-independent generator,
//! `G(t, τ) = Tr[A e^{𝓛τ}(B ρ(t))] = w(τ)ᵀ (B ρ(t))` with
//! `w(τ) = e^{𝓛ᵀτ} vec(Aᵀ)`, so the surface factors into a t part and a
//! τ part of rank 16 per term.

use nalgebra::DMatrix;

use super::ops::{trace_functional, vectorize, DensityMatrix, Operator4, Vec16, C64};
use super::propagate::Propagator;
use super::quadrature::{FactoredSurface, UniformGrid};
use super::superop::{left_mul, Liouvillian};
use crate::error::{Error, Result};

/// `weight · e^{i t_freq t} e^{i tau_freq τ} Tr[left e^{𝓛τ}(right ρ(t))]`
#[derive(Debug, Clone)]
pub struct CorrelationTerm {
    pub weight: C64,
    pub left: Operator4,
    pub right: Operator4,
    pub t_freq: f64,
    pub tau_freq: f64,
}

impl CorrelationTerm {
    pub fn plain(left: Operator4, right: Operator4) -> Self {
        Self { weight: C64::new(1.0, 0.0), left, right, t_freq: 0.0, tau_freq: 0.0 }
    }
}

/// Builds the factored surface for a sum of correlation terms given the
/// states `ρ(tᵢ)` on `t_grid`.
pub fn correlation_surface(
    l: &Liouvillian,
    propagator: &dyn Propagator,
    states: &[Vec16],
    t_grid: UniformGrid,
    terms: &[CorrelationTerm],
    tau_grid: UniformGrid,
) -> Result<FactoredSurface> {
    if states.len() != t_grid.len {
        return Err(Error::DimensionMismatch { expected: t_grid.len, got: states.len() });
    }
    let adjoint = l.transpose();
    // Integration error along the stationary mode of 𝓛ᵀ never decays; it is
    // pinned to its exact value Tr[A ρ_ss] below.
    let stationary = super::steady::steady_state(l).ok().map(|r| r.to_vec());
    let identity = vectorize(&Operator4::identity());
    let taus = tau_grid.points();
    let ts = t_grid.points();
    let rank = 16 * terms.len();
    let mut a = DMatrix::<C64>::zeros(t_grid.len, rank);
    let mut b = DMatrix::<C64>::zeros(tau_grid.len, rank);
    let mut adjoint_cache: Vec<(Operator4, Vec<Vec16>)> = Vec::new();

    for (n, term) in terms.iter().enumerate() {
        let w = match adjoint_cache.iter().find(|(op, _)| *op == term.left) {
            Some((_, w)) => w.clone(),
            None => {
                let w0 = trace_functional(&term.left);
                let mut w = propagator.propagate(&adjoint, &w0, &taus)?;
                if let Some(rs) = &stationary {
                    let exact = (w0.transpose() * rs)[0];
                    for wj in w.iter_mut() {
                        let drift = (wj.transpose() * rs)[0] - exact;
                        *wj -= identity * drift;
                    }
                }
                adjoint_cache.push((term.left, w.clone()));
                w
            }
        };
        let rm = left_mul(&term.right);
        for (i, s) in states.iter().enumerate() {
            let phase = term.weight * C64::new(0.0, term.t_freq * ts[i]).exp();
            let x = rm * s;
            for k in 0..16 {
                a[(i, 16 * n + k)] = x[k] * phase;
            }
        }
        for (j, wj) in w.iter().enumerate() {
            let phase = C64::new(0.0, term.tau_freq * taus[j]).exp();
            for k in 0..16 {
                b[(j, 16 * n + k)] = wj[k] * phase;
            }
        }
    }
    Ok(FactoredSurface { t: t_grid, tau: tau_grid, a, b })
}

/// `G(t, τ) = Tr[left e^{𝓛τ}(right ρ(t))]` with `ρ(0) = initial`.
pub fn two_time_correlation(
    l: &Liouvillian,
    propagator: &dyn Propagator,
    initial: &DensityMatrix,
    left: &Operator4,
    right: &Operator4,
    t_grid: UniformGrid,
    tau_grid: UniformGrid,
) -> Result<FactoredSurface> {
    let states = propagator.propagate(l, &initial.to_vec(), &t_grid.points())?;
    correlation_surface(l, propagator, &states, t_grid, &[CorrelationTerm::plain(*left, *right)], tau_grid)
}
