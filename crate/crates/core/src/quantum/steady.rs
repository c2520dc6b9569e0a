//! Stationary states of time-independent generators.

use super::ops::{vectorize, DensityMatrix, Operator4, Vec16, C64};
use super::propagate::{MatrixExponential, Propagator};
use super::superop::Liouvillian;
use crate::error::{Error, Result};

/// Relative singular-value threshold for counting null-space dimensions.
const NULL_TOL: f64 = 1e-10;

/// Solves `𝓛ρ = 0` with `Tr ρ = 1`.
///
/// The kernel is read off an SVD. If the decomposition fails the state is
/// obtained by exact propagation of the maximally mixed state over many
/// relaxation times.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    match l.matrix.try_svd(false, true, 1e-15, 500) {
        Some(svd) => {
            let smax = svd.singular_values.max().max(1e-300);
            let null: Vec<usize> =
                (0..16).filter(|&k| svd.singular_values[k] <= NULL_TOL * smax).collect();
            if null.len() > 1 {
                return Err(Error::SteadyStateSingular { null_dim: null.len() });
            }
            let k = if null.len() == 1 {
                null[0]
            } else {
                svd.singular_values.imin()
            };
            let v_t = svd.v_t.expect("requested V^T");
            let v: Vec16 = v_t.row(k).adjoint();
            normalize(v)
        }
        None => steady_state_by_propagation(l),
    }
}

fn normalize(v: Vec16) -> Result<DensityMatrix> {
    let rho = super::ops::unvectorize(&v);
    let tr = rho.trace();
    if tr.norm() < 1e-12 {
        return Err(Error::SteadyStateSingular { null_dim: 0 });
    }
    let rho = rho / tr;
    Ok(DensityMatrix((rho + rho.adjoint()) * C64::from(0.5)))
}

pub fn steady_state_by_propagation(l: &Liouvillian) -> Result<DensityMatrix> {
    let scales = l.spectral_scales();
    if !scales.min_decay.is_finite() {
        return Err(Error::SteadyStateSingular { null_dim: 16 });
    }
    let horizon = 60.0 / scales.min_decay;
    let y0 = vectorize(&(Operator4::identity() * C64::from(0.25)));
    let out = MatrixExponential.propagate(l, &y0, &[0.0, horizon])?;
    normalize(out[1])
}

#[cfg(test)]
mod tests {
    use super::super::ops::*;
    use super::super::superop::{assemble_lindblad, Collapse};
    use super::*;

    #[test]
    fn driven_two_level_steady_state() {
        // Resonant drive Ω with decay γ: ρ_XX = (Ω²/4)/(Ω²/2 + γ²/4)
        let (om, g) = (0.8, 0.3);
        let l = assemble_lindblad(
            &(sigma_x_x() * C64::from(om / 2.0) + projector(Level::Y) * C64::from(1.0) + projector(Level::B) * C64::from(2.0)),
            &[Collapse::new(g, sigma_minus_x()), Collapse::new(g, transition(Level::G, Level::Y)), Collapse::new(g, transition(Level::X, Level::B))],
        )
        .unwrap();
        let rho = steady_state(&l).unwrap();
        let expect = (om * om / 4.0) / (om * om / 2.0 + g * g / 4.0);
        assert!((rho.population(Level::X) - expect).abs() < 1e-10);
        let by_prop = steady_state_by_propagation(&l).unwrap();
        assert!((by_prop.0 - rho.0).norm() < 1e-8);
    }

    #[test]
    fn degenerate_kernel_reports_dimension() {
        // Only X decays; Y and B are each stationary.
        let l = assemble_lindblad(&Operator4::zeros(), &[Collapse::new(1.0, sigma_minus_x())]).unwrap();
        match steady_state(&l) {
            Err(Error::SteadyStateSingular { null_dim }) => assert!(null_dim >= 3),
            other => panic!("expected singular kernel, got {other:?}"),
        }
    }
}
