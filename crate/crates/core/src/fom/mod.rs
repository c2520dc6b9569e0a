//! Source figures-of-merit from propagated dynamics.

mod cw;
mod dynamics;
mod pulsed;

pub use cw::{cw_error_rate, full_generator, CwError};
pub use dynamics::{
    dressed_emitter_terms, emitted_number, evolve, indistinguishability, lab_emitter_terms, sidepeak_indistinguishability,
    sidepeak_numbers, Emission,
    Evolution,
};
pub use pulsed::{hbt_g2_pulsed, PulsedG2};

use crate::quantum::propagate::{propagator_registry, Physicality, Propagator, Tolerances};
use crate::Result;
use std::sync::Arc;

/// Numerical knobs shared by all figure-of-merit evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct Numerics {
    pub tol: Tolerances,
    pub propagator: String,
    /// Initial t horizon in units of 1/γ_X.
    pub horizon: f64,
    /// Excited population below which the t horizon stops growing.
    pub population_floor: f64,
    /// |G| floor at the τ edge, relative to the surface peak.
    pub tail_floor: f64,
    /// Grid nodes per period of the fastest oscillation.
    pub points_per_period: f64,
    /// Minimum number of intervals over the initial horizon.
    pub min_intervals: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            propagator: "dopri5".into(),
            horizon: 15.0,
            population_floor: 1e-10,
            tail_floor: 1e-10,
            points_per_period: 24.0,
            min_intervals: 2048,
        }
    }
}

impl Numerics {
    pub fn propagator(&self) -> Result<Arc<dyn Propagator>> {
        self.propagator_with(self.tol)
    }

    /// The configured propagator with overridden tolerances.
    pub fn propagator_with(&self, tol: Tolerances) -> Result<Arc<dyn Propagator>> {
        propagator_registry(tol).get(&self.propagator)
    }

    /// `(key, value)` pairs recorded in output metadata.
    pub fn describe(&self) -> Vec<(&'static str, String)> {
        vec![
            ("rtol", format!("{:e}", self.tol.rtol)),
            ("atol", format!("{:e}", self.tol.atol)),
            ("propagator", self.propagator.clone()),
            ("horizon_over_gamma_x", self.horizon.to_string()),
            ("population_floor", format!("{:e}", self.population_floor)),
            ("tail_floor", format!("{:e}", self.tail_floor)),
            ("points_per_period", self.points_per_period.to_string()),
            ("min_intervals", self.min_intervals.to_string()),
        ]
    }
}

/// Figures-of-merit; `None` marks quantities that were not computed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FiguresOfMerit {
    pub n: Option<f64>,
    pub n_plus: Option<f64>,
    pub n_minus: Option<f64>,
    pub i: Option<f64>,
    pub i_plus: Option<f64>,
    pub i_minus: Option<f64>,
    pub g2_0: Option<f64>,
    pub e_cw: Option<f64>,
}

impl FiguresOfMerit {
    /// Indistinguishability of the sidepeak carrying most of the X character.
    pub fn dominant_i(&self, delta: f64) -> Option<f64> {
        if delta >= 0.0 {
            self.i_minus
        } else {
            self.i_plus
        }
    }
}

/// Warnings and physicality checks gathered during an evaluation.
#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    pub warnings: Vec<String>,
    pub physicality: Option<Physicality>,
}

impl Diagnostics {
    pub fn warn(&mut self, msg: impl Into<String>) {
        let msg = msg.into();
        log::warn!("{msg}");
        self.warnings.push(msg);
    }

    pub fn absorb_physicality(&mut self, p: Physicality) {
        self.physicality = Some(match self.physicality {
            None => p,
            Some(q) => Physicality {
                trace_error: q.trace_error.max(p.trace_error),
                hermiticity_error: q.hermiticity_error.max(p.hermiticity_error),
                min_eigenvalue: q.min_eigenvalue.min(p.min_eigenvalue),
            },
        });
    }

    pub fn merge(&mut self, other: Diagnostics) {
        self.warnings.extend(other.warnings);
        if let Some(p) = other.physicality {
            self.absorb_physicality(p);
        }
    }
}
