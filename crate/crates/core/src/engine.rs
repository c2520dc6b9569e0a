//! Figure-of-merit engines, selectable by name.
//!
//! `secular` works in the frame rotating with the dressed energies and keeps
//! only secular radiative and phonon terms. `full-pme` integrates the
//! lab-frame master equation with the full polaron dissipator and serves as
//! the reference for validation runs. Below [`SECULAR_MIN_DRESSING`] the
//! secular engine defers to `full-pme` and says so in its diagnostics.

use std::sync::Arc;

use crate::error::Result;
use crate::fom::{
    dressed_emitter_terms, emitted_number, evolve, indistinguishability, lab_emitter_terms,
    sidepeak_indistinguishability, sidepeak_numbers, Diagnostics, FiguresOfMerit, Numerics,
};
use crate::phonons::{pme_dissipator, secular_generator, secular_rates, PhononBath, PhononRates};
use crate::quantum::ops::{DensityMatrix, Level};
use crate::quantum::superop::{assemble_lindblad, Liouvillian};
use crate::registry::Registry;
use crate::system::{dressed_states, hamiltonian_reduced, radiative_collapses, SystemParams};
use crate::units::{angular, angular_op};

/// Dressing below which the sidepeaks overlap and I± is flagged.
pub const SEPARATION_FACTOR: f64 = 10.0;
/// Dressing, in units of γ_X, below which the secular engine hands the
/// point to `full-pme`: the dropped terms then shift I by 1% or more.
pub const SECULAR_MIN_DRESSING: f64 = 20.0;

/// Which figures-of-merit to compute beyond N.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Wants {
    pub indistinguishability: bool,
    pub sidepeaks: bool,
}

impl Default for Wants {
    fn default() -> Self {
        Self { indistinguishability: true, sidepeaks: true }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EngineInput<'a> {
    pub params: SystemParams,
    pub bath: Option<&'a PhononBath>,
    pub numerics: &'a Numerics,
    pub wants: Wants,
}

#[derive(Debug, Clone, Default)]
pub struct EngineOutput {
    pub fom: FiguresOfMerit,
    pub diagnostics: Diagnostics,
    pub rates: Option<PhononRates>,
}

pub trait Engine: Send + Sync {
    fn name(&self) -> &'static str;
    fn evaluate(&self, input: &EngineInput) -> Result<EngineOutput>;
}

fn separation_check(p: &SystemParams, diag: &mut Diagnostics) {
    let eta = p.omega_cw.hypot(p.delta);
    if eta < SEPARATION_FACTOR * p.gamma_x {
        diag.warn(format!(
            "sidepeaks not well separated (η = {:.3} γ_X < {SEPARATION_FACTOR} γ_X); I± unreliable",
            eta / p.gamma_x
        ));
    }
}

fn start(input: &EngineInput) -> Result<Diagnostics> {
    let mut diag = Diagnostics::default();
    // validate() has already logged these
    diag.warnings.extend(input.params.validate()?);
    Ok(diag)
}

pub struct SecularEngine;

impl Engine for SecularEngine {
    fn name(&self) -> &'static str {
        "secular"
    }

    fn evaluate(&self, input: &EngineInput) -> Result<EngineOutput> {
        let p = &input.params;
        let eta_rel = p.omega_cw.hypot(p.delta) / p.gamma_x;
        if eta_rel < SECULAR_MIN_DRESSING {
            let mut out = FullPmeEngine.evaluate(input)?;
            out.diagnostics.warn(format!(
                "η = {eta_rel:.3} γ_X is below {SECULAR_MIN_DRESSING} γ_X; evaluated with full-pme"
            ));
            return Ok(out);
        }
        let mut diag = start(input)?;
        let basis = dressed_states(p.omega_cw, p.delta)?;
        let rates = match input.bath {
            Some(b) => secular_rates(p.omega_cw, p.delta, b)?,
            None => PhononRates::default(),
        };
        let l = secular_generator(&rates, &basis, p.gamma_x, p.gamma_b)?;
        let gamma = angular(p.gamma_x);
        let eta = angular(basis.eta);
        let extra = if input.wants.indistinguishability { eta } else { 0.0 };
        let ev = evolve(&l, &DensityMatrix::pure(Level::X), gamma, extra, input.numerics)?;
        if ev.truncated {
            diag.warn("emitter did not decay within the horizon budget");
        }
        diag.absorb_physicality(ev.physicality());
        let (n_plus, n_minus) = sidepeak_numbers(&ev, &basis, gamma);
        let n = n_plus + n_minus;
        let mut fom = FiguresOfMerit { n: Some(n), ..Default::default() };
        if input.wants.sidepeaks {
            separation_check(p, &mut diag);
            let (ip, im) = sidepeak_indistinguishability(&l, &ev, &basis, input.numerics, &mut diag)?;
            fom.n_plus = Some(n_plus);
            fom.n_minus = Some(n_minus);
            fom.i_plus = Some(ip);
            fom.i_minus = Some(im);
        }
        if input.wants.indistinguishability {
            let terms = dressed_emitter_terms(&basis, angular(basis.e_plus), angular(basis.e_minus));
            fom.i = Some(indistinguishability(&l, &ev, &terms, n, gamma, input.numerics, &mut diag)?);
        }
        Ok(EngineOutput { fom, diagnostics: diag, rates: input.bath.map(|_| rates) })
    }
}

pub struct FullPmeEngine;

impl FullPmeEngine {
    /// Lab-frame generator with the reduced Hamiltonian, ps⁻¹.
    pub fn generator(p: &SystemParams, bath: Option<&PhononBath>) -> Result<Liouvillian> {
        let h = angular_op(&hamiltonian_reduced(p));
        let mut l = assemble_lindblad(&h, &radiative_collapses(p))?;
        if let Some(b) = bath {
            l += pme_dissipator(&h, p.omega_cw, b, false)?;
        }
        Ok(l)
    }
}

impl Engine for FullPmeEngine {
    fn name(&self) -> &'static str {
        "full-pme"
    }

    fn evaluate(&self, input: &EngineInput) -> Result<EngineOutput> {
        let p = &input.params;
        let mut diag = start(input)?;
        let l = Self::generator(p, input.bath)?;
        let gamma = angular(p.gamma_x);
        let e = emitted_number(&l, &DensityMatrix::pure(Level::X), gamma, 0.0, input.numerics)?;
        if e.evolution.truncated {
            diag.warn("emitter did not decay within the horizon budget");
        }
        diag.absorb_physicality(e.evolution.physicality());
        let mut fom = FiguresOfMerit { n: Some(e.n), ..Default::default() };
        if input.wants.indistinguishability {
            fom.i = Some(indistinguishability(&l, &e.evolution, &lab_emitter_terms(), e.n, gamma, input.numerics, &mut diag)?);
        }
        if input.wants.sidepeaks && p.omega_cw.hypot(p.delta) > 0.0 {
            separation_check(p, &mut diag);
            let basis = dressed_states(p.omega_cw, p.delta)?;
            let (n_plus, n_minus) = sidepeak_numbers(&e.evolution, &basis, gamma);
            let (ip, im) = sidepeak_indistinguishability(&l, &e.evolution, &basis, input.numerics, &mut diag)?;
            fom.n_plus = Some(n_plus);
            fom.n_minus = Some(n_minus);
            fom.i_plus = Some(ip);
            fom.i_minus = Some(im);
        }
        let rates = match input.bath {
            Some(b) if p.omega_cw.hypot(p.delta) > 0.0 => Some(secular_rates(p.omega_cw, p.delta, b)?),
            _ => None,
        };
        Ok(EngineOutput { fom, diagnostics: diag, rates })
    }
}

pub fn engine_registry() -> Registry<dyn Engine> {
    let mut reg: Registry<dyn Engine> = Registry::new("engine");
    reg.register("secular", Arc::new(SecularEngine));
    reg.register("full-pme", Arc::new(FullPmeEngine));
    reg
}
