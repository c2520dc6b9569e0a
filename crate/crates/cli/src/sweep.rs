//! Sweep modes and the parallel sweep driver.

use std::sync::Arc;

use rayon::prelude::*;
use sps_core::analytics::{
    adiabatic_fom, cw_error_approx, g2_pulse_approx, pulse_validity, visibility_corrected, visibility_raw_mz,
};
use sps_core::engine::{engine_registry, Engine, EngineInput, EngineOutput, Wants};
use sps_core::fom::{cw_error_rate, hbt_g2_pulsed, Diagnostics};
use sps_core::phonons::{b_factor, sideband_efficiency, PhononBath, PhononParams, Preset};
use sps_core::registry::Registry;
use sps_core::system::{drive_for_shift, purcell_scaled, stark_shift, PulseParams, SystemParams};
use sps_core::{Error, Result};

use crate::config::SweepSpec;
use crate::output::{ResultRow, Status};

/// Smallest |δ|/Ω_cw at which the adiabatic estimate is reported.
const ADIABATIC_RATIO: f64 = 5.0;

/// Shared, read-only state for all points of a sweep.
pub struct Context {
    pub spec: SweepSpec,
    pub engine: Arc<dyn Engine>,
    pub bath: Option<PhononBath>,
}

impl Context {
    fn gamma(&self) -> f64 {
        self.spec.system.gamma_x
    }

    fn run_engine(&self, params: SystemParams, wants: Wants) -> Result<EngineOutput> {
        let input = EngineInput { params, bath: self.bath.as_ref(), numerics: &self.spec.numerics, wants };
        self.engine.evaluate(&input)
    }

    /// Parameters for a target shift `delta_ac` (units of γ_X) at `δ = ratio·Δ_ac`.
    fn stark_params(&self, base: SystemParams, delta_ac: f64, ratio: f64) -> Result<SystemParams> {
        let dac = delta_ac * base.gamma_x;
        let delta = ratio * dac;
        Ok(base.with_drive(drive_for_shift(dac, delta)?, delta))
    }

    /// Drive from the configured `delta_ac`, or else from `omega_cw` and `delta`.
    fn configured_drive(&self, base: SystemParams, unit: f64) -> Result<SystemParams> {
        match self.spec.delta_ac {
            Some(dac) => {
                let dac = dac * unit;
                let delta = self.spec.detuning_ratio * dac;
                Ok(base.with_drive(drive_for_shift(dac, delta)?, delta))
            }
            None => Ok(base.with_drive(self.spec.omega_cw * unit, self.spec.delta * unit)),
        }
    }
}

pub trait SweepMode: Send + Sync {
    fn name(&self) -> &'static str;
    /// Meaning of the `swept` column.
    fn axis(&self, spec: &SweepSpec) -> &'static str;
    /// Configuration problems detected before any point runs.
    fn check(&self, spec: &SweepSpec) -> std::result::Result<(), String> {
        if spec.range.is_none() {
            return Err(format!("mode `{}` needs start, stop and points", self.name()));
        }
        Ok(())
    }
    fn values(&self, spec: &SweepSpec) -> Vec<f64> {
        spec.range.map(|r| r.values()).unwrap_or_default()
    }
    fn evaluate(&self, x: f64, ctx: &Context) -> Result<ResultRow>;
}

fn status_of(diag: &Diagnostics, extra: Vec<String>) -> Status {
    let mut w = diag.warnings.clone();
    if let Some(p) = diag.physicality {
        if !p.is_physical() {
            w.push(format!(
                "state left the physical set (trace {:.1e}, hermiticity {:.1e}, min eigenvalue {:.1e})",
                p.trace_error, p.hermiticity_error, p.min_eigenvalue
            ));
        }
    }
    w.extend(extra);
    if w.is_empty() {
        Status::Ok
    } else {
        Status::Warn(w)
    }
}

/// Row with drive columns and the engine's figures-of-merit.
fn engine_row(x: f64, ctx: &Context, p: SystemParams, wants: Wants) -> Result<(ResultRow, Diagnostics)> {
    let out = ctx.run_engine(p, wants)?;
    let f = &out.fom;
    let adiabatic = if p.delta != 0.0 && p.delta.abs() >= ADIABATIC_RATIO * p.omega_cw {
        Some(adiabatic_fom(p.omega_cw, p.delta, p.gamma_x, p.gamma_b)?.i)
    } else {
        None
    };
    let row = ResultRow {
        swept: x,
        n: f.n,
        n_plus: f.n_plus,
        n_minus: f.n_minus,
        i: f.i,
        i_plus: f.i_plus,
        i_minus: f.i_minus,
        delta_ac: if p.delta != 0.0 { Some(stark_shift(p.omega_cw, p.delta)?) } else { None },
        eta: Some(p.omega_cw.hypot(p.delta)),
        omega_cw: Some(p.omega_cw),
        delta: Some(p.delta),
        gamma_x: Some(p.gamma_x),
        i_approx: adiabatic,
        ..Default::default()
    };
    Ok((row, out.diagnostics))
}

fn full() -> Wants {
    Wants::default()
}

pub struct AtDrive;

impl SweepMode for AtDrive {
    fn name(&self) -> &'static str {
        "at-drive"
    }
    fn axis(&self, _: &SweepSpec) -> &'static str {
        "Omega_cw/gamma_X"
    }
    fn evaluate(&self, x: f64, ctx: &Context) -> Result<ResultRow> {
        let p = ctx.spec.system.with_drive(x * ctx.gamma(), 0.0);
        let (mut row, diag) = engine_row(x, ctx, p, full())?;
        row.status = status_of(&diag, vec![]);
        Ok(row)
    }
}

pub struct StarkDetuning;

impl SweepMode for StarkDetuning {
    fn name(&self) -> &'static str {
        "stark-detuning"
    }
    fn axis(&self, _: &SweepSpec) -> &'static str {
        "delta/Delta_ac"
    }
    fn check(&self, spec: &SweepSpec) -> std::result::Result<(), String> {
        match spec.delta_ac {
            Some(d) if d != 0.0 => {}
            _ => return Err("stark-detuning needs a nonzero delta_ac".into()),
        }
        if let Some(r) = spec.range {
            if r.start <= 0.0 || r.stop <= 0.0 {
                return Err("δ/Δ_ac must be positive".into());
            }
        }
        AtDrive.check(spec)
    }
    fn evaluate(&self, x: f64, ctx: &Context) -> Result<ResultRow> {
        let p = ctx.stark_params(ctx.spec.system, ctx.spec.delta_ac.unwrap_or_default(), x)?;
        let (mut row, diag) = engine_row(x, ctx, p, full())?;
        row.status = status_of(&diag, vec![]);
        Ok(row)
    }
}

pub struct StarkFixedDelta;

impl SweepMode for StarkFixedDelta {
    fn name(&self) -> &'static str {
        "stark-fixed-delta"
    }
    fn axis(&self, _: &SweepSpec) -> &'static str {
        "Omega_cw/delta"
    }
    fn check(&self, spec: &SweepSpec) -> std::result::Result<(), String> {
        if spec.delta == 0.0 {
            return Err("stark-fixed-delta needs a nonzero delta".into());
        }
        AtDrive.check(spec)
    }
    fn evaluate(&self, x: f64, ctx: &Context) -> Result<ResultRow> {
        let delta = ctx.spec.delta * ctx.gamma();
        let p = ctx.spec.system.with_drive(x * delta.abs(), delta);
        let (mut row, diag) = engine_row(x, ctx, p, full())?;
        row.status = status_of(&diag, vec![]);
        Ok(row)
    }
}

/// γ_X/γ₀ swept through the cavity coupling at fixed linewidth.
pub struct Purcell;

impl SweepMode for Purcell {
    fn name(&self) -> &'static str {
        "purcell"
    }
    fn axis(&self, _: &SweepSpec) -> &'static str {
        "gamma_X/gamma_0"
    }
    fn check(&self, spec: &SweepSpec) -> std::result::Result<(), String> {
        if let Some(r) = spec.range {
            if r.start < 1.0 || r.stop < 1.0 {
                return Err("γ_X/γ₀ must be at least 1".into());
            }
        }
        AtDrive.check(spec)
    }
    fn evaluate(&self, x: f64, ctx: &Context) -> Result<ResultRow> {
        let gamma_0 = ctx.gamma();
        let kappa = ctx.spec.kappa;
        let g = ((x - 1.0) * kappa * gamma_0 / 4.0).sqrt();
        let base = purcell_scaled(&ctx.spec.system, g, kappa, gamma_0)?;
        let p = ctx.configured_drive(base, gamma_0)?;
        let (mut row, diag) = engine_row(x, ctx, p, full())?;
        row.status = status_of(&diag, vec![]);
        Ok(row)
    }
}

/// Pulsed purity and interferometric visibility against pulse width.
pub struct PulseG2;

impl SweepMode for PulseG2 {
    fn name(&self) -> &'static str {
        "pulse-g2"
    }
    fn axis(&self, _: &SweepSpec) -> &'static str {
        "tau_p"
    }
    fn check(&self, spec: &SweepSpec) -> std::result::Result<(), String> {
        if let Some(r) = spec.range {
            if r.start <= 0.0 || r.stop <= 0.0 {
                return Err("pulse widths must be positive".into());
            }
        }
        AtDrive.check(spec)
    }
    fn evaluate(&self, x: f64, ctx: &Context) -> Result<ResultRow> {
        let p = ctx.configured_drive(ctx.spec.system, ctx.gamma())?;
        let (mut row, mut diag) = engine_row(x, ctx, p, full())?;
        let pulse = PulseParams { area: ctx.spec.pulse_area, ..PulseParams::new(x) };
        let g2 = hbt_g2_pulsed(&p, &pulse, ctx.bath.as_ref(), None, &ctx.spec.numerics)?;
        diag.merge(g2.diagnostics.clone());
        row.g2_0 = Some(g2.g2);
        if let Some(n) = row.n {
            row.g2_approx = Some(g2_pulse_approx(x, p.gamma_x, n));
        }
        if let Some(i) = row.i {
            let v_raw = visibility_raw_mz(i, g2.g2, &ctx.spec.ifo)?;
            row.v_raw = Some(v_raw);
            row.v = Some(visibility_corrected(v_raw, g2.g2, &ctx.spec.ifo)?.0);
        }
        row.status = status_of(&diag, pulse_validity(x, p.omega_cw.hypot(p.delta), p.gamma_x));
        Ok(row)
    }
}

/// Photons from the cw drive alone, relative to the triggered emission.
pub struct CwErrorSweep;

impl SweepMode for CwErrorSweep {
    fn name(&self) -> &'static str {
        "cw-error"
    }
    fn axis(&self, spec: &SweepSpec) -> &'static str {
        if spec.delta_ac.is_some() {
            "delta/Delta_ac"
        } else {
            "Omega_cw/gamma_X"
        }
    }
    fn evaluate(&self, x: f64, ctx: &Context) -> Result<ResultRow> {
        let p = match ctx.spec.delta_ac {
            Some(dac) => ctx.stark_params(ctx.spec.system, dac, x)?,
            None => ctx.spec.system.with_drive(x * ctx.gamma(), ctx.spec.delta * ctx.gamma()),
        };
        let n_only = Wants { indistinguishability: false, sidepeaks: false };
        let (mut row, diag) = engine_row(x, ctx, p, n_only)?;
        let e = cw_error_rate(&p, ctx.bath.as_ref(), &ctx.spec.numerics)?;
        row.e_cw = Some(e.e_cw);
        row.e_cw_approx = row.n.map(|n| cw_error_approx(&p, n));
        row.status = status_of(&diag, vec![]);
        Ok(row)
    }
}

/// Zero-phonon-line weight and filtering efficiency for the three presets.
pub struct PhononTable;

impl SweepMode for PhononTable {
    fn name(&self) -> &'static str {
        "phonon-table"
    }
    fn axis(&self, _: &SweepSpec) -> &'static str {
        "phonon set"
    }
    fn check(&self, _: &SweepSpec) -> std::result::Result<(), String> {
        Ok(())
    }
    fn values(&self, _: &SweepSpec) -> Vec<f64> {
        vec![1.0, 2.0, 3.0]
    }
    fn evaluate(&self, x: f64, ctx: &Context) -> Result<ResultRow> {
        let preset = match x as u32 {
            1 => Preset::I,
            2 => Preset::II,
            3 => Preset::III,
            _ => return Err(Error::invalid("phonon set", format!("{x} is not 1, 2 or 3"))),
        };
        let temperature = ctx.spec.phonons.map(|p| p.temperature).unwrap_or(4.0);
        let bath = PhononParams { temperature, ..PhononParams::preset(preset) };
        let b = b_factor(&bath)?;
        let (eff, cav) = sideband_efficiency(b, Some(ctx.spec.purcell_factor))?;
        Ok(ResultRow { swept: x, b: Some(b), eta_eff: Some(eff), eta_eff_cav: cav, ..Default::default() })
    }
}

pub fn mode_registry() -> Registry<dyn SweepMode> {
    let mut reg: Registry<dyn SweepMode> = Registry::new("sweep mode");
    reg.register("at-drive", Arc::new(AtDrive));
    reg.register("stark-detuning", Arc::new(StarkDetuning));
    reg.register("stark-fixed-delta", Arc::new(StarkFixedDelta));
    reg.register("purcell", Arc::new(Purcell));
    reg.register("pulse-g2", Arc::new(PulseG2));
    reg.register("cw-error", Arc::new(CwErrorSweep));
    reg.register("phonon-table", Arc::new(PhononTable));
    reg
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepError {
    /// The configuration cannot describe a valid sweep.
    Config(String),
    /// Shared setup failed before any point ran.
    Numerical(String),
}

impl std::fmt::Display for SweepError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepError::Config(m) => write!(f, "configuration error: {m}"),
            SweepError::Numerical(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl std::error::Error for SweepError {}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub metadata: Vec<(String, String)>,
    pub rows: Vec<ResultRow>,
    pub failures: usize,
}

impl SweepOutcome {
    /// 0 when every point succeeded, 2 when all failed, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self.failures {
            0 => 0,
            f if f == self.rows.len() => 2,
            _ => 3,
        }
    }
}

/// Runs every point on a pool of `jobs` workers (all cores when `None`)
/// and returns rows in sweep order.
pub fn run_sweep(spec: &SweepSpec, jobs: Option<usize>) -> std::result::Result<SweepOutcome, SweepError> {
    let mode = mode_registry().get(&spec.mode).map_err(|e| SweepError::Config(e.to_string()))?;
    let engine = engine_registry().get(&spec.engine).map_err(|e| SweepError::Config(e.to_string()))?;
    mode.check(spec).map_err(SweepError::Config)?;
    let bath = match &spec.phonons {
        Some(p) => Some(PhononBath::new(*p).map_err(|e| SweepError::Numerical(e.to_string()))?),
        None => None,
    };

    let mut metadata = vec![("sps_version".to_string(), env!("CARGO_PKG_VERSION").to_string())];
    metadata.extend(spec.metadata());
    metadata.push(("swept".into(), mode.axis(spec).into()));
    if let Some(p) = &spec.phonons {
        let b = b_factor(p).map_err(|e| SweepError::Numerical(e.to_string()))?;
        metadata.push(("b_factor".into(), format!("{b:.9}")));
    }
    metadata.push(("energy_unit".into(), "μeV".into()));
    if spec.mode == "at-drive" {
        metadata.push(("Delta_ac".into(), "undefined at δ = 0; sidepeaks sit at ±Omega_cw/2".into()));
    }

    let ctx = Context { spec: spec.clone(), engine, bath };
    let rows = run_points(mode.as_ref(), &ctx, &mode.values(spec), jobs)?;
    let failures = rows.iter().filter(|r| r.status.is_failure()).count();
    Ok(SweepOutcome { metadata, rows, failures })
}

/// Evaluates `values` in parallel; failed points become failure rows.
fn run_points(
    mode: &dyn SweepMode,
    ctx: &Context,
    values: &[f64],
    jobs: Option<usize>,
) -> std::result::Result<Vec<ResultRow>, SweepError> {
    let eval = |&x: &f64| match mode.evaluate(x, ctx) {
        Ok(row) => row,
        Err(e) => {
            log::error!("{} point {x} failed: {e}", mode.name());
            ResultRow::failed(x, e.to_string())
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder.build().map_err(|e| SweepError::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(|| values.par_iter().map(eval).collect()))
}
