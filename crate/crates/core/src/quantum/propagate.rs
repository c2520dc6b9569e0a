//! Time propagation of vectorized density matrices.
//!
//! Propagators are interchangeable strategies behind [`Propagator`]:
//! `dopri5` (adaptive Dormand–Prince 5(4) with dense output), `rk4`
//! (fixed step) and `expm` (exact exponentiation, constant generators only).

use std::sync::Arc;

use super::ops::{DensityMatrix, Mat16, Vec16, C64};
use super::superop::Liouvillian;
use crate::error::{Error, Result};
use crate::registry::Registry;

/// Right-hand side `dy/dt = 𝓛(t) y`.
pub trait Generator: Sync {
    fn apply(&self, t: f64, y: &Vec16) -> Vec16;

    /// The generator matrix when it does not depend on time.
    fn constant(&self) -> Option<&Liouvillian> {
        None
    }
}

impl Generator for Liouvillian {
    fn apply(&self, _t: f64, y: &Vec16) -> Vec16 {
        self.matrix * y
    }

    fn constant(&self) -> Option<&Liouvillian> {
        Some(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10 }
    }
}

pub trait Propagator: Send + Sync {
    fn name(&self) -> &'static str;

    /// Returns the state at every entry of `times`, which must be
    /// non-decreasing; `times[0]` is the time of `y0`.
    fn propagate(&self, gen: &dyn Generator, y0: &Vec16, times: &[f64]) -> Result<Vec<Vec16>>;
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::invalid("times", "empty output grid"));
    }
    if times.windows(2).any(|w| !(w[1] >= w[0])) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("times", "output grid must be finite and non-decreasing"));
    }
    Ok(())
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// `h Σ cᵢ kᵢ`
fn lc(h: f64, terms: &[(f64, &Vec16)]) -> Vec16 {
    let mut acc = Vec16::zeros();
    for (c, k) in terms {
        acc.axpy(C64::from(h * c), k, C64::from(1.0));
    }
    acc
}

#[derive(Debug, Clone)]
pub struct DormandPrince {
    pub tol: Tolerances,
    pub max_step: Option<f64>,
    pub max_steps: usize,
}

impl DormandPrince {
    pub fn new(tol: Tolerances) -> Self {
        Self { tol, max_step: None, max_steps: 5_000_000 }
    }

    fn error_norm(&self, y: &Vec16, y1: &Vec16, err: &Vec16) -> f64 {
        let mut acc = 0.0;
        for k in 0..16 {
            let sc = self.tol.atol + self.tol.rtol * y[k].norm().max(y1[k].norm());
            acc += (err[k].norm() / sc).powi(2);
        }
        (acc / 16.0).sqrt()
    }

    fn initial_step(&self, gen: &dyn Generator, t0: f64, y0: &Vec16, span: f64) -> f64 {
        let f0 = gen.apply(t0, y0);
        let sc = |v: &Vec16| {
            let mut acc = 0.0;
            for k in 0..16 {
                let s = self.tol.atol + self.tol.rtol * y0[k].norm();
                acc += (v[k].norm() / s).powi(2);
            }
            (acc / 16.0).sqrt()
        };
        let (d0, d1) = (sc(y0), sc(&f0));
        let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h.min(span).min(self.max_step.unwrap_or(f64::INFINITY)).max(1e-12 * span.max(1e-300))
    }
}

impl Propagator for DormandPrince {
    fn name(&self) -> &'static str {
        "dopri5"
    }

    fn propagate(&self, gen: &dyn Generator, y0: &Vec16, times: &[f64]) -> Result<Vec<Vec16>> {
        check_times(times)?;
        let t_end = *times.last().unwrap();
        let mut t = times[0];
        let mut y = *y0;
        let mut out = Vec::with_capacity(times.len());
        let mut next = 0;
        while next < times.len() && times[next] <= t {
            out.push(y);
            next += 1;
        }
        if next == times.len() {
            return Ok(out);
        }
        let span = t_end - t;
        let hmax = self.max_step.unwrap_or(f64::INFINITY);
        let mut h = self.initial_step(gen, t, &y, span);
        let mut k1 = gen.apply(t, &y);
        let mut steps = 0usize;
        let mut rejected_last = false;

        while next < times.len() {
            if steps >= self.max_steps {
                return Err(Error::Integration { t, reason: format!("exceeded {} steps", self.max_steps) });
            }
            h = h.min(hmax).min(t_end - t);
            if h <= 1e-14 * t.abs().max(1.0) {
                return Err(Error::Integration { t, reason: format!("step size underflow (h = {h:.3e})") });
            }
            let k2 = gen.apply(t + C2 * h, &(y + k1.scale(h * A21)));
            let k3 = gen.apply(t + C3 * h, &(y + lc(h, &[(A31, &k1), (A32, &k2)])));
            let k4 = gen.apply(t + C4 * h, &(y + lc(h, &[(A41, &k1), (A42, &k2), (A43, &k3)])));
            let k5 = gen.apply(t + C5 * h, &(y + lc(h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)])));
            let k6 = gen.apply(t + h, &(y + lc(h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)])));
            let y1 = y + lc(h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let k7 = gen.apply(t + h, &y1);
            let err = lc(h, &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)]);
            let en = self.error_norm(&y, &y1, &err);
            if !en.is_finite() {
                return Err(Error::Integration { t, reason: "non-finite state".into() });
            }
            steps += 1;

            if en <= 1.0 {
                let t1 = t + h;
                if next < times.len() && times[next] <= t1 {
                    let ydiff = y1 - y;
                    let bspl = k1.scale(h) - ydiff;
                    let r4 = ydiff - k7.scale(h) - bspl;
                    let r5 = lc(h, &[(D1, &k1), (D3, &k3), (D4, &k4), (D5, &k5), (D6, &k6), (D7, &k7)]);
                    while next < times.len() && times[next] <= t1 {
                        let th = (times[next] - t) / h;
                        let th1 = 1.0 - th;
                        out.push(y + (ydiff + (bspl + (r4 + r5.scale(th1)).scale(th)).scale(th1)).scale(th));
                        next += 1;
                    }
                }
                t = t1;
                y = y1;
                k1 = k7;
                let fac = if rejected_last { 1.0 } else { 5.0 };
                h *= (0.9 * en.max(1e-10).powf(-0.2)).clamp(0.2, fac);
                rejected_last = false;
            } else {
                h *= (0.9 * en.powf(-0.2)).clamp(0.2, 1.0);
                rejected_last = true;
            }
        }
        Ok(out)
    }
}

/// Classical fourth-order Runge–Kutta with a fixed maximum step.
#[derive(Debug, Clone)]
pub struct FixedStepRk4 {
    pub step: f64,
}

impl FixedStepRk4 {
    pub fn step_from(y: &Vec16, gen: &dyn Generator, t: f64, h: f64) -> Vec16 {
        let k1 = gen.apply(t, y);
        let k2 = gen.apply(t + 0.5 * h, &(y + k1.scale(0.5 * h)));
        let k3 = gen.apply(t + 0.5 * h, &(y + k2.scale(0.5 * h)));
        let k4 = gen.apply(t + h, &(y + k3.scale(h)));
        y + (k1 + (k2 + k3).scale(2.0) + k4).scale(h / 6.0)
    }
}

impl Propagator for FixedStepRk4 {
    fn name(&self) -> &'static str {
        "rk4"
    }

    fn propagate(&self, gen: &dyn Generator, y0: &Vec16, times: &[f64]) -> Result<Vec<Vec16>> {
        check_times(times)?;
        if !(self.step > 0.0) {
            return Err(Error::invalid("step", "fixed step must be positive"));
        }
        let mut y = *y0;
        let mut out = vec![y];
        for w in times.windows(2) {
            let n = ((w[1] - w[0]) / self.step).ceil().max(1.0) as usize;
            let h = (w[1] - w[0]) / n as f64;
            if h > 0.0 {
                for s in 0..n {
                    y = Self::step_from(&y, gen, w[0] + s as f64 * h, h);
                }
            }
            out.push(y);
        }
        Ok(out)
    }
}

/// Exact propagation `e^{𝓛Δt}` for time-independent generators.
#[derive(Debug, Clone, Default)]
pub struct MatrixExponential;

impl Propagator for MatrixExponential {
    fn name(&self) -> &'static str {
        "expm"
    }

    fn propagate(&self, gen: &dyn Generator, y0: &Vec16, times: &[f64]) -> Result<Vec<Vec16>> {
        check_times(times)?;
        let l = gen
            .constant()
            .ok_or_else(|| Error::invalid("generator", "expm requires a time-independent generator"))?;
        let mut cache: Option<(f64, Mat16)> = None;
        let mut y = *y0;
        let mut out = vec![y];
        for w in times.windows(2) {
            let dt = w[1] - w[0];
            let prop = match cache {
                Some((d, m)) if (d - dt).abs() <= 1e-12 * dt.abs().max(1e-300) => m,
                _ => {
                    let m = (l.matrix * C64::from(dt)).exp();
                    cache = Some((dt, m));
                    m
                }
            };
            y = prop * y;
            out.push(y);
        }
        Ok(out)
    }
}

/// Propagators registered under their names.
pub fn propagator_registry(tol: Tolerances) -> Registry<dyn Propagator> {
    let mut reg: Registry<dyn Propagator> = Registry::new("propagator");
    reg.register("dopri5", Arc::new(DormandPrince::new(tol)));
    reg.register("expm", Arc::new(MatrixExponential));
    reg.register("rk4", Arc::new(FixedStepRk4 { step: 0.05 }));
    reg
}

/// Sampled solution of a master equation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec16>,
}

impl Trajectory {
    pub fn state(&self, k: usize) -> DensityMatrix {
        DensityMatrix::from_vec(&self.states[k])
    }

    /// Worst trace, Hermiticity and positivity defects along the trajectory.
    pub fn physicality(&self) -> Physicality {
        let mut p = Physicality::default();
        for k in 0..self.states.len() {
            let rho = self.state(k);
            p.trace_error = p.trace_error.max((rho.trace() - 1.0).norm());
            p.hermiticity_error = p.hermiticity_error.max(rho.hermiticity_error());
            p.min_eigenvalue = p.min_eigenvalue.min(rho.min_eigenvalue());
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physicality {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl Default for Physicality {
    fn default() -> Self {
        Self { trace_error: 0.0, hermiticity_error: 0.0, min_eigenvalue: f64::INFINITY }
    }
}

impl Physicality {
    pub fn is_physical(&self) -> bool {
        self.trace_error < 1e-8 && self.hermiticity_error < 1e-10 && self.min_eigenvalue > -1e-8
    }
}

pub fn propagate(
    gen: &dyn Generator,
    initial: &DensityMatrix,
    times: &[f64],
    propagator: &dyn Propagator,
) -> Result<Trajectory> {
    let states = propagator.propagate(gen, &initial.to_vec(), times)?;
    Ok(Trajectory { times: times.to_vec(), states })
}

#[cfg(test)]
mod tests {
    use super::super::ops::*;
    use super::super::superop::{assemble_lindblad, Collapse};
    use super::*;

    fn damped_rabi(omega: f64, gamma: f64) -> Liouvillian {
        let h = sigma_x_x() * C64::from(omega / 2.0);
        assemble_lindblad(&h, &[Collapse::new(gamma, sigma_minus_x())]).unwrap()
    }

    #[test]
    fn pure_decay_matches_exponential() {
        let l = damped_rabi(0.0, 0.3);
        let times: Vec<f64> = (0..=40).map(|k| k as f64 * 0.25).collect();
        let traj = propagate(&l, &DensityMatrix::pure(Level::X), &times, &DormandPrince::new(Tolerances::default())).unwrap();
        for (t, s) in times.iter().zip(&traj.states) {
            assert!((s[vec_index(1, 1)].re - (-0.3 * t).exp()).abs() < 1e-8);
        }
    }

    #[test]
    fn dense_output_agrees_with_expm() {
        let l = damped_rabi(2.0, 0.1);
        let times: Vec<f64> = (0..=300).map(|k| k as f64 * 0.037).collect();
        let y0 = DensityMatrix::pure(Level::G).to_vec();
        let a = DormandPrince::new(Tolerances { rtol: 1e-10, atol: 1e-12 }).propagate(&l, &y0, &times).unwrap();
        let b = MatrixExponential.propagate(&l, &y0, &times).unwrap();
        let worst = a.iter().zip(&b).map(|(x, y)| (x - y).camax()).fold(0.0, f64::max);
        assert!(worst < 1e-8, "worst deviation {worst:e}");
    }

    #[test]
    fn rk4_converges_at_fourth_order() {
        let l = damped_rabi(3.0, 0.2);
        let y0 = DensityMatrix::pure(Level::G).to_vec();
        let exact = MatrixExponential.propagate(&l, &y0, &[0.0, 2.0]).unwrap()[1];
        let e1 = (FixedStepRk4 { step: 0.02 }.propagate(&l, &y0, &[0.0, 2.0]).unwrap()[1] - exact).camax();
        let e2 = (FixedStepRk4 { step: 0.01 }.propagate(&l, &y0, &[0.0, 2.0]).unwrap()[1] - exact).camax();
        let order = (e1 / e2).log2();
        assert!((order - 4.0).abs() < 0.3, "observed order {order}");
    }

    #[test]
    fn expm_refuses_time_dependent_generators() {
        struct Pulse;
        impl Generator for Pulse {
            fn apply(&self, t: f64, y: &Vec16) -> Vec16 {
                y.scale(t)
            }
        }
        assert!(MatrixExponential.propagate(&Pulse, &Vec16::zeros(), &[0.0, 1.0]).is_err());
    }

    #[test]
    fn registry_knows_all_propagators() {
        let reg = propagator_registry(Tolerances::default());
        assert_eq!(reg.names(), vec!["dopri5", "expm", "rk4"]);
    }
}
