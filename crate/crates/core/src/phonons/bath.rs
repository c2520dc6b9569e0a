//! Cached polaron correlation kernels and their half-Fourier transforms.

use super::{phi, phi_derivative, PhononParams};
use crate::error::{Error, Result};
use crate::quantum::C64;

/// Kernel floor relative to the kernel at τ = 0⁺ that sets τ_max.
pub const KERNEL_FLOOR: f64 = 1e-12;
/// Grid spacing in units of 1/ω_b (or 1/2πk_BT when that is shorter).
const GRID_STEP: f64 = 0.02;
/// Consecutive sub-floor nodes required before the table stops.
const TAIL_RUN: usize = 50;
const MAX_NODES: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    /// `G_x = cosh φ − 1`
    X,
    /// `G_y = sinh φ`
    Y,
}

/// φ(τ) and the kernels tabulated on a uniform τ grid with exact
/// derivatives, interpolated piecewise by cubic Hermite polynomials.
#[derive(Debug, Clone)]
pub struct PhononBath {
    pub params: PhononParams,
    /// ⟨B⟩
    pub b: f64,
    step: f64,
    phi: Vec<C64>,
    kernels: [Kernel; 2],
}

#[derive(Debug, Clone, Default)]
struct Kernel {
    /// Cubic coefficients per interval in the local variable s ∈ [0, h].
    coeffs: Vec<[C64; 4]>,
}

impl Kernel {
    fn from_samples(y: &[C64], dy: &[C64], h: f64) -> Self {
        let coeffs = (0..y.len().saturating_sub(1))
            .map(|i| {
                let (y0, y1, d0, d1) = (y[i], y[i + 1], dy[i], dy[i + 1]);
                let slope = (y1 - y0) / h;
                [y0, d0, (slope * 3.0 - d0 * 2.0 - d1) / h, (d0 + d1 - slope * 2.0) / (h * h)]
            })
            .collect();
        Self { coeffs }
    }
}

/// `∫₀ʰ sⁿ e^{iωs} ds` for n = 0..3.
fn moments(omega: f64, h: f64) -> [C64; 4] {
    let x = omega * h;
    let mut m = [C64::new(0.0, 0.0); 4];
    if x.abs() < 1.0 {
        // Taylor series in iωs
        for (n, mn) in m.iter_mut().enumerate() {
            let mut term = C64::new(1.0, 0.0);
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..40 {
                if k > 0 {
                    term *= C64::new(0.0, x) / k as f64;
                }
                acc += term / (n + k + 1) as f64;
                if term.norm() < 1e-18 {
                    break;
                }
            }
            *mn = acc * h.powi(n as i32 + 1);
        }
    } else {
        let e = C64::new(0.0, x).exp();
        let iw = C64::new(0.0, omega);
        m[0] = (e - 1.0) / iw;
        for n in 1..4 {
            m[n] = (e * h.powi(n as i32) - m[n - 1] * n as f64) / iw;
        }
    }
    m
}

impl PhononBath {
    pub fn new(params: PhononParams) -> Result<Self> {
        params.validate()?;
        let wb = params.omega_b_per_ps();
        let kt = params.kt_per_ps();
        let scale = if kt > 0.0 { wb.max(2.0 * std::f64::consts::PI * kt) } else { wb };
        let step = GRID_STEP / scale;
        let phi0 = phi(0.0, &params)?;
        let b = (-phi0.re / 2.0).exp();
        if params.alpha == 0.0 {
            return Ok(Self { params, b, step, phi: vec![C64::new(0.0, 0.0); 2], kernels: Default::default() });
        }
        let gx0 = (phi0.cosh() - 1.0).norm();
        let gy0 = phi0.sinh().norm();
        let mut phis = Vec::new();
        let mut dphis = Vec::new();
        let mut quiet = 0;
        while quiet < TAIL_RUN {
            if phis.len() >= MAX_NODES {
                return Err(Error::Quadrature(format!(
                    "kernel did not fall below {KERNEL_FLOOR:e} by τ = {:.3} ps",
                    step * MAX_NODES as f64
                )));
            }
            let tau = step * phis.len() as f64;
            let p = phi(tau, &params)?;
            let small = (p.cosh() - 1.0).norm() < KERNEL_FLOOR * gx0 && p.sinh().norm() < KERNEL_FLOOR * gy0;
            quiet = if small { quiet + 1 } else { 0 };
            phis.push(p);
            dphis.push(phi_derivative(tau, &params)?);
        }
        let gx: Vec<C64> = phis.iter().map(|p| p.cosh() - 1.0).collect();
        let gy: Vec<C64> = phis.iter().map(|p| p.sinh()).collect();
        let dgx: Vec<C64> = phis.iter().zip(&dphis).map(|(p, d)| p.sinh() * d).collect();
        let dgy: Vec<C64> = phis.iter().zip(&dphis).map(|(p, d)| p.cosh() * d).collect();
        let kernels = [Kernel::from_samples(&gx, &dgx, step), Kernel::from_samples(&gy, &dgy, step)];
        Ok(Self { params, b, step, phi: phis, kernels })
    }

    pub fn is_trivial(&self) -> bool {
        self.params.alpha == 0.0
    }

    /// Truncation point of the τ integrals, ps.
    pub fn tau_max(&self) -> f64 {
        self.step * (self.phi.len() - 1) as f64
    }

    pub fn tau_nodes(&self) -> usize {
        self.phi.len()
    }

    /// Tabulated φ at node k.
    pub fn phi_node(&self, k: usize) -> C64 {
        self.phi[k]
    }

    /// Interpolated kernel G_m(τ); zero beyond τ_max.
    pub fn kernel(&self, ch: Channel, tau: f64) -> C64 {
        let k = &self.kernels[ch as usize];
        if k.coeffs.is_empty() || tau < 0.0 || tau >= self.tau_max() {
            return C64::new(0.0, 0.0);
        }
        let i = ((tau / self.step) as usize).min(k.coeffs.len() - 1);
        let s = tau - i as f64 * self.step;
        let c = k.coeffs[i];
        c[0] + (c[1] + (c[2] + c[3] * s) * s) * s
    }

    /// `∫₀^∞ G_m(τ) e^{iωτ} dτ` with ω in ps⁻¹, exact for the interpolant.
    pub fn half_fourier(&self, ch: Channel, omega: f64) -> C64 {
        let k = &self.kernels[ch as usize];
        if k.coeffs.is_empty() {
            return C64::new(0.0, 0.0);
        }
        let m = moments(omega, self.step);
        let mut acc = C64::new(0.0, 0.0);
        for (i, c) in k.coeffs.iter().enumerate() {
            let phase = C64::new(0.0, omega * self.step * i as f64).exp();
            acc += phase * (c[0] * m[0] + c[1] * m[1] + c[2] * m[2] + c[3] * m[3]);
        }
        acc
    }
}
