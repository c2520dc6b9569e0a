//! One- and two-dimensional quadrature.

use std::collections::BinaryHeap;

use nalgebra::DMatrix;

use super::ops::C64;
use crate::error::{Error, Result};

/// Equispaced nodes `start + k·step`, `k = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl UniformGrid {
    /// Grid over `[start, ≥ end]` with at most `max_step` spacing and
    /// `4k + 1` nodes, so Simpson's rule also applies at half resolution.
    pub fn covering(start: f64, end: f64, max_step: f64) -> Self {
        let intervals = ((end - start) / max_step).ceil().max(4.0) as usize;
        let intervals = intervals.div_ceil(4) * 4;
        Self { start, step: (end - start) / intervals as f64, len: intervals + 1 }
    }

    pub fn end(&self) -> f64 {
        self.start + self.step * (self.len - 1) as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        self.start + self.step * k as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len).map(|k| self.point(k)).collect()
    }

    /// Same interval with `4k′ + 1` nodes, extended to at least `end`.
    pub fn extended_to(&self, end: f64) -> Self {
        let intervals = ((end - self.start) / self.step).ceil() as usize;
        let intervals = intervals.div_ceil(4).max(1) * 4;
        Self { start: self.start, step: self.step, len: intervals + 1 }
    }

    /// Composite Simpson weights. Even lengths close with a trapezoid panel.
    pub fn simpson_weights(&self) -> Vec<f64> {
        simpson_weights(self.len, self.step)
    }
}

pub fn simpson_weights(len: usize, step: f64) -> Vec<f64> {
    let mut w = vec![0.0; len];
    if len < 2 {
        return w;
    }
    let odd_len = if len % 2 == 1 { len } else { len - 1 };
    for k in 0..odd_len {
        w[k] = if k == 0 || k == odd_len - 1 {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        } * step
            / 3.0;
    }
    if odd_len < len {
        w[len - 2] += 0.5 * step;
        w[len - 1] += 0.5 * step;
    }
    w
}

/// Simpson weights of the half-resolution rule, laid out on the full grid.
fn coarse_weights(len: usize, step: f64) -> Vec<f64> {
    let mut w = vec![0.0; len];
    let coarse = simpson_weights(len.div_ceil(2), 2.0 * step);
    for (k, c) in coarse.into_iter().enumerate() {
        w[2 * k] = c;
    }
    w
}

pub fn simpson(values: &[C64], step: f64) -> C64 {
    values.iter().zip(simpson_weights(values.len(), step)).map(|(v, w)| v * w).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

struct Panel {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// Adaptive Gauss–Kronrod (7, 15) quadrature of a complex integrand on `[a, b]`.
pub fn integrate<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, rtol: f64, atol: f64) -> Result<QuadResult<C64>> {
    integrate_panels(f, a, b, 1, rtol, atol)
}

/// As [`integrate`], starting from `panels` equal subintervals.
pub fn integrate_panels<F: Fn(f64) -> C64>(
    f: F,
    a: f64,
    b: f64,
    panels: usize,
    rtol: f64,
    atol: f64,
) -> Result<QuadResult<C64>> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature("non-finite integration limits".into()));
    }
    if a == b {
        return Ok(QuadResult { value: C64::new(0.0, 0.0), error: 0.0 });
    }
    let max_panels = 20_000 + 4 * panels;
    let mut heap = BinaryHeap::new();
    let width = (b - a) / panels as f64;
    let mut total = C64::new(0.0, 0.0);
    let mut err = 0.0;
    for k in 0..panels {
        let (lo, hi) = (a + width * k as f64, if k + 1 == panels { b } else { a + width * (k + 1) as f64 });
        let (v, e) = gk15(&f, lo, hi);
        total += v;
        err += e;
        heap.push(Panel { a: lo, b: hi, value: v, error: e });
    }
    while err > atol.max(rtol * total.norm()) {
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(Error::Quadrature("non-finite integrand".into()));
        }
        if heap.len() >= max_panels {
            return Err(Error::Quadrature(format!(
                "error {err:.3e} above tolerance after {max_panels} subdivisions"
            )));
        }
        let worst = heap.pop().unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Quadrature(format!("interval collapsed near {mid:.6e}")));
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // Recompute from panels to shed accumulated rounding.
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(QuadResult { value, error })
}

pub fn integrate_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rtol: f64, atol: f64) -> Result<QuadResult<f64>> {
    let r = integrate(|x| C64::new(f(x), 0.0), a, b, rtol, atol)?;
    Ok(QuadResult { value: r.value.re, error: r.error })
}

/// Which function of the correlation is integrated over the (t, τ) plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    /// Real part of the surface.
    Real,
    /// `|G(t, τ)|²`.
    AbsSquared,
}

/// A two-time function sampled on a tensor-product grid.
pub trait Surface {
    fn t_grid(&self) -> UniformGrid;
    fn tau_grid(&self) -> UniformGrid;
    fn value(&self, i: usize, j: usize) -> C64;
    /// `Σᵢⱼ wᵢ vⱼ f(G(tᵢ, τⱼ))`
    fn weighted_sum(&self, weight: Weight, wt: &[f64], wtau: &[f64]) -> f64;

    fn row(&self, i: usize) -> Vec<C64> {
        (0..self.tau_grid().len).map(|j| self.value(i, j)).collect()
    }

    fn column(&self, j: usize) -> Vec<C64> {
        (0..self.t_grid().len).map(|i| self.value(i, j)).collect()
    }
}

/// Fully sampled surface, row-major in t.
#[derive(Debug, Clone)]
pub struct DenseSurface {
    pub t: UniformGrid,
    pub tau: UniformGrid,
    pub values: Vec<C64>,
}

impl Surface for DenseSurface {
    fn t_grid(&self) -> UniformGrid {
        self.t
    }
    fn tau_grid(&self) -> UniformGrid {
        self.tau
    }
    fn value(&self, i: usize, j: usize) -> C64 {
        self.values[i * self.tau.len + j]
    }
    fn weighted_sum(&self, weight: Weight, wt: &[f64], wtau: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (i, wi) in wt.iter().enumerate() {
            if *wi == 0.0 {
                continue;
            }
            let row = &self.values[i * self.tau.len..(i + 1) * self.tau.len];
            let s: f64 = row
                .iter()
                .zip(wtau)
                .map(|(g, v)| v * match weight {
                    Weight::Real => g.re,
                    Weight::AbsSquared => g.norm_sqr(),
                })
                .sum();
            acc += wi * s;
        }
        acc
    }
}

/// Surface of finite rank, `G(tᵢ, τⱼ) = Σₖ A[i,k] B[j,k]`.
#[derive(Debug, Clone)]
pub struct FactoredSurface {
    pub t: UniformGrid,
    pub tau: UniformGrid,
    pub a: DMatrix<C64>,
    pub b: DMatrix<C64>,
}

impl FactoredSurface {
    pub fn to_dense(&self) -> DenseSurface {
        let g = &self.a * self.b.transpose();
        let mut values = Vec::with_capacity(self.t.len * self.tau.len);
        for i in 0..self.t.len {
            for j in 0..self.tau.len {
                values.push(g[(i, j)]);
            }
        }
        DenseSurface { t: self.t, tau: self.tau, values }
    }

    fn gram(m: &DMatrix<C64>, w: &[f64]) -> DMatrix<C64> {
        let mut wc = m.map(|z| z.conj());
        for (i, wi) in w.iter().enumerate() {
            wc.row_mut(i).scale_mut(*wi);
        }
        m.transpose() * wc
    }
}

impl Surface for FactoredSurface {
    fn t_grid(&self) -> UniformGrid {
        self.t
    }
    fn tau_grid(&self) -> UniformGrid {
        self.tau
    }
    fn value(&self, i: usize, j: usize) -> C64 {
        self.a.row(i).transpose().dot(&self.b.row(j).transpose())
    }
    fn weighted_sum(&self, weight: Weight, wt: &[f64], wtau: &[f64]) -> f64 {
        match weight {
            Weight::Real => {
                let sa = self.a.transpose() * nalgebra::DVector::from_iterator(wt.len(), wt.iter().map(|&w| C64::from(w)));
                let sb = self.b.transpose() * nalgebra::DVector::from_iterator(wtau.len(), wtau.iter().map(|&w| C64::from(w)));
                sa.dot(&sb).re
            }
            Weight::AbsSquared => {
                let ma = Self::gram(&self.a, wt);
                let mb = Self::gram(&self.b, wtau);
                ma.component_mul(&mb).sum().re
            }
        }
    }
    fn row(&self, i: usize) -> Vec<C64> {
        (&self.b * self.a.row(i).transpose()).iter().copied().collect()
    }
    fn column(&self, j: usize) -> Vec<C64> {
        (&self.a * self.b.row(j).transpose()).iter().copied().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleIntegral {
    pub value: f64,
    /// Richardson estimate from the half-resolution rule.
    pub error_estimate: f64,
    /// Largest |G| on the last t row and last τ column, relative to the peak.
    pub t_edge: f64,
    pub tau_edge: f64,
    pub truncated: bool,
}

/// Composite Simpson integral over the surface grid. The integral is still
/// returned when the surface has not decayed below `floor` at the grid edges;
/// `truncated` is set and a warning logged.
pub fn double_time_integral(surface: &dyn Surface, weight: Weight, floor: f64) -> DoubleIntegral {
    let (tg, taug) = (surface.t_grid(), surface.tau_grid());
    let (wt, wtau) = (tg.simpson_weights(), taug.simpson_weights());
    let value = surface.weighted_sum(weight, &wt, &wtau);
    let coarse = surface.weighted_sum(weight, &coarse_weights(tg.len, tg.step), &coarse_weights(taug.len, taug.step));
    let error_estimate = (value - coarse).abs() / 15.0;

    let max_abs = |v: Vec<C64>| v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let peak = max_abs(surface.column(0)).max(max_abs(surface.row(0))).max(1e-300);
    let t_edge = max_abs(surface.row(tg.len - 1)) / peak;
    let tau_edge = max_abs(surface.column(taug.len - 1)) / peak;
    let truncated = t_edge > floor || tau_edge > floor;
    if truncated {
        log::warn!(
            "correlation surface not decayed at grid edge (t edge {t_edge:.2e}, τ edge {tau_edge:.2e}, floor {floor:.1e})"
        );
    }
    DoubleIntegral { value, error_estimate, t_edge, tau_edge, truncated }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_for_cubics() {
        let g = UniformGrid::covering(0.0, 2.0, 0.3);
        assert_eq!((g.len - 1) % 4, 0);
        let v: Vec<C64> = g.points().iter().map(|x| C64::new(x * x * x - x, 0.0)).collect();
        assert!((simpson(&v, g.step).re - 2.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_gk_oscillatory() {
        let r = integrate(|x| C64::new(0.0, 40.0 * x).exp(), 0.0, 3.0, 1e-12, 0.0).unwrap();
        let exact = (C64::new(0.0, 120.0).exp() - 1.0) / C64::new(0.0, 40.0);
        assert!((r.value - exact).norm() < 1e-11);
    }

    #[test]
    fn adaptive_gk_endpoint_singularity() {
        let r = integrate_real(|x| x.sqrt().recip(), 0.0, 1.0, 1e-9, 0.0).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn factored_matches_dense() {
        let t = UniformGrid::covering(0.0, 4.0, 0.05);
        let tau = UniformGrid::covering(0.0, 3.0, 0.05);
        let a = DMatrix::from_fn(t.len, 2, |i, k| C64::new(0.0, (k + 1) as f64 * t.point(i)).exp() * (-t.point(i)).exp());
        let b = DMatrix::from_fn(tau.len, 2, |j, k| C64::new(-(tau.point(j)) * (k as f64 + 0.5), 0.3 * k as f64).exp());
        let f = FactoredSurface { t, tau, a, b };
        let d = f.to_dense();
        for w in [Weight::Real, Weight::AbsSquared] {
            let x = double_time_integral(&f, w, 1.0);
            let y = double_time_integral(&d, w, 1.0);
            assert!((x.value - y.value).abs() < 1e-12 * y.value.abs().max(1.0));
        }
    }

    #[test]
    fn separable_gaussian_and_truncation_flag() {
        let t = UniformGrid::covering(0.0, 8.0, 0.02);
        let tau = UniformGrid::covering(0.0, 8.0, 0.02);
        let a = DMatrix::from_fn(t.len, 1, |i, _| C64::from((-t.point(i)).exp()));
        let b = DMatrix::from_fn(tau.len, 1, |j, _| C64::from((-2.0 * tau.point(j)).exp()));
        let f = FactoredSurface { t, tau, a, b };
        let r = double_time_integral(&f, Weight::AbsSquared, 1e-10);
        // ∫e^{-2t}∫e^{-4τ} = 1/8 up to the e^{-16} tail
        assert!((r.value - 0.125).abs() < 1e-6);
        assert!(r.truncated);
        assert!(r.error_estimate < 1e-6);
    }
}
