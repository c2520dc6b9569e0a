//! Local maximum of the dominant-sidepeak indistinguishability over the
//! detuning at a fixed Stark shift.

use sps_core::engine::{Engine, EngineInput, Wants};
use sps_core::fom::Numerics;
use sps_core::phonons::PhononBath;
use sps_core::system::{drive_for_shift, SystemParams};
use sps_core::{Error, Result};

/// Search window in δ/Δ_ac, log-spaced coarse grid, then golden-section
/// refinement in log(δ/Δ_ac).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Search {
    pub lo: f64,
    pub hi: f64,
    pub coarse_points: usize,
    /// Relative bracket width at which refinement stops.
    pub rel_tol: f64,
}

impl Default for Search {
    fn default() -> Self {
        Self { lo: 1.0, hi: 50.0, coarse_points: 16, rel_tol: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    /// δ_opt/Δ_ac.
    pub ratio: f64,
    /// δ_opt in μeV.
    pub delta: f64,
    pub i_max: f64,
    /// False when the best value sits on a search boundary.
    pub interior: bool,
    pub evaluations: usize,
}

struct Objective<'a> {
    delta_ac: f64,
    base: SystemParams,
    bath: Option<&'a PhononBath>,
    engine: &'a dyn Engine,
    numerics: &'a Numerics,
    calls: usize,
}

impl Objective<'_> {
    fn at(&mut self, ratio: f64) -> Result<f64> {
        self.calls += 1;
        let delta = ratio * self.delta_ac;
        let params = self.base.with_drive(drive_for_shift(self.delta_ac, delta)?, delta);
        let wants = Wants { indistinguishability: false, sidepeaks: true };
        let out = self.engine.evaluate(&EngineInput { params, bath: self.bath, numerics: self.numerics, wants })?;
        out.fom.dominant_i(delta).ok_or_else(|| Error::Domain("engine returned no sidepeak indistinguishability".into()))
    }
}

/// `delta_ac` in μeV; its sign selects the red or blue shift.
pub fn find_optimal_detuning(
    delta_ac: f64,
    base: &SystemParams,
    bath: Option<&PhononBath>,
    engine: &dyn Engine,
    numerics: &Numerics,
    search: Search,
) -> Result<Optimum> {
    if delta_ac == 0.0 {
        return Err(Error::invalid("delta_ac", "must be nonzero"));
    }
    if !(search.lo > 0.0 && search.hi > search.lo && search.coarse_points >= 3) {
        return Err(Error::invalid("search", "need 0 < lo < hi and at least 3 coarse points"));
    }
    let mut f = Objective { delta_ac, base: *base, bath, engine, numerics, calls: 0 };
    let n = search.coarse_points;
    let grid: Vec<f64> = (0..n)
        .map(|k| search.lo * (search.hi / search.lo).powf(k as f64 / (n - 1) as f64))
        .collect();
    let mut values = Vec::with_capacity(n);
    for &r in &grid {
        values.push(f.at(r)?);
    }
    let best = (0..n).fold(0, |b, k| if values[k] > values[b] { k } else { b });
    if best == 0 || best == n - 1 {
        return Ok(Optimum {
            ratio: grid[best],
            delta: grid[best] * delta_ac,
            i_max: values[best],
            interior: false,
            evaluations: f.calls,
        });
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (grid[best - 1].ln(), grid[best + 1].ln());
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f.at(c.exp())?, f.at(d.exp())?);
    let (mut x_best, mut f_best) = (grid[best], values[best]);
    while (b - a) > search.rel_tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f.at(c.exp())?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f.at(d.exp())?;
        }
        for (x, v) in [(c, fc), (d, fd)] {
            if v > f_best {
                x_best = x.exp();
                f_best = v;
            }
        }
    }
    Ok(Optimum { ratio: x_best, delta: x_best * delta_ac, i_max: f_best, interior: true, evaluations: f.calls })
}
