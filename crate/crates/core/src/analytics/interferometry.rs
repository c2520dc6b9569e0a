//! Two-photon interference visibilities for unbalanced Mach–Zehnder and
//! two-source HOM setups. Peak areas are per collected pulse cycle.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferometerParams {
    /// Intensity reflectance.
    pub r: f64,
    /// Intensity transmittance.
    pub t: f64,
    /// Fringe-contrast defect.
    pub epsilon: f64,
    /// Arm delay, ns.
    pub t0: f64,
    /// Repetition period, ns.
    pub t_rep: f64,
}

impl Default for InterferometerParams {
    fn default() -> Self {
        Self { r: 0.5, t: 0.5, epsilon: 0.0, t0: 3.0, t_rep: 12.5 }
    }
}

impl InterferometerParams {
    pub fn new(r: f64, epsilon: f64) -> Result<Self> {
        let p = Self { r, t: 1.0 - r, epsilon, ..Default::default() };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.r) || !(0.0..=1.0).contains(&self.t) || (self.r + self.t - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("reflectance", "R and T must lie in [0, 1] with R + T = 1"));
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(Error::invalid("fringe_defect", "must lie in [0, 1)"));
        }
        Ok(())
    }

    /// Warnings when peaks overlap for an emitter of the given lifetime (ns).
    pub fn timing_warnings(&self, lifetime: f64) -> Vec<String> {
        let mut w = Vec::new();
        if self.t0 < 10.0 * lifetime {
            w.push(format!("arm delay {} ns is not long against the lifetime {lifetime:.3} ns", self.t0));
        }
        if self.t_rep - 3.0 * self.t0 < 10.0 * lifetime {
            w.push(format!("T_rep − 3T_0 = {:.3} ns is not long against the lifetime", self.t_rep - 3.0 * self.t0));
        }
        w
    }

    /// `χ = (R² + T²) / (2RT(1 − ε)²)`
    pub fn chi_cor(&self) -> Result<f64> {
        if self.r == 0.0 || self.t == 0.0 {
            return Err(Error::Domain("χ_cor is singular for R = 0 or T = 0".into()));
        }
        Ok((self.r * self.r + self.t * self.t) / (2.0 * self.r * self.t * (1.0 - self.epsilon).powi(2)))
    }

    fn contrast(&self) -> f64 {
        (1.0 - self.epsilon).powi(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakAreas {
    /// Zero-delay peak.
    pub a0: f64,
    /// Each neighbouring peak at ±T_0.
    pub a_pm: f64,
}

impl PeakAreas {
    pub fn visibility(&self) -> f64 {
        1.0 - self.a0 / self.a_pm
    }
}

pub fn mz_peak_areas(n: f64, i: f64, g2: f64, ifo: &InterferometerParams) -> PeakAreas {
    let (r, t) = (ifo.r, ifo.t);
    let s = (r * r + t * t) / 2.0;
    let pre = r * t * n * n;
    PeakAreas { a0: pre * (s * (1.0 + 2.0 * g2) - r * t * ifo.contrast() * i), a_pm: pre * s * (1.0 + g2) }
}

/// `V_raw = (I/χ − g²)/(1 + g²)`
pub fn visibility_raw_mz(i: f64, g2: f64, ifo: &InterferometerParams) -> Result<f64> {
    Ok((i / ifo.chi_cor()? - g2) / (1.0 + g2))
}

/// Visibility in an ideal balanced interferometer and the indistinguishability
/// recovered from a raw visibility.
pub fn visibility_corrected(v_raw: f64, g2: f64, ifo: &InterferometerParams) -> Result<(f64, f64)> {
    let i = ifo.chi_cor()? * ((1.0 + g2) * v_raw + g2);
    Ok(((i - g2) / (1.0 + g2), i))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomVisibility {
    pub v_raw: f64,
    pub areas: PeakAreas,
}

/// Two independent sources on one beam splitter.
pub fn visibility_hom(n: f64, i: f64, g2: f64, ifo: &InterferometerParams) -> HomVisibility {
    let (r, t) = (ifo.r, ifo.t);
    let areas = PeakAreas { a0: n * n * (r * r + t * t - 2.0 * r * t * (i * ifo.contrast() - g2)), a_pm: n * n };
    HomVisibility { v_raw: 2.0 * r * t * (1.0 + i * ifo.contrast() - g2), areas }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ideal() -> InterferometerParams {
        InterferometerParams::default()
    }

    #[test]
    fn perfect_dip() {
        assert_eq!(mz_peak_areas(1.0, 1.0, 0.0, &ideal()).a0, 0.0);
        assert_eq!(visibility_raw_mz(1.0, 0.0, &ideal()).unwrap(), 1.0);
    }

    #[test]
    fn distinguishable_photons_fill_the_dip() {
        let a = mz_peak_areas(1.0, 0.0, 0.0, &ideal());
        assert_eq!(a.a0 / a.a_pm, 1.0);
        assert_eq!(visibility_raw_mz(0.0, 0.0, &ideal()).unwrap(), 0.0);
    }

    #[test]
    fn unbalanced_splitter() {
        let ifo = InterferometerParams::new(0.6, 0.0).unwrap();
        let v = visibility_raw_mz(1.0, 0.0, &ifo).unwrap();
        assert!((v - 0.48 / 0.52).abs() < 1e-15);
    }

    #[test]
    fn singular_correction() {
        let ifo = InterferometerParams::new(1.0, 0.0).unwrap();
        assert!(matches!(visibility_raw_mz(1.0, 0.0, &ifo), Err(Error::Domain(_))));
    }

    #[test]
    fn hom_anchors() {
        assert_eq!(visibility_hom(1.0, 1.0, 0.0, &ideal()).v_raw, 1.0);
        assert_eq!(visibility_hom(1.0, 0.0, 0.0, &ideal()).v_raw, 0.5);
        assert_eq!(visibility_hom(1.0, 1.0, 0.0, &ideal()).v_raw, visibility_raw_mz(1.0, 0.0, &ideal()).unwrap());
    }

    #[test]
    fn unit_correction_is_identity() {
        let (v, _) = visibility_corrected(0.83, 0.02, &ideal()).unwrap();
        assert!((v - 0.83).abs() < 1e-15);
    }

    fn ifo_strategy() -> impl Strategy<Value = InterferometerParams> {
        (0.05f64..0.95, 0.0f64..0.3).prop_map(|(r, e)| InterferometerParams::new(r, e).unwrap())
    }

    proptest! {
        #[test]
        fn mz_round_trip(i in 0.0f64..1.0, g2 in 0.0f64..0.5, ifo in ifo_strategy()) {
            let v = visibility_raw_mz(i, g2, &ifo).unwrap();
            let (_, back) = visibility_corrected(v, g2, &ifo).unwrap();
            prop_assert!((back - i).abs() < 1e-12);
        }

        #[test]
        fn mz_areas_match_visibility(n in 0.1f64..1.0, i in 0.0f64..1.0, g2 in 0.0f64..0.5, ifo in ifo_strategy()) {
            let a = mz_peak_areas(n, i, g2, &ifo);
            prop_assert!((a.visibility() - visibility_raw_mz(i, g2, &ifo).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn hom_areas_match_visibility(n in 0.1f64..1.0, i in 0.0f64..1.0, g2 in 0.0f64..0.5, ifo in ifo_strategy()) {
            let h = visibility_hom(n, i, g2, &ifo);
            prop_assert!((h.areas.visibility() - h.v_raw).abs() < 1e-12);
        }

        #[test]
        fn corrected_visibility_first_order(i in 0.3f64..1.0, g2 in 0.0f64..0.01, ifo in ifo_strategy()) {
            let chi = ifo.chi_cor().unwrap();
            let v_raw = visibility_raw_mz(i, g2, &ifo).unwrap();
            let (v, _) = visibility_corrected(v_raw, g2, &ifo).unwrap();
            let approx = chi * v_raw + g2 * (chi - 1.0);
            prop_assert!((v - approx).abs() < 4.0 * chi * (1.0 + v_raw.abs()) * g2 * g2 + 1e-12);
        }
    }
}
