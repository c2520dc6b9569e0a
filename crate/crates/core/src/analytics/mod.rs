//! Closed-form results: the exact resonant-dressing solution, adiabatic
//! elimination, short-pulse purity and interferometer visibilities.

mod adiabatic;
mod autler_townes;
mod interferometry;
mod pulse;

pub use adiabatic::{adiabatic_fom, stark_indistinguishability, AdiabaticFom};
pub use autler_townes::AnalyticAt;
pub use interferometry::{
    mz_peak_areas, visibility_corrected, visibility_hom, visibility_raw_mz, HomVisibility, InterferometerParams,
    PeakAreas,
};
pub use pulse::{cw_error_approx, eta_g, g2_pulse_approx, pulse_validity};
