//! Open-system dynamics on the four-level (G, X, Y, B) space.

pub mod correlation;
pub mod ops;
pub mod propagate;
pub mod quadrature;
pub mod steady;
pub mod superop;

pub use ops::{DensityMatrix, Ket4, Level, Mat16, Operator4, Vec16, C64};
pub use propagate::{propagate, Generator, Propagator, Tolerances, Trajectory};
pub use superop::{assemble_lindblad, Collapse, Liouvillian};
