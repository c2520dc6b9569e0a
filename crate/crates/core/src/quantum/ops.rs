//! Four-level operators in the (G, X, Y, B) basis.

use nalgebra::{Matrix4, SMatrix, SVector, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Operator4 = Matrix4<C64>;
pub type Ket4 = Vector4<C64>;
/// Column-major vectorization of a 4×4 operator.
pub type Vec16 = SVector<C64, 16>;
pub type Mat16 = SMatrix<C64, 16, 16>;

pub const DIM: usize = 4;

/// Basis labels. The discriminant is the matrix index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    G = 0,
    X = 1,
    Y = 2,
    B = 3,
}

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn ket(level: Level) -> Ket4 {
    let mut k = Ket4::zeros();
    k[level as usize] = ONE;
    k
}

/// `|a⟩⟨b|`.
pub fn transition(a: Level, b: Level) -> Operator4 {
    let mut m = Operator4::zeros();
    m[(a as usize, b as usize)] = ONE;
    m
}

pub fn projector(level: Level) -> Operator4 {
    transition(level, level)
}

/// `|u⟩⟨v|` for arbitrary kets.
pub fn outer(u: &Ket4, v: &Ket4) -> Operator4 {
    u * v.adjoint()
}

/// σ⁻_X = |G⟩⟨X|
pub fn sigma_minus_x() -> Operator4 {
    transition(Level::G, Level::X)
}

/// σ⁻_B = |X⟩⟨B|
pub fn sigma_minus_b() -> Operator4 {
    transition(Level::X, Level::B)
}

/// σ_x^B = σ⁺_B + σ⁻_B
pub fn sigma_x_b() -> Operator4 {
    let m = sigma_minus_b();
    m + m.adjoint()
}

/// σ_y^B = i(σ⁻_B − σ⁺_B)
pub fn sigma_y_b() -> Operator4 {
    let m = sigma_minus_b();
    (m - m.adjoint()) * I
}

/// σ_z^B = |B⟩⟨B| − |X⟩⟨X|
pub fn sigma_z_b() -> Operator4 {
    projector(Level::B) - projector(Level::X)
}

pub fn sigma_x_x() -> Operator4 {
    let m = sigma_minus_x();
    m + m.adjoint()
}

pub fn sigma_y_x() -> Operator4 {
    let m = sigma_minus_x();
    (m - m.adjoint()) * I
}

pub fn hermiticity_error(op: &Operator4) -> f64 {
    (op - op.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn ensure_hermitian(op: &Operator4, name: &'static str) -> Result<()> {
    let scale = op.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if hermiticity_error(op) > 1e-12 * scale {
        return Err(Error::NonHermitian(name));
    }
    Ok(())
}

pub fn vectorize(op: &Operator4) -> Vec16 {
    Vec16::from_column_slice(op.as_slice())
}

pub fn unvectorize(v: &Vec16) -> Operator4 {
    Operator4::from_column_slice(v.as_slice())
}

/// Index of element (row, col) in the column-major vectorization.
#[inline]
pub fn vec_index(row: usize, col: usize) -> usize {
    row + DIM * col
}

/// Row vector `f` with `f · vec(X) = Tr[A X]`.
pub fn trace_functional(a: &Operator4) -> Vec16 {
    vectorize(&a.transpose())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(pub Operator4);

impl DensityMatrix {
    pub fn pure(level: Level) -> Self {
        Self(projector(level))
    }

    pub fn from_ket(k: &Ket4) -> Self {
        Self(outer(k, k))
    }

    pub fn from_vec(v: &Vec16) -> Self {
        Self(unvectorize(v))
    }

    pub fn to_vec(&self) -> Vec16 {
        vectorize(&self.0)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn population(&self, level: Level) -> f64 {
        self.0[(level as usize, level as usize)].re
    }

    /// ⟨u|ρ|u⟩
    pub fn expectation_ket(&self, u: &Ket4) -> f64 {
        (u.adjoint() * self.0 * u)[(0, 0)].re
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.0)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (self.0 + self.0.adjoint()) * C64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra_on_bx_subspace() {
        let (sx, sy, sz) = (sigma_x_b(), sigma_y_b(), sigma_z_b());
        // [σx, σy] = 2iσz within the B–X block
        let comm = sx * sy - sy * sx;
        assert!((comm - sz * (I * 2.0)).norm() < 1e-15);
        for op in [sx, sy, sz, sigma_x_x(), sigma_y_x()] {
            assert!(hermiticity_error(&op) == 0.0);
        }
    }

    #[test]
    fn vectorization_is_column_major() {
        let m = transition(Level::X, Level::B);
        let v = vectorize(&m);
        assert_eq!(v[vec_index(1, 3)], ONE);
        assert_eq!(unvectorize(&v), m);
    }

    #[test]
    fn trace_functional_matches_trace() {
        let a = sigma_minus_x() + sigma_y_b() * C64::new(0.3, 0.1);
        let x = Operator4::from_fn(|i, j| C64::new(i as f64 + 0.5, j as f64 - 1.0));
        let lhs = trace_functional(&a).dot(&vectorize(&x));
        assert!((lhs - (a * x).trace()).norm() < 1e-14);
    }
}
