//! Liouvillian superoperators acting on column-major vectorized states.

use std::ops::{Add, AddAssign};

use super::ops::{ensure_hermitian, vectorize, C64, Mat16, Operator4, Vec16, DIM, I};
use crate::error::{Error, Result};

/// `vec(A X)`: left multiplication, `I ⊗ A`.
pub fn left_mul(a: &Operator4) -> Mat16 {
    Operator4::identity().kronecker(a)
}

/// `vec(X B)`: right multiplication, `Bᵀ ⊗ I`.
pub fn right_mul(b: &Operator4) -> Mat16 {
    b.transpose().kronecker(&Operator4::identity())
}

/// A time-independent generator `dρ/dt = 𝓛ρ` in ps⁻¹.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    pub matrix: Mat16,
}

impl Liouvillian {
    pub fn zero() -> Self {
        Self { matrix: Mat16::zeros() }
    }

    /// `−i[H, ·]`
    pub fn hamiltonian(h: &Operator4) -> Self {
        Self { matrix: (left_mul(h) - right_mul(h)) * (-I) }
    }

    /// `(rate/2)·(2AρA† − A†Aρ − ρA†A)`
    pub fn dissipator(rate: f64, a: &Operator4) -> Self {
        let ad = a.adjoint();
        let ada = ad * a;
        let m = left_mul(a) * right_mul(&ad) * C64::from(2.0) - left_mul(&ada) - right_mul(&ada);
        Self { matrix: m * C64::from(0.5 * rate) }
    }

    pub fn apply(&self, x: &Vec16) -> Vec16 {
        self.matrix * x
    }

    pub fn apply_op(&self, rho: &Operator4) -> Operator4 {
        super::ops::unvectorize(&self.apply(&vectorize(rho)))
    }

    /// Generator of the adjoint (Heisenberg-picture) flow on trace functionals.
    pub fn transpose(&self) -> Self {
        Self { matrix: self.matrix.transpose() }
    }

    /// Adds `iω` to the diagonal, which multiplies solutions by `e^{iωt}`.
    pub fn shifted(&self, omega: f64) -> Self {
        let mut m = self.matrix;
        for k in 0..DIM * DIM {
            m[(k, k)] += I * omega;
        }
        Self { matrix: m }
    }

    /// Largest |Im λ| and smallest nonzero −Re λ over the spectrum.
    pub fn spectral_scales(&self) -> SpectralScales {
        let (_, t) = self.matrix.schur().unpack();
        let norm = self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        let mut max_freq: f64 = 0.0;
        let mut min_decay = f64::INFINITY;
        for k in 0..DIM * DIM {
            let lam = t[(k, k)];
            max_freq = max_freq.max(lam.im.abs());
            if -lam.re > 1e-10 * norm {
                min_decay = min_decay.min(-lam.re);
            }
        }
        SpectralScales { max_freq, min_decay }
    }

    /// Frobenius norm of `vec(I)ᵀ 𝓛`, zero for trace-preserving generators.
    pub fn trace_defect(&self) -> f64 {
        let id = vectorize(&Operator4::identity());
        (id.transpose() * self.matrix).norm()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SpectralScales {
    pub max_freq: f64,
    pub min_decay: f64,
}

impl Add for Liouvillian {
    type Output = Liouvillian;
    fn add(self, rhs: Liouvillian) -> Liouvillian {
        Liouvillian { matrix: self.matrix + rhs.matrix }
    }
}

impl AddAssign for Liouvillian {
    fn add_assign(&mut self, rhs: Liouvillian) {
        self.matrix += rhs.matrix;
    }
}

/// One dissipative channel `(rate/2)𝓛[A]` with rate in ps⁻¹.
#[derive(Debug, Clone)]
pub struct Collapse {
    pub rate: f64,
    pub op: Operator4,
}

impl Collapse {
    pub fn new(rate: f64, op: Operator4) -> Self {
        Self { rate, op }
    }
}

/// `−i[H,·] + Σ (rate/2)𝓛[A]` with `H` in ps⁻¹.
pub fn assemble_lindblad(h: &Operator4, terms: &[Collapse]) -> Result<Liouvillian> {
    ensure_hermitian(h, "H")?;
    let mut l = Liouvillian::hamiltonian(h);
    for c in terms {
        if !(c.rate >= 0.0) || !c.rate.is_finite() {
            return Err(Error::invalid("rate", format!("collapse rate must be finite and ≥ 0, got {}", c.rate)));
        }
        l += Liouvillian::dissipator(c.rate, &c.op);
    }
    Ok(l)
}
