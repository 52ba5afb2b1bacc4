use num_complex::Complex64;
use std::ops::{Add, Mul};

/// Time part `(u, v)` of a mode doublet `Φ = (ψ, ψ*)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NambuSpinor {
    pub u: Complex64,
    pub v: Complex64,
}

impl NambuSpinor {
    pub const fn new(u: Complex64, v: Complex64) -> Self {
        Self { u, v }
    }

    pub fn real(u: f64, v: f64) -> Self {
        Self::new(Complex64::new(u, 0.0), Complex64::new(v, 0.0))
    }

    /// `|u|² − |v|²`, the time part of the σ₃ norm.
    pub fn norm_density(&self) -> f64 {
        self.u.norm_sqr() - self.v.norm_sqr()
    }

    /// The σ₁-conjugate partner `σ₁Φ*`.
    pub fn conjugate_partner(&self) -> Self {
        Self::new(self.v.conj(), self.u.conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.u * c, self.v * c)
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.u - other.u).norm().max((self.v - other.v).norm())
    }

    pub fn max_abs(&self) -> f64 {
        self.u.norm().max(self.v.norm())
    }
}

impl Add for NambuSpinor {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.u + o.u, self.v + o.v)
    }
}

impl Mul<NambuSpinor> for Complex64 {
    type Output = NambuSpinor;
    fn mul(self, s: NambuSpinor) -> NambuSpinor {
        s.scale(self)
    }
}

/// The bilinear `aᵀ(iσ₂)b = a.u·b.v − a.v·b.u`.
///
/// It is antisymmetric and, for two solutions of the mode equation, constant
/// in time, which is what makes it usable for continuity matching.
pub fn symplectic_bracket(a: &NambuSpinor, b: &NambuSpinor) -> Complex64 {
    a.u * b.v - a.v * b.u
}
