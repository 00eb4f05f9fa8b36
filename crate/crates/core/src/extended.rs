//! Extended complex numbers (points of `P¹ ≅ ∂H³`) and Möbius maps acting on
//! the boundary and, by Poincaré extension, on the upper half-space.

use serde::{Deserialize, Serialize};

use crate::hyperbolic::PointUHS;
use crate::C64;

/// A point of the Riemann sphere in the standard chart, with an explicit point
/// at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtComplex {
    Finite(C64),
    Infinity,
}

impl ExtComplex {
    pub fn finite(re: f64, im: f64) -> Self {
        ExtComplex::Finite(C64::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtComplex::Infinity)
    }

    pub fn value(&self) -> Option<C64> {
        match *self {
            ExtComplex::Finite(z) => Some(z),
            ExtComplex::Infinity => None,
        }
    }

    /// The antipodal map `ζ ↦ -1/ζ̄`.
    pub fn tau(self) -> Self {
        match self {
            ExtComplex::Infinity => ExtComplex::Finite(C64::new(0.0, 0.0)),
            ExtComplex::Finite(z) if z.norm_sqr() == 0.0 => ExtComplex::Infinity,
            ExtComplex::Finite(z) => ExtComplex::Finite(-1.0 / z.conj()),
        }
    }

    /// Chordal distance on the unit sphere; finite for every pair of points.
    pub fn chordal_distance(&self, other: &ExtComplex) -> f64 {
        match (*self, *other) {
            (ExtComplex::Infinity, ExtComplex::Infinity) => 0.0,
            (ExtComplex::Finite(z), ExtComplex::Infinity)
            | (ExtComplex::Infinity, ExtComplex::Finite(z)) => 2.0 / (1.0 + z.norm_sqr()).sqrt(),
            (ExtComplex::Finite(z), ExtComplex::Finite(w)) => {
                2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
            }
        }
    }

    pub fn approx_eq(&self, other: &ExtComplex, tol: f64) -> bool {
        self.chordal_distance(other) <= tol
    }
}

impl From<C64> for ExtComplex {
    fn from(z: C64) -> Self {
        ExtComplex::Finite(z)
    }
}

/// Möbius map `ζ ↦ (aζ + b)/(cζ + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mobius {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Mobius {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mobius { a, b, c, d }
    }

    pub fn identity() -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        Mobius::new(one, zero, zero, one)
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Self {
        Mobius::new(self.d, -self.b, -self.c, self.a)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Self {
        Mobius::new(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )
    }

    /// The isometry `(w, z) ↦ ((w - c)/s, z/s)` taking `q = (c, s)` to `O = (0,0,1)`.
    pub fn recentering(q: &PointUHS) -> Self {
        let s = C64::new(q.z, 0.0);
        Mobius::new(
            C64::new(1.0, 0.0),
            -q.w(),
            C64::new(0.0, 0.0),
            s,
        )
    }

    /// Rotation about `O` (an `SU(2)` element) sending the unit vector with
    /// stereographic coordinate `u` to the north pole `∞`.
    pub fn rotation_to_infinity(u: ExtComplex) -> Self {
        match u {
            ExtComplex::Infinity => Mobius::identity(),
            ExtComplex::Finite(u) => {
                // (ū, 1; -1, u)/√(1+|u|²) is unitary with determinant 1; its
                // denominator vanishes at u and its numerator at τ(u).
                let inv = 1.0 / (1.0 + u.norm_sqr()).sqrt();
                Mobius::new(
                    u.conj() * inv,
                    C64::new(inv, 0.0),
                    C64::new(-inv, 0.0),
                    u * inv,
                )
            }
        }
    }

    /// Map sending `start ↦ 0` and `end ↦ ∞`.
    pub fn endpoints_to_axis(start: ExtComplex, end: ExtComplex) -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        match (start, end) {
            (ExtComplex::Finite(s), ExtComplex::Finite(e)) => Mobius::new(one, -s, one, -e),
            (ExtComplex::Finite(s), ExtComplex::Infinity) => Mobius::new(one, -s, zero, one),
            (ExtComplex::Infinity, ExtComplex::Finite(e)) => Mobius::new(zero, one, one, -e),
            (ExtComplex::Infinity, ExtComplex::Infinity) => Mobius::identity(),
        }
    }

    pub fn apply(&self, p: ExtComplex) -> ExtComplex {
        match p {
            ExtComplex::Infinity => {
                if self.c.norm_sqr() == 0.0 {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite(self.a / self.c)
                }
            }
            ExtComplex::Finite(z) => {
                let den = self.c * z + self.d;
                if den.norm_sqr() == 0.0 {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Poincaré extension to the upper half-space.
    pub fn apply_point(&self, p: &PointUHS) -> PointUHS {
        let w = p.w();
        let z = p.z;
        let cwd = self.c * w + self.d;
        let den = cwd.norm_sqr() + self.c.norm_sqr() * z * z;
        let num = (self.a * w + self.b) * cwd.conj() + self.a * self.c.conj() * (z * z);
        let w_new = num / den;
        let z_new = self.det().norm() * z / den;
        PointUHS::new_unchecked(w_new.re, w_new.im, z_new)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn tau_is_an_involution_without_fixed_points() {
        for z in [c(0.3, -1.2), c(0.0, 0.0), c(5.0, 2.0)] {
            let p = ExtComplex::Finite(z);
            assert!(p.tau().tau().approx_eq(&p, 1e-14));
            assert!(p.tau().chordal_distance(&p) > 1.9);
        }
        assert_eq!(ExtComplex::Infinity.tau(), ExtComplex::finite(0.0, 0.0));
    }

    #[test]
    fn rotation_sends_u_to_infinity_and_fixes_origin_point() {
        let o = PointUHS::origin();
        for u in [c(0.4, 0.7), c(-3.0, 0.1), c(1.0, 0.0)] {
            let m = Mobius::rotation_to_infinity(ExtComplex::Finite(u));
            assert!(m.apply(ExtComplex::Finite(u)).is_infinite());
            let image = m.apply_point(&o);
            assert!(crate::hyperbolic::dist(&image, &o) < 1e-12);
            // rotations commute with the antipodal map
            let z = ExtComplex::Finite(c(0.2, -0.9));
            assert!(m.apply(z.tau()).approx_eq(&m.apply(z).tau(), 1e-12));
        }
    }

    #[test]
    fn poincare_extension_is_an_isometry() {
        let m = Mobius::new(c(1.0, 0.5), c(-0.3, 2.0), c(0.7, -0.1), c(1.5, 0.2));
        let p = PointUHS::new(0.3, -0.2, 0.8).unwrap();
        let q = PointUHS::new(-1.0, 0.4, 2.5).unwrap();
        let d0 = crate::hyperbolic::dist(&p, &q);
        let d1 = crate::hyperbolic::dist(&m.apply_point(&p), &m.apply_point(&q));
        assert!((d0 - d1).abs() < 1e-12);
    }
}
