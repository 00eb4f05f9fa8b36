//! Field samplers along a parameterised geodesic: `t ↦ (Φ(t), A(γ̇(t)))`.

use nalgebra::{Matrix2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::{ExtComplex, Mobius};
use crate::hyperbolic::{self, MultiCenterPotential, OrientedGeodesic, PointUHS};
use crate::C64;

pub type Mat2 = Matrix2<C64>;

const I: C64 = C64::new(0.0, 1.0);

/// Higgs field and connection component along the geodesic, both
/// anti-Hermitian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldValue {
    pub phi: Mat2,
    pub a: Mat2,
}

impl FieldValue {
    /// `Λ = iΦ - A(γ̇)`, so that the scattering equation reads `s' = Λ s`.
    pub fn generator(&self) -> Mat2 {
        self.phi * I - self.a
    }

    /// Operator norm of `Φ`.
    pub fn higgs_norm(&self) -> f64 {
        self.phi.singular_values().max()
    }
}

pub trait FieldSampler: Sync {
    fn sample(&self, t: f64) -> Result<FieldValue>;

    /// Parameters at which the path runs into a singularity of the fields.
    fn poles(&self) -> Vec<f64> {
        Vec::new()
    }
}

fn diag(a: C64, b: C64) -> Mat2 {
    Mat2::new(a, C64::new(0.0, 0.0), C64::new(0.0, 0.0), b)
}

/// Constant abelian field `Φ = diag(im, -im)`, `A = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrivialU1 {
    pub mass: f64,
}

impl FieldSampler for TrivialU1 {
    fn sample(&self, _t: f64) -> Result<FieldValue> {
        Ok(FieldValue { phi: diag(I * self.mass, -I * self.mass), a: Mat2::zeros() })
    }
}

/// The abelian field `Φ = diag(iV, -iV)` of a multi-center potential along a
/// hyperbolic geodesic parameterised by arc length from its closest point to
/// `base`.
///
/// The connection only contributes a unitary diagonal factor to solutions, so
/// it is dropped; norms of fundamental solutions are unaffected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbelianHyperbolic {
    pub potential: MultiCenterPotential,
    pub geodesic: OrientedGeodesic,
    pub base: PointUHS,
}

impl AbelianHyperbolic {
    /// The upward vertical geodesic at impact parameter `z` from center `i`:
    /// after moving `pᵢ` to `O`, the line over `z` with `t = 0` at height
    /// `√(1 + |z|²)`.
    pub fn at_impact(potential: &MultiCenterPotential, i: usize, z: C64) -> Result<Self> {
        let p = *potential
            .centers()
            .get(i)
            .ok_or_else(|| Error::Precondition(format!("no center with index {i}")))?;
        let foot = p.w() + z * p.z;
        let geodesic = OrientedGeodesic::new(ExtComplex::Finite(foot), ExtComplex::Infinity)?;
        Ok(AbelianHyperbolic { potential: potential.clone(), geodesic, base: p })
    }

    pub fn point(&self, t: f64) -> PointUHS {
        hyperbolic::geodesic_point(&self.geodesic, &self.base, t)
    }
}

impl FieldSampler for AbelianHyperbolic {
    fn sample(&self, t: f64) -> Result<FieldValue> {
        let x = self.point(t);
        let v = hyperbolic::potential(&self.potential, &x).map_err(|_| Error::PoleOnGeodesic { t })?;
        if !v.is_finite() {
            return Err(Error::PoleOnGeodesic { t });
        }
        Ok(FieldValue { phi: diag(I * v, -I * v), a: Mat2::zeros() })
    }

    fn poles(&self) -> Vec<f64> {
        let m = Mobius::endpoints_to_axis(self.geodesic.start, self.geodesic.end);
        let b = m.apply_point(&self.base);
        let s0 = (b.w().norm_sqr() + b.z * b.z).sqrt();
        self.potential
            .centers()
            .iter()
            .filter_map(|p| {
                let q = m.apply_point(p);
                (q.w().norm() <= 1e-12 * q.z).then(|| (q.z / s0).ln())
            })
            .collect()
    }
}

/// An oriented line `x(t) = point + t·direction` in `R³` with `point` the
/// closest point to the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EuclideanLine {
    pub point: [f64; 3],
    pub direction: [f64; 3],
}

impl EuclideanLine {
    /// Line with the given direction through `through`, reparameterised so
    /// that `t = 0` is its closest point to the origin.
    pub fn new(through: [f64; 3], direction: [f64; 3]) -> Result<Self> {
        let d = Vector3::from(direction);
        let n = d.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Precondition("line direction must be a nonzero finite vector".into()));
        }
        let d = d / n;
        let x = Vector3::from(through);
        let foot = x - d * x.dot(&d);
        Ok(EuclideanLine { point: foot.into(), direction: d.into() })
    }

    pub fn impact_parameter(&self) -> f64 {
        Vector3::from(self.point).norm()
    }

    pub fn at(&self, t: f64) -> Vector3<f64> {
        Vector3::from(self.point) + Vector3::from(self.direction) * t
    }
}

/// The charge-1 BPS monopole with Higgs vacuum value `v = 2` centred at the
/// origin (hedgehog gauge), sampled along a line:
/// `Φ = -φ(r) x̂ᵃ tₐ`, `Aᵃᵢ = εₐᵢⱼ x̂ʲ (1 - K(r))/r`, with
/// `φ = 2 coth 2r - 1/r`, `K = 2r / sinh 2r` and `tₐ = -(i/2)σₐ`.
/// The sign of `Φ` makes `F_A = *∇_AΦ` hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrasadSommerfield {
    pub line: EuclideanLine,
}

/// Pauli generators `tₐ = -(i/2)σₐ`, with `[tₐ, t_b] = ε_abc t_c`.
pub fn su2_generators() -> [Mat2; 3] {
    let h = C64::new(0.5, 0.0);
    let z = C64::new(0.0, 0.0);
    let s1 = Mat2::new(z, h, h, z);
    let s2 = Mat2::new(z, -I * h, I * h, z);
    let s3 = Mat2::new(h, z, z, -h);
    [s1 * -I, s2 * -I, s3 * -I]
}

/// `φ(r)/r` and `(1 - K(r))/r²`, with series near `r = 0`.
fn ps_profiles(r: f64) -> (f64, f64) {
    if r < 1e-2 {
        let r2 = r * r;
        (
            4.0 / 3.0 - 16.0 * r2 / 45.0 + 128.0 * r2 * r2 / 945.0,
            2.0 / 3.0 - 14.0 * r2 / 45.0 + 124.0 * r2 * r2 / 945.0,
        )
    } else {
        let x = 2.0 * r;
        ((2.0 / x.tanh() - 1.0 / r) / r, (1.0 - x / x.sinh()) / (r * r))
    }
}

impl PrasadSommerfield {
    /// `(Φ, A₁, A₂, A₃)` at a point of `R³`.
    pub fn fields_at(x: &Vector3<f64>) -> (Mat2, [Mat2; 3]) {
        let t = su2_generators();
        let (phi_r, k_r2) = ps_profiles(x.norm());
        let phi = (t[0] * C64::from(x[0]) + t[1] * C64::from(x[1]) + t[2] * C64::from(x[2])) * C64::from(-phi_r);
        let mut a = [Mat2::zeros(); 3];
        for (i, ai) in a.iter_mut().enumerate() {
            for (aa, ta) in t.iter().enumerate() {
                for j in 0..3 {
                    let eps = levi_civita(aa, i, j);
                    if eps != 0.0 {
                        *ai += ta * C64::from(eps * x[j] * k_r2);
                    }
                }
            }
        }
        (phi, a)
    }
}

pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

impl FieldSampler for PrasadSommerfield {
    fn sample(&self, t: f64) -> Result<FieldValue> {
        let (phi, a) = Self::fields_at(&self.line.at(t));
        let d = self.line.direction;
        Ok(FieldValue { phi, a: a[0] * C64::from(d[0]) + a[1] * C64::from(d[1]) + a[2] * C64::from(d[2]) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn commutator(a: &Mat2, b: &Mat2) -> Mat2 {
        a * b - b * a
    }

    #[test]
    fn generators_close_under_bracket() {
        let t = su2_generators();
        assert!((commutator(&t[0], &t[1]) - t[2]).camax() < 1e-15);
        assert!((commutator(&t[1], &t[2]) - t[0]).camax() < 1e-15);
    }

    #[test]
    fn profile_series_matches_closed_form_at_the_switch() {
        let r = 1e-2;
        let x = 2.0 * r;
        let (a, b) = ps_profiles(r * (1.0 - 1e-12));
        assert!((a - (2.0 / x.tanh() - 1.0 / r) / r).abs() < 1e-10);
        assert!((b - (1.0 - x / x.sinh()) / (r * r)).abs() < 1e-10);
    }

    /// `F_ij = ε_ijk D_k Φ` by finite differences.
    #[test]
    fn prasad_sommerfield_satisfies_bogomolny() {
        let h = 1e-4;
        for x in [Vector3::new(0.3, -0.2, 0.5), Vector3::new(1.2, 0.7, -0.4), Vector3::new(-2.0, 0.1, 0.9)] {
            let (phi, a) = PrasadSommerfield::fields_at(&x);
            let mut d_phi = [Mat2::zeros(); 3];
            let mut d_a = [[Mat2::zeros(); 3]; 3]; // d_a[i][j] = ∂_i A_j
            for i in 0..3 {
                let mut e = Vector3::zeros();
                e[i] = h;
                let (pp, ap) = PrasadSommerfield::fields_at(&(x + e));
                let (pm, am) = PrasadSommerfield::fields_at(&(x - e));
                let (pp2, ap2) = PrasadSommerfield::fields_at(&(x + e * 2.0));
                let (pm2, am2) = PrasadSommerfield::fields_at(&(x - e * 2.0));
                let stencil = |p2: Mat2, p1: Mat2, m1: Mat2, m2: Mat2| ((p1 - m1) * C64::from(8.0) - (p2 - m2)) / C64::from(12.0 * h);
                d_phi[i] = stencil(pp2, pp, pm, pm2);
                for j in 0..3 {
                    d_a[i][j] = stencil(ap2[j], ap[j], am[j], am2[j]);
                }
            }
            for i in 0..3 {
                for j in 0..3 {
                    let f = d_a[i][j] - d_a[j][i] + commutator(&a[i], &a[j]);
                    let mut star = Mat2::zeros();
                    for k in 0..3 {
                        star += (d_phi[k] + commutator(&a[k], &phi)) * C64::from(levi_civita(i, j, k));
                    }
                    assert!((f - star).camax() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn fixtures_are_anti_hermitian() {
        let ps = PrasadSommerfield { line: EuclideanLine::new([0.5, 1.0, 0.0], [0.0, 0.0, 1.0]).unwrap() };
        let f = ps.sample(0.7).unwrap();
        assert!((f.phi + f.phi.adjoint()).camax() < 1e-15);
        assert!((f.a + f.a.adjoint()).camax() < 1e-15);
        let t = TrivialU1 { mass: 1.5 }.sample(0.0).unwrap();
        assert!((t.higgs_norm() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn line_is_reparameterised_at_its_foot() {
        let l = EuclideanLine::new([1.0, 2.0, 3.0], [0.0, 0.0, 2.0]).unwrap();
        assert_eq!(l.point, [1.0, 2.0, 0.0]);
        assert!((l.impact_parameter() - 5f64.sqrt()).abs() < 1e-15);
        assert!(EuclideanLine::new([0.0; 3], [0.0; 3]).is_err());
    }

    #[test]
    fn abelian_fixture_hits_the_pythagoras_distance() {
        let p = PointUHS::new(0.3, -0.2, 0.7).unwrap();
        let v = MultiCenterPotential::for_mass(1.0, vec![p], vec![2]).unwrap();
        let z = C64::new(0.2, 0.1);
        let f = AbelianHyperbolic::at_impact(&v, 0, z).unwrap();
        for t in [-1.3, 0.0, 0.4, 2.0] {
            let expected = (1.0 + z.norm_sqr()).sqrt() * f64::cosh(t);
            assert!((hyperbolic::cosh_dist(&p, &f.point(t)) - expected).abs() < 1e-12 * expected);
        }
    }
}
