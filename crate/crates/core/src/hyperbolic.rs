//! Hyperbolic 3-space in the upper half-space model `{(x, y, z) : z > 0}` with
//! metric `(dx² + dy² + dz²)/z²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::{ExtComplex, Mobius};
use crate::C64;

/// Absolute tolerance on the triangle defect used by [`is_geodesically_trapped`].
pub const TRAPPED_TOLERANCE: f64 = 1e-9;

/// A point of hyperbolic 3-space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointUHS {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl PointUHS {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if !(z > 0.0) || !x.is_finite() || !y.is_finite() || !z.is_finite() {
            return Err(Error::InvalidPoint(format!(
                "({x}, {y}, {z}) is not in the upper half-space"
            )));
        }
        Ok(PointUHS { x, y, z })
    }

    pub(crate) fn new_unchecked(x: f64, y: f64, z: f64) -> Self {
        PointUHS { x, y, z }
    }

    /// The base point `O = (0, 0, 1)`.
    pub fn origin() -> Self {
        PointUHS { x: 0.0, y: 0.0, z: 1.0 }
    }

    /// Horizontal coordinate as a complex number `x + iy`.
    pub fn w(&self) -> C64 {
        C64::new(self.x, self.y)
    }

    pub fn from_w(w: C64, z: f64) -> Result<Self> {
        PointUHS::new(w.re, w.im, z)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// A point of the conformal boundary `∂H³ ≅ P¹`.
pub type BoundaryPoint = ExtComplex;

/// An oriented geodesic, stored by its boundary endpoints.
///
/// In the twistor coordinates `(z, w)` of [`crate::twistor::TwistorPoint`] the
/// geodesic has `z = end` and `w = τ(start)`, so the requirement `start ≠ end`
/// is the exclusion of the anti-diagonal `z = τ(w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientedGeodesic {
    pub start: BoundaryPoint,
    pub end: BoundaryPoint,
}

impl OrientedGeodesic {
    pub fn new(start: BoundaryPoint, end: BoundaryPoint) -> Result<Self> {
        if start.approx_eq(&end, 1e-14) {
            return Err(Error::AntiDiagonal);
        }
        Ok(OrientedGeodesic { start, end })
    }

    /// The vertical axis through `O`, oriented upwards.
    pub fn vertical_axis() -> Self {
        OrientedGeodesic {
            start: ExtComplex::finite(0.0, 0.0),
            end: ExtComplex::Infinity,
        }
    }

    pub fn reversed(&self) -> Self {
        OrientedGeodesic { start: self.end, end: self.start }
    }

    /// The geodesic through `base` ending at `end`.
    pub fn through(base: &PointUHS, end: BoundaryPoint) -> Self {
        let m = Mobius::recentering(base);
        let start = m.inverse().apply(m.apply(end).tau());
        OrientedGeodesic { start, end }
    }
}

/// `V = λ + Σ lᵢ G_{pᵢ}` together with the monopole mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiCenterPotential {
    lambda: f64,
    centers: Vec<PointUHS>,
    charges: Vec<u32>,
    mass: f64,
}

impl MultiCenterPotential {
    pub fn new(lambda: f64, centers: Vec<PointUHS>, charges: Vec<u32>, mass: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !(mass >= 0.0) {
            return Err(Error::InvariantViolation(format!(
                "λ = {lambda} and m = {mass} must be nonnegative"
            )));
        }
        if centers.len() != charges.len() {
            return Err(Error::InvariantViolation(format!(
                "{} centers but {} charges",
                centers.len(),
                charges.len()
            )));
        }
        if charges.iter().any(|&l| l == 0) {
            return Err(Error::InvariantViolation("charges must be positive".into()));
        }
        for i in 0..centers.len() {
            for j in (i + 1)..centers.len() {
                if dist(&centers[i], &centers[j]) < 1e-12 {
                    return Err(Error::InvariantViolation(format!(
                        "centers {i} and {j} coincide"
                    )));
                }
            }
        }
        Ok(MultiCenterPotential { lambda, centers, charges, mass })
    }

    /// The potential of the charge-1 moduli space of mass `m`: `λ = 1 + 2m`.
    pub fn for_mass(mass: f64, centers: Vec<PointUHS>, charges: Vec<u32>) -> Result<Self> {
        MultiCenterPotential::new(1.0 + 2.0 * mass, centers, charges, mass)
    }

    /// The constant potential `V ≡ λ`.
    pub fn constant(lambda: f64) -> Self {
        MultiCenterPotential { lambda, centers: Vec::new(), charges: Vec::new(), mass: 0.0 }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn centers(&self) -> &[PointUHS] {
        &self.centers
    }

    pub fn charges(&self) -> &[u32] {
        &self.charges
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn total_charge(&self) -> u32 {
        self.charges.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Same centers with every charge doubled.
    pub fn doubled(&self) -> Self {
        MultiCenterPotential {
            charges: self.charges.iter().map(|l| 2 * l).collect(),
            ..self.clone()
        }
    }
}

/// Hyperbolic distance, via `sinh(ρ/2) = |p - q|_E / (2 √(z_p z_q))`.
pub fn dist(p: &PointUHS, q: &PointUHS) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let dz = p.z - q.z;
    let e = (dx * dx + dy * dy + dz * dz).sqrt();
    2.0 * (e / (2.0 * (p.z * q.z).sqrt())).asinh()
}

/// `cosh ρ(p, q) = 1 + |p - q|²_E / (2 z_p z_q)`.
pub fn cosh_dist(p: &PointUHS, q: &PointUHS) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let dz = p.z - q.z;
    1.0 + (dx * dx + dy * dy + dz * dz) / (2.0 * p.z * q.z)
}

/// Horospherical height centred at `u`, up to a positive constant.
fn raw_height(u: BoundaryPoint, x: &PointUHS) -> f64 {
    match u {
        ExtComplex::Infinity => x.z,
        ExtComplex::Finite(a) => x.z / ((x.w() - a).norm_sqr() + x.z * x.z),
    }
}

/// Busemann function of the boundary point `u`, normalised to vanish at `base`.
///
/// Closed form: horospheres at a finite `u = a` are the Euclidean spheres tangent
/// to the boundary at `a`, on which `z / (|w - a|² + z²)` is constant.
pub fn busemann(u: BoundaryPoint, base: &PointUHS, x: &PointUHS) -> f64 {
    (raw_height(u, x) / raw_height(u, base)).ln()
}

/// `q_u = exp(b_u)`, with `q_u(base) = 1`.
pub fn horospherical_height(u: BoundaryPoint, base: &PointUHS, x: &PointUHS) -> f64 {
    raw_height(u, x) / raw_height(u, base)
}

/// `G(ρ) = 1/(e^{2ρ} - 1)`.
pub fn green_of_distance(rho: f64) -> f64 {
    1.0 / (2.0 * rho).exp_m1()
}

/// Green's function of the hyperbolic Laplacian centred at `p`.
pub fn green(p: &PointUHS, x: &PointUHS) -> Result<f64> {
    let rho = dist(p, x);
    if rho == 0.0 {
        return Err(Error::Pole(format!("Green's function evaluated at its center {p:?}")));
    }
    Ok(green_of_distance(rho))
}

/// `V(x) = λ + Σ lᵢ G_{pᵢ}(x)`.
pub fn potential(v: &MultiCenterPotential, x: &PointUHS) -> Result<f64> {
    let mut total = v.lambda;
    for (p, &l) in v.centers.iter().zip(&v.charges) {
        total += l as f64 * green(p, x)?;
    }
    Ok(total)
}

/// Whether `x` lies on the closed geodesic segment joining two distinct centers.
pub fn is_geodesically_trapped(x: &PointUHS, centers: &[PointUHS]) -> bool {
    for i in 0..centers.len() {
        for j in (i + 1)..centers.len() {
            let defect =
                dist(&centers[i], x) + dist(x, &centers[j]) - dist(&centers[i], &centers[j]);
            if defect.abs() <= TRAPPED_TOLERANCE {
                return true;
            }
        }
    }
    false
}

/// Arc-length parameterisation of `gamma` with `γ(0)` the point closest to `base`.
pub fn geodesic_point(gamma: &OrientedGeodesic, base: &PointUHS, t: f64) -> PointUHS {
    let m = Mobius::endpoints_to_axis(gamma.start, gamma.end);
    let b = m.apply_point(base);
    // The hemisphere centred at 0 through b meets the vertical axis orthogonally.
    let s0 = (b.w().norm_sqr() + b.z * b.z).sqrt();
    let on_axis = PointUHS::new_unchecked(0.0, 0.0, s0 * t.exp());
    m.inverse().apply_point(&on_axis)
}

/// Laplace–Beltrami operator `z²(∂²_x + ∂²_y + ∂²_z) - z ∂_z` applied with the
/// 7-point stencil of step `h·z`, Richardson-extrapolated over `h` and `h/2`.
pub fn hyperbolic_laplacian<F: Fn(&PointUHS) -> f64>(f: F, x: &PointUHS, h: f64) -> f64 {
    let apply = |h: f64| {
        let step = h * x.z;
        let at = |dx: f64, dy: f64, dz: f64| {
            f(&PointUHS::new_unchecked(x.x + dx, x.y + dy, x.z + dz))
        };
        let c = f(x);
        let fxx = at(step, 0.0, 0.0) - 2.0 * c + at(-step, 0.0, 0.0);
        let fyy = at(0.0, step, 0.0) - 2.0 * c + at(0.0, -step, 0.0);
        let fzp = at(0.0, 0.0, step);
        let fzm = at(0.0, 0.0, -step);
        let fzz = fzp - 2.0 * c + fzm;
        let fz = (fzp - fzm) / (2.0 * step);
        x.z * x.z * (fxx + fyy + fzz) / (step * step) - x.z * fz
    };
    let coarse = apply(h);
    let fine = apply(h / 2.0);
    (4.0 * fine - coarse) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn pt(x: f64, y: f64, z: f64) -> PointUHS {
        PointUHS::new(x, y, z).unwrap()
    }

    #[test]
    fn distance_examples() {
        let o = PointUHS::origin();
        assert_eq!(dist(&o, &o), 0.0);
        assert!((dist(&o, &pt(0.0, 0.0, E)) - 1.0).abs() < 1e-15);
        assert!((dist(&pt(1.0, 0.0, 1.0), &o) - 1.5f64.acosh()).abs() < 1e-14);
    }

    #[test]
    fn invalid_points_are_rejected() {
        assert!(PointUHS::new(0.0, 0.0, 0.0).is_err());
        assert!(PointUHS::new(0.0, 0.0, -1.0).is_err());
        assert!(PointUHS::new(f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn busemann_examples() {
        let o = PointUHS::origin();
        assert!((busemann(ExtComplex::Infinity, &o, &pt(0.0, 0.0, E * E)) - 2.0).abs() < 1e-14);
        let u0 = ExtComplex::finite(0.0, 0.0);
        assert!((busemann(u0, &o, &pt(0.0, 0.0, E)) + 1.0).abs() < 1e-14);
        let u = ExtComplex::finite(0.3, -2.0);
        let base = pt(0.5, 0.1, 0.7);
        assert_eq!(busemann(u, &base, &base), 0.0);
        assert_eq!(horospherical_height(u, &base, &base), 1.0);
    }

    #[test]
    fn green_examples() {
        assert!((green_of_distance(2f64.ln()) - 1.0 / 3.0).abs() < 1e-15);
        let p = pt(0.2, 0.1, 1.3);
        assert!(matches!(green(&p, &p), Err(Error::Pole(_))));
        let x = pt(0.4, 0.3, 1.1);
        assert!(green(&p, &x).unwrap() > 0.0);
    }

    #[test]
    fn potential_examples() {
        let o = PointUHS::origin();
        let x = pt(0.0, 0.0, 2.0); // ρ = log 2
        let v = MultiCenterPotential::new(0.5, vec![o], vec![1], 0.0).unwrap();
        assert!((potential(&v, &x).unwrap() - (0.5 + 1.0 / 3.0)).abs() < 1e-15);
        let flat = MultiCenterPotential::constant(1.0);
        assert_eq!(potential(&flat, &pt(3.0, -1.0, 0.2)).unwrap(), 1.0);
        assert!(potential(&v, &o).is_err());
    }

    #[test]
    fn potential_rejects_bad_configurations() {
        let o = PointUHS::origin();
        assert!(MultiCenterPotential::new(1.0, vec![o, o], vec![1, 1], 0.0).is_err());
        assert!(MultiCenterPotential::new(1.0, vec![o], vec![1, 2], 0.0).is_err());
        assert!(MultiCenterPotential::new(-1.0, vec![o], vec![1], 0.0).is_err());
        assert!(MultiCenterPotential::new(1.0, vec![o], vec![0], 0.0).is_err());
    }

    #[test]
    fn trapped_examples() {
        let centers = [pt(0.0, 0.0, 0.5), pt(0.0, 0.0, 2.0)];
        assert!(is_geodesically_trapped(&PointUHS::origin(), &centers));
        assert!(!is_geodesically_trapped(&pt(5.0, 0.0, 1.0), &centers));
        assert!(!is_geodesically_trapped(&PointUHS::origin(), &centers[..1]));
    }

    #[test]
    fn vertical_axis_parameterisation() {
        let gamma = OrientedGeodesic::vertical_axis();
        for t in [-2.0, 0.0, 0.7, 3.0] {
            let p = geodesic_point(&gamma, &PointUHS::origin(), t);
            assert!(p.x.abs() < 1e-14 && p.y.abs() < 1e-14);
            assert!((p.z - f64::exp(t)).abs() < 1e-12 * f64::exp(t));
        }
    }

    #[test]
    fn geodesic_through_base_passes_through_it() {
        let base = pt(0.3, -0.4, 0.8);
        let gamma = OrientedGeodesic::through(&base, ExtComplex::finite(2.0, 1.0));
        let p0 = geodesic_point(&gamma, &base, 0.0);
        assert!(dist(&p0, &base) < 1e-12);
        // moves toward the end point
        let far = geodesic_point(&gamma, &base, 25.0);
        assert!((far.w() - C64::new(2.0, 1.0)).norm() < 1e-6);
    }

    #[test]
    fn doubled_charges() {
        let v = MultiCenterPotential::for_mass(1.0, vec![PointUHS::origin()], vec![3]).unwrap();
        assert_eq!(v.lambda(), 3.0);
        assert_eq!(v.doubled().charges(), &[6]);
        assert_eq!(v.total_charge(), 3);
    }
}
