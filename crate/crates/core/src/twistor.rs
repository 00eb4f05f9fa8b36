//! The twistor space of hyperbolic 3-space: oriented geodesics as points
//! `(z, w)` of `P¹×P¹` off the anti-diagonal `z = τ(w)`.
//!
//! Conventions: a geodesic running from `start` to `end` on the sphere at
//! infinity has `z = end` and `w = τ(start)`, both read in the boundary chart of
//! the upper half-space. The diagonal `z = w` is then the set of geodesics
//! through `O = (0, 0, 1)`.

use std::f64::consts::PI;
use std::ops::{Add, Div, Mul, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::{ExtComplex, Mobius};
use crate::hyperbolic::{MultiCenterPotential, OrientedGeodesic, PointUHS};
use crate::quadrature::gauss_legendre;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwistorPoint {
    pub z: ExtComplex,
    pub w: ExtComplex,
}

impl TwistorPoint {
    pub fn new(z: ExtComplex, w: ExtComplex) -> Result<Self> {
        if z.approx_eq(&w.tau(), 1e-14) {
            return Err(Error::AntiDiagonal);
        }
        Ok(TwistorPoint { z, w })
    }

    pub fn finite(z: C64, w: C64) -> Result<Self> {
        TwistorPoint::new(ExtComplex::Finite(z), ExtComplex::Finite(w))
    }

    pub fn from_geodesic(g: &OrientedGeodesic) -> Self {
        TwistorPoint { z: g.end, w: g.start.tau() }
    }

    pub fn geodesic(&self) -> OrientedGeodesic {
        OrientedGeodesic { start: self.w.tau(), end: self.z }
    }

    pub fn is_on_diagonal(&self, tol: f64) -> bool {
        self.z.approx_eq(&self.w, tol)
    }
}

/// The real structure: reverse the orientation of the geodesic.
pub fn sigma(p: &TwistorPoint) -> TwistorPoint {
    TwistorPoint { z: p.w.tau(), w: p.z.tau() }
}

/// Components `(θ_z̄, θ_w̄)` of `θ^{0,1} = θ_z̄ dz̄ + θ_w̄ dw̄` in the finite chart.
pub fn theta01(z: C64, w: C64) -> Result<[C64; 2]> {
    let den_z = (1.0 + z.norm_sqr()) * (1.0 + z.conj() * w);
    let den_w = (1.0 + w.norm_sqr()) * (1.0 + z * w.conj());
    if (1.0 + z.conj() * w).norm() < 1e-300 || (1.0 + z * w.conj()).norm() < 1e-300 {
        return Err(Error::AntiDiagonal);
    }
    Ok([(z - w) / den_z, (z - w) / den_w])
}

/// A polynomial section `Σ c_{jk} z^j w^k` of `O(a, b)` in the finite chart.
#[derive(Debug, Clone, PartialEq)]
pub struct BiDegreeSection {
    coeffs: DMatrix<C64>,
}

impl BiDegreeSection {
    /// `coeffs[(j, k)]` multiplies `z^j w^k`; the shape is `(a + 1) × (b + 1)`.
    pub fn from_coeffs(coeffs: DMatrix<C64>) -> Self {
        BiDegreeSection { coeffs }
    }

    pub fn one() -> Self {
        BiDegreeSection { coeffs: DMatrix::from_element(1, 1, C64::new(1.0, 0.0)) }
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.coeffs.nrows() - 1, self.coeffs.ncols() - 1)
    }

    pub fn coeffs(&self) -> &DMatrix<C64> {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize, k: usize) -> C64 {
        self.coeffs[(j, k)]
    }

    pub fn eval(&self, z: C64, w: C64) -> C64 {
        let (a, b) = self.degrees();
        let mut total = C64::new(0.0, 0.0);
        let mut zp = C64::new(1.0, 0.0);
        for j in 0..=a {
            let mut wp = C64::new(1.0, 0.0);
            for k in 0..=b {
                total += self.coeffs[(j, k)] * zp * wp;
                wp *= w;
            }
            zp *= z;
        }
        total
    }

    /// Evaluation in the chart `(z̃, w̃) = (1/z, 1/w)`: coefficient reversal.
    pub fn chart_at_infinity(&self) -> BiDegreeSection {
        let (a, b) = self.degrees();
        let coeffs = DMatrix::from_fn(a + 1, b + 1, |j, k| self.coeffs[(a - j, b - k)]);
        BiDegreeSection { coeffs }
    }

    pub fn mul(&self, other: &BiDegreeSection) -> BiDegreeSection {
        let (a1, b1) = self.degrees();
        let (a2, b2) = other.degrees();
        let mut coeffs = DMatrix::from_element(a1 + a2 + 1, b1 + b2 + 1, C64::new(0.0, 0.0));
        for j1 in 0..=a1 {
            for k1 in 0..=b1 {
                let c1 = self.coeffs[(j1, k1)];
                for j2 in 0..=a2 {
                    for k2 in 0..=b2 {
                        coeffs[(j1 + j2, k1 + k2)] += c1 * other.coeffs[(j2, k2)];
                    }
                }
            }
        }
        BiDegreeSection { coeffs }
    }

    pub fn pow(&self, n: u32) -> BiDegreeSection {
        (0..n).fold(BiDegreeSection::one(), |acc, _| acc.mul(self))
    }

    pub fn scale(&self, c: C64) -> BiDegreeSection {
        BiDegreeSection { coeffs: self.coeffs.map(|x| x * c) }
    }

    /// Image under the real structure induced by `σ` on `O(l, l)`:
    /// `c_{l-n, l-m} ↦ (-1)^{l+m+n} conj(c_{mn})`, so that
    /// `p(σ(q)) (z̄ w̄)^l = (-1)^l conj(p(q))` for fixed points.
    pub fn sigma_conjugate(&self) -> Result<BiDegreeSection> {
        let (a, b) = self.degrees();
        if a != b {
            return Err(Error::Precondition(format!(
                "real structure needs equal bidegree, got ({a}, {b})"
            )));
        }
        let l = a;
        let coeffs = DMatrix::from_fn(l + 1, l + 1, |j, k| {
            // (j, k) = (l - n, l - m)
            let n = l - j;
            let m = l - k;
            let sign = if (l + m + n) % 2 == 0 { 1.0 } else { -1.0 };
            self.coeffs[(m, n)].conj() * sign
        });
        Ok(BiDegreeSection { coeffs })
    }

    /// Largest coefficient discrepancy from being fixed by the real structure.
    pub fn sigma_reality_defect(&self) -> Result<f64> {
        let conj = self.sigma_conjugate()?;
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
        Ok((&conj.coeffs - &self.coeffs).iter().map(|c| c.norm()).fold(0.0, f64::max) / scale)
    }

    /// Fix the overall phase: the first nonzero coefficient of `z^m w^{l-m}`
    /// (scanning `m = l, l-1, …, 0`) is made real positive.
    pub fn sigma_normalized(&self) -> BiDegreeSection {
        let (a, b) = self.degrees();
        if a == b {
            for m in (0..=a).rev() {
                let c = self.coeffs[(m, a - m)];
                if c.norm() > 1e-14 {
                    return self.scale(C64::from_polar(1.0, -c.arg()));
                }
            }
        }
        self.clone()
    }
}

/// The `(1,1)` section vanishing exactly on the twistor line of `x = (a, s)`:
/// `z + ā z w - (|a|² + s²) w - a`.
pub fn twistor_line_section(x: &PointUHS) -> BiDegreeSection {
    let a = x.w();
    let r = a.norm_sqr() + x.z * x.z;
    let coeffs = DMatrix::from_row_slice(
        2,
        2,
        &[-a, C64::new(-r, 0.0), C64::new(1.0, 0.0), a.conj()],
    );
    BiDegreeSection { coeffs }
}

/// `p̃ = Π p̃_{pᵢ}^{lᵢ}`, a σ-real section of `O(l, l)`.
pub fn ptilde(v: &MultiCenterPotential) -> BiDegreeSection {
    v.centers()
        .iter()
        .zip(v.charges())
        .fold(BiDegreeSection::one(), |acc, (p, &l)| acc.mul(&twistor_line_section(p).pow(l)))
}

/// Minimal scalar interface shared by `f64` and `C64`, so that the closest-point
/// map can be differentiated by the complex-step method.
pub trait StepScalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn sqrt(self) -> Self;
}

impl StepScalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

impl StepScalar for C64 {
    fn from_f64(x: f64) -> Self {
        C64::new(x, 0.0)
    }
    fn sqrt(self) -> Self {
        C64::sqrt(self)
    }
}

/// The closest point to `O` on the geodesic `(z, w)`, as a function of the
/// real coordinates `(Re z, Im z, Re w, Im w)`. Returns `(f_x, f_y, f_u)`.
pub fn closest_point_components<T: StepScalar>(zr: T, zi: T, wr: T, wi: T) -> [T; 3] {
    let one = T::from_f64(1.0);
    let two = T::from_f64(2.0);
    let z2 = zr * zr + zi * zi;
    let w2 = wr * wr + wi * wi;
    let mu = one / (one + two * w2 + z2 * w2);
    // 1 + z w̄
    let re = one + zr * wr + zi * wi;
    let im = zi * wr - zr * wi;
    let abs = (re * re + im * im).sqrt();
    let fx = mu * ((one + w2) * zr - (one + z2) * wr);
    let fy = mu * ((one + w2) * zi - (one + z2) * wi);
    let fu = mu * ((one + z2) * (one + w2)).sqrt() * abs;
    [fx, fy, fu]
}

/// Closest point to `O` on the geodesic represented by `p`.
///
/// Points with an infinite coordinate are first rotated about `O` into the
/// finite chart.
pub fn closest_point(p: &TwistorPoint) -> PointUHS {
    match (p.z, p.w) {
        (ExtComplex::Finite(z), ExtComplex::Finite(w)) => {
            let [fx, fy, fu] = closest_point_components(z.re, z.im, w.re, w.im);
            PointUHS { x: fx, y: fy, z: fu }
        }
        _ => {
            // A rotation about O sending a point far from both coordinates to ∞.
            let candidates = [
                ExtComplex::finite(1.0, 0.0),
                ExtComplex::finite(-1.0, 0.0),
                ExtComplex::finite(0.0, 1.0),
            ];
            let u = candidates
                .into_iter()
                .max_by(|a, b| {
                    let da = a.chordal_distance(&p.z).min(a.chordal_distance(&p.w));
                    let db = b.chordal_distance(&p.z).min(b.chordal_distance(&p.w));
                    da.total_cmp(&db)
                })
                .expect("nonempty");
            let rot = Mobius::rotation_to_infinity(u);
            let rotated = TwistorPoint { z: rot.apply(p.z), w: rot.apply(p.w) };
            let image = closest_point(&rotated);
            rot.inverse().apply_point(&image)
        }
    }
}

/// `cosh` of the distance from `O` to the geodesic `(z, w)`.
pub fn cosh_rho_endpoints(z: C64, w: C64) -> Result<f64> {
    let den = (1.0 + z * w.conj()).norm();
    if den < 1e-300 {
        return Err(Error::AntiDiagonal);
    }
    Ok(((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt() / den)
}

/// Wirtinger derivatives of the closest-point map at `(z, w)`, by complex-step
/// differentiation. Row `a` is the component `f_x, f_y, f_u`; columns are
/// `∂/∂z, ∂/∂z̄, ∂/∂w, ∂/∂w̄`.
pub fn closest_point_wirtinger(z: C64, w: C64) -> [[C64; 4]; 3] {
    const H: f64 = 1e-30;
    let base = [z.re, z.im, w.re, w.im];
    let mut partial = [[0.0f64; 4]; 3];
    for var in 0..4 {
        let mut args = base.map(|v| C64::new(v, 0.0));
        args[var] += C64::new(0.0, H);
        let out = closest_point_components(args[0], args[1], args[2], args[3]);
        for comp in 0..3 {
            partial[comp][var] = out[comp].im / H;
        }
    }
    let i = C64::new(0.0, 1.0);
    let mut out = [[C64::new(0.0, 0.0); 4]; 3];
    for comp in 0..3 {
        let [dzr, dzi, dwr, dwi] = partial[comp];
        out[comp][0] = 0.5 * (dzr - i * dzi);
        out[comp][1] = 0.5 * (dzr + i * dzi);
        out[comp][2] = 0.5 * (dwr - i * dwi);
        out[comp][3] = 0.5 * (dwr + i * dwi);
    }
    out
}

/// The closed-form matrix of derivatives `(∂/∂z, ∂/∂z̄, ∂/∂w̄)` of the closest
/// point map on the diagonal `(z, z)`.
pub fn diagonal_jacobian_closed_form(z: C64) -> [[C64; 3]; 3] {
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    let s = 1.0 / (2.0 * (1.0 + z.norm_sqr()).powi(2));
    let zb = z.conj();
    [
        [(one - zb * zb) * s, (one - z * z) * s, (z * z - one) * s],
        [-i * (one + zb * zb) * s, i * (one + z * z) * s, -i * (one + z * z) * s],
        [2.0 * zb * s, 2.0 * z * s, -2.0 * z * s],
    ]
}

/// Coefficients `(a₂, a₄)` of `dz∧dw̄` and `dz∧dz̄` in the pull-back through the
/// closest-point map of the constant 2-form `Σ_{a<b} ω_ab dX^a∧dX^b`
/// (`X = (x, y, u)`), evaluated at `(z, w)`.
pub fn pullback_a2_a4(z: C64, w: C64, omega: &[[f64; 3]; 3]) -> (C64, C64) {
    let d = closest_point_wirtinger(z, w);
    let mut a2 = C64::new(0.0, 0.0);
    let mut a4 = C64::new(0.0, 0.0);
    for a in 0..3 {
        for b in (a + 1)..3 {
            let c = omega[a][b];
            // df^a ∧ df^b, coefficient of dz∧dw̄ and of dz∧dz̄
            a2 += c * (d[a][0] * d[b][3] - d[a][3] * d[b][0]);
            a4 += c * (d[a][0] * d[b][1] - d[a][1] * d[b][0]);
        }
    }
    (a2, a4)
}

/// `∫_C 2/(1+|ζ|²)² dζ∧dζ̄` with the orientation giving `+4πi`.
///
/// `dζ∧dζ̄ = -2i dx∧dy` in the standard orientation of `C`; the sign is taken
/// with respect to the opposite orientation (`dζ̄∧dζ`), so the result is the
/// positive multiple of `i`.
pub fn gamma_l_integral() -> C64 {
    gamma_l_integral_truncated(f64::INFINITY, 64, 16)
}

/// The same integral over the disc `|ζ| < radius`, with a tensor-product rule of
/// `radial` Gauss–Legendre nodes (in `s = atan r`) and `angular` trapezoid nodes.
pub fn gamma_l_integral_truncated(radius: f64, radial: usize, angular: usize) -> C64 {
    let s_max = radius.atan();
    let (x, w) = gauss_legendre(radial);
    let mut total = 0.0;
    for k in 0..angular {
        let alpha = 2.0 * PI * k as f64 / angular as f64;
        let weight_alpha = 2.0 * PI / angular as f64;
        for (xi, wi) in x.iter().zip(&w) {
            let s = 0.5 * s_max * (xi + 1.0);
            let r = s.tan();
            let zeta = C64::from_polar(r, alpha);
            let integrand = gamma_l_integrand(zeta);
            // dx dy = r dr dα, dr = sec² s ds
            let jac = r / s.cos().powi(2);
            total += weight_alpha * 0.5 * s_max * wi * integrand * jac;
        }
    }
    C64::new(0.0, 2.0 * total)
}

pub fn gamma_l_integrand(zeta: C64) -> f64 {
    2.0 / (1.0 + zeta.norm_sqr()).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn sigma_is_an_involution_and_preserves_the_diagonal() {
        let p = TwistorPoint::finite(c(0.3, 1.1), c(-0.7, 0.2)).unwrap();
        let back = sigma(&sigma(&p));
        assert!(back.z.approx_eq(&p.z, 1e-14) && back.w.approx_eq(&p.w, 1e-14));
        let d = TwistorPoint::finite(c(0.4, -0.5), c(0.4, -0.5)).unwrap();
        assert!(sigma(&d).is_on_diagonal(1e-14));
    }

    #[test]
    fn sigma_reverses_the_vertical_axis() {
        let axis = TwistorPoint::from_geodesic(&OrientedGeodesic::vertical_axis());
        let rev = sigma(&axis).geodesic();
        assert!(rev.start.is_infinite());
        assert!(rev.end.approx_eq(&ExtComplex::finite(0.0, 0.0), 1e-15));
    }

    #[test]
    fn antidiagonal_is_rejected() {
        let z = c(0.5, 0.5);
        assert!(TwistorPoint::finite(z, -1.0 / z.conj()).is_err());
        assert!(theta01(z, -1.0 / z.conj()).is_err());
        assert!(cosh_rho_endpoints(z, -1.0 / z.conj()).is_err());
    }

    #[test]
    fn theta_vanishes_on_diagonal_and_blows_up_at_antidiagonal() {
        let z = c(0.3, -0.8);
        assert_eq!(theta01(z, z).unwrap(), [c(0.0, 0.0); 2]);
        let anti = -1.0 / z.conj();
        let near = theta01(z, anti * (1.0 + 1e-6)).unwrap();
        let far = theta01(z, anti * 1.5).unwrap();
        assert!(near[0].norm() + near[1].norm() > 1e4 * (far[0].norm() + far[1].norm()));
    }

    #[test]
    fn twistor_line_sections_of_axis_points() {
        let o = twistor_line_section(&PointUHS::origin());
        assert_eq!(o.eval(c(2.0, 1.0), c(2.0, 1.0)), c(0.0, 0.0));
        assert_eq!(o.coeff(1, 0), c(1.0, 0.0));
        assert_eq!(o.coeff(0, 1), c(-1.0, 0.0));
        assert_eq!(o.coeff(0, 0), c(0.0, 0.0));
        assert_eq!(o.coeff(1, 1), c(0.0, 0.0));
        // x at height e^{-ρ}: P_x = {z = e^{-2ρ} w}
        let rho = 0.8f64;
        let x = PointUHS::new(0.0, 0.0, (-rho).exp()).unwrap();
        let s = twistor_line_section(&x);
        assert!((s.coeff(0, 1) + (-2.0 * rho).exp()).norm() < 1e-15);
        assert_eq!(s.coeff(1, 0), c(1.0, 0.0));
    }

    #[test]
    fn ptilde_powers() {
        let o = PointUHS::origin();
        let v2 = MultiCenterPotential::new(1.0, vec![o], vec![2], 0.0).unwrap();
        let p = ptilde(&v2);
        assert_eq!(p.degrees(), (2, 2));
        // (z - w)² = z² - 2zw + w²
        assert_eq!(p.coeff(2, 0), c(1.0, 0.0));
        assert_eq!(p.coeff(1, 1), c(-2.0, 0.0));
        assert_eq!(p.coeff(0, 2), c(1.0, 0.0));
    }

    #[test]
    fn sections_of_points_are_sigma_real() {
        let x = PointUHS::new(0.4, -1.3, 0.6).unwrap();
        let s = twistor_line_section(&x);
        assert!(s.sigma_reality_defect().unwrap() < 1e-15);
        let v = MultiCenterPotential::new(
            1.0,
            vec![x, PointUHS::new(-0.2, 0.1, 2.0).unwrap()],
            vec![2, 1],
            0.0,
        )
        .unwrap();
        let p = ptilde(&v);
        assert!(p.sigma_reality_defect().unwrap() < 1e-14);
        let rotated = p.scale(C64::from_polar(1.0, 0.7));
        assert!(rotated.sigma_reality_defect().unwrap() > 0.1);
        assert!(rotated.sigma_normalized().sigma_reality_defect().unwrap() < 1e-14);
    }

    #[test]
    fn closest_point_examples() {
        let z = c(0.7, -0.2);
        let p = closest_point(&TwistorPoint::finite(z, z).unwrap());
        assert!((p.x).abs() < 1e-15 && p.y.abs() < 1e-15 && (p.z - 1.0).abs() < 1e-15);
        let q = closest_point(&TwistorPoint::finite(c(1.0, 0.0), c(0.0, 0.0)).unwrap());
        assert!((q.x - 1.0).abs() < 1e-15 && q.y.abs() < 1e-15);
        assert!((q.z - 2f64.sqrt()).abs() < 1e-15);
        let cosh = crate::hyperbolic::cosh_dist(&q, &PointUHS::origin());
        assert!((cosh - 2f64.sqrt()).abs() < 1e-14);
        assert!((cosh_rho_endpoints(c(1.0, 0.0), c(0.0, 0.0)).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(cosh_rho_endpoints(c(0.0, 0.0), c(0.0, 0.0)).unwrap(), 1.0);
    }

    #[test]
    fn closest_point_in_chart_at_infinity() {
        // vertical line above 1: z = ∞?  No: start = 1, end = ∞ gives z = ∞, w = τ(1) = -1.
        let g = OrientedGeodesic::new(ExtComplex::finite(1.0, 0.0), ExtComplex::Infinity).unwrap();
        let p = closest_point(&TwistorPoint::from_geodesic(&g));
        assert!((p.x - 1.0).abs() < 1e-12 && p.y.abs() < 1e-12);
        assert!((p.z - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn gamma_l_integrand_and_value() {
        assert_eq!(gamma_l_integrand(c(0.0, 0.0)), 2.0);
        let v = gamma_l_integral();
        assert!(v.re.abs() < 1e-14);
        assert!((v.im - 4.0 * PI).abs() < 1e-10);
    }
}
