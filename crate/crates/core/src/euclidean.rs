//! Mini-twistor space `TP¹` of oriented lines in `R³`.
//!
//! A point `(ζ, η)` is the line with direction
//! `d(ζ) = (2 Re ζ, 2 Im ζ, |ζ|² - 1)/(1 + |ζ|²)` and closest point to the
//! origin `Re{η̄ (1 - ζ², i(1 + ζ²), 2ζ)}/(1 + |ζ|²)²`. Equivalently
//! `η = x·(1 - ζ², i(1 + ζ²), 2ζ)` for any point `x` on the line.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::ExtComplex;
use crate::poly;
use crate::twistor::StepScalar;
use crate::C64;

/// `(ζ, η)`; when `ζ = ∞` the fibre value is `η̃ = η/ζ²` of the chart at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiniTwistorPoint {
    pub zeta: ExtComplex,
    pub eta: C64,
}

impl MiniTwistorPoint {
    pub fn finite(zeta: C64, eta: C64) -> Self {
        MiniTwistorPoint { zeta: ExtComplex::Finite(zeta), eta }
    }

    /// Coordinates in the chart `(ζ̃, η̃) = (1/ζ, η/ζ²)`, if `ζ ≠ 0`.
    pub fn chart_at_infinity(&self) -> Option<(C64, C64)> {
        match self.zeta {
            ExtComplex::Infinity => Some((C64::new(0.0, 0.0), self.eta)),
            ExtComplex::Finite(z) if z.norm() == 0.0 => None,
            ExtComplex::Finite(z) => Some((1.0 / z, self.eta / (z * z))),
        }
    }
}

/// The real structure `(ζ, η) ↦ (-1/ζ̄, -η̄/ζ̄²)`, reversing orientation.
pub fn tau_t(p: &MiniTwistorPoint) -> MiniTwistorPoint {
    match p.zeta {
        // In the chart at infinity the map has the same form, so (0, η) ↔ (∞, -η̄).
        ExtComplex::Infinity => MiniTwistorPoint::finite(C64::new(0.0, 0.0), -p.eta.conj()),
        ExtComplex::Finite(z) if z.norm() == 0.0 => {
            MiniTwistorPoint { zeta: ExtComplex::Infinity, eta: -p.eta.conj() }
        }
        ExtComplex::Finite(z) => {
            let zb = z.conj();
            MiniTwistorPoint::finite(-1.0 / zb, -p.eta.conj() / (zb * zb))
        }
    }
}

/// The `dζ̄` component of `θ^{0,1}`: `2η/(1 + |ζ|²)²`.
pub fn theta01_t(zeta: C64, eta: C64) -> C64 {
    2.0 * eta / (1.0 + zeta.norm_sqr()).powi(2)
}

/// `ψ = η^k + a₁(ζ) η^{k-1} + … + a_k(ζ)`, with `deg aᵢ ≤ 2i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveO2k {
    /// `coeffs[i-1]` holds the ascending coefficients of `aᵢ`, of length `2i + 1`.
    coeffs: Vec<Vec<C64>>,
}

impl CurveO2k {
    pub fn new(coeffs: Vec<Vec<C64>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Precondition("curve needs k ≥ 1".into()));
        }
        for (idx, a) in coeffs.iter().enumerate() {
            let i = idx + 1;
            if a.len() != 2 * i + 1 {
                return Err(Error::Precondition(format!(
                    "a_{i} must have {} coefficients, got {}",
                    2 * i + 1,
                    a.len()
                )));
            }
        }
        Ok(CurveO2k { coeffs })
    }

    pub fn k(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Vec<C64>] {
        &self.coeffs
    }

    pub fn a(&self, i: usize, zeta: C64) -> C64 {
        poly::eval(&self.coeffs[i - 1], zeta)
    }

    /// `ψ(ζ, η)`.
    pub fn eval(&self, zeta: C64, eta: C64) -> C64 {
        poly::eval(&self.eta_polynomial(zeta), eta)
    }

    /// Coefficients in `η` (ascending) of `ψ(ζ, ·)`.
    pub fn eta_polynomial(&self, zeta: C64) -> Vec<C64> {
        let k = self.k();
        let mut out = vec![C64::new(0.0, 0.0); k + 1];
        out[k] = C64::new(1.0, 0.0);
        for i in 1..=k {
            out[k - i] = self.a(i, zeta);
        }
        out
    }

    /// Image under the real structure: `aᵢ ↦ (-1)^i ζ^{2i} conj(aᵢ(-1/ζ̄))`, i.e.
    /// `c_m ↦ (-1)^{i+m} conj(c_{2i-m})`.
    pub fn real_conjugate(&self) -> CurveO2k {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, a)| {
                let i = idx + 1;
                (0..=2 * i)
                    .map(|m| {
                        let sign = if (i + m) % 2 == 0 { 1.0 } else { -1.0 };
                        a[2 * i - m].conj() * sign
                    })
                    .collect()
            })
            .collect();
        CurveO2k { coeffs }
    }

    pub fn reality_defect(&self) -> f64 {
        let conj = self.real_conjugate();
        self.coeffs
            .iter()
            .flatten()
            .zip(conj.coeffs.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.reality_defect() <= tol
    }

    /// Coefficients in the chart at infinity: `ãᵢ(ζ̃) = ζ̃^{2i} aᵢ(1/ζ̃)`.
    pub fn chart_at_infinity(&self) -> CurveO2k {
        CurveO2k { coeffs: self.coeffs.iter().map(|a| a.iter().rev().copied().collect()).collect() }
    }

    /// The `k` values of `η` over `ζ`; fails near a branch point.
    pub fn sheets_over(&self, zeta: C64, separation: f64) -> Result<Vec<C64>> {
        let roots = poly::roots(&self.eta_polynomial(zeta))?;
        for i in 0..roots.len() {
            for j in (i + 1)..roots.len() {
                if (roots[i] - roots[j]).norm() < separation {
                    return Err(Error::Multiplicity(format!(
                        "sheets {i} and {j} meet over ζ = {zeta}"
                    )));
                }
            }
        }
        Ok(roots)
    }
}

/// `η_p(ζ) = (x₁ + i x₂) + 2x₃ ζ - (x₁ - i x₂) ζ²`.
pub fn charge1_eta(p: [f64; 3], zeta: C64) -> C64 {
    let w = C64::new(p[0], p[1]);
    w + 2.0 * p[2] * zeta - w.conj() * zeta * zeta
}

/// The curve `η = η_p(ζ)` of lines through `p`.
pub fn charge1_curve(p: [f64; 3]) -> CurveO2k {
    let w = C64::new(p[0], p[1]);
    CurveO2k { coeffs: vec![vec![-w, C64::new(-2.0 * p[2], 0.0), w.conj()]] }
}

/// The point `p` of a real charge-1 curve.
pub fn charge1_center(curve: &CurveO2k) -> Result<[f64; 3]> {
    if curve.k() != 1 {
        return Err(Error::Unsupported(format!("charge {} curves", curve.k())));
    }
    if !curve.is_real(1e-12) {
        return Err(Error::Precondition("curve is not real".into()));
    }
    let c = &curve.coeffs[0];
    Ok([-c[0].re, -c[0].im, -0.5 * c[1].re])
}

/// Nonvanishing holomorphic `u₀(ζ)`, `u₁(ζ̃)` trivialising `L²` on a charge-1
/// curve, with `u₁ = e^{-2η/ζ} u₀` on the overlap:
/// `u₀ = exp(2x₃ - 2(x₁ - i x₂)ζ)`, `u₁ = exp(-2x₃ - 2(x₁ + i x₂)ζ̃)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L2Trivialization {
    pub center: [f64; 3],
}

impl L2Trivialization {
    pub fn u0(&self, zeta: C64) -> C64 {
        let [x1, x2, x3] = self.center;
        (2.0 * x3 - 2.0 * C64::new(x1, -x2) * zeta).exp()
    }

    pub fn u1(&self, zeta_tilde: C64) -> C64 {
        let [x1, x2, x3] = self.center;
        (-2.0 * x3 - 2.0 * C64::new(x1, x2) * zeta_tilde).exp()
    }

    /// Exponent polynomial of `u₀` (ascending), for series expansion.
    pub fn u0_exponent(&self) -> [C64; 2] {
        let [x1, x2, x3] = self.center;
        [C64::new(2.0 * x3, 0.0), -2.0 * C64::new(x1, -x2)]
    }
}

pub fn l2_trivialization(curve: &CurveO2k) -> Result<L2Trivialization> {
    Ok(L2Trivialization { center: charge1_center(curve)? })
}

/// `L` has transition function `e^{-η/ζ}`, so `L^s` has `e^{-sη/ζ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LPatchBundle {
    pub s: f64,
}

impl LPatchBundle {
    /// Fibre value in the chart at infinity from the value in the finite chart.
    pub fn to_infinity_chart(&self, zeta: C64, eta: C64, value: C64) -> C64 {
        (-self.s * eta / zeta).exp() * value
    }

    pub fn to_finite_chart(&self, zeta: C64, eta: C64, value: C64) -> C64 {
        (self.s * eta / zeta).exp() * value
    }
}

/// Chart change of `L² \ 0`: `(ζ, η, u) ↦ (1/ζ, η/ζ², e^{η/ζ} u)`.
pub fn l2_patch_transition(zeta: C64, eta: C64, u: C64) -> Result<(C64, C64, C64)> {
    if zeta.norm() == 0.0 || u.norm() == 0.0 {
        return Err(Error::Chart(format!("transition undefined at ζ = {zeta}, u = {u}")));
    }
    Ok((1.0 / zeta, eta / (zeta * zeta), (eta / zeta).exp() * u))
}

/// Inverse chart change: `(ζ̃, η̃, ũ) ↦ (1/ζ̃, η̃/ζ̃², e^{-η̃/ζ̃} ũ)`.
pub fn l2_patch_transition_inverse(zt: C64, et: C64, ut: C64) -> Result<(C64, C64, C64)> {
    if zt.norm() == 0.0 || ut.norm() == 0.0 {
        return Err(Error::Chart(format!("transition undefined at ζ̃ = {zt}, ũ = {ut}")));
    }
    // η/ζ = (η̃ ζ²)/ζ = η̃/ζ̃
    Ok((1.0 / zt, et / (zt * zt), (-et / zt).exp() * ut))
}

/// Differential of [`l2_patch_transition`] applied to a tangent vector
/// `(δζ, δη, δu)`.
pub fn l2_patch_pushforward(zeta: C64, eta: C64, u: C64, v: [C64; 3]) -> Result<[C64; 3]> {
    let (_, _, ut) = l2_patch_transition(zeta, eta, u)?;
    let [dz, de, du] = v;
    let z2 = zeta * zeta;
    let dzt = -dz / z2;
    let det = de / z2 - 2.0 * eta * dz / (z2 * zeta);
    let dut = ut * (du / u + de / zeta - eta * dz / z2);
    Ok([dzt, det, dut])
}

pub fn line_direction(zeta: C64) -> [f64; 3] {
    let n = 1.0 + zeta.norm_sqr();
    [2.0 * zeta.re / n, 2.0 * zeta.im / n, (zeta.norm_sqr() - 1.0) / n]
}

/// `f(η, ζ) = Re{η̄ (1 - ζ², i(1 + ζ²), 2ζ)}/(1 + |ζ|²)²` in real coordinates
/// `(Re η, Im η, Re ζ, Im ζ)`.
pub fn closest_point_euc_components<T: StepScalar>(er: T, ei: T, zr: T, zi: T) -> [T; 3] {
    let one = T::from_f64(1.0);
    let two = T::from_f64(2.0);
    let zr2 = zr * zr;
    let zi2 = zi * zi;
    let den = (one + zr2 + zi2) * (one + zr2 + zi2);
    // real and imaginary parts of the three components of (1 - ζ², i(1 + ζ²), 2ζ)
    let v1 = (one - zr2 + zi2, T::from_f64(0.0) - two * zr * zi);
    let v2 = (T::from_f64(0.0) - two * zr * zi, one + zr2 - zi2);
    let v3 = (two * zr, two * zi);
    let re = |v: (T, T)| (er * v.0 + ei * v.1) / den;
    [re(v1), re(v2), re(v3)]
}

/// The point of the line `(ζ, η)` closest to the origin.
pub fn closest_point_euc(eta: C64, zeta: C64) -> [f64; 3] {
    closest_point_euc_components(eta.re, eta.im, zeta.re, zeta.im)
}

/// Wirtinger derivative `∂f/∂ζ̄` at `(η, ζ)` by complex-step differentiation.
pub fn closest_point_euc_dzbar(eta: C64, zeta: C64) -> [C64; 3] {
    const H: f64 = 1e-30;
    let step = C64::new(0.0, H);
    let r = |v: f64| C64::new(v, 0.0);
    let dr = closest_point_euc_components(r(eta.re), r(eta.im), r(zeta.re) + step, r(zeta.im));
    let di = closest_point_euc_components(r(eta.re), r(eta.im), r(zeta.re), r(zeta.im) + step);
    let i = C64::new(0.0, 1.0);
    [0, 1, 2].map(|k| 0.5 * (dr[k].im / H + i * di[k].im / H))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn real_structure_is_an_involution() {
        for p in [
            MiniTwistorPoint::finite(c(0.3, -0.7), c(1.2, 0.4)),
            MiniTwistorPoint::finite(c(0.0, 0.0), c(1.0, -2.0)),
            MiniTwistorPoint { zeta: ExtComplex::Infinity, eta: c(0.5, 0.5) },
        ] {
            let back = tau_t(&tau_t(&p));
            assert!(back.zeta.approx_eq(&p.zeta, 1e-15));
            assert!((back.eta - p.eta).norm() < 1e-15);
        }
        let z = tau_t(&MiniTwistorPoint::finite(c(2.0, 1.0), c(0.0, 0.0)));
        assert_eq!(z.eta, c(0.0, 0.0));
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta01_t(c(0.0, 0.0), c(1.0, 0.0)), c(2.0, 0.0));
        assert_eq!(theta01_t(c(0.4, 1.0), c(0.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn charge1_curve_at_origin_is_zero_section() {
        let curve = charge1_curve([0.0, 0.0, 0.0]);
        assert!(curve.coeffs()[0].iter().all(|c| c.norm() == 0.0));
        assert_eq!(curve.sheets_over(c(0.3, 0.2), 1e-9).unwrap(), vec![c(0.0, 0.0)]);
    }

    #[test]
    fn closest_point_examples() {
        assert_eq!(closest_point_euc(c(0.0, 0.0), c(0.5, -0.2)), [0.0, 0.0, 0.0]);
        assert_eq!(closest_point_euc(c(1.0, 0.0), c(0.0, 0.0)), [1.0, 0.0, 0.0]);
    }

    #[test]
    fn l2_trivialization_examples() {
        let t = l2_trivialization(&charge1_curve([0.0, 0.0, 0.0])).unwrap();
        assert_eq!(t.u0(c(0.3, 0.1)), c(1.0, 0.0));
        assert_eq!(t.u1(c(0.3, 0.1)), c(1.0, 0.0));
        let x3 = 0.7;
        let t = l2_trivialization(&charge1_curve([0.0, 0.0, x3])).unwrap();
        assert!((t.u0(c(0.5, 0.5)) - (2.0 * x3).exp()).norm() < 1e-14);
        assert!((t.u1(c(0.5, 0.5)) - (-2.0 * x3).exp()).norm() < 1e-14);
        let higher = CurveO2k::new(vec![vec![c(0.0, 0.0); 3], vec![c(0.0, 0.0); 5]]).unwrap();
        assert!(matches!(l2_trivialization(&higher), Err(Error::Unsupported(_))));
    }

    #[test]
    fn transition_rejects_bad_points() {
        assert!(l2_patch_transition(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)).is_err());
        assert!(l2_patch_transition(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)).is_err());
        let (_, _, u) = l2_patch_transition(c(0.3, 2.0), c(0.0, 0.0), c(1.5, -0.5)).unwrap();
        assert_eq!(u, c(1.5, -0.5));
    }
}
