//! Charge-1 spectral data of singular hyperbolic monopoles.
//!
//! A twistor line `P_q` is identified with `P¹` by sending `ζ` to the geodesic
//! through `q` whose end, read in a frame `F` with `F(q) = O`, is `ζ`. In that
//! frame `p̃` restricts to a product of σ-real quadratics `aζ² + 2bζ - ā`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::{ExtComplex, Mobius};
use crate::hyperbolic::{MultiCenterPotential, OrientedGeodesic, PointUHS};
use crate::poly;
use crate::twistor::{ptilde, twistor_line_section, BiDegreeSection};
use crate::C64;

/// `aζ² + 2bζ - ā`, scaled so that `b² + |a|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticRestriction {
    pub a: C64,
    pub b: f64,
}

impl QuadraticRestriction {
    pub fn discriminant(&self) -> f64 {
        4.0 * (self.b * self.b + self.a.norm_sqr())
    }

    /// `Δ = √(b² + |a|²)`, always the positive branch.
    pub fn delta(&self) -> f64 {
        (self.b * self.b + self.a.norm_sqr()).sqrt()
    }

    pub fn coeffs(&self) -> [C64; 3] {
        [-self.a.conj(), C64::new(2.0 * self.b, 0.0), self.a]
    }

    pub fn eval(&self, zeta: C64) -> C64 {
        poly::eval(&self.coeffs(), zeta)
    }

    /// `(α, β) = ((-b + Δ)/a, (-b - Δ)/a)`; `β = τ(α)`.
    pub fn roots(&self) -> Result<(C64, C64)> {
        if self.a.norm() < 1e-12 {
            return Err(Error::ChartRotationRequired { index: 0 });
        }
        let d = self.delta();
        Ok(((-self.b + d) / self.a, (-self.b - d) / self.a))
    }
}

/// Restriction of a σ-real `(1,1)` section to the twistor line of `q`.
///
/// The geodesic with end `w_q + z_q ζ` and start `w_q + z_q τ(ζ)` has twistor
/// coordinates `(w_q + z_q ζ, ζ/(z_q - w̄_q ζ))`; clearing the pole of the second
/// gives a quadratic in `ζ`.
pub fn restrict_to_line(section: &BiDegreeSection, q: &PointUHS) -> Result<QuadraticRestriction> {
    if section.degrees() != (1, 1) {
        return Err(Error::Precondition(format!(
            "expected a (1,1) section, got {:?}",
            section.degrees()
        )));
    }
    let c = q.w();
    let s = q.z;
    let [c00, c10, c01, c11] =
        [section.coeff(0, 0), section.coeff(1, 0), section.coeff(0, 1), section.coeff(1, 1)];
    let q0 = s * (c00 + c10 * c);
    let q1 = -c00 * c.conj() + c10 * (s * s - c.norm_sqr()) + c01 + c11 * c;
    let q2 = s * (c11 - c10 * c.conj());
    let scale = q0.norm().max(q1.norm()).max(q2.norm());
    if scale == 0.0 {
        return Err(Error::DegenerateRestriction);
    }
    if q1.im.abs() > 1e-10 * scale || (q0 + q2.conj()).norm() > 1e-10 * scale {
        return Err(Error::InvariantViolation(
            "restriction is not of the real form aζ² + 2bζ - ā".into(),
        ));
    }
    let raw = QuadraticRestriction { a: q2, b: 0.5 * q1.re };
    let d = raw.delta();
    if d <= 1e-12 * (1.0 + s * s + c.norm_sqr()) {
        return Err(Error::DegenerateRestriction);
    }
    Ok(QuadraticRestriction { a: raw.a / d, b: raw.b / d })
}

/// The factorisation `p̃|_{P_q} = x·y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorPair {
    /// Coefficients of `x`, ascending.
    pub x: Vec<C64>,
    /// Coefficients of `y`, ascending.
    pub y: Vec<C64>,
    pub phase: C64,
    /// Roots of `x` with multiplicities.
    pub alphas: Vec<(C64, u32)>,
    /// Roots of `y` with multiplicities.
    pub betas: Vec<(C64, u32)>,
    pub a_abs_sq: f64,
}

/// `y*(ζ) = ζ^l conj(y(τζ))` on coefficients: `(y*)_j = (-1)^{l-j} conj(y_{l-j})`.
pub fn antipodal_conjugate(y: &[C64]) -> Vec<C64> {
    let l = y.len() - 1;
    (0..=l)
        .map(|j| {
            let sign = if (l - j) % 2 == 0 { 1.0 } else { -1.0 };
            y[l - j].conj() * sign
        })
        .collect()
}

/// `x = A Π(ζ - αᵢ)^{lᵢ}`, `y = B Π(ζ - βᵢ)^{lᵢ}`, with `AB = Π aᵢ^{lᵢ}` and the
/// modulus of `A` forced by `x = y*`: `|A|² = Π (bᵢ + Δᵢ)^{lᵢ}`.
pub fn factor(quadratics: &[QuadraticRestriction], charges: &[u32], phase: C64) -> Result<FactorPair> {
    if quadratics.len() != charges.len() {
        return Err(Error::InvariantViolation(format!(
            "{} quadratics but {} charges",
            quadratics.len(),
            charges.len()
        )));
    }
    if (phase.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!("phase {phase} is not unit modulus")));
    }
    let mut alphas = Vec::with_capacity(quadratics.len());
    let mut betas = Vec::with_capacity(quadratics.len());
    let mut a_abs_sq = 1.0;
    let mut alpha_prod = C64::new(1.0, 0.0);
    for (index, (qd, &l)) in quadratics.iter().zip(charges).enumerate() {
        if !(qd.discriminant() > 0.0) || !qd.a.is_finite() || !qd.b.is_finite() {
            return Err(Error::InvariantViolation(format!("quadratic {index} is degenerate")));
        }
        let (alpha, beta) = qd.roots().map_err(|_| Error::ChartRotationRequired { index })?;
        alphas.push((alpha, l));
        betas.push((beta, l));
        a_abs_sq *= (qd.b + qd.delta()).powi(l as i32);
        alpha_prod *= alpha.conj().powu(l);
    }
    let a_coef = phase * a_abs_sq.sqrt();
    let b_coef = a_coef.conj() * alpha_prod;
    let expand = |lead: C64, roots: &[(C64, u32)]| {
        let flat: Vec<C64> =
            roots.iter().flat_map(|&(r, l)| std::iter::repeat_n(r, l as usize)).collect();
        poly::from_roots(lead, &flat)
    };
    Ok(FactorPair {
        x: expand(a_coef, &alphas),
        y: expand(b_coef, &betas),
        phase,
        alphas,
        betas,
        a_abs_sq,
    })
}

/// The coefficients of `ζ ↦ s(ζ, ζ)` for a section `s` of `O(l, l)`.
pub fn diagonal_polynomial(section: &BiDegreeSection) -> Vec<C64> {
    let (a, b) = section.degrees();
    let mut out = vec![C64::new(0.0, 0.0); a + b + 1];
    for j in 0..=a {
        for k in 0..=b {
            out[j + k] += section.coeff(j, k);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivisorPoint {
    pub zeta: C64,
    pub multiplicity: u32,
}

/// A real lifting of the twistor line `P_q` into `xy = p̃(u)`, together with the
/// spectral divisor `D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDataC1 {
    pub q: PointUHS,
    pub mass: f64,
    pub lambda: f64,
    /// Isometry `F` with `F(q) = O` fixing the `ζ` coordinate on `P_q`.
    pub frame: Mobius,
    /// Centers read in the frame, with doubled charges.
    pub framed_centers: Vec<PointUHS>,
    pub charges: Vec<u32>,
    pub quadratics: Vec<QuadraticRestriction>,
    pub factors: FactorPair,
    pub divisor: Vec<DivisorPoint>,
}

impl SpectralDataC1 {
    /// `x` in the chart `ζ`; the trivialisation `s` is the constant 1 there.
    pub fn x(&self, zeta: C64) -> C64 {
        poly::eval(&self.factors.x, zeta)
    }

    pub fn y(&self, zeta: C64) -> C64 {
        poly::eval(&self.factors.y, zeta)
    }

    /// `x` in the chart `ζ̃ = 1/ζ`: `ζ̃^l x(1/ζ̃)`.
    pub fn x_at_infinity(&self, zeta_tilde: C64) -> C64 {
        let rev: Vec<C64> = self.factors.x.iter().rev().copied().collect();
        poly::eval(&rev, zeta_tilde)
    }

    /// `p̃` of the doubled configuration evaluated on `P_q` in the frame.
    pub fn ptilde_on_line(&self, zeta: C64) -> C64 {
        self.framed_centers
            .iter()
            .zip(&self.charges)
            .fold(C64::new(1.0, 0.0), |acc, (p, &l)| {
                let qd = restrict_to_line(&twistor_line_section(p), &PointUHS::origin())
                    .expect("centers are away from q");
                acc * qd.eval(zeta).powu(l)
            })
    }

    /// `max |xy - p̃| / max |p̃|` over `n` points on each of the circles
    /// `|ζ| ∈ {1/2, 1, 2}`.
    pub fn product_residual(&self, n: usize) -> f64 {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for r in [0.5, 1.0, 2.0] {
            for k in 0..n {
                let zeta = C64::from_polar(r, std::f64::consts::TAU * (k as f64 + 0.25) / n as f64);
                let p = self.ptilde_on_line(zeta);
                worst = worst.max((self.x(zeta) * self.y(zeta) - p).norm());
                scale = scale.max(p.norm());
            }
        }
        worst / scale.max(1e-300)
    }

    /// `max |x(ζ) - ζ^l conj(y(τζ))| / max |x|` on the same sample circles.
    pub fn reality_residual(&self, n: usize) -> f64 {
        let l = self.factors.x.len() as i32 - 1;
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for r in [0.5, 1.0, 2.0] {
            for k in 0..n {
                let zeta = C64::from_polar(r, std::f64::consts::TAU * (k as f64 + 0.25) / n as f64);
                let tau = -1.0 / zeta.conj();
                let ystar = zeta.powi(l) * self.y(tau).conj();
                worst = worst.max((self.x(zeta) - ystar).norm());
                scale = scale.max(self.x(zeta).norm());
            }
        }
        worst / scale.max(1e-300)
    }

    /// The oriented geodesic through `q` represented by `ζ`.
    pub fn geodesic(&self, zeta: ExtComplex) -> OrientedGeodesic {
        let inv = self.frame.inverse();
        OrientedGeodesic { start: inv.apply(zeta.tau()), end: inv.apply(zeta) }
    }

    /// `|D| ∩ σ|D| = ∅`, tested with the chordal metric.
    pub fn divisor_is_disjoint_from_conjugate(&self, tol: f64) -> bool {
        self.divisor.iter().all(|d| {
            let conj = ExtComplex::Finite(d.zeta);
            self.divisor
                .iter()
                .all(|e| ExtComplex::Finite(e.zeta).chordal_distance(&conj.tau()) > tol)
        })
    }

    /// `D + σ(D)` as a multiset.
    pub fn divisor_with_conjugate(&self) -> Vec<DivisorPoint> {
        let mut out = self.divisor.clone();
        for d in &self.divisor {
            out.push(DivisorPoint {
                zeta: ExtComplex::Finite(d.zeta).tau().value().unwrap_or(C64::new(f64::INFINITY, 0.0)),
                multiplicity: d.multiplicity,
            });
        }
        out
    }
}

/// Group roots within `tol` (relative) of each other into a multiset.
pub fn root_multiset(roots: &[C64], tol: f64) -> Vec<DivisorPoint> {
    let mut out: Vec<(C64, u32)> = Vec::new();
    for &r in roots {
        match out.iter_mut().find(|(c, _)| (c - r).norm() <= tol * (1.0 + c.norm())) {
            Some((c, m)) => {
                *c = (*c * *m as f64 + r) / (*m as f64 + 1.0);
                *m += 1;
            }
            None => out.push((r, 1)),
        }
    }
    out.into_iter().map(|(zeta, multiplicity)| DivisorPoint { zeta, multiplicity }).collect()
}

/// Whether two multisets coincide: same total multiplicity at every point,
/// points compared within `tol` (relative).
pub fn multisets_agree(a: &[DivisorPoint], b: &[DivisorPoint], tol: f64) -> bool {
    let merge = |xs: &[DivisorPoint]| {
        let mut out: Vec<DivisorPoint> = Vec::new();
        for x in xs {
            match out.iter_mut().find(|d| (d.zeta - x.zeta).norm() <= tol * (1.0 + d.zeta.norm())) {
                Some(d) => d.multiplicity += x.multiplicity,
                None => out.push(*x),
            }
        }
        out
    };
    let (a, b) = (merge(a), merge(b));
    a.len() == b.len()
        && a.iter().all(|d| {
            b.iter().any(|e| {
                e.multiplicity == d.multiplicity
                    && (e.zeta - d.zeta).norm() <= tol * (1.0 + d.zeta.norm())
            })
        })
}

/// The divisor of `p̃²` restricted to the twistor line of `q`, computed from the
/// undoubled configuration by polynomial root finding.
pub fn restricted_ptilde_squared_divisor(data: &SpectralDataC1) -> Result<Vec<DivisorPoint>> {
    let halved: Vec<u32> = data.charges.iter().map(|l| l / 2).collect();
    let v = MultiCenterPotential::new(0.0, data.framed_centers.clone(), halved, 0.0)?;
    let p = diagonal_polynomial(&ptilde(&v));
    let roots = poly::roots(&poly::mul(&p, &p))?;
    // Multiple roots of order m come out spread by about ε^{1/m}.
    Ok(root_multiset(&roots, 0.05))
}

const ROTATION_CANDIDATES: [(f64, f64); 6] =
    [(0.37, 0.21), (-0.83, 0.52), (0.11, -1.7), (2.3, 0.9), (-0.4, -0.6), (1.1, -0.25)];

/// Lift the twistor line `P_q` for the moduli potential `V` (`λ = 1 + 2m`),
/// using doubled charges.
pub fn lift_twistor_line(q: &PointUHS, v: &MultiCenterPotential, phase: C64) -> Result<SpectralDataC1> {
    if (v.lambda() - (1.0 + 2.0 * v.mass())).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "λ = {} does not equal 1 + 2m = {}",
            v.lambda(),
            1.0 + 2.0 * v.mass()
        )));
    }
    let doubled = v.doubled();
    let recenter = Mobius::recentering(q);
    let mut last_err = Error::DegenerateRestriction;
    for (index, &(re, im)) in std::iter::once(&(f64::NAN, f64::NAN))
        .chain(ROTATION_CANDIDATES.iter())
        .enumerate()
    {
        let frame = if index == 0 {
            recenter
        } else {
            Mobius::rotation_to_infinity(ExtComplex::finite(re, im)).compose(&recenter)
        };
        let framed: Vec<PointUHS> = doubled.centers().iter().map(|p| frame.apply_point(p)).collect();
        let mut quadratics = Vec::with_capacity(framed.len());
        for p in &framed {
            quadratics.push(restrict_to_line(&twistor_line_section(p), &PointUHS::origin())?);
        }
        if quadratics.iter().any(|qd| qd.a.norm() < 1e-6) {
            last_err = Error::ChartRotationRequired {
                index: quadratics.iter().position(|qd| qd.a.norm() < 1e-6).unwrap_or(0),
            };
            continue;
        }
        let factors = factor(&quadratics, doubled.charges(), phase)?;
        let divisor = factors
            .alphas
            .iter()
            .map(|&(zeta, multiplicity)| DivisorPoint { zeta, multiplicity })
            .collect();
        return Ok(SpectralDataC1 {
            q: *q,
            mass: v.mass(),
            lambda: v.lambda(),
            frame,
            framed_centers: framed,
            charges: doubled.charges().to_vec(),
            quadratics,
            factors,
            divisor,
        });
    }
    Err(last_err)
}

/// Genus of a spectral curve of charge `k` in `|O(k, k)|`.
pub fn genus_of_spectral_curve(k: u32) -> Result<u32> {
    if k == 0 {
        return Err(Error::Precondition("charge must be positive".into()));
    }
    Ok((k - 1) * (k - 1))
}
