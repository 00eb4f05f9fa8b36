//! Deformation coordinates of lifted spectral curves in `L² \ 0` and the
//! holomorphic symplectic form `ω_D`.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euclidean::{l2_trivialization, CurveO2k};
use crate::quadrature::circle_mean;
use crate::series::Series;
use crate::C64;

/// Global sign picked up by `ρ` under the chart change of `L² \ 0` when both
/// values are expressed against `s⁴` (with `s̃ = ζ s`).
pub const RHO_CHART_SIGN: f64 = -1.0;

pub const DEFAULT_NODES: usize = 2048;

/// Tolerance used when checking that a tangent vector vanishes at its marking.
const MARK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sheet {
    pub eta: Series,
    pub u: Series,
}

/// The `k` sheets `ζ ↦ (ηᵢ(ζ), uᵢ(ζ))` of a lifted curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SheetData {
    pub sheets: Vec<Sheet>,
}

impl SheetData {
    pub fn k(&self) -> usize {
        self.sheets.len()
    }

    /// Smallest `|uᵢ|` on the circle of radius `r`, sampled at `nodes` points.
    pub fn min_abs_u(&self, r: f64, nodes: usize) -> f64 {
        let mut min = f64::INFINITY;
        for s in &self.sheets {
            for j in 0..nodes {
                let z = C64::from_polar(r, std::f64::consts::TAU * j as f64 / nodes as f64);
                min = min.min(s.u.eval(z).norm());
            }
        }
        min
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SheetTangent {
    pub eta: Series,
    pub u: Series,
}

/// `Σ η'ᵢ ∂/∂η + u'ᵢ ∂/∂u`, optionally marked at `ζ₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub sheets: Vec<SheetTangent>,
    pub marked: Option<C64>,
}

impl TangentVector {
    /// Marks at `ζ₀` after checking that every component vanishes there.
    pub fn marked_at(sheets: Vec<SheetTangent>, zeta0: C64) -> Result<Self> {
        if zeta0.norm() == 0.0 {
            return Err(Error::Precondition("marking point must be nonzero".into()));
        }
        for (i, s) in sheets.iter().enumerate() {
            let scale = 1.0 + s.eta.coeffs().iter().chain(s.u.coeffs()).map(|c| c.norm()).sum::<f64>();
            if s.eta.eval(zeta0).norm() > MARK_TOLERANCE * scale
                || s.u.eval(zeta0).norm() > MARK_TOLERANCE * scale
            {
                return Err(Error::Precondition(format!("sheet {i} does not vanish at ζ₀ = {zeta0}")));
            }
        }
        Ok(TangentVector { sheets, marked: Some(zeta0) })
    }

    pub fn unmarked(sheets: Vec<SheetTangent>) -> Self {
        TangentVector { sheets, marked: None }
    }

    /// Coordinates `(η'ᵢ(0), u'ᵢ(0))` interleaved.
    pub fn coordinates(&self) -> Result<Vec<C64>> {
        let mut out = Vec::with_capacity(2 * self.sheets.len());
        for s in &self.sheets {
            out.push(s.eta.value_at_zero()?);
            out.push(s.u.value_at_zero()?);
        }
        Ok(out)
    }
}

fn common_mark(x1: &TangentVector, x2: &TangentVector, sheets: &SheetData) -> Result<C64> {
    let (Some(a), Some(b)) = (x1.marked, x2.marked) else {
        return Err(Error::Precondition("tangent vectors must be marked".into()));
    };
    if (a - b).norm() > 1e-14 * (1.0 + a.norm()) {
        return Err(Error::Precondition(format!("markings differ: {a} and {b}")));
    }
    if x1.sheets.len() != sheets.k() || x2.sheets.len() != sheets.k() {
        return Err(Error::Precondition("sheet counts differ".into()));
    }
    Ok(a)
}

/// `Σᵢ (η'_{i,1}(0) u'_{i,2}(0) - η'_{i,2}(0) u'_{i,1}(0)) / uᵢ(0)`.
pub fn omega_d_residue(x1: &TangentVector, x2: &TangentVector, sheets: &SheetData) -> Result<C64> {
    common_mark(x1, x2, sheets)?;
    let mut total = C64::new(0.0, 0.0);
    for ((s, t1), t2) in sheets.sheets.iter().zip(&x1.sheets).zip(&x2.sheets) {
        let u0 = s.u.value_at_zero()?;
        if u0.norm() == 0.0 {
            return Err(Error::Pole("u vanishes at ζ = 0".into()));
        }
        total += (t1.eta.value_at_zero()? * t2.u.value_at_zero()?
            - t2.eta.value_at_zero()? * t1.u.value_at_zero()?)
            / u0;
    }
    Ok(total)
}

/// `(1/2πi) ∮_{|ζ| = r} Σᵢ (η'_{i,1} u'_{i,2} - η'_{i,2} u'_{i,1}) / ((ζ/ζ₀ - 1)² uᵢ) dζ/ζ`
/// by the trapezoid rule on `nodes` points.
pub fn omega_d_contour_radius(
    x1: &TangentVector,
    x2: &TangentVector,
    sheets: &SheetData,
    nodes: usize,
    radius: f64,
) -> Result<C64> {
    let zeta0 = common_mark(x1, x2, sheets)?;
    if nodes < 64 {
        return Err(Error::Precondition(format!("need at least 64 nodes, got {nodes}")));
    }
    if (zeta0.norm() - radius).abs() < 1e-6 {
        return Err(Error::IllConditioned(format!(
            "marking ζ₀ = {zeta0} lies on the contour |ζ| = {radius}"
        )));
    }
    Ok(circle_mean(
        |z| {
            let v = z / zeta0 - 1.0;
            let mut acc = C64::new(0.0, 0.0);
            for ((s, t1), t2) in sheets.sheets.iter().zip(&x1.sheets).zip(&x2.sheets) {
                acc += (t1.eta.eval(z) * t2.u.eval(z) - t2.eta.eval(z) * t1.u.eval(z)) / s.u.eval(z);
            }
            acc / (v * v)
        },
        radius,
        nodes,
    ))
}

pub fn omega_d_contour(
    x1: &TangentVector,
    x2: &TangentVector,
    sheets: &SheetData,
    nodes: usize,
) -> Result<C64> {
    omega_d_contour_radius(x1, x2, sheets, nodes, 1.0)
}

/// `Σ dηᵢ ∧ duᵢ/uᵢ` on the coordinates `(η'ᵢ(0), u'ᵢ(0))`.
pub fn product_symplectic_form(sheets: &SheetData, c1: &[C64], c2: &[C64]) -> Result<C64> {
    let mut total = C64::new(0.0, 0.0);
    for (i, s) in sheets.sheets.iter().enumerate() {
        let u0 = s.u.value_at_zero()?;
        total += (c1[2 * i] * c2[2 * i + 1] - c2[2 * i] * c1[2 * i + 1]) / u0;
    }
    Ok(total)
}

/// `[ω_D(Xᵢ, Xⱼ)]` by the residue formula.
pub fn gram_matrix(vectors: &[TangentVector], sheets: &SheetData) -> Result<DMatrix<C64>> {
    let n = vectors.len();
    let mut m = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = omega_d_residue(&vectors[i], &vectors[j], sheets)?;
        }
    }
    Ok(m)
}

/// Numerical rank: singular values above `tol` times the largest.
pub fn numerical_rank(m: &DMatrix<C64>, tol: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > tol * max).count()
}

/// `ρ = dζ ∧ dη ∧ du/u` on three tangent vectors `(δζ, δη, δu)`, in the chart
/// frame `s⁴`.
pub fn rho_form(zeta: C64, eta: C64, u: C64, v: [[C64; 3]; 3]) -> Result<C64> {
    let _ = (zeta, eta);
    if u.norm() == 0.0 {
        return Err(Error::Pole("ρ has a pole along u = 0".into()));
    }
    let row = |w: [C64; 3]| [w[0], w[1], w[2] / u];
    let [a, b, c] = [row(v[0]), row(v[1]), row(v[2])];
    Ok(a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0]))
}

/// The `k` points `(η, u)` of the lifted curve over `ζ*`, with `u` supplied by a
/// trivialisation `(ζ, η) ↦ u`.
pub fn fiber_coordinates<F: Fn(C64, C64) -> C64>(
    curve: &CurveO2k,
    trivialization: F,
    zeta: C64,
) -> Result<Vec<(C64, C64)>> {
    let etas = curve.sheets_over(zeta, 1e-7)?;
    Ok(etas.into_iter().map(|eta| (eta, trivialization(zeta, eta))).collect())
}

/// [`fiber_coordinates`] for a charge-1 curve using its `L²` trivialisation.
pub fn charge1_fiber_coordinates(curve: &CurveO2k, zeta: C64) -> Result<Vec<(C64, C64)>> {
    let t = l2_trivialization(curve)?;
    fiber_coordinates(curve, |z, _| t.u0(z), zeta)
}

/// Record of one `ω_D` evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaRecord {
    pub inputs_hash: String,
    pub residue: C64,
    pub contour: C64,
    pub nodes: usize,
    pub discrepancy: f64,
}

pub fn omega_record(
    x1: &TangentVector,
    x2: &TangentVector,
    sheets: &SheetData,
    nodes: usize,
) -> Result<OmegaRecord> {
    let residue = omega_d_residue(x1, x2, sheets)?;
    let contour = omega_d_contour(x1, x2, sheets, nodes)?;
    let mut hasher = DefaultHasher::new();
    serde_json::to_string(&(x1, x2, sheets)).unwrap_or_default().hash(&mut hasher);
    Ok(OmegaRecord {
        inputs_hash: format!("{:016x}", hasher.finish()),
        residue,
        contour,
        nodes,
        discrepancy: (residue - contour).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn hand_example() -> (TangentVector, TangentVector, SheetData) {
        let z0 = c(2.0, 0.5);
        let zero = Series::constant(c(0.0, 0.0));
        let sheets = SheetData {
            sheets: vec![Sheet { eta: zero.clone(), u: Series::constant(c(1.0, 0.0)) }],
        };
        let x1 = TangentVector::marked_at(
            vec![SheetTangent { eta: Series::marker(z0, c(1.0, 0.0)), u: zero.clone() }],
            z0,
        )
        .unwrap();
        let x2 = TangentVector::marked_at(
            vec![SheetTangent { eta: zero, u: Series::marker(z0, c(1.0, 0.0)) }],
            z0,
        )
        .unwrap();
        (x1, x2, sheets)
    }

    #[test]
    fn hand_computed_value() {
        let (x1, x2, sheets) = hand_example();
        assert!((omega_d_residue(&x1, &x2, &sheets).unwrap() - 1.0).norm() < 1e-15);
        let contour = omega_d_contour(&x1, &x2, &sheets, 256).unwrap();
        assert!((contour - 1.0).norm() < 1e-12);
        assert_eq!(omega_d_residue(&x1, &x1, &sheets).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn unmarked_and_misplaced_inputs_are_rejected() {
        let (x1, _, sheets) = hand_example();
        let free = TangentVector::unmarked(x1.sheets.clone());
        assert!(matches!(omega_d_residue(&x1, &free, &sheets), Err(Error::Precondition(_))));
        let bad = TangentVector::marked_at(
            vec![SheetTangent { eta: Series::constant(c(1.0, 0.0)), u: Series::constant(c(0.0, 0.0)) }],
            c(2.0, 0.0),
        );
        assert!(bad.is_err());
        let on_circle = c(0.6, 0.8);
        let y = TangentVector::marked_at(
            vec![SheetTangent { eta: Series::marker(on_circle, c(1.0, 0.0)), u: Series::constant(c(0.0, 0.0)) }],
            on_circle,
        )
        .unwrap();
        assert!(matches!(omega_d_contour(&y, &y, &sheets, 128), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn rho_frame_value_and_antisymmetry() {
        let u = c(0.7, -1.2);
        let e = |i: usize| {
            let mut v = [c(0.0, 0.0); 3];
            v[i] = if i == 2 { u } else { c(1.0, 0.0) };
            v
        };
        assert!((rho_form(c(0.3, 0.0), c(1.0, 1.0), u, [e(0), e(1), e(2)]).unwrap() - 1.0).norm() < 1e-15);
        let v = [[c(0.1, 0.2), c(1.0, 0.0), c(0.3, 0.3)], [c(-0.5, 0.0), c(0.2, 0.9), c(1.0, 1.0)], [
            c(0.0, 1.0),
            c(0.4, -0.4),
            c(2.0, 0.0),
        ]];
        let a = rho_form(c(0.3, 0.0), c(1.0, 1.0), u, v).unwrap();
        let b = rho_form(c(0.3, 0.0), c(1.0, 1.0), u, [v[1], v[0], v[2]]).unwrap();
        assert!((a + b).norm() < 1e-15);
        assert!(rho_form(c(0.3, 0.0), c(1.0, 1.0), c(0.0, 0.0), v).is_err());
    }

    #[test]
    fn charge1_fibres() {
        let curve = crate::euclidean::charge1_curve([0.0, 0.0, 0.0]);
        assert_eq!(charge1_fiber_coordinates(&curve, c(0.4, 0.3)).unwrap(), vec![(c(0.0, 0.0), c(1.0, 0.0))]);
        let x3 = 0.35;
        let curve = crate::euclidean::charge1_curve([0.0, 0.0, x3]);
        let z = c(0.4, 0.3);
        let fib = charge1_fiber_coordinates(&curve, z).unwrap();
        assert!((fib[0].0 - 2.0 * x3 * z).norm() < 1e-15);
        assert!((fib[0].1 - (2.0 * x3).exp()).norm() < 1e-14);
    }
}
