//! The scattering equation `(∇_γ̇ - iΦ) s = 0` along geodesics: fundamental
//! solutions, solutions decaying at either end, the spectral-line indicator,
//! the splitting endomorphism `M_γ` and the growth of fundamental solutions
//! near an abelian singularity.

pub mod fields;
pub mod ode;

use nalgebra::Vector2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::MultiCenterPotential;
use crate::quadrature;
use crate::C64;

pub use fields::{
    AbelianHyperbolic, EuclideanLine, FieldSampler, FieldValue, Mat2, PrasadSommerfield, TrivialU1,
};
pub use ode::{integrate_fundamental, propagate, Checkpoint, FundamentalSolution, Scheme};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const EUCLIDEAN_HORIZON: f64 = 40.0;
pub const HYPERBOLIC_HORIZON: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum End {
    Positive,
    Negative,
}

/// Rescale to unit length with the largest component real and positive.
fn normalize_direction(v: Vector2<C64>) -> Result<[C64; 2]> {
    let n = v.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::Integration("decaying solution collapsed".into()));
    }
    let big = if v[0].norm() >= v[1].norm() { v[0] } else { v[1] };
    let phase = big.conj() / big.norm();
    Ok([v[0] * phase / n, v[1] * phase / n])
}

/// Eigenvector of `Λ` whose eigenvalue has the smaller (`smaller = true`) or
/// larger real part.
fn gapped_eigenvector(l: &Mat2, smaller: bool) -> Result<Vector2<C64>> {
    let half_trace = (l[(0, 0)] + l[(1, 1)]) * 0.5;
    let root = (half_trace * half_trace - l.determinant()).sqrt();
    let (e1, e2) = (half_trace + root, half_trace - root);
    let gap = (e1.re - e2.re).abs();
    if gap < 1e-8 {
        return Err(Error::NoSpectralGap(format!("eigenvalues {e1} and {e2} have equal real part")));
    }
    let e = if (e1.re < e2.re) == smaller { e1 } else { e2 };
    let a = Vector2::new(l[(0, 1)], e - l[(0, 0)]);
    let b = Vector2::new(e - l[(1, 1)], l[(1, 0)]);
    Ok(if a.norm() >= b.norm() { a } else { b })
}

/// Unit direction at `t = 0` of the solution decaying at the chosen end,
/// found by integrating from `±horizon` towards 0 from the decaying
/// eigenvector of the asymptotic system.
pub fn decaying_solution_with<F: FieldSampler + ?Sized>(
    fields: &F,
    end: End,
    horizon: f64,
    tol: f64,
    scheme: Scheme,
) -> Result<[C64; 2]> {
    if !(horizon > 0.0) {
        return Err(Error::Precondition(format!("horizon must be positive, got {horizon}")));
    }
    let t_end = match end {
        End::Positive => horizon,
        End::Negative => -horizon,
    };
    let l = fields.sample(t_end)?.generator();
    let seed = gapped_eigenvector(&l, end == End::Positive)?;
    let init = Mat2::new(seed[0], C64::new(0.0, 0.0), seed[1], C64::new(0.0, 0.0));
    let path = propagate(fields, scheme, t_end, 0.0, init, tol)?;
    let m = path.last().expect("path is nonempty").matrix();
    normalize_direction(m.column(0).into_owned())
}

pub fn decaying_solution<F: FieldSampler + ?Sized>(fields: &F, end: End, horizon: f64, tol: f64) -> Result<[C64; 2]> {
    decaying_solution_with(fields, end, horizon, tol, Scheme::DormandPrince54)
}

/// Sine of the angle between the complex lines spanned by unit vectors `a`
/// and `b`, computed as `|a₀b₁ - a₁b₀|` to avoid cancellation.
pub fn projective_distance(a: &[C64; 2], b: &[C64; 2]) -> f64 {
    pairing(a, b).norm()
}

/// Directions decaying at `+∞` (`s0`) and `-∞` (`s0_prime`) at the closest
/// point, with their determinant pairing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayingData {
    pub s0: [C64; 2],
    pub s0_prime: [C64; 2],
    pub pairing: C64,
}

/// `⟨u, v⟩ = u₀v₁ - u₁v₀`.
pub fn pairing(u: &[C64; 2], v: &[C64; 2]) -> C64 {
    u[0] * v[1] - u[1] * v[0]
}

pub fn decaying_data<F: FieldSampler + ?Sized>(fields: &F, horizon: f64, tol: f64) -> Result<DecayingData> {
    let s0 = decaying_solution(fields, End::Positive, horizon, tol)?;
    let s0_prime = decaying_solution(fields, End::Negative, horizon, tol)?;
    Ok(DecayingData { s0, s0_prime, pairing: pairing(&s0, &s0_prime) })
}

impl DecayingData {
    /// `|⟨s₀, s₀'⟩|` for unit directions; zero exactly on spectral lines.
    pub fn indicator(&self) -> f64 {
        self.pairing.norm()
    }

    /// `M_γ = S diag(1, -1) S⁻¹` with `S = [s₀ s₀']`: `+1` on `L⁺`, `-1` on `L⁻`.
    pub fn m_gamma(&self) -> Result<Mat2> {
        if self.indicator() < 1e-12 {
            return Err(Error::SpectralLine { pairing: self.indicator() });
        }
        let s = Mat2::new(self.s0[0], self.s0_prime[0], self.s0[1], self.s0_prime[1]);
        let inv = s.try_inverse().ok_or(Error::SpectralLine { pairing: self.indicator() })?;
        let d = Mat2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0));
        Ok(s * d * inv)
    }

    pub fn m_gamma_norm(&self) -> Result<f64> {
        Ok(self.m_gamma()?.singular_values().max())
    }
}

pub fn spectral_indicator<F: FieldSampler + ?Sized>(fields: &F, horizon: f64, tol: f64) -> Result<f64> {
    Ok(decaying_data(fields, horizon, tol)?.indicator())
}

pub fn m_gamma_norm<F: FieldSampler + ?Sized>(fields: &F, horizon: f64, tol: f64) -> Result<f64> {
    decaying_data(fields, horizon, tol)?.m_gamma_norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineRecord {
    pub line: EuclideanLine,
    pub indicator: f64,
    /// `None` on a spectral line.
    pub m_gamma: Option<f64>,
}

/// Indicator and `‖M_γ‖` for each line of the charge-1 BPS fixture, in input
/// order.
pub fn scan_lines(lines: &[EuclideanLine], horizon: f64, tol: f64) -> Result<Vec<LineRecord>> {
    lines
        .par_iter()
        .map(|line| {
            let data = decaying_data(&PrasadSommerfield { line: *line }, horizon, tol)?;
            Ok(LineRecord { line: *line, indicator: data.indicator(), m_gamma: data.m_gamma_norm().ok() })
        })
        .collect()
}

/// Least-squares line `y = slope·x + intercept` and its `R²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Precondition("a fit needs at least two paired samples".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition("fit abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(LinearFit { slope, intercept, r_squared })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthSample {
    pub impact: f64,
    pub log_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub fit: LinearFit,
    pub samples: Vec<GrowthSample>,
}

/// Fit of `log ‖H(z)‖` against `log(1/|z|)`, where `H(z)` is the fundamental
/// solution over `t ∈ [-δ, δ]` of the abelian field of `v` along the geodesic at
/// impact parameter `|z|` from center `i`. The slope estimates `lᵢ`.
pub fn abelian_growth_exponent(
    v: &MultiCenterPotential,
    i: usize,
    delta: f64,
    impacts: &[f64],
    tol: f64,
) -> Result<GrowthFit> {
    if impacts.len() < 2 {
        return Err(Error::Range("need at least two impact parameters".into()));
    }
    if let Some(bad) = impacts.iter().find(|z| !(**z > 0.0 && **z < delta)) {
        return Err(Error::Range(format!("impact parameter {bad} outside (0, {delta})")));
    }
    let samples = impacts
        .par_iter()
        .map(|&z| {
            let fields = AbelianHyperbolic::at_impact(v, i, C64::new(z, 0.0))?;
            let h = integrate_fundamental(&fields, -delta, delta, tol)?;
            Ok(GrowthSample { impact: z, log_norm: h.log_norm() })
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = samples.iter().map(|s| -s.impact.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.log_norm).collect();
    Ok(GrowthFit { fit: fit_line(&xs, &ys)?, samples })
}

/// `∫_{-δ}^{δ} l / (2√(t² + |z|²)) dt` by Gauss–Legendre quadrature on panels
/// graded geometrically away from `t = 0`.
pub fn inverse_distance_integral(l: f64, delta: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) || !(delta > 0.0) {
        return Err(Error::Range(format!("need δ > 0 and |z| > 0, got δ = {delta}, |z| = {z}")));
    }
    let f = |t: f64| l / (2.0 * (t * t + z * z).sqrt());
    let mut total = 0.0;
    let mut a = 0.0;
    let mut b = z.min(delta);
    loop {
        total += quadrature::integrate(f, a, b, 24, 1);
        if b >= delta {
            break;
        }
        a = b;
        b = (2.0 * b).min(delta);
    }
    Ok(2.0 * total)
}
