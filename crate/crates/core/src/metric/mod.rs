//! Geometry of the charge-1 moduli space: the circle bundle `M → H³ \ {pᵢ}`
//! with connection `ω`, `dω = *dV`, the metric `V h + V⁻¹ ω²` and its
//! scalar-flat Kähler representatives `q_u² (V h + V⁻¹ ω²)`.
//!
//! Coordinates on `M` are `(x, y, z, θ)`; `ω = dθ + A` in a gauge built from
//! Dirac patches about each center, and orientations are measured against
//! `dx∧dy∧dz∧dθ = vol_{H³}∧ω` (up to the positive factor `z³`).

pub mod curvature;

use nalgebra::{Matrix3, Matrix4, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::ExtComplex;
use crate::hyperbolic::{self, BoundaryPoint, MultiCenterPotential, PointUHS};

pub use curvature::{curvature, CurvatureReport};

use curvature::{matrix_derivative, matrix_derivative_second_order, Coords};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MFramePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub theta: f64,
}

impl MFramePoint {
    pub fn new(x: f64, y: f64, z: f64, theta: f64) -> Result<Self> {
        PointUHS::new(x, y, z)?;
        Ok(MFramePoint { x, y, z, theta })
    }

    pub fn coords(&self) -> Coords {
        [self.x, self.y, self.z, self.theta]
    }

    pub fn base(&self) -> PointUHS {
        PointUHS::new_unchecked(self.x, self.y, self.z)
    }
}

fn base_of(c: &Coords) -> Result<PointUHS> {
    if !(c[2] > 0.0) {
        return Err(Error::Domain(format!("z = {} left the upper half-space", c[2])));
    }
    Ok(PointUHS::new_unchecked(c[0], c[1], c[2]))
}

/// Which Dirac string is removed: `North` is regular on the ray `θᵢ = 0`
/// (pointing towards `z → ∞` from the center), `South` on `θᵢ = π`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Patch {
    North,
    South,
}

impl Patch {
    fn sign(self) -> f64 {
        match self {
            Patch::North => 1.0,
            Patch::South => -1.0,
        }
    }
}

/// Geodesic polar angle data about `p`: `(cos θ, ∇φ)`.
///
/// With `p` moved to `O` by `(w, z) ↦ ((w - c)/s, z/s)`, the unit direction of
/// `x` seen from `O` is the normalisation of `(2x₁, 2x₂, |x|² - 1)`.
fn polar_data(p: &PointUHS, x: &PointUHS) -> (f64, Vector3<f64>) {
    let s = p.z;
    let (x1, x2, x3) = ((x.x - p.x) / s, (x.y - p.y) / s, x.z / s);
    let r2 = x1 * x1 + x2 * x2 + x3 * x3;
    let n = Vector3::new(2.0 * x1, 2.0 * x2, r2 - 1.0);
    let cos = n.z / n.norm();
    let rho2 = x1 * x1 + x2 * x2;
    let grad_phi = Vector3::new(-x2 / (rho2 * s), x1 / (rho2 * s), 0.0);
    (cos, grad_phi)
}

/// Connection with `dω = *dV` assembled from Dirac potentials
/// `(lᵢ/2)(cos θᵢ ∓ 1) dφᵢ`, plus an optional non-closed perturbation
/// `ε x dy` used as a negative control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiracConnection {
    centers: Vec<PointUHS>,
    charges: Vec<u32>,
    perturbation: f64,
}

impl DiracConnection {
    pub fn for_potential(v: &MultiCenterPotential) -> Self {
        DiracConnection { centers: v.centers().to_vec(), charges: v.charges().to_vec(), perturbation: 0.0 }
    }

    pub fn with_perturbation(mut self, eps: f64) -> Self {
        self.perturbation = eps;
        self
    }

    pub fn perturbation(&self) -> f64 {
        self.perturbation
    }

    /// North patch where `cos θᵢ ≥ 0`, south otherwise.
    pub fn patches_at(&self, x: &PointUHS) -> Vec<Patch> {
        self.centers
            .iter()
            .map(|p| if polar_data(p, x).0 >= 0.0 { Patch::North } else { Patch::South })
            .collect()
    }

    /// `(A_x, A_y, A_z)` with `ω = dθ + A`.
    pub fn gauge_potential(&self, x: &PointUHS, patches: &[Patch]) -> Result<Vector3<f64>> {
        let mut a = Vector3::new(0.0, self.perturbation * x.x, 0.0);
        for ((p, &l), patch) in self.centers.iter().zip(&self.charges).zip(patches) {
            if hyperbolic::dist(p, x) < 1e-12 {
                return Err(Error::Pole(format!("connection evaluated at center {p:?}")));
            }
            let (cos, grad) = polar_data(p, x);
            let factor = cos - patch.sign();
            if !grad.iter().all(|g| g.is_finite()) || (factor.abs() > 1e-300 && grad.norm() > 1e12) {
                return Err(Error::Domain("point lies on a Dirac string".into()));
            }
            if grad.iter().all(|g| g.is_finite()) {
                a += grad * (0.5 * l as f64 * factor);
            }
        }
        Ok(a)
    }

    /// Max over components of `dA - *dV`, where `*dV = z⁻¹(V_x dy∧dz + V_y dz∧dx + V_z dx∧dy)`.
    pub fn curvature_residual(&self, v: &MultiCenterPotential, x: &PointUHS, h: f64) -> Result<f64> {
        let patches = self.patches_at(x);
        let step = h * x.z;
        let a_at = |i: usize, d: f64| {
            let mut c = x.as_array();
            c[i] += d;
            self.gauge_potential(&PointUHS::new_unchecked(c[0], c[1], c[2]), &patches)
        };
        let mut da = Matrix3::zeros();
        for i in 0..3 {
            let d = (a_at(i, -2.0 * step)? - a_at(i, 2.0 * step)? + (a_at(i, step)? - a_at(i, -step)?) * 8.0)
                / (12.0 * step);
            for j in 0..3 {
                da[(i, j)] = d[j]; // ∂_i A_j
            }
        }
        let curl = Vector3::new(
            da[(1, 2)] - da[(2, 1)],
            da[(2, 0)] - da[(0, 2)],
            da[(0, 1)] - da[(1, 0)],
        );
        let grad = potential_gradient(v, x)?;
        Ok((curl - grad / x.z).amax())
    }
}

/// Exact gradient of `V` in UHS coordinates.
pub fn potential_gradient(v: &MultiCenterPotential, x: &PointUHS) -> Result<Vector3<f64>> {
    let mut g = Vector3::zeros();
    for (p, &l) in v.centers().iter().zip(v.charges()) {
        let rho = hyperbolic::dist(p, x);
        if rho == 0.0 {
            return Err(Error::Pole(format!("gradient at center {p:?}")));
        }
        let e2 = (x.x - p.x).powi(2) + (x.y - p.y).powi(2) + (x.z - p.z).powi(2);
        let dcosh = Vector3::new(
            (x.x - p.x) / (x.z * p.z),
            (x.y - p.y) / (x.z * p.z),
            (x.z - p.z) / (x.z * p.z) - e2 / (2.0 * x.z * x.z * p.z),
        );
        let sinh = rho.sinh();
        // G'(ρ) = -1/(2 sinh²ρ)
        g += dcosh * (-(l as f64) / (2.0 * sinh * sinh * sinh));
    }
    Ok(g)
}

/// The connection form `ω = (A_x, A_y, A_z, 1)` at `c`.
fn omega_components(conn: &DiracConnection, c: &Coords, patches: &[Patch]) -> Result<[f64; 4]> {
    let a = conn.gauge_potential(&base_of(c)?, patches)?;
    Ok([a.x, a.y, a.z, 1.0])
}

/// `V h + V⁻¹ ω⊗ω` in coordinates `(x, y, z, θ)` and a fixed gauge.
pub fn metric_asd_in_gauge(
    v: &MultiCenterPotential,
    conn: &DiracConnection,
    patches: &[Patch],
    c: &Coords,
) -> Result<Matrix4<f64>> {
    let x = base_of(c)?;
    let vv = hyperbolic::potential(v, &x)?;
    let w = omega_components(conn, c, patches)?;
    let mut g = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            g[(i, j)] = w[i] * w[j] / vv;
        }
    }
    for i in 0..3 {
        g[(i, i)] += vv / (x.z * x.z);
    }
    Ok(g)
}

/// [`metric_asd_in_gauge`] with the patches chosen at `p`.
pub fn metric_asd(v: &MultiCenterPotential, conn: &DiracConnection, p: &MFramePoint) -> Result<Matrix4<f64>> {
    let patches = conn.patches_at(&p.base());
    metric_asd_in_gauge(v, conn, &patches, &p.coords())
}

/// Horospherical height `q_u` (normalised at `base`) and its gradient.
fn height_and_gradient(u: BoundaryPoint, base: &PointUHS, x: &PointUHS) -> (f64, Vector3<f64>) {
    let norm = match u {
        ExtComplex::Infinity => 1.0 / base.z,
        ExtComplex::Finite(a) => ((base.w() - a).norm_sqr() + base.z * base.z) / base.z,
    };
    match u {
        ExtComplex::Infinity => (x.z * norm, Vector3::new(0.0, 0.0, norm)),
        ExtComplex::Finite(a) => {
            let dx = x.x - a.re;
            let dy = x.y - a.im;
            let d = dx * dx + dy * dy + x.z * x.z;
            let q = x.z / d;
            let grad = Vector3::new(-2.0 * x.z * dx / (d * d), -2.0 * x.z * dy / (d * d), 1.0 / d - 2.0 * x.z * x.z / (d * d));
            (q * norm, grad * norm)
        }
    }
}

/// The Kähler structure attached to the boundary point `u`:
/// `g = q_u²(V h + V⁻¹ω²)`, `Ω = -½(V *d(q_u²) + d(q_u²)∧ω)`, `J = -g⁻¹Ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KahlerStructure {
    pub potential: MultiCenterPotential,
    pub connection: DiracConnection,
    pub u: BoundaryPoint,
    pub base: PointUHS,
}

impl KahlerStructure {
    pub fn new(v: &MultiCenterPotential, u: BoundaryPoint) -> Self {
        KahlerStructure {
            potential: v.clone(),
            connection: DiracConnection::for_potential(v),
            u,
            base: PointUHS::origin(),
        }
    }

    pub fn patches_at(&self, p: &MFramePoint) -> Vec<Patch> {
        self.connection.patches_at(&p.base())
    }

    pub fn height(&self, c: &Coords) -> Result<f64> {
        Ok(height_and_gradient(self.u, &self.base, &base_of(c)?).0)
    }

    pub fn metric(&self, patches: &[Patch], c: &Coords) -> Result<Matrix4<f64>> {
        let q = self.height(c)?;
        Ok(metric_asd_in_gauge(&self.potential, &self.connection, patches, c)? * (q * q))
    }

    pub fn kahler_form(&self, patches: &[Patch], c: &Coords) -> Result<Matrix4<f64>> {
        let x = base_of(c)?;
        let vv = hyperbolic::potential(&self.potential, &x)?;
        let (q, grad) = height_and_gradient(self.u, &self.base, &x);
        let f = grad * (2.0 * q); // d(q²)
        let w = omega_components(&self.connection, c, patches)?;
        let mut om = Matrix4::zeros();
        // V *d(q²) = (V/z)(f_x dy∧dz + f_y dz∧dx + f_z dx∧dy)
        let s = vv / x.z;
        om[(1, 2)] += s * f.x;
        om[(2, 0)] += s * f.y;
        om[(0, 1)] += s * f.z;
        om[(2, 1)] -= s * f.x;
        om[(0, 2)] -= s * f.y;
        om[(1, 0)] -= s * f.z;
        let fv = [f.x, f.y, f.z, 0.0];
        for a in 0..4 {
            for b in 0..4 {
                om[(a, b)] += fv[a] * w[b] - fv[b] * w[a];
            }
        }
        Ok(om * -0.5)
    }

    /// `J^a_b` acting on tangent vectors.
    pub fn complex_structure(&self, patches: &[Patch], c: &Coords) -> Result<Matrix4<f64>> {
        let g = self.metric(patches, c)?;
        let gi = g.try_inverse().ok_or_else(|| Error::Domain("singular metric".into()))?;
        Ok(-(gi * self.kahler_form(patches, c)?))
    }

    /// Curvature of `g` at `p` in the gauge chosen at `p`.
    pub fn curvature(&self, p: &MFramePoint, step: f64) -> Result<CurvatureReport> {
        let patches = self.patches_at(p);
        self.curvature_in_gauge(p, step, &patches)
    }

    pub fn curvature_in_gauge(&self, p: &MFramePoint, step: f64, patches: &[Patch]) -> Result<CurvatureReport> {
        check_stencil(p, step)?;
        curvature(&|c: &Coords| self.metric(patches, c), &p.coords(), step, &[p.z, p.z, p.z, 1.0])
    }

    /// Max component of `dΩ`, by fourth-order differences with step `h·z`.
    pub fn d_omega_residual(&self, p: &MFramePoint, h: f64) -> Result<f64> {
        let patches = self.patches_at(p);
        exterior_derivative_residual(&|c: &Coords| self.kahler_form(&patches, c), p, h, false)
    }

    /// Max component of the Nijenhuis tensor of `J`.
    pub fn nijenhuis_residual(&self, p: &MFramePoint, h: f64) -> Result<f64> {
        let patches = self.patches_at(p);
        nijenhuis(&|c: &Coords| self.complex_structure(&patches, c), p, h)
    }
}

fn check_stencil(p: &MFramePoint, step: f64) -> Result<()> {
    if !(step > 0.0) || 2.0 * step >= 1.0 {
        return Err(Error::Domain(format!("stencil step {step} leaves the upper half-space at z = {}", p.z)));
    }
    Ok(())
}

/// `max |∂_aΩ_bc + ∂_bΩ_ca + ∂_cΩ_ab|` with spatial step `h·z`; `second_order`
/// selects the two-point stencil instead of the four-point one.
pub fn exterior_derivative_residual<F>(omega: &F, p: &MFramePoint, h: f64, second_order: bool) -> Result<f64>
where
    F: Fn(&Coords) -> Result<Matrix4<f64>>,
{
    check_stencil(p, h)?;
    let c = p.coords();
    let mut d = Vec::with_capacity(4);
    for i in 0..4 {
        let step = if i < 3 { h * p.z } else { h };
        d.push(if second_order {
            matrix_derivative_second_order(omega, &c, i, step)?
        } else {
            matrix_derivative(omega, &c, i, step)?
        });
    }
    let mut worst: f64 = 0.0;
    for a in 0..4 {
        for b in (a + 1)..4 {
            for cc in (b + 1)..4 {
                let v = d[a][(b, cc)] + d[b][(cc, a)] + d[cc][(a, b)];
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

/// `max |N^k_ij|` with `N^k_ij = J^l_i ∂_l J^k_j - J^l_j ∂_l J^k_i - J^k_l(∂_i J^l_j - ∂_j J^l_i)`.
pub fn nijenhuis<F>(jf: &F, p: &MFramePoint, h: f64) -> Result<f64>
where
    F: Fn(&Coords) -> Result<Matrix4<f64>>,
{
    check_stencil(p, h)?;
    let c = p.coords();
    let j = jf(&c)?;
    let mut d = Vec::with_capacity(4);
    for i in 0..4 {
        let step = if i < 3 { h * p.z } else { h };
        d.push(matrix_derivative(jf, &c, i, step)?);
    }
    // J[(k, j)] = J^k_j, d[l][(k, j)] = ∂_l J^k_j
    let mut worst: f64 = 0.0;
    for k in 0..4 {
        for a in 0..4 {
            for b in 0..4 {
                let mut v = 0.0;
                for l in 0..4 {
                    v += j[(l, a)] * d[l][(k, b)] - j[(l, b)] * d[l][(k, a)];
                    v -= j[(k, l)] * (d[a][(l, b)] - d[b][(l, a)]);
                }
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

/// `2 lim_{ρ→0} ρ V` along the vertical ray into center `i`, by polynomial
/// (Neville) extrapolation in `ρ` from `ρ = 0.05 · 2^{-k}`.
pub fn abelian_charge(v: &MultiCenterPotential, i: usize) -> Result<f64> {
    let p = *v
        .centers()
        .get(i)
        .ok_or_else(|| Error::Precondition(format!("no center with index {i}")))?;
    const LEVELS: usize = 6;
    let mut rhos = Vec::with_capacity(LEVELS);
    let mut vals = Vec::with_capacity(LEVELS);
    for k in 0..LEVELS {
        let rho = 0.05 / 2f64.powi(k as i32);
        let x = PointUHS::new_unchecked(p.x, p.y, p.z * rho.exp());
        rhos.push(rho);
        vals.push(2.0 * rho * hyperbolic::potential(v, &x)?);
    }
    Ok(neville_at_zero(&rhos, &vals))
}

/// Value at 0 of the interpolating polynomial through `(xs, ys)`.
pub fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (xs[i + m] * p[i] - xs[i] * p[i + 1]) / (xs[i + m] - xs[i]);
        }
    }
    p[0]
}

/// `(q_{u1}/q_{u2})²` at `p` and the max entry of `g_{u1} - factor·g_{u2}`.
pub fn conformal_gauge_factor(
    v: &MultiCenterPotential,
    u1: BoundaryPoint,
    u2: BoundaryPoint,
    p: &MFramePoint,
) -> Result<(f64, f64)> {
    let k1 = KahlerStructure::new(v, u1);
    let k2 = KahlerStructure::new(v, u2);
    let patches = k1.patches_at(p);
    let c = p.coords();
    let factor = (k1.height(&c)? / k2.height(&c)?).powi(2);
    let g1 = k1.metric(&patches, &c)?;
    let g2 = k2.metric(&patches, &c)?;
    let residual = (g1 - g2 * factor).amax() / g1.amax();
    Ok((factor, residual))
}

/// A `p`-form on a 4-manifold as a dense antisymmetric array over `4^p` indices.
type Form = Vec<f64>;

fn index_of(idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * 4 + i)
}

fn permutation_sign(idx: &[usize]) -> f64 {
    let mut sign = 1.0;
    for i in 0..idx.len() {
        for j in (i + 1)..idx.len() {
            if idx[i] == idx[j] {
                return 0.0;
            }
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    sign
}

fn all_indices(p: usize) -> Vec<Vec<usize>> {
    (0..4usize.pow(p as u32))
        .map(|mut n| {
            let mut v = vec![0; p];
            for slot in (0..p).rev() {
                v[slot] = n % 4;
                n /= 4;
            }
            v
        })
        .collect()
}

/// Wedge of a 1-form with a form given by its components.
fn wedge(a: &Form, pa: usize, b: &Form, pb: usize) -> Form {
    let p = pa + pb;
    let fact = |n: usize| (1..=n).product::<usize>() as f64;
    let mut out = vec![0.0; 4usize.pow(p as u32)];
    for idx in all_indices(p) {
        // (a∧b)_{i1..ip} = (1/(pa! pb!)) Σ_σ sign(σ) a_{σ…} b_{σ…}
        let mut v = 0.0;
        for perm in permutations(p) {
            let s = permutation_sign(&perm);
            let permuted: Vec<usize> = perm.iter().map(|&k| idx[k]).collect();
            v += s * a[index_of(&permuted[..pa])] * b[index_of(&permuted[pa..])];
        }
        out[index_of(&idx)] = v / (fact(pa) * fact(pb));
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut v = rest.clone();
            v.insert(pos, n - 1);
            out.push(v);
        }
    }
    out
}

/// Hodge star of a `p`-form for metric `g` with `dx⁰∧…∧dx³` positive.
fn hodge_star(form: &Form, p: usize, g: &Matrix4<f64>) -> Result<Form> {
    let gi = g.try_inverse().ok_or_else(|| Error::Domain("singular metric".into()))?;
    let sqrt_det = g.determinant().abs().sqrt();
    let fact = |n: usize| (1..=n).product::<usize>() as f64;
    // raise all indices
    let mut raised = vec![0.0; form.len()];
    for up in all_indices(p) {
        let mut v = 0.0;
        for low in all_indices(p) {
            let coef: f64 = up.iter().zip(&low).map(|(&a, &b)| gi[(a, b)]).product();
            if coef != 0.0 {
                v += coef * form[index_of(&low)];
            }
        }
        raised[index_of(&up)] = v;
    }
    let q = 4 - p;
    let mut out = vec![0.0; 4usize.pow(q as u32)];
    for j in all_indices(q) {
        let mut v = 0.0;
        for i in all_indices(p) {
            let mut full = i.clone();
            full.extend_from_slice(&j);
            let eps = permutation_sign(&full);
            if eps != 0.0 {
                v += raised[index_of(&i)] * eps;
            }
        }
        out[index_of(&j)] = sqrt_det * v / fact(p);
    }
    Ok(out)
}

/// Hodge star on `H³` for `h = (dx² + dy² + dz²)/z²` acting on forms in the
/// first three coordinates, embedded as forms on `M`.
fn hodge_star_h3(form: &Form, p: usize, z: f64) -> Result<Form> {
    let mut h = Matrix4::identity() / (z * z);
    // a unit fourth direction makes ⋆₄ restricted to spatial forms contract to ⋆₃ ∧ dθ
    h[(3, 3)] = 1.0;
    let star4 = hodge_star(form, p, &h)?;
    // strip the trailing dθ: (⋆₄α) = (⋆₃α)∧dθ
    let q = 3 - p;
    let mut out = vec![0.0; 4usize.pow(q as u32)];
    for idx in all_indices(q) {
        if idx.contains(&3) {
            continue;
        }
        let mut full = idx.clone();
        full.push(3);
        out[index_of(&idx)] = star4[index_of(&full)];
    }
    Ok(out)
}

fn basis_form(idx: &[usize]) -> Form {
    let p = idx.len();
    let mut out = vec![0.0; 4usize.pow(p as u32)];
    for perm in permutations(p) {
        let permuted: Vec<usize> = perm.iter().map(|&k| idx[k]).collect();
        out[index_of(&permuted)] = permutation_sign(&perm);
    }
    out
}

/// Max residual of `⋆̂α = V⁻¹(⋆α)∧ω` for spatial 2-forms and
/// `⋆̂(α∧ω) = V ⋆α` for spatial 1-forms, where the metric on `M` is built from
/// the Dirac connection of `V` and `ω` is the connection supplied.
pub fn hodge_identity_residuals(v: &MultiCenterPotential, omega: &DiracConnection, p: &MFramePoint) -> Result<f64> {
    let truth = DiracConnection::for_potential(v);
    let patches = truth.patches_at(&p.base());
    let c = p.coords();
    let g = metric_asd_in_gauge(v, &truth, &patches, &c)?;
    let vv = hyperbolic::potential(v, &p.base())?;
    let w: Form = omega_components(omega, &c, &patches)?.to_vec();
    let mut worst: f64 = 0.0;
    for pair in [[1usize, 2], [2, 0], [0, 1]] {
        let alpha = basis_form(&pair);
        let lhs = hodge_star(&alpha, 2, &g)?;
        let rhs: Form = wedge(&hodge_star_h3(&alpha, 2, p.z)?, 1, &w, 1).iter().map(|x| x / vv).collect();
        worst = worst.max(lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    for i in 0..3 {
        let alpha = basis_form(&[i]);
        let lhs = hodge_star(&wedge(&alpha, 1, &w, 1), 2, &g)?;
        let rhs: Form = hodge_star_h3(&alpha, 1, p.z)?.iter().map(|x| x * vv).collect();
        worst = worst.max(lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    Ok(worst)
}
