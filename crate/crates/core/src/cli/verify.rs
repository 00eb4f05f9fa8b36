//! The invariant suite behind `monopoles verify`.

use std::f64::consts::{E, PI};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Module, RunConfig};
use crate::error::Result;
use crate::euclidean::{self, charge1_eta, l2_patch_transition, l2_patch_transition_inverse};
use crate::extended::ExtComplex;
use crate::hyperbolic::{self, MultiCenterPotential, OrientedGeodesic, PointUHS};
use crate::metric::{self, DiracConnection, KahlerStructure, MFramePoint};
use crate::scattering::{self, EuclideanLine, PrasadSommerfield};
use crate::series::{Series, DEFAULT_TERMS};
use crate::spectral;
use crate::symplectic::{
    self, gram_matrix, numerical_rank, omega_d_contour, omega_d_residue, Sheet, SheetData, SheetTangent,
    TangentVector,
};
use crate::twistor::{self, TwistorPoint};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|measured - expected| <= tolerance`
    Within,
    /// `measured <= tolerance`
    AtMost,
    /// `measured >= tolerance`
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub module: Module,
    pub anchor: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    pub runtime_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub modules: Vec<Module>,
    pub records: Vec<CheckRecord>,
    pub passed: usize,
    pub failed: usize,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

struct Check {
    id: &'static str,
    anchor: &'static str,
    expected: f64,
    tolerance: f64,
    comparison: Comparison,
}

impl Check {
    fn within(id: &'static str, anchor: &'static str, expected: f64, tolerance: f64) -> Self {
        Check { id, anchor, expected, tolerance, comparison: Comparison::Within }
    }

    fn at_most(id: &'static str, anchor: &'static str, tolerance: f64) -> Self {
        Check { id, anchor, expected: 0.0, tolerance, comparison: Comparison::AtMost }
    }

    fn at_least(id: &'static str, anchor: &'static str, tolerance: f64) -> Self {
        Check { id, anchor, expected: tolerance, tolerance, comparison: Comparison::AtLeast }
    }

    fn run(self, module: Module, f: impl FnOnce() -> Result<f64>) -> CheckRecord {
        let start = Instant::now();
        let outcome = f();
        let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        let (measured, error) = match outcome {
            Ok(v) => (v, None),
            Err(e) => (f64::NAN, Some(e.to_string())),
        };
        let pass = match self.comparison {
            Comparison::Within => (measured - self.expected).abs() <= self.tolerance,
            Comparison::AtMost => measured <= self.tolerance,
            Comparison::AtLeast => measured >= self.tolerance,
        };
        CheckRecord {
            id: self.id.to_string(),
            module,
            anchor: self.anchor.to_string(),
            measured,
            expected: self.expected,
            tolerance: self.tolerance,
            comparison: self.comparison,
            pass,
            runtime_ms,
            error,
        }
    }
}

fn rng_for(seed: u64, module: Module) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(module as u64);
    rng
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn random_complex(rng: &mut ChaCha8Rng, scale: f64) -> C64 {
    c(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

fn random_point(rng: &mut ChaCha8Rng) -> PointUHS {
    PointUHS::new_unchecked(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5), rng.gen_range(0.3..2.5))
}

/// Runs the suite; modules run concurrently, records come back in the fixed
/// module order.
pub fn run(config: &RunConfig) -> Result<VerificationReport> {
    config.validate()?;
    let modules: Vec<Module> = match config.verify.only {
        Some(m) => vec![m],
        None => Module::ALL.to_vec(),
    };
    let records: Vec<CheckRecord> = modules
        .par_iter()
        .map(|&m| module_checks(m, config))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let failed = records.iter().filter(|r| !r.pass).count();
    Ok(VerificationReport { seed: config.seed, modules, passed: records.len() - failed, failed, records })
}

fn module_checks(module: Module, config: &RunConfig) -> Result<Vec<CheckRecord>> {
    let mut rng = rng_for(config.seed, module);
    Ok(match module {
        Module::Hyperbolic => hyperbolic_checks(config, &mut rng),
        Module::Twistor => twistor_checks(config, &mut rng),
        Module::Spectral => spectral_checks(config, &mut rng)?,
        Module::Metric => metric_checks(config, &mut rng)?,
        Module::Euclidean => euclidean_checks(config, &mut rng),
        Module::Symplectic => symplectic_checks(config, &mut rng),
        Module::Scattering => scattering_checks(config),
    })
}

fn hyperbolic_checks(config: &RunConfig, rng: &mut ChaCha8Rng) -> Vec<CheckRecord> {
    let m = Module::Hyperbolic;
    let n = config.verify.random_samples;
    let origin = PointUHS::origin();
    let mut out = Vec::new();
    out.push(Check::within("hyperbolic.axis_distance", "distance from O to (0,0,e) along the vertical axis", 1.0, 4.0 * f64::EPSILON).run(m, || {
        Ok(hyperbolic::dist(&origin, &PointUHS::new(0.0, 0.0, E)?))
    }));
    let samples: Vec<(OrientedGeodesic, f64)> = (0..n)
        .map(|_| {
            let start = ExtComplex::Finite(random_complex(rng, 3.0));
            let end = if rng.gen_bool(0.2) { ExtComplex::Infinity } else { ExtComplex::Finite(random_complex(rng, 3.0)) };
            (OrientedGeodesic { start, end }, rng.gen_range(-3.0..3.0))
        })
        .collect();
    out.push(Check::at_most("hyperbolic.pythagoras", "cosh ρ(γ(t),O) = cosh ρ(γ(0),O) cosh t", 1e-10).run(m, || {
        let mut worst: f64 = 0.0;
        for (g, t) in &samples {
            let lhs = hyperbolic::cosh_dist(&hyperbolic::geodesic_point(g, &origin, *t), &origin);
            let rhs = hyperbolic::cosh_dist(&hyperbolic::geodesic_point(g, &origin, 0.0), &origin) * t.cosh();
            worst = worst.max((lhs - rhs).abs() / rhs);
        }
        Ok(worst)
    }));
    out.push(Check::within("hyperbolic.busemann_limit", "Busemann function as the limit t - ρ(x, γ(t)) at t = 30", -1.0, 1e-6).run(m, || {
        let u = ExtComplex::finite(0.0, 0.0);
        let gamma = OrientedGeodesic::through(&origin, u);
        let x = PointUHS::new(0.0, 0.0, E)?;
        Ok(30.0 - hyperbolic::dist(&x, &hyperbolic::geodesic_point(&gamma, &origin, 30.0)))
    }));
    out.push(Check::within("hyperbolic.busemann_log_height", "e^b = z for the point at infinity", 2.0, 1e-14).run(m, || {
        Ok(hyperbolic::busemann(ExtComplex::Infinity, &origin, &PointUHS::new(0.3, -0.2, E * E)?))
    }));
    let boundary: Vec<ExtComplex> = (0..n).map(|_| ExtComplex::Finite(random_complex(rng, 4.0))).collect();
    out.push(Check::at_most("hyperbolic.height_normalisation", "horospherical height q_u(O) = 1", 4.0 * f64::EPSILON).run(m, || {
        Ok(boundary
            .iter()
            .chain(std::iter::once(&ExtComplex::Infinity))
            .map(|&u| (hyperbolic::horospherical_height(u, &origin, &origin) - 1.0).abs())
            .fold(0.0, f64::max))
    }));
    out.push(Check::at_most("hyperbolic.green_harmonic", "Laplacian of G_p vanishes away from p", 1e-6).run(m, || {
        let p = PointUHS::new(0.1, 0.2, 1.0)?;
        let mut worst: f64 = 0.0;
        for x in [PointUHS::new(0.1, 0.2, 2.0)?, PointUHS::new(0.9, -0.4, 0.7)?, PointUHS::new(-0.6, 0.5, 1.8)?] {
            let lap = hyperbolic::hyperbolic_laplacian(|y| hyperbolic::green(&p, y).unwrap_or(f64::NAN), &x, 1e-2);
            worst = worst.max(lap.abs());
        }
        Ok(worst)
    }));
    out.push(Check::within("hyperbolic.green_limit", "2ρ G(ρ) → 1 as ρ → 0", 1.0, 1e-3).run(m, || {
        let rhos: Vec<f64> = (0..6).map(|k| 0.1 / 2f64.powi(k)).collect();
        let vals: Vec<f64> = rhos.iter().map(|&r| 2.0 * r * hyperbolic::green_of_distance(r)).collect();
        Ok(metric::neville_at_zero(&rhos, &vals))
    }));
    out
}

fn twistor_checks(config: &RunConfig, rng: &mut ChaCha8Rng) -> Vec<CheckRecord> {
    let m = Module::Twistor;
    let n = config.verify.random_samples;
    let mut out = Vec::new();
    out.push(Check::within("twistor.gamma_integral", "|∫ 2/(1+|ζ|²)² dζ∧dζ̄| = 4π", 4.0 * PI, 1e-8).run(m, || {
        Ok(twistor::gamma_l_integral().norm())
    }));
    let pairs: Vec<(C64, C64)> = (0..n).map(|_| (random_complex(rng, 2.0), random_complex(rng, 2.0))).collect();
    out.push(Check::at_most("twistor.sigma_involution", "σ∘σ = id", 1e-12).run(m, || {
        let mut worst: f64 = 0.0;
        for &(z, w) in &pairs {
            let p = TwistorPoint::finite(z, w)?;
            let back = twistor::sigma(&twistor::sigma(&p));
            worst = worst.max(back.z.chordal_distance(&p.z)).max(back.w.chordal_distance(&p.w));
        }
        Ok(worst)
    }));
    out.push(Check::at_most("twistor.closest_point_distance", "cosh ρ(O, f(z,w)) agrees with the endpoint formula", 1e-10).run(m, || {
        let mut worst: f64 = 0.0;
        for &(z, w) in &pairs {
            let f = twistor::closest_point(&TwistorPoint::finite(z, w)?);
            let direct = hyperbolic::cosh_dist(&f, &PointUHS::origin());
            let closed = twistor::cosh_rho_endpoints(z, w)?;
            worst = worst.max((direct - closed).abs() / closed);
        }
        Ok(worst)
    }));
    out.push(Check::at_most("twistor.diagonal_jacobian", "derivatives of the closest-point map on the diagonal", 1e-8).run(m, || {
        let mut worst: f64 = 0.0;
        for &(z, _) in &pairs {
            let numeric = twistor::closest_point_wirtinger(z, z);
            let closed = twistor::diagonal_jacobian_closed_form(z);
            for a in 0..3 {
                for (col, num_col) in [0usize, 1, 3].into_iter().enumerate() {
                    worst = worst.max((numeric[a][num_col] - closed[a][col]).norm());
                }
            }
        }
        Ok(worst)
    }));
    let forms: Vec<(C64, [[f64; 3]; 3])> = (0..n)
        .map(|_| {
            let mut om = [[0.0; 3]; 3];
            for a in 0..3 {
                for b in (a + 1)..3 {
                    om[a][b] = rng.gen_range(-1.0..1.0);
                    om[b][a] = -om[a][b];
                }
            }
            (random_complex(rng, 2.0), om)
        })
        .collect();
    out.push(Check::at_most("twistor.a2_plus_a4", "a₂ + a₄ = 0 on the diagonal", 1e-8).run(m, || {
        Ok(forms
            .iter()
            .map(|(z, om)| {
                let (a2, a4) = twistor::pullback_a2_a4(*z, *z, om);
                (a2 + a4).norm()
            })
            .fold(0.0, f64::max))
    }));
    out
}

fn random_configuration(rng: &mut ChaCha8Rng) -> Result<MultiCenterPotential> {
    let n = rng.gen_range(1..=4);
    let centers: Vec<PointUHS> = (0..n)
        .map(|_| PointUHS::new_unchecked(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(0.3..3.0)))
        .collect();
    let charges: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
    MultiCenterPotential::for_mass(rng.gen_range(0.0..2.0), centers, charges)
}

fn spectral_checks(config: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let m = Module::Spectral;
    let samples = (config.verify.random_samples / 10).max(5);
    let mut cases = Vec::with_capacity(samples);
    for _ in 0..samples {
        cases.push((random_configuration(rng)?, random_point(rng), rng.gen_range(0.0..std::f64::consts::TAU)));
    }
    let v = config.monopole.potential()?;
    let [qx, qy, qz] = config.spectral.q;
    let q = PointUHS::new(qx, qy, qz)?;
    let mut out = Vec::new();
    out.push(Check::at_most("spectral.factorisation", "x·y reconstructs p̃ on the twistor line", 1e-10).run(m, || {
        let mut worst: f64 = 0.0;
        for (v, q, _) in &cases {
            worst = worst.max(spectral::lift_twistor_line(q, v, c(1.0, 0.0))?.product_residual(64));
        }
        Ok(worst)
    }));
    out.push(Check::at_most("spectral.reality", "x = y* pointwise", 1e-10).run(m, || {
        let mut worst: f64 = 0.0;
        for (v, q, phase) in &cases {
            worst = worst.max(spectral::lift_twistor_line(q, v, C64::from_polar(1.0, *phase))?.reality_residual(64));
        }
        Ok(worst)
    }));
    out.push(Check::at_most("spectral.phase_invariance", "the divisor does not depend on the U(1) phase", 1e-12).run(m, || {
        let mut worst: f64 = 0.0;
        for (v, q, phase) in &cases {
            let a = spectral::lift_twistor_line(q, v, c(1.0, 0.0))?;
            let b = spectral::lift_twistor_line(q, v, C64::from_polar(1.0, *phase))?;
            for (d, e) in a.divisor.iter().zip(&b.divisor) {
                worst = worst.max((d.zeta - e.zeta).norm());
                if d.multiplicity != e.multiplicity {
                    worst = f64::INFINITY;
                }
            }
        }
        Ok(worst)
    }));
    out.push(Check::at_most("spectral.lift_residual", "xy = p̃ on a 64-point grid for the configured monopole", 1e-10).run(m, || {
        Ok(spectral::lift_twistor_line(&q, &v, C64::from_polar(1.0, config.spectral.phase))?.product_residual(64))
    }));
    out.push(Check::at_least("spectral.divisor_conditions", "|D| ∩ σ|D| = ∅ and D + σ(D) = div p̃²|_S (1 = both hold)", 1.0).run(m, || {
        let data = spectral::lift_twistor_line(&q, &v, c(1.0, 0.0))?;
        let target = spectral::restricted_ptilde_squared_divisor(&data)?;
        let holds = data.divisor_is_disjoint_from_conjugate(1e-6)
            && spectral::multisets_agree(&data.divisor_with_conjugate(), &target, 1e-3);
        Ok(if holds { 1.0 } else { 0.0 })
    }));
    out.push(Check::at_most("spectral.genus", "genus (k-1)² for k = 1, 2, 5", 0.0).run(m, || {
        let mut defect = 0.0;
        for (k, g) in [(1u32, 0u32), (2, 1), (5, 16)] {
            defect += (spectral::genus_of_spectral_curve(k)? as f64 - g as f64).abs();
        }
        Ok(defect)
    }));
    Ok(out)
}

/// Six boundary points: the horospherical gauges sampled by the metric checks.
pub const GAUGES: [Option<(f64, f64)>; 6] =
    [None, Some((0.0, 0.0)), Some((1.0, 0.0)), Some((0.0, 1.0)), Some((-1.2, 0.5)), Some((2.0, -1.5))];

pub fn gauge_point(g: Option<(f64, f64)>) -> ExtComplex {
    match g {
        None => ExtComplex::Infinity,
        Some((re, im)) => ExtComplex::finite(re, im),
    }
}

/// Random points at hyperbolic distance at least `margin` from every center.
fn points_away_from_centers(rng: &mut ChaCha8Rng, v: &MultiCenterPotential, count: usize, margin: f64) -> Vec<MFramePoint> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = random_point(rng);
        if v.centers().iter().all(|p| hyperbolic::dist(p, &x) > margin) {
            out.push(MFramePoint { x: x.x, y: x.y, z: x.z, theta: rng.gen_range(0.0..std::f64::consts::TAU) });
        }
    }
    out
}

fn metric_checks(config: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> {
    let m = Module::Metric;
    let v = config.monopole.potential()?;
    let step = config.tolerances.metric_step;
    let conn = DiracConnection::for_potential(&v).with_perturbation(config.verify.broken_connection);
    let points = points_away_from_centers(rng, &v, config.verify.random_samples.max(6), 0.3);
    let gauge_points = &points[..GAUGES.len()];
    let mut out = Vec::new();
    out.push(Check::at_most("metric.connection_curvature", "dω = *dV away from centers and strings", 1e-8).run(m, || {
        let worst = points
            .par_iter()
            .map(|p| conn.curvature_residual(&v, &p.base(), 1e-3))
            .collect::<Result<Vec<_>>>()?;
        Ok(worst.into_iter().fold(0.0, f64::max))
    }));
    out.push(Check::at_most("metric.hodge_identities", "Hodge star of the circle-bundle metric against the base star", 1e-10).run(m, || {
        let worst = points
            .par_iter()
            .map(|p| metric::hodge_identity_residuals(&v, &conn, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(worst.into_iter().fold(0.0, f64::max))
    }));
    // Curvature, dΩ and Nijenhuis share one batch; its cost is charged to the
    // first check that reads it.
    let batch = std::cell::OnceCell::new();
    let reports = || {
        batch
            .get_or_init(|| {
                GAUGES
                    .par_iter()
                    .zip(gauge_points)
                    .map(|(&g, p)| {
                        let k = KahlerStructure::new(&v, gauge_point(g));
                        Ok((k.curvature(p, step)?, k.d_omega_residual(p, 1e-3)?, k.nijenhuis_residual(p, 1e-3)?))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .clone()
    };
    let max_of = |f: &dyn Fn(&(metric::CurvatureReport, f64, f64)) -> f64| -> Result<f64> {
        Ok(reports()?.iter().map(f).fold(0.0, f64::max))
    };
    out.push(Check::at_most("metric.scalar_flat", "scalar curvature of the Kähler metrics in six gauges", 1e-4).run(m, || {
        max_of(&|r| r.0.scalar.abs())
    }));
    out.push(Check::at_most("metric.anti_self_dual", "self-dual Weyl part in the coordinate orientation", 1e-4).run(m, || {
        max_of(&|r| r.0.weyl_sd_norm)
    }));
    if !v.is_empty() {
        out.push(Check::at_least("metric.weyl_nonzero", "anti-self-dual Weyl part is present with centers", 1e-3).run(m, || {
            Ok(reports()?.iter().map(|r| r.0.weyl_asd_norm).fold(f64::INFINITY, f64::min))
        }));
    }
    out.push(Check::at_most("metric.kahler_closed", "dΩ = 0", 1e-6).run(m, || max_of(&|r| r.1)));
    out.push(Check::at_most("metric.integrable", "Nijenhuis tensor of J vanishes", 1e-6).run(m, || max_of(&|r| r.2)));
    out.push(Check::at_most("metric.flat_fixture", "V ≡ 1 gives the flat metric dx²+dy²+dz²+z²dθ²", 1e-5).run(m, || {
        let k = KahlerStructure::new(&MultiCenterPotential::constant(1.0), ExtComplex::Infinity);
        Ok(k.curvature(&points[0], step)?.riemann_norm)
    }));
    out.push(Check::at_most("metric.conformal_gauges", "metrics of two gauges differ by (q_u1/q_u2)²", 1e-10).run(m, || {
        let mut worst: f64 = 0.0;
        for (w, p) in GAUGES.windows(2).zip(&points) {
            worst = worst.max(metric::conformal_gauge_factor(&v, gauge_point(w[0]), gauge_point(w[1]), p)?.1);
        }
        Ok(worst)
    }));
    for i in 0..v.len() {
        let expected = v.charges()[i] as f64;
        out.push(Check::within("metric.abelian_charge", "2 lim ρ V at a center recovers its charge", expected, 1e-3).run(m, || {
            metric::abelian_charge(&v, i)
        }));
    }
    Ok(out)
}

fn euclidean_checks(config: &RunConfig, rng: &mut ChaCha8Rng) -> Vec<CheckRecord> {
    let m = Module::Euclidean;
    let n = (config.verify.random_samples / 10).max(5);
    let centers: Vec<[f64; 3]> = (0..n).map(|_| [0; 3].map(|_| rng.gen_range(-1.0..1.0))).collect();
    let mut out = Vec::new();
    out.push(Check::at_most("euclidean.l2_overlap", "u₁ = e^{-2η/ζ} u₀ on |ζ| = 1", 1e-10).run(m, || {
        let mut worst: f64 = 0.0;
        for &p in &centers {
            let t = euclidean::l2_trivialization(&euclidean::charge1_curve(p))?;
            for j in 0..64 {
                let zeta = C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / 64.0);
                let lhs = t.u1(1.0 / zeta);
                let rhs = (-2.0 * charge1_eta(p, zeta) / zeta).exp() * t.u0(zeta);
                worst = worst.max((lhs - rhs).norm() / rhs.norm());
            }
        }
        Ok(worst)
    }));
    // |ζ| ∈ [1/2, 2]: the roundtrip multiplies by e^{η/ζ} and back, which costs
    // about |η/ζ| ulps.
    let triples: Vec<[C64; 3]> = (0..config.verify.random_samples)
        .map(|_| {
            let zeta = C64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
            let u = C64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
            [zeta, random_complex(rng, 1.0), u]
        })
        .collect();
    out.push(Check::at_most("euclidean.patch_roundtrip", "chart change of L² minus the zero section and its inverse", 1e-14).run(m, || {
        let mut worst: f64 = 0.0;
        for &[z, e, u] in &triples {
            let (zt, et, ut) = l2_patch_transition(z, e, u)?;
            let (z2, e2, u2) = l2_patch_transition_inverse(zt, et, ut)?;
            worst = worst
                .max((z2 - z).norm() / z.norm())
                .max((e2 - e).norm() / (1.0 + e.norm()))
                .max((u2 - u).norm() / u.norm());
        }
        Ok(worst)
    }));
    out.push(Check::at_most("euclidean.closest_point_dzbar", "∂f/∂ζ̄ = 0 along the zero section", 1e-8).run(m, || {
        Ok(triples
            .iter()
            .flat_map(|t| euclidean::closest_point_euc_dzbar(c(0.0, 0.0), t[0]))
            .map(|d| d.norm())
            .fold(0.0, f64::max))
    }));
    out
}

/// Random holomorphic sheet data with `k` sheets, `uᵢ = exp(polynomial)`, and two
/// tangent vectors marked at `ζ₀` off the unit circle.
pub fn synthetic_instance(rng: &mut ChaCha8Rng, k: usize) -> Result<(TangentVector, TangentVector, SheetData)> {
    let zeta0 = {
        let r = if rng.gen_bool(0.5) { rng.gen_range(0.3..0.8) } else { rng.gen_range(1.3..2.5) };
        C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
    };
    let poly = |rng: &mut ChaCha8Rng, degree: usize, scale: f64| -> Vec<C64> {
        (0..=degree).map(|_| random_complex(rng, scale)).collect()
    };
    let sheets = (0..k)
        .map(|_| Sheet {
            eta: Series::taylor(poly(rng, 2, 1.0)),
            u: Series::exp_of_polynomial(&poly(rng, 2, 0.5), DEFAULT_TERMS),
        })
        .collect();
    let tangent = |rng: &mut ChaCha8Rng| -> Result<TangentVector> {
        let marker = Series::marker(zeta0, c(1.0, 0.0));
        let sheets = (0..k)
            .map(|_| SheetTangent {
                eta: marker.mul(&Series::taylor(poly(rng, 2, 1.0)), 8),
                u: marker.mul(&Series::taylor(poly(rng, 2, 1.0)), 8),
            })
            .collect();
        TangentVector::marked_at(sheets, zeta0)
    };
    Ok((tangent(rng)?, tangent(rng)?, SheetData { sheets }))
}

fn symplectic_checks(config: &RunConfig, rng: &mut ChaCha8Rng) -> Vec<CheckRecord> {
    let m = Module::Symplectic;
    let nodes = config.tolerances.contour_nodes;
    let instances: Vec<Result<(TangentVector, TangentVector, SheetData)>> = (0..config.symplectic.instances)
        .map(|j| synthetic_instance(rng, 1 + j % config.symplectic.max_sheets))
        .collect();
    let mut out = Vec::new();
    out.push(Check::at_most("symplectic.contour_vs_residue", "contour integral equals the residue sum", 1e-8).run(m, || {
        let mut worst: f64 = 0.0;
        for inst in &instances {
            let (x1, x2, sheets) = inst.as_ref().map_err(Clone::clone)?;
            let residue = omega_d_residue(x1, x2, sheets)?;
            let contour = omega_d_contour(x1, x2, sheets, nodes)?;
            worst = worst.max((residue - contour).norm() / (1.0 + residue.norm()));
        }
        Ok(worst)
    }));
    out.push(Check::within("symplectic.hand_example", "k = 1, u ≡ 1, marked unit vectors give ω = 1", 1.0, 1e-12).run(m, || {
        let z0 = c(2.0, 0.5);
        let zero = Series::constant(c(0.0, 0.0));
        let sheets = SheetData { sheets: vec![Sheet { eta: zero.clone(), u: Series::constant(c(1.0, 0.0)) }] };
        let x1 = TangentVector::marked_at(vec![SheetTangent { eta: Series::marker(z0, c(1.0, 0.0)), u: zero.clone() }], z0)?;
        let x2 = TangentVector::marked_at(vec![SheetTangent { eta: zero, u: Series::marker(z0, c(1.0, 0.0)) }], z0)?;
        let contour = omega_d_contour(&x1, &x2, &sheets, nodes)?;
        Ok(contour.re + contour.im.abs())
    }));
    out.push(Check::at_most("symplectic.radius_independence", "contour value is the same on |ζ| = 0.9 and 1.1", 1e-8).run(m, || {
        let mut worst: f64 = 0.0;
        for inst in instances.iter().take(10) {
            let (x1, x2, sheets) = inst.as_ref().map_err(Clone::clone)?;
            let zeta0 = x1.marked.unwrap_or_default().norm();
            if (zeta0 - 1.0).abs() < 0.2 {
                continue;
            }
            let a = symplectic::omega_d_contour_radius(x1, x2, sheets, nodes, 0.9)?;
            let b = symplectic::omega_d_contour_radius(x1, x2, sheets, nodes, 1.1)?;
            worst = worst.max((a - b).norm() / (1.0 + a.norm()));
        }
        Ok(worst)
    }));
    out.push(Check::at_most("symplectic.gram_rank", "2k marked vectors give a Gram matrix of rank 2k (defect)", 0.0).run(m, || {
        let mut defect = 0usize;
        for k in 1..=config.symplectic.max_sheets {
            let (x, _, sheets) = synthetic_instance(&mut aux_rng(config.seed, k as u64), k)?;
            let zeta0 = x.marked.unwrap_or_default();
            let mut vectors = Vec::with_capacity(2 * k);
            for i in 0..k {
                for slot in 0..2 {
                    let mut tangents: Vec<SheetTangent> = (0..k)
                        .map(|_| SheetTangent { eta: Series::constant(c(0.0, 0.0)), u: Series::constant(c(0.0, 0.0)) })
                        .collect();
                    let marker = Series::marker(zeta0, c(1.0, 0.0));
                    if slot == 0 {
                        tangents[i].eta = marker;
                    } else {
                        tangents[i].u = marker;
                    }
                    vectors.push(TangentVector::marked_at(tangents, zeta0)?);
                }
            }
            defect += 2 * k - numerical_rank(&gram_matrix(&vectors, &sheets)?, 1e-10);
        }
        Ok(defect as f64)
    }));
    out.push(Check::at_most("symplectic.rho_chart_sign", "ρ pulled back through the chart change is -ρ in the frames s̃ = ζs", 1e-10).run(m, || {
        let mut local = aux_rng(config.seed, 0);
        let mut worst: f64 = 0.0;
        for _ in 0..config.verify.random_samples.max(1) {
            let z = random_complex(&mut local, 2.0) + 0.2;
            let e = random_complex(&mut local, 2.0);
            let u = random_complex(&mut local, 2.0) + 0.2;
            let vs = [0; 3].map(|_| [0; 3].map(|_| random_complex(&mut local, 1.0)));
            let (zt, et, ut) = l2_patch_transition(z, e, u)?;
            let pushed = [
                euclidean::l2_patch_pushforward(z, e, u, vs[0])?,
                euclidean::l2_patch_pushforward(z, e, u, vs[1])?,
                euclidean::l2_patch_pushforward(z, e, u, vs[2])?,
            ];
            let here = symplectic::rho_form(z, e, u, vs)?;
            let there = symplectic::rho_form(zt, et, ut, pushed)?;
            worst = worst.max((there * z.powi(4) / here - symplectic::RHO_CHART_SIGN).norm());
        }
        Ok(worst)
    }));
    out
}

/// A stream independent of the module streams, so that checks drawing from it
/// do not shift each other's samples.
fn aux_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1000 + stream);
    rng
}

fn scattering_checks(config: &RunConfig) -> Vec<CheckRecord> {
    let m = Module::Scattering;
    let tol = config.tolerances.ode;
    let horizon = scattering::EUCLIDEAN_HORIZON;
    let mut out = Vec::new();
    out.push(Check::at_most("scattering.arcsinh_identity", "∫ l/(2√(t²+|z|²)) dt = l sinh⁻¹(δ/|z|)", 1e-10).run(m, || {
        let mut worst: f64 = 0.0;
        for l in [1.0, 2.0, 3.0] {
            for z in [1e-2f64, 1e-3, 1e-5] {
                let exact = l * (0.5 / z).asinh();
                worst = worst.max((scattering::inverse_distance_integral(l, 0.5, z)? - exact).abs() / exact);
            }
        }
        Ok(worst)
    }));
    let impacts: Vec<f64> = (0..7).map(|k| 10f64.powf(-2.0 - 0.5 * k as f64)).collect();
    for (l, id) in [(1u32, "scattering.growth_l1"), (2, "scattering.growth_l2"), (3, "scattering.growth_l3")] {
        out.push(Check::within(id, "log ‖H(z)‖ grows like l log(1/|z|)", l as f64, 0.05 * l as f64).run(m, || {
            let v = MultiCenterPotential::for_mass(
                1.0,
                vec![PointUHS::new(0.2, 0.1, 0.8)?, PointUHS::new(-1.0, 0.5, 1.5)?],
                vec![l, 1],
            )?;
            Ok(scattering::abelian_growth_exponent(&v, 0, 0.5, &impacts, tol)?.fit.slope)
        }));
    }
    out.push(Check::at_most("scattering.through_center", "lines through the monopole are spectral", 1e-6).run(m, || {
        let lines = [
            EuclideanLine::new([0.0, 0.0, 0.0], [1.0, 0.0, 0.0])?,
            EuclideanLine::new([0.0, 0.0, 0.0], [0.3, -0.5, 0.8])?,
        ];
        let records = scattering::scan_lines(&lines, horizon, tol)?;
        Ok(records.iter().map(|r| r.indicator).fold(0.0, f64::max))
    }));
    out.push(Check::at_least("scattering.unit_impact", "a line at distance 1 is not spectral", 0.1).run(m, || {
        scattering::spectral_indicator(&PrasadSommerfield { line: EuclideanLine::new([0.0, 1.0, 0.0], [1.0, 0.0, 0.0])? }, horizon, tol)
    }));
    out.push(Check::at_most("scattering.far_family", "‖M_γ‖ stays bounded on lines with ‖x‖ ∈ [5, 20]", 4.0).run(m, || {
        let lines = [5.0, 10.0, 20.0]
            .iter()
            .flat_map(|&r| {
                [([r, 0.0, 0.0], [0.0, 1.0, 0.0]), ([0.0, 0.0, r], [0.6, 0.0, 0.8])]
                    .map(|(p, d)| EuclideanLine::new(p, d))
            })
            .collect::<Result<Vec<_>>>()?;
        let records = scattering::scan_lines(&lines, horizon, tol)?;
        Ok(records.iter().map(|r| r.m_gamma.unwrap_or(f64::INFINITY)).fold(0.0, f64::max))
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparisons() {
        let r = Check::within("a", "b", 1.0, 0.1).run(Module::Hyperbolic, || Ok(1.05));
        assert!(r.pass);
        let r = Check::at_most("a", "b", 0.1).run(Module::Hyperbolic, || Ok(0.2));
        assert!(!r.pass);
        let r = Check::at_least("a", "b", 0.1).run(Module::Hyperbolic, || Ok(0.2));
        assert!(r.pass);
        let r = Check::at_least("a", "b", 0.1).run(Module::Hyperbolic, || Err(crate::Error::Range("x".into())));
        assert!(!r.pass && r.error.is_some() && r.measured.is_nan());
    }

    #[test]
    fn synthetic_instances_are_marked_and_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 1..=3 {
            let (x1, x2, sheets) = synthetic_instance(&mut rng, k).unwrap();
            assert_eq!(sheets.k(), k);
            let r = omega_d_residue(&x1, &x2, &sheets).unwrap();
            let q = omega_d_contour(&x1, &x2, &sheets, 2048).unwrap();
            assert!((r - q).norm() < 1e-8 * (1.0 + r.norm()));
        }
    }
}
