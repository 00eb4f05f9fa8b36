//! Finite-difference curvature of a 4-dimensional metric given as a sampler
//! `coords ↦ g_{ab}`.

use nalgebra::{Matrix4, Matrix6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Coords = [f64; 4];
pub type Tensor4 = [[[[f64; 4]; 4]; 4]; 4];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub scalar: f64,
    pub ricci_norm: f64,
    /// Norm of the self-dual Weyl tensor for the coordinate orientation.
    pub weyl_sd_norm: f64,
    /// Norm of the anti-self-dual Weyl tensor for the coordinate orientation.
    pub weyl_asd_norm: f64,
    pub riemann_norm: f64,
    pub step: f64,
}

fn shifted(p: &Coords, steps: &[(usize, f64)]) -> Coords {
    let mut q = *p;
    for &(i, d) in steps {
        q[i] += d;
    }
    q
}

/// First and second coordinate derivatives of the metric by fourth-order
/// central differences; coordinate `i` uses step `step * scales[i]`.
fn metric_jets<F>(metric: &F, p: &Coords, step: f64, scales: &Coords) -> Result<(Matrix4<f64>, [Matrix4<f64>; 4], [[Matrix4<f64>; 4]; 4])>
where
    F: Fn(&Coords) -> Result<Matrix4<f64>>,
{
    const W1: [(f64, f64); 4] = [(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)];
    const W2: [(f64, f64); 5] = [
        (-2.0, -1.0 / 12.0),
        (-1.0, 16.0 / 12.0),
        (0.0, -30.0 / 12.0),
        (1.0, 16.0 / 12.0),
        (2.0, -1.0 / 12.0),
    ];
    let g = metric(p)?;
    let h: Vec<f64> = scales.iter().map(|s| step * s).collect();
    let mut d1 = [Matrix4::zeros(); 4];
    let mut d2 = [[Matrix4::zeros(); 4]; 4];
    for i in 0..4 {
        for &(k, w) in &W1 {
            d1[i] += metric(&shifted(p, &[(i, k * h[i])]))? * w;
        }
        d1[i] /= h[i];
        for &(k, w) in &W2 {
            d2[i][i] += if k == 0.0 { g * w } else { metric(&shifted(p, &[(i, k * h[i])]))? * w };
        }
        d2[i][i] /= h[i] * h[i];
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            let mut acc = Matrix4::zeros();
            for &(ki, wi) in &W1 {
                for &(kj, wj) in &W1 {
                    acc += metric(&shifted(p, &[(i, ki * h[i]), (j, kj * h[j])]))? * (wi * wj);
                }
            }
            acc /= h[i] * h[j];
            d2[i][j] = acc;
            d2[j][i] = acc;
        }
    }
    Ok((g, d1, d2))
}

/// `R_{abcd}` in coordinates (all indices down) from metric jets.
fn riemann_from_jets(g: &Matrix4<f64>, d1: &[Matrix4<f64>; 4], d2: &[[Matrix4<f64>; 4]; 4]) -> Result<Tensor4> {
    let gi = g.try_inverse().ok_or_else(|| Error::Domain("metric is singular".into()))?;
    // Γ_{dbc} = ½(∂_b g_dc + ∂_c g_db - ∂_d g_bc) and its derivatives
    let mut gamma_low = [[[0.0; 4]; 4]; 4];
    let mut dgamma_low = [[[[0.0; 4]; 4]; 4]; 4];
    for d in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                gamma_low[d][b][c] = 0.5 * (d1[b][(d, c)] + d1[c][(d, b)] - d1[d][(b, c)]);
                for e in 0..4 {
                    dgamma_low[e][d][b][c] =
                        0.5 * (d2[e][b][(d, c)] + d2[e][c][(d, b)] - d2[e][d][(b, c)]);
                }
            }
        }
    }
    let mut gamma = [[[0.0; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                gamma[a][b][c] = (0..4).map(|d| gi[(a, d)] * gamma_low[d][b][c]).sum();
            }
        }
    }
    // R_{abcd} = ∂_cΓ_{adb} - ∂_dΓ_{acb} - Γ^e_{ac}Γ_{edb} + Γ^e_{ad}Γ_{ecb}
    let mut r = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let mut v = dgamma_low[c][a][d][b] - dgamma_low[d][a][c][b];
                    for e in 0..4 {
                        v += -gamma[e][a][c] * gamma_low[e][d][b] + gamma[e][a][d] * gamma_low[e][c][b];
                    }
                    r[a][b][c][d] = v;
                }
            }
        }
    }
    Ok(r)
}

/// Orthonormal frame `F` (columns are frame vectors) with `Fᵀ g F = 1` and
/// `det F > 0`.
pub fn orthonormal_frame(g: &Matrix4<f64>) -> Result<Matrix4<f64>> {
    let chol = g.cholesky().ok_or_else(|| Error::Domain("metric is not positive definite".into()))?;
    let l = chol.l();
    let inv = l.try_inverse().ok_or_else(|| Error::Domain("degenerate metric".into()))?;
    Ok(inv.transpose())
}

fn to_frame(r: &Tensor4, f: &Matrix4<f64>) -> Tensor4 {
    // contract one index at a time
    let mut cur = *r;
    for slot in 0..4 {
        let mut next = [[[[0.0; 4]; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let idx = [a, b, c, d];
                        let mut v = 0.0;
                        for m in 0..4 {
                            let mut src = idx;
                            src[slot] = m;
                            v += f[(m, idx[slot])] * cur[src[0]][src[1]][src[2]][src[3]];
                        }
                        next[a][b][c][d] = v;
                    }
                }
            }
        }
        cur = next;
    }
    cur
}

/// Riemann tensor in the orthonormal frame of [`orthonormal_frame`], with
/// Richardson extrapolation over `step` and `step/2`.
pub fn frame_riemann<F>(metric: &F, p: &Coords, step: f64, scales: &Coords) -> Result<Tensor4>
where
    F: Fn(&Coords) -> Result<Matrix4<f64>>,
{
    let (g, d1, d2) = metric_jets(metric, p, step, scales)?;
    let coarse = riemann_from_jets(&g, &d1, &d2)?;
    let (_, d1, d2) = metric_jets(metric, p, 0.5 * step, scales)?;
    let fine = riemann_from_jets(&g, &d1, &d2)?;
    let mut r = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    r[a][b][c][d] = (16.0 * fine[a][b][c][d] - coarse[a][b][c][d]) / 15.0;
                }
            }
        }
    }
    Ok(to_frame(&r, &orthonormal_frame(&g)?))
}

const BIVECTORS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2)];

/// Curvature summary from a frame Riemann tensor. The Hodge star on 2-forms is
/// taken with `e⁰∧e¹∧e²∧e³` positive, so `*(e⁰∧e¹) = e²∧e³` and cyclically.
pub fn report_from_frame(r: &Tensor4, step: f64) -> CurvatureReport {
    let mut ric = [[0.0; 4]; 4];
    for b in 0..4 {
        for d in 0..4 {
            ric[b][d] = (0..4).map(|a| r[a][b][a][d]).sum();
        }
    }
    let scalar: f64 = (0..4).map(|a| ric[a][a]).sum();
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let mut w = Matrix6::zeros();
    for (i, &(a, b)) in BIVECTORS.iter().enumerate() {
        for (j, &(c, d)) in BIVECTORS.iter().enumerate() {
            let weyl = r[a][b][c][d]
                - 0.5
                    * (delta(a, c) * ric[b][d] - delta(a, d) * ric[b][c] - delta(b, c) * ric[a][d]
                        + delta(b, d) * ric[a][c])
                + scalar / 6.0 * (delta(a, c) * delta(b, d) - delta(a, d) * delta(b, c));
            w[(i, j)] = weyl;
        }
    }
    let mut star = Matrix6::zeros();
    for i in 0..3 {
        star[(i, i + 3)] = 1.0;
        star[(i + 3, i)] = 1.0;
    }
    let id = Matrix6::identity();
    let plus = (id + star) * 0.5;
    let minus = (id - star) * 0.5;
    let ricci_norm = ric.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    let riemann_norm = r.iter().flatten().flatten().flatten().map(|v| v * v).sum::<f64>().sqrt();
    CurvatureReport {
        scalar,
        ricci_norm,
        weyl_sd_norm: (plus * w * plus).norm(),
        weyl_asd_norm: (minus * w * minus).norm(),
        riemann_norm,
        step,
    }
}

/// Scalar, Ricci and Weyl± norms of `metric` at `p`.
pub fn curvature<F>(metric: &F, p: &Coords, step: f64, scales: &Coords) -> Result<CurvatureReport>
where
    F: Fn(&Coords) -> Result<Matrix4<f64>>,
{
    Ok(report_from_frame(&frame_riemann(metric, p, step, scales)?, step))
}

/// Fourth-order central derivative of a matrix-valued function along
/// coordinate `i`.
pub fn matrix_derivative<F>(f: &F, p: &Coords, i: usize, h: f64) -> Result<Matrix4<f64>>
where
    F: Fn(&Coords) -> Result<Matrix4<f64>>,
{
    let at = |k: f64| f(&shifted(p, &[(i, k * h)]));
    Ok((at(-2.0)? - at(2.0)? + (at(1.0)? - at(-1.0)?) * 8.0) / (12.0 * h))
}

/// Second-order central derivative, for order checks.
pub fn matrix_derivative_second_order<F>(f: &F, p: &Coords, i: usize, h: f64) -> Result<Matrix4<f64>>
where
    F: Fn(&Coords) -> Result<Matrix4<f64>>,
{
    Ok((f(&shifted(p, &[(i, h)]))? - f(&shifted(p, &[(i, -h)]))?) / (2.0 * h))
}
