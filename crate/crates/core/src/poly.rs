//! Dense complex polynomials in one variable, coefficients in ascending order.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::C64;

pub fn eval(coeffs: &[C64], x: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

pub fn derivative(coeffs: &[C64]) -> Vec<C64> {
    coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect()
}

pub fn mul(p: &[C64], q: &[C64]) -> Vec<C64> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![C64::new(0.0, 0.0); p.len() + q.len() - 1];
    for (i, &a) in p.iter().enumerate() {
        for (j, &b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// `lead · Π (x - r)`.
pub fn from_roots(lead: C64, roots: &[C64]) -> Vec<C64> {
    roots.iter().fold(vec![lead], |acc, &r| mul(&acc, &[-r, C64::new(1.0, 0.0)]))
}

/// All complex roots by the Aberth–Ehrlich iteration.
///
/// Trailing zero coefficients (degree drop) are stripped first; the result has
/// `degree` entries. Multiple roots converge only to `O(ε^{1/m})`.
pub fn roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let mut p: Vec<C64> = coeffs.to_vec();
    while p.last().is_some_and(|c| c.norm() == 0.0) {
        p.pop();
    }
    if p.is_empty() {
        return Err(Error::Precondition("zero polynomial has no isolated roots".into()));
    }
    let n = p.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    // Exact zeros at the origin.
    let mut zeros = 0;
    while p[0].norm() == 0.0 {
        p.remove(0);
        zeros += 1;
    }
    let m = p.len() - 1;
    let mut out = vec![C64::new(0.0, 0.0); zeros];
    if m == 0 {
        return Ok(out);
    }
    let lead = p[m];
    let monic: Vec<C64> = p.iter().map(|c| c / lead).collect();
    let dp = derivative(&monic);
    // Cauchy bound radius for the initial circle.
    let radius = monic[..m]
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm().powf(1.0 / (m - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<C64> = (0..m)
        .map(|k| C64::from_polar(radius, 2.0 * PI * k as f64 / m as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..m {
            let pv = eval(&monic, z[i]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / eval(&dp, z[i]);
            let mut repulsion = C64::new(0.0, 0.0);
            for j in 0..m {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 0.0 {
                        repulsion += 1.0 / d;
                    }
                }
            }
            let step = ratio / (1.0 - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    out.extend(z);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn roots_recover_preassigned_values() {
        let rs = [c(1.0, 2.0), c(-0.5, 0.1), c(3.0, -1.0), c(0.0, 0.7)];
        let p = from_roots(c(2.0, -1.0), &rs);
        let found = roots(&p).unwrap();
        for r in rs {
            let best = found.iter().map(|f| (f - r).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-12, "{r} missing: {found:?}");
        }
    }

    #[test]
    fn zero_roots_and_degree_drop() {
        let p = vec![c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        let mut found = roots(&p).unwrap();
        found.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        assert_eq!(found.len(), 3);
        assert_eq!(found[0], c(0.0, 0.0));
        assert!((found[2] - 1.0).norm() < 1e-14);
    }

    #[test]
    fn eval_and_mul_agree() {
        let p = [c(1.0, 1.0), c(0.0, 2.0), c(-1.0, 0.0)];
        let q = [c(0.5, 0.0), c(1.0, -1.0)];
        let x = c(0.3, -0.8);
        assert!((eval(&mul(&p, &q), x) - eval(&p, x) * eval(&q, x)).norm() < 1e-14);
    }
}
