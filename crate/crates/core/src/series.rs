//! Truncated Laurent series `Σ_{n ≥ lowest} cₙ ζⁿ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

pub const DEFAULT_TERMS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    lowest: i32,
    coeffs: Vec<C64>,
}

impl Series {
    pub fn new(lowest: i32, coeffs: Vec<C64>) -> Self {
        Series { lowest, coeffs }
    }

    pub fn taylor(coeffs: Vec<C64>) -> Self {
        Series::new(0, coeffs)
    }

    pub fn constant(c: C64) -> Self {
        Series::taylor(vec![c])
    }

    /// `c (ζ/ζ₀ - 1)`.
    pub fn marker(zeta0: C64, c: C64) -> Self {
        Series::taylor(vec![-c, c / zeta0])
    }

    /// Taylor coefficients of `exp(Σ aₙ ζⁿ)` for a polynomial exponent, up to
    /// `terms` coefficients.
    pub fn exp_of_polynomial(exponent: &[C64], terms: usize) -> Self {
        // f' = p' f gives (n+1) f_{n+1} = Σ_k (k+1) a_{k+1} f_{n-k}
        let mut f = vec![C64::new(0.0, 0.0); terms];
        if terms == 0 {
            return Series::taylor(f);
        }
        f[0] = exponent.first().copied().unwrap_or_default().exp();
        for n in 0..terms - 1 {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..=n {
                if k + 1 < exponent.len() {
                    acc += exponent[k + 1] * (k + 1) as f64 * f[n - k];
                }
            }
            f[n + 1] = acc / (n + 1) as f64;
        }
        Series::taylor(f)
    }

    pub fn lowest(&self) -> i32 {
        self.lowest
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: i32) -> C64 {
        let idx = n - self.lowest;
        if idx < 0 {
            return C64::new(0.0, 0.0);
        }
        self.coeffs.get(idx as usize).copied().unwrap_or_default()
    }

    pub fn is_taylor(&self) -> bool {
        (self.lowest..0).all(|n| self.coeff(n).norm() == 0.0)
    }

    pub fn eval(&self, zeta: C64) -> C64 {
        let poly = self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * zeta + c);
        poly * zeta.powi(self.lowest)
    }

    /// Value at `ζ = 0`; fails if a negative power is present.
    pub fn value_at_zero(&self) -> Result<C64> {
        if !self.is_taylor() {
            return Err(Error::Precondition("series has a pole at 0".into()));
        }
        Ok(self.coeff(0))
    }

    pub fn scale(&self, c: C64) -> Self {
        Series::new(self.lowest, self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, other: &Series) -> Self {
        let lo = self.lowest.min(other.lowest);
        let hi = (self.lowest + self.coeffs.len() as i32).max(other.lowest + other.coeffs.len() as i32);
        Series::new(lo, (lo..hi).map(|n| self.coeff(n) + other.coeff(n)).collect())
    }

    /// Product truncated to `terms` coefficients.
    pub fn mul(&self, other: &Series, terms: usize) -> Self {
        let mut out = vec![C64::new(0.0, 0.0); terms];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                if i + j < terms {
                    out[i + j] += a * b;
                }
            }
        }
        Series::new(self.lowest + other.lowest, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_series_matches_exp() {
        let p = [C64::new(0.3, 0.1), C64::new(-0.5, 0.2), C64::new(0.1, 0.0)];
        let s = Series::exp_of_polynomial(&p, DEFAULT_TERMS);
        for zeta in [C64::new(0.7, 0.3), C64::new(-1.1, 0.4)] {
            let direct = (p[0] + p[1] * zeta + p[2] * zeta * zeta).exp();
            assert!((s.eval(zeta) - direct).norm() < 1e-13);
        }
    }

    #[test]
    fn laurent_arithmetic() {
        let a = Series::new(-1, vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0)]);
        let b = Series::taylor(vec![C64::new(0.0, 1.0), C64::new(1.0, 0.0)]);
        let z = C64::new(0.4, -0.9);
        assert!((a.add(&b).eval(z) - (a.eval(z) + b.eval(z))).norm() < 1e-14);
        assert!((a.mul(&b, 8).eval(z) - a.eval(z) * b.eval(z)).norm() < 1e-14);
        assert!(a.value_at_zero().is_err());
        assert_eq!(b.value_at_zero(), Ok(C64::new(0.0, 1.0)));
        let m = Series::marker(C64::new(2.0, 1.0), C64::new(1.0, 0.0));
        assert!(m.eval(C64::new(2.0, 1.0)).norm() < 1e-15);
    }
}
