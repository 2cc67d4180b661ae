//! Truncated Laurent series `Σ_{k=lo}^{prec-1} c_k t^k + O(t^prec)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::JetError;
use crate::expr::touches_cut;
use crate::series_ops;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Leading coefficients below this fraction of the largest coefficient are
/// treated as cancellation noise before dividing or taking roots.
pub const DIVISOR_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentSeries {
    pub var: char,
    lo: i32,
    coeffs: Vec<Complex64>,
}

impl LaurentSeries {
    /// `coeffs[i]` is the coefficient of `t^{lo+i}`; the result is known up
    /// to `O(t^{lo+len})`. Exact leading zeros are stripped.
    pub fn new(var: char, lo: i32, coeffs: Vec<Complex64>) -> LaurentSeries {
        let mut s = LaurentSeries { var, lo, coeffs };
        s.strip_exact();
        s
    }

    pub fn zero(var: char, prec: i32) -> LaurentSeries {
        LaurentSeries { var, lo: prec, coeffs: Vec::new() }
    }

    /// `c` known to relative length `len`.
    pub fn constant(var: char, c: Complex64, len: usize) -> LaurentSeries {
        LaurentSeries::monomial(var, c, 0, len)
    }

    /// `c t^k` known to `O(t^{k+len})`.
    pub fn monomial(var: char, c: Complex64, k: i32, len: usize) -> LaurentSeries {
        let mut coeffs = vec![ZERO; len];
        if len > 0 {
            coeffs[0] = c;
        }
        LaurentSeries::new(var, k, coeffs)
    }

    /// The parameter itself, `t + O(t^{1+len})`.
    pub fn parameter(var: char, len: usize) -> LaurentSeries {
        LaurentSeries::monomial(var, Complex64::new(1.0, 0.0), 1, len)
    }

    fn strip_exact(&mut self) {
        let k = self.coeffs.iter().take_while(|c| **c == ZERO).count();
        if k > 0 {
            self.coeffs.drain(..k);
            self.lo += k as i32;
        }
    }

    /// Lowest stored exponent. Equal to `prec` for the zero series.
    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn prec(&self) -> i32 {
        self.lo + self.coeffs.len() as i32
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `t^k`; `None` beyond the truncation.
    pub fn coeff(&self, k: i32) -> Option<Complex64> {
        if k >= self.prec() {
            None
        } else if k < self.lo {
            Some(ZERO)
        } else {
            Some(self.coeffs[(k - self.lo) as usize])
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// First exponent whose coefficient exceeds `abs_tol`.
    pub fn valuation(&self, abs_tol: f64) -> Option<i32> {
        self.coeffs
            .iter()
            .position(|c| c.norm() > abs_tol)
            .map(|i| self.lo + i as i32)
    }

    /// Drops leading coefficients that are noise relative to the series.
    pub fn normalized(&self, rel_tol: f64) -> LaurentSeries {
        let tol = rel_tol * self.max_abs();
        let k = self.coeffs.iter().take_while(|c| c.norm() <= tol).count();
        LaurentSeries { var: self.var, lo: self.lo + k as i32, coeffs: self.coeffs[k..].to_vec() }
    }

    pub fn truncate(&self, prec: i32) -> LaurentSeries {
        if prec >= self.prec() {
            return self.clone();
        }
        let keep = (prec - self.lo).max(0) as usize;
        LaurentSeries::new(self.var, self.lo.min(prec), self.coeffs[..keep.min(self.coeffs.len())].to_vec())
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i32) -> LaurentSeries {
        LaurentSeries { var: self.var, lo: self.lo + k, coeffs: self.coeffs.clone() }
    }

    pub fn scale(&self, c: Complex64) -> LaurentSeries {
        LaurentSeries::new(self.var, self.lo, self.coeffs.iter().map(|v| v * c).collect())
    }

    pub fn neg(&self) -> LaurentSeries {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    pub fn add(&self, other: &LaurentSeries) -> LaurentSeries {
        let prec = self.prec().min(other.prec());
        let lo = self.lo.min(other.lo).min(prec);
        let coeffs = (lo..prec)
            .map(|k| self.coeff(k).unwrap() + other.coeff(k).unwrap())
            .collect();
        LaurentSeries::new(self.var, lo, coeffs)
    }

    pub fn sub(&self, other: &LaurentSeries) -> LaurentSeries {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LaurentSeries) -> LaurentSeries {
        let lo = self.lo + other.lo;
        let prec = (self.lo + other.prec()).min(other.lo + self.prec());
        let len = (prec - lo).max(0) as usize;
        LaurentSeries::new(self.var, lo, series_ops::mul(&self.coeffs, &other.coeffs, len))
    }

    pub fn recip(&self) -> Result<LaurentSeries, JetError> {
        let s = self.normalized(DIVISOR_REL_TOL);
        if s.coeffs.is_empty() {
            return Err(JetError::ZeroDivisor { prec: self.prec() });
        }
        Ok(LaurentSeries::new(self.var, -s.lo, series_ops::recip(&s.coeffs)))
    }

    pub fn div(&self, other: &LaurentSeries) -> Result<LaurentSeries, JetError> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn powi(&self, e: i32) -> Result<LaurentSeries, JetError> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = LaurentSeries::constant(self.var, Complex64::new(1.0, 0.0), base.coeffs.len().max(1));
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        Ok(acc)
    }

    /// Principal `n`-th root.
    pub fn nth_root(&self, n: u32) -> Result<LaurentSeries, JetError> {
        let s = self.normalized(DIVISOR_REL_TOL);
        let c0 = *s.coeffs.first().ok_or(JetError::ZeroDivisor { prec: self.prec() })?;
        if touches_cut(c0) {
            return Err(JetError::BranchViolation { lead: c0 });
        }
        s.root_with_lead(n, crate::expr::principal_root(c0, n))
    }

    /// `n`-th root on branch `b`: the leading coefficient becomes
    /// `|c|^{1/n} e^{i(arg c + 2πb)/n}`.
    pub fn nth_root_branch(&self, n: u32, b: u32) -> Result<LaurentSeries, JetError> {
        let s = self.normalized(DIVISOR_REL_TOL);
        let c0 = *s.coeffs.first().ok_or(JetError::ZeroDivisor { prec: self.prec() })?;
        let lead = Complex64::from_polar(c0.norm().powf(1.0 / n as f64), (c0.arg() + 2.0 * PI * b as f64) / n as f64);
        s.root_with_lead(n, lead)
    }

    /// `n`-th root whose leading coefficient is `lead` (`leadⁿ` must equal
    /// the leading coefficient).
    pub fn root_with_lead(&self, n: u32, lead: Complex64) -> Result<LaurentSeries, JetError> {
        let s = self.normalized(DIVISOR_REL_TOL);
        if s.coeffs.is_empty() {
            return Err(JetError::ZeroDivisor { prec: self.prec() });
        }
        if s.lo.rem_euclid(n as i32) != 0 {
            return Err(JetError::NeedsRamification { lo: s.lo, n });
        }
        let p = Complex64::new(1.0 / n as f64, 0.0);
        Ok(LaurentSeries::new(self.var, s.lo / n as i32, series_ops::pow_with(&s.coeffs, p, lead)))
    }

    /// `d/dt`.
    pub fn derivative(&self) -> LaurentSeries {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * (self.lo + i as i32) as f64)
            .collect::<Vec<_>>();
        LaurentSeries::new(self.var, self.lo - 1, coeffs)
    }

    /// Substitution `t = s^q` into the parameter `var`.
    pub fn ramify(&self, q: u32, var: char) -> LaurentSeries {
        let q = q as usize;
        let mut coeffs = vec![ZERO; self.coeffs.len() * q];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * q] = *c;
        }
        LaurentSeries::new(var, self.lo * q as i32, coeffs)
    }

    /// Value of the truncated sum at `t`.
    pub fn eval(&self, t: Complex64) -> Complex64 {
        let mut acc = ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc * t.powi(self.lo)
    }
}
