//! Branch of `C_{m,n}` through its singular point `[0:1:0]`.
//!
//! In the chart `Y = 1` with `u = X/Y`, `w = Z/Y` the curve reads
//! `u^m + w^d − w^m = 0` with `d = m − n`. With `g = gcd(m, d)` the branch is
//! `u = s^{d/g}`, `w = s^{m/g} W(s)` where `W = ε (1 − s^{mn/g} Wⁿ)^{−1/d}`
//! and `ε^d = −1`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::chart::{germ_chart, ChartExpansion, CoordSystem, Family};
use super::laurent::LaurentSeries;
use super::JetError;
use crate::series_ops;

#[derive(Debug, Clone)]
pub struct PuiseuxGerm {
    pub m: u32,
    pub n: u32,
    pub g: u32,
    /// `u = t` is reached by `t = s^q`.
    pub ramification: u32,
    pub branch: u32,
    pub u: LaurentSeries,
    pub w: LaurentSeries,
    pub truncation: usize,
}

pub fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn puiseux_branch(m: u32, n: u32, branch: u32, truncation: usize) -> Result<PuiseuxGerm, JetError> {
    if n == 0 || m <= n {
        return Err(JetError::InvalidExponents(format!("Puiseux branch needs m > n ≥ 1, got ({m},{n})")));
    }
    let d = m - n;
    let g = gcd(m, d);
    let step = (m * n / g) as usize;
    let eps = Complex64::from_polar(1.0, PI * (2 * branch + 1) as f64 / d as f64);
    let len = truncation;
    let zero = Complex64::new(0.0, 0.0);
    let mut big_w = vec![zero; len];
    big_w[0] = eps;
    let p = Complex64::new(-1.0 / d as f64, 0.0);
    // Each pass fixes `step` further coefficients.
    for _ in 0..=len / step.max(1) + 1 {
        let wn = series_ops::powu(&big_w, n);
        let mut base = vec![zero; len];
        base[0] = Complex64::new(1.0, 0.0);
        for (k, c) in wn.iter().enumerate() {
            if k + step < len {
                base[k + step] -= c;
            }
        }
        big_w = series_ops::pow_with(&base, p, Complex64::new(1.0, 0.0))
            .into_iter()
            .map(|c| c * eps)
            .collect();
    }
    let u = LaurentSeries::monomial('s', Complex64::new(1.0, 0.0), (d / g) as i32, len);
    let w = LaurentSeries::new('s', (m / g) as i32, big_w);
    Ok(PuiseuxGerm { m, n, g, ramification: d / g, branch, u, w, truncation })
}

impl PuiseuxGerm {
    /// `u^m + w^d − w^m` as a series in `s`.
    pub fn trinomial_residual(&self) -> Result<LaurentSeries, JetError> {
        let d = (self.m - self.n) as i32;
        let m = self.m as i32;
        Ok(self.u.powi(m)?.add(&self.w.powi(d)?).sub(&self.w.powi(m)?))
    }

    /// Affine coordinates `x = u/w`, `y = 1/w` along the branch.
    pub fn chart(&self) -> Result<ChartExpansion, JetError> {
        let inv = self.w.recip()?;
        let mut c = germ_chart(
            Family::Cmn { m: self.m, n: self.n },
            CoordSystem::Xy,
            vec![self.u.mul(&inv), inv],
            self.truncation,
        );
        c.divisor = super::chart::Divisor::Singular;
        c.branch = self.branch;
        Ok(c)
    }
}
