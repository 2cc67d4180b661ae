//! Equianharmonic Weierstrass ℘ with `(℘′)² = 4℘³ − 1` and the Baker pair.
//!
//! The lattice is `2ω·ℤ + 2ω·e^{iπ/3}·ℤ` with `ω` real. Points are reduced to
//! the nearest lattice point and the Laurent series at the origin is summed.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{EvalResult, TAU_ZERO};
use crate::quadrature::{integrate, GkConfig};

/// Number of nonzero Laurent terms beyond `z⁻²`.
pub const DEFAULT_TRUNCATION: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EllipticError {
    #[error("℘ has a pole at {at} (lattice point)")]
    Pole { at: Complex64 },
    #[error("℘ vanishes at {at}")]
    ZeroOfWp { at: Complex64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BakerPair {
    pub p: Complex64,
    pub q: Complex64,
}

/// The real root `4^{-1/3}` of `4t³ − 1`.
pub fn e1() -> f64 {
    4f64.powf(-1.0 / 3.0)
}

/// Real half-period `∫_{e1}^{∞} dt/√(4t³−1)`.
///
/// With `t = e1/u²` and `u = 1 − s²` the integral becomes
/// `4·e1·∫_0^1 ds/√P(1−s²)` with `P(u) = 1+u+…+u⁵`, which is smooth.
fn real_half_period() -> f64 {
    let cfg = GkConfig { abs_tol: 1e-16, rel_tol: 1e-15, max_evals: 100_000 };
    let p = |u: f64| 1.0 + u * (1.0 + u * (1.0 + u * (1.0 + u * (1.0 + u))));
    let out = integrate(|s| 1.0 / p(1.0 - s * s).sqrt(), 0.0, 1.0, &cfg)
        .expect("smooth integrand converges");
    4.0 * e1() * out.value
}

/// Half-periods `(ω, e^{iπ/3}·ω)` of the lattice with `g₂ = 0`, `g₃ = 1`.
pub fn equianharmonic_periods() -> (Complex64, Complex64) {
    let w = real_half_period();
    (Complex64::new(w, 0.0), Complex64::from_polar(w, PI / 3.0))
}

/// Laurent coefficients `c_k` of `℘(z) = z⁻² + Σ_{k≥1} c_k z^{2k}` for
/// `k = 1..=count`.
pub fn laurent_coefficients(count: usize) -> Vec<f64> {
    let mut c = vec![0.0; count + 1];
    if count >= 2 {
        c[2] = 1.0 / 28.0;
    }
    for k in 3..=count {
        let s: f64 = (1..=k - 2).map(|m| c[m] * c[k - 1 - m]).sum();
        c[k] = 3.0 * s / (((2 * k + 3) * (k - 2)) as f64);
    }
    c.remove(0);
    c
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquianharmonicWeierstrass {
    half_periods: (Complex64, Complex64),
    laurent_coeffs: Vec<f64>,
    truncation: usize,
}

static SHARED: OnceLock<Arc<EquianharmonicWeierstrass>> = OnceLock::new();

impl Default for EquianharmonicWeierstrass {
    fn default() -> Self {
        Self::with_truncation(DEFAULT_TRUNCATION)
    }
}

impl EquianharmonicWeierstrass {
    /// `truncation` counts nonzero Laurent terms beyond `z⁻²`.
    pub fn with_truncation(truncation: usize) -> Self {
        let count = 3 * truncation.max(1) - 1;
        EquianharmonicWeierstrass {
            half_periods: equianharmonic_periods(),
            laurent_coeffs: laurent_coefficients(count),
            truncation,
        }
    }

    /// Process-wide context with the default truncation.
    pub fn shared() -> Arc<Self> {
        SHARED.get_or_init(|| Arc::new(Self::default())).clone()
    }

    pub fn half_periods(&self) -> (Complex64, Complex64) {
        self.half_periods
    }

    pub fn laurent_coeffs(&self) -> &[f64] {
        &self.laurent_coeffs
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Nearest lattice point to `z` and the offset `z − L`.
    pub fn reduce(&self, z: Complex64) -> (Complex64, Complex64) {
        let (w1, w2) = self.half_periods;
        let (p1, p2) = (2.0 * w1, 2.0 * w2);
        // Coordinates in the basis (p1, p2); p1 is real.
        let b = z.im / p2.im;
        let a = (z.re - b * p2.re) / p1.re;
        let (a0, b0) = (a.round(), b.round());
        let mut best = (f64::INFINITY, Complex64::new(0.0, 0.0));
        for da in -1..=1 {
            for db in -1..=1 {
                let lp = p1 * (a0 + da as f64) + p2 * (b0 + db as f64);
                let d = (z - lp).norm();
                if d < best.0 {
                    best = (d, lp);
                }
            }
        }
        (best.1, z - best.1)
    }

    fn laurent_pair(&self, u: Complex64) -> (Complex64, Complex64) {
        let w = u * u;
        let mut s = Complex64::new(0.0, 0.0);
        let mut ds = Complex64::new(0.0, 0.0);
        for (i, &ck) in self.laurent_coeffs.iter().enumerate().rev() {
            let k = (i + 1) as f64;
            s = (s + ck) * w;
            ds = ds * w + 2.0 * k * ck;
        }
        // s = Σ c_k w^k, ds = Σ 2k c_k w^{k-1}
        let inv = u.inv();
        let inv2 = inv * inv;
        (inv2 + s, -2.0 * inv2 * inv + ds * u)
    }

    /// `(℘(z), ℘′(z))`.
    pub fn wp_pair(&self, z: Complex64) -> Result<(Complex64, Complex64), EllipticError> {
        let (_, u) = self.reduce(z);
        if u.norm() < TAU_ZERO {
            return Err(EllipticError::Pole { at: z });
        }
        Ok(self.laurent_pair(u))
    }

    pub fn wp(&self, z: Complex64) -> EvalResult {
        match self.wp_pair(z) {
            Ok((p, _)) => EvalResult::Finite(p),
            Err(_) => EvalResult::Pole(Some(2)),
        }
    }

    pub fn wp_prime(&self, z: Complex64) -> EvalResult {
        match self.wp_pair(z) {
            Ok((_, dp)) => EvalResult::Finite(dp),
            Err(_) => EvalResult::Pole(Some(3)),
        }
    }

    /// Taylor coefficients `c_0..c_k` of ℘ at `z0`, from `℘'' = 6℘²`.
    pub fn taylor(&self, z0: Complex64, k: usize) -> Result<Vec<Complex64>, EllipticError> {
        let (p, dp) = self.wp_pair(z0)?;
        let mut c = vec![Complex64::new(0.0, 0.0); k + 1];
        c[0] = p;
        if k >= 1 {
            c[1] = dp;
        }
        for m in 0..k.saturating_sub(1) {
            let s: Complex64 = (0..=m).map(|i| c[i] * c[m - i]).sum();
            c[m + 2] = 6.0 * s / (((m + 2) * (m + 1)) as f64);
        }
        Ok(c)
    }

    /// Baker factors `p = (1 − ℘′/√3)/(2℘)`, `q = ϖ(1 + ℘′/√3)/(2℘)`.
    pub fn baker_pair(&self, z: Complex64) -> Result<BakerPair, EllipticError> {
        let (p, dp) = self.wp_pair(z)?;
        if p.norm() < TAU_ZERO {
            return Err(EllipticError::ZeroOfWp { at: z });
        }
        let s = dp / 3f64.sqrt();
        let varpi = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        let inv = (2.0 * p).inv();
        Ok(BakerPair {
            p: (1.0 - s) * inv,
            q: varpi * (1.0 + s) * inv,
        })
    }
}
