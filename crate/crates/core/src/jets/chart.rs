//! Local expansions of Fermat curves and surfaces near a divisor point.
//!
//! Surface charts use a generic base coordinate `ξ` at `ξ₀` and the divisor
//! coordinate `σ`; curve charts use `σ` alone.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::jetpoly::JetFn;
use super::laurent::LaurentSeries;
use super::JetError;

pub const DEFAULT_TRUNCATION: usize = 24;

/// Threshold below which a base value counts as lying on an excluded locus.
const DEGENERATE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `xⁿ + yⁿ = 1`.
    Cn { n: u32 },
    /// `x^m + yⁿ = 1`, `m ≥ n`.
    Cmn { m: u32, n: u32 },
    /// `xⁿ + yⁿ + zⁿ = 1`.
    Sn { n: u32 },
    /// `x^m + yⁿ + z^l = 1`, `m ≥ n ≥ l`.
    Smnl { m: u32, n: u32, l: u32 },
}

impl Family {
    /// Exponents of the affine relation, one per coordinate.
    pub fn exponents(&self) -> Vec<u32> {
        match *self {
            Family::Cn { n } => vec![n, n],
            Family::Cmn { m, n } => vec![m, n],
            Family::Sn { n } => vec![n, n, n],
            Family::Smnl { m, n, l } => vec![m, n, l],
        }
    }

    pub fn is_curve(&self) -> bool {
        matches!(self, Family::Cn { .. } | Family::Cmn { .. })
    }

    pub fn is_fermat(&self) -> bool {
        let e = self.exponents();
        e.iter().all(|&k| k == e[0])
    }

    fn validate(&self) -> Result<(), JetError> {
        let e = self.exponents();
        if e.contains(&0) {
            return Err(JetError::InvalidExponents(format!("{self}: exponents must be positive")));
        }
        if e.windows(2).any(|w| w[0] < w[1]) {
            return Err(JetError::InvalidExponents(format!("{self}: exponents must be non-increasing")));
        }
        Ok(())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Cn { n } => write!(f, "C_{n}"),
            Family::Cmn { m, n } => write!(f, "C_{{{m},{n}}}"),
            Family::Sn { n } => write!(f, "S_{n}"),
            Family::Smnl { m, n, l } => write!(f, "S_{{{m},{n},{l}}}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Divisor {
    /// Curves: `Z = 0`, chart `x = τ⁻¹`.
    Infinity,
    /// Curves: `Y = 0`.
    Y0,
    /// Fermat curves: `v = 0` in `u = x/y`, `v = 1/y`.
    V0,
    /// Curves: a generic affine point, `x = ξ₀ + ρσ`.
    Affine,
    /// Surfaces: `W = 0` in the `x, y, z` chart.
    W0,
    /// Surfaces: `Z = 0` in the `u, v, w` chart.
    Z0,
    /// Surfaces: `w = 0` in the `u, v, w` chart.
    WLog,
    /// Surfaces: affine points with `x = 0`, `y = 0` or `z = 0`.
    AffineX0,
    AffineY0,
    AffineZ0,
    /// Branch through the singular point of `C_{m,n}`.
    Singular,
    /// Formal germ not tied to a divisor.
    Germ,
}

impl Divisor {
    pub fn as_str(&self) -> &'static str {
        match self {
            Divisor::Infinity => "Infinity",
            Divisor::Y0 => "Y0",
            Divisor::V0 => "V0",
            Divisor::Affine => "Affine",
            Divisor::W0 => "W0",
            Divisor::Z0 => "Z0",
            Divisor::WLog => "WLog",
            Divisor::AffineX0 => "AffineX0",
            Divisor::AffineY0 => "AffineY0",
            Divisor::AffineZ0 => "AffineZ0",
            Divisor::Singular => "Singular",
            Divisor::Germ => "Germ",
        }
    }
}

/// Coordinates a chart is expressed in. `Uv`: `u = x/y`, `v = 1/y`;
/// `Uvw`: `u = x/z`, `v = y/z`, `w = 1/z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoordSystem {
    Xy,
    Uv,
    Xyz,
    Uvw,
}

#[derive(Debug, Clone)]
pub struct ChartExpansion {
    pub family: Family,
    pub divisor: Divisor,
    pub branch: u32,
    pub base: Option<Complex64>,
    pub truncation: usize,
    pub system: CoordSystem,
    pub coords: Vec<JetFn>,
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `e^{iπ(2b+1)/n}`, a root of `ηⁿ = −1`.
fn minus_one_root(n: u32, b: u32) -> Complex64 {
    Complex64::from_polar(1.0, PI * (2 * b + 1) as f64 / n as f64)
}

/// `e^{2πib/n}`.
fn unit_root(n: u32, b: u32) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * b as f64 / n as f64)
}

impl ChartExpansion {
    /// Coordinates converted to `sys`.
    pub fn coords_in(&self, sys: CoordSystem) -> Result<Vec<JetFn>, JetError> {
        use CoordSystem::*;
        let c = &self.coords;
        match (self.system, sys) {
            (a, b) if a == b => Ok(c.clone()),
            (Xy, Uv) | (Uv, Xy) => {
                // Both maps are involutions up to naming: (p, q) ↦ (p/q, 1/q).
                let inv = c[1].recip()?;
                Ok(vec![c[0].mul(&inv), inv])
            }
            (Xyz, Uvw) | (Uvw, Xyz) => {
                let inv = c[2].recip()?;
                Ok(vec![c[0].mul(&inv), c[1].mul(&inv), inv])
            }
            (a, b) => Err(JetError::Incompatible(format!("cannot express {a:?} chart in {b:?}"))),
        }
    }

    /// Relative residual of the defining relation over value, first and
    /// second differentials.
    pub fn relation_residual(&self) -> Result<f64, JetError> {
        let e = self.family.exponents();
        let c = &self.coords;
        let terms: Vec<JetFn> = match self.system {
            CoordSystem::Xy | CoordSystem::Xyz => {
                let mut t = Vec::new();
                for (f, k) in c.iter().zip(&e) {
                    t.push(f.powi(*k as i32)?);
                }
                t.push(JetFn::constant(-one(), self.truncation));
                t
            }
            CoordSystem::Uv => {
                let n = e[0] as i32;
                vec![c[0].powi(n)?, JetFn::constant(one(), self.truncation), c[1].powi(n)?.neg()]
            }
            CoordSystem::Uvw => {
                let n = e[0] as i32;
                vec![
                    c[0].powi(n)?,
                    c[1].powi(n)?,
                    JetFn::constant(one(), self.truncation),
                    c[2].powi(n)?.neg(),
                ]
            }
        };
        let scale = terms.iter().map(JetFn::max_abs).fold(0.0, f64::max);
        let sum = terms[1..].iter().fold(terms[0].clone(), |acc, t| acc.add(t));
        Ok(sum.max_abs() / scale.max(f64::MIN_POSITIVE))
    }
}

/// Expansion of a curve near `divisor`. `base` is the affine point for
/// [`Divisor::Affine`] and ignored otherwise.
pub fn chart_curve(
    family: Family,
    divisor: Divisor,
    branch: u32,
    base: Option<Complex64>,
    truncation: usize,
) -> Result<ChartExpansion, JetError> {
    family.validate()?;
    if !family.is_curve() {
        return Err(JetError::Incompatible(format!("{family} is not a curve")));
    }
    let e = family.exponents();
    let (m, n) = (e[0], e[1]);
    let len = truncation;
    let sigma = JetFn::sigma(len);
    let (system, coords) = match divisor {
        Divisor::Infinity => {
            if m != n {
                return Err(JetError::SingularPoint { family: family.to_string() });
            }
            // x = τ⁻¹, y = η τ⁻¹ (1 − τⁿ)^{1/n}
            let x = sigma.recip()?;
            let r = sigma.powi(n as i32)?.neg().add_const(one()).nth_root(n)?;
            let y = x.mul(&r).scale(minus_one_root(n, branch));
            (CoordSystem::Xy, vec![x, y])
        }
        Divisor::Y0 if matches!(family, Family::Cn { .. }) => {
            // u = s⁻¹, v = μ s⁻¹ (1 + sⁿ)^{1/n}
            let u = sigma.recip()?;
            let r = sigma.powi(n as i32)?.add_const(one()).nth_root(n)?;
            let v = u.mul(&r).scale(unit_root(n, branch));
            (CoordSystem::Uv, vec![u, v])
        }
        Divisor::Y0 => {
            // y = σ, x = ω (1 − σⁿ)^{1/m}
            let x = sigma.powi(n as i32)?.neg().add_const(one()).nth_root(m)?.scale(unit_root(m, branch));
            (CoordSystem::Xy, vec![x, sigma])
        }
        Divisor::V0 => {
            if m != n {
                return Err(JetError::Incompatible(format!("V0 chart needs a Fermat curve, got {family}")));
            }
            // v = σ, u = η (1 − σⁿ)^{1/n}
            let u = sigma.powi(n as i32)?.neg().add_const(one()).nth_root(n)?.scale(minus_one_root(n, branch));
            (CoordSystem::Uv, vec![u, sigma])
        }
        Divisor::Affine => {
            let x0 = base.ok_or_else(|| JetError::Incompatible("Affine chart needs a base point".into()))?;
            let rad = one() - x0.powu(m);
            if rad.norm() < DEGENERATE_TOL {
                return Err(JetError::DegenerateBase { xi0: x0 });
            }
            // x = ξ₀ + ρσ with ρ half the distance to the nearest singularity
            // of the branch, which keeps the coefficients of order one.
            let near = (0..m)
                .map(|k| (x0 - unit_root(m, k)).norm())
                .fold(x0.norm(), f64::min);
            let x = sigma.scale(Complex64::new(0.5 * near, 0.0)).add_const(x0);
            let y = x.powi(m as i32)?.neg().add_const(one()).nth_root_branch(n, branch)?;
            (CoordSystem::Xy, vec![x, y])
        }
        Divisor::Singular => return Err(JetError::SingularPoint { family: family.to_string() }),
        other => return Err(JetError::Incompatible(format!("{} is not a curve divisor", other.as_str()))),
    };
    Ok(ChartExpansion { family, divisor, branch, base, truncation, system, coords })
}

/// Expansion of a surface near a generic point `ξ = ξ₀` of `divisor`.
pub fn chart_surface(
    family: Family,
    divisor: Divisor,
    xi0: Complex64,
    branch: u32,
    truncation: usize,
) -> Result<ChartExpansion, JetError> {
    family.validate()?;
    if family.is_curve() {
        return Err(JetError::Incompatible(format!("{family} is not a surface")));
    }
    let e = family.exponents();
    let n = e[0];
    let len = truncation;
    let sigma = JetFn::sigma(len);
    let xi = JetFn::xi(xi0, len);
    let degenerate = |v: Complex64| v.norm() < DEGENERATE_TOL;
    let fermat_only = |d: Divisor| {
        if family.is_fermat() {
            Ok(())
        } else {
            Err(JetError::Incompatible(format!("{} chart is only built for S_n, got {family}", d.as_str())))
        }
    };
    let (system, coords) = match divisor {
        Divisor::W0 => {
            fermat_only(divisor)?;
            if degenerate(one() + xi0.powu(n)) || degenerate(xi0) {
                return Err(JetError::DegenerateBase { xi0 });
            }
            // x = 1/σ, y = ξ/σ, z = ζ/σ with ζⁿ = σⁿ − 1 − ξⁿ
            let inv = sigma.recip()?;
            let rad = sigma.powi(n as i32)?.sub(&xi.powi(n as i32)?).add_const(-one());
            let zeta = rad.nth_root_branch(n, branch)?;
            (CoordSystem::Xyz, vec![inv.clone(), xi.mul(&inv), zeta.mul(&inv)])
        }
        Divisor::Z0 => {
            fermat_only(divisor)?;
            if degenerate(one() + xi0.powu(n)) || degenerate(xi0) {
                return Err(JetError::DegenerateBase { xi0 });
            }
            // u = 1/σ, v = ξ/σ, w = ζ/σ with ζⁿ = 1 + ξⁿ + σⁿ
            let inv = sigma.recip()?;
            let rad = sigma.powi(n as i32)?.add(&xi.powi(n as i32)?).add_const(one());
            let zeta = rad.nth_root_branch(n, branch)?;
            (CoordSystem::Uvw, vec![inv.clone(), xi.mul(&inv), zeta.mul(&inv)])
        }
        Divisor::WLog => {
            fermat_only(divisor)?;
            if degenerate(one() + xi0.powu(n)) || degenerate(xi0) {
                return Err(JetError::DegenerateBase { xi0 });
            }
            // w = σ, v = ξ, u = (σⁿ − 1 − ξⁿ)^{1/n}
            let rad = sigma.powi(n as i32)?.sub(&xi.powi(n as i32)?).add_const(-one());
            let u = rad.nth_root_branch(n, branch)?;
            (CoordSystem::Uvw, vec![u, xi, sigma])
        }
        Divisor::AffineX0 | Divisor::AffineY0 | Divisor::AffineZ0 => {
            // The coordinate through the divisor is σ, the next one is ξ and
            // the last is solved from the relation.
            let (slot_s, slot_x, slot_r) = match divisor {
                Divisor::AffineX0 => (0, 1, 2),
                Divisor::AffineY0 => (1, 0, 2),
                _ => (2, 0, 1),
            };
            if degenerate(one() - xi0.powu(e[slot_x])) || degenerate(xi0) {
                return Err(JetError::DegenerateBase { xi0 });
            }
            let rad = sigma
                .powi(e[slot_s] as i32)?
                .add(&xi.powi(e[slot_x] as i32)?)
                .neg()
                .add_const(one());
            let solved = rad.nth_root_branch(e[slot_r], branch)?;
            let mut c = vec![JetFn::constant(one(), 1); 3];
            c[slot_s] = sigma;
            c[slot_x] = xi;
            c[slot_r] = solved;
            (CoordSystem::Xyz, c)
        }
        other => return Err(JetError::Incompatible(format!("{} is not a surface divisor", other.as_str()))),
    };
    Ok(ChartExpansion { family, divisor, branch, base: Some(xi0), truncation, system, coords })
}

/// Curve germ `σ ↦ (coords…)` wrapped as a chart, e.g. for annihilation
/// checks along formal germs.
pub fn germ_chart(family: Family, system: CoordSystem, coords: Vec<LaurentSeries>, truncation: usize) -> ChartExpansion {
    ChartExpansion {
        family,
        divisor: Divisor::Germ,
        branch: 0,
        base: None,
        truncation,
        system,
        coords: coords.into_iter().map(JetFn::of_sigma).collect(),
    }
}
