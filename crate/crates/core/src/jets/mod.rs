//! Jet differentials on Fermat curves and surfaces.
//!
//! Coordinates near a divisor are expanded as Laurent series in the divisor
//! parameter σ (with second-order Taylor data in a generic base coordinate ξ
//! for surfaces). A jet differential is then a polynomial in the generators
//! `dξ, dσ, d²ξ, d²σ` whose coefficients are Laurent series, and its order
//! along `σ = 0` is the minimum coefficient valuation.

mod chart;
mod jetpoly;
mod laurent;
mod puiseux;
mod thresholds;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use chart::{chart_curve, chart_surface, germ_chart, ChartExpansion, CoordSystem, Divisor, Family, DEFAULT_TRUNCATION};
pub use jetpoly::{weight, JetFn, JetPoly, Monomial, D2_SIGMA, D2_XI, D_SIGMA, D_XI};
pub use laurent::{LaurentSeries, DIVISOR_REL_TOL};
pub use puiseux::{gcd, puiseux_branch, PuiseuxGerm};
pub use thresholds::{
    bookkeeping_predicates, draw_base, threshold_verify, Rule, Sweep, ThresholdReport, ThresholdRow, Verdict,
};

/// Coefficients below this fraction of the largest coefficient in a table
/// are treated as cancelled.
pub const ORDER_REL_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("leading order {lo} is not divisible by {n}; lift t = s^q first")]
    NeedsRamification { lo: i32, n: u32 },
    #[error("leading coefficient {lead} lies on the principal branch cut")]
    BranchViolation { lead: Complex64 },
    #[error("series vanishes to its truncation O(t^{prec}) and cannot be inverted")]
    ZeroDivisor { prec: i32 },
    #[error("{family} is singular there; use the Puiseux branch")]
    SingularPoint { family: String },
    #[error("base value {xi0} lies on an excluded locus")]
    DegenerateBase { xi0: Complex64 },
    #[error("leading orders cannot be certified at this truncation: {0}")]
    TruncationExhausted(String),
    #[error("incompatible request: {0}")]
    Incompatible(String),
    #[error("invalid exponents: {0}")]
    InvalidExponents(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum JetId {
    #[serde(rename = "PHI_CURVE")]
    PhiCurve,
    #[serde(rename = "PSI_CURVE")]
    PsiCurve,
    #[serde(rename = "ETA_CURVE")]
    EtaCurve,
    #[serde(rename = "PHI_SURF")]
    PhiSurf,
    #[serde(rename = "OMEGA_SURF")]
    OmegaSurf,
    #[serde(rename = "PSI_SURF")]
    PsiSurf,
    #[serde(rename = "ETA_SURF")]
    EtaSurf,
    #[serde(rename = "PHI1_GEN")]
    Phi1Gen,
    #[serde(rename = "PHI2_GEN")]
    Phi2Gen,
    #[serde(rename = "OMEGA_GEN")]
    OmegaGen,
    /// `dx d²y − dy d²x` alone.
    #[serde(rename = "SURF_BLOCK")]
    SurfBlock,
}

impl JetId {
    pub const ALL: [JetId; 11] = [
        JetId::PhiCurve,
        JetId::PsiCurve,
        JetId::EtaCurve,
        JetId::PhiSurf,
        JetId::OmegaSurf,
        JetId::PsiSurf,
        JetId::EtaSurf,
        JetId::Phi1Gen,
        JetId::Phi2Gen,
        JetId::OmegaGen,
        JetId::SurfBlock,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            JetId::PhiCurve => "PHI_CURVE",
            JetId::PsiCurve => "PSI_CURVE",
            JetId::EtaCurve => "ETA_CURVE",
            JetId::PhiSurf => "PHI_SURF",
            JetId::OmegaSurf => "OMEGA_SURF",
            JetId::PsiSurf => "PSI_SURF",
            JetId::EtaSurf => "ETA_SURF",
            JetId::Phi1Gen => "PHI1_GEN",
            JetId::Phi2Gen => "PHI2_GEN",
            JetId::OmegaGen => "OMEGA_GEN",
            JetId::SurfBlock => "SURF_BLOCK",
        }
    }

    pub fn parse(s: &str) -> Option<JetId> {
        JetId::ALL.into_iter().find(|id| id.as_str() == s)
    }

    /// Number of equivalent representations (quotients, then determinant).
    pub fn representations(&self) -> usize {
        match self {
            JetId::PhiCurve | JetId::PsiCurve | JetId::EtaCurve | JetId::Phi1Gen => 3,
            JetId::SurfBlock => 1,
            _ => 4,
        }
    }

    pub fn is_curve(&self) -> bool {
        matches!(self, JetId::PhiCurve | JetId::PsiCurve | JetId::EtaCurve | JetId::Phi1Gen)
    }

    pub fn weighted_degree(&self) -> u32 {
        if self.is_curve() {
            1
        } else {
            3
        }
    }

    fn system(&self) -> CoordSystem {
        match self {
            JetId::PhiCurve | JetId::Phi1Gen => CoordSystem::Xy,
            JetId::PsiCurve | JetId::EtaCurve => CoordSystem::Uv,
            JetId::PsiSurf | JetId::EtaSurf => CoordSystem::Uvw,
            _ => CoordSystem::Xyz,
        }
    }

    fn needs_fermat(&self) -> bool {
        !matches!(self, JetId::Phi1Gen | JetId::Phi2Gen | JetId::OmegaGen | JetId::SurfBlock)
    }
}

impl fmt::Display for JetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A jet differential together with the representation used to compute it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JetDifferential {
    pub id: JetId,
    pub rep: usize,
}

impl JetDifferential {
    pub fn new(id: JetId) -> JetDifferential {
        JetDifferential { id, rep: 0 }
    }

    pub fn with_rep(id: JetId, rep: usize) -> JetDifferential {
        JetDifferential { id, rep }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Regular,
    /// Logarithmic frame `dlogσ, d²logσ` along `σ = 0`.
    Log,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `(d₁D₂ − d₂D₁, d₂D₀ − d₀D₂, d₀D₁ − d₁D₀)`.
fn cross(d: &[JetPoly; 3], dd: &[JetPoly; 3]) -> [JetPoly; 3] {
    [
        d[1].mul(&dd[2]).sub(&d[2].mul(&dd[1])),
        d[2].mul(&dd[0]).sub(&d[0].mul(&dd[2])),
        d[0].mul(&dd[1]).sub(&d[1].mul(&dd[0])),
    ]
}

fn check_family(jd: &JetDifferential, chart: &ChartExpansion) -> Result<(), JetError> {
    if jd.id.is_curve() != chart.family.is_curve() {
        return Err(JetError::Incompatible(format!("{} on {}", jd.id, chart.family)));
    }
    if jd.id.needs_fermat() && !chart.family.is_fermat() {
        return Err(JetError::Incompatible(format!("{} needs a Fermat variety, got {}", jd.id, chart.family)));
    }
    if jd.rep >= jd.id.representations() {
        return Err(JetError::Incompatible(format!("{} has no representation {}", jd.id, jd.rep)));
    }
    Ok(())
}

/// `1/(w·fᵏ)` as a Laurent series.
fn inv_weighted_power(f: &JetFn, k: u32, w: f64) -> Result<LaurentSeries, JetError> {
    f.val.powi(k as i32)?.scale(c(w)).recip()
}

/// Curve 1-jet `det[[x/a, y/b], [dx, dy]]` and its two quotient forms.
fn curve_form(p: &[JetFn], e: (u32, u32), weighted: bool, rep: usize) -> Result<JetPoly, JetError> {
    let (a, b) = if weighted { (e.0 as f64, e.1 as f64) } else { (1.0, 1.0) };
    let (x, y) = (&p[0], &p[1]);
    Ok(match rep {
        0 => y.d.scale(&inv_weighted_power(x, e.0 - 1, a)?),
        1 => x.d.neg().scale(&inv_weighted_power(y, e.1 - 1, b)?),
        _ => y.d.scale(&x.val.scale(c(1.0 / a))).sub(&x.d.scale(&y.val.scale(c(1.0 / b)))),
    })
}

/// Surface 2-jet from the Cramer system of
/// `Σ eᵢ pᵢ^{eᵢ−1} dpᵢ = 0`, `Σ eᵢ pᵢ^{eᵢ−1} 𝒟²pᵢ = 0`.
fn surface_form(p: &[JetFn], e: [u32; 3], weighted: bool, rep: usize) -> Result<JetPoly, JetError> {
    let d = [p[0].d.clone(), p[1].d.clone(), p[2].d.clone()];
    let dd = [p[0].d2_op(e[0] as f64 - 1.0)?, p[1].d2_op(e[1] as f64 - 1.0)?, p[2].d2_op(e[2] as f64 - 1.0)?];
    let cr = cross(&d, &dd);
    let w = |i: usize| if weighted { e[i] as f64 } else { 1.0 };
    if rep < 3 {
        return Ok(cr[rep].scale(&inv_weighted_power(&p[rep], e[rep] - 1, w(rep))?));
    }
    let mut out = JetPoly::zero();
    for i in 0..3 {
        out = out.add(&cr[i].scale(&p[i].val.scale(c(1.0 / w(i)))));
    }
    Ok(out)
}

/// Surface 2-jet on `uⁿ + vⁿ + 1 = wⁿ`.
fn psi_surface(p: &[JetFn], n: u32, rep: usize) -> Result<JetPoly, JetError> {
    let k = n as f64 - 1.0;
    let d = [p[0].d.clone(), p[1].d.clone(), p[2].d.clone()];
    let dd = [p[0].d2_op(k)?, p[1].d2_op(k)?, p[2].d2_op(k)?];
    let cr = cross(&d, &dd);
    Ok(match rep {
        // det[[dw, dv], [𝒟²w, 𝒟²v]] / u^{n−1}
        0 => cr[0].neg().scale(&inv_weighted_power(&p[0], n - 1, 1.0)?),
        // det[[du, dw], [𝒟²u, 𝒟²w]] / v^{n−1}
        1 => cr[1].neg().scale(&inv_weighted_power(&p[1], n - 1, 1.0)?),
        // det[[du, dv], [𝒟²u, 𝒟²v]] / w^{n−1}
        2 => cr[2].scale(&inv_weighted_power(&p[2], n - 1, 1.0)?),
        _ => cr[0].scale(&p[0].val).add(&cr[1].scale(&p[1].val)).add(&cr[2].scale(&p[2].val)),
    })
}

/// Pullback of `jd` to `chart` as a polynomial in the jet generators.
pub fn evaluate(jd: &JetDifferential, chart: &ChartExpansion) -> Result<JetPoly, JetError> {
    check_family(jd, chart)?;
    let e = chart.family.exponents();
    let p = chart.coords_in(jd.id.system())?;
    let rep = jd.rep;
    match jd.id {
        JetId::PhiCurve => curve_form(&p, (e[0], e[1]), false, rep),
        JetId::Phi1Gen => curve_form(&p, (e[0], e[1]), true, rep),
        JetId::PsiCurve | JetId::EtaCurve => {
            // uⁿ + 1 = vⁿ: Ψ = dv/u^{n−1} = du/v^{n−1} = v du − u dv
            let n = e[0];
            let (u, v) = (&p[0], &p[1]);
            let psi = match rep {
                0 => v.d.scale(&inv_weighted_power(u, n - 1, 1.0)?),
                1 => u.d.scale(&inv_weighted_power(v, n - 1, 1.0)?),
                _ => u.d.scale(&v.val).sub(&v.d.scale(&u.val)),
            };
            if jd.id == JetId::EtaCurve {
                Ok(psi.scale(&v.val.recip()?))
            } else {
                Ok(psi)
            }
        }
        JetId::PhiSurf => surface_form(&p, [e[0], e[1], e[2]], false, rep),
        JetId::Phi2Gen => surface_form(&p, [e[0], e[1], e[2]], true, rep),
        JetId::OmegaSurf | JetId::OmegaGen => {
            let weighted = jd.id == JetId::OmegaGen;
            let phi = surface_form(&p, [e[0], e[1], e[2]], weighted, rep)?;
            Ok(phi.scale(&p[0].val.mul(&p[1].val).mul(&p[2].val)))
        }
        JetId::PsiSurf => psi_surface(&p, e[0], rep),
        JetId::EtaSurf => {
            let psi = psi_surface(&p, e[0], rep)?;
            Ok(psi.scale(&p[0].val.mul(&p[1].val).div(&p[2].val)?))
        }
        JetId::SurfBlock => {
            let (x, y) = (&p[0], &p[1]);
            Ok(x.d.mul(&y.d2).sub(&y.d.mul(&x.d2)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderEntry {
    /// Exponents of `(dξ, dσ, d²ξ, d²σ)`, or of `(dξ, dlogσ, d²ξ, d²logσ)`
    /// in the logarithmic basis.
    pub monomial: Monomial,
    /// `None` when the coefficient vanishes to its precision.
    pub order: Option<i32>,
    pub precision: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderTable {
    pub basis: Basis,
    pub entries: Vec<OrderEntry>,
    pub overall_min: i32,
}

impl OrderTable {
    /// Certified σ-orders of each coefficient of `poly`.
    pub fn from_poly(poly: &JetPoly, basis: Basis) -> Result<OrderTable, JetError> {
        let poly = match basis {
            Basis::Regular => poly.clone(),
            Basis::Log => poly.to_log_frame(),
        };
        let tol = ORDER_REL_TOL * poly.max_abs();
        let entries: Vec<OrderEntry> = poly
            .terms
            .iter()
            .map(|(m, s)| OrderEntry { monomial: *m, order: s.valuation(tol), precision: s.prec() })
            .collect();
        let overall_min = entries
            .iter()
            .filter_map(|e| e.order)
            .min()
            .ok_or_else(|| JetError::TruncationExhausted("every coefficient vanishes to its precision".into()))?;
        if let Some(bad) = entries.iter().find(|e| e.order.is_none() && e.precision <= overall_min) {
            return Err(JetError::TruncationExhausted(format!(
                "coefficient of {:?} is only known to O(σ^{}) but the minimum is {overall_min}",
                bad.monomial, bad.precision
            )));
        }
        Ok(OrderTable { basis, entries, overall_min })
    }
}

/// Order table of `jd` along `σ = 0` of `chart`.
pub fn expand(jd: &JetDifferential, chart: &ChartExpansion, basis: Basis) -> Result<OrderTable, JetError> {
    OrderTable::from_poly(&evaluate(jd, chart)?, basis)
}

/// Largest coefficientwise deviation between every representation of
/// `jd.id` and the first one, relative to the largest coefficient.
pub fn representation_consistency(id: JetId, chart: &ChartExpansion) -> Result<f64, JetError> {
    let reps = (0..id.representations())
        .map(|r| evaluate(&JetDifferential::with_rep(id, r), chart))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(max_relative_deviation(&reps[0], &reps[1..]))
}

/// Coefficientwise `max |a − b| / max |a|` over the common precision.
pub fn max_relative_deviation(reference: &JetPoly, others: &[JetPoly]) -> f64 {
    let scale = reference.max_abs().max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for other in others {
        let keys = reference.terms.keys().chain(other.terms.keys());
        for m in keys {
            let (a, b) = (reference.terms.get(m), other.terms.get(m));
            let diff = match (a, b) {
                (Some(a), Some(b)) => a.sub(b).max_abs(),
                (Some(s), None) | (None, Some(s)) => s.max_abs(),
                (None, None) => 0.0,
            };
            worst = worst.max(diff / scale);
        }
    }
    worst
}

/// Degeneration families whose solutions are annihilated by the
/// corresponding determinant differential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "relation", rename_all = "snake_case")]
pub enum Relation {
    /// `y = a x` (or `v = a u`).
    Linear { a: Complex64 },
    /// `yⁿ = a xⁿ + b`.
    PowerXy { n: u32, a: Complex64, b: Complex64 },
    /// `vⁿ = a uⁿ + b`.
    PowerUv { n: u32, a: Complex64, b: Complex64 },
}

/// Polynomial germ data: `p(t) = p₀ + c₁t + c₂t² + c₃t³` for the driving
/// coordinate and for the free coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GermParams {
    pub lead: [Complex64; 4],
    pub free: [Complex64; 4],
    pub control: [Complex64; 4],
}

impl GermParams {
    /// Moderate random germ from `rng`.
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R) -> GermParams {
        let mut draw = |base: f64| {
            let mut v = [Complex64::new(0.0, 0.0); 4];
            v[0] = Complex64::from_polar(base + 0.3 * rng.random::<f64>(), 2.0 * std::f64::consts::PI * rng.random::<f64>());
            for vk in v.iter_mut().skip(1) {
                *vk = Complex64::new(rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2));
            }
            v
        };
        GermParams { lead: draw(0.8), free: draw(0.9), control: draw(0.8) }
    }
}

fn poly_series(p: &[Complex64; 4], len: usize) -> LaurentSeries {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); len];
    for (k, v) in p.iter().enumerate().take(len) {
        coeffs[k] = *v;
    }
    LaurentSeries::new('t', 0, coeffs)
}

fn germ_family(id: JetId, n: u32) -> Family {
    if id.is_curve() {
        Family::Cn { n }
    } else {
        Family::Sn { n }
    }
}

/// Formal germ on which `relation` holds between the first two coordinates
/// of `jd`'s coordinate system.
pub fn relation_germ(
    relation: &Relation,
    jd: &JetDifferential,
    n: u32,
    params: &GermParams,
    truncation: usize,
) -> Result<ChartExpansion, JetError> {
    let p = poly_series(&params.lead, truncation);
    let q = match *relation {
        Relation::Linear { a } => p.scale(a),
        Relation::PowerXy { n: k, a, b } | Relation::PowerUv { n: k, a, b } => {
            let rhs = p.powi(k as i32)?.scale(a).add(&LaurentSeries::constant('t', b, truncation));
            rhs.nth_root(k)?
        }
    };
    let system = jd.id.system();
    let expected = match relation {
        Relation::Linear { .. } => None,
        Relation::PowerXy { .. } => Some(CoordSystem::Xyz),
        Relation::PowerUv { .. } => Some(CoordSystem::Uvw),
    };
    if expected.is_some_and(|s| s != system) {
        return Err(JetError::Incompatible(format!("{relation:?} does not act on the coordinates of {}", jd.id)));
    }
    let mut coords = vec![p, q];
    if !jd.id.is_curve() {
        coords.push(poly_series(&params.free, truncation));
    }
    Ok(germ_chart(germ_family(jd.id, n), system, coords, truncation))
}

/// Control germ whose second coordinate is an unrelated cubic.
pub fn control_germ(jd: &JetDifferential, n: u32, params: &GermParams, truncation: usize) -> ChartExpansion {
    let mut coords = vec![poly_series(&params.lead, truncation), poly_series(&params.control, truncation)];
    if !jd.id.is_curve() {
        coords.push(poly_series(&params.free, truncation));
    }
    germ_chart(germ_family(jd.id, n), jd.id.system(), coords, truncation)
}

/// Largest coefficient magnitude of `jd` pulled back along `chart`.
pub fn pullback_max(jd: &JetDifferential, chart: &ChartExpansion) -> Result<f64, JetError> {
    Ok(evaluate(jd, chart)?.max_abs())
}

/// Largest coefficient of `jd` along a germ of the degeneration family.
pub fn annihilation_check(
    relation: &Relation,
    jd: &JetDifferential,
    n: u32,
    params: &GermParams,
    truncation: usize,
) -> Result<f64, JetError> {
    pullback_max(jd, &relation_germ(relation, jd, n, params, truncation)?)
}
