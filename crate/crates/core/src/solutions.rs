//! Explicit solution families of `f₁^{n₁}+⋯+f_k^{n_k}=1` and residual
//! verification over sample grids.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{residual, taylor_jet, BranchNode, EvalResult, Expr, ExprError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolutionError {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("unknown family identifier `{0}`")]
    UnknownFamily(String),
    #[error("{node} argument touches the branch cut at the domain centre")]
    BranchViolation { node: BranchNode },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    UnitDisc,
    ComplexPlane,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    Holomorphic,
    Meromorphic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Param {
    pub name: String,
    pub value: Complex64,
}

fn param(name: impl Into<String>, value: Complex64) -> Param {
    Param { name: name.into(), value }
}

/// One member of a solution family with its provenance.
#[derive(Debug, Clone)]
pub struct SolutionTuple {
    pub exprs: Vec<Expr>,
    pub exponents: Vec<u32>,
    pub coefficients: Option<Vec<Expr>>,
    pub domain: Domain,
    pub kind: Kind,
    pub family_id: String,
    pub params: Vec<Param>,
    /// Poles known from the construction (used as verification guards).
    pub known_poles: Vec<Complex64>,
    pub notes: Vec<String>,
}

impl SolutionTuple {
    pub fn k(&self) -> usize {
        self.exprs.len()
    }

    pub fn residual(&self, z: Complex64) -> Result<f64, ExprError> {
        residual(&self.exprs, &self.exponents, self.coefficients.as_deref(), z)
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const ADMISSIBILITY_SLACK: f64 = 1e-12;

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(values: &[u32]) -> u32 {
    values.iter().fold(1, |acc, &v| acc / gcd(acc, v) * v)
}

fn check_exponents(ns: &[u32]) -> Result<(), SolutionError> {
    if ns.len() < 2 {
        return Err(SolutionError::ParameterOutOfRange("need k >= 2".into()));
    }
    if ns.contains(&0) {
        return Err(SolutionError::ParameterOutOfRange("exponents must be positive".into()));
    }
    Ok(())
}

fn check_nonzero(a: &[Complex64]) -> Result<(), SolutionError> {
    if let Some(j) = a.iter().position(|v| v.norm() == 0.0) {
        return Err(SolutionError::ParameterOutOfRange(format!("a_{} must be nonzero", j + 2)));
    }
    Ok(())
}

fn weighted_sum(ns: &[u32], a: &[Complex64]) -> Complex64 {
    ns.iter().skip(1).zip(a).map(|(&n, &v)| v.powu(n)).sum()
}

fn a_params(a: &[Complex64]) -> Vec<Param> {
    a.iter().enumerate().map(|(j, v)| param(format!("a{}", j + 2), *v)).collect()
}

/// `exp(log(1 − s·zⁿ)/n₁)`, holomorphic on the unit disc when `|s| ≤ 1`.
fn disc_root(s: Complex64, n: u32, n1: u32) -> Expr {
    let z = Expr::var();
    let inner = 1.0 - s * z.powi(n as i32);
    (inner.ln() * (1.0 / n1 as f64)).exp()
}

/// Holomorphic family with `f_j = a_j z^{p_j}`, `n = lcm`, `p_j = n/n_j`.
pub fn holo_general(ns: &[u32], a: &[Complex64]) -> Result<SolutionTuple, SolutionError> {
    check_exponents(ns)?;
    if a.len() + 1 != ns.len() {
        return Err(SolutionError::ParameterOutOfRange("need one a_j per exponent n_2..n_k".into()));
    }
    check_nonzero(a)?;
    let s = weighted_sum(ns, a);
    if s.norm() > 1.0 + ADMISSIBILITY_SLACK {
        return Err(SolutionError::ParameterOutOfRange(format!(
            "|Σ a_j^n_j| = {} exceeds 1",
            s.norm()
        )));
    }
    let n = lcm(ns);
    let z = Expr::var();
    let mut exprs = vec![disc_root(s, n, ns[0])];
    for (&nj, &aj) in ns.iter().skip(1).zip(a) {
        exprs.push(aj * z.powi((n / nj) as i32));
    }
    Ok(SolutionTuple {
        exprs,
        exponents: ns.to_vec(),
        coefficients: None,
        domain: Domain::UnitDisc,
        kind: Kind::Holomorphic,
        family_id: "holo-general".into(),
        params: a_params(a),
        known_poles: vec![],
        notes: vec![format!("lcm n = {n}")],
    })
}

/// Meromorphic family with `f_j = a_j z^{−p_j}` and
/// `f₁ = z^{−p₁}·exp(log(zⁿ − A)/n₁)`, `A = Σ a_j^{n_j}`.
///
/// `log(zⁿ − A)` is realized as `log(−A) + log(1 − zⁿ/A)`, a branch that is
/// holomorphic on the whole unit disc when `|A| ≥ 1`.
pub fn mero_general(ns: &[u32], a: &[Complex64]) -> Result<SolutionTuple, SolutionError> {
    check_exponents(ns)?;
    if a.len() + 1 != ns.len() {
        return Err(SolutionError::ParameterOutOfRange("need one a_j per exponent n_2..n_k".into()));
    }
    check_nonzero(a)?;
    let s = weighted_sum(ns, a);
    if s.norm() < 1.0 - ADMISSIBILITY_SLACK {
        return Err(SolutionError::ParameterOutOfRange(format!(
            "|Σ a_j^n_j| = {} is below 1",
            s.norm()
        )));
    }
    let n = lcm(ns);
    let z = Expr::var();
    let lead = ((-s).ln() / ns[0] as f64).exp();
    let f1 = lead * z.powi(-((n / ns[0]) as i32)) * disc_root(s.inv(), n, ns[0]);
    let mut exprs = vec![f1];
    for (&nj, &aj) in ns.iter().skip(1).zip(a) {
        exprs.push(aj * z.powi(-((n / nj) as i32)));
    }
    Ok(SolutionTuple {
        exprs,
        exponents: ns.to_vec(),
        coefficients: None,
        domain: Domain::UnitDisc,
        kind: Kind::Meromorphic,
        family_id: "mero-general".into(),
        params: a_params(a),
        known_poles: vec![c(0.0, 0.0)],
        notes: vec![format!("lcm n = {n}")],
    })
}

/// Equal-exponent holomorphic family `f_j = a_j z`, `f₁ = e^{φ/n}`.
pub fn holo_equal(n: u32, k: usize, a: &[Complex64]) -> Result<SolutionTuple, SolutionError> {
    if a.len() + 1 != k {
        return Err(SolutionError::ParameterOutOfRange(format!("k = {k} needs {} values a_j", k.saturating_sub(1))));
    }
    let mut t = holo_general(&vec![n; k], a)?;
    t.family_id = "holo-equal".into();
    t.notes.clear();
    Ok(t)
}

/// Parameters of the equal-exponent meromorphic constructions.
#[derive(Debug, Clone, PartialEq)]
pub enum MeroParams {
    /// `f_j = a_j/z` for `j ≥ 2` (cases k = 2, k = 3 and the second k ≥ 4 variant).
    Uniform(Vec<Complex64>),
    /// `f₂ = ⁿ√b/z`, `f₃ = ⁿ√(−b)/z`, `f₄ = ⋯ = f_k = a z` (k ≥ 4).
    SplitPair { b: Complex64, a: Complex64 },
}

pub fn mero_equal(n: u32, k: usize, params: &MeroParams) -> Result<SolutionTuple, SolutionError> {
    match params {
        MeroParams::Uniform(a) => {
            if a.len() + 1 != k {
                return Err(SolutionError::ParameterOutOfRange(format!(
                    "k = {k} needs {} values a_j",
                    k.saturating_sub(1)
                )));
            }
            let mut t = mero_general(&vec![n; k], a)?;
            t.family_id = "mero-equal".into();
            t.notes = vec![match k {
                2 => "case k=2".into(),
                3 => "case k=3".into(),
                _ => "case k>=4, variant 2".into(),
            }];
            Ok(t)
        }
        MeroParams::SplitPair { b, a } => {
            if k < 4 {
                return Err(SolutionError::ParameterOutOfRange("split-pair variant needs k >= 4".into()));
            }
            if n == 0 {
                return Err(SolutionError::ParameterOutOfRange("exponent must be positive".into()));
            }
            if b.norm() == 0.0 || a.norm() == 0.0 {
                return Err(SolutionError::ParameterOutOfRange("a and b must be nonzero".into()));
            }
            let m = (k - 3) as f64;
            if a.norm() * m.powf(1.0 / n as f64) > 1.0 + ADMISSIBILITY_SLACK {
                return Err(SolutionError::ParameterOutOfRange(format!(
                    "|a·(k−3)^(1/n)| = {} exceeds 1",
                    a.norm() * m.powf(1.0 / n as f64)
                )));
            }
            let z = Expr::var();
            let root = |w: Complex64| (w.ln() / n as f64).exp();
            let mut exprs = vec![disc_root(a.powu(n) * m, n, n)];
            exprs.push(root(*b) * z.recip());
            exprs.push(root(-*b) * z.recip());
            for _ in 3..k {
                exprs.push(*a * z.clone());
            }
            Ok(SolutionTuple {
                exprs,
                exponents: vec![n; k],
                coefficients: None,
                domain: Domain::UnitDisc,
                kind: Kind::Meromorphic,
                family_id: "mero-equal".into(),
                params: vec![param("b", *b), param("a", *a)],
                known_poles: vec![c(0.0, 0.0)],
                notes: vec!["case k>=4, variant 1".into()],
            })
        }
    }
}

/// Identifiers of the catalog examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CatalogId {
    #[serde(rename = "K2N2_TRIG")]
    K2N2Trig,
    #[serde(rename = "K2N3_BAKER")]
    K2N3Baker,
    #[serde(rename = "K3N2_H")]
    K3N2H,
    #[serde(rename = "K3N2_M")]
    K3N2M,
    #[serde(rename = "K3N3_H")]
    K3N3H,
    #[serde(rename = "K3N3_M")]
    K3N3M,
    #[serde(rename = "K3N4_H")]
    K3N4H,
    #[serde(rename = "K3N5_H")]
    K3N5H,
    #[serde(rename = "K3N5_M")]
    K3N5M,
}

impl CatalogId {
    pub const ALL: [CatalogId; 9] = [
        CatalogId::K2N2Trig,
        CatalogId::K2N3Baker,
        CatalogId::K3N2H,
        CatalogId::K3N2M,
        CatalogId::K3N3H,
        CatalogId::K3N3M,
        CatalogId::K3N4H,
        CatalogId::K3N5H,
        CatalogId::K3N5M,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CatalogId::K2N2Trig => "K2N2_TRIG",
            CatalogId::K2N3Baker => "K2N3_BAKER",
            CatalogId::K3N2H => "K3N2_H",
            CatalogId::K3N2M => "K3N2_M",
            CatalogId::K3N3H => "K3N3_H",
            CatalogId::K3N3M => "K3N3_M",
            CatalogId::K3N4H => "K3N4_H",
            CatalogId::K3N5H => "K3N5_H",
            CatalogId::K3N5M => "K3N5_M",
        }
    }

    pub fn parse(s: &str) -> Result<CatalogId, SolutionError> {
        CatalogId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| SolutionError::UnknownFamily(s.to_string()))
    }

    fn holomorphic_variant(self) -> bool {
        matches!(self, CatalogId::K3N2H | CatalogId::K3N3H | CatalogId::K3N4H | CatalogId::K3N5H)
    }
}

/// Constants of the meromorphic quintic example.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuinticConstants {
    pub a: [Complex64; 4],
    pub p1: Complex64,
    pub p2: Complex64,
}

pub fn quintic_constants() -> QuinticConstants {
    let a: [Complex64; 4] =
        std::array::from_fn(|i| (Complex64::from_polar(1.0, 2.0 * PI * (i + 1) as f64 / 5.0) - 1.0).inv());
    let p1 = (a[2] * a[3] - a[0] * a[1]) / (a[2] + a[3] - a[0] - a[1]);
    let p2 = ((p1 - a[0]) * (p1 - a[1])).sqrt();
    QuinticConstants { a, p1, p2 }
}

/// `(γ₁, γ₂)` of the Baker parametrization as expressions in `z`.
pub fn baker_gammas() -> (Expr, Expr) {
    let z = Expr::var();
    let wp = z.wp();
    let s = z.wp_prime() * (1.0 / 3f64.sqrt());
    let half_inv = (2.0 * wp).recip();
    let varpi = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let g1 = (1.0 - s.clone()) * half_inv.clone();
    let g2 = varpi * ((1.0 + s) * half_inv);
    (g1, g2)
}

fn base_tuple(id: CatalogId) -> (Vec<Expr>, u32) {
    let w = Expr::var();
    let sqrt3 = 3f64.sqrt();
    match id {
        CatalogId::K2N2Trig => {
            let inv = w.recip();
            (vec![(w.clone() + inv.clone()) * 0.5, (w - inv) * c(0.0, -0.5)], 2)
        }
        CatalogId::K2N3Baker => {
            let (g1, g2) = baker_gammas();
            (vec![g1, g2], 3)
        }
        CatalogId::K3N2H | CatalogId::K3N2M => {
            let w2 = w.powi(2);
            (
                vec![
                    (w2.clone() - 2.0) * (1.0 / sqrt3),
                    (w2 + 1.0) * c(0.0, 1.0 / sqrt3),
                    2f64.sqrt() * w,
                ],
                2,
            )
        }
        CatalogId::K3N3H | CatalogId::K3N3M => (
            vec![
                9.0 * w.powi(4),
                -9.0 * w.powi(4) + 3.0 * w.clone(),
                -9.0 * w.powi(3) + 1.0,
            ],
            3,
        ),
        CatalogId::K3N4H => {
            let e3 = (3.0 * w.clone()).exp();
            let em = (-w.clone()).exp();
            let c1 = 2f64.powf(-0.75);
            let c2 = (-0.75 * c(-2.0, 0.0).ln()).exp();
            let c3 = (0.25 * c(-1.0, 0.0).ln()).exp();
            (
                vec![
                    c1 * (e3.clone() + em.clone()),
                    c2 * (e3 - em),
                    c3 * (2.0 * w).exp(),
                ],
                4,
            )
        }
        CatalogId::K3N5H => {
            let (s2, s3, s6) = (2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt());
            let ep = w.exp();
            let em = (-w).exp();
            let f1 = (1.0 / 3.0) * ((2.0 - s6) * ep.clone() + (2.0 + s6) * em.clone() + 1.0);
            let f2 = (1.0 / 6.0)
                * (c(s6 - 2.0, 3.0 * s2 - 2.0 * s3) * ep.clone() - c(s6 + 2.0, -3.0 * s2 - 2.0 * s3) * em.clone()
                    + 2.0);
            // The e^{α} coefficient of f₃ is the conjugate-sign partner of
            // f₂'s; the other sign choice leaves a residual of order one.
            let f3 = (1.0 / 6.0)
                * (c(s6 - 2.0, -3.0 * s2 + 2.0 * s3) * ep - c(s6 + 2.0, 3.0 * s2 + 2.0 * s3) * em + 2.0);
            (vec![f1, f2, f3], 5)
        }
        CatalogId::K3N5M => {
            let k = quintic_constants();
            let g1 = 1.0 + (k.p1 + k.p2 * w.exp()).recip();
            let g2 = 1.0 + (k.p1 + k.p2 * (-w).exp()).recip();
            let g3 = ((g1.powi(5) - 1.0) * (g2.powi(5) - 1.0).recip()).nth_root(5);
            let rot = Complex64::from_polar(1.0, PI / 5.0);
            (vec![g1, rot * (g2 * g3.clone()), g3], 5)
        }
    }
}

/// Catalog example `id` composed with `inner`.
pub fn catalog(id: CatalogId, inner: &Expr) -> Result<SolutionTuple, SolutionError> {
    if id.holomorphic_variant() && !inner.is_pole_free() {
        return Err(SolutionError::ParameterOutOfRange(format!(
            "{} needs a holomorphic inner function",
            id.as_str()
        )));
    }
    let (base, n) = base_tuple(id);
    let exprs: Vec<Expr> = base.iter().map(|f| f.compose(inner)).collect();
    let kind = match id {
        CatalogId::K2N2Trig if inner.is_zero_free_entire() => Kind::Holomorphic,
        CatalogId::K2N2Trig | CatalogId::K2N3Baker | CatalogId::K3N5M => Kind::Meromorphic,
        _ if exprs.iter().all(Expr::is_pole_free) => Kind::Holomorphic,
        _ => Kind::Meromorphic,
    };
    let domain = if inner.is_entire() { Domain::ComplexPlane } else { Domain::UnitDisc };
    let mut notes = Vec::new();
    if id == CatalogId::K3N5M {
        if let EvalResult::BranchViolation(node) = exprs[2].eval(c(0.0, 0.0)) {
            return Err(SolutionError::BranchViolation { node });
        }
        notes.push(
            "γ₃ uses the principal fifth root; samples where the radicand nears the cut are skipped".into(),
        );
    }
    if id == CatalogId::K3N5H {
        notes.push("f₃ e^α coefficient taken as √6−2−(3√2−2√3)i".into());
    }
    Ok(SolutionTuple {
        exprs,
        exponents: vec![n; base.len()],
        coefficients: None,
        domain,
        kind,
        family_id: id.as_str().into(),
        params: vec![],
        known_poles: vec![],
        notes,
    })
}

/// Sample-point specification for [`verify`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GridSpec {
    /// Concentric rings with evenly spaced angles (rings staggered).
    Polar { rings: usize, per_ring: usize, r_min: f64, r_max: f64 },
    /// Uniform random points in the disc `|z| < radius`.
    Random { count: usize, radius: f64, seed: u64 },
    Points(Vec<Complex64>),
}

impl GridSpec {
    /// 200-point grid: full disc for holomorphic tuples, the annulus
    /// `0.5 ≤ |z| ≤ 0.95` for meromorphic ones.
    pub fn default_for(tuple: &SolutionTuple) -> GridSpec {
        let r_min = match tuple.kind {
            Kind::Holomorphic => 0.05,
            Kind::Meromorphic => 0.5,
        };
        GridSpec::Polar { rings: 10, per_ring: 20, r_min, r_max: 0.95 }
    }

    pub fn points(&self) -> Vec<Complex64> {
        match self {
            GridSpec::Polar { rings, per_ring, r_min, r_max } => {
                let mut out = Vec::with_capacity(rings * per_ring);
                for i in 0..*rings {
                    let r = if *rings == 1 {
                        *r_max
                    } else {
                        r_min + (r_max - r_min) * i as f64 / (*rings - 1) as f64
                    };
                    let stagger = if i % 2 == 1 { 0.5 } else { 0.0 };
                    for j in 0..*per_ring {
                        let theta = 0.1234 + 2.0 * PI * (j as f64 + stagger) / *per_ring as f64;
                        out.push(Complex64::from_polar(r, theta));
                    }
                }
                out
            }
            GridSpec::Random { count, radius, seed } => {
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
                (0..*count)
                    .map(|_| {
                        let r = radius * rng.random::<f64>().sqrt();
                        Complex64::from_polar(r, 2.0 * PI * rng.random::<f64>())
                    })
                    .collect()
            }
            GridSpec::Points(p) => p.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub z: Complex64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub samples: usize,
    pub accepted: usize,
    pub tol: f64,
    pub max_residual: f64,
    pub skipped_near_pole: usize,
    pub skipped_branch: usize,
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.accepted > 0
    }
}

/// Distance below which a sample is treated as sitting on a pole.
pub const POLE_GUARD: f64 = 1e-3;

enum Sample {
    Accepted(f64),
    NearPole,
    Branch,
}

/// Root-test estimate of the distance from `z` to the nearest singularity.
fn singularity_distance(f: &Expr, z: Complex64) -> Result<f64, ExprError> {
    const K: usize = 8;
    let j = taylor_jet(f, z, K)?;
    let ck = j.coeffs[K].norm();
    Ok(if ck > 0.0 { ck.powf(-1.0 / K as f64) } else { f64::INFINITY })
}

fn classify(tuple: &SolutionTuple, z: Complex64) -> Sample {
    if tuple.known_poles.iter().any(|p| (z - p).norm() < POLE_GUARD) {
        return Sample::NearPole;
    }
    let r = match tuple.residual(z) {
        Ok(r) => r,
        Err(ExprError::BranchViolation { .. }) => return Sample::Branch,
        Err(_) => return Sample::NearPole,
    };
    for f in &tuple.exprs {
        match singularity_distance(f, z) {
            Ok(d) if d < POLE_GUARD => return Sample::NearPole,
            Ok(_) => {}
            Err(ExprError::BranchViolation { .. }) => return Sample::Branch,
            Err(_) => return Sample::NearPole,
        }
    }
    Sample::Accepted(r)
}

/// Residual of `tuple` at every grid sample, skipping near-pole and
/// branch-violating samples.
pub fn verify(tuple: &SolutionTuple, grid: &GridSpec, tol: f64) -> VerifyReport {
    let pts = grid.points();
    let outcomes: Vec<Sample> = pts.par_iter().map(|&z| classify(tuple, z)).collect();
    let mut report = VerifyReport {
        samples: pts.len(),
        accepted: 0,
        tol,
        max_residual: 0.0,
        skipped_near_pole: 0,
        skipped_branch: 0,
        failures: vec![],
    };
    for (z, o) in pts.iter().zip(outcomes) {
        match o {
            Sample::Accepted(r) => {
                report.accepted += 1;
                report.max_residual = report.max_residual.max(r);
                if r > tol {
                    report.failures.push(Failure { z: *z, residual: r });
                }
            }
            Sample::NearPole => report.skipped_near_pole += 1,
            Sample::Branch => report.skipped_branch += 1,
        }
    }
    report
}

/// Factory families addressable by string id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactoryFamily {
    #[serde(rename = "holo-equal")]
    HoloEqual,
    #[serde(rename = "mero-equal")]
    MeroEqual,
    #[serde(rename = "holo-general")]
    HoloGeneral,
    #[serde(rename = "mero-general")]
    MeroGeneral,
}

impl FactoryFamily {
    pub const ALL: [FactoryFamily; 4] = [
        FactoryFamily::HoloEqual,
        FactoryFamily::MeroEqual,
        FactoryFamily::HoloGeneral,
        FactoryFamily::MeroGeneral,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FactoryFamily::HoloEqual => "holo-equal",
            FactoryFamily::MeroEqual => "mero-equal",
            FactoryFamily::HoloGeneral => "holo-general",
            FactoryFamily::MeroGeneral => "mero-general",
        }
    }

    pub fn parse(s: &str) -> Option<FactoryFamily> {
        FactoryFamily::ALL.into_iter().find(|f| f.as_str() == s)
    }
}

fn random_phase<R: Rng>(rng: &mut R) -> f64 {
    2.0 * PI * rng.random::<f64>()
}

/// Draws `count` nonzero values with `|a_j|^{n_j} ≤ 1/count`, so that the
/// holomorphic admissibility condition holds.
fn draw_small<R: Rng>(rng: &mut R, ns: &[u32]) -> Vec<Complex64> {
    let share = 1.0 / ns.len() as f64;
    ns.iter()
        .map(|&n| {
            let r = (0.2 + 0.8 * rng.random::<f64>()) * share.powf(1.0 / n as f64);
            Complex64::from_polar(r, random_phase(rng))
        })
        .collect()
}

/// Draws values with `|Σ a_j^{n_j}| ≥ 1` by rejection.
fn draw_large<R: Rng>(rng: &mut R, ns: &[u32]) -> Vec<Complex64> {
    loop {
        let a: Vec<Complex64> = ns
            .iter()
            .map(|_| Complex64::from_polar(1.0 + 0.5 * rng.random::<f64>(), random_phase(rng)))
            .collect();
        let s: Complex64 = ns.iter().zip(&a).map(|(&n, v)| v.powu(n)).sum();
        if s.norm() >= 1.0 {
            return a;
        }
    }
}

/// A random admissible member of `family`.
pub fn draw<R: Rng>(family: FactoryFamily, rng: &mut R) -> SolutionTuple {
    match family {
        FactoryFamily::HoloEqual => {
            let n = rng.random_range(2..=6);
            let k = rng.random_range(2..=4usize);
            let a = draw_small(rng, &vec![n; k - 1]);
            holo_equal(n, k, &a).expect("drawn parameters are admissible")
        }
        FactoryFamily::MeroEqual => {
            let n = rng.random_range(2..=6);
            let k = rng.random_range(2..=5usize);
            let params = if k >= 4 && rng.random::<bool>() {
                let b = Complex64::from_polar(0.5 + rng.random::<f64>(), random_phase(rng));
                let r = (0.2 + 0.8 * rng.random::<f64>()) / ((k - 3) as f64).powf(1.0 / n as f64);
                MeroParams::SplitPair { b, a: Complex64::from_polar(r, random_phase(rng)) }
            } else {
                MeroParams::Uniform(draw_large(rng, &vec![n; k - 1]))
            };
            mero_equal(n, k, &params).expect("drawn parameters are admissible")
        }
        FactoryFamily::HoloGeneral | FactoryFamily::MeroGeneral => {
            let k = rng.random_range(2..=3usize);
            let ns: Vec<u32> = (0..k).map(|_| rng.random_range(1..=4)).collect();
            if family == FactoryFamily::HoloGeneral {
                let a = draw_small(rng, &ns[1..]);
                holo_general(&ns, &a).expect("drawn parameters are admissible")
            } else {
                let a = draw_large(rng, &ns[1..]);
                mero_general(&ns, &a).expect("drawn parameters are admissible")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lcm_values() {
        assert_eq!(lcm(&[2, 3]), 6);
        assert_eq!(lcm(&[4, 6, 3]), 12);
        assert_eq!(lcm(&[5]), 5);
    }

    #[test]
    fn quintic_constant_values() {
        let k = quintic_constants();
        assert!((k.p1 - c(-0.5, 0.0)).norm() < 1e-12, "{}", k.p1);
        assert!((k.p2.norm() - 0.334_37).abs() < 1e-4, "{}", k.p2);
    }

    #[test]
    fn catalog_parse_round_trip() {
        for id in CatalogId::ALL {
            assert_eq!(CatalogId::parse(id.as_str()).unwrap(), id);
        }
        assert!(matches!(CatalogId::parse("K9N9"), Err(SolutionError::UnknownFamily(_))));
    }
}
