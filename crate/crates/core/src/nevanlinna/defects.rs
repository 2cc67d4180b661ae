//! First Main Theorem residuals, defect estimates, Wronskians and the
//! defect-relation checks built on them.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    char_multi, char_t, check_schedule, counting_n, locate_a_points, proximity_m, proximity_of, BaseSurface,
    NevanlinnaError, QuadConfig, Target, ZeroPoleList,
};
use crate::expr::{taylor_jet, EvalResult, Expr, ExprError};

/// Default allowance for the rise of the FMT residual over a schedule.
pub const FMT_GROWTH_TOL: f64 = 0.25;
const SAMPLE_POINTS: usize = 20;
const SYZYGY_TOL: f64 = 1e-10;
const DEPENDENCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FmtRow {
    pub r: f64,
    pub t: f64,
    pub m: f64,
    pub n: f64,
    /// `|T − m − N|`.
    pub residual: f64,
}

/// `|T(r,f) − m(r,·) − N(r,·)|` for the `target`-points listed in `points`.
pub fn fmt_residual(
    f: &Expr,
    target: Target,
    surface: BaseSurface,
    r: f64,
    points: &ZeroPoleList,
    cfg: &QuadConfig,
) -> Result<FmtRow, NevanlinnaError> {
    let t = char_t(f, surface, r, cfg)?;
    let m = proximity_m(f, target, surface, r, cfg)?;
    let n = counting_n(points, surface, r, None)?;
    Ok(FmtRow { r, t, m, n, residual: (t - m - n).abs() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FmtSeries {
    pub rows: Vec<FmtRow>,
    pub max_residual: f64,
    /// Set when the residual rises by more than `growth_tol` above its
    /// smallest earlier value.
    pub growth_flag: bool,
    pub growth_tol: f64,
}

pub fn fmt_series(
    f: &Expr,
    target: Target,
    surface: BaseSurface,
    schedule: &[f64],
    points: &ZeroPoleList,
    growth_tol: f64,
    cfg: &QuadConfig,
) -> Result<FmtSeries, NevanlinnaError> {
    check_schedule(schedule, 1)?;
    let rows = schedule
        .iter()
        .map(|&r| fmt_residual(f, target, surface, r, points, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let mut low = f64::INFINITY;
    let mut growth_flag = false;
    for row in &rows {
        growth_flag |= row.residual > low + growth_tol;
        low = low.min(row.residual);
    }
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(FmtSeries { rows, max_residual, growth_flag, growth_tol })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefectEstimate {
    pub target: Target,
    /// `None` for the untruncated defect.
    pub truncation: Option<u32>,
    pub schedule: Vec<f64>,
    pub characteristic: Vec<f64>,
    pub counting: Vec<f64>,
    /// `1 − max_r N/T` before clamping.
    pub raw: f64,
    /// `raw` clamped into `[0, 1]`.
    pub value: f64,
    pub clamped: bool,
}

/// `1 − max over the schedule of N^{[k]}(r)/T(r)`, a finite-radius
/// surrogate for the defect `δ^{[k]}(f, a)`.
pub fn defect_estimate(
    f: &Expr,
    target: Target,
    k: Option<u32>,
    surface: BaseSurface,
    schedule: &[f64],
    points: &ZeroPoleList,
    cfg: &QuadConfig,
) -> Result<DefectEstimate, NevanlinnaError> {
    check_schedule(schedule, 4)?;
    let characteristic = schedule
        .iter()
        .map(|&r| char_t(f, surface, r, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    from_characteristic(target, k, surface, schedule, characteristic, points)
}

fn from_characteristic(
    target: Target,
    k: Option<u32>,
    surface: BaseSurface,
    schedule: &[f64],
    characteristic: Vec<f64>,
    points: &ZeroPoleList,
) -> Result<DefectEstimate, NevanlinnaError> {
    let counting = schedule
        .iter()
        .map(|&r| counting_n(points, surface, r, k))
        .collect::<Result<Vec<_>, _>>()?;
    let mut worst = f64::NEG_INFINITY;
    for ((r, t), n) in schedule.iter().zip(&characteristic).zip(&counting) {
        if *t <= 0.0 {
            return Err(NevanlinnaError::NonPositiveCharacteristic { r: *r });
        }
        worst = worst.max(n / t);
    }
    let raw = 1.0 - worst;
    let value = raw.clamp(0.0, 1.0);
    Ok(DefectEstimate {
        target,
        truncation: k,
        schedule: schedule.to_vec(),
        characteristic,
        counting,
        raw,
        value,
        clamped: value != raw,
    })
}

/// `κ(r) r² / 𝔗(r)` for a pole-free tuple.
/// Flat surfaces give 0 without integrating.
pub fn growth_ratio(fs: &[Expr], surface: BaseSurface, r: f64, cfg: &QuadConfig) -> Result<f64, NevanlinnaError> {
    let kappa = surface.kappa(r);
    if kappa == 0.0 {
        surface.euclidean_radius(r)?;
        return Ok(0.0);
    }
    let t = char_multi(fs, surface, r, cfg)?;
    if t <= 0.0 {
        return Err(NevanlinnaError::NonPositiveCharacteristic { r });
    }
    Ok(kappa * r * r / t)
}

/// Matrix `(ψ_j^{(i)}(z))` with rows `i = 0..n` for `n + 1` members.
fn derivative_matrix(fs: &[Expr], z: Complex64) -> Result<DMatrix<Complex64>, NevanlinnaError> {
    let n = fs.len();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for (j, f) in fs.iter().enumerate() {
        let jet = taylor_jet(f, z, n.saturating_sub(1)).map_err(|e| match e {
            ExprError::PoleAtBasePoint { at } | ExprError::NonFinite { at } => NevanlinnaError::PoleAtBasePoint { at },
            other => other.into(),
        })?;
        for i in 0..n {
            m[(i, j)] = jet.derivative(i);
        }
    }
    Ok(m)
}

/// Wronskian `det(𝔛^i ψ_j)` with `𝔛 = d/dz`.
pub fn wronskian_value(fs: &[Expr], z: Complex64) -> Result<Complex64, NevanlinnaError> {
    Ok(derivative_matrix(fs, z)?.determinant())
}

/// `|det M| / Π ‖columns‖`, zero for dependent columns.
fn normalized_det(m: &DMatrix<Complex64>) -> f64 {
    let scale: f64 = m.column_iter().map(|c| c.norm()).product();
    if scale == 0.0 {
        0.0
    } else {
        m.clone().determinant().norm() / scale
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum LemmaCase {
    /// `ψ_0, …, ψ_{n−1}` independent: `ψ_j = Δ_j/Δ` from Cramer's rule on
    /// the logarithmic-derivative system with `ψ_n` moved to the right.
    Independent { cramer_residual: f64 },
    /// Linearly dependent family; the listed members form a maximal
    /// independent sub-family.
    Dependent { independent: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub n: usize,
    pub truncation: u32,
    pub syzygy_residual: f64,
    pub case: LemmaCase,
    pub defects: Vec<DefectEstimate>,
    pub sum: f64,
    /// `n − Σ δ^{[n]}`.
    pub margin: f64,
    pub slack: f64,
    pub pass: bool,
}

fn eval_point(f: &Expr, z: Complex64) -> Result<Complex64, NevanlinnaError> {
    match f.eval(z) {
        EvalResult::Finite(v) => Ok(v),
        EvalResult::Pole(_) => Err(NevanlinnaError::PoleAtBasePoint { at: z }),
        EvalResult::BranchViolation(node) => Err(ExprError::BranchViolation { node, at: z }.into()),
    }
}

fn sample_points(seed: u64, radius: f64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..SAMPLE_POINTS)
        .map(|_| {
            let rho = radius * rng.random::<f64>().sqrt();
            Complex64::from_polar(rho, 2.0 * std::f64::consts::PI * rng.random::<f64>())
        })
        .collect()
}

fn points_of(
    f: &Expr,
    target: Target,
    surface: BaseSurface,
    r: f64,
) -> Result<ZeroPoleList, NevanlinnaError> {
    let skip = match target {
        Target::Finite(a) => a == Complex64::new(0.0, 0.0) && f.is_zero_free_entire(),
        Target::Infinity => f.is_pole_free(),
    };
    if skip {
        Ok(ZeroPoleList::empty())
    } else {
        locate_a_points(f, target, surface, r)
    }
}

/// Numerical check of `Σ_j δ^{[n]}(ψ_j, 0) ≤ n` for `ψ_0 + ⋯ + ψ_n ≡ 0`.
///
/// Zero lists are located on the largest disc when `lists` is `None`.
#[allow(clippy::too_many_arguments)]
pub fn lemma_defect_check(
    psis: &[Expr],
    surface: BaseSurface,
    schedule: &[f64],
    lists: Option<&[ZeroPoleList]>,
    seed: u64,
    slack: f64,
    cfg: &QuadConfig,
) -> Result<LemmaReport, NevanlinnaError> {
    check_schedule(schedule, 4)?;
    if psis.len() < 2 {
        return Err(NevanlinnaError::InvalidPoints("need at least two members".into()));
    }
    let n = psis.len() - 1;
    let samples = sample_points(seed, 0.9 * surface.euclidean_radius(schedule[0])?);

    let mut syzygy_residual = 0.0f64;
    let mut moving = vec![false; psis.len()];
    for &z in &samples {
        let vals = psis.iter().map(|f| eval_point(f, z)).collect::<Result<Vec<_>, _>>()?;
        let scale = 1.0 + vals.iter().map(|v| v.norm()).sum::<f64>();
        let res = vals.iter().sum::<Complex64>().norm() / scale;
        if res > SYZYGY_TOL {
            return Err(NevanlinnaError::NotASyzygy { residual: res, at: z });
        }
        syzygy_residual = syzygy_residual.max(res);
        for (j, f) in psis.iter().enumerate() {
            let d = taylor_jet(f, z, 1)?.derivative(1);
            moving[j] |= d.norm() > SYZYGY_TOL * (1.0 + vals[j].norm());
        }
    }
    if let Some(index) = moving.iter().position(|m| !m) {
        return Err(NevanlinnaError::ConstantMember { index });
    }

    let head = &psis[..n];
    let independent = samples
        .iter()
        .map(|&z| derivative_matrix(head, z).map(|m| normalized_det(&m) > DEPENDENCE_TOL))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .any(|b| b);
    let case = if independent {
        let mut worst = 0.0f64;
        for &z in &samples {
            // Unknowns ψ_j (j < n) with coefficients 𝔛^μψ_j/ψ_j, μ = 0..n−1,
            // right-hand side −𝔛^μψ_n.
            let w = derivative_matrix(head, z)?;
            let mut a = w.clone();
            for j in 0..n {
                let v = w[(0, j)];
                for i in 0..n {
                    a[(i, j)] = w[(i, j)] / v;
                }
            }
            let jet = taylor_jet(&psis[n], z, n.saturating_sub(1))?;
            let delta = a.clone().determinant();
            for j in 0..n {
                let mut aj = a.clone();
                for i in 0..n {
                    aj[(i, j)] = -jet.derivative(i);
                }
                let psi = w[(0, j)];
                let err = (psi - aj.determinant() / delta).norm() / (1.0 + psi.norm());
                worst = worst.max(err);
            }
        }
        LemmaCase::Independent { cramer_residual: worst }
    } else {
        let mut chosen: Vec<usize> = Vec::new();
        for j in 0..psis.len() {
            let mut trial: Vec<Expr> = chosen.iter().map(|&i| psis[i].clone()).collect();
            trial.push(psis[j].clone());
            let ok = samples
                .iter()
                .map(|&z| derivative_matrix(&trial, z).map(|m| normalized_det(&m) > DEPENDENCE_TOL))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .any(|b| b);
            if ok {
                chosen.push(j);
            }
        }
        LemmaCase::Dependent { independent: chosen }
    };

    let r_max = *schedule.last().expect("checked");
    let truncation = n as u32;
    let mut defects = Vec::with_capacity(psis.len());
    for (j, psi) in psis.iter().enumerate() {
        let located;
        let list = match lists {
            Some(l) => l
                .get(j)
                .ok_or_else(|| NevanlinnaError::InvalidPoints(format!("no zero list for member {j}")))?,
            None => {
                located = points_of(psi, Target::Finite(Complex64::new(0.0, 0.0)), surface, r_max)?;
                &located
            }
        };
        defects.push(defect_estimate(
            psi,
            Target::Finite(Complex64::new(0.0, 0.0)),
            Some(truncation),
            surface,
            schedule,
            list,
            cfg,
        )?);
    }
    let sum: f64 = defects.iter().map(|d| d.value).sum();
    Ok(LemmaReport {
        n,
        truncation,
        syzygy_residual,
        case,
        defects,
        sum,
        margin: n as f64 - sum,
        slack,
        pass: sum <= n as f64 + slack,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogDerivRow {
    pub r: f64,
    /// `m(r, 𝔛^k ψ / ψ)`.
    pub m: f64,
    pub t: f64,
    /// `(3k/2) log T − κ(r) r² + log⁺ log r + slack`.
    pub bound: f64,
    pub violation: bool,
}

/// Tabulates the logarithmic-derivative estimate on a schedule.
pub fn logderiv_check(
    psi: &Expr,
    k: usize,
    surface: BaseSurface,
    schedule: &[f64],
    slack: f64,
    cfg: &QuadConfig,
) -> Result<Vec<LogDerivRow>, NevanlinnaError> {
    check_schedule(schedule, 1)?;
    schedule
        .iter()
        .map(|&r| {
            let m = proximity_of(
                |z| match taylor_jet(psi, z, k) {
                    Ok(j) if j.value().norm() > 0.0 => Ok(Some(j.derivative(k) / j.value())),
                    Ok(_) | Err(ExprError::PoleAtBasePoint { .. }) | Err(ExprError::NonFinite { .. }) => Ok(None),
                    Err(e) => Err(e.into()),
                },
                surface,
                r,
                cfg,
            )?;
            let t = char_t(psi, surface, r, cfg)?;
            if t <= 0.0 {
                return Err(NevanlinnaError::NonPositiveCharacteristic { r });
            }
            let bound = 1.5 * k as f64 * t.ln() - surface.kappa(r) * r * r + r.ln().ln().max(0.0) + slack;
            Ok(LogDerivRow { r, m, t, bound, violation: m > bound })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallFunctionReport {
    pub defects: Vec<DefectEstimate>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Estimates `δ(α_j f_j, ∞)` for each product and checks it is within
/// `tolerance` of 1.
pub fn small_function_check(
    alphas: &[Expr],
    fs: &[Expr],
    surface: BaseSurface,
    schedule: &[f64],
    tolerance: f64,
    cfg: &QuadConfig,
) -> Result<SmallFunctionReport, NevanlinnaError> {
    if alphas.len() != fs.len() {
        return Err(NevanlinnaError::InvalidPoints("coefficient and function lists differ in length".into()));
    }
    check_schedule(schedule, 4)?;
    let r_max = *schedule.last().expect("checked");
    let mut defects = Vec::new();
    for (a, f) in alphas.iter().zip(fs) {
        let g = a.mul(f);
        let poles = points_of(&g, Target::Infinity, surface, r_max)?;
        defects.push(defect_estimate(&g, Target::Infinity, None, surface, schedule, &poles, cfg)?);
    }
    let pass = defects.iter().all(|d| d.value >= 1.0 - tolerance);
    Ok(SmallFunctionReport { defects, tolerance, pass })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusRow {
    pub r: f64,
    pub t: f64,
    pub m: f64,
    pub n: f64,
    pub n_k: f64,
    pub fmt_residual: f64,
    /// `κ(r) r² / T(r)`.
    pub growth_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NevanlinnaReport {
    pub surface: BaseSurface,
    pub target: Target,
    pub truncation: Option<u32>,
    pub rows: Vec<RadiusRow>,
    /// Present when the schedule has at least four radii.
    pub defect: Option<DefectEstimate>,
    pub defect_truncated: Option<DefectEstimate>,
    pub fmt_growth_flag: bool,
    pub clamp_count: usize,
}

/// Per-radius characteristic, proximity, counting and FMT data for `f` and
/// `target`, plus defect estimates when the schedule allows.
pub fn report(
    f: &Expr,
    target: Target,
    k: Option<u32>,
    surface: BaseSurface,
    schedule: &[f64],
    points: &ZeroPoleList,
    cfg: &QuadConfig,
) -> Result<NevanlinnaReport, NevanlinnaError> {
    check_schedule(schedule, 1)?;
    let mut rows = Vec::with_capacity(schedule.len());
    for &r in schedule {
        let fmt = fmt_residual(f, target, surface, r, points, cfg)?;
        let n_k = counting_n(points, surface, r, k)?;
        let kappa = surface.kappa(r);
        let growth_ratio = if kappa == 0.0 {
            0.0
        } else if fmt.t > 0.0 {
            kappa * r * r / fmt.t
        } else {
            f64::NEG_INFINITY
        };
        rows.push(RadiusRow { r, t: fmt.t, m: fmt.m, n: fmt.n, n_k, fmt_residual: fmt.residual, growth_ratio });
    }
    let mut low = f64::INFINITY;
    let mut fmt_growth_flag = false;
    for row in &rows {
        fmt_growth_flag |= row.fmt_residual > low + FMT_GROWTH_TOL;
        low = low.min(row.fmt_residual);
    }
    let (defect, defect_truncated) = if schedule.len() >= 4 {
        let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
        (
            Some(from_characteristic(target, None, surface, schedule, ts.clone(), points)?),
            Some(from_characteristic(target, k, surface, schedule, ts, points)?),
        )
    } else {
        (None, None)
    };
    let clamp_count = defect.iter().chain(&defect_truncated).filter(|d| d.clamped).count();
    Ok(NevanlinnaReport {
        surface,
        target,
        truncation: k,
        rows,
        defect,
        defect_truncated,
        fmt_growth_flag,
        clamp_count,
    })
}
