//! Green-weighted area integrals (characteristic functions) and boundary
//! means (proximity functions).

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{BaseSurface, NevanlinnaError, QuadConfig, Target};
use crate::expr::{taylor_jet, EvalResult, Expr, ExprError};
use crate::quadrature::{integrate, integrate_batched, GkConfig};

fn gk(cfg: &QuadConfig) -> GkConfig {
    GkConfig { abs_tol: cfg.abs_tol, rel_tol: cfg.rel_tol, max_evals: cfg.max_evals }
}

/// `∫_{|z|<R} (1/π) log(R/|z|) density(z) dA` over the Euclidean disc of the
/// geodesic radius `r`, in polar coordinates (angular integral inside).
pub fn green_integral<F>(surface: BaseSurface, r: f64, density: F, cfg: &QuadConfig) -> Result<f64, NevanlinnaError>
where
    F: Fn(Complex64) -> Result<f64, NevanlinnaError> + Sync,
{
    let big_r = surface.euclidean_radius(r)?;
    let used = AtomicUsize::new(0);
    let failure: Mutex<Option<NevanlinnaError>> = Mutex::new(None);
    let inner_cfg = gk(cfg);
    let fail = |e: NevanlinnaError| {
        let mut slot = failure.lock().expect("poisoned");
        if slot.is_none() {
            *slot = Some(e);
        }
        f64::NAN
    };
    let ring = |rho: f64| -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        if used.load(Ordering::Relaxed) > cfg.max_evals {
            return fail(NevanlinnaError::QuadratureBudgetExceeded(format!(
                "{} evaluations for the area integral",
                cfg.max_evals
            )));
        }
        let err: Mutex<Option<NevanlinnaError>> = Mutex::new(None);
        let out = integrate(
            |th| match density(Complex64::from_polar(rho, th)) {
                Ok(v) => v,
                Err(e) => {
                    err.lock().expect("poisoned").get_or_insert(e);
                    f64::NAN
                }
            },
            0.0,
            2.0 * PI,
            &inner_cfg,
        );
        if let Some(e) = err.into_inner().expect("poisoned") {
            return fail(e);
        }
        match out {
            Ok(o) => {
                used.fetch_add(o.evals, Ordering::Relaxed);
                (big_r / rho).ln() * rho * o.value / PI
            }
            Err(e) => fail(e.into()),
        }
    };
    let outer = integrate_batched(
        |xs| {
            let v: Vec<f64> = xs.par_iter().map(|&rho| ring(rho)).collect();
            let mut out = [0.0; 15];
            out.copy_from_slice(&v);
            out
        },
        0.0,
        big_r,
        &GkConfig { max_evals: cfg.max_evals, ..inner_cfg },
    );
    if let Some(e) = failure.into_inner().expect("poisoned") {
        return Err(e);
    }
    Ok(outer?.value)
}

/// Value and first derivative of `f` at `z`; `None` at a pole.
fn value_and_slope(f: &Expr, z: Complex64) -> Result<Option<(Complex64, Complex64)>, NevanlinnaError> {
    match taylor_jet(f, z, 1) {
        Ok(j) => {
            let (v, d) = (j.value(), j.derivative(1));
            if v.is_finite() && d.is_finite() {
                Ok(Some((v, d)))
            } else {
                Ok(None)
            }
        }
        Err(ExprError::PoleAtBasePoint { .. }) | Err(ExprError::NonFinite { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// `|f′|²/(1+|f|²)²`, the spherical density `¼Δ log(1+|f|²)`, evaluated
/// through `1/f` where `|f| > 1`. Zero at an exact pole sample.
pub fn spherical_density(f: &Expr, z: Complex64) -> Result<f64, NevanlinnaError> {
    let Some((v, d)) = value_and_slope(f, z)? else { return Ok(0.0) };
    let a2 = v.norm_sqr();
    Ok(if a2 <= 1.0 {
        d.norm_sqr() / (1.0 + a2).powi(2)
    } else {
        let g1 = d / (v * v);
        g1.norm_sqr() / (1.0 + 1.0 / a2).powi(2)
    })
}

/// `¼Δ log Σ|F_j|²` for holomorphic components, via the Lagrange identity
/// `Σ_{i<j} |F_i F_j′ − F_j F_i′|² / (Σ|F_j|²)²`.
fn projective_density(vals: &[(Complex64, Complex64)]) -> f64 {
    let scale = vals.iter().map(|(v, _)| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let s: Vec<(Complex64, Complex64)> = vals.iter().map(|(v, d)| (v / scale, d / scale)).collect();
    let norm2: f64 = s.iter().map(|(v, _)| v.norm_sqr()).sum();
    let mut num = 0.0;
    for i in 0..s.len() {
        for j in (i + 1)..s.len() {
            num += (s[i].0 * s[j].1 - s[j].0 * s[i].1).norm_sqr();
        }
    }
    num / (norm2 * norm2)
}

fn tuple_jets(fs: &[Expr], z: Complex64) -> Result<Vec<(Complex64, Complex64)>, NevanlinnaError> {
    fs.iter()
        .enumerate()
        .map(|(index, f)| value_and_slope(f, z)?.ok_or(NevanlinnaError::SampleAtPole { index, at: z }))
        .collect()
}

/// `(Δ_S log(1+Σ|f_j|²), λ(z))`: the surface Laplacian and the conformal
/// factor of the volume form. Their product is metric independent.
pub fn laplacian_density(surface: BaseSurface, fs: &[Expr], z: Complex64) -> Result<(f64, f64), NevanlinnaError> {
    let mut vals = vec![(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))];
    vals.extend(tuple_jets(fs, z)?);
    let lambda = surface.metric_density(z);
    Ok((4.0 * projective_density(&vals) / lambda, lambda))
}

/// Ahlfors–Shimizu characteristic `T(r, f) = ¼∫ g_r Δ_S log(1+|f|²) dV`.
pub fn char_t(f: &Expr, surface: BaseSurface, r: f64, cfg: &QuadConfig) -> Result<f64, NevanlinnaError> {
    green_integral(surface, r, |z| spherical_density(f, z), cfg)
}

/// `𝔗(r) = ¼∫ g_r Δ_S log(1+Σ|f_j|²) dV` for a tuple without poles on the
/// sample set.
pub fn char_multi(fs: &[Expr], surface: BaseSurface, r: f64, cfg: &QuadConfig) -> Result<f64, NevanlinnaError> {
    green_integral(
        surface,
        r,
        |z| {
            let (lap, lambda) = laplacian_density(surface, fs, z)?;
            Ok(0.25 * lap * lambda)
        },
        cfg,
    )
}

/// `¼∫ g_r Δ log Σ|F_j|² dA` for a holomorphic lift `(F_0, …, F_ν)` of a
/// curve into projective space.
pub fn char_projective(
    components: &[Expr],
    surface: BaseSurface,
    r: f64,
    cfg: &QuadConfig,
) -> Result<f64, NevanlinnaError> {
    green_integral(surface, r, |z| Ok(projective_density(&tuple_jets(components, z)?)), cfg)
}

/// Boundary mean `∫ log⁺|g| dπ_r` of a pointwise function. `g` returns
/// `None` at a pole, which is refused.
pub fn proximity_of<G>(g: G, surface: BaseSurface, r: f64, cfg: &QuadConfig) -> Result<f64, NevanlinnaError>
where
    G: Fn(Complex64) -> Result<Option<Complex64>, NevanlinnaError>,
{
    let big_r = surface.euclidean_radius(r)?;
    let err: Mutex<Option<NevanlinnaError>> = Mutex::new(None);
    let out = integrate(
        |th| {
            let z = Complex64::from_polar(big_r, th);
            match g(z) {
                Ok(Some(v)) if v.is_finite() => v.norm().ln().max(0.0),
                Ok(_) => {
                    err.lock().expect("poisoned").get_or_insert(NevanlinnaError::PoleOnBoundary { at: z });
                    f64::NAN
                }
                Err(e) => {
                    err.lock().expect("poisoned").get_or_insert(e);
                    f64::NAN
                }
            }
        },
        0.0,
        2.0 * PI,
        &gk(cfg),
    );
    if let Some(e) = err.into_inner().expect("poisoned") {
        return Err(e);
    }
    Ok(out?.value / (2.0 * PI))
}

const GUARD_MIN_SAMPLES: usize = 512;
const GUARD_MAX_SAMPLES: usize = 1 << 16;

/// Refuses a pole of `1/(f − a)` (or of `f` for `a = ∞`) within about
/// `cfg.pole_guard` of the circle: there `|g| > 1` and `|g′/g| ≈ 1/dist`.
fn guard_boundary(f: &Expr, target: Target, big_r: f64, cfg: &QuadConfig) -> Result<(), NevanlinnaError> {
    if cfg.pole_guard <= 0.0 {
        return Ok(());
    }
    let wanted = (2.0 * PI * big_r / cfg.pole_guard).ceil();
    let n = (wanted as usize).clamp(GUARD_MIN_SAMPLES, GUARD_MAX_SAMPLES);
    let limit = 0.5 / cfg.pole_guard.max(2.0 * PI * big_r / n as f64);
    let hit = (0..n).into_par_iter().find_map_any(|i| {
        let z = Complex64::from_polar(big_r, 2.0 * PI * i as f64 / n as f64);
        let (v, d) = match value_and_slope(f, z) {
            Ok(Some(vd)) => vd,
            Ok(None) => return Some(Ok(z)),
            Err(e) => return Some(Err(e)),
        };
        let (g_abs, rate) = match target {
            Target::Infinity => (v.norm(), (d / v).norm()),
            Target::Finite(a) => {
                let w = v - a;
                (1.0 / w.norm(), (d / w).norm())
            }
        };
        (g_abs > 1.0 && (rate > limit || rate.is_nan())).then_some(Ok(z))
    });
    match hit {
        Some(Ok(at)) => Err(NevanlinnaError::PoleOnBoundary { at }),
        Some(Err(e)) => Err(e),
        None => Ok(()),
    }
}

/// `m(r, f)` for `a = ∞`, else `m(r, 1/(f − a))`.
pub fn proximity_m(
    f: &Expr,
    target: Target,
    surface: BaseSurface,
    r: f64,
    cfg: &QuadConfig,
) -> Result<f64, NevanlinnaError> {
    guard_boundary(f, target, surface.euclidean_radius(r)?, cfg)?;
    proximity_of(
        |z| {
            let v = match f.eval(z) {
                EvalResult::Finite(v) => Some(v),
                EvalResult::Pole(_) => None,
                EvalResult::BranchViolation(node) => return Err(ExprError::BranchViolation { node, at: z }.into()),
            };
            Ok(match (target, v) {
                (Target::Infinity, v) => v,
                (Target::Finite(_), None) => Some(Complex64::new(0.0, 0.0)),
                (Target::Finite(a), Some(v)) => {
                    let d = v - a;
                    (d.norm() > 0.0).then(|| d.inv())
                }
            })
        },
        surface,
        r,
        cfg,
    )
}
