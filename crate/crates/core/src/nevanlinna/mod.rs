//! Numerical Nevanlinna theory on the complex plane and the Poincaré disc.
//!
//! All discs are centred at the base point `o = 0`. On the Poincaré disc
//! (curvature −1, metric `4|dz|²/(1−|z|²)²`) a geodesic radius `r`
//! corresponds to the Euclidean radius `tanh(r/2)`; because the Laplacian
//! times the volume form is conformally invariant, every Green integral is
//! computed in the Euclidean coordinate.

mod apoints;
mod characteristic;
mod defects;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::ExprError;
use crate::quadrature::QuadratureError;

pub use apoints::{counting_n, locate_a_points, APoint, Provenance, ZeroPoleList, LOCATE_CELL_DIAMETER};
pub use characteristic::{
    char_multi, char_projective, char_t, green_integral, laplacian_density, proximity_m, proximity_of,
    spherical_density,
};
pub use defects::{
    defect_estimate, fmt_residual, fmt_series, growth_ratio, lemma_defect_check, logderiv_check, report,
    small_function_check, wronskian_value, DefectEstimate, FmtRow, FmtSeries, LemmaCase, LemmaReport, LogDerivRow,
    NevanlinnaReport, RadiusRow, SmallFunctionReport,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NevanlinnaError {
    #[error("point {z} is not in the punctured disc of Euclidean radius {radius}")]
    OutsideDisc { z: Complex64, radius: f64 },
    #[error("radius {0} is not a positive finite number")]
    InvalidRadius(f64),
    #[error("quadrature budget exceeded: {0}")]
    QuadratureBudgetExceeded(String),
    #[error("member {index} has a pole at the sample {at}")]
    SampleAtPole { index: usize, at: Complex64 },
    #[error("a-point at {at} lies within the boundary guard; nudge the radius")]
    BoundaryZero { at: Complex64 },
    #[error("a-point at the base point: the counting function is undefined there")]
    APointAtOrigin,
    #[error("pole or a-point on the boundary circle near {at}")]
    PoleOnBoundary { at: Complex64 },
    #[error("pole at the base point {at}")]
    PoleAtBasePoint { at: Complex64 },
    #[error("tuple does not sum to zero (residual {residual:e} at {at})")]
    NotASyzygy { residual: f64, at: Complex64 },
    #[error("member {index} is constant")]
    ConstantMember { index: usize },
    #[error("invalid radius schedule: {0}")]
    InvalidSchedule(String),
    #[error("characteristic is not positive at r = {r}")]
    NonPositiveCharacteristic { r: f64 },
    #[error("invalid a-point list: {0}")]
    InvalidPoints(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

impl From<QuadratureError> for NevanlinnaError {
    fn from(e: QuadratureError) -> Self {
        NevanlinnaError::QuadratureBudgetExceeded(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SurfaceKind {
    #[serde(rename = "C")]
    ComplexPlane,
    #[serde(rename = "D")]
    PoincareDisc,
}

/// Base surface with its complete metric and Green kernels centred at 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseSurface {
    pub kind: SurfaceKind,
}

impl BaseSurface {
    pub const PLANE: BaseSurface = BaseSurface { kind: SurfaceKind::ComplexPlane };
    pub const DISC: BaseSurface = BaseSurface { kind: SurfaceKind::PoincareDisc };

    pub fn parse(s: &str) -> Option<BaseSurface> {
        match s {
            "C" | "plane" => Some(BaseSurface::PLANE),
            "D" | "disc" => Some(BaseSurface::DISC),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self.kind {
            SurfaceKind::ComplexPlane => "C",
            SurfaceKind::PoincareDisc => "D",
        }
    }

    /// Euclidean radius of the geodesic disc of radius `r` about 0.
    pub fn euclidean_radius(&self, r: f64) -> Result<f64, NevanlinnaError> {
        if !(r.is_finite() && r > 0.0) {
            return Err(NevanlinnaError::InvalidRadius(r));
        }
        Ok(match self.kind {
            SurfaceKind::ComplexPlane => r,
            SurfaceKind::PoincareDisc => (0.5 * r).tanh(),
        })
    }

    /// Conformal factor `λ` of the metric `λ|dz|²`.
    pub fn metric_density(&self, z: Complex64) -> f64 {
        match self.kind {
            SurfaceKind::ComplexPlane => 1.0,
            SurfaceKind::PoincareDisc => 4.0 / (1.0 - z.norm_sqr()).powi(2),
        }
    }

    /// Gaussian curvature at `z`.
    pub fn curvature(&self, _z: Complex64) -> f64 {
        match self.kind {
            SurfaceKind::ComplexPlane => 0.0,
            SurfaceKind::PoincareDisc => -1.0,
        }
    }

    /// Lower curvature bound `κ(r)` on the geodesic disc of radius `r`.
    pub fn kappa(&self, _r: f64) -> f64 {
        self.curvature(Complex64::new(0.0, 0.0))
    }
}

/// Green function `g_r(0, z)` of the geodesic disc of radius `r`, normalized
/// so that `−½ ∫ Δφ g_r dV = φ(0)`.
pub fn green(surface: BaseSurface, r: f64, z: Complex64) -> Result<f64, NevanlinnaError> {
    let big_r = surface.euclidean_radius(r)?;
    let a = z.norm();
    if a == 0.0 || a > big_r {
        return Err(NevanlinnaError::OutsideDisc { z, radius: big_r });
    }
    Ok((big_r / a).ln() / std::f64::consts::PI)
}

/// Quadrature tolerances and budget for Green integrals and boundary means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Total integrand evaluations allowed for one integral.
    pub max_evals: usize,
    /// Poles of the proximity integrand this close to the circle are refused.
    pub pole_guard: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { rel_tol: 1e-9, abs_tol: 1e-12, max_evals: 4_000_000, pole_guard: 1e-3 }
    }
}

/// Value whose preimages are counted: a finite `a` or the poles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Finite(Complex64),
    Infinity,
}

/// Validates a radius schedule: strictly increasing positive radii.
pub fn check_schedule(schedule: &[f64], min_len: usize) -> Result<(), NevanlinnaError> {
    if schedule.len() < min_len {
        return Err(NevanlinnaError::InvalidSchedule(format!(
            "need at least {min_len} radii, got {}",
            schedule.len()
        )));
    }
    if schedule.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(NevanlinnaError::InvalidSchedule("radii must be positive and finite".into()));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(NevanlinnaError::InvalidSchedule("radii must increase strictly".into()));
    }
    Ok(())
}
