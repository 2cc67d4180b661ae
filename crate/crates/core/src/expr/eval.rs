use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Expr, ExprError, Node};

/// Denominator magnitude below which a reciprocal is reported as a pole.
pub const TAU_ZERO: f64 = 1e-13;
/// Angular distance to the negative real axis treated as touching the cut.
pub const EPS_BRANCH: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchNode {
    Log,
    Root(u32),
}

impl fmt::Display for BranchNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchNode::Log => write!(f, "log"),
            BranchNode::Root(n) => write!(f, "root({n})"),
        }
    }
}

/// Outcome of pointwise evaluation.
///
/// `Pole(None)` also covers values that overflow double precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalResult {
    Finite(Complex64),
    Pole(Option<u32>),
    BranchViolation(BranchNode),
}

impl EvalResult {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            EvalResult::Finite(v) => Some(v),
            _ => None,
        }
    }

    fn from_value(v: Complex64) -> EvalResult {
        if v.re.is_finite() && v.im.is_finite() {
            EvalResult::Finite(v)
        } else {
            EvalResult::Pole(None)
        }
    }
}

/// True when `w` is zero or within `EPS_BRANCH` of the principal cut.
pub(crate) fn touches_cut(w: Complex64) -> bool {
    let r = w.norm();
    if r < TAU_ZERO {
        return true;
    }
    w.re < 0.0 && PI - w.im.atan2(w.re).abs() < EPS_BRANCH
}

pub(crate) fn principal_root(w: Complex64, n: u32) -> Complex64 {
    (w.ln() / n as f64).exp()
}

fn simple_pole_order(arg: &Expr) -> Option<u32> {
    match arg.as_affine() {
        Some((a, _)) if a.norm() > 0.0 => Some(1),
        _ => None,
    }
}

fn combine_poles(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) if x != y => Some(x.max(y)),
        _ => None,
    }
}

impl Expr {
    /// Pointwise evaluation.
    pub fn eval(&self, z: Complex64) -> EvalResult {
        use EvalResult::*;
        match self.node() {
            Node::Const(c) => Finite(*c),
            Node::Var => Finite(z),
            Node::Add(a, b) => match (a.eval(z), b.eval(z)) {
                (BranchViolation(n), _) | (_, BranchViolation(n)) => BranchViolation(n),
                (Finite(x), Finite(y)) => EvalResult::from_value(x + y),
                (Pole(p), Finite(_)) | (Finite(_), Pole(p)) => Pole(p),
                (Pole(p), Pole(q)) => Pole(combine_poles(p, q)),
            },
            Node::Mul(a, b) => match (a.eval(z), b.eval(z)) {
                (BranchViolation(n), _) | (_, BranchViolation(n)) => BranchViolation(n),
                (Finite(x), Finite(y)) => EvalResult::from_value(x * y),
                (Pole(p), Finite(v)) | (Finite(v), Pole(p)) => {
                    if v.norm() < TAU_ZERO {
                        Pole(None)
                    } else {
                        Pole(p)
                    }
                }
                (Pole(p), Pole(q)) => Pole(match (p, q) {
                    (Some(x), Some(y)) => Some(x + y),
                    _ => None,
                }),
            },
            Node::Neg(a) => match a.eval(z) {
                Finite(x) => Finite(-x),
                other => other,
            },
            Node::Recip(a) => match a.eval(z) {
                Finite(x) if x.norm() < TAU_ZERO => Pole(simple_pole_order(a)),
                Finite(x) => EvalResult::from_value(x.inv()),
                Pole(_) => Finite(Complex64::new(0.0, 0.0)),
                b @ BranchViolation(_) => b,
            },
            Node::IntPow(a, e) => match a.eval(z) {
                Finite(x) if *e < 0 && x.norm() < TAU_ZERO => {
                    Pole(simple_pole_order(a).map(|_| e.unsigned_abs()))
                }
                Finite(x) => EvalResult::from_value(x.powi(*e)),
                Pole(p) if *e > 0 => Pole(p.map(|o| o * *e as u32)),
                Pole(_) => Finite(Complex64::new(0.0, 0.0)),
                b @ BranchViolation(_) => b,
            },
            Node::Exp(a) => match a.eval(z) {
                Finite(x) => EvalResult::from_value(x.exp()),
                Pole(_) => Pole(None),
                b => b,
            },
            Node::Log(a) => match a.eval(z) {
                Finite(x) if touches_cut(x) => BranchViolation(BranchNode::Log),
                Finite(x) => Finite(x.ln()),
                Pole(_) => BranchViolation(BranchNode::Log),
                b => b,
            },
            Node::Root(a, n) => match a.eval(z) {
                Finite(x) if touches_cut(x) => BranchViolation(BranchNode::Root(*n)),
                Finite(x) => EvalResult::from_value(principal_root(x, *n)),
                Pole(_) => BranchViolation(BranchNode::Root(*n)),
                b => b,
            },
            Node::Compose { outer, inner } => match inner.eval(z) {
                Finite(w) => outer.eval(w),
                Pole(_) => Pole(None),
                b => b,
            },
            Node::Wp(ctx, a) => match a.eval(z) {
                Finite(w) => ctx.wp(w),
                Pole(_) => Pole(None),
                b => b,
            },
            Node::WpPrime(ctx, a) => match a.eval(z) {
                Finite(w) => ctx.wp_prime(w),
                Pole(_) => Pole(None),
                b => b,
            },
        }
    }

    /// Evaluation that converts non-finite outcomes into errors.
    pub fn eval_finite(&self, z: Complex64) -> Result<Complex64, ExprError> {
        match self.eval(z) {
            EvalResult::Finite(v) => Ok(v),
            EvalResult::Pole(_) => Err(ExprError::PoleAtBasePoint { at: z }),
            EvalResult::BranchViolation(node) => Err(ExprError::BranchViolation { node, at: z }),
        }
    }
}

/// `|Σ α_j f_j^{n_j} − 1|` at `z`; coefficients default to 1.
pub fn residual(
    tuple: &[Expr],
    exponents: &[u32],
    coefficients: Option<&[Expr]>,
    z: Complex64,
) -> Result<f64, ExprError> {
    if tuple.len() != exponents.len() || coefficients.is_some_and(|c| c.len() != tuple.len()) {
        return Err(ExprError::LengthMismatch);
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for (j, (f, &n)) in tuple.iter().zip(exponents).enumerate() {
        let v = match f.eval(z) {
            EvalResult::Finite(v) => v,
            EvalResult::Pole(_) => return Err(ExprError::SampleAtPole { index: j, at: z }),
            EvalResult::BranchViolation(node) => return Err(ExprError::BranchViolation { node, at: z }),
        };
        let mut term = v.powu(n);
        if let Some(coeffs) = coefficients {
            match coeffs[j].eval(z) {
                EvalResult::Finite(a) => term *= a,
                EvalResult::Pole(_) => return Err(ExprError::SampleAtPole { index: j, at: z }),
                EvalResult::BranchViolation(node) => return Err(ExprError::BranchViolation { node, at: z }),
            }
        }
        sum += term;
    }
    let r = (sum - 1.0).norm();
    if r.is_finite() {
        Ok(r)
    } else {
        Err(ExprError::SampleAtPole { index: 0, at: z })
    }
}
