use num_complex::Complex64;

use super::eval::{principal_root, touches_cut, BranchNode, EvalResult, TAU_ZERO};
use super::{Expr, ExprError, Node};
use crate::series_ops;

/// Default truncation order of Taylor jets.
pub const DEFAULT_JET_ORDER: usize = 8;

/// Truncated Taylor expansion `Σ_{k≤K} c_k (z − base)^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorJet {
    pub base: Complex64,
    pub coeffs: Vec<Complex64>,
}

fn check_finite(coeffs: Vec<Complex64>, at: Complex64) -> Result<Vec<Complex64>, ExprError> {
    if coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(coeffs)
    } else {
        Err(ExprError::NonFinite { at })
    }
}

impl TaylorJet {
    pub fn constant(base: Complex64, c: Complex64, order: usize) -> TaylorJet {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = c;
        TaylorJet { base, coeffs }
    }

    /// Jet of the identity map at `base`.
    pub fn identity(base: Complex64, order: usize) -> TaylorJet {
        let mut j = TaylorJet::constant(base, base, order);
        if order >= 1 {
            j.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        j
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// `k`-th derivative `k!·c_k`.
    pub fn derivative(&self, k: usize) -> Complex64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.coeffs[k] * fact
    }

    /// Evaluates the truncated polynomial at `z`.
    pub fn eval_poly(&self, z: Complex64) -> Complex64 {
        let h = z - self.base;
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * h + c)
    }

    fn with(&self, coeffs: Vec<Complex64>) -> Result<TaylorJet, ExprError> {
        Ok(TaylorJet {
            base: self.base,
            coeffs: check_finite(coeffs, self.base)?,
        })
    }

    pub fn add(&self, other: &TaylorJet) -> TaylorJet {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        TaylorJet { base: self.base, coeffs }
    }

    pub fn neg(&self) -> TaylorJet {
        TaylorJet {
            base: self.base,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &TaylorJet) -> Result<TaylorJet, ExprError> {
        let len = self.coeffs.len().min(other.coeffs.len());
        self.with(series_ops::mul(&self.coeffs, &other.coeffs, len))
    }

    pub fn recip(&self) -> Result<TaylorJet, ExprError> {
        if self.coeffs[0].norm() < TAU_ZERO {
            return Err(ExprError::PoleAtBasePoint { at: self.base });
        }
        self.with(series_ops::recip(&self.coeffs))
    }

    pub fn div(&self, other: &TaylorJet) -> Result<TaylorJet, ExprError> {
        if other.coeffs[0].norm() < TAU_ZERO {
            return Err(ExprError::PoleAtBasePoint { at: self.base });
        }
        self.with(series_ops::div(&self.coeffs, &other.coeffs))
    }

    pub fn powi(&self, e: i32) -> Result<TaylorJet, ExprError> {
        let p = self.with(series_ops::powu(&self.coeffs, e.unsigned_abs()))?;
        if e < 0 {
            p.recip()
        } else {
            Ok(p)
        }
    }

    pub fn exp(&self) -> Result<TaylorJet, ExprError> {
        self.with(series_ops::exp(&self.coeffs))
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Result<TaylorJet, ExprError> {
        let a0 = self.coeffs[0];
        if touches_cut(a0) {
            return Err(ExprError::BranchViolation { node: BranchNode::Log, at: self.base });
        }
        self.with(series_ops::ln_with(&self.coeffs, a0.ln()))
    }

    /// Principal n-th root.
    pub fn nth_root(&self, n: u32) -> Result<TaylorJet, ExprError> {
        let a0 = self.coeffs[0];
        if touches_cut(a0) {
            return Err(ExprError::BranchViolation { node: BranchNode::Root(n), at: self.base });
        }
        let p = Complex64::new(1.0 / n as f64, 0.0);
        self.with(series_ops::pow_with(&self.coeffs, p, principal_root(a0, n)))
    }

    /// `outer ∘ self`, where `outer` is a jet based at `self.value()`.
    pub fn compose_into(&self, outer: &TaylorJet) -> Result<TaylorJet, ExprError> {
        self.with(series_ops::compose(&outer.coeffs, &self.coeffs))
    }
}

/// Taylor jet of `expr` at `z0` truncated at order `k`.
pub fn taylor_jet(expr: &Expr, z0: Complex64, k: usize) -> Result<TaylorJet, ExprError> {
    match expr.node() {
        Node::Const(c) => Ok(TaylorJet::constant(z0, *c, k)),
        Node::Var => Ok(TaylorJet::identity(z0, k)),
        Node::Add(a, b) => Ok(taylor_jet(a, z0, k)?.add(&taylor_jet(b, z0, k)?)),
        Node::Mul(a, b) => taylor_jet(a, z0, k)?.mul(&taylor_jet(b, z0, k)?),
        Node::Neg(a) => Ok(taylor_jet(a, z0, k)?.neg()),
        Node::Recip(a) => taylor_jet(a, z0, k)?.recip(),
        Node::IntPow(a, e) => taylor_jet(a, z0, k)?.powi(*e),
        Node::Exp(a) => taylor_jet(a, z0, k)?.exp(),
        Node::Log(a) => taylor_jet(a, z0, k)?.ln(),
        Node::Root(a, n) => taylor_jet(a, z0, k)?.nth_root(*n),
        Node::Compose { outer, inner } => {
            let g = taylor_jet(inner, z0, k)?;
            let f = taylor_jet(outer, g.value(), k)?;
            g.compose_into(&f)
        }
        Node::Wp(ctx, a) => {
            let g = taylor_jet(a, z0, k)?;
            let coeffs = ctx.taylor(g.value(), k).map_err(|_| ExprError::PoleAtBasePoint { at: z0 })?;
            let f = TaylorJet { base: g.value(), coeffs };
            g.compose_into(&f)
        }
        Node::WpPrime(ctx, a) => {
            let g = taylor_jet(a, z0, k)?;
            let coeffs = ctx.taylor(g.value(), k + 1).map_err(|_| ExprError::PoleAtBasePoint { at: z0 })?;
            let f = TaylorJet {
                base: g.value(),
                coeffs: series_ops::derivative(&coeffs),
            };
            g.compose_into(&f)
        }
    }
}

/// `k`-th derivative of `expr` at `z` (the `k`-fold application of d/dz).
pub fn field_apply(expr: &Expr, k: usize, z: Complex64) -> Result<Complex64, ExprError> {
    if k == 0 {
        return match expr.eval(z) {
            EvalResult::Finite(v) => Ok(v),
            EvalResult::Pole(_) => Err(ExprError::PoleAtBasePoint { at: z }),
            EvalResult::BranchViolation(node) => Err(ExprError::BranchViolation { node, at: z }),
        };
    }
    Ok(taylor_jet(expr, z, k)?.derivative(k))
}
