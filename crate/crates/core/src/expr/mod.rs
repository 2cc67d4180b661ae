//! Immutable expression DAG for analytic and meromorphic functions of one
//! complex variable, with pointwise evaluation and Taylor jets.

mod eval;
mod jet;

use std::fmt;
use std::ops;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::elliptic::EquianharmonicWeierstrass;

pub use eval::{residual, BranchNode, EvalResult, EPS_BRANCH, TAU_ZERO};
pub(crate) use eval::{principal_root, touches_cut};
pub use jet::{field_apply, taylor_jet, TaylorJet, DEFAULT_JET_ORDER};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("expression has a pole at the base point {at}")]
    PoleAtBasePoint { at: Complex64 },
    #[error("{node} argument touches the branch cut or zero at {at}")]
    BranchViolation { node: BranchNode, at: Complex64 },
    #[error("non-finite intermediate value at {at}")]
    NonFinite { at: Complex64 },
    #[error("member {index} of the tuple is not finite at the sample {at}")]
    SampleAtPole { index: usize, at: Complex64 },
    #[error("tuple, exponent and coefficient lists have mismatched lengths")]
    LengthMismatch,
}

/// Node kinds of the expression DAG.
#[derive(Debug)]
pub enum Node {
    Const(Complex64),
    Var,
    Add(Expr, Expr),
    Mul(Expr, Expr),
    Neg(Expr),
    Recip(Expr),
    IntPow(Expr, i32),
    Exp(Expr),
    Log(Expr),
    Root(Expr, u32),
    Compose { outer: Expr, inner: Expr },
    Wp(Arc<EquianharmonicWeierstrass>, Expr),
    WpPrime(Arc<EquianharmonicWeierstrass>, Expr),
}

/// Shared handle to an expression node. Cloning is cheap and never copies
/// the tree.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl Expr {
    fn wrap(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn var() -> Expr {
        Expr::wrap(Node::Var)
    }

    pub fn constant(c: Complex64) -> Expr {
        Expr::wrap(Node::Const(c))
    }

    pub fn real(x: f64) -> Expr {
        Expr::constant(Complex64::new(x, 0.0))
    }

    pub fn add(&self, other: &Expr) -> Expr {
        Expr::wrap(Node::Add(self.clone(), other.clone()))
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        Expr::wrap(Node::Mul(self.clone(), other.clone()))
    }

    pub fn neg(&self) -> Expr {
        Expr::wrap(Node::Neg(self.clone()))
    }

    pub fn recip(&self) -> Expr {
        Expr::wrap(Node::Recip(self.clone()))
    }

    /// Integer power; exponent 0 folds to the constant 1.
    pub fn powi(&self, e: i32) -> Expr {
        if e == 0 {
            Expr::real(1.0)
        } else {
            Expr::wrap(Node::IntPow(self.clone(), e))
        }
    }

    pub fn exp(&self) -> Expr {
        Expr::wrap(Node::Exp(self.clone()))
    }

    /// Principal logarithm, cut along the negative real axis.
    pub fn ln(&self) -> Expr {
        Expr::wrap(Node::Log(self.clone()))
    }

    /// Principal n-th root `exp(log(.)/n)`.
    ///
    /// # Panics
    /// If `n == 0`.
    pub fn nth_root(&self, n: u32) -> Expr {
        assert!(n >= 1, "root index must be positive");
        Expr::wrap(Node::Root(self.clone(), n))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Expr) -> Expr {
        Expr::wrap(Node::Compose {
            outer: self.clone(),
            inner: inner.clone(),
        })
    }

    /// Equianharmonic ℘ applied to `self`.
    pub fn wp(&self) -> Expr {
        Expr::wrap(Node::Wp(EquianharmonicWeierstrass::shared(), self.clone()))
    }

    /// Equianharmonic ℘′ applied to `self`.
    pub fn wp_prime(&self) -> Expr {
        Expr::wrap(Node::WpPrime(EquianharmonicWeierstrass::shared(), self.clone()))
    }

    /// The tree with every `Var` replaced by `inner` (no `Compose` node).
    pub fn substitute(&self, inner: &Expr) -> Expr {
        match self.node() {
            Node::Const(_) => self.clone(),
            Node::Var => inner.clone(),
            Node::Add(a, b) => a.substitute(inner).add(&b.substitute(inner)),
            Node::Mul(a, b) => a.substitute(inner).mul(&b.substitute(inner)),
            Node::Neg(a) => a.substitute(inner).neg(),
            Node::Recip(a) => a.substitute(inner).recip(),
            Node::IntPow(a, e) => a.substitute(inner).powi(*e),
            Node::Exp(a) => a.substitute(inner).exp(),
            Node::Log(a) => a.substitute(inner).ln(),
            Node::Root(a, n) => a.substitute(inner).nth_root(*n),
            Node::Compose { outer, inner: g } => outer.substitute(&g.substitute(inner)),
            Node::Wp(ctx, a) => Expr::wrap(Node::Wp(ctx.clone(), a.substitute(inner))),
            Node::WpPrime(ctx, a) => Expr::wrap(Node::WpPrime(ctx.clone(), a.substitute(inner))),
        }
    }

    /// Coefficients `(a, b)` when the expression is structurally `a z + b`.
    pub fn as_affine(&self) -> Option<(Complex64, Complex64)> {
        let zero = Complex64::new(0.0, 0.0);
        match self.node() {
            Node::Const(c) => Some((zero, *c)),
            Node::Var => Some((Complex64::new(1.0, 0.0), zero)),
            Node::Add(a, b) => {
                let (a1, b1) = a.as_affine()?;
                let (a2, b2) = b.as_affine()?;
                Some((a1 + a2, b1 + b2))
            }
            Node::Neg(a) => a.as_affine().map(|(p, q)| (-p, -q)),
            Node::Mul(a, b) => {
                let (a1, b1) = a.as_affine()?;
                let (a2, b2) = b.as_affine()?;
                if a1 == zero {
                    Some((b1 * a2, b1 * b2))
                } else if a2 == zero {
                    Some((a1 * b2, b1 * b2))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Structurally entire: no reciprocal, negative power, logarithm, root or
    /// ℘ node is reachable.
    pub fn is_entire(&self) -> bool {
        match self.node() {
            Node::Const(_) | Node::Var => true,
            Node::Add(a, b) | Node::Mul(a, b) => a.is_entire() && b.is_entire(),
            Node::Neg(a) | Node::Exp(a) => a.is_entire(),
            Node::IntPow(a, e) => *e > 0 && a.is_entire(),
            Node::Compose { outer, inner } => outer.is_entire() && inner.is_entire(),
            Node::Recip(_) | Node::Log(_) | Node::Root(..) | Node::Wp(..) | Node::WpPrime(..) => false,
        }
    }

    /// Structurally free of poles (no reciprocal, negative power or ℘ node).
    /// Logarithms and roots are allowed.
    pub fn is_pole_free(&self) -> bool {
        match self.node() {
            Node::Const(_) | Node::Var => true,
            Node::Add(a, b) | Node::Mul(a, b) => a.is_pole_free() && b.is_pole_free(),
            Node::Neg(a) | Node::Exp(a) | Node::Log(a) | Node::Root(a, _) => a.is_pole_free(),
            Node::IntPow(a, e) => *e > 0 && a.is_pole_free(),
            Node::Compose { outer, inner } => outer.is_pole_free() && inner.is_pole_free(),
            Node::Recip(_) | Node::Wp(..) | Node::WpPrime(..) => false,
        }
    }

    /// Structurally zero-free entire function: nonzero constants and
    /// exponentials of entire expressions, closed under products and powers.
    pub fn is_zero_free_entire(&self) -> bool {
        match self.node() {
            Node::Const(c) => c.norm() > 0.0,
            Node::Exp(a) => a.is_entire(),
            Node::Mul(a, b) => a.is_zero_free_entire() && b.is_zero_free_entire(),
            Node::Neg(a) => a.is_zero_free_entire(),
            Node::IntPow(a, _) => a.is_zero_free_entire(),
            Node::Compose { outer, inner } => outer.is_zero_free_entire() && inner.is_entire(),
            _ => false,
        }
    }

    /// Number of nodes counted as a tree (shared subtrees counted per use).
    pub fn tree_size(&self) -> usize {
        match self.node() {
            Node::Const(_) | Node::Var => 1,
            Node::Add(a, b) | Node::Mul(a, b) => 1 + a.tree_size() + b.tree_size(),
            Node::Neg(a)
            | Node::Recip(a)
            | Node::IntPow(a, _)
            | Node::Exp(a)
            | Node::Log(a)
            | Node::Root(a, _)
            | Node::Wp(_, a)
            | Node::WpPrime(_, a) => 1 + a.tree_size(),
            Node::Compose { outer, inner } => 1 + outer.tree_size() + inner.tree_size(),
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => write!(f, "{c}"),
            Node::Var => write!(f, "z"),
            Node::Add(a, b) => write!(f, "({a:?} + {b:?})"),
            Node::Mul(a, b) => write!(f, "({a:?} * {b:?})"),
            Node::Neg(a) => write!(f, "-({a:?})"),
            Node::Recip(a) => write!(f, "1/({a:?})"),
            Node::IntPow(a, e) => write!(f, "({a:?})^{e}"),
            Node::Exp(a) => write!(f, "exp({a:?})"),
            Node::Log(a) => write!(f, "log({a:?})"),
            Node::Root(a, n) => write!(f, "root{n}({a:?})"),
            Node::Compose { outer, inner } => write!(f, "[{outer:?}]∘[{inner:?}]"),
            Node::Wp(_, a) => write!(f, "wp({a:?})"),
            Node::WpPrime(_, a) => write!(f, "wp'({a:?})"),
        }
    }
}

impl From<f64> for Expr {
    fn from(x: f64) -> Expr {
        Expr::real(x)
    }
}

impl From<Complex64> for Expr {
    fn from(c: Complex64) -> Expr {
        Expr::constant(c)
    }
}

macro_rules! binary_ops {
    ($trait:ident, $method:ident, $body:expr) => {
        impl ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $body(&self, &rhs)
            }
        }
        impl ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $body(self, rhs)
            }
        }
        impl ops::$trait<Complex64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Complex64) -> Expr {
                $body(&self, &Expr::constant(rhs))
            }
        }
        impl ops::$trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                $body(&self, &Expr::real(rhs))
            }
        }
        impl ops::$trait<Expr> for Complex64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $body(&Expr::constant(self), &rhs)
            }
        }
        impl ops::$trait<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $body(&Expr::real(self), &rhs)
            }
        }
    };
}

binary_ops!(Add, add, |a: &Expr, b: &Expr| a.add(b));
binary_ops!(Sub, sub, |a: &Expr, b: &Expr| a.add(&b.neg()));
binary_ops!(Mul, mul, |a: &Expr, b: &Expr| a.mul(b));
binary_ops!(Div, div, |a: &Expr, b: &Expr| a.mul(&b.recip()));

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}
