//! Prefix text form of expressions.
//!
//! ```text
//! expr := number | z | (c re im) | (op expr ...)
//! ```
//!
//! Operators: `add`, `mul` (two or more arguments), `sub`, `div`, `neg`,
//! `recip`, `pow e k`, `exp`, `log`, `root e n`, `compose outer inner`,
//! `wp`, `wpp`. Printing emits only `c`, binary `add`/`mul`, `neg`,
//! `recip`, `pow`, `exp`, `log`, `root`, `compose`, `wp`, `wpp`, so that
//! `parse(print(e))` rebuilds the same tree.

use std::fmt::Write as _;

use fermatlab_core::expr::{Expr, Node};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SexprError {
    #[error("unexpected end of expression")]
    UnexpectedEnd,
    #[error("unexpected `{0}`")]
    Unexpected(String),
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("`{op}` expects {expected} arguments, got {got}")]
    Arity { op: String, expected: &'static str, got: usize },
    #[error("invalid number `{0}`")]
    Number(String),
    #[error("trailing input after expression: `{0}`")]
    Trailing(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Sx {
    Atom(String),
    List(Vec<Sx>),
}

fn tokenize(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn read(tokens: &[String], pos: &mut usize) -> Result<Sx, SexprError> {
    let tok = tokens.get(*pos).ok_or(SexprError::UnexpectedEnd)?;
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos).map(String::as_str) {
                    None => return Err(SexprError::UnexpectedEnd),
                    Some(")") => {
                        *pos += 1;
                        return Ok(Sx::List(items));
                    }
                    Some(_) => items.push(read(tokens, pos)?),
                }
            }
        }
        ")" => Err(SexprError::Unexpected(")".into())),
        _ => Ok(Sx::Atom(tok.clone())),
    }
}

fn number(s: &str) -> Result<f64, SexprError> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(SexprError::Number(s.to_string())),
    }
}

fn integer<T: std::str::FromStr>(sx: &Sx) -> Result<T, SexprError> {
    match sx {
        Sx::Atom(a) => a.parse().map_err(|_| SexprError::Number(a.clone())),
        Sx::List(_) => Err(SexprError::Unexpected("list where an integer was expected".into())),
    }
}

fn arity(op: &str, args: &[Sx], n: usize, expected: &'static str) -> Result<(), SexprError> {
    if args.len() == n {
        Ok(())
    } else {
        Err(SexprError::Arity { op: op.to_string(), expected, got: args.len() })
    }
}

fn build(sx: &Sx) -> Result<Expr, SexprError> {
    let items = match sx {
        Sx::Atom(a) if a == "z" => return Ok(Expr::var()),
        Sx::Atom(a) => return Ok(Expr::real(number(a)?)),
        Sx::List(items) => items,
    };
    let (head, args) = match items.split_first() {
        Some((Sx::Atom(h), rest)) => (h.as_str(), rest),
        Some((other, _)) => return Err(SexprError::Unexpected(format!("{other:?}"))),
        None => return Err(SexprError::Unexpected("()".into())),
    };
    let sub = |i: usize| build(&args[i]);
    Ok(match head {
        "c" => {
            arity(head, args, 2, "2")?;
            let part = |i: usize| match &args[i] {
                Sx::Atom(a) => number(a),
                Sx::List(_) => Err(SexprError::Unexpected("list inside a constant".into())),
            };
            Expr::constant(Complex64::new(part(0)?, part(1)?))
        }
        "add" | "mul" => {
            if args.len() < 2 {
                return Err(SexprError::Arity { op: head.into(), expected: "at least 2", got: args.len() });
            }
            let mut acc = sub(0)?;
            for i in 1..args.len() {
                acc = if head == "add" { acc.add(&sub(i)?) } else { acc.mul(&sub(i)?) };
            }
            acc
        }
        "sub" => {
            arity(head, args, 2, "2")?;
            sub(0)?.add(&sub(1)?.neg())
        }
        "div" => {
            arity(head, args, 2, "2")?;
            sub(0)?.mul(&sub(1)?.recip())
        }
        "neg" | "recip" | "exp" | "log" | "wp" | "wpp" => {
            arity(head, args, 1, "1")?;
            let e = sub(0)?;
            match head {
                "neg" => e.neg(),
                "recip" => e.recip(),
                "exp" => e.exp(),
                "log" => e.ln(),
                "wp" => e.wp(),
                _ => e.wp_prime(),
            }
        }
        "pow" => {
            arity(head, args, 2, "2")?;
            sub(0)?.powi(integer(&args[1])?)
        }
        "root" => {
            arity(head, args, 2, "2")?;
            let n: u32 = integer(&args[1])?;
            if n == 0 {
                return Err(SexprError::Number("0".into()));
            }
            sub(0)?.nth_root(n)
        }
        "compose" => {
            arity(head, args, 2, "2")?;
            sub(0)?.compose(&sub(1)?)
        }
        other => return Err(SexprError::UnknownOperator(other.to_string())),
    })
}

/// Parses one expression.
pub fn parse(s: &str) -> Result<Expr, SexprError> {
    let tokens = tokenize(s);
    let mut pos = 0;
    let sx = read(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(SexprError::Trailing(tokens[pos..].join(" ")));
    }
    build(&sx)
}

fn write_num(out: &mut String, x: f64) {
    // `{:?}` is the shortest representation that parses back exactly.
    write!(out, "{x:?}").expect("string write");
}

fn write_expr(out: &mut String, e: &Expr) {
    let unary = |out: &mut String, op: &str, a: &Expr| {
        write!(out, "({op} ").expect("string write");
        write_expr(out, a);
        out.push(')');
    };
    match e.node() {
        Node::Var => out.push('z'),
        Node::Const(c) if c.im == 0.0 => write_num(out, c.re),
        Node::Const(c) => {
            out.push_str("(c ");
            write_num(out, c.re);
            out.push(' ');
            write_num(out, c.im);
            out.push(')');
        }
        Node::Add(a, b) | Node::Mul(a, b) => {
            out.push_str(if matches!(e.node(), Node::Add(..)) { "(add " } else { "(mul " });
            write_expr(out, a);
            out.push(' ');
            write_expr(out, b);
            out.push(')');
        }
        Node::Neg(a) => unary(out, "neg", a),
        Node::Recip(a) => unary(out, "recip", a),
        Node::Exp(a) => unary(out, "exp", a),
        Node::Log(a) => unary(out, "log", a),
        Node::Wp(_, a) => unary(out, "wp", a),
        Node::WpPrime(_, a) => unary(out, "wpp", a),
        Node::IntPow(a, k) => {
            out.push_str("(pow ");
            write_expr(out, a);
            write!(out, " {k})").expect("string write");
        }
        Node::Root(a, n) => {
            out.push_str("(root ");
            write_expr(out, a);
            write!(out, " {n})").expect("string write");
        }
        Node::Compose { outer, inner } => {
            out.push_str("(compose ");
            write_expr(out, outer);
            out.push(' ');
            write_expr(out, inner);
            out.push(')');
        }
    }
}

/// Canonical text of `e`. Shared subtrees are written out in full.
pub fn print(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}
