//! Parsers for the scalar flag values: complex numbers, targets, a-point
//! lists, exponent ranges and pairs.

use fermatlab_core::nevanlinna::{APoint, Target};
use num_complex::Complex64;

use crate::error::CliError;

fn bad(what: &str, s: &str) -> CliError {
    CliError::Schema(format!("invalid {what} `{s}`"))
}

fn finite(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// `1.5`, `-2i`, `i`, `0.5+0.25i`, `1e-3-2e-1i`.
pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(re) = finite(&t) {
        return Ok(Complex64::new(re, 0.0));
    }
    let body = t.strip_suffix('i').ok_or_else(|| bad("complex number", s))?;
    // Split at the last sign that is not an exponent sign or the leading one.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => finite(other).ok_or_else(|| bad("complex number", s))?,
    };
    let re = finite(re).ok_or_else(|| bad("complex number", s))?;
    Ok(Complex64::new(re, im))
}

/// `inf` (poles) or a complex value.
pub fn parse_target(s: &str) -> Result<Target, CliError> {
    match s.trim() {
        "inf" | "infinity" | "∞" => Ok(Target::Infinity),
        other => Ok(Target::Finite(parse_complex(other)?)),
    }
}

/// `z` or `z:multiplicity`.
pub fn parse_point(s: &str) -> Result<APoint, CliError> {
    let (z, mult) = match s.split_once(':') {
        Some((z, m)) => (z, m.trim().parse::<u32>().map_err(|_| bad("multiplicity", s))?),
        None => (s, 1),
    };
    if mult == 0 {
        return Err(CliError::Parameter(format!("zero multiplicity in `{s}`")));
    }
    Ok(APoint { z: parse_complex(z)?, multiplicity: mult })
}

/// Inclusive `a..b` (also `a..=b`), or a single value.
pub fn parse_range(s: &str) -> Result<(u32, u32), CliError> {
    let t = s.trim();
    let (a, b) = match t.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (t, t),
    };
    let a: u32 = a.trim().parse().map_err(|_| bad("range", s))?;
    let b: u32 = b.trim().parse().map_err(|_| bad("range", s))?;
    if a > b {
        return Err(CliError::Parameter(format!("empty range `{s}`")));
    }
    Ok((a, b))
}

/// `m:n`.
pub fn parse_pair(s: &str) -> Result<(u32, u32), CliError> {
    let (m, n) = s.split_once(':').ok_or_else(|| bad("exponent pair", s))?;
    let m = m.trim().parse().map_err(|_| bad("exponent pair", s))?;
    let n = n.trim().parse().map_err(|_| bad("exponent pair", s))?;
    Ok((m, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(parse_complex("0.5").unwrap(), c(0.5, 0.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("-2.5i").unwrap(), c(0.0, -2.5));
        assert_eq!(parse_complex("0.5+0.25i").unwrap(), c(0.5, 0.25));
        assert_eq!(parse_complex("1e-3-2e-1i").unwrap(), c(1e-3, -0.2));
        assert_eq!(parse_complex("-1e+2+i").unwrap(), c(-100.0, 1.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("1+2j").is_err());
        assert!(parse_complex("nan").is_err());
    }

    #[test]
    fn ranges_and_points() {
        assert_eq!(parse_range("2..12").unwrap(), (2, 12));
        assert_eq!(parse_range("2..=12").unwrap(), (2, 12));
        assert_eq!(parse_range("7").unwrap(), (7, 7));
        assert!(parse_range("5..2").is_err());
        assert_eq!(parse_pair("6:3").unwrap(), (6, 3));
        let p = parse_point("0.3+0.1i:2").unwrap();
        assert_eq!((p.z, p.multiplicity), (Complex64::new(0.3, 0.1), 2));
        assert_eq!(parse_target("inf").unwrap(), Target::Infinity);
    }
}
