//! Truncated power-series recurrences shared by Taylor jets and Laurent series.
//!
//! Every routine takes coefficient slices `c_0, c_1, ...` of a series in some
//! local parameter and returns a vector with the same length as its input
//! (the common truncation).

use num_complex::Complex64;

/// Cauchy product truncated to `len` coefficients.
pub fn mul(a: &[Complex64], b: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if *ai == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Reciprocal; the caller guarantees `a[0] != 0`.
pub fn recip(a: &[Complex64]) -> Vec<Complex64> {
    let len = a.len();
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    if len == 0 {
        return out;
    }
    let inv0 = a[0].inv();
    out[0] = inv0;
    for k in 1..len {
        let mut s = Complex64::new(0.0, 0.0);
        for j in 1..=k {
            s += a[j] * out[k - j];
        }
        out[k] = -s * inv0;
    }
    out
}

/// Quotient `a / b`; the caller guarantees `b[0] != 0`.
pub fn div(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let len = a.len().min(b.len());
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    if len == 0 {
        return out;
    }
    let inv0 = b[0].inv();
    for k in 0..len {
        let mut s = a[k];
        for j in 1..=k {
            s -= b[j] * out[k - j];
        }
        out[k] = s * inv0;
    }
    out
}

/// `exp` of a series, from `c' = a' c`.
pub fn exp(a: &[Complex64]) -> Vec<Complex64> {
    let len = a.len();
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    if len == 0 {
        return out;
    }
    out[0] = a[0].exp();
    for k in 1..len {
        let mut s = Complex64::new(0.0, 0.0);
        for j in 1..=k {
            s += (j as f64) * a[j] * out[k - j];
        }
        out[k] = s / (k as f64);
    }
    out
}

/// Logarithm with `c_0 = log0`, the chosen branch value of `log a_0`.
pub fn ln_with(a: &[Complex64], log0: Complex64) -> Vec<Complex64> {
    let len = a.len();
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    if len == 0 {
        return out;
    }
    out[0] = log0;
    let inv0 = a[0].inv();
    for k in 1..len {
        let mut s = (k as f64) * a[k];
        for j in 1..k {
            s -= (j as f64) * out[j] * a[k - j];
        }
        out[k] = s * inv0 / (k as f64);
    }
    out
}

/// `a^p` with `c_0 = lead`, the chosen branch value of `a_0^p`.
///
/// Uses `k a_0 c_k = sum_{j=1}^{k} (p j - (k - j)) a_j c_{k-j}`.
pub fn pow_with(a: &[Complex64], p: Complex64, lead: Complex64) -> Vec<Complex64> {
    let len = a.len();
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    if len == 0 {
        return out;
    }
    out[0] = lead;
    let inv0 = a[0].inv();
    for k in 1..len {
        let mut s = Complex64::new(0.0, 0.0);
        for j in 1..=k {
            s += (p * (j as f64) - (k - j) as f64) * a[j] * out[k - j];
        }
        out[k] = s * inv0 / (k as f64);
    }
    out
}

/// Non-negative integer power by repeated squaring.
pub fn powu(a: &[Complex64], mut e: u32) -> Vec<Complex64> {
    let len = a.len();
    let mut result = vec![Complex64::new(0.0, 0.0); len];
    if len == 0 {
        return result;
    }
    result[0] = Complex64::new(1.0, 0.0);
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            result = mul(&result, &base, len);
        }
        e >>= 1;
        if e > 0 {
            base = mul(&base, &base, len);
        }
    }
    result
}

/// Composition `F(g(t))` where `outer` holds the Taylor coefficients of `F`
/// at `g_0 = inner[0]`; evaluated by Horner in `g - g_0`.
pub fn compose(outer: &[Complex64], inner: &[Complex64]) -> Vec<Complex64> {
    let len = inner.len();
    let mut shifted = inner.to_vec();
    if len > 0 {
        shifted[0] = Complex64::new(0.0, 0.0);
    }
    let mut acc = vec![Complex64::new(0.0, 0.0); len];
    for fk in outer.iter().take(len).rev() {
        acc = mul(&acc, &shifted, len);
        if len > 0 {
            acc[0] += fk;
        }
    }
    acc
}

/// Formal derivative; the result has one coefficient fewer.
pub fn derivative(a: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * (k as f64))
        .collect()
}
