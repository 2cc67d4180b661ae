//! Polynomials in the jet generators `dξ, dσ, d²ξ, d²σ` with Laurent
//! coefficients in σ, and second-order jets of functions on a chart.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::laurent::LaurentSeries;
use super::JetError;

/// Exponents of `(dξ, dσ, d²ξ, d²σ)`.
pub type Monomial = [u8; 4];

pub const D_XI: Monomial = [1, 0, 0, 0];
pub const D_SIGMA: Monomial = [0, 1, 0, 0];
pub const D2_XI: Monomial = [0, 0, 1, 0];
pub const D2_SIGMA: Monomial = [0, 0, 0, 1];

/// Weighted degree: first-order generators weigh 1, second-order weigh 2.
pub fn weight(m: &Monomial) -> u32 {
    m[0] as u32 + m[1] as u32 + 2 * (m[2] as u32 + m[3] as u32)
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct JetPoly {
    pub terms: BTreeMap<Monomial, LaurentSeries>,
}

impl JetPoly {
    pub fn zero() -> JetPoly {
        JetPoly::default()
    }

    pub fn generator(m: Monomial, one: LaurentSeries) -> JetPoly {
        let mut terms = BTreeMap::new();
        terms.insert(m, one);
        JetPoly { terms }
    }

    pub fn add(&self, other: &JetPoly) -> JetPoly {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let v = match terms.get(m) {
                Some(a) => a.add(c),
                None => c.clone(),
            };
            terms.insert(*m, v);
        }
        JetPoly { terms }
    }

    pub fn neg(&self) -> JetPoly {
        JetPoly { terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect() }
    }

    pub fn sub(&self, other: &JetPoly) -> JetPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &LaurentSeries) -> JetPoly {
        JetPoly { terms: self.terms.iter().map(|(m, v)| (*m, v.mul(c))).collect() }
    }

    pub fn scale_const(&self, c: Complex64) -> JetPoly {
        JetPoly { terms: self.terms.iter().map(|(m, v)| (*m, v.scale(c))).collect() }
    }

    pub fn mul(&self, other: &JetPoly) -> JetPoly {
        let mut out = JetPoly::zero();
        for (ma, a) in &self.terms {
            for (mb, b) in &other.terms {
                let m = mono_mul(ma, mb);
                let v = a.mul(b);
                let v = match out.terms.get(&m) {
                    Some(prev) => prev.add(&v),
                    None => v,
                };
                out.terms.insert(m, v);
            }
        }
        out
    }

    /// Common weighted degree of all monomials, if homogeneous.
    pub fn weighted_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(weight);
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(LaurentSeries::max_abs).fold(0.0, f64::max)
    }

    /// Rewrites in the logarithmic frame along `σ = 0`:
    /// `dσ = σ·L₁`, `d²σ = σ·L₂ + σ·L₁²` with `L₁ = dlogσ`, `L₂ = d²logσ`.
    /// Monomial slots 1 and 3 then hold the exponents of `L₁` and `L₂`.
    pub fn to_log_frame(&self) -> JetPoly {
        let mut out = JetPoly::zero();
        for (m, c) in &self.terms {
            let (b, e) = (m[1] as i32, m[3] as u32);
            for i in 0..=e {
                let binom = binomial(e, i);
                let nm: Monomial = [m[0], (b as u32 + 2 * (e - i)) as u8, m[2], i as u8];
                let v = c.shift(b + e as i32).scale(Complex64::new(binom, 0.0));
                let v = match out.terms.get(&nm) {
                    Some(prev) => prev.add(&v),
                    None => v,
                };
                out.terms.insert(nm, v);
            }
        }
        out
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// A function germ on a chart together with its first and second
/// differentials: `val`, `d val` (weight 1) and `d² val` (weight 2).
#[derive(Debug, Clone, PartialEq)]
pub struct JetFn {
    pub val: LaurentSeries,
    pub d: JetPoly,
    pub d2: JetPoly,
}

impl JetFn {
    pub fn constant(c: Complex64, len: usize) -> JetFn {
        JetFn { val: LaurentSeries::constant('σ', c, len), d: JetPoly::zero(), d2: JetPoly::zero() }
    }

    /// The base coordinate `ξ` at `ξ₀`.
    pub fn xi(xi0: Complex64, len: usize) -> JetFn {
        let one = LaurentSeries::constant('σ', Complex64::new(1.0, 0.0), len);
        JetFn {
            val: LaurentSeries::constant('σ', xi0, len),
            d: JetPoly::generator(D_XI, one.clone()),
            d2: JetPoly::generator(D2_XI, one),
        }
    }

    /// The divisor coordinate `σ`.
    pub fn sigma(len: usize) -> JetFn {
        let one = LaurentSeries::constant('σ', Complex64::new(1.0, 0.0), len);
        JetFn {
            val: LaurentSeries::parameter('σ', len),
            d: JetPoly::generator(D_SIGMA, one.clone()),
            d2: JetPoly::generator(D2_SIGMA, one),
        }
    }

    /// Function of σ alone, e.g. a coordinate of a curve germ.
    pub fn of_sigma(val: LaurentSeries) -> JetFn {
        let d1 = val.derivative();
        let d2 = d1.derivative();
        JetFn {
            d: JetPoly::generator(D_SIGMA, d1.clone()),
            d2: JetPoly::generator(D2_SIGMA, d1).add(&JetPoly::generator([0, 2, 0, 0], d2)),
            val,
        }
    }

    pub fn add(&self, o: &JetFn) -> JetFn {
        JetFn { val: self.val.add(&o.val), d: self.d.add(&o.d), d2: self.d2.add(&o.d2) }
    }

    pub fn sub(&self, o: &JetFn) -> JetFn {
        JetFn { val: self.val.sub(&o.val), d: self.d.sub(&o.d), d2: self.d2.sub(&o.d2) }
    }

    pub fn neg(&self) -> JetFn {
        JetFn { val: self.val.neg(), d: self.d.neg(), d2: self.d2.neg() }
    }

    pub fn scale(&self, c: Complex64) -> JetFn {
        JetFn { val: self.val.scale(c), d: self.d.scale_const(c), d2: self.d2.scale_const(c) }
    }

    pub fn add_const(&self, c: Complex64) -> JetFn {
        let len = self.val.prec().max(1) as usize;
        JetFn { val: self.val.add(&LaurentSeries::constant('σ', c, len)), ..self.clone() }
    }

    /// Leibniz: `d(fg) = f dg + g df`, `d²(fg) = f d²g + 2 df dg + g d²f`.
    pub fn mul(&self, o: &JetFn) -> JetFn {
        let two = Complex64::new(2.0, 0.0);
        JetFn {
            val: self.val.mul(&o.val),
            d: o.d.scale(&self.val).add(&self.d.scale(&o.val)),
            d2: o
                .d2
                .scale(&self.val)
                .add(&self.d.mul(&o.d).scale_const(two))
                .add(&self.d2.scale(&o.val)),
        }
    }

    /// Second-order chain rule for `φ(self)` given `φ(g)`, `φ′(g)`, `φ″(g)`:
    /// `d φ = φ′ dg`, `d²φ = φ′ d²g + φ″ dg²`.
    pub fn apply(&self, f0: LaurentSeries, f1: &LaurentSeries, f2: &LaurentSeries) -> JetFn {
        JetFn {
            val: f0,
            d: self.d.scale(f1),
            d2: self.d2.scale(f1).add(&self.d.mul(&self.d).scale(f2)),
        }
    }

    pub fn recip(&self) -> Result<JetFn, JetError> {
        let r = self.val.recip()?;
        let r2 = r.mul(&r);
        let f1 = r2.neg();
        let f2 = r2.mul(&r).scale(Complex64::new(2.0, 0.0));
        Ok(self.apply(r, &f1, &f2))
    }

    pub fn div(&self, o: &JetFn) -> Result<JetFn, JetError> {
        Ok(self.mul(&o.recip()?))
    }

    pub fn powi(&self, e: i32) -> Result<JetFn, JetError> {
        if e == 0 {
            return Ok(JetFn::constant(Complex64::new(1.0, 0.0), self.val.coeffs().len().max(1)));
        }
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut acc = base.clone();
        for _ in 1..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// `n`-th root on branch `b` of the leading coefficient.
    pub fn nth_root_branch(&self, n: u32, b: u32) -> Result<JetFn, JetError> {
        let r = self.val.nth_root_branch(n, b)?;
        self.root_from(n, r)
    }

    /// `n`-th root with the principal leading coefficient.
    pub fn nth_root(&self, n: u32) -> Result<JetFn, JetError> {
        let r = self.val.nth_root(n)?;
        self.root_from(n, r)
    }

    fn root_from(&self, n: u32, r: LaurentSeries) -> Result<JetFn, JetError> {
        let p = 1.0 / n as f64;
        let inv = self.val.recip()?;
        let f1 = r.mul(&inv).scale(Complex64::new(p, 0.0));
        let f2 = r.mul(&inv).mul(&inv).scale(Complex64::new(p * (p - 1.0), 0.0));
        Ok(self.apply(r, &f1, &f2))
    }

    /// `𝒟²ψ = d²ψ + k·dψ²/ψ`.
    pub fn d2_op(&self, k: f64) -> Result<JetPoly, JetError> {
        let inv = self.val.recip()?;
        Ok(self.d2.add(&self.d.mul(&self.d).scale(&inv.scale(Complex64::new(k, 0.0)))))
    }

    /// Taylor coefficients in `ξ − ξ₀` up to degree 2, each a Laurent series
    /// in σ.
    pub fn bivariate(&self) -> [LaurentSeries; 3] {
        let zero = || LaurentSeries::zero('σ', self.val.prec());
        let t1 = self.d.terms.get(&D_XI).cloned().unwrap_or_else(zero);
        let t2 = self.d2.terms.get(&[2, 0, 0, 0]).map(|s| s.scale(Complex64::new(0.5, 0.0))).unwrap_or_else(zero);
        [self.val.clone(), t1, t2]
    }

    /// Largest coefficient magnitude over value and differentials.
    pub fn max_abs(&self) -> f64 {
        self.val.max_abs().max(self.d.max_abs()).max(self.d2.max_abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_frame_of_second_order_generator() {
        // d²σ = σ L₂ + σ L₁²
        let one = LaurentSeries::constant('σ', Complex64::new(1.0, 0.0), 4);
        let p = JetPoly::generator(D2_SIGMA, one).to_log_frame();
        assert_eq!(p.terms.len(), 2);
        assert_eq!(p.terms[&[0, 0, 0, 1]].lo(), 1);
        assert_eq!(p.terms[&[0, 2, 0, 0]].lo(), 1);
    }

    #[test]
    fn sigma_jet_is_consistent_with_derivative() {
        let s = JetFn::sigma(6);
        let sq = s.mul(&s);
        let direct = JetFn::of_sigma(sq.val.clone());
        for (m, c) in &direct.d2.terms {
            let other = &sq.d2.terms[m];
            assert!(c.sub(other).max_abs() < 1e-15);
        }
    }
}
