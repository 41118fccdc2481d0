//! Reduced rational functions over ℚ in the shape Z-functions come in, and
//! a small Laurent-monomial layer for functional-equation bookkeeping.
//!
//! A [`RatFuncQ`] is a quotient `num/den` of coprime polynomials, both with
//! constant term 1. Every zeta- or L-type function in this crate is a unit
//! power series, so the shape loses nothing; it buys canonical equality.
//!
//! A [`LaurentQ`] is `c * t^k * num/den` with the same normalization on
//! `num/den`, closed under the substitutions `t -> 1/t` and `t -> 1/(q*t)`
//! that functional equations perform.

use crate::error::{Error, Result};
use crate::poly::PolyQ;
use num::{BigRational, One, Zero};
use std::fmt;

/// A quotient of coprime constant-term-1 polynomials.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFuncQ {
    num: PolyQ,
    den: PolyQ,
}

impl RatFuncQ {
    /// Build and normalize `num/den`.
    ///
    /// The inputs must have equal nonzero constant terms (so that dividing
    /// both by that common constant leaves the function unchanged); the
    /// quotient is then reduced by the gcd. A zero denominator is
    /// `DivisionByZero`; a vanishing constant term on either side is
    /// `ZeroConstantTerm`; unequal constant terms — a function with value
    /// different from 1 at the origin — are rejected as malformed input.
    pub fn new(num: PolyQ, den: PolyQ) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let cn = num.constant_term();
        let cd = den.constant_term();
        if cn.is_zero() || cd.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        if cn != cd {
            return Err(Error::BadInput(format!(
                "rational function must take value 1 at the origin; constant terms are {cn} and {cd}"
            )));
        }
        let g = num.gcd(&den);
        let num = num.exact_div(&g)?;
        let den = den.exact_div(&g)?;
        Ok(RatFuncQ {
            num: num.normalized_const_one()?,
            den: den.normalized_const_one()?,
        })
    }

    /// Build from parts already known to be coprime with constant term 1,
    /// skipping the gcd reduction — the expensive step of [`RatFuncQ::new`]
    /// for high-degree inputs. Used where coprimality is structural, e.g.
    /// assembling a quotient from pairwise-coprime factored atoms. The
    /// constant-term contract is still enforced.
    pub fn from_coprime(num: PolyQ, den: PolyQ) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if !num.constant_term().is_one() || !den.constant_term().is_one() {
            return Err(Error::ZeroConstantTerm);
        }
        Ok(RatFuncQ { num, den })
    }

    pub fn one() -> Self {
        RatFuncQ {
            num: PolyQ::one(),
            den: PolyQ::one(),
        }
    }

    pub fn from_poly(num: PolyQ) -> Result<Self> {
        RatFuncQ::new(num, PolyQ::one())
    }

    /// `1/den`.
    pub fn from_den(den: PolyQ) -> Result<Self> {
        RatFuncQ::new(PolyQ::one(), den)
    }

    pub fn num(&self) -> &PolyQ {
        &self.num
    }

    pub fn den(&self) -> &PolyQ {
        &self.den
    }

    pub fn is_one(&self) -> bool {
        self.num == PolyQ::one() && self.den == PolyQ::one()
    }

    /// Degrees `(deg num, deg den)`.
    pub fn degrees(&self) -> (usize, usize) {
        (
            self.num.degree().unwrap_or(0),
            self.den.degree().unwrap_or(0),
        )
    }

    pub fn mul(&self, rhs: &RatFuncQ) -> RatFuncQ {
        RatFuncQ::new(&self.num * &rhs.num, &self.den * &rhs.den)
            .expect("product of normalized rational functions is normalized")
    }

    pub fn inv(&self) -> RatFuncQ {
        RatFuncQ {
            num: self.den.clone(),
            den: self.num.clone(),
        }
    }

    pub fn div(&self, rhs: &RatFuncQ) -> RatFuncQ {
        self.mul(&rhs.inv())
    }

    /// Integer power, negative exponents allowed.
    pub fn powi(&self, k: i64) -> RatFuncQ {
        let base = if k < 0 { self.inv() } else { self.clone() };
        let mut acc = RatFuncQ::one();
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Substitute `t -> c*t` for nonzero `c`; preserves the normalization.
    pub fn scale_input(&self, c: &BigRational) -> RatFuncQ {
        assert!(!c.is_zero(), "scale factor must be nonzero");
        RatFuncQ {
            num: self.num.scale_input(c),
            den: self.den.scale_input(c),
        }
    }

    /// Substitute `t -> t^m`, m >= 1.
    pub fn pow_input(&self, m: usize) -> RatFuncQ {
        RatFuncQ {
            num: self.num.pow_input(m),
            den: self.den.pow_input(m),
        }
    }

    /// "Genuinely rational" marker: true when the denominator is
    /// nonconstant.
    pub fn has_poles(&self) -> bool {
        self.den.degree().unwrap_or(0) > 0
    }
}

impl fmt::Display for RatFuncQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == PolyQ::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFuncQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFuncQ({self})")
    }
}

/// `c * t^k * num/den` with `num`, `den` coprime, constant term 1.
///
/// The canonical form makes equality of functional-equation sides a plain
/// field-by-field comparison.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentQ {
    c: BigRational,
    tpow: i64,
    num: PolyQ,
    den: PolyQ,
}

impl LaurentQ {
    /// Canonicalize `c * t^k * num/den`: pull powers of `t` out of both
    /// polynomials, fold constants into `c`, reduce by the gcd.
    pub fn new(c: BigRational, tpow: i64, num: PolyQ, den: PolyQ) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() || c.is_zero() {
            return Err(Error::BadInput(
                "Laurent layer only represents nonzero functions".into(),
            ));
        }
        let (num, up) = strip_tpow(num);
        let (den, down) = strip_tpow(den);
        let g = num.gcd(&den);
        let num = num.exact_div(&g)?;
        let den = den.exact_div(&g)?;
        let cn = num.constant_term();
        let cd = den.constant_term();
        Ok(LaurentQ {
            c: c * &cn / &cd,
            tpow: tpow + up as i64 - down as i64,
            num: num.scale(&(BigRational::one() / cn)),
            den: den.scale(&(BigRational::one() / cd)),
        })
    }

    pub fn from_ratfunc(r: &RatFuncQ) -> Self {
        LaurentQ {
            c: BigRational::one(),
            tpow: 0,
            num: r.num().clone(),
            den: r.den().clone(),
        }
    }

    /// The monomial `c * t^k`.
    pub fn monomial(c: BigRational, tpow: i64) -> Result<Self> {
        LaurentQ::new(c, tpow, PolyQ::one(), PolyQ::one())
    }

    pub fn mul(&self, rhs: &LaurentQ) -> LaurentQ {
        LaurentQ::new(
            &self.c * &rhs.c,
            self.tpow + rhs.tpow,
            &self.num * &rhs.num,
            &self.den * &rhs.den,
        )
        .expect("product of nonzero Laurent elements is nonzero")
    }

    pub fn inv(&self) -> LaurentQ {
        LaurentQ {
            c: BigRational::one() / &self.c,
            tpow: -self.tpow,
            num: self.den.clone(),
            den: self.num.clone(),
        }
    }

    pub fn div(&self, rhs: &LaurentQ) -> LaurentQ {
        self.mul(&rhs.inv())
    }

    /// Substitute `t -> c*t`.
    pub fn scale_input(&self, s: &BigRational) -> LaurentQ {
        LaurentQ::new(
            &self.c * s.pow(self.tpow.try_into().expect("t-power fits i32")),
            self.tpow,
            self.num.scale_input(s),
            self.den.scale_input(s),
        )
        .expect("scaling preserves nonzeroness")
    }

    /// Substitute `t -> 1/t`.
    pub fn subst_inv(&self) -> LaurentQ {
        let a = self.num.degree().unwrap_or(0) as i64;
        let b = self.den.degree().unwrap_or(0) as i64;
        LaurentQ::new(
            self.c.clone(),
            b - a - self.tpow,
            self.num.reversed(),
            self.den.reversed(),
        )
        .expect("reversal preserves nonzeroness")
    }

    /// Substitute `t -> 1/(s*t)` for nonzero `s`: invert first, then rescale
    /// the new variable.
    pub fn subst_inv_scaled(&self, s: &BigRational) -> LaurentQ {
        self.subst_inv().scale_input(s)
    }

    /// When the element is a bare monomial `c * t^k`, return `(c, k)`.
    pub fn as_monomial(&self) -> Option<(BigRational, i64)> {
        if self.num == PolyQ::one() && self.den == PolyQ::one() {
            Some((self.c.clone(), self.tpow))
        } else {
            None
        }
    }
}

impl fmt::Display for LaurentQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} * t^{} * ({}) / ({})",
            self.c, self.tpow, self.num, self.den
        )
    }
}

impl fmt::Debug for LaurentQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentQ({self})")
    }
}

/// Split `f` as `t^k * g` with `g(0) != 0`; returns `(g, k)`.
fn strip_tpow(f: PolyQ) -> (PolyQ, usize) {
    let k = f
        .coeffs()
        .iter()
        .position(|c| !c.is_zero())
        .expect("nonzero polynomial");
    if k == 0 {
        return (f, 0);
    }
    (PolyQ::new(f.coeffs()[k..].to_vec()), k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::bigint::BigInt;

    fn p(cs: &[i64]) -> PolyQ {
        PolyQ::from_i64(cs)
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn construction_reduces_and_normalizes() {
        // (1-t)(1-2t) / (1-t) reduces to (1-2t)/1.
        let r = RatFuncQ::new(&p(&[1, -1]) * &p(&[1, -2]), p(&[1, -1])).unwrap();
        assert_eq!(r.num(), &p(&[1, -2]));
        assert_eq!(r.den(), &PolyQ::one());
        // Common nonunit constants are divided out.
        let r = RatFuncQ::new(p(&[2]), p(&[2, -2])).unwrap();
        assert_eq!(r.den(), &p(&[1, -1]));
    }

    #[test]
    fn bad_shapes_are_rejected() {
        assert_eq!(
            RatFuncQ::new(p(&[0, 1]), p(&[1, -1])),
            Err(Error::ZeroConstantTerm)
        );
        assert_eq!(
            RatFuncQ::new(p(&[1]), PolyQ::zero()),
            Err(Error::DivisionByZero)
        );
        assert!(matches!(
            RatFuncQ::new(p(&[2]), p(&[1, -1])),
            Err(Error::BadInput(_))
        ));
    }

    #[test]
    fn multiplication_cancels() {
        let a = RatFuncQ::new(p(&[1, -1]), p(&[1, -2])).unwrap();
        let b = a.inv();
        assert!(a.mul(&b).is_one());
    }

    #[test]
    fn laurent_subst_inv_on_simple_pole() {
        // f = 1/(1-t): f(1/t) = t/(t-1) = -t * 1/(1-t) ... as Laurent:
        // 1/(1 - 1/t) = t/(t-1) = -t/(1-t).
        let f = LaurentQ::from_ratfunc(&RatFuncQ::from_den(p(&[1, -1])).unwrap());
        let g = f.subst_inv();
        let expected = LaurentQ::new(q(-1, 1), 1, PolyQ::one(), p(&[1, -1])).unwrap();
        assert_eq!(g, expected);
    }

    #[test]
    fn laurent_monomial_detection() {
        let f = LaurentQ::from_ratfunc(&RatFuncQ::from_den(p(&[1, -1])).unwrap());
        // f(1/(2t)) / f(t) for f = 1/(1-t): f(1/(2t)) = 2t/(2t-1),
        // quotient = 2t(1-t)/(2t-1) ... not a monomial.
        let qout = f.subst_inv_scaled(&q(2, 1)).div(&f);
        assert!(qout.as_monomial().is_none());

        // And for the self-dual shape f = 1/((1-t)(1-2t)) with q = 2:
        // f(1/(2t)) = f applied at the reciprocal scaled point gives 2t^2 * f(t).
        let f = LaurentQ::from_ratfunc(&RatFuncQ::from_den(&p(&[1, -1]) * &p(&[1, -2])).unwrap());
        let qout = f.subst_inv_scaled(&q(2, 1)).div(&f);
        assert_eq!(qout.as_monomial(), Some((q(2, 1), 2)));
    }

    #[test]
    fn laurent_roundtrip_inv() {
        let f = LaurentQ::new(q(3, 2), -2, p(&[1, 4, 4]), p(&[1, -5])).unwrap();
        assert_eq!(f.subst_inv().subst_inv(), f);
        assert_eq!(f.mul(&f.inv()), LaurentQ::monomial(q(1, 1), 0).unwrap());
    }
}
