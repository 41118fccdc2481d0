//! Dense univariate polynomials over ℚ with exact arithmetic.
//!
//! Coefficients are stored in ascending degree with no trailing zeros; the
//! zero polynomial is the empty list. This is the substrate shared by
//! rational functions, series reconstruction, and the atom algebra: division
//! with remainder, monic gcd, squarefree decomposition, resultants, and the
//! input substitutions `t -> c*t`, `t -> t^m`, and coefficient reversal.

use crate::error::{Error, Result};
use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A polynomial over ℚ, coefficients ascending, no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyQ {
    coeffs: Vec<BigRational>,
}

impl PolyQ {
    /// Build from ascending coefficients, trimming trailing zeros.
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PolyQ { coeffs }
    }

    pub fn zero() -> Self {
        PolyQ { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        PolyQ {
            coeffs: vec![BigRational::one()],
        }
    }

    /// Convenience constructor from integer coefficients, ascending.
    pub fn from_i64(cs: &[i64]) -> Self {
        PolyQ::new(
            cs.iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    /// The monomial `c * t^deg`.
    pub fn monomial(deg: usize, c: BigRational) -> Self {
        if c.is_zero() {
            return PolyQ::zero();
        }
        let mut coeffs = vec![BigRational::zero(); deg + 1];
        coeffs[deg] = c;
        PolyQ { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficients, ascending. Empty for zero.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `t^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Leading coefficient, `None` for zero.
    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    /// Constant term (zero for the zero polynomial).
    pub fn constant_term(&self) -> BigRational {
        self.coeff(0)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> PolyQ {
        if self.coeffs.len() <= 1 {
            return PolyQ::zero();
        }
        PolyQ::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(i.into()))
                .collect(),
        )
    }

    /// Multiply by a scalar.
    pub fn scale(&self, c: &BigRational) -> PolyQ {
        if c.is_zero() {
            return PolyQ::zero();
        }
        PolyQ {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Substitute `t -> c*t`: coefficient `a_i` becomes `a_i * c^i`.
    pub fn scale_input(&self, c: &BigRational) -> PolyQ {
        let mut pow = BigRational::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let v = a * &pow;
                pow = &pow * c;
                v
            })
            .collect();
        PolyQ::new(coeffs)
    }

    /// Substitute `t -> t^m` (m >= 1): spreads coefficients out with zeros.
    pub fn pow_input(&self, m: usize) -> PolyQ {
        assert!(m >= 1, "substitution exponent must be positive");
        if self.is_zero() || m == 1 {
            return self.clone();
        }
        let mut coeffs = vec![BigRational::zero(); (self.coeffs.len() - 1) * m + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * m] = c.clone();
        }
        PolyQ { coeffs }
    }

    /// Coefficient reversal `t^deg * f(1/t)`. Zero maps to zero.
    pub fn reversed(&self) -> PolyQ {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        PolyQ::new(coeffs)
    }

    /// Binary exponentiation.
    pub fn pow(&self, n: usize) -> PolyQ {
        let mut acc = PolyQ::one();
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Division with remainder. Errors on a zero divisor.
    pub fn divrem(&self, d: &PolyQ) -> Result<(PolyQ, PolyQ)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let lead = d.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() < dd + 1 {
            return Ok((PolyQ::zero(), self.clone()));
        }
        let qlen = rem.len() - dd;
        let mut quot = vec![BigRational::zero(); qlen];
        for k in (0..qlen).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (i, di) in d.coeffs.iter().enumerate() {
                    let sub = di * &c;
                    rem[k + i] = &rem[k + i] - sub;
                }
            }
            quot[k] = c;
        }
        Ok((PolyQ::new(quot), PolyQ::new(rem)))
    }

    /// Exact division; errors when the divisor does not divide exactly.
    pub fn exact_div(&self, d: &PolyQ) -> Result<PolyQ> {
        let (q, r) = self.divrem(d)?;
        if !r.is_zero() {
            return Err(Error::BadInput(
                "internal: exact division left a remainder".into(),
            ));
        }
        Ok(q)
    }

    /// Divide every coefficient by the leading one.
    pub fn make_monic(&self) -> PolyQ {
        match self.leading() {
            None => PolyQ::zero(),
            Some(l) => {
                let inv = BigRational::one() / l;
                self.scale(&inv)
            }
        }
    }

    /// Normalize to constant term 1; errors when the constant term is zero
    /// (including the zero polynomial).
    pub fn normalized_const_one(&self) -> Result<PolyQ> {
        let c = self.constant_term();
        if c.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let inv = BigRational::one() / c;
        Ok(self.scale(&inv))
    }

    /// Monic gcd. `gcd(0, f)` is monic `f`; `gcd(0, 0)` is zero.
    ///
    /// Runs the primitive-remainder Euclidean algorithm over ℤ instead of
    /// dividing with rational coefficients: naive rational remainders blow
    /// up doubly exponentially and stall already around degree thirty,
    /// while content-stripped integer pseudo-remainders stay small.
    pub fn gcd(&self, other: &PolyQ) -> PolyQ {
        if self.is_zero() {
            return other.make_monic();
        }
        if other.is_zero() {
            return self.make_monic();
        }
        let mut a = primitive_integer(&self.coeffs);
        let mut b = primitive_integer(&other.coeffs);
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_empty() {
            let r = pseudo_rem(&a, &b);
            a = b;
            b = primitive_part(r);
        }
        PolyQ::new(a.into_iter().map(BigRational::from_integer).collect()).make_monic()
    }

    /// Squarefree decomposition (characteristic zero): returns pairs
    /// `(g_i, i)` with each `g_i` monic squarefree, pairwise coprime, and
    /// `f = lead * prod g_i^i`. Constants decompose to nothing.
    pub fn squarefree_decomposition(&self) -> Vec<(PolyQ, usize)> {
        let Some(deg) = self.degree() else {
            return Vec::new();
        };
        if deg == 0 {
            return Vec::new();
        }
        let f = self.make_monic();
        let df = f.derivative();
        let g = f.gcd(&df);
        if g.degree() == Some(0) {
            return vec![(f, 1)];
        }
        let mut out = Vec::new();
        let mut c = f.exact_div(&g).expect("gcd divides");
        let mut d = df.exact_div(&g).expect("gcd divides derivative");
        d = &d - &c.derivative();
        let mut i = 1usize;
        while c.degree() != Some(0) {
            let a = c.gcd(&d);
            if a.degree().is_some_and(|da| da > 0) {
                out.push((a.clone(), i));
            }
            c = c.exact_div(&a).expect("factor divides");
            d = d.exact_div(&a).expect("factor divides");
            d = &d - &c.derivative();
            i += 1;
        }
        out
    }

    /// Resultant of two polynomials by the Euclidean chain. `Res(f, 0)` and
    /// `Res(0, g)` are zero unless the other argument is a nonzero constant.
    pub fn resultant(&self, other: &PolyQ) -> BigRational {
        fn go(a: &PolyQ, b: &PolyQ) -> BigRational {
            let (Some(m), Some(n)) = (a.degree(), b.degree()) else {
                // A zero argument shares every root.
                return BigRational::zero();
            };
            if n == 0 {
                return b.leading().unwrap().pow(m as i32);
            }
            if m == 0 {
                return a.leading().unwrap().pow(n as i32);
            }
            if m < n {
                let sign = if (m * n) % 2 == 1 {
                    -BigRational::one()
                } else {
                    BigRational::one()
                };
                return sign * go(b, a);
            }
            let (_, r) = a.divrem(b).expect("nonzero divisor");
            if r.is_zero() {
                return BigRational::zero();
            }
            let dr = r.degree().unwrap();
            let sign = if (m * n) % 2 == 1 {
                -BigRational::one()
            } else {
                BigRational::one()
            };
            sign * b.leading().unwrap().pow((m - dr) as i32) * go(b, &r)
        }
        go(self, other)
    }

    /// Canonical ordering key: by degree, then coefficients ascending. Used
    /// to keep atom lists deterministic.
    pub fn cmp_key(&self, other: &PolyQ) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

/// Clear denominators and strip content: the primitive integer polynomial
/// proportional to `coeffs`.
fn primitive_integer(coeffs: &[BigRational]) -> Vec<BigInt> {
    let mut scale = BigInt::one();
    for c in coeffs {
        scale = scale.lcm(c.denom());
    }
    let ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| c.numer() * (&scale / c.denom()))
        .collect();
    primitive_part(ints)
}

/// Trim trailing zeros and divide by the coefficient gcd; empty is zero.
fn primitive_part(mut ints: Vec<BigInt>) -> Vec<BigInt> {
    while ints.last().is_some_and(|c| c.is_zero()) {
        ints.pop();
    }
    let mut content = BigInt::zero();
    for c in &ints {
        content = content.gcd(c);
    }
    if content.is_zero() || content.is_one() {
        return ints;
    }
    for c in ints.iter_mut() {
        *c = &*c / &content;
    }
    ints
}

/// Pseudo-remainder of `a` by nonzero `b` over ℤ: repeatedly scale by the
/// leading coefficient of `b` and cancel the top term until the degree
/// drops below `deg b`. Proportional to the true remainder.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = b.last().expect("divisor is nonzero").clone();
    let mut r = a.to_vec();
    while r.len() > db {
        let Some(lr) = r.last().cloned() else { break };
        let shift = r.len() - 1 - db;
        for c in r.iter_mut() {
            *c = &*c * &lb;
        }
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] -= &lr * bc;
        }
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    r
}

/// Lagrange interpolation through `points`: the unique polynomial of degree
/// `< points.len()` hitting every `(x, y)`. The abscissae must be distinct.
pub fn interpolate(points: &[(BigRational, BigRational)]) -> PolyQ {
    // Newton's divided differences, then expansion to the monomial basis.
    let n = points.len();
    let mut coef: Vec<BigRational> = points.iter().map(|(_, y)| y.clone()).collect();
    for j in 1..n {
        for i in (j..n).rev() {
            let dx = &points[i].0 - &points[i - j].0;
            assert!(!dx.is_zero(), "interpolation nodes must be distinct");
            coef[i] = (&coef[i] - &coef[i - 1]) / dx;
        }
    }
    // Horner-style assembly: p = c_{n-1}; p = p*(t - x_i) + c_i.
    let mut p = PolyQ::zero();
    for i in (0..n).rev() {
        let shift = PolyQ::new(vec![-points[i].0.clone(), BigRational::one()]);
        p = &(&p * &shift) + &PolyQ::new(vec![coef[i].clone()]);
    }
    p
}

impl Add for &PolyQ {
    type Output = PolyQ;
    fn add(self, rhs: &PolyQ) -> PolyQ {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + rhs.coeff(i));
        }
        PolyQ::new(out)
    }
}

impl Sub for &PolyQ {
    type Output = PolyQ;
    fn sub(self, rhs: &PolyQ) -> PolyQ {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - rhs.coeff(i));
        }
        PolyQ::new(out)
    }
}

impl Neg for &PolyQ {
    type Output = PolyQ;
    fn neg(self) -> PolyQ {
        PolyQ {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &PolyQ {
    type Output = PolyQ;
    fn mul(self, rhs: &PolyQ) -> PolyQ {
        if self.is_zero() || rhs.is_zero() {
            return PolyQ::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = &out[i + j] + a * b;
            }
        }
        PolyQ::new(out)
    }
}

impl fmt::Display for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit_coeff = mag.is_one() && i > 0;
            if !unit_coeff {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "{}t", if unit_coeff { "" } else { "*" })?,
                _ => write!(f, "{}t^{}", if unit_coeff { "" } else { "*" }, i)?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyQ({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> PolyQ {
        PolyQ::from_i64(cs)
    }

    #[test]
    fn arithmetic_basics() {
        let a = p(&[1, -3, 2]); // (1-t)(1-2t)
        let b = p(&[1, -1]);
        let c = p(&[1, -2]);
        assert_eq!(&b * &c, a);
        assert_eq!(&a - &a, PolyQ::zero());
        assert_eq!(a.degree(), Some(2));
        assert_eq!(p(&[0]).degree(), None);
    }

    #[test]
    fn divrem_reconstructs() {
        let a = p(&[2, 0, -1, 4, 7]);
        let d = p(&[1, 3, 1]);
        let (q, r) = a.divrem(&d).unwrap();
        assert_eq!(&(&q * &d) + &r, a);
        assert!(r.degree() < d.degree());
    }

    #[test]
    fn gcd_is_monic_and_common() {
        let f = &p(&[1, -1]) * &p(&[1, -3, 2]);
        let g = &p(&[1, -1]) * &p(&[1, 5]);
        let h = f.gcd(&g);
        // gcd must be the monic scalar multiple of 1 - t, i.e. t - 1.
        assert_eq!(h, p(&[-1, 1]));
    }

    #[test]
    fn squarefree_decomposition_recovers_multiplicities() {
        // f = (t-1)^2 (t+2)^3
        let f = &p(&[-1, 1]).pow(2) * &p(&[2, 1]).pow(3);
        let dec = f.squarefree_decomposition();
        assert_eq!(dec.len(), 2);
        assert!(dec.contains(&(p(&[-1, 1]), 2)));
        assert!(dec.contains(&(p(&[2, 1]), 3)));
    }

    #[test]
    fn resultant_matches_root_product() {
        // f = (t-1)(t-2), g = (t-3): Res(f,g) = f(3) = 2 (monic case).
        let f = &p(&[-1, 1]) * &p(&[-2, 1]);
        let g = p(&[-3, 1]);
        assert_eq!(f.resultant(&g), BigRational::from_integer(2.into()));
        // Swap picks up (-1)^(deg f * deg g).
        assert_eq!(g.resultant(&f), BigRational::from_integer(2.into()));
        // Shared root kills it.
        let h = p(&[-1, 1]);
        assert!(f.resultant(&h).is_zero());
    }

    #[test]
    fn substitutions() {
        let f = p(&[1, -1]); // 1 - t
        let two = BigRational::from_integer(2.into());
        assert_eq!(f.scale_input(&two), p(&[1, -2]));
        assert_eq!(f.pow_input(3), p(&[1, 0, 0, -1]));
        assert_eq!(p(&[1, -3, 2]).reversed(), p(&[2, -3, 1]));
    }

    #[test]
    fn interpolation_hits_all_nodes() {
        let f = p(&[3, -2, 0, 1]);
        let pts: Vec<_> = (-3..=3)
            .map(|k| {
                let x = BigRational::from_integer(k.into());
                let y = f.eval(&x);
                (x, y)
            })
            .collect();
        assert_eq!(interpolate(&pts), f);
    }

    #[test]
    fn display_reads_naturally() {
        assert_eq!(p(&[1, -3, 2]).to_string(), "1 - 3*t + 2*t^2");
        assert_eq!(p(&[1, 1]).to_string(), "1 + t");
        assert_eq!(PolyQ::zero().to_string(), "0");
    }
}
