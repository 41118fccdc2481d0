//! Dirichlet series with exact rational coefficients, truncated at a
//! cutoff.
//!
//! A [`DirichletSeries`] stores `a_1 .. a_N` for `sum_n a_n n^(-s)`; `N`
//! is the *cutoff*. Products convolve along divisors and truncate to the
//! smaller cutoff. Euler products assemble a series from local factors:
//! a local factor of norm `v` is a rational function `R(u)` with
//! `R(0) = 1`, contributing `R(v^(-s))`, i.e. its power-series
//! coefficients land at indices `v^k`.
//!
//! The module also solves the multiplicative shift equation
//! `g(s) = f(s) * g(s+1)` coefficientwise: see [`solve_shift_equation`].

use crate::error::{Error, Result};
use crate::jsonq;
use crate::ratfunc::RatFuncQ;
use crate::series::PowerSeriesQ;
use num::{BigRational, One, Signed, ToPrimitive, Zero};
use serde_json::Value;
use std::fmt;

/// A truncated Dirichlet series `sum_{n=1}^{N} a_n n^(-s)` with exact
/// coefficients. `coeffs[i]` is `a_{i+1}`.
#[derive(Clone, PartialEq)]
pub struct DirichletSeries {
    coeffs: Vec<BigRational>,
}

impl fmt::Debug for DirichletSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DirichletSeries[N={}](", self.cutoff())?;
        for (i, c) in self.coeffs.iter().take(8).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "a_{}={}", i + 1, c)?;
        }
        if self.cutoff() > 8 {
            write!(f, ", ..")?;
        }
        write!(f, ")")
    }
}

impl DirichletSeries {
    /// Build from explicit coefficients `a_1 ..`; at least one is required.
    pub fn new(coeffs: Vec<BigRational>) -> DirichletSeries {
        assert!(!coeffs.is_empty(), "a Dirichlet series needs a cutoff >= 1");
        DirichletSeries { coeffs }
    }

    /// The multiplicative unit: `a_1 = 1`, all later coefficients zero.
    pub fn one(cutoff: usize) -> DirichletSeries {
        assert!(cutoff >= 1);
        let mut coeffs = vec![BigRational::zero(); cutoff];
        coeffs[0] = BigRational::one();
        DirichletSeries { coeffs }
    }

    /// The all-ones series `a_n = 1` up to the cutoff.
    pub fn all_ones(cutoff: usize) -> DirichletSeries {
        assert!(cutoff >= 1);
        DirichletSeries {
            coeffs: vec![BigRational::one(); cutoff],
        }
    }

    pub fn cutoff(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient `a_n` (`n >= 1`); zero beyond the cutoff.
    pub fn coeff(&self, n: usize) -> BigRational {
        assert!(n >= 1);
        self.coeffs
            .get(n - 1)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Drop coefficients beyond `cutoff`.
    pub fn truncated(&self, cutoff: usize) -> DirichletSeries {
        assert!(cutoff >= 1);
        DirichletSeries {
            coeffs: self.coeffs[..cutoff.min(self.coeffs.len())].to_vec(),
        }
    }

    /// Product of Dirichlet series: divisor convolution, truncated to the
    /// smaller cutoff.
    pub fn mul(&self, other: &DirichletSeries) -> DirichletSeries {
        let n = self.cutoff().min(other.cutoff());
        let mut out = vec![BigRational::zero(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            let d = i + 1;
            for e in 1..=(n / d) {
                let b = &other.coeffs[e - 1];
                if b.is_zero() {
                    continue;
                }
                out[d * e - 1] += a * b;
            }
        }
        DirichletSeries { coeffs: out }
    }

    /// Multiplicative inverse at the same cutoff; requires `a_1 != 0`.
    pub fn inv(&self) -> Result<DirichletSeries> {
        if self.coeffs[0].is_zero() {
            return Err(Error::NotInvertible);
        }
        let n = self.cutoff();
        let lead_inv = BigRational::one() / &self.coeffs[0];
        let mut out = vec![BigRational::zero(); n];
        out[0] = lead_inv.clone();
        for m in 2..=n {
            // sum over divisors d < m of m: b_d * a_{m/d} = -b_m * a_1.
            let mut acc = BigRational::zero();
            for d in crate::arith::divisors(m as u64) {
                let d = d as usize;
                if d == m {
                    continue;
                }
                if !out[d - 1].is_zero() {
                    acc += &out[d - 1] * &self.coeffs[m / d - 1];
                }
            }
            out[m - 1] = -acc * &lead_inv;
        }
        Ok(DirichletSeries { coeffs: out })
    }

    /// Substitute `s -> s + m`: coefficients become `a_n / n^m`.
    pub fn shift_argument(&self, m: i32) -> DirichletSeries {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| a * BigRational::from_integer((i as i64 + 1).into()).pow(-m))
            .collect();
        DirichletSeries { coeffs }
    }

    /// Series of a single Euler factor: the local factor `r` (a rational
    /// function with value 1 at the origin) at a place of norm `v >= 2`,
    /// expanded so that the power-series coefficient of `u^k` lands at
    /// index `v^k`.
    pub fn from_euler_factor(r: &RatFuncQ, norm: u64, cutoff: usize) -> Result<DirichletSeries> {
        if norm < 2 {
            return Err(Error::BadInput(format!(
                "place norm must be at least 2, got {norm}"
            )));
        }
        let mut out = DirichletSeries::one(cutoff);
        // Largest k with norm^k <= cutoff.
        let mut kmax = 0usize;
        let mut pw: u128 = 1;
        while pw.saturating_mul(norm as u128) <= cutoff as u128 {
            pw *= norm as u128;
            kmax += 1;
        }
        if kmax == 0 {
            return Ok(out);
        }
        let expansion = PowerSeriesQ::from_ratfunc(r, kmax);
        let mut idx: usize = 1;
        for k in 1..=kmax {
            idx *= norm as usize;
            out.coeffs[idx - 1] = expansion.coeff(k).clone();
        }
        Ok(out)
    }

    /// Euler product over the given `(norm, local factor)` places, up to
    /// the cutoff. Places of norm beyond the cutoff contribute nothing
    /// and are skipped.
    pub fn euler_product<'a, I>(places: I, cutoff: usize) -> Result<DirichletSeries>
    where
        I: IntoIterator<Item = (u64, &'a RatFuncQ)>,
    {
        let mut acc = DirichletSeries::one(cutoff);
        for (norm, r) in places {
            if norm as u128 > cutoff as u128 {
                continue;
            }
            acc = acc.mul(&DirichletSeries::from_euler_factor(r, norm, cutoff)?);
        }
        Ok(acc)
    }

    /// Largest absolute value among the coefficients, as `f64`.
    pub fn max_coeff_abs(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }

    /// Numerical value of the partial sum at real `s`, together with a
    /// tail-size estimate when one is available.
    ///
    /// The partial sum runs over the carried coefficients. For `s > 1` the
    /// tail of any series with `|a_n| <= A` is bounded by
    /// `A * N^(1-s) / (s-1)` (integral comparison), and that bound is
    /// returned; for `s <= 1` no bound exists at this level of generality
    /// and the estimate is `None`.
    pub fn evaluate(&self, s: f64) -> (f64, Option<f64>) {
        let mut sum = 0.0f64;
        for (i, a) in self.coeffs.iter().enumerate() {
            let af = a.to_f64().unwrap_or(0.0);
            if af != 0.0 {
                sum += af * ((i + 1) as f64).powf(-s);
            }
        }
        let tail = if s > 1.0 {
            let n = self.cutoff() as f64;
            Some(self.max_coeff_abs() * n.powf(1.0 - s) / (s - 1.0))
        } else {
            None
        };
        (sum, tail)
    }

    /// JSON form: `{"cutoff": N, "a": {"n": "a_n", ..}}` with only the
    /// nonzero coefficients listed.
    pub fn to_json(&self) -> Value {
        let mut a = serde_json::Map::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                a.insert((i + 1).to_string(), jsonq::scalar_to_json(c));
            }
        }
        let mut m = serde_json::Map::new();
        m.insert("cutoff".into(), Value::from(self.cutoff() as u64));
        m.insert("a".into(), Value::Object(a));
        Value::Object(m)
    }

    pub fn from_json(v: &Value) -> Result<DirichletSeries> {
        let cutoff = jsonq::get_u64(v, "cutoff")? as usize;
        if cutoff == 0 {
            return Err(Error::BadInput("cutoff must be at least 1".into()));
        }
        let map = jsonq::get(v, "a")?
            .as_object()
            .ok_or_else(|| Error::BadInput("`a` must be an object".into()))?;
        let mut coeffs = vec![BigRational::zero(); cutoff];
        for (k, val) in map {
            let n: usize = k
                .parse()
                .map_err(|_| Error::BadInput(format!("bad index `{k}`")))?;
            if n < 1 || n > cutoff {
                return Err(Error::BadInput(format!("index {n} outside 1..={cutoff}")));
            }
            coeffs[n - 1] = jsonq::rational_from_json(val)?;
        }
        Ok(DirichletSeries { coeffs })
    }
}

/// Solve `g(s) = f(s) * g(s+1)` for `g` given `f`, normalized by
/// `b_1 = 1`.
///
/// Writing `f = sum a_n n^(-s)` and `g = sum b_n n^(-s)`, the right side
/// is `sum_n (sum_{d|n} a_d b_{n/d} (d/n)) n^(-s)`, so matching
/// coefficients and peeling the `d = 1` term gives the recursion
///
/// ```text
/// b_n (1 - 1/n) = sum_{d|n, d>1} a_d * b_{n/d} * (d/n)      (n >= 2)
/// ```
///
/// which determines every `b_n` from `b_1 = 1`. The equation forces
/// `a_1 = 1`; anything else is rejected with `BadLeadingCoefficient`.
/// For a prime `p`, `b_p = a_p * p / (p-1)`.
pub fn solve_shift_equation(f: &DirichletSeries) -> Result<DirichletSeries> {
    if !f.coeffs[0].is_one() {
        return Err(Error::BadLeadingCoefficient(f.coeffs[0].to_string()));
    }
    let n = f.cutoff();
    let mut b = vec![BigRational::zero(); n];
    b[0] = BigRational::one();
    for m in 2..=n {
        let mut acc = BigRational::zero();
        for d in crate::arith::divisors(m as u64) {
            let d = d as usize;
            if d == 1 {
                continue;
            }
            let a_d = &f.coeffs[d - 1];
            if a_d.is_zero() {
                continue;
            }
            let b_rest = &b[m / d - 1];
            if b_rest.is_zero() {
                continue;
            }
            acc += a_d * b_rest * BigRational::new((d as i64).into(), (m as i64).into());
        }
        // b_m = acc * m / (m - 1).
        b[m - 1] = acc * BigRational::new((m as i64).into(), (m as i64 - 1).into());
    }
    Ok(DirichletSeries { coeffs: b })
}

/// Abscissa bound for an Euler product whose local inverse roots have
/// absolute value at most `p^(weight/2)` and whose local factors have
/// heights bounded by `height_bound`: the series converges absolutely for
/// `Re(s) > weight/2 + 1`.
///
/// The bound is uniform in the height once it is finite, so
/// `height_bound` records the hypothesis without entering the value.
pub fn abscissa_bound(weight: i64, height_bound: u64) -> BigRational {
    let _ = height_bound;
    BigRational::new(weight.into(), 2.into()) + BigRational::one()
}
