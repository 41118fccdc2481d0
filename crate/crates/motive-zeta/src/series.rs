//! Truncated power series over ℚ and exact rational reconstruction.
//!
//! A [`PowerSeriesQ`] holds coefficients `s_0..s_cutoff`. The module supplies
//! the two transforms that tie counts to Z-functions — exponentiating a
//! count sequence into a series and reading counts back off a rational
//! function's logarithmic derivative — plus Padé-style reconstruction of a
//! rational function from finitely many coefficients, with every candidate
//! verified against the full cutoff before it is accepted.

use crate::error::{Error, Result};
use crate::poly::PolyQ;
use crate::ratfunc::RatFuncQ;
use num::{BigRational, One, Zero};

/// Coefficients `s_0..s_cutoff` of a power series, exact.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PowerSeriesQ {
    coeffs: Vec<BigRational>,
}

impl PowerSeriesQ {
    /// Build from coefficients `s_0, s_1, ...`; at least `s_0` must be
    /// present.
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "a series carries at least s_0");
        PowerSeriesQ { coeffs }
    }

    /// The constant series 1 carried to `cutoff`.
    pub fn one(cutoff: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); cutoff + 1];
        coeffs[0] = BigRational::one();
        PowerSeriesQ { coeffs }
    }

    /// Highest coefficient index carried.
    pub fn cutoff(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Drop coefficients above `cutoff`.
    pub fn truncated(&self, cutoff: usize) -> PowerSeriesQ {
        let n = (cutoff + 1).min(self.coeffs.len());
        PowerSeriesQ {
            coeffs: self.coeffs[..n].to_vec(),
        }
    }

    /// Product, carried to the smaller cutoff.
    pub fn mul(&self, rhs: &PowerSeriesQ) -> PowerSeriesQ {
        let n = self.cutoff().min(rhs.cutoff());
        let mut out = vec![BigRational::zero(); n + 1];
        for i in 0..=n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(n - i) {
                if rhs.coeffs[j].is_zero() {
                    continue;
                }
                out[i + j] = &out[i + j] + &self.coeffs[i] * &rhs.coeffs[j];
            }
        }
        PowerSeriesQ { coeffs: out }
    }

    /// Substitute `t -> t^m` (m >= 1); the cutoff stays, surplus terms drop.
    pub fn pow_input(&self, m: usize, cutoff: usize) -> PowerSeriesQ {
        assert!(m >= 1);
        let mut out = vec![BigRational::zero(); cutoff + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if i * m > cutoff {
                break;
            }
            out[i * m] = c.clone();
        }
        PowerSeriesQ { coeffs: out }
    }

    /// Exponentiate a count sequence: the series `S` with
    /// `S = exp(sum_n counts[n-1] * t^n / n)`, carried to
    /// `cutoff = counts.len()`. Solves `n*s_n = sum_k counts_k * s_{n-k}`.
    pub fn from_counts(counts: &[BigRational]) -> PowerSeriesQ {
        let n = counts.len();
        let mut s = vec![BigRational::zero(); n + 1];
        s[0] = BigRational::one();
        for m in 1..=n {
            let mut acc = BigRational::zero();
            for k in 1..=m {
                acc += &counts[k - 1] * &s[m - k];
            }
            s[m] = acc / BigRational::from_integer(m.into());
        }
        PowerSeriesQ { coeffs: s }
    }

    /// Integer-count convenience wrapper for [`PowerSeriesQ::from_counts`].
    pub fn from_counts_u64(counts: &[u64]) -> PowerSeriesQ {
        let qs: Vec<BigRational> = counts
            .iter()
            .map(|&c| BigRational::from_integer(c.into()))
            .collect();
        PowerSeriesQ::from_counts(&qs)
    }

    /// Expand `num/den` to `cutoff` by series division; `den(0)` must be
    /// nonzero.
    pub fn from_quotient(num: &PolyQ, den: &PolyQ, cutoff: usize) -> Result<PowerSeriesQ> {
        let d0 = den.constant_term();
        if d0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let mut s = vec![BigRational::zero(); cutoff + 1];
        for n in 0..=cutoff {
            let mut acc = num.coeff(n);
            for k in 1..=n {
                let dk = den.coeff(k);
                if dk.is_zero() {
                    continue;
                }
                acc -= dk * &s[n - k];
            }
            s[n] = acc / &d0;
        }
        Ok(PowerSeriesQ { coeffs: s })
    }

    /// Expand a rational function to `cutoff`.
    pub fn from_ratfunc(r: &RatFuncQ, cutoff: usize) -> PowerSeriesQ {
        PowerSeriesQ::from_quotient(r.num(), r.den(), cutoff)
            .expect("normalized rational functions expand")
    }
}

/// Read the count sequence `n = 1..=depth` off the logarithmic derivative:
/// the n-th count is the coefficient of `t^n` in `t * R'(t)/R(t)`.
pub fn log_derivative_counts(r: &RatFuncQ, depth: usize) -> Vec<BigRational> {
    if depth == 0 {
        return Vec::new();
    }
    let num_part = PowerSeriesQ::from_quotient(&r.num().derivative(), r.num(), depth)
        .expect("constant term 1");
    let den_part = PowerSeriesQ::from_quotient(&r.den().derivative(), r.den(), depth)
        .expect("constant term 1");
    // t * (num'/num - den'/den): shift indices up by one.
    (1..=depth)
        .map(|n| num_part.coeff(n - 1) - den_part.coeff(n - 1))
        .collect()
}

/// Solve `A x = rhs` exactly by Gaussian elimination. Returns `None` when
/// the system is inconsistent; free variables are pinned to zero.
fn solve_exact(
    mut a: Vec<Vec<BigRational>>,
    mut rhs: Vec<BigRational>,
) -> Option<Vec<BigRational>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut row = 0usize;
    for col in 0..cols {
        let Some(pr) = (row..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, pr);
        rhs.swap(row, pr);
        let inv = BigRational::one() / &a[row][col];
        for c in col..cols {
            a[row][c] = &a[row][c] * &inv;
        }
        rhs[row] = &rhs[row] * &inv;
        for r in 0..rows {
            if r != row && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in col..cols {
                    let sub = &a[row][c] * &factor;
                    a[r][c] = &a[r][c] - sub;
                }
                let sub = &rhs[row] * &factor;
                rhs[r] = &rhs[r] - sub;
            }
        }
        pivot_of_col[col] = Some(row);
        row += 1;
        if row == rows {
            break;
        }
    }
    // Inconsistent when a zero row has nonzero rhs.
    for r in row..rows {
        if !rhs[r].is_zero() {
            return None;
        }
    }
    let mut x = vec![BigRational::zero(); cols];
    for (col, pv) in pivot_of_col.iter().enumerate() {
        if let Some(r) = pv {
            x[col] = rhs[*r].clone();
        }
    }
    Some(x)
}

/// Reconstruct a rational function `P/Q` with `deg P <= dnum`,
/// `deg Q <= dden`, `P(0) = Q(0) = 1`, matching `s` through its full cutoff.
///
/// Requires at least `dnum + dden + 2` coefficients (`s_0..s_{dnum+dden+1}`),
/// i.e. two more than the unknowns, so the answer is attested rather than
/// merely interpolated; `InsufficientTerms` otherwise. The candidate is
/// re-expanded and compared against every carried coefficient; any mismatch
/// is `NoFit`. A successful fit is returned gcd-reduced, which makes it the
/// unique reduced representative.
pub fn rational_fit(s: &PowerSeriesQ, dnum: usize, dden: usize) -> Result<RatFuncQ> {
    let n = s.cutoff();
    let need = dnum + dden + 2;
    if n + 1 < need {
        return Err(Error::InsufficientTerms { need, have: n + 1 });
    }
    let nofit = Error::NoFit { dnum, dden };
    if !s.coeff(0).is_one() {
        return Err(nofit);
    }
    // Unknowns q_1..q_dden; equations: for k in dnum+1..=n,
    //   sum_{j=0..dden} q_j s_{k-j} = 0 with q_0 = 1.
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for k in (dnum + 1)..=n {
        let mut row = Vec::with_capacity(dden);
        for j in 1..=dden {
            row.push(if j <= k {
                s.coeff(k - j)
            } else {
                BigRational::zero()
            });
        }
        rows.push(row);
        rhs.push(-s.coeff(k));
    }
    let qvec = solve_exact(rows, rhs).ok_or(nofit.clone())?;
    let mut qcoeffs = vec![BigRational::one()];
    qcoeffs.extend(qvec);
    let qpoly = PolyQ::new(qcoeffs);
    // P = (Q * S) truncated at dnum; the solved equations force the higher
    // product coefficients to vanish, but verify anyway.
    let mut pcoeffs = vec![BigRational::zero(); dnum + 1];
    for k in 0..=n {
        let mut acc = BigRational::zero();
        for j in 0..=k.min(dden) {
            let qj = qpoly.coeff(j);
            if qj.is_zero() {
                continue;
            }
            acc += qj * s.coeff(k - j);
        }
        if k <= dnum {
            pcoeffs[k] = acc;
        } else if !acc.is_zero() {
            return Err(nofit);
        }
    }
    let ppoly = PolyQ::new(pcoeffs);
    let fit = RatFuncQ::new(ppoly, qpoly).map_err(|_| nofit.clone())?;
    // Full re-expansion check against every carried coefficient.
    let back = PowerSeriesQ::from_ratfunc(&fit, n);
    if back.coeffs() != &s.coeffs()[..] {
        return Err(nofit);
    }
    Ok(fit)
}

/// [`rational_fit`] with automatic degree search: tries symmetric bounds
/// `(1,1), (2,2), (4,4), ...`, doubling until a fit verifies or the cutoff
/// can no longer attest a larger candidate, then one last attempt at the
/// largest attestable symmetric bounds.
pub fn rational_fit_auto(s: &PowerSeriesQ) -> Result<RatFuncQ> {
    let n = s.cutoff();
    if n + 1 < 4 {
        return Err(Error::InsufficientTerms {
            need: 4,
            have: n + 1,
        });
    }
    let dmax = (n - 1) / 2; // largest d with 2d + 2 <= n + 1
    let mut d = 1usize;
    let mut last_tried = 0usize;
    while d <= dmax {
        match rational_fit(s, d, d) {
            Ok(fit) => return Ok(fit),
            Err(Error::NoFit { .. }) => {}
            Err(e) => return Err(e),
        }
        last_tried = d;
        d *= 2;
    }
    if dmax > last_tried {
        match rational_fit(s, dmax, dmax) {
            Ok(fit) => return Ok(fit),
            Err(Error::NoFit { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Err(Error::NoFit {
        dnum: dmax,
        dden: dmax,
    })
}
