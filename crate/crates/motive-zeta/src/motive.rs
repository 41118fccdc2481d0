//! Virtual classes over a fixed base field size, carried in factored form.
//!
//! A [`VirtualMotive`] over `F_q` is a signed multiset of *atoms*: pairs
//! `(f, m)` where `f` is a squarefree polynomial with constant term 1 and
//! `m` a nonzero integer multiplicity, the atoms pairwise coprime. It
//! represents the rational function
//!
//! ```text
//! Z(t) = prod_atoms f(t)^(-m)
//! ```
//!
//! so positive multiplicity contributes poles of `Z` (even cohomology) and
//! negative multiplicity contributes zeros. The class of a point is
//! `(1 - t, +1)`; the Lefschetz class is `(1 - q t, +1)`.
//!
//! Every operation re-reduces its result to this normal form, so equality
//! of classes is structural equality and each class owns a canonical
//! factored Z-function. Sums concatenate atoms; tensor products compose
//! atoms pairwise through the resultant construction (inverse roots
//! multiply); duals invert inverse roots; Tate twists rescale them by
//! `q^(-r)`; odd shifts negate multiplicities; scalar pushforward spreads
//! `t -> t^m` and descends the base field.

use crate::error::{Error, Result};
use crate::jsonq;
use crate::poly::{interpolate, PolyQ};
use crate::ratfunc::{LaurentQ, RatFuncQ};
use crate::series::{log_derivative_counts, PowerSeriesQ};
use num::complex::Complex64;
use num::{BigRational, One, Signed, ToPrimitive, Zero};
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt;

/// One factored piece: squarefree `poly` (constant term 1) with signed
/// multiplicity. Positive multiplicity means `poly^mult` divides the
/// denominator of `Z`.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub poly: PolyQ,
    pub mult: i64,
}

/// A virtual class over `F_q` in reduced factored form.
#[derive(Clone, PartialEq)]
pub struct VirtualMotive {
    q: u64,
    atoms: Vec<Atom>,
}

impl fmt::Debug for VirtualMotive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VirtualMotive(q={}", self.q)?;
        for a in &self.atoms {
            write!(f, ", ({})^{}", a.poly, a.mult)?;
        }
        write!(f, ")")
    }
}

impl VirtualMotive {
    /// The zero class (Z = 1).
    pub fn zero(q: u64) -> Self {
        VirtualMotive {
            q,
            atoms: Vec::new(),
        }
    }

    /// The class of a point: `Z = 1/(1 - t)`.
    pub fn point(q: u64) -> Self {
        VirtualMotive {
            q,
            atoms: vec![Atom {
                poly: PolyQ::from_i64(&[1, -1]),
                mult: 1,
            }],
        }
    }

    /// The Lefschetz class: `Z = 1/(1 - q t)`.
    pub fn lefschetz(q: u64) -> Self {
        VirtualMotive {
            q,
            atoms: vec![Atom {
                poly: PolyQ::new(vec![
                    BigRational::one(),
                    -BigRational::from_integer(q.into()),
                ]),
                mult: 1,
            }],
        }
    }

    /// Build from raw factored data `(poly, mult)`, reducing to normal
    /// form. Every poly must have nonzero constant term.
    pub fn from_factors(q: u64, factors: Vec<(PolyQ, i64)>) -> Result<Self> {
        Ok(VirtualMotive {
            q,
            atoms: reduce_atoms(factors)?,
        })
    }

    /// Build from a Z-function: denominator atoms carry positive
    /// multiplicity, numerator atoms negative.
    pub fn from_rational(r: &RatFuncQ, q: u64) -> Result<Self> {
        VirtualMotive::from_factors(q, vec![(r.den().clone(), 1), (r.num().clone(), -1)])
    }

    /// Build by exponentiating a count sequence and fitting a rational
    /// function of the given degree bounds.
    pub fn from_counts(q: u64, counts: &[u64], dnum: usize, dden: usize) -> Result<Self> {
        let s = PowerSeriesQ::from_counts_u64(counts);
        let r = crate::series::rational_fit(&s, dnum, dden)?;
        VirtualMotive::from_rational(&r, q)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    fn check_base(&self, other: &VirtualMotive) -> Result<()> {
        if self.q == other.q {
            Ok(())
        } else {
            Err(Error::BaseMismatch(self.q, other.q))
        }
    }

    /// The Z-function `prod f^(-m)` as a reduced rational function.
    pub fn z_function(&self) -> RatFuncQ {
        let mut num = PolyQ::one();
        let mut den = PolyQ::one();
        for a in &self.atoms {
            let pw = a.poly.pow(a.mult.unsigned_abs() as usize);
            if a.mult > 0 {
                den = &den * &pw;
            } else {
                num = &num * &pw;
            }
        }
        // Atoms are pairwise coprime with constant term 1, so the quotient
        // is already reduced.
        RatFuncQ::from_coprime(num, den).expect("atoms have constant term 1 and are coprime")
    }

    /// Count sequence `n = 1..=depth` read off the logarithmic derivative
    /// of `Z`.
    pub fn counts(&self, depth: usize) -> Vec<BigRational> {
        log_derivative_counts(&self.z_function(), depth)
    }

    /// The single count at level `n >= 1`.
    pub fn count_at(&self, n: usize) -> BigRational {
        assert!(n >= 1);
        self.counts(n).pop().expect("depth >= 1")
    }

    /// Direct sum: atom multiset union, re-reduced.
    pub fn add(&self, other: &VirtualMotive) -> Result<VirtualMotive> {
        self.check_base(other)?;
        let mut factors: Vec<(PolyQ, i64)> = self
            .atoms
            .iter()
            .map(|a| (a.poly.clone(), a.mult))
            .collect();
        factors.extend(other.atoms.iter().map(|a| (a.poly.clone(), a.mult)));
        VirtualMotive::from_factors(self.q, factors)
    }

    /// Additive inverse: negate every multiplicity (Z inverts).
    pub fn negate(&self) -> VirtualMotive {
        VirtualMotive {
            q: self.q,
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    poly: a.poly.clone(),
                    mult: -a.mult,
                })
                .collect(),
        }
    }

    /// Subtraction in the group of classes.
    pub fn sub(&self, other: &VirtualMotive) -> Result<VirtualMotive> {
        self.add(&other.negate())
    }

    /// Homological shift by `k`: odd shifts negate multiplicities, even
    /// shifts are the identity.
    pub fn shift(&self, k: i64) -> VirtualMotive {
        if k.rem_euclid(2) == 0 {
            self.clone()
        } else {
            self.negate()
        }
    }

    /// Tate twist by `r`: inverse roots scale by `q^(-r)`, i.e.
    /// `f(t) -> f(q^(-r) t)` on every atom. Twisting the point by `-1`
    /// gives the Lefschetz class.
    pub fn tate_twist(&self, r: i64) -> Result<VirtualMotive> {
        let qr = BigRational::from_integer(self.q.into())
            .pow(i32::try_from(-r).map_err(|_| Error::BadInput("twist out of range".into()))?);
        let factors = self
            .atoms
            .iter()
            .map(|a| (a.poly.scale_input(&qr), a.mult))
            .collect();
        VirtualMotive::from_factors(self.q, factors)
    }

    /// Tensor product: atoms compose pairwise (inverse roots multiply,
    /// multiplicities multiply), then the result reduces.
    pub fn tensor(&self, other: &VirtualMotive) -> Result<VirtualMotive> {
        self.check_base(other)?;
        let mut factors = Vec::with_capacity(self.atoms.len() * other.atoms.len());
        for a in &self.atoms {
            for b in &other.atoms {
                let mult = a
                    .mult
                    .checked_mul(b.mult)
                    .ok_or_else(|| Error::BadInput("multiplicity overflow".into()))?;
                factors.push((composed_product(&a.poly, &b.poly), mult));
            }
        }
        VirtualMotive::from_factors(self.q, factors)
    }

    /// Dual: inverse roots invert, `f(t) -> f*(t) = t^deg f(1/t)` up to the
    /// constant-term normalization; multiplicities are unchanged.
    pub fn dual(&self) -> VirtualMotive {
        let factors = self
            .atoms
            .iter()
            .map(|a| {
                let rev = a.poly.reversed();
                (
                    rev.normalized_const_one()
                        .expect("reversal of constant-term-1 squarefree poly has nonzero constant"),
                    a.mult,
                )
            })
            .collect();
        VirtualMotive::from_factors(self.q, factors).expect("dual preserves normal form")
    }

    /// Euler characteristic: `deg den - deg num` of the reduced Z, i.e.
    /// `sum mult * deg`.
    pub fn euler_characteristic(&self) -> i64 {
        self.atoms
            .iter()
            .map(|a| a.mult * a.poly.degree().unwrap_or(0) as i64)
            .sum()
    }

    /// Determinant of Frobenius. Per atom the product of inverse roots is
    /// `(-1)^deg * lead(f)`, and the determinant is
    /// `prod [(-1)^deg lead(f)]^(-mult)`: the point gives 1, the class of
    /// the projective line gives `1/q`.
    pub fn det_frobenius(&self) -> BigRational {
        let mut acc = BigRational::one();
        for a in &self.atoms {
            let deg = a.poly.degree().unwrap_or(0);
            let mut base = a.poly.leading().expect("atoms are nonconstant").clone();
            if deg % 2 == 1 {
                base = -base;
            }
            let e = i32::try_from(-a.mult).expect("multiplicity fits i32");
            acc *= base.pow(e);
        }
        acc
    }

    /// Verify the functional equation
    /// `Z^dual(1/t) = (-t)^chi * det^(-1) * Z(t)` exactly, where `Z^dual`
    /// is the Z-function of the dual class, `chi` the Euler characteristic
    /// and `det` the Frobenius determinant. Returns the report; `holds` is
    /// the exact comparison outcome.
    pub fn functional_equation(&self) -> FunctionalEquationReport {
        let chi = self.euler_characteristic();
        let det = self.det_frobenius();
        let lhs = LaurentQ::from_ratfunc(&self.dual().z_function()).subst_inv();
        let rhs = LaurentQ::from_ratfunc(&self.z_function())
            .mul(&LaurentQ::monomial(sign_value(chi) / det.clone(), chi).expect("det is nonzero"));
        FunctionalEquationReport {
            chi,
            det,
            holds: lhs == rhs,
        }
    }

    /// Scalar pushforward along `F_{q0} -> F_{q0^m}`: requires `q = q0^m`,
    /// substitutes `t -> t^m` in every atom, and returns the class over
    /// `q0`. Counts at levels not divisible by `m` vanish; the Euler
    /// characteristic multiplies by `m`.
    pub fn pushforward_scalars(&self, m: u32) -> Result<VirtualMotive> {
        assert!(m >= 1);
        let q0 = crate::arith::perfect_root(self.q, m).ok_or_else(|| {
            Error::BadInput(format!(
                "pushforward needs the base size {} to be a perfect {}th power",
                self.q, m
            ))
        })?;
        let factors = self
            .atoms
            .iter()
            .map(|a| (a.poly.pow_input(m as usize), a.mult))
            .collect();
        VirtualMotive::from_factors(q0, factors)
    }

    /// Inverse-root weight census at relative tolerance `tol`.
    ///
    /// Numerically locates every inverse root `gamma` of every atom, maps
    /// it to the integer `w` minimizing the distance of `|gamma|` to
    /// `q^(w/2)`, and errors with `NotWeil` when the relative mismatch
    /// exceeds `tol` or complex-conjugate roots land in different weights.
    /// Returns `weight -> total multiplicity` (atom multiplicities counted
    /// once per root).
    pub fn weight_profile(&self, tol: f64) -> Result<BTreeMap<i64, i64>> {
        let mut out = BTreeMap::new();
        let qf = self.q as f64;
        for a in &self.atoms {
            let roots = inverse_roots(&a.poly);
            // Conjugate-consistency bookkeeping: pair each root with its
            // nearest conjugate and compare weights.
            let weights: Vec<i64> = roots
                .iter()
                .map(|g| {
                    let modulus = g.norm();
                    let west = 2.0 * modulus.ln() / qf.ln();
                    let w = west.round();
                    let target = qf.powf(w / 2.0);
                    if !w.is_finite() || (modulus - target).abs() / target > tol {
                        return Err(Error::NotWeil { modulus, q: self.q });
                    }
                    Ok(w as i64)
                })
                .collect::<Result<_>>()?;
            for (i, g) in roots.iter().enumerate() {
                if g.im.abs() > 1e-9 * (1.0 + g.norm()) {
                    let conj = g.conj();
                    let j = (0..roots.len())
                        .min_by(|&x, &y| {
                            (roots[x] - conj)
                                .norm()
                                .partial_cmp(&(roots[y] - conj).norm())
                                .unwrap()
                        })
                        .expect("nonempty roots");
                    if weights[j] != weights[i] {
                        return Err(Error::NotWeil {
                            modulus: g.norm(),
                            q: self.q,
                        });
                    }
                }
            }
            for w in weights {
                *out.entry(w).or_insert(0) += a.mult;
            }
        }
        out.retain(|_, m| *m != 0);
        Ok(out)
    }

    /// JSON form: `{"q": .., "atoms": [{"poly": [..], "mult": ..}, ..]}`.
    pub fn to_json(&self) -> Value {
        let atoms: Vec<Value> = self
            .atoms
            .iter()
            .map(|a| {
                let mut m = serde_json::Map::new();
                m.insert("mult".into(), Value::from(a.mult));
                m.insert("poly".into(), jsonq::coeffs_to_json(a.poly.coeffs()));
                Value::Object(m)
            })
            .collect();
        let mut m = serde_json::Map::new();
        m.insert("q".into(), Value::from(self.q));
        m.insert("atoms".into(), Value::Array(atoms));
        Value::Object(m)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let q = jsonq::get_u64(v, "q")?;
        let atoms_v = jsonq::get(v, "atoms")?
            .as_array()
            .ok_or_else(|| Error::BadInput("`atoms` must be a list".into()))?;
        let mut factors = Vec::with_capacity(atoms_v.len());
        for av in atoms_v {
            let poly = PolyQ::new(jsonq::coeffs_from_json(jsonq::get(av, "poly")?)?);
            let mult = jsonq::get_i64(av, "mult")?;
            factors.push((poly, mult));
        }
        VirtualMotive::from_factors(q, factors)
    }
}

fn sign_value(chi: i64) -> BigRational {
    if chi.rem_euclid(2) == 1 {
        -BigRational::one()
    } else {
        BigRational::one()
    }
}

/// Report of the functional-equation check.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalEquationReport {
    pub chi: i64,
    pub det: BigRational,
    pub holds: bool,
}

/// Reduce raw `(poly, mult)` data to the atom normal form: squarefree
/// parts split out with their multiplicities, all parts normalized to
/// constant term 1, refined to pairwise coprimality, duplicates merged,
/// zero multiplicities dropped, deterministic order. Exposed for other
/// factored-form computations (the local shift-equation solver reuses it
/// with multiplicities read as plain exponents).
pub fn reduce_atoms(factors: Vec<(PolyQ, i64)>) -> Result<Vec<Atom>> {
    // Squarefree-decompose everything first.
    let mut items: Vec<(PolyQ, i64)> = Vec::new();
    for (f, m) in factors {
        if m == 0 {
            continue;
        }
        if f.is_zero() || f.constant_term().is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        if f.degree() == Some(0) {
            continue; // constants carry no content after normalization
        }
        for (g, k) in f.squarefree_decomposition() {
            let piece = g.normalized_const_one()?;
            let mult = m
                .checked_mul(k as i64)
                .ok_or_else(|| Error::BadInput("multiplicity overflow".into()))?;
            items.push((piece, mult));
        }
    }
    // Refine to pairwise coprimality: whenever two items share a factor,
    // split both along it. Squarefree parts stay squarefree, so each split
    // strictly refines the multiset of irreducible supports; the loop
    // terminates.
    'outer: loop {
        merge_duplicates(&mut items)?;
        let n = items.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let g = items[i].0.gcd(&items[j].0);
                let dg = g.degree().unwrap_or(0);
                if dg == 0 {
                    continue;
                }
                let g = g.normalized_const_one()?;
                let (fi, mi) = items[i].clone();
                let (fj, mj) = items[j].clone();
                let fi_rest = fi.exact_div(&g)?.normalized_const_one()?;
                let fj_rest = fj.exact_div(&g)?.normalized_const_one()?;
                // Replace the pair by {fi/g, fj/g, g} with merged mults.
                items.remove(j);
                items.remove(i);
                if fi_rest.degree().unwrap_or(0) > 0 {
                    items.push((fi_rest, mi));
                }
                if fj_rest.degree().unwrap_or(0) > 0 {
                    items.push((fj_rest, mj));
                }
                items.push((
                    g,
                    mi.checked_add(mj)
                        .ok_or_else(|| Error::BadInput("multiplicity overflow".into()))?,
                ));
                continue 'outer;
            }
        }
        break;
    }
    items.retain(|(_, m)| *m != 0);
    items.sort_by(|a, b| a.0.cmp_key(&b.0));
    Ok(items
        .into_iter()
        .map(|(poly, mult)| Atom { poly, mult })
        .collect())
}

fn merge_duplicates(items: &mut Vec<(PolyQ, i64)>) -> Result<()> {
    items.sort_by(|a, b| a.0.cmp_key(&b.0));
    let mut out: Vec<(PolyQ, i64)> = Vec::with_capacity(items.len());
    for (f, m) in items.drain(..) {
        if let Some(last) = out.last_mut() {
            if last.0 == f {
                last.1 = last
                    .1
                    .checked_add(m)
                    .ok_or_else(|| Error::BadInput("multiplicity overflow".into()))?;
                continue;
            }
        }
        out.push((f, m));
    }
    out.retain(|(_, m)| *m != 0);
    *items = out;
    Ok(())
}

/// Composed product of two constant-term-1 polynomials: the polynomial
/// whose inverse roots are all pairwise products of theirs.
///
/// With `F = rev(f)` and `G = rev(g)` (monic, roots = the inverse roots),
/// the monic polynomial with root products is
/// `H(x) = Res_y(F(y), y^deg(G) * G(x/y))`, computed here by evaluating the
/// resultant at `deg F * deg G + 1` integer points and interpolating; the
/// answer is `rev(H)`, constant term 1 again.
pub fn composed_product(f: &PolyQ, g: &PolyQ) -> PolyQ {
    let df = f.degree().unwrap_or(0);
    let dg = g.degree().unwrap_or(0);
    if df == 0 || dg == 0 {
        // One side is the constant 1: no roots, empty product.
        return PolyQ::one();
    }
    let cap_f = f.reversed(); // monic, degree df
    let cap_g = g.reversed(); // monic, degree dg
    let dh = df * dg;
    let mut points = Vec::with_capacity(dh + 1);
    let mut k: i64 = 0;
    while points.len() < dh + 1 {
        let x = BigRational::from_integer(k.into());
        // K(y) = y^dg * G(x/y) = sum_j G_j x^j y^(dg - j).
        let mut kc = vec![BigRational::zero(); dg + 1];
        let mut xpow = BigRational::one();
        for j in 0..=dg {
            kc[dg - j] = cap_g.coeff(j) * &xpow;
            xpow = &xpow * &x;
        }
        let kpoly = PolyQ::new(kc);
        let h = cap_f.resultant(&kpoly);
        points.push((x, h));
        // 0, 1, -1, 2, -2, ...
        k = if k > 0 { -k } else { -k + 1 };
    }
    let h = interpolate(&points);
    h.reversed()
        .normalized_const_one()
        .expect("composed product of unit constant terms has unit constant term")
}

/// Numerically locate the inverse roots of a constant-term-1 polynomial:
/// the roots of its (monic) reversal, by Durand-Kerner iteration with a
/// Newton polish.
pub fn inverse_roots(f: &PolyQ) -> Vec<Complex64> {
    let rev = f.reversed(); // monic since f(0) = 1
    let d = rev.degree().unwrap_or(0);
    if d == 0 {
        return Vec::new();
    }
    let coeffs: Vec<f64> = rev
        .coeffs()
        .iter()
        .map(|c| c.to_f64().expect("coefficient fits f64"))
        .collect();
    let eval = |z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    let eval_d = |z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * z + Complex64::new(*c * i as f64, 0.0);
        }
        acc
    };
    // Cauchy bound on root moduli for the initial circle.
    let radius = 1.0 + coeffs[..d].iter().map(|c| c.abs()).fold(0.0f64, f64::max);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.7;
            Complex64::from_polar(0.7 * radius, angle)
        })
        .collect();
    for _ in 0..500 {
        let mut maxstep = 0.0f64;
        for i in 0..d {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() < 1e-300 {
                // Coincident guesses: nudge apart.
                z[i] += Complex64::new(1e-6, 1e-6);
                maxstep = f64::MAX;
                continue;
            }
            let step = eval(z[i]) / denom;
            z[i] -= step;
            maxstep = maxstep.max(step.norm() / (1.0 + z[i].norm()));
        }
        if maxstep < 1e-14 {
            break;
        }
    }
    // Newton polish.
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let dv = eval_d(*zi);
            if dv.norm() > 1e-300 {
                *zi -= eval(*zi) / dv;
            }
        }
    }
    // Deterministic order: by real part, then imaginary.
    z.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    z
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

    fn proj_line(qv: u64) -> VirtualMotive {
        VirtualMotive::point(qv)
            .add(&VirtualMotive::lefschetz(qv))
            .unwrap()
    }

    #[test]
    fn point_and_lefschetz_z_functions() {
        assert_eq!(VirtualMotive::point(2).z_function().den(), &p(&[1, -1]));
        assert_eq!(VirtualMotive::lefschetz(2).z_function().den(), &p(&[1, -2]));
        assert_eq!(proj_line(2).z_function().den(), &p(&[1, -3, 2]));
    }

    #[test]
    fn counts_of_projective_line() {
        let m = proj_line(3);
        let counts = m.counts(4);
        let expect: Vec<BigRational> = vec![q(4, 1), q(10, 1), q(28, 1), q(82, 1)];
        assert_eq!(counts, expect);
    }

    #[test]
    fn sum_cancels_with_negation() {
        let m = proj_line(5);
        assert!(m.add(&m.negate()).unwrap().is_zero());
        assert!(m.sub(&m).unwrap().is_zero());
    }

    #[test]
    fn base_mismatch_is_refused() {
        let a = VirtualMotive::point(2);
        let b = VirtualMotive::point(3);
        assert_eq!(a.add(&b).unwrap_err(), Error::BaseMismatch(2, 3));
    }

    #[test]
    fn shift_negates_on_odd() {
        let m = proj_line(2);
        assert_eq!(m.shift(2), m);
        assert_eq!(m.shift(1), m.negate());
        assert_eq!(m.shift(-3), m.negate());
        assert_eq!(m.shift(1).shift(1), m);
    }

    #[test]
    fn tate_twist_moves_point_to_lefschetz() {
        let tw = VirtualMotive::point(7).tate_twist(-1).unwrap();
        assert_eq!(tw, VirtualMotive::lefschetz(7));
        // Twisting back is the identity.
        assert_eq!(tw.tate_twist(1).unwrap(), VirtualMotive::point(7));
    }

    #[test]
    fn tensor_with_point_is_identity() {
        let m = proj_line(4);
        assert_eq!(m.tensor(&VirtualMotive::point(4)).unwrap(), m);
    }

    #[test]
    fn tensor_multiplies_inverse_roots() {
        // 1/(1-2t) tensor 1/(1-3t) = 1/(1-6t).
        let a = VirtualMotive::from_factors(7, vec![(p(&[1, -2]), 1)]).unwrap();
        let b = VirtualMotive::from_factors(7, vec![(p(&[1, -3]), 1)]).unwrap();
        let c = a.tensor(&b).unwrap();
        assert_eq!(c.z_function().den(), &p(&[1, -6]));
    }

    #[test]
    fn tensor_counts_are_multiplicative() {
        // Counts of a tensor product multiply levelwise; check on two
        // "projective line" classes over q = 2.
        let m = proj_line(2);
        let t = m.tensor(&m).unwrap();
        for n in 1..=5 {
            let c = m.count_at(n);
            assert_eq!(t.count_at(n), &c * &c);
        }
    }

    #[test]
    fn tensor_lefschetz_twice() {
        // L tensor L = L^2 has Z = 1/(1 - q^2 t).
        let l = VirtualMotive::lefschetz(3);
        let ll = l.tensor(&l).unwrap();
        assert_eq!(ll.z_function().den(), &p(&[1, -9]));
    }

    #[test]
    fn dual_inverts_roots() {
        // dual(1/(1-qt)) = 1/(1 - t/q).
        let l = VirtualMotive::lefschetz(2);
        let d = l.dual();
        assert_eq!(
            d.z_function().den(),
            &PolyQ::new(vec![BigRational::one(), q(-1, 2)])
        );
        assert_eq!(d.dual(), l);
        // The point is self-dual.
        let pt = VirtualMotive::point(5);
        assert_eq!(pt.dual(), pt);
    }

    #[test]
    fn euler_characteristic_and_det() {
        let pt = VirtualMotive::point(2);
        assert_eq!(pt.euler_characteristic(), 1);
        assert_eq!(pt.det_frobenius(), q(1, 1));
        let p1 = proj_line(2);
        assert_eq!(p1.euler_characteristic(), 2);
        assert_eq!(p1.det_frobenius(), q(1, 2));
        // (1-3t) as a numerator factor: mult -1, so the contribution is
        // [(-1)^1 * (-3)]^(+1) = 3.
        let m = VirtualMotive::from_factors(2, vec![(p(&[1, -3]), -1)]).unwrap();
        assert_eq!(m.det_frobenius(), q(3, 1));
    }

    #[test]
    fn functional_equation_point_and_line() {
        let pt = VirtualMotive::point(3);
        let rep = pt.functional_equation();
        assert_eq!(rep.chi, 1);
        assert_eq!(rep.det, q(1, 1));
        assert!(rep.holds);

        let p1 = proj_line(2);
        let rep = p1.functional_equation();
        assert_eq!(rep.chi, 2);
        assert_eq!(rep.det, q(1, 2));
        assert!(rep.holds);
    }

    #[test]
    fn pushforward_spreads_counts() {
        // Point over F_4 pushed to F_2: Z = 1/(1 - t^2); counts vanish at
        // odd levels and are 1... times the two embeddings at even levels.
        let m = VirtualMotive::point(4).pushforward_scalars(2).unwrap();
        assert_eq!(m.q(), 2);
        assert_eq!(m.z_function().den(), &p(&[1, 0, -1]));
        assert_eq!(m.euler_characteristic(), 2);
        let counts = m.counts(4);
        assert_eq!(counts, vec![q(0, 1), q(2, 1), q(0, 1), q(2, 1)]);
        // Base must be a perfect power.
        assert!(VirtualMotive::point(6).pushforward_scalars(2).is_err());
    }

    #[test]
    fn weight_profile_of_line_and_counterexample() {
        let p1 = proj_line(4);
        let w = p1.weight_profile(1e-9).unwrap();
        assert_eq!(w, BTreeMap::from([(0, 1), (2, 1)]));
        // 1/(1-3t) over q = 2: |3| is no half-integral power of 2.
        let bad = VirtualMotive::from_factors(2, vec![(p(&[1, -3]), 1)]).unwrap();
        assert!(matches!(
            bad.weight_profile(1e-9),
            Err(Error::NotWeil { .. })
        ));
    }

    #[test]
    fn reduction_splits_common_factors() {
        // (1-t)(1-2t) with mult 1 plus (1-2t)(1-4t) with mult 2 must
        // refine into three coprime atoms.
        let m = VirtualMotive::from_factors(
            4,
            vec![
                (&p(&[1, -1]) * &p(&[1, -2]), 1),
                (&p(&[1, -2]) * &p(&[1, -4]), 2),
            ],
        )
        .unwrap();
        // Atoms sort by degree then coefficient lex order.
        let atoms = m.atoms();
        assert_eq!(atoms.len(), 3);
        assert_eq!(atoms[0].poly, p(&[1, -4]));
        assert_eq!(atoms[0].mult, 2);
        assert_eq!(atoms[1].poly, p(&[1, -2]));
        assert_eq!(atoms[1].mult, 3);
        assert_eq!(atoms[2].poly, p(&[1, -1]));
        assert_eq!(atoms[2].mult, 1);
    }

    #[test]
    fn squarefree_input_splits_powers() {
        // (1-t)^2 as one factor becomes atom (1-t) with mult 2.
        let m = VirtualMotive::from_factors(2, vec![(p(&[1, -2, 1]), 1)]).unwrap();
        assert_eq!(m.atoms().len(), 1);
        assert_eq!(m.atoms()[0].poly, p(&[1, -1]));
        assert_eq!(m.atoms()[0].mult, 2);
    }

    #[test]
    fn json_roundtrip() {
        let m = proj_line(2).tensor(&proj_line(2)).unwrap();
        let v = m.to_json();
        let back = VirtualMotive::from_json(&v).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn composed_product_direct() {
        // (1-2t) comp (1-3t) = 1-6t; degree-2 case against hand expansion:
        // f = (1-t)(1-2t), g = (1-3t): products {3, 6}.
        assert_eq!(composed_product(&p(&[1, -2]), &p(&[1, -3])), p(&[1, -6]));
        assert_eq!(
            composed_product(&p(&[1, -3, 2]), &p(&[1, -3])),
            &p(&[1, -3]) * &p(&[1, -6])
        );
    }

    #[test]
    fn inverse_roots_of_quadratic() {
        // (1-t)(1-2t): inverse roots 1 and 2.
        let roots = inverse_roots(&p(&[1, -3, 2]));
        assert!((roots[0] - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        assert!((roots[1] - Complex64::new(2.0, 0.0)).norm() < 1e-9);
    }
}
