//! Finite fields `F_{p^e}` with deterministic construction.
//!
//! A field is `F_p[x]/(f)` for the lexicographically least monic irreducible
//! `f` of degree `e` (coefficient tuples `(c_0, .., c_{e-1})` compared left
//! to right, constant term most significant), so the same `(p, e)` always
//! names the same field and all derived data — element indices, generators,
//! embeddings — is reproducible. Elements enumerate in base-`p` odometer
//! order on their coordinate vectors, which fixes "least root" and "least
//! generator" unambiguously.
//!
//! Sizes are guarded by a construction-time cap (default `2^22` elements)
//! so runaway tower walks fail fast with `TooLarge` instead of thrashing.

use crate::arith::{is_prime, prime_factors};
use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// Default bound on the number of field elements (and on enumeration sizes
/// derived from it).
pub const DEFAULT_ENUM_CAP: u64 = 1 << 22;

#[derive(Debug)]
struct FieldData {
    p: u64,
    e: u32,
    q: u64,
    cap: u64,
    /// Monic modulus over `F_p`, ascending, length `e + 1`.
    modulus: Vec<u64>,
}

/// Cheap-to-clone handle to a field.
#[derive(Clone)]
pub struct FieldHandle {
    data: Arc<FieldData>,
}

impl FieldHandle {
    pub fn p(&self) -> u64 {
        self.data.p
    }

    pub fn e(&self) -> u32 {
        self.data.e
    }

    /// Number of elements `p^e`.
    pub fn q(&self) -> u64 {
        self.data.q
    }

    /// The cap this field (and extensions built from it) was constructed
    /// under.
    pub fn cap(&self) -> u64 {
        self.data.cap
    }

    /// Monic modulus coefficients over `F_p`, ascending.
    pub fn modulus(&self) -> &[u64] {
        &self.data.modulus
    }

    pub fn same_field(&self, other: &FieldHandle) -> bool {
        Arc::ptr_eq(&self.data, &other.data)
            || (self.data.p == other.data.p
                && self.data.e == other.data.e
                && self.data.modulus == other.data.modulus)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            field: self.clone(),
            coords: vec![0; self.data.e as usize],
        }
    }

    pub fn one(&self) -> FieldElement {
        self.scalar(1)
    }

    /// Embed a residue `c mod p` as a constant.
    pub fn scalar(&self, c: u64) -> FieldElement {
        let mut coords = vec![0; self.data.e as usize];
        coords[0] = c % self.data.p;
        FieldElement {
            field: self.clone(),
            coords,
        }
    }

    /// Embed a signed integer as a constant.
    pub fn scalar_i128(&self, c: i128) -> FieldElement {
        let p = self.data.p as i128;
        self.scalar(c.rem_euclid(p) as u64)
    }

    /// The element at position `idx` in enumeration order: base-`p` digits
    /// of `idx`, least significant digit = coefficient of `x^0`.
    pub fn element(&self, idx: u64) -> FieldElement {
        assert!(idx < self.data.q, "element index out of range");
        let mut coords = vec![0; self.data.e as usize];
        let mut k = idx;
        for c in coords.iter_mut() {
            *c = k % self.data.p;
            k /= self.data.p;
        }
        FieldElement {
            field: self.clone(),
            coords,
        }
    }

    /// All elements in enumeration order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.data.q).map(move |i| self.element(i))
    }

    /// The least multiplicative generator in enumeration order.
    pub fn multiplicative_generator(&self) -> FieldElement {
        let order = self.data.q - 1;
        let factors = prime_factors(order);
        for idx in 1..self.data.q {
            let g = self.element(idx);
            if factors.iter().all(|&r| !g.pow(order / r).is_one()) {
                return g;
            }
        }
        unreachable!("a finite field has a multiplicative generator")
    }
}

impl fmt::Debug for FieldHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{{{}^{}}}", self.data.p, self.data.e)
    }
}

impl PartialEq for FieldHandle {
    fn eq(&self, other: &Self) -> bool {
        self.same_field(other)
    }
}

/// An element, carried as coordinates over `F_p` in the power basis of the
/// modulus root.
#[derive(Clone)]
pub struct FieldElement {
    field: FieldHandle,
    coords: Vec<u64>,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_field(&other.field) && self.coords == other.coords
    }
}

impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}#{}", self.field, self.index())
    }
}

impl FieldElement {
    pub fn field(&self) -> &FieldHandle {
        &self.field
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    /// Position in enumeration order (inverse of [`FieldHandle::element`]).
    pub fn index(&self) -> u64 {
        let p = self.field.data.p;
        let mut idx = 0u64;
        for &c in self.coords.iter().rev() {
            idx = idx * p + c;
        }
        idx
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coords[0] == 1 && self.coords[1..].iter().all(|&c| c == 0)
    }

    fn check_field(&self, other: &FieldElement) -> Result<()> {
        if self.field.same_field(&other.field) {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_field(other)?;
        let p = self.field.data.p;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| (a + b) % p)
            .collect();
        Ok(FieldElement {
            field: self.field.clone(),
            coords,
        })
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_field(other)?;
        let p = self.field.data.p;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| (a + p - b) % p)
            .collect();
        Ok(FieldElement {
            field: self.field.clone(),
            coords,
        })
    }

    pub fn neg(&self) -> FieldElement {
        let p = self.field.data.p;
        FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().map(|&a| (p - a) % p).collect(),
        }
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_field(other)?;
        let data = &self.field.data;
        let coords = polymod_mul(&self.coords, &other.coords, &data.modulus, data.p);
        Ok(FieldElement {
            field: self.field.clone(),
            coords,
        })
    }

    /// Multiplicative inverse; `DivisionByZero` on zero.
    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let data = &self.field.data;
        let coords = polymod_inv(&self.coords, &data.modulus, data.p);
        Ok(FieldElement {
            field: self.field.clone(),
            coords,
        })
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement> {
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, mut k: u64) -> FieldElement {
        let mut acc = self.field.one();
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base).expect("same field");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("same field");
            }
        }
        acc
    }

    /// The `p`-power Frobenius.
    pub fn frobenius(&self) -> FieldElement {
        self.pow(self.field.data.p)
    }
}

/// Build `F_{p^e}` under the default cap.
pub fn make_field(p: u64, e: u32) -> Result<FieldHandle> {
    make_field_with_cap(p, e, DEFAULT_ENUM_CAP)
}

/// Build `F_{p^e}` under an explicit element cap.
pub fn make_field_with_cap(p: u64, e: u32, cap: u64) -> Result<FieldHandle> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    assert!(e >= 1, "extension degree must be positive");
    // Coordinate arithmetic works in u64 with p^2-sized intermediates.
    if p >= 1 << 31 {
        return Err(Error::TooLarge {
            size: p as u128,
            cap: (1 << 31) - 1,
        });
    }
    let size = (p as u128).pow(e);
    if size > cap as u128 {
        return Err(Error::TooLarge { size, cap });
    }
    let q = size as u64;
    let modulus = least_irreducible(p, e, q);
    Ok(FieldHandle {
        data: Arc::new(FieldData {
            p,
            e,
            q,
            cap,
            modulus,
        }),
    })
}

/// An explicit field homomorphism `F_{p^e} -> F_{p^{e*n}}` determined by the
/// least root of the small field's modulus in the big field.
pub struct Embedding {
    from: FieldHandle,
    to: FieldHandle,
    /// `powers[i]` is `root^i` for `i < from.e()`.
    powers: Vec<FieldElement>,
}

impl Embedding {
    pub fn from_field(&self) -> &FieldHandle {
        &self.from
    }

    pub fn to_field(&self) -> &FieldHandle {
        &self.to
    }

    /// The chosen root of the small modulus.
    pub fn root(&self) -> &FieldElement {
        if self.powers.len() > 1 {
            &self.powers[1]
        } else {
            &self.powers[0] // degree-1 subfield: the map is scalar embedding
        }
    }

    /// Map an element along the embedding.
    pub fn map(&self, a: &FieldElement) -> Result<FieldElement> {
        if !a.field().same_field(&self.from) {
            return Err(Error::FieldMismatch);
        }
        let mut acc = self.to.zero();
        for (i, &c) in a.coords().iter().enumerate() {
            if c == 0 {
                continue;
            }
            let term = self.powers[i].mul(&self.to.scalar(c))?;
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }
}

/// Build `F_{q^n}` over `F` together with the embedding that identifies `F`
/// with its image. The extension inherits `F`'s cap.
pub fn extend(f: &FieldHandle, n: u32) -> Result<(FieldHandle, Embedding)> {
    assert!(n >= 1);
    let e2 = f.e().checked_mul(n).ok_or(Error::TooLarge {
        size: u128::MAX,
        cap: f.cap(),
    })?;
    let g = make_field_with_cap(f.p(), e2, f.cap())?;
    // Least root of the small modulus in the big field, in enumeration
    // order. It exists because the degree of the modulus divides e*n.
    let mut root = None;
    'search: for cand in g.elements() {
        // Horner with scalar-embedded coefficients.
        let mut acc = g.zero();
        for &c in f.modulus().iter().rev() {
            acc = acc.mul(&cand).expect("same field");
            if c != 0 {
                acc = acc.add(&g.scalar(c)).expect("same field");
            }
        }
        if acc.is_zero() {
            root = Some(cand);
            break 'search;
        }
    }
    let root = root.expect("modulus splits in the extension");
    let mut powers = Vec::with_capacity(f.e() as usize);
    let mut acc = g.one();
    for _ in 0..f.e() {
        powers.push(acc.clone());
        acc = acc.mul(&root).expect("same field");
    }
    let emb = Embedding {
        from: f.clone(),
        to: g.clone(),
        powers,
    };
    Ok((g, emb))
}

// ---- dense polynomial arithmetic over F_p (private helpers) ----

fn pm_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn pm_deg(v: &[u64]) -> Option<usize> {
    v.iter().rposition(|&c| c != 0)
}

/// Residue inverse mod prime `p` by Fermat.
fn modinv(a: u64, p: u64) -> u64 {
    modpow(a % p, p - 2, p)
}

fn modpow(mut b: u64, mut k: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    b %= p;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        k >>= 1;
    }
    acc
}

/// `a * b mod (modulus)` for coordinate vectors of length `deg(modulus)`.
fn polymod_mul(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let e = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * e.max(1)];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            if bj == 0 {
                continue;
            }
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    // Reduce by the monic modulus from the top.
    for i in (e..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for (j, &mj) in modulus.iter().enumerate().take(e) {
            if mj == 0 {
                continue;
            }
            let idx = i - e + j;
            prod[idx] = (prod[idx] + p - c * mj % p) % p;
        }
    }
    prod.truncate(e);
    prod
}

/// Inverse of a nonzero coordinate vector mod the monic modulus, by the
/// extended Euclidean algorithm over `F_p[x]`.
fn polymod_inv(a: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let e = modulus.len() - 1;
    // r0 = modulus, r1 = a; s0 = 0, s1 = 1; invariant s_i * a = r_i mod modulus.
    let mut r0: Vec<u64> = modulus.to_vec();
    let mut r1: Vec<u64> = a.to_vec();
    pm_trim(&mut r0);
    pm_trim(&mut r1);
    let mut s0: Vec<u64> = vec![];
    let mut s1: Vec<u64> = vec![1];
    while pm_deg(&r1).is_some() {
        // Divide r0 by r1.
        let d1 = pm_deg(&r1).unwrap();
        let lead_inv = modinv(r1[d1], p);
        let mut rem = r0.clone();
        let mut quot = vec![0u64; rem.len().saturating_sub(d1).max(1)];
        while let Some(dr) = pm_deg(&rem) {
            if dr < d1 {
                break;
            }
            let c = rem[dr] * lead_inv % p;
            quot[dr - d1] = c;
            for (j, &r1j) in r1.iter().enumerate() {
                if r1j == 0 {
                    continue;
                }
                let idx = dr - d1 + j;
                rem[idx] = (rem[idx] + p - c * r1j % p) % p;
            }
        }
        pm_trim(&mut rem);
        // s_next = s0 - quot * s1 (mod p), carried to length e.
        let mut snext = vec![0u64; e.max(s0.len()).max(quot.len() + s1.len())];
        for (i, &c) in s0.iter().enumerate() {
            snext[i] = c;
        }
        for (i, &qi) in quot.iter().enumerate() {
            if qi == 0 {
                continue;
            }
            for (j, &sj) in s1.iter().enumerate() {
                if sj == 0 {
                    continue;
                }
                snext[i + j] = (snext[i + j] + p - qi * sj % p) % p;
            }
        }
        pm_trim(&mut snext);
        r0 = r1;
        r1 = rem;
        s0 = s1;
        s1 = snext;
    }
    // r0 is now a nonzero constant gcd; normalize s0 by its inverse.
    let c = r0[0];
    let cinv = modinv(c, p);
    let mut out = vec![0u64; e];
    for (i, &s) in s0.iter().enumerate() {
        if i < e {
            out[i] = s * cinv % p;
        }
    }
    out
}

/// `x^(p^k) mod f` via square-and-multiply on the exponent.
fn pm_pow_x(exponent: u64, modulus: &[u64], p: u64) -> Vec<u64> {
    let e = modulus.len() - 1;
    if e == 0 {
        return vec![];
    }
    // Represent x as a coordinate vector; exponentiate by squaring.
    let mut base = vec![0u64; e];
    if e == 1 {
        // x reduces to a constant: x = -modulus[0].
        base[0] = (p - modulus[0] % p) % p;
    } else {
        base[1] = 1;
    }
    let mut acc = vec![0u64; e];
    acc[0] = 1;
    let mut k = exponent;
    while k > 0 {
        if k & 1 == 1 {
            acc = polymod_mul(&acc, &base, modulus, p);
        }
        k >>= 1;
        if k > 0 {
            base = polymod_mul(&base, &base, modulus, p);
        }
    }
    acc
}

/// Gcd over `F_p[x]` of loose coefficient vectors.
fn pm_gcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    pm_trim(&mut a);
    pm_trim(&mut b);
    while let Some(db) = pm_deg(&b) {
        let lead_inv = modinv(b[db], p);
        while let Some(da) = pm_deg(&a) {
            if da < db {
                break;
            }
            let c = a[da] * lead_inv % p;
            for (j, &bj) in b.iter().enumerate() {
                if bj == 0 {
                    continue;
                }
                let idx = da - db + j;
                a[idx] = (a[idx] + p - c * bj % p) % p;
            }
        }
        pm_trim(&mut a);
        std::mem::swap(&mut a, &mut b);
    }
    a
}

/// Is the monic degree-`e` polynomial `f` irreducible over `F_p`?
///
/// Tests `x^(p^e) == x (mod f)` and, for every prime `r | e`, that
/// `gcd(x^(p^(e/r)) - x, f)` is constant.
fn is_irreducible(f: &[u64], p: u64, e: u32) -> bool {
    let q = (p as u64).pow(e);
    let xq = pm_pow_x(q, f, p);
    // x^(p^e) - x must vanish mod f.
    let mut diff = xq;
    if diff.len() >= 2 {
        diff[1] = (diff[1] + p - 1) % p;
    } else {
        // e == 1: x reduces to a constant; handled below.
        let xred = (p - f[0] % p) % p;
        diff[0] = (diff[0] + p - xred) % p;
    }
    if pm_deg(&diff).is_some() {
        return false;
    }
    for r in prime_factors(e as u64) {
        let sub = (p as u64).pow(e / r as u32);
        let mut g = pm_pow_x(sub, f, p);
        if g.len() >= 2 {
            g[1] = (g[1] + p - 1) % p;
        } else {
            let xred = (p - f[0] % p) % p;
            g[0] = (g[0] + p - xred) % p;
        }
        let d = pm_gcd(g, f.to_vec(), p);
        if pm_deg(&d).is_some_and(|dd| dd > 0) {
            return false;
        }
    }
    true
}

/// The lexicographically least monic irreducible of degree `e` over `F_p`:
/// candidates ordered by the tuple `(c_0, .., c_{e-1})`, leftmost
/// coefficient most significant.
fn least_irreducible(p: u64, e: u32, q: u64) -> Vec<u64> {
    let eu = e as usize;
    if e == 1 {
        // Every monic linear is irreducible; the least is x itself.
        return vec![0, 1];
    }
    // Candidates with c_0 = 0 are divisible by x; in the stated order they
    // are exactly the indices below p^(e-1), so start past them.
    let start = q / p;
    // Scan for roots in the prime field before the full test when that is
    // cheap; it discards everything with a linear factor.
    let scan_roots = p <= 256;
    'next: for idx in start..q {
        // Big-endian digits: c_0 varies slowest.
        let mut f = vec![0u64; eu + 1];
        let mut k = idx;
        for i in (0..eu).rev() {
            f[i] = k % p;
            k /= p;
        }
        f[eu] = 1;
        let residues: &[u64] = if scan_roots { &[] } else { &[1, p - 1] };
        let range: Box<dyn Iterator<Item = u64>> = if scan_roots {
            Box::new(1..p)
        } else {
            Box::new(residues.iter().copied())
        };
        for a in range {
            let mut acc = 0u64;
            for &c in f.iter().rev() {
                acc = (acc * a + c) % p;
            }
            if acc == 0 {
                continue 'next;
            }
        }
        if is_irreducible(&f, p, e) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
