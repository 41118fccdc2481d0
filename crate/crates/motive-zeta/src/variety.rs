//! Varieties presented by explicit polynomial systems, and point counting
//! over towers of finite fields.
//!
//! A [`VarietySpec`] is a list of integer polynomials (equations and
//! optional non-vanishing constraints) in declared variables, either affine
//! or projective. Counting enumerates assignments directly — projective
//! points through the normalized representatives with leading coordinate 1
//! — so every count is exact by construction. The enumeration is
//! embarrassingly parallel over the outermost coordinate; with the
//! `parallel` feature (on by default) strata are counted on a rayon pool
//! and summed, which returns bit-identical results to the sequential path
//! since the per-stratum counts are integers.
//!
//! The module also carries the two special-purpose counters the higher
//! layers need: Weierstrass curves with their per-`x` quadratic-character
//! count (linear in the field size rather than quadratic, which is what
//! makes degree-6 towers affordable), and Kummer twist families
//! `x^n = delta^j * g(y)`.

use crate::error::{Error, Result};
use crate::field::{make_field_with_cap, FieldElement, FieldHandle};
use serde::Deserialize;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Multivariate polynomial with integer coefficients: a sum of terms
/// `(exponents, coefficient)` over the declared variable list.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    nvars: usize,
    /// Exponent vectors, one entry per declared variable.
    terms: Vec<(Vec<u16>, i128)>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(c: i128, nvars: usize) -> Self {
        if c == 0 {
            return MultiPoly::zero(nvars);
        }
        MultiPoly {
            nvars,
            terms: vec![(vec![0; nvars], c)],
        }
    }

    pub fn variable(i: usize, nvars: usize) -> Self {
        let mut exps = vec![0u16; nvars];
        exps[i] = 1;
        MultiPoly {
            nvars,
            terms: vec![(exps, 1)],
        }
    }

    pub fn terms(&self) -> &[(Vec<u16>, i128)] {
        &self.terms
    }

    fn normalized(mut self) -> Result<Self> {
        self.terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Vec<u16>, i128)> = Vec::with_capacity(self.terms.len());
        for (e, c) in self.terms {
            if let Some(last) = out.last_mut() {
                if last.0 == e {
                    last.1 = last
                        .1
                        .checked_add(c)
                        .ok_or_else(|| Error::BadInput("coefficient overflow".into()))?;
                    continue;
                }
            }
            out.push((e, c));
        }
        out.retain(|(_, c)| *c != 0);
        Ok(MultiPoly {
            nvars: self.nvars,
            terms: out,
        })
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        MultiPoly {
            nvars: self.nvars,
            terms,
        }
        .normalized()
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u16> = ea
                    .iter()
                    .zip(eb)
                    .map(|(&x, &y)| {
                        x.checked_add(y)
                            .ok_or_else(|| Error::BadInput("exponent overflow".into()))
                    })
                    .collect::<Result<_>>()?;
                let c = ca
                    .checked_mul(*cb)
                    .ok_or_else(|| Error::BadInput("coefficient overflow".into()))?;
                terms.push((exps, c));
            }
        }
        MultiPoly {
            nvars: self.nvars,
            terms,
        }
        .normalized()
    }

    pub fn pow(&self, n: u16) -> Result<MultiPoly> {
        let mut acc = MultiPoly::constant(1, self.nvars);
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Total degree of each term; `None` when zero.
    fn term_degrees(&self) -> Vec<u32> {
        self.terms
            .iter()
            .map(|(e, _)| e.iter().map(|&x| x as u32).sum())
            .collect()
    }

    /// Is every term of the same total degree?
    pub fn is_homogeneous(&self) -> bool {
        let d = self.term_degrees();
        d.windows(2).all(|w| w[0] == w[1])
    }
}

/// Parse an integer polynomial in the named variables.
///
/// Grammar: sums and differences of terms; terms are `*`-products of
/// factors; a factor is a variable, an integer, a parenthesized expression,
/// or any of those raised by `^` to a nonnegative integer power. An
/// identifier outside `vars` is `UnknownVariable`.
pub fn parse_poly(text: &str, vars: &[String]) -> Result<MultiPoly> {
    let mut p = PolyParser {
        chars: text.char_indices().peekable(),
        text,
        vars,
    };
    let poly = p.expr()?;
    p.skip_ws();
    if let Some(&(i, c)) = p.chars.peek() {
        return Err(p.syntax(i, format!("unexpected `{c}`")));
    }
    Ok(poly)
}

struct PolyParser<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    text: &'a str,
    vars: &'a [String],
}

impl<'a> PolyParser<'a> {
    fn syntax(&self, offset: usize, msg: String) -> Error {
        Error::BadInput(format!(
            "polynomial `{}`: {} at offset {}",
            self.text, msg, offset
        ))
    }

    fn skip_ws(&mut self) {
        while self.chars.peek().is_some_and(|&(_, c)| c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        self.skip_ws();
        // Optional leading sign.
        let mut acc = if self.eat('-') {
            self.term()?.neg()
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            self.skip_ws();
            if self.eat('+') {
                acc = acc.add(&self.term()?)?;
            } else if self.eat('-') {
                acc = acc.add(&self.term()?.neg())?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.eat('*') {
                acc = acc.mul(&self.factor()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<MultiPoly> {
        self.skip_ws();
        let base = self.base()?;
        self.skip_ws();
        if self.eat('^') {
            self.skip_ws();
            let i = match self.chars.peek() {
                Some(&(i, _)) => i,
                None => return Err(self.syntax(self.text.len(), "expected exponent".into())),
            };
            let n = self.integer()?;
            let n = u16::try_from(n).map_err(|_| self.syntax(i, "exponent out of range".into()))?;
            return base.pow(n);
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<MultiPoly> {
        self.skip_ws();
        let Some(&(i, c)) = self.chars.peek() else {
            return Err(self.syntax(self.text.len(), "unexpected end of input".into()));
        };
        if c == '(' {
            self.chars.next();
            let inner = self.expr()?;
            self.skip_ws();
            if !self.eat(')') {
                return Err(self.syntax(i, "unbalanced parenthesis".into()));
            }
            return Ok(inner);
        }
        if c == '-' {
            self.chars.next();
            return Ok(self.factor()?.neg());
        }
        if c.is_ascii_digit() {
            let n = self.integer()?;
            return Ok(MultiPoly::constant(n, self.vars.len()));
        }
        if c.is_alphabetic() || c == '_' {
            let name = self.identifier();
            let idx = self
                .vars
                .iter()
                .position(|v| v == &name)
                .ok_or(Error::UnknownVariable(name))?;
            return Ok(MultiPoly::variable(idx, self.vars.len()));
        }
        Err(self.syntax(i, format!("unexpected `{c}`")))
    }

    fn identifier(&mut self) -> String {
        let mut s = String::new();
        while let Some(&(_, c)) = self.chars.peek() {
            if c.is_alphanumeric() || c == '_' {
                s.push(c);
                self.chars.next();
            } else {
                break;
            }
        }
        s
    }

    fn integer(&mut self) -> Result<i128> {
        let start = self.chars.peek().map_or(self.text.len(), |&(i, _)| i);
        let mut v: i128 = 0;
        let mut any = false;
        while let Some(&(_, c)) = self.chars.peek() {
            if let Some(d) = c.to_digit(10) {
                v = v
                    .checked_mul(10)
                    .and_then(|x| x.checked_add(d as i128))
                    .ok_or_else(|| self.syntax(start, "integer literal too large".into()))?;
                any = true;
                self.chars.next();
            } else {
                break;
            }
        }
        if !any {
            return Err(self.syntax(start, "expected an integer".into()));
        }
        Ok(v)
    }

    fn eat(&mut self, want: char) -> bool {
        if self.chars.peek().is_some_and(|&(_, c)| c == want) {
            self.chars.next();
            true
        } else {
            false
        }
    }
}

/// Affine or projective presentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Affine,
    Projective,
}

/// A variety given by equations (all must vanish) and non-vanishing
/// constraints over declared variables.
#[derive(Clone, Debug)]
pub struct VarietySpec {
    vars: Vec<String>,
    kind: Kind,
    eqs: Vec<MultiPoly>,
    nonzero: Vec<MultiPoly>,
    /// Original equation strings, kept for error messages.
    eq_texts: Vec<String>,
}

#[derive(Deserialize)]
struct VarietySpecRaw {
    vars: Vec<String>,
    kind: Kind,
    #[serde(default)]
    eqs: Vec<String>,
    #[serde(default)]
    nonzero: Vec<String>,
}

impl VarietySpec {
    /// Build from equation strings, validating homogeneity for projective
    /// presentations.
    pub fn new(vars: Vec<String>, kind: Kind, eqs: &[&str], nonzero: &[&str]) -> Result<Self> {
        let eqs_owned: Vec<String> = eqs.iter().map(|s| s.to_string()).collect();
        let nz_owned: Vec<String> = nonzero.iter().map(|s| s.to_string()).collect();
        Self::build(vars, kind, eqs_owned, nz_owned)
    }

    fn build(
        vars: Vec<String>,
        kind: Kind,
        eq_texts: Vec<String>,
        nz_texts: Vec<String>,
    ) -> Result<Self> {
        if vars.is_empty() && kind == Kind::Projective {
            return Err(Error::BadInput(
                "a projective presentation needs at least one variable".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for v in &vars {
            if !seen.insert(v.clone()) {
                return Err(Error::BadInput(format!("variable `{v}` declared twice")));
            }
        }
        let eqs: Vec<MultiPoly> = eq_texts
            .iter()
            .map(|t| parse_poly(t, &vars))
            .collect::<Result<_>>()?;
        let nonzero: Vec<MultiPoly> = nz_texts
            .iter()
            .map(|t| parse_poly(t, &vars))
            .collect::<Result<_>>()?;
        if kind == Kind::Projective {
            for (p, t) in eqs.iter().zip(&eq_texts) {
                if !p.is_homogeneous() {
                    return Err(Error::InhomogeneousProjective(t.clone()));
                }
            }
            for (p, t) in nonzero.iter().zip(&nz_texts) {
                if !p.is_homogeneous() {
                    return Err(Error::InhomogeneousProjective(t.clone()));
                }
            }
        }
        Ok(VarietySpec {
            vars,
            kind,
            eqs,
            nonzero,
            eq_texts,
        })
    }

    /// Read a presentation from JSON:
    /// `{"vars": [...], "kind": "affine"|"projective", "eqs": [...],
    ///   "nonzero": [...]}`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: VarietySpecRaw = serde_json::from_str(text)
            .map_err(|e| Error::BadInput(format!("variety JSON: {e}")))?;
        Self::build(raw.vars, raw.kind, raw.eqs, raw.nonzero)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn equation_texts(&self) -> &[String] {
        &self.eq_texts
    }
}

/// A polynomial with coefficients reduced into `F`, ready for evaluation.
struct CompiledPoly {
    terms: Vec<(Vec<u16>, FieldElement)>,
}

impl CompiledPoly {
    fn compile(p: &MultiPoly, f: &FieldHandle) -> CompiledPoly {
        let terms = p
            .terms()
            .iter()
            .filter_map(|(e, c)| {
                let ce = f.scalar_i128(*c);
                if ce.is_zero() {
                    None
                } else {
                    Some((e.clone(), ce))
                }
            })
            .collect();
        CompiledPoly { terms }
    }

    fn eval(&self, point: &[FieldElement], f: &FieldHandle) -> FieldElement {
        let mut acc = f.zero();
        for (exps, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(exps) {
                if e > 0 {
                    t = t.mul(&x.pow(e as u64)).expect("same field");
                }
            }
            acc = acc.add(&t).expect("same field");
        }
        acc
    }
}

/// One enumeration job: a fixed prefix of coordinates, with the rest free.
struct Stratum {
    prefix: Vec<FieldElement>,
    free: usize,
}

fn strata(spec: &VarietySpec, f: &FieldHandle) -> Vec<Stratum> {
    let n = spec.vars.len();
    let mut out = Vec::new();
    match spec.kind {
        Kind::Affine => {
            if n == 0 {
                out.push(Stratum {
                    prefix: Vec::new(),
                    free: 0,
                });
            } else {
                for v in f.elements() {
                    out.push(Stratum {
                        prefix: vec![v],
                        free: n - 1,
                    });
                }
            }
        }
        Kind::Projective => {
            // Normalized representatives: first nonzero coordinate is 1.
            for lead in 0..n {
                let mut prefix = vec![f.zero(); lead];
                prefix.push(f.one());
                let free = n - lead - 1;
                if free == 0 {
                    out.push(Stratum { prefix, free });
                } else {
                    for v in f.elements() {
                        let mut pf = prefix.clone();
                        pf.push(v);
                        out.push(Stratum {
                            prefix: pf,
                            free: free - 1,
                        });
                    }
                }
            }
        }
    }
    out
}

fn count_stratum(
    stratum: &Stratum,
    eqs: &[CompiledPoly],
    nonzero: &[CompiledPoly],
    f: &FieldHandle,
) -> u64 {
    let q = f.q();
    let nfree = stratum.free;
    let mut point = stratum.prefix.clone();
    point.extend(std::iter::repeat_with(|| f.zero()).take(nfree));
    let base = stratum.prefix.len();
    let mut count = 0u64;
    let total = q.pow(nfree as u32);
    let mut odometer = vec![0u64; nfree];
    for step in 0..total {
        if step > 0 {
            // Advance base-q odometer and refresh the changed coordinates.
            let mut i = 0;
            loop {
                odometer[i] += 1;
                if odometer[i] < q {
                    point[base + i] = f.element(odometer[i]);
                    break;
                }
                odometer[i] = 0;
                point[base + i] = f.element(0);
                i += 1;
            }
        }
        let ok = eqs.iter().all(|p| p.eval(&point, f).is_zero())
            && nonzero.iter().all(|p| !p.eval(&point, f).is_zero());
        if ok {
            count += 1;
        }
    }
    count
}

fn check_enumeration_size(spec: &VarietySpec, f: &FieldHandle) -> Result<()> {
    let size = (f.q() as u128)
        .checked_pow(spec.vars.len() as u32)
        .unwrap_or(u128::MAX);
    if size > f.cap() as u128 {
        return Err(Error::TooLarge { size, cap: f.cap() });
    }
    Ok(())
}

/// Count points of `spec` over `F` sequentially.
pub fn count_points_seq(spec: &VarietySpec, f: &FieldHandle) -> Result<u64> {
    check_enumeration_size(spec, f)?;
    let eqs: Vec<_> = spec
        .eqs
        .iter()
        .map(|p| CompiledPoly::compile(p, f))
        .collect();
    let nz: Vec<_> = spec
        .nonzero
        .iter()
        .map(|p| CompiledPoly::compile(p, f))
        .collect();
    Ok(strata(spec, f)
        .iter()
        .map(|s| count_stratum(s, &eqs, &nz, f))
        .sum())
}

/// Count points of `spec` over `F` on the rayon pool. The per-stratum
/// counts are integers, so the sum is identical to the sequential result
/// regardless of thread count.
#[cfg(feature = "parallel")]
pub fn count_points_par(spec: &VarietySpec, f: &FieldHandle) -> Result<u64> {
    check_enumeration_size(spec, f)?;
    let eqs: Vec<_> = spec
        .eqs
        .iter()
        .map(|p| CompiledPoly::compile(p, f))
        .collect();
    let nz: Vec<_> = spec
        .nonzero
        .iter()
        .map(|p| CompiledPoly::compile(p, f))
        .collect();
    Ok(strata(spec, f)
        .par_iter()
        .map(|s| count_stratum(s, &eqs, &nz, f))
        .sum())
}

/// Count points of `spec` over `F`, using the parallel path when built with
/// the `parallel` feature (default) and the sequential path otherwise.
pub fn count_points(spec: &VarietySpec, f: &FieldHandle) -> Result<u64> {
    #[cfg(feature = "parallel")]
    {
        count_points_par(spec, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        count_points_seq(spec, f)
    }
}

/// Counts over the tower `F_{q^n}` for `n = 1..=depth`.
pub fn count_tower(spec: &VarietySpec, f: &FieldHandle, depth: u32) -> Result<Vec<u64>> {
    let mut out = Vec::with_capacity(depth as usize);
    for n in 1..=depth {
        let g = make_field_with_cap(f.p(), f.e() * n, f.cap())?;
        out.push(count_points(spec, &g)?);
    }
    Ok(out)
}

/// Partition the points of an affine variety by the value of one
/// coordinate: `result[i]` is the number of points whose `coord` value is
/// the field element of index `i`. The fibers sum to the total count.
pub fn fiber_partition(spec: &VarietySpec, coord: &str, f: &FieldHandle) -> Result<Vec<u64>> {
    if spec.kind != Kind::Affine {
        return Err(Error::BadInput(
            "fiber partition is defined for affine presentations".into(),
        ));
    }
    let ci = spec
        .vars
        .iter()
        .position(|v| v == coord)
        .ok_or_else(|| Error::UnknownVariable(coord.to_string()))?;
    check_enumeration_size(spec, f)?;
    let eqs: Vec<_> = spec
        .eqs
        .iter()
        .map(|p| CompiledPoly::compile(p, f))
        .collect();
    let nz: Vec<_> = spec
        .nonzero
        .iter()
        .map(|p| CompiledPoly::compile(p, f))
        .collect();
    let n = spec.vars.len();
    let q = f.q();
    let mut fibers = vec![0u64; q as usize];
    // Enumerate with the chosen coordinate outermost.
    let others: Vec<usize> = (0..n).filter(|&i| i != ci).collect();
    let total_inner = q.pow(others.len() as u32);
    let mut point: Vec<FieldElement> = (0..n).map(|_| f.zero()).collect();
    for b in 0..q {
        point[ci] = f.element(b);
        let mut odo = vec![0u64; others.len()];
        for &i in &others {
            point[i] = f.element(0);
        }
        for step in 0..total_inner {
            if step > 0 {
                let mut i = 0;
                loop {
                    odo[i] += 1;
                    if odo[i] < q {
                        point[others[i]] = f.element(odo[i]);
                        break;
                    }
                    odo[i] = 0;
                    point[others[i]] = f.element(0);
                    i += 1;
                }
            }
            let ok = eqs.iter().all(|p| p.eval(&point, f).is_zero())
                && nz.iter().all(|p| !p.eval(&point, f).is_zero());
            if ok {
                fibers[b as usize] += 1;
            }
        }
    }
    Ok(fibers)
}

/// A Weierstrass curve `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6` over
/// ℚ with its standard invariants.
#[derive(Clone, Debug)]
pub struct WeierstrassCurve {
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a4: i64,
    pub a6: i64,
    b2: i128,
    b4: i128,
    b6: i128,
    b8: i128,
    c4: i128,
    c6: i128,
    disc: i128,
}

/// Reduction behavior of a Weierstrass curve at a prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reduction {
    Good,
    /// Multiplicative; `split` records whether the tangent slopes at the
    /// node are rational over the residue field.
    Multiplicative {
        split: bool,
    },
    Additive,
}

impl WeierstrassCurve {
    /// Coefficients are bounded so that every derived invariant — including
    /// the `c4^3 - c6^2` consistency check — stays inside `i128`.
    pub const COEFF_BOUND: i64 = 1000;

    pub fn new(a1: i64, a2: i64, a3: i64, a4: i64, a6: i64) -> Result<Self> {
        for a in [a1, a2, a3, a4, a6] {
            if a.abs() > Self::COEFF_BOUND {
                return Err(Error::BadInput(format!(
                    "curve coefficient {a} exceeds the exact-invariant bound {}",
                    Self::COEFF_BOUND
                )));
            }
        }
        let (w1, w2, w3, w4, w6) = (a1 as i128, a2 as i128, a3 as i128, a4 as i128, a6 as i128);
        let b2 = w1 * w1 + 4 * w2;
        let b4 = w1 * w3 + 2 * w4;
        let b6 = w3 * w3 + 4 * w6;
        let b8 = w1 * w1 * w6 + 4 * w2 * w6 - w1 * w3 * w4 + w2 * w3 * w3 - w4 * w4;
        let c4 = b2 * b2 - 24 * b4;
        let c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6;
        let disc = -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
        // Standard identities tie the invariants together; they double as a
        // self-check of the formulas.
        assert_eq!(4 * b8, b2 * b6 - b4 * b4);
        assert_eq!(c4 * c4 * c4 - c6 * c6, 1728 * disc);
        if disc == 0 {
            return Err(Error::BadInput(
                "singular curve: the discriminant vanishes".into(),
            ));
        }
        Ok(WeierstrassCurve {
            a1,
            a2,
            a3,
            a4,
            a6,
            b2,
            b4,
            b6,
            b8,
            c4,
            c6,
            disc,
        })
    }

    pub fn discriminant(&self) -> i128 {
        self.disc
    }

    pub fn c4(&self) -> i128 {
        self.c4
    }

    pub fn c6(&self) -> i128 {
        self.c6
    }

    pub fn b_invariants(&self) -> (i128, i128, i128, i128) {
        (self.b2, self.b4, self.b6, self.b8)
    }

    /// Reduction type at a prime `p >= 5`.
    pub fn reduction_at(&self, p: u64) -> Result<Reduction> {
        if p < 5 {
            return Err(Error::SmallCharacteristic(p));
        }
        let pl = p as i128;
        if self.disc.rem_euclid(pl) != 0 {
            return Ok(Reduction::Good);
        }
        if self.c4.rem_euclid(pl) == 0 {
            return Ok(Reduction::Additive);
        }
        // Multiplicative: split exactly when -c6 is a nonzero square mod p.
        let r = (-self.c6).rem_euclid(pl) as u64;
        Ok(Reduction::Multiplicative {
            split: is_quadratic_residue(r, p),
        })
    }
}

/// Is `r` a nonzero square modulo the odd prime `p`?
fn is_quadratic_residue(r: u64, p: u64) -> bool {
    if r == 0 {
        return false;
    }
    // Euler criterion.
    modpow_u64(r, (p - 1) / 2, p) == 1
}

fn modpow_u64(mut b: u64, mut k: u64, p: u64) -> u64 {
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

/// Exact point counts `|E(F_{q^n})|` (projective, including the point at
/// infinity) for `n = 1..=depth`.
///
/// Requires `p >= 5` (`SmallCharacteristic`) and good reduction at `p`
/// (`BadReduction`). The count per field completes the square and walks the
/// `x`-line once, scoring `1 + chi(w(x))` solutions against a precomputed
/// table of nonzero squares — linear in the field size, which keeps
/// degree-6 towers inside the enumeration cap's time envelope.
pub fn elliptic_counts(e: &WeierstrassCurve, f: &FieldHandle, depth: u32) -> Result<Vec<u64>> {
    let p = f.p();
    if p < 5 {
        return Err(Error::SmallCharacteristic(p));
    }
    if e.disc.rem_euclid(p as i128) == 0 {
        return Err(Error::BadReduction(p));
    }
    let mut out = Vec::with_capacity(depth as usize);
    for n in 1..=depth {
        let g = make_field_with_cap(f.p(), f.e() * n, f.cap())?;
        out.push(count_curve_points(e, &g)?);
    }
    Ok(out)
}

fn count_curve_points(e: &WeierstrassCurve, g: &FieldHandle) -> Result<u64> {
    let q = g.q();
    // Substituting y -> (y - a1 x - a3)/2 turns the curve into
    // y^2 = 4x^3 + b2 x^2 + 2 b4 x + b6, a bijection on affine points.
    let c3 = g.scalar(4);
    let c2 = g.scalar_i128(e.b2);
    let c1 = g.scalar_i128(2 * e.b4);
    let c0 = g.scalar_i128(e.b6);
    // Nonzero squares, marked by element index.
    let mut is_square = vec![false; q as usize];
    for z in g.elements().skip(1) {
        let zz = z.mul(&z).expect("same field");
        is_square[zz.index() as usize] = true;
    }
    let mut affine: i128 = 0;
    for x in g.elements() {
        // w = ((4x + b2) x + 2 b4) x + b6, Horner.
        let mut w = c3.mul(&x).expect("same field");
        w = w.add(&c2).expect("same field");
        w = w.mul(&x).expect("same field");
        w = w.add(&c1).expect("same field");
        w = w.mul(&x).expect("same field");
        w = w.add(&c0).expect("same field");
        if w.is_zero() {
            affine += 1;
        } else if is_square[w.index() as usize] {
            affine += 2;
        }
    }
    Ok(u64::try_from(affine + 1).expect("point count is positive"))
}

/// Outcome of a Kummer twist comparison over one field.
#[derive(Clone, Debug)]
pub struct KummerReport {
    /// `|U_j|` for `j = 0..n`: points of `x^n = delta^j * g(y)`, `g(y) != 0`.
    pub twisted_counts: Vec<u64>,
    /// `|V|`: base points with `g(y) != 0`.
    pub base_count: u64,
    /// Whether `sum_j |U_j| = n * |V|` holds exactly.
    pub identity_holds: bool,
}

/// Count the Kummer family `x^n = delta^j * g(y)` (with `g(y) != 0`) for
/// every twist `j = 0..n`, where `delta` is the least multiplicative
/// generator, and check the exact torsor identity `sum_j |U_j| = n * |V|`.
///
/// `g` is a univariate integer polynomial, ascending coefficients. Errors
/// with `NotTorsor` unless `n` divides `q - 1`.
pub fn kummer_twist_check(g_coeffs: &[i64], n: u64, f: &FieldHandle) -> Result<KummerReport> {
    let q = f.q();
    if n == 0 || (q - 1) % n != 0 {
        return Err(Error::NotTorsor { n, qm1: q - 1 });
    }
    let delta = f.multiplicative_generator();
    // Table: how many x satisfy x^n = v, indexed by v.
    let mut nth_power_count = vec![0u64; q as usize];
    for x in f.elements() {
        let v = x.pow(n);
        nth_power_count[v.index() as usize] += 1;
    }
    // g evaluated at every y once.
    let coeffs: Vec<FieldElement> = g_coeffs.iter().map(|&c| f.scalar_i128(c as i128)).collect();
    let mut gvals = Vec::with_capacity(q as usize);
    for y in f.elements() {
        let mut acc = f.zero();
        for c in coeffs.iter().rev() {
            acc = acc.mul(&y).expect("same field");
            acc = acc.add(c).expect("same field");
        }
        gvals.push(acc);
    }
    let base_count = gvals.iter().filter(|v| !v.is_zero()).count() as u64;
    let mut twisted_counts = Vec::with_capacity(n as usize);
    let mut scale = f.one();
    for _ in 0..n {
        // U_j: pairs (x, y) with x^n = delta^j * g(y), g(y) != 0.
        let mut u = 0u64;
        for v in &gvals {
            if v.is_zero() {
                continue;
            }
            let target = scale.mul(v).expect("same field");
            u += nth_power_count[target.index() as usize];
        }
        twisted_counts.push(u);
        scale = scale.mul(&delta).expect("same field");
    }
    let total: u64 = twisted_counts.iter().sum();
    let identity_holds = total == n * base_count;
    Ok(KummerReport {
        twisted_counts,
        base_count,
        identity_holds,
    })
}
