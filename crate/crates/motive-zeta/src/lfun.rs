//! Places, local factors, and local-to-global assembly.
//!
//! A *place* carries a norm `N(v)`, a degree, and a local factor: a
//! rational function of `u = N(v)^(-s)` with value 1 at `u = 0`. Two
//! local dictionaries are implemented on top of this:
//!
//! * the **total** local factor of a good place,
//!   `zeta_v(u) / zeta_v(u/qv)`, see [`ltot_from_good_model`]; and
//! * the **nearby** local factor, recovered from a total factor by the
//!   q-orbit solver [`solve_local_near`], the unique rational `S` with
//!   `S(u)/S(u/qv) = R(u)` when one exists.
//!
//! Global assembly produces Dirichlet series over number-field-like bases
//! ([`elliptic_global_lnear`], [`completed_xi`]) and rational functions of
//! `u = q^(-s)` over rational function-field bases ([`assemble_ff`],
//! [`verify_ff_functional_equation`]). Archimedean places contribute
//! gamma factors built from Hodge-number data ([`gamma_factor`],
//! [`evaluate_gamma`]).

use crate::arith;
use crate::dirichlet::DirichletSeries;
use crate::error::{Error, Result};
use crate::field::make_field;
use crate::jsonq;
use crate::motive::{inverse_roots, reduce_atoms};
use crate::poly::PolyQ;
use crate::ratfunc::{LaurentQ, RatFuncQ};
use crate::series::{rational_fit, PowerSeriesQ};
use crate::variety::{count_points, elliptic_counts, Reduction, VarietySpec, WeierstrassCurve};
use num::{BigRational, One, ToPrimitive, Zero};
use serde_json::Value;
use std::collections::BTreeMap;

/// Reduction-type tag attached to a place record.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlaceTag {
    Good,
    MultiplicativeSplit,
    MultiplicativeNonsplit,
    Other,
}

impl PlaceTag {
    pub fn as_str(self) -> &'static str {
        match self {
            PlaceTag::Good => "good",
            PlaceTag::MultiplicativeSplit => "multiplicative_split",
            PlaceTag::MultiplicativeNonsplit => "multiplicative_nonsplit",
            PlaceTag::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Result<PlaceTag> {
        match s {
            "good" => Ok(PlaceTag::Good),
            "multiplicative_split" => Ok(PlaceTag::MultiplicativeSplit),
            "multiplicative_nonsplit" => Ok(PlaceTag::MultiplicativeNonsplit),
            "other" => Ok(PlaceTag::Other),
            _ => Err(Error::BadInput(format!("unknown place tag `{s}`"))),
        }
    }
}

/// Per-place record: norm, degree, local factor in `u = N(v)^(-s)`, a
/// reduction tag, and the provenance of the factor (`"counted"` when it
/// came from point enumeration, `"declared"` when supplied or derived
/// from invariants, `"skipped"` for places excluded from a product).
#[derive(Clone, Debug, PartialEq)]
pub struct PlaceLocalData {
    pub norm: u64,
    pub degree: u32,
    pub local_factor: RatFuncQ,
    pub tag: PlaceTag,
    pub provenance: &'static str,
}

impl PlaceLocalData {
    pub fn to_json(&self) -> Value {
        let mut m = serde_json::Map::new();
        m.insert("norm".into(), Value::from(self.norm));
        m.insert("degree".into(), Value::from(self.degree));
        m.insert(
            "num".into(),
            jsonq::coeffs_to_json(self.local_factor.num().coeffs()),
        );
        m.insert(
            "den".into(),
            jsonq::coeffs_to_json(self.local_factor.den().coeffs()),
        );
        m.insert("tag".into(), Value::from(self.tag.as_str()));
        m.insert("provenance".into(), Value::from(self.provenance));
        Value::Object(m)
    }

    pub fn from_json(v: &Value) -> Result<PlaceLocalData> {
        let norm = jsonq::get_u64(v, "norm")?;
        let degree = jsonq::get_u64(v, "degree")? as u32;
        let num = PolyQ::new(jsonq::coeffs_from_json(jsonq::get(v, "num")?)?);
        let den = PolyQ::new(jsonq::coeffs_from_json(jsonq::get(v, "den")?)?);
        let tag = match v.get("tag") {
            Some(Value::String(s)) => PlaceTag::parse(s)?,
            _ => PlaceTag::Other,
        };
        Ok(PlaceLocalData {
            norm,
            degree,
            local_factor: RatFuncQ::new(num, den)?,
            tag,
            provenance: "declared",
        })
    }
}

/// Total local factor of a good place: `zeta_v(u) / zeta_v(u/qv)` as a
/// reduced rational function.
pub fn ltot_from_good_model(zeta_v: &RatFuncQ, qv: u64) -> RatFuncQ {
    let inv_q = BigRational::new(1.into(), (qv as i64).into());
    zeta_v.div(&zeta_v.scale_input(&inv_q))
}

/// Nearby local factor of a good place: the local zeta itself. Provided
/// as a named operation so pipelines are explicit; it inverts
/// [`ltot_from_good_model`] through [`solve_local_near`].
pub fn lnear_good_reduction(zeta_v: &RatFuncQ, _qv: u64) -> RatFuncQ {
    zeta_v.clone()
}

/// Rescale inverse roots by `qv^k`: `f(u) -> f(qv^k u)`. Constant terms
/// stay 1, so no renormalization is needed.
fn rho_up(f: &PolyQ, qv: u64, k: i64) -> PolyQ {
    let factor = BigRational::from_integer((qv as i64).into())
        .pow(i32::try_from(k).expect("orbit shift fits i32"));
    f.scale_input(&factor)
}

/// Crude magnitude window for the inverse roots of a constant-term-1
/// polynomial, from Cauchy bounds on the reversal and on the monic
/// normalization. Returns `(lower, upper)` with `0 < lower <= upper`.
fn inverse_root_window(f: &PolyQ) -> (f64, f64) {
    let d = f.degree().expect("window of a nonconstant polynomial");
    let rev = f.reversed();
    let lead = rev.leading().unwrap().to_f64().unwrap_or(1.0).abs();
    let mut upper = 0.0f64;
    let mut lower_inv = 0.0f64;
    for i in 0..d {
        let c = rev.coeff(i).to_f64().unwrap_or(0.0).abs();
        upper = upper.max(c / lead.max(f64::MIN_POSITIVE));
        // Roots of f itself are the reciprocals 1/gamma; bound them by the
        // coefficients of f normalized by its leading coefficient.
        let flead = f
            .leading()
            .unwrap()
            .to_f64()
            .unwrap_or(1.0)
            .abs()
            .max(f64::MIN_POSITIVE);
        lower_inv = lower_inv.max(f.coeff(i).to_f64().unwrap_or(0.0).abs() / flead);
    }
    let upper = 1.0 + upper;
    let lower = 1.0 / (1.0 + lower_inv);
    (lower, upper)
}

/// Solve `S(u) / S(u/qv) = R(u)` for a rational `S` with `S(0) = 1`.
///
/// The factored form of `R` is refined until every atom meets every
/// `qv^k`-rescaling of every atom either trivially or fully; the refined
/// atoms then group into rescaling orbits, each carrying a finitely
/// supported exponent function `r`. On one orbit the equation reads
/// `s(f) - s(rescale(f)) = r(f)`, so `s` is the chain of suffix sums of
/// `r` toward the rescaled end; a finitely supported solution exists iff
/// every orbit's exponents sum to zero, and it is unique. The assembled
/// `S` is verified against the defining equation exactly before being
/// returned.
pub fn solve_local_near(r: &RatFuncQ, qv: u64) -> Result<RatFuncQ> {
    assert!(qv >= 2, "rescaling base must be at least 2");
    if r.is_one() {
        return Ok(RatFuncQ::one());
    }
    // Exponent convention: numerator positive, so R = prod f^e(f).
    let atoms = reduce_atoms(vec![(r.num().clone(), 1), (r.den().clone(), -1)])?;
    let mut items: Vec<(PolyQ, i64)> = atoms.into_iter().map(|a| (a.poly, a.mult)).collect();

    // Window all inverse-root magnitudes to bound the rescaling shifts
    // that could ever align two atoms.
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (f, _) in &items {
        let (l, h) = inverse_root_window(f);
        lo = lo.min(l);
        hi = hi.max(h);
    }
    let shift_cap = ((hi / lo).ln() / (qv as f64).ln()).ceil() as i64 + 2;

    // Refine: split atoms until every rescaled overlap is all-or-nothing.
    'refine: loop {
        // Merge exact duplicates and drop exponent zero.
        items.sort_by(|a, b| a.0.cmp_key(&b.0));
        items.dedup_by(|later, first| {
            if first.0 == later.0 {
                first.1 += later.1;
                true
            } else {
                false
            }
        });
        items.retain(|(f, e)| *e != 0 && f.degree().unwrap_or(0) > 0);
        let n = items.len();
        for i in 0..n {
            for j in 0..n {
                for k in 1..=shift_cap {
                    let shifted = rho_up(&items[i].0, qv, k);
                    let g = shifted.gcd(&items[j].0);
                    if g.degree().unwrap_or(0) == 0 {
                        continue;
                    }
                    let g = g.normalized_const_one()?;
                    let di = items[i].0.degree().unwrap();
                    let dj = items[j].0.degree().unwrap();
                    let dg = g.degree().unwrap();
                    if i == j {
                        // Self-overlap under rescaling: split f along the
                        // common part (g divides f directly as well).
                        let (f, e) = items[i].clone();
                        let rest = f.exact_div(&g)?.normalized_const_one()?;
                        items[i] = (g, e);
                        items.push((rest, e));
                        continue 'refine;
                    }
                    if dg == di && dg == dj {
                        continue; // full match: an orbit relation, keep whole
                    }
                    if dg < dj {
                        let (f, e) = items[j].clone();
                        let rest = f.exact_div(&g)?.normalized_const_one()?;
                        items[j] = (g, e);
                        items.push((rest, e));
                        continue 'refine;
                    }
                    // g equals atom j; the proper part sits in atom i.
                    let gi = rho_up(&g, qv, -k);
                    let (f, e) = items[i].clone();
                    let rest = f.exact_div(&gi)?.normalized_const_one()?;
                    items[i] = (gi, e);
                    items.push((rest, e));
                    continue 'refine;
                }
            }
        }
        break;
    }

    // Group atoms into rescaling orbits. Two atoms of equal degree d lie
    // in one orbit iff their leading coefficients differ by exactly
    // qv^(k*d) and the rescaling by qv^k matches exactly.
    let mut used = vec![false; items.len()];
    let mut solution: Vec<(PolyQ, i64)> = Vec::new();
    for i in 0..items.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut orbit: BTreeMap<i64, i64> = BTreeMap::new();
        orbit.insert(0, items[i].1);
        let d = items[i].0.degree().unwrap();
        let lead_i = items[i].0.leading().unwrap().clone();
        for j in (i + 1)..items.len() {
            if used[j] || items[j].0.degree().unwrap() != d {
                continue;
            }
            let ratio = items[j].0.leading().unwrap() / &lead_i;
            let Some(kd) = exact_power_exponent(&ratio, qv) else {
                continue;
            };
            if kd.rem_euclid(d as i64) != 0 {
                continue;
            }
            let k = kd / d as i64;
            if rho_up(&items[i].0, qv, k) == items[j].0 {
                used[j] = true;
                *orbit.entry(k).or_insert(0) += items[j].1;
            }
        }
        let total: i64 = orbit.values().sum();
        if total != 0 {
            return Err(Error::NotSolvable(format!(
                "the rescaling orbit of {} carries exponent sum {}, so no finite chain of suffix sums closes it",
                items[i].0, total
            )));
        }
        // Suffix sums from the rescaled end downward: s(k) = sum of
        // exponents at positions >= k. Nonzero only strictly above the
        // lowest position, since the orbit total vanishes.
        let kmin = *orbit.keys().next().unwrap();
        let kmax = *orbit.keys().last().unwrap();
        let mut suffix = 0i64;
        for k in ((kmin + 1)..=kmax).rev() {
            suffix += orbit.get(&k).copied().unwrap_or(0);
            if suffix != 0 {
                solution.push((rho_up(&items[i].0, qv, k), suffix));
            }
        }
    }

    let mut num = PolyQ::one();
    let mut den = PolyQ::one();
    for (f, e) in solution {
        let pw = f.pow(e.unsigned_abs() as usize);
        if e > 0 {
            num = &num * &pw;
        } else {
            den = &den * &pw;
        }
    }
    let s = RatFuncQ::new(num, den)?;
    let inv_q = BigRational::new(1.into(), (qv as i64).into());
    let check = s.div(&s.scale_input(&inv_q));
    assert!(
        check == *r,
        "orbit solution failed its defining equation; this is a bug"
    );
    Ok(s)
}

/// If `ratio = qv^k` for an integer `k` (possibly negative), return `k`.
fn exact_power_exponent(ratio: &BigRational, qv: u64) -> Option<i64> {
    if ratio <= &BigRational::zero() {
        return None;
    }
    let base = BigRational::from_integer((qv as i64).into());
    let one = BigRational::one();
    let mut k = 0i64;
    let mut r = ratio.clone();
    while r > one {
        r /= &base;
        k += 1;
        if k > 4096 {
            return None;
        }
    }
    while r < one {
        r *= &base;
        k -= 1;
        if k < -4096 {
            return None;
        }
    }
    if r == one {
        Some(k)
    } else {
        None
    }
}

/// Reduction ledger and Dirichlet expansion for the degree-one part of an
/// elliptic curve over the rationals, scanned over primes `p <= bound`.
///
/// Good places contribute `(1 - a_p u + p u^2)^(-1)` with
/// `a_p = p + 1 - |E(F_p)|` from point enumeration; multiplicative places
/// contribute `((1-u)(1-pu))^(-1)` when the reduced curve's node has
/// rational tangents (`-c6` a nonzero square mod `p`) and
/// `((1+u)(1+pu))^(-1)` otherwise. The primes 2 and 3 are excluded from
/// the product and recorded in the ledger as skipped. Additive reduction
/// anywhere in range is an error: no local factor is guessed for it.
pub fn elliptic_global_lnear(
    e: &WeierstrassCurve,
    bound: u64,
    cutoff: usize,
) -> Result<(DirichletSeries, Vec<PlaceLocalData>)> {
    let mut ledger: Vec<PlaceLocalData> = Vec::new();
    for p in arith::primes_between(2, bound) {
        if p < 5 {
            ledger.push(PlaceLocalData {
                norm: p,
                degree: 1,
                local_factor: RatFuncQ::one(),
                tag: PlaceTag::Other,
                provenance: "skipped",
            });
            continue;
        }
        let (factor, tag, provenance) = match e.reduction_at(p)? {
            Reduction::Good => {
                let f = make_field(p, 1)?;
                let count = elliptic_counts(e, &f, 1)?[0];
                let ap = p as i64 + 1 - count as i64;
                let den = PolyQ::new(vec![
                    BigRational::one(),
                    BigRational::from_integer((-ap).into()),
                    BigRational::from_integer((p as i64).into()),
                ]);
                (RatFuncQ::from_den(den)?, PlaceTag::Good, "counted")
            }
            Reduction::Multiplicative { split } => {
                let sign = if split { -1 } else { 1 };
                let den = &PolyQ::from_i64(&[1, sign])
                    * &PolyQ::new(vec![
                        BigRational::one(),
                        BigRational::from_integer((sign * p as i64).into()),
                    ]);
                let tag = if split {
                    PlaceTag::MultiplicativeSplit
                } else {
                    PlaceTag::MultiplicativeNonsplit
                };
                (RatFuncQ::from_den(den)?, tag, "declared")
            }
            Reduction::Additive => return Err(Error::AdditiveReduction(p)),
        };
        ledger.push(PlaceLocalData {
            norm: p,
            degree: 1,
            local_factor: factor,
            tag,
            provenance,
        });
    }
    let series = DirichletSeries::euler_product(
        ledger
            .iter()
            .filter(|pl| pl.provenance != "skipped")
            .map(|pl| (pl.norm, &pl.local_factor)),
        cutoff,
    )?;
    Ok((series, ledger))
}

/// Archimedean gamma-factor building blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GammaKind {
    /// `pi^(-s/2) * Gamma(s/2)`.
    R,
    /// `2 * (2 pi)^(-s) * Gamma(s)`.
    C,
}

/// One factor `Gamma_kind(s - shift)^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GammaTerm {
    pub kind: GammaKind,
    pub shift: i64,
    pub exponent: u64,
}

/// A finite product of gamma terms. Multiplication concatenates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GammaDescriptor {
    pub terms: Vec<GammaTerm>,
}

impl GammaDescriptor {
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|t| {
                    let mut m = serde_json::Map::new();
                    m.insert(
                        "kind".into(),
                        Value::from(match t.kind {
                            GammaKind::R => "R",
                            GammaKind::C => "C",
                        }),
                    );
                    m.insert("shift".into(), Value::from(t.shift));
                    m.insert("exp".into(), Value::from(t.exponent));
                    Value::Object(m)
                })
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<GammaDescriptor> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::BadInput("gamma descriptor must be a list of terms".into()))?;
        let mut terms = Vec::with_capacity(arr.len());
        for t in arr {
            let kind = match t.get("kind").and_then(|k| k.as_str()) {
                Some("R") => GammaKind::R,
                Some("C") => GammaKind::C,
                _ => return Err(Error::BadInput("gamma term kind must be R or C".into())),
            };
            terms.push(GammaTerm {
                kind,
                shift: jsonq::get_i64(t, "shift")?,
                exponent: jsonq::get_u64(t, "exp")?,
            });
        }
        Ok(GammaDescriptor { terms })
    }
}

/// Hodge-number input for [`gamma_factor`].
#[derive(Clone, Debug)]
pub enum HodgeData {
    /// `h(p, q)` multiplicities of a complex Hodge structure, listed as
    /// `(p, q, multiplicity)`.
    Complex { h: Vec<(i64, i64, u64)> },
    /// Real Hodge data: off-diagonal `h(p, q)` for `p < q` (each pair
    /// listed once) plus diagonal `(n, h(n,+), h(n,-))`.
    Real {
        pairs: Vec<(i64, i64, u64)>,
        diagonal: Vec<(i64, u64, u64)>,
    },
}

/// Gamma factor of a Hodge structure.
///
/// Complex case: each `h(p, q)` contributes
/// `Gamma_C(s - min(p, q))^h`. Real case: each off-diagonal pair
/// `p < q` contributes `Gamma_C(s - p)^h`, and each diagonal level `n`
/// contributes `Gamma_R(s - n)^h(n,+) * Gamma_R(s - n + 1)^h(n,-)`.
pub fn gamma_factor(hodge: &HodgeData) -> Result<GammaDescriptor> {
    let mut terms = Vec::new();
    match hodge {
        HodgeData::Complex { h } => {
            for &(p, q, mult) in h {
                if mult == 0 {
                    continue;
                }
                terms.push(GammaTerm {
                    kind: GammaKind::C,
                    shift: p.min(q),
                    exponent: mult,
                });
            }
        }
        HodgeData::Real { pairs, diagonal } => {
            for &(p, q, mult) in pairs {
                if mult == 0 {
                    continue;
                }
                if p >= q {
                    return Err(Error::BadInput(format!(
                        "off-diagonal pair needs p < q, got ({p}, {q}); diagonal levels go in the diagonal list"
                    )));
                }
                terms.push(GammaTerm {
                    kind: GammaKind::C,
                    shift: p,
                    exponent: mult,
                });
            }
            for &(n, plus, minus) in diagonal {
                if plus > 0 {
                    terms.push(GammaTerm {
                        kind: GammaKind::R,
                        shift: n,
                        exponent: plus,
                    });
                }
                if minus > 0 {
                    terms.push(GammaTerm {
                        kind: GammaKind::R,
                        shift: n - 1,
                        exponent: minus,
                    });
                }
            }
        }
    }
    Ok(GammaDescriptor { terms })
}

const POLE_EPS: f64 = 1e-9;

fn is_nonpositive_integer(x: f64) -> bool {
    x < POLE_EPS && (x - x.round()).abs() < POLE_EPS
}

/// Numeric value of a gamma descriptor at real `s`.
pub fn evaluate_gamma(d: &GammaDescriptor, s: f64) -> Result<f64> {
    use statrs::function::gamma::gamma;
    let mut acc = 1.0f64;
    for t in &d.terms {
        let x = s - t.shift as f64;
        let value = match t.kind {
            GammaKind::R => {
                if is_nonpositive_integer(x / 2.0) {
                    return Err(Error::PoleHit {
                        kind: "gamma_R",
                        arg: x,
                    });
                }
                std::f64::consts::PI.powf(-x / 2.0) * gamma(x / 2.0)
            }
            GammaKind::C => {
                if is_nonpositive_integer(x) {
                    return Err(Error::PoleHit {
                        kind: "gamma_C",
                        arg: x,
                    });
                }
                2.0 * (2.0 * std::f64::consts::PI).powf(-x) * gamma(x)
            }
        };
        acc *= value.powi(t.exponent as i32);
    }
    Ok(acc)
}

/// Base of a global model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseField {
    Q,
    FqT { q: u64 },
}

/// A global object presented by its local data: base, finite places,
/// archimedean gamma descriptors, the Euler-characteristic datum entering
/// completed products and the char-p functional equation, and the
/// absolute discriminant (number-field case).
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalModel {
    pub base: BaseField,
    pub places: Vec<PlaceLocalData>,
    pub gamma: Vec<GammaDescriptor>,
    pub chi: i64,
    pub disc: u64,
}

impl GlobalModel {
    pub fn to_json(&self) -> Value {
        let mut base = serde_json::Map::new();
        match self.base {
            BaseField::Q => {
                base.insert("kind".into(), Value::from("Q"));
            }
            BaseField::FqT { q } => {
                base.insert("kind".into(), Value::from("Fq_t"));
                base.insert("q".into(), Value::from(q));
            }
        }
        let mut m = serde_json::Map::new();
        m.insert("base".into(), Value::Object(base));
        m.insert(
            "places".into(),
            Value::Array(self.places.iter().map(|p| p.to_json()).collect()),
        );
        m.insert(
            "gamma".into(),
            Value::Array(self.gamma.iter().map(|g| g.to_json()).collect()),
        );
        m.insert("chi".into(), Value::from(self.chi));
        m.insert("disc".into(), Value::from(self.disc));
        Value::Object(m)
    }

    pub fn from_json(v: &Value) -> Result<GlobalModel> {
        let base_v = jsonq::get(v, "base")?;
        let base = match base_v.get("kind").and_then(|k| k.as_str()) {
            Some("Q") => BaseField::Q,
            Some("Fq_t") => BaseField::FqT {
                q: jsonq::get_u64(base_v, "q")?,
            },
            _ => return Err(Error::BadInput("base kind must be Q or Fq_t".into())),
        };
        let places_v = jsonq::get(v, "places")?
            .as_array()
            .ok_or_else(|| Error::BadInput("`places` must be a list".into()))?;
        let places = places_v
            .iter()
            .map(PlaceLocalData::from_json)
            .collect::<Result<Vec<_>>>()?;
        let gamma = match v.get("gamma") {
            Some(Value::Array(gs)) => gs
                .iter()
                .map(GammaDescriptor::from_json)
                .collect::<Result<Vec<_>>>()?,
            Some(Value::Null) | None => Vec::new(),
            Some(_) => return Err(Error::BadInput("`gamma` must be a list".into())),
        };
        let chi = match v.get("chi") {
            Some(_) => jsonq::get_i64(v, "chi")?,
            None => 0,
        };
        let disc = match v.get("disc") {
            Some(_) => jsonq::get_u64(v, "disc")?,
            None => 1,
        };
        Ok(GlobalModel {
            base,
            places,
            gamma,
            chi,
            disc,
        })
    }

    /// The Dirichlet series of the model's finite places through `cutoff`.
    pub fn dirichlet_series(&self, cutoff: usize) -> Result<DirichletSeries> {
        DirichletSeries::euler_product(
            self.places
                .iter()
                .filter(|p| p.provenance != "skipped")
                .map(|p| (p.norm, &p.local_factor)),
            cutoff,
        )
    }

    /// Largest weight suggested by the local inverse roots: for each
    /// place, each inverse root `gamma` of the local factor sits near
    /// `N(v)^(w/2)`; the maximum rounded `w` over all roots. Zero when no
    /// place has roots.
    pub fn max_weight_estimate(&self) -> i64 {
        let mut w = 0i64;
        for p in &self.places {
            if p.provenance == "skipped" || p.norm < 2 {
                continue;
            }
            let ln_n = (p.norm as f64).ln();
            for poly in [p.local_factor.num(), p.local_factor.den()] {
                if poly.degree().unwrap_or(0) == 0 {
                    continue;
                }
                for g in inverse_roots(poly) {
                    let m = g.norm();
                    if m > 0.0 {
                        w = w.max((2.0 * m.ln() / ln_n).round() as i64);
                    }
                }
            }
        }
        w
    }
}

/// Result of a completed-product evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct XiValue {
    pub value: f64,
    /// Set when `s` is at or below the absolute-convergence bound
    /// estimated from the local weights; the value is then a formal
    /// truncation, not an approximation of a convergent product.
    pub out_of_region: bool,
    /// Tail-size estimate of the Dirichlet partial sum when available.
    pub tail: Option<f64>,
}

/// Completed product `|disc|^(s*chi/2) * prod gamma * L(s)` where `L` is
/// the truncated Dirichlet evaluation of the model's finite places.
/// Number-field base only.
pub fn completed_xi(model: &GlobalModel, s: f64, cutoff: usize) -> Result<XiValue> {
    if model.base != BaseField::Q {
        return Err(Error::BadInput(
            "completed products are defined over the number-field base".into(),
        ));
    }
    let series = model.dirichlet_series(cutoff)?;
    let (lvalue, tail) = series.evaluate(s);
    let mut value = (model.disc as f64).powf(s * model.chi as f64 / 2.0) * lvalue;
    for g in &model.gamma {
        value *= evaluate_gamma(g, s)?;
    }
    let bound = model.max_weight_estimate() as f64 / 2.0 + 1.0;
    Ok(XiValue {
        value,
        out_of_region: s <= bound,
        tail,
    })
}

/// All places of the rational function field over `F_q` of degree at most
/// `depth`, each carrying the unit local factor `1/(1-u)`: the finite
/// places are the monic irreducibles (counted by the necklace formula)
/// and the place at infinity has degree 1.
pub fn unit_motive_places(q: u64, depth: usize) -> Result<Vec<PlaceLocalData>> {
    let factor = RatFuncQ::from_den(PolyQ::from_i64(&[1, -1]))?;
    let mut out = Vec::new();
    for d in 1..=depth {
        let mut count = arith::necklace_count(q, d as u64)?;
        if d == 1 {
            count += 1;
        }
        let norm = arith::checked_pow_u128(q as u128, d as u32)
            .and_then(|n| u64::try_from(n).ok())
            .ok_or(Error::TooLarge {
                size: u128::MAX,
                cap: u64::MAX,
            })?;
        for _ in 0..count {
            out.push(PlaceLocalData {
                norm,
                degree: d as u32,
                local_factor: factor.clone(),
                tag: PlaceTag::Good,
                provenance: "declared",
            });
        }
    }
    Ok(out)
}

/// Assemble a global rational function over `F_q(t)` from local place
/// data: a place of degree `d` contributes its factor evaluated at
/// `u^d`. The census of supplied places is checked against the necklace
/// count (plus the degree-1 place at infinity) for every degree up to
/// `depth`; the product is expanded through `u^depth` and fit to a
/// rational function of the given numerator/denominator degree bounds,
/// verified against every expanded coefficient.
pub fn assemble_ff(
    places: &[PlaceLocalData],
    q: u64,
    depth: usize,
    dnum: usize,
    dden: usize,
) -> Result<RatFuncQ> {
    for d in 1..=depth {
        let mut expected = arith::necklace_count(q, d as u64)?;
        if d == 1 {
            expected += 1;
        }
        let got = places.iter().filter(|p| p.degree as usize == d).count() as u64;
        if got < expected {
            return Err(Error::MissingPlaces {
                degree: d,
                expected,
                got,
            });
        }
    }
    let mut acc = PowerSeriesQ::one(depth);
    for p in places {
        let d = p.degree as usize;
        if d == 0 || d > depth {
            continue;
        }
        let local = PowerSeriesQ::from_ratfunc(&p.local_factor, depth / d);
        acc = acc.mul(&local.pow_input(d, depth));
    }
    rational_fit(&acc, dnum, dden)
}

/// Functional-equation check over `F_q(t)`: substitute `u -> 1/(q u)`
/// (i.e. `s -> 1 - s`) into the dual's function, divide by the original,
/// and require the quotient to be a monomial `c * u^B`; returns `(c, B)`.
pub fn verify_ff_functional_equation(
    l: &RatFuncQ,
    l_dual: &RatFuncQ,
    q: u64,
) -> Result<(BigRational, i64)> {
    let qs = BigRational::from_integer((q as i64).into());
    let lhs = LaurentQ::from_ratfunc(l_dual).subst_inv_scaled(&qs);
    let quotient = lhs.div(&LaurentQ::from_ratfunc(l));
    quotient
        .as_monomial()
        .ok_or_else(|| Error::NotMonomialRatio(format!("{quotient}")))
}

/// Report of a prime-by-prime count comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityReport {
    pub differing: u64,
    pub total: u64,
    pub fraction: BigRational,
    pub bound: BigRational,
}

/// Scan primes `5 <= p <= bound` and report the fraction at which the two
/// varieties have different point counts, together with the lower bound
/// `1 / betti^2` against which the fraction is compared. An empirical
/// comparison, not a proof.
pub fn density_scan(
    v1: &VarietySpec,
    v2: &VarietySpec,
    bound: u64,
    betti: u64,
) -> Result<DensityReport> {
    if betti == 0 {
        return Err(Error::BadInput("the Betti datum must be positive".into()));
    }
    let primes = arith::primes_between(5, bound);
    if primes.is_empty() {
        return Err(Error::BadInput(format!("no primes in 5..={bound} to scan")));
    }
    let mut differing = 0u64;
    for p in &primes {
        let f = make_field(*p, 1)?;
        if count_points(v1, &f)? != count_points(v2, &f)? {
            differing += 1;
        }
    }
    let total = primes.len() as u64;
    Ok(DensityReport {
        differing,
        total,
        fraction: BigRational::new((differing as i64).into(), (total as i64).into()),
        bound: BigRational::new(1.into(), ((betti * betti) as i64).into()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::bigint::BigInt;

    fn p(cs: &[i64]) -> PolyQ {
        PolyQ::from_i64(cs)
    }

    fn qr(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn rf(num: &[i64], den: &[i64]) -> RatFuncQ {
        RatFuncQ::new(p(num), p(den)).unwrap()
    }

    #[test]
    fn ltot_of_point_zeta() {
        // 1/(1-u) at qv = 5 -> (1 - u/5)/(1 - u).
        let z = rf(&[1], &[1, -1]);
        let l = ltot_from_good_model(&z, 5);
        assert_eq!(l.num(), &PolyQ::new(vec![BigRational::one(), qr(-1, 5)]));
        assert_eq!(l.den(), &p(&[1, -1]));
        // The unit function maps to itself.
        assert!(ltot_from_good_model(&RatFuncQ::one(), 5).is_one());
    }

    #[test]
    fn solver_recovers_point_pair() {
        // (1 - u/5)/(1 - 5u) -> 1/((1-u)(1-5u)).
        let r =
            RatFuncQ::new(PolyQ::new(vec![BigRational::one(), qr(-1, 5)]), p(&[1, -5])).unwrap();
        let s = solve_local_near(&r, 5).unwrap();
        assert_eq!(s, rf(&[1], &[1, -6, 5]));
        // Same shape at q = 2.
        let r2 =
            RatFuncQ::new(PolyQ::new(vec![BigRational::one(), qr(-1, 2)]), p(&[1, -2])).unwrap();
        assert_eq!(solve_local_near(&r2, 2).unwrap(), rf(&[1], &[1, -3, 2]));
    }

    #[test]
    fn solver_unit_and_counterexample() {
        assert!(solve_local_near(&RatFuncQ::one(), 3).unwrap().is_one());
        let bad = rf(&[1], &[1, -1]);
        assert!(matches!(
            solve_local_near(&bad, 2),
            Err(Error::NotSolvable(_))
        ));
    }

    #[test]
    fn solver_round_trips_good_models() {
        // point, projective line, and an elliptic numerator over F_7.
        let cases = [
            (rf(&[1], &[1, -1]), 7u64),
            (rf(&[1], &[1, -8, 7]), 7),
            (rf(&[1, -3, 7], &[1, -8, 7]), 7),
            (rf(&[1], &[1, -3, 2]), 2),
        ];
        for (z, qv) in cases {
            let l = ltot_from_good_model(&z, qv);
            let s = solve_local_near(&l, qv).unwrap();
            assert_eq!(s, z, "round trip at qv = {qv}");
            assert_eq!(lnear_good_reduction(&z, qv), z);
        }
    }

    #[test]
    fn solver_is_multiplicative_when_solvable() {
        let z1 = rf(&[1], &[1, -1]);
        let z2 = rf(&[1], &[1, -2]);
        let (r1, r2) = (ltot_from_good_model(&z1, 2), ltot_from_good_model(&z2, 2));
        let lhs = solve_local_near(&r1.mul(&r2), 2).unwrap();
        let rhs = solve_local_near(&r1, 2)
            .unwrap()
            .mul(&solve_local_near(&r2, 2).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn solver_commutes_with_rescaling() {
        // Solving R(u/q) yields S(u/q): the image of a twist.
        let z = rf(&[1], &[1, -3, 2]);
        let r = ltot_from_good_model(&z, 2);
        let half = qr(1, 2);
        let s_twisted = solve_local_near(&r.scale_input(&half), 2).unwrap();
        assert_eq!(
            s_twisted,
            solve_local_near(&r, 2).unwrap().scale_input(&half)
        );
    }

    /// Independent check: solve the defining equation coefficientwise as
    /// a power series and fit, then compare with the orbit solver.
    #[test]
    fn solver_agrees_with_series_recursion() {
        let z = rf(&[1, -2, 7], &[1, -8, 7]);
        let qv = 7u64;
        let r = ltot_from_good_model(&z, qv);
        let s = solve_local_near(&r, qv).unwrap();
        // S(u) = R(u) * S(u/qv): s_n = sum_{j<=n} r_j * s_{n-j} * qv^{-(n-j)},
        // which determines s_n from earlier terms since r_0 = 1.
        let depth = 12;
        let rser = PowerSeriesQ::from_ratfunc(&r, depth);
        let qinv = qr(1, qv as i64);
        let mut sc: Vec<BigRational> = vec![BigRational::one()];
        for n in 1..=depth {
            let mut acc = BigRational::zero();
            for j in 1..=n {
                acc += rser.coeff(j) * &sc[n - j] * qinv.pow((n - j) as i32);
            }
            // s_n (1 - qv^{-n}) = acc.
            let scale = BigRational::one() - qinv.pow(n as i32);
            sc.push(acc / scale);
        }
        let sser = PowerSeriesQ::from_ratfunc(&s, depth);
        assert_eq!(sser.coeffs(), &sc[..]);
    }

    #[test]
    fn elliptic_ledger_good_and_split() {
        // y^2 = x^3 - x + 1: disc -368 = -16*23, c4 = 48; 23 is split
        // multiplicative, every other prime in range is good.
        let e = WeierstrassCurve::new(0, 0, 0, -1, 1).unwrap();
        let (series, ledger) = elliptic_global_lnear(&e, 30, 60).unwrap();
        let skipped: Vec<u64> = ledger
            .iter()
            .filter(|p| p.provenance == "skipped")
            .map(|p| p.norm)
            .collect();
        assert_eq!(skipped, vec![2, 3]);
        for place in &ledger {
            match place.norm {
                2 | 3 => assert_eq!(place.tag, PlaceTag::Other),
                23 => {
                    assert_eq!(place.tag, PlaceTag::MultiplicativeSplit);
                    // Split column: coefficient at p is 1 + p.
                    assert_eq!(series.coeff(23), qr(24, 1));
                }
                p => {
                    assert_eq!(place.tag, PlaceTag::Good, "p = {p}");
                    // a_p from the enumeration matches the series column.
                    let f = make_field(p, 1).unwrap();
                    let count = elliptic_counts(&e, &f, 1).unwrap()[0];
                    let ap = p as i64 + 1 - count as i64;
                    assert_eq!(series.coeff(p as usize), qr(ap, 1), "p = {p}");
                }
            }
        }
        // Multiplicativity of the expansion: a_35 = a_5 * a_7.
        assert_eq!(series.coeff(35), series.coeff(5) * series.coeff(7));
    }

    #[test]
    fn elliptic_additive_is_refused() {
        // y^2 = x^3 - 5: disc = -27*25*16 has p = 5 dividing disc and c4 = 0.
        let e = WeierstrassCurve::new(0, 0, 0, 0, -5).unwrap();
        assert!(matches!(
            elliptic_global_lnear(&e, 10, 10),
            Err(Error::AdditiveReduction(5))
        ));
    }

    #[test]
    fn gamma_descriptor_shapes() {
        let c = gamma_factor(&HodgeData::Complex { h: vec![(0, 0, 1)] }).unwrap();
        assert_eq!(
            c.terms,
            vec![GammaTerm {
                kind: GammaKind::C,
                shift: 0,
                exponent: 1
            }]
        );
        let r = gamma_factor(&HodgeData::Real {
            pairs: vec![],
            diagonal: vec![(0, 1, 0)],
        })
        .unwrap();
        assert_eq!(
            r.terms,
            vec![GammaTerm {
                kind: GammaKind::R,
                shift: 0,
                exponent: 1
            }]
        );
        // Elliptic H^1 as a real structure: h(0,1) = h(1,0) = 1 gives one
        // complex term at shift 0.
        let e = gamma_factor(&HodgeData::Real {
            pairs: vec![(0, 1, 1)],
            diagonal: vec![],
        })
        .unwrap();
        assert_eq!(
            e.terms,
            vec![GammaTerm {
                kind: GammaKind::C,
                shift: 0,
                exponent: 1
            }]
        );
    }

    #[test]
    fn gamma_values_and_poles() {
        let gr = GammaDescriptor {
            terms: vec![GammaTerm {
                kind: GammaKind::R,
                shift: 0,
                exponent: 1,
            }],
        };
        // pi^{-1} Gamma(1) = 1/pi at s = 2.
        let v = evaluate_gamma(&gr, 2.0).unwrap();
        assert!((v - 1.0 / std::f64::consts::PI).abs() < 1e-12);
        assert!(matches!(
            evaluate_gamma(&gr, 0.0),
            Err(Error::PoleHit {
                kind: "gamma_R",
                ..
            })
        ));
        assert!(matches!(
            evaluate_gamma(&gr, -2.0),
            Err(Error::PoleHit { .. })
        ));
        let gc = GammaDescriptor {
            terms: vec![GammaTerm {
                kind: GammaKind::C,
                shift: 0,
                exponent: 1,
            }],
        };
        // 2 (2 pi)^{-1} Gamma(1) = 1/pi at s = 1.
        let v = evaluate_gamma(&gc, 1.0).unwrap();
        assert!((v - 1.0 / std::f64::consts::PI).abs() < 1e-12);
        // Empty descriptor evaluates to 1.
        assert_eq!(
            evaluate_gamma(&GammaDescriptor::default(), -5.0).unwrap(),
            1.0
        );
    }

    fn riemann_model(bound: u64, gamma: Vec<GammaDescriptor>) -> GlobalModel {
        let factor = RatFuncQ::from_den(p(&[1, -1])).unwrap();
        let places = arith::primes_between(2, bound)
            .into_iter()
            .map(|pr| PlaceLocalData {
                norm: pr,
                degree: 1,
                local_factor: factor.clone(),
                tag: PlaceTag::Good,
                provenance: "declared",
            })
            .collect();
        GlobalModel {
            base: BaseField::Q,
            places,
            gamma,
            chi: 0,
            disc: 1,
        }
    }

    #[test]
    fn xi_reduces_to_series_value_without_gamma() {
        let model = riemann_model(50, vec![]);
        let xi = completed_xi(&model, 3.0, 50).unwrap();
        let series = model.dirichlet_series(50).unwrap();
        assert_eq!(xi.value, series.evaluate(3.0).0);
        assert!(!xi.out_of_region);
        // At s = 1 the weight-0 bound is hit and the flag raises.
        assert!(completed_xi(&model, 1.0, 50).unwrap().out_of_region);
    }

    #[test]
    fn xi_with_real_gamma_term() {
        let gr = GammaDescriptor {
            terms: vec![GammaTerm {
                kind: GammaKind::R,
                shift: 0,
                exponent: 1,
            }],
        };
        let model = riemann_model(50, vec![gr.clone()]);
        let xi = completed_xi(&model, 3.0, 50).unwrap();
        let expect =
            evaluate_gamma(&gr, 3.0).unwrap() * model.dirichlet_series(50).unwrap().evaluate(3.0).0;
        assert!((xi.value - expect).abs() < 1e-12);
    }

    #[test]
    fn model_json_roundtrip() {
        let e = WeierstrassCurve::new(0, 0, 0, -1, 1).unwrap();
        let (_, ledger) = elliptic_global_lnear(&e, 12, 12).unwrap();
        let model = GlobalModel {
            base: BaseField::Q,
            places: ledger,
            gamma: vec![GammaDescriptor {
                terms: vec![GammaTerm {
                    kind: GammaKind::C,
                    shift: 0,
                    exponent: 1,
                }],
            }],
            chi: -2,
            disc: 368,
        };
        let v = model.to_json();
        let back = GlobalModel::from_json(&v).unwrap();
        // Provenance resets to "declared" on parse; compare the rest.
        assert_eq!(back.base, model.base);
        assert_eq!(back.chi, model.chi);
        assert_eq!(back.disc, model.disc);
        assert_eq!(back.gamma, model.gamma);
        assert_eq!(back.places.len(), model.places.len());
        for (a, b) in back.places.iter().zip(&model.places) {
            assert_eq!(a.norm, b.norm);
            assert_eq!(a.local_factor, b.local_factor);
            assert_eq!(a.tag, b.tag);
        }
    }

    #[test]
    fn unit_places_assemble_to_global_zeta() {
        let places = unit_motive_places(2, 6).unwrap();
        // Census: 3, 1, 2, 3, 6, 9 places in degrees 1..6.
        let by_degree: Vec<usize> = (1..=6)
            .map(|d| places.iter().filter(|p| p.degree as usize == d).count())
            .collect();
        assert_eq!(by_degree, vec![3, 1, 2, 3, 6, 9]);
        let z = assemble_ff(&places, 2, 6, 1, 2).unwrap();
        assert_eq!(z, rf(&[1], &[1, -3, 2]));
    }

    #[test]
    fn assembly_notices_missing_places() {
        let mut places = unit_motive_places(2, 6).unwrap();
        let idx = places.iter().position(|p| p.degree == 2).unwrap();
        places.remove(idx);
        assert_eq!(
            assemble_ff(&places, 2, 6, 1, 2).unwrap_err(),
            Error::MissingPlaces {
                degree: 2,
                expected: 1,
                got: 0
            }
        );
    }

    #[test]
    fn ff_functional_equation_monomials() {
        // Unit global zeta over F_q(t), self-dual: quotient is q u^2.
        let z = rf(&[1], &[1, -3, 2]);
        assert_eq!(
            verify_ff_functional_equation(&z, &z, 2).unwrap(),
            (qr(2, 1), 2)
        );
        let one = RatFuncQ::one();
        assert_eq!(
            verify_ff_functional_equation(&one, &one, 7).unwrap(),
            (qr(1, 1), 0)
        );
        let a = rf(&[1], &[1, -1]);
        let b = rf(&[1], &[1, -2]);
        assert!(matches!(
            verify_ff_functional_equation(&a, &b, 3),
            Err(Error::NotMonomialRatio(_))
        ));
    }

    #[test]
    fn density_scan_extremes() {
        let line =
            VarietySpec::from_json_str(r#"{"vars":["x"],"kind":"affine","eqs":[]}"#).unwrap();
        let point =
            VarietySpec::from_json_str(r#"{"vars":["x"],"kind":"affine","eqs":["x"]}"#).unwrap();
        let same = density_scan(&line, &line, 50, 2).unwrap();
        assert_eq!(same.fraction, qr(0, 1));
        assert_eq!(same.bound, qr(1, 4));
        let diff = density_scan(&line, &point, 50, 2).unwrap();
        assert_eq!(diff.fraction, qr(1, 1));
        assert_eq!(diff.differing, diff.total);
    }
}
