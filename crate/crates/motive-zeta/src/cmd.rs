//! Command-line front end: argument types and subcommand drivers.
//!
//! Every driver is a pure function from parsed arguments to a JSON value;
//! identical invocations produce byte-identical output (object keys are
//! sorted, rationals normalized). The binary prints the value compactly,
//! or as `key: value` lines behind `--pretty`, and maps errors to exit
//! codes: 2 for input problems, 3 for mathematical failures, 4 for
//! resource caps.

use crate::dirichlet::{solve_shift_equation, DirichletSeries};
use crate::error::{Error, Result};
use crate::expr::{elaborate, parse_expr};
use crate::field::{make_field_with_cap, DEFAULT_ENUM_CAP};
use crate::jsonq;
use crate::lfun::{
    assemble_ff, density_scan, elliptic_global_lnear, evaluate_gamma, gamma_factor,
    solve_local_near, verify_ff_functional_equation, GlobalModel, HodgeData, PlaceLocalData,
};
use crate::motive::VirtualMotive;
use crate::poly::PolyQ;
use crate::ratfunc::RatFuncQ;
use crate::variety::{count_tower, VarietySpec, WeierstrassCurve};
use clap::{Args, Parser, Subcommand};
use num::BigRational;
use serde_json::Value;
use std::collections::BTreeMap;

/// Exact zeta functions and L-functions over finite fields.
#[derive(Parser, Debug)]
#[command(name = "mzeta", version, about)]
pub struct Cli {
    /// Render the result as human-readable lines instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,

    /// On failure, print a machine-readable error object to stdout.
    #[arg(long, global = true)]
    pub error_json: bool,

    /// Worker threads for point enumeration (default: all cores).
    /// Results are identical for every value.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Count points of a variety over a field tower.
    Count(CountArgs),
    /// Fit the zeta function of a variety and report its invariants.
    Zeta(ZetaArgs),
    /// Evaluate a class expression and report its invariants.
    Algebra(AlgebraArgs),
    /// Dirichlet-series operations.
    #[command(subcommand)]
    Dirichlet(DirichletCmd),
    /// Solve S(u)/S(u/qv) = R(u) for the nearby local factor S.
    Near(NearArgs),
    /// Reduction ledger and Dirichlet expansion of an elliptic curve.
    Ell(EllArgs),
    /// Assemble a global rational function over F_q(t) from place data.
    Ff(FfArgs),
    /// Gamma factor of Hodge data, with numeric evaluation.
    Gamma(GammaArgs),
    /// Compare point counts of two varieties across primes.
    Scan(ScanArgs),
}

#[derive(Args, Debug)]
pub struct CountArgs {
    /// Variety description file (JSON).
    #[arg(long)]
    pub spec: String,
    /// Base field size (a prime power).
    #[arg(long)]
    pub q: u64,
    /// Number of tower levels to count.
    #[arg(long, default_value_t = 1)]
    pub depth: u32,
}

#[derive(Args, Debug)]
pub struct ZetaArgs {
    /// Variety description file (JSON). Mutually exclusive with --counts.
    #[arg(long, conflicts_with = "counts")]
    pub spec: Option<String>,
    /// Comma-separated count sequence to fit instead of enumerating.
    #[arg(long)]
    pub counts: Option<String>,
    /// Base field size (a prime power).
    #[arg(long)]
    pub q: u64,
    /// Numerator degree bound of the fit.
    #[arg(long)]
    pub dnum: usize,
    /// Denominator degree bound of the fit.
    #[arg(long)]
    pub dden: usize,
    /// Tower depth to enumerate (default: dnum + dden + 2).
    #[arg(long)]
    pub depth: Option<u32>,
    /// Relative tolerance of the weight census.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct AlgebraArgs {
    /// The expression, e.g. "point + lefschetz" or "dual(twist(e, -1))".
    pub expr: String,
    /// Context base field size.
    #[arg(long)]
    pub q: u64,
    /// Environment file binding identifiers to classes (JSON object).
    #[arg(long)]
    pub env: Option<String>,
    /// Relative tolerance of the weight census.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Subcommand, Debug)]
pub enum DirichletCmd {
    /// Expand an Euler product of place factors into a series.
    Product(DirichletProductArgs),
    /// Solve g(s) = f(s) * g(s+1) for g.
    Solve(DirichletSolveArgs),
    /// Multiply two series.
    Mul(DirichletBinArgs),
    /// Invert a series.
    Inv(DirichletUnArgs),
    /// Evaluate a series numerically at a real point.
    Eval(DirichletEvalArgs),
}

#[derive(Args, Debug)]
pub struct DirichletProductArgs {
    /// Place data: a JSON array of place records, or a model object with
    /// a "places" field.
    #[arg(long)]
    pub places: String,
    /// Series cutoff.
    #[arg(long)]
    pub cutoff: usize,
}

#[derive(Args, Debug)]
pub struct DirichletSolveArgs {
    /// Series file (JSON, {"cutoff": N, "a": {...}}).
    #[arg(long)]
    pub series: String,
}

#[derive(Args, Debug)]
pub struct DirichletBinArgs {
    /// Left series file.
    #[arg(long)]
    pub a: String,
    /// Right series file.
    #[arg(long)]
    pub b: String,
}

#[derive(Args, Debug)]
pub struct DirichletUnArgs {
    /// Series file.
    #[arg(long)]
    pub a: String,
}

#[derive(Args, Debug)]
pub struct DirichletEvalArgs {
    /// Series file.
    #[arg(long)]
    pub a: String,
    /// Real evaluation point.
    #[arg(long)]
    pub s: f64,
}

#[derive(Args, Debug)]
pub struct NearArgs {
    /// Numerator coefficients of R, ascending, e.g. "1,-1/5".
    #[arg(long)]
    pub num: String,
    /// Denominator coefficients of R, ascending, e.g. "1,-5".
    #[arg(long)]
    pub den: String,
    /// Rescaling base (the place norm).
    #[arg(long)]
    pub qv: u64,
}

#[derive(Args, Debug)]
pub struct EllArgs {
    /// Weierstrass coefficients "a1,a2,a3,a4,a6".
    #[arg(long)]
    pub ainv: String,
    /// Scan primes up to this bound.
    #[arg(long)]
    pub bound: u64,
    /// Dirichlet cutoff of the expansion.
    #[arg(long)]
    pub cutoff: usize,
}

#[derive(Args, Debug)]
pub struct FfArgs {
    /// Place data file (JSON array of place records or model object).
    #[arg(long)]
    pub places: String,
    /// Constant-field size.
    #[arg(long)]
    pub q: u64,
    /// Expansion depth in u; place coverage is checked to this degree.
    #[arg(long)]
    pub depth: usize,
    /// Numerator degree bound of the fit.
    #[arg(long)]
    pub dnum: usize,
    /// Denominator degree bound of the fit.
    #[arg(long)]
    pub dden: usize,
    /// Place data of the dual object; when given, the functional
    /// equation quotient is verified and reported.
    #[arg(long)]
    pub dual: Option<String>,
}

#[derive(Args, Debug)]
pub struct GammaArgs {
    /// Hodge data file (JSON).
    #[arg(long)]
    pub hodge: String,
    /// Real evaluation point.
    #[arg(long)]
    pub s: f64,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    /// First variety description file.
    #[arg(long)]
    pub v1: String,
    /// Second variety description file.
    #[arg(long)]
    pub v2: String,
    /// Scan primes 5 <= p <= bound.
    #[arg(long)]
    pub bound: u64,
    /// Betti datum entering the reported lower bound 1/betti^2.
    #[arg(long)]
    pub betti: u64,
}

/// Enumeration cap: the environment override, or the built-in default.
pub fn enumeration_cap() -> u64 {
    std::env::var("MZETA_ENUM_CAP")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_ENUM_CAP)
}

fn read_file(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::BadInput(format!("cannot read `{path}`: {e}")))
}

fn load_json(path: &str) -> Result<Value> {
    serde_json::from_str(&read_file(path)?)
        .map_err(|e| Error::BadInput(format!("`{path}` is not valid JSON: {e}")))
}

fn load_spec(path: &str) -> Result<VarietySpec> {
    VarietySpec::from_json_str(&read_file(path)?)
}

/// Split a prime power `q = p^e`.
fn split_prime_power(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::BadInput(format!("{q} is not a prime power")));
    }
    let mut p = q;
    for cand in 2..=q {
        if cand * cand > q {
            break;
        }
        if q % cand == 0 {
            p = cand;
            break;
        }
    }
    let mut e = 0u32;
    let mut rest = q;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    if rest != 1 {
        return Err(Error::BadInput(format!("{q} is not a prime power")));
    }
    Ok((p, e))
}

/// Parse "1,-1/5, 3" (brackets optional) into exact coefficients.
fn coeffs_from_text(text: &str) -> Result<Vec<BigRational>> {
    let trimmed = text.trim().trim_start_matches('[').trim_end_matches(']');
    if trimmed.trim().is_empty() {
        return Ok(Vec::new());
    }
    trimmed
        .split(',')
        .map(|part| jsonq::rational_from_str(part.trim()))
        .collect()
}

fn places_from_json(v: &Value) -> Result<Vec<PlaceLocalData>> {
    match v {
        Value::Array(items) => items.iter().map(PlaceLocalData::from_json).collect(),
        Value::Object(_) if v.get("places").is_some() => Ok(GlobalModel::from_json(v)?.places),
        _ => Err(Error::BadInput(
            "place data must be a JSON array of place records or a model object with `places`"
                .into(),
        )),
    }
}

fn load_places(path: &str) -> Result<Vec<PlaceLocalData>> {
    places_from_json(&load_json(path)?)
}

fn load_series(path: &str) -> Result<DirichletSeries> {
    DirichletSeries::from_json(&load_json(path)?)
}

fn obj(entries: Vec<(&str, Value)>) -> Value {
    let mut m = serde_json::Map::new();
    for (k, v) in entries {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

fn counts_to_json(counts: &[u64]) -> Value {
    Value::Array(counts.iter().map(|&c| Value::from(c)).collect())
}

/// Shared tail of `zeta` and `algebra`: a class's Z-function, Euler
/// characteristic, Frobenius determinant, weights, and the
/// functional-equation verdict.
fn class_report(
    m: &VirtualMotive,
    tol: f64,
    weights_required: bool,
) -> Result<Vec<(&'static str, Value)>> {
    let z = m.z_function();
    let fe = m.functional_equation();
    let weights = match m.weight_profile(tol) {
        Ok(w) => {
            let mut wm = serde_json::Map::new();
            for (k, v) in w {
                wm.insert(k.to_string(), Value::from(v));
            }
            Value::Object(wm)
        }
        Err(e) if !weights_required => {
            let _ = e;
            Value::Null
        }
        Err(e) => return Err(e),
    };
    Ok(vec![
        ("num", jsonq::coeffs_to_json(z.num().coeffs())),
        ("den", jsonq::coeffs_to_json(z.den().coeffs())),
        ("chi", Value::from(fe.chi)),
        ("det", jsonq::scalar_to_json(&fe.det)),
        ("weights", weights),
        ("fe_holds", Value::Bool(fe.holds)),
    ])
}

pub fn cmd_count(args: &CountArgs) -> Result<Value> {
    let spec = load_spec(&args.spec)?;
    let (p, e) = split_prime_power(args.q)?;
    let f = make_field_with_cap(p, e, enumeration_cap())?;
    let counts = count_tower(&spec, &f, args.depth)?;
    Ok(obj(vec![
        ("q", Value::from(args.q)),
        ("depth", Value::from(args.depth)),
        ("counts", counts_to_json(&counts)),
    ]))
}

pub fn cmd_zeta(args: &ZetaArgs) -> Result<Value> {
    let counts: Vec<u64> = match (&args.spec, &args.counts) {
        (Some(path), None) => {
            let spec = load_spec(path)?;
            let (p, e) = split_prime_power(args.q)?;
            let f = make_field_with_cap(p, e, enumeration_cap())?;
            let depth = args.depth.unwrap_or((args.dnum + args.dden + 2) as u32);
            count_tower(&spec, &f, depth)?
        }
        (None, Some(text)) => {
            split_prime_power(args.q)?;
            text.split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| Error::BadInput(format!("bad count `{s}`")))
                })
                .collect::<Result<_>>()?
        }
        _ => {
            return Err(Error::BadInput(
                "exactly one of --spec and --counts is required".into(),
            ))
        }
    };
    let m = VirtualMotive::from_counts(args.q, &counts, args.dnum, args.dden)?;
    Ok(obj(class_report(&m, args.tol, true)?))
}

/// Environment entry: either a serialized class (`{"q":…,"atoms":…}`) or
/// a variety description plus fit bounds
/// (`{"vars":…, "kind":…, "eqs":…, "dnum":…, "dden":…, "depth":…}`),
/// counted over the context base.
fn load_env(path: &str, q: u64) -> Result<BTreeMap<String, VirtualMotive>> {
    let v = load_json(path)?;
    let map = v
        .as_object()
        .ok_or_else(|| Error::BadInput("environment must be a JSON object".into()))?;
    let mut env = BTreeMap::new();
    for (name, entry) in map {
        let class = if entry.get("atoms").is_some() {
            let m = VirtualMotive::from_json(entry)?;
            if m.q() != q {
                return Err(Error::BaseMismatch(q, m.q()));
            }
            m
        } else {
            let spec = VarietySpec::from_json_str(&entry.to_string())?;
            let dnum = jsonq::get_u64(entry, "dnum")? as usize;
            let dden = jsonq::get_u64(entry, "dden")? as usize;
            let depth = match entry.get("depth") {
                Some(_) => jsonq::get_u64(entry, "depth")? as u32,
                None => (dnum + dden + 2) as u32,
            };
            let (p, e) = split_prime_power(q)?;
            let f = make_field_with_cap(p, e, enumeration_cap())?;
            let counts = count_tower(&spec, &f, depth)?;
            VirtualMotive::from_counts(q, &counts, dnum, dden)?
        };
        env.insert(name.clone(), class);
    }
    Ok(env)
}

pub fn cmd_algebra(args: &AlgebraArgs) -> Result<Value> {
    let env = match &args.env {
        Some(path) => load_env(path, args.q)?,
        None => BTreeMap::new(),
    };
    let expr = parse_expr(&args.expr, &|name| env.contains_key(name))?;
    let m = elaborate(&expr, args.q, &env)?;
    let mut entries = vec![("expr", Value::from(expr.to_string()))];
    let class_json = m.to_json();
    entries.push(("q", Value::from(m.q())));
    entries.push((
        "atoms",
        class_json.get("atoms").cloned().unwrap_or(Value::Null),
    ));
    entries.extend(class_report(&m, args.tol, false)?);
    Ok(obj(entries))
}

pub fn cmd_dirichlet(cmd: &DirichletCmd) -> Result<Value> {
    match cmd {
        DirichletCmd::Product(a) => {
            let places = load_places(&a.places)?;
            let series = DirichletSeries::euler_product(
                places
                    .iter()
                    .filter(|p| p.provenance != "skipped")
                    .map(|p| (p.norm, &p.local_factor)),
                a.cutoff,
            )?;
            Ok(series.to_json())
        }
        DirichletCmd::Solve(a) => {
            let f = load_series(&a.series)?;
            Ok(solve_shift_equation(&f)?.to_json())
        }
        DirichletCmd::Mul(a) => {
            let left = load_series(&a.a)?;
            let right = load_series(&a.b)?;
            Ok(left.mul(&right).to_json())
        }
        DirichletCmd::Inv(a) => Ok(load_series(&a.a)?.inv()?.to_json()),
        DirichletCmd::Eval(a) => {
            let f = load_series(&a.a)?;
            let (value, tail) = f.evaluate(a.s);
            Ok(obj(vec![
                ("s", Value::from(a.s)),
                ("value", Value::from(value)),
                ("tail", tail.map(Value::from).unwrap_or(Value::Null)),
            ]))
        }
    }
}

pub fn cmd_near(args: &NearArgs) -> Result<Value> {
    let num = PolyQ::new(coeffs_from_text(&args.num)?);
    let den = PolyQ::new(coeffs_from_text(&args.den)?);
    let r = RatFuncQ::new(num, den)?;
    let s = solve_local_near(&r, args.qv)?;
    Ok(obj(vec![
        ("num", jsonq::coeffs_to_json(s.num().coeffs())),
        ("den", jsonq::coeffs_to_json(s.den().coeffs())),
    ]))
}

pub fn cmd_ell(args: &EllArgs) -> Result<Value> {
    let parts: Vec<i64> = args
        .ainv
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::BadInput(format!("bad Weierstrass coefficient `{s}`")))
        })
        .collect::<Result<_>>()?;
    let [a1, a2, a3, a4, a6] = parts[..] else {
        return Err(Error::BadInput(
            "--ainv needs exactly five integers a1,a2,a3,a4,a6".into(),
        ));
    };
    let e = WeierstrassCurve::new(a1, a2, a3, a4, a6)?;
    let (series, ledger) = elliptic_global_lnear(&e, args.bound, args.cutoff)?;
    Ok(obj(vec![
        ("disc", Value::from(e.discriminant().to_string())),
        ("series", series.to_json()),
        (
            "ledger",
            Value::Array(ledger.iter().map(|p| p.to_json()).collect()),
        ),
    ]))
}

pub fn cmd_ff(args: &FfArgs) -> Result<Value> {
    let places = load_places(&args.places)?;
    let l = assemble_ff(&places, args.q, args.depth, args.dnum, args.dden)?;
    let mut entries = vec![
        ("num", jsonq::coeffs_to_json(l.num().coeffs())),
        ("den", jsonq::coeffs_to_json(l.den().coeffs())),
    ];
    if let Some(dual_path) = &args.dual {
        let dual_places = load_places(dual_path)?;
        let l_dual = assemble_ff(&dual_places, args.q, args.depth, args.dnum, args.dden)?;
        let (c, b) = verify_ff_functional_equation(&l, &l_dual, args.q)?;
        entries.push((
            "fe",
            obj(vec![
                ("c", jsonq::scalar_to_json(&c)),
                ("B", Value::from(b)),
            ]),
        ));
    }
    Ok(obj(entries))
}

fn hodge_from_json(v: &Value) -> Result<HodgeData> {
    let triple = |item: &Value, what: &str| -> Result<(i64, i64, u64)> {
        let arr = item
            .as_array()
            .filter(|a| a.len() == 3)
            .ok_or_else(|| Error::BadInput(format!("{what} entries must be [x, y, mult]")))?;
        let get = |i: usize| -> Result<i64> {
            arr[i]
                .as_i64()
                .ok_or_else(|| Error::BadInput(format!("{what} entries must be integers")))
        };
        let mult = get(2)?;
        if mult < 0 {
            return Err(Error::BadInput("multiplicities must be nonnegative".into()));
        }
        Ok((get(0)?, get(1)?, mult as u64))
    };
    match v.get("kind").and_then(|k| k.as_str()) {
        Some("complex") => {
            let h = jsonq::get(v, "h")?
                .as_array()
                .ok_or_else(|| Error::BadInput("`h` must be a list".into()))?
                .iter()
                .map(|item| triple(item, "h"))
                .collect::<Result<Vec<_>>>()?;
            Ok(HodgeData::Complex { h })
        }
        Some("real") => {
            let pairs = match v.get("pairs") {
                Some(Value::Array(items)) => items
                    .iter()
                    .map(|item| triple(item, "pairs"))
                    .collect::<Result<Vec<_>>>()?,
                None => Vec::new(),
                _ => return Err(Error::BadInput("`pairs` must be a list".into())),
            };
            let diagonal = match v.get("diagonal") {
                Some(Value::Array(items)) => items
                    .iter()
                    .map(|item| {
                        let (n, plus, minus) = triple(item, "diagonal")?;
                        if plus < 0 {
                            return Err(Error::BadInput(
                                "multiplicities must be nonnegative".into(),
                            ));
                        }
                        Ok((n, plus as u64, minus))
                    })
                    .collect::<Result<Vec<_>>>()?,
                None => Vec::new(),
                _ => return Err(Error::BadInput("`diagonal` must be a list".into())),
            };
            Ok(HodgeData::Real { pairs, diagonal })
        }
        _ => Err(Error::BadInput(
            "hodge data needs \"kind\": \"complex\" or \"real\"".into(),
        )),
    }
}

pub fn cmd_gamma(args: &GammaArgs) -> Result<Value> {
    let hodge = hodge_from_json(&load_json(&args.hodge)?)?;
    let d = gamma_factor(&hodge)?;
    let value = evaluate_gamma(&d, args.s)?;
    Ok(obj(vec![
        ("terms", d.to_json()),
        ("s", Value::from(args.s)),
        ("value", Value::from(value)),
    ]))
}

pub fn cmd_scan(args: &ScanArgs) -> Result<Value> {
    let v1 = load_spec(&args.v1)?;
    let v2 = load_spec(&args.v2)?;
    let report = density_scan(&v1, &v2, args.bound, args.betti)?;
    Ok(obj(vec![
        ("differing", Value::from(report.differing)),
        ("total", Value::from(report.total)),
        ("fraction", jsonq::scalar_to_json(&report.fraction)),
        ("bound", jsonq::scalar_to_json(&report.bound)),
    ]))
}

/// Run one parsed command.
pub fn run(command: &Command) -> Result<Value> {
    match command {
        Command::Count(a) => cmd_count(a),
        Command::Zeta(a) => cmd_zeta(a),
        Command::Algebra(a) => cmd_algebra(a),
        Command::Dirichlet(c) => cmd_dirichlet(c),
        Command::Near(a) => cmd_near(a),
        Command::Ell(a) => cmd_ell(a),
        Command::Ff(a) => cmd_ff(a),
        Command::Gamma(a) => cmd_gamma(a),
        Command::Scan(a) => cmd_scan(a),
    }
}

/// Human-readable rendering: nested `key: value` lines, arrays inline.
pub fn render_pretty(v: &Value) -> String {
    fn inline(v: &Value) -> String {
        match v {
            Value::Array(items) => {
                let parts: Vec<String> = items.iter().map(inline).collect();
                format!("[{}]", parts.join(", "))
            }
            Value::Object(map) => {
                let parts: Vec<String> = map
                    .iter()
                    .map(|(k, v)| format!("{k}: {}", inline(v)))
                    .collect();
                format!("{{{}}}", parts.join(", "))
            }
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }
    fn go(v: &Value, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        match v {
            Value::Object(map) => {
                for (k, val) in map {
                    match val {
                        Value::Object(inner) if !inner.is_empty() => {
                            out.push_str(&format!("{pad}{k}:\n"));
                            go(val, indent + 1, out);
                        }
                        Value::Array(items)
                            if items.iter().any(|i| i.is_object()) && !items.is_empty() =>
                        {
                            out.push_str(&format!("{pad}{k}:\n"));
                            for item in items {
                                out.push_str(&format!("{pad}  - {}\n", inline(item)));
                            }
                        }
                        _ => out.push_str(&format!("{pad}{k}: {}\n", inline(val))),
                    }
                }
            }
            other => out.push_str(&format!("{pad}{}\n", inline(other))),
        }
    }
    let mut out = String::new();
    go(v, 0, &mut out);
    out
}
