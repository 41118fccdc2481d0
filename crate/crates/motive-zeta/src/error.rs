//! Crate-wide error type and the exit-code classification used by the CLI.

use thiserror::Error;

/// Everything that can go wrong across the library.
///
/// Variants fall into three classes, reflected in [`Error::exit_code`]:
/// malformed or inconsistent input (exit code 2), well-posed computations
/// whose requested object does not exist (exit code 3), and resource caps
/// (exit code 4).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // ---- input shape and consistency (exit code 2) ----
    /// The characteristic handed to a field constructor is composite.
    #[error("{0} is not prime")]
    NotPrime(u64),

    /// Two elements (or two classes) from different fields met in one
    /// operation.
    #[error("operands belong to different fields")]
    FieldMismatch,

    /// A projective presentation contains a non-homogeneous polynomial.
    #[error("projective equation is not homogeneous: {0}")]
    InhomogeneousProjective(String),

    /// A polynomial string mentions a variable the presentation does not
    /// declare, or an operation names an undeclared coordinate.
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    /// Weierstrass machinery requires residue characteristic at least 5.
    #[error("characteristic {0} is too small; this routine needs p >= 5")]
    SmallCharacteristic(u64),

    /// The residue characteristic divides the discriminant, so the curve
    /// does not have good reduction there.
    #[error("bad reduction at p = {0}: p divides the discriminant")]
    BadReduction(u64),

    /// The residue characteristic divides both the discriminant and c4, so
    /// the reduction is additive and carries no nearby local factor here.
    #[error("additive reduction at p = {0}: p divides the discriminant and c4")]
    AdditiveReduction(u64),

    /// The twist order does not divide q - 1, so the covering family is not
    /// a torsor under the cyclic group of that order.
    #[error("n = {n} does not divide q - 1 = {qm1}, so the cover is not a torsor")]
    NotTorsor { n: u64, qm1: u64 },

    /// A series does not carry enough coefficients for the requested
    /// reconstruction.
    #[error("series carries {have} usable coefficients but {need} are required")]
    InsufficientTerms { need: usize, have: usize },

    /// A numerator or denominator has vanishing constant term, so it cannot
    /// be normalized to constant term 1.
    #[error("constant term of a numerator or denominator vanishes")]
    ZeroConstantTerm,

    /// Two classes over different base field sizes met in one operation, or
    /// a base-change was requested at an impossible size.
    #[error("base field sizes disagree: q = {0} vs q = {1}")]
    BaseMismatch(u64, u64),

    /// A Dirichlet series with a_1 = 0 has no multiplicative inverse.
    #[error("Dirichlet series is not invertible: a_1 = 0")]
    NotInvertible,

    /// The shift-equation solver requires leading coefficient a_1 = 1.
    #[error("shift equation needs leading coefficient a_1 = 1, got {0}")]
    BadLeadingCoefficient(String),

    /// Function-field assembly found the wrong number of places in some
    /// degree, so the product over places would not be the full L-function.
    #[error(
        "place coverage is incomplete in degree {degree}: expected {expected} places, found {got}"
    )]
    MissingPlaces {
        degree: usize,
        expected: u64,
        got: u64,
    },

    /// The expression text failed to parse.
    #[error("syntax error at line {line}, column {col}: {msg}")]
    SyntaxError {
        line: usize,
        col: usize,
        msg: String,
    },

    /// The expression references a name that is neither built in nor bound
    /// in the environment.
    #[error("unbound identifier `{name}` at line {line}, column {col}")]
    UnboundIdentifier {
        name: String,
        line: usize,
        col: usize,
    },

    /// Catch-all for malformed input that has no more specific variant:
    /// unreadable files, out-of-range parameters, misshapen JSON.
    #[error("{0}")]
    BadInput(String),

    // ---- well-posed but unobtainable (exit code 3) ----
    /// Division by zero in exact arithmetic.
    #[error("division by zero")]
    DivisionByZero,

    /// No rational function within the requested degree bounds matches the
    /// series through its cutoff.
    #[error("no rational function of degrees ({dnum}, {dden}) matches the series")]
    NoFit { dnum: usize, dden: usize },

    /// The multiplicative shift equation has no rational solution.
    #[error("shift equation has no rational solution: {0}")]
    NotSolvable(String),

    /// An inverse root's modulus is not within tolerance of any q^(w/2), or
    /// conjugate roots landed in different weights.
    #[error("inverse root of modulus {modulus:.12} fits no half-integral power of q = {q} within tolerance")]
    NotWeil { modulus: f64, q: u64 },

    /// A Gamma factor was evaluated at one of its poles.
    #[error("gamma factor hit a pole: {kind} evaluated at {arg}")]
    PoleHit { kind: &'static str, arg: f64 },

    /// The functional-equation quotient is not a monomial c * u^B.
    #[error("functional-equation quotient is not of the form c * u^B: {0}")]
    NotMonomialRatio(String),

    // ---- resource caps (exit code 4) ----
    /// An enumeration or field size exceeds the configured cap.
    #[error("size {size} exceeds the enumeration cap {cap}")]
    TooLarge { size: u128, cap: u64 },
}

impl Error {
    /// Exit code the `mzeta` binary reports for this error.
    ///
    /// 2 = malformed input, 3 = mathematically impossible request,
    /// 4 = resource cap exceeded.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::TooLarge { .. } => 4,
            Error::DivisionByZero
            | Error::NoFit { .. }
            | Error::NotSolvable(_)
            | Error::NotWeil { .. }
            | Error::PoleHit { .. }
            | Error::NotMonomialRatio(_) => 3,
            _ => 2,
        }
    }

    /// Stable machine-readable name of the variant, for error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "not_prime",
            Error::FieldMismatch => "field_mismatch",
            Error::InhomogeneousProjective(_) => "inhomogeneous_projective",
            Error::UnknownVariable(_) => "unknown_variable",
            Error::SmallCharacteristic(_) => "small_characteristic",
            Error::BadReduction(_) => "bad_reduction",
            Error::AdditiveReduction(_) => "additive_reduction",
            Error::NotTorsor { .. } => "not_torsor",
            Error::InsufficientTerms { .. } => "insufficient_terms",
            Error::ZeroConstantTerm => "zero_constant_term",
            Error::BaseMismatch(_, _) => "base_mismatch",
            Error::NotInvertible => "not_invertible",
            Error::BadLeadingCoefficient(_) => "bad_leading_coefficient",
            Error::MissingPlaces { .. } => "missing_places",
            Error::SyntaxError { .. } => "syntax_error",
            Error::UnboundIdentifier { .. } => "unbound_identifier",
            Error::BadInput(_) => "bad_input",
            Error::DivisionByZero => "division_by_zero",
            Error::NoFit { .. } => "no_fit",
            Error::NotSolvable(_) => "not_solvable",
            Error::NotWeil { .. } => "not_weil",
            Error::PoleHit { .. } => "pole_hit",
            Error::NotMonomialRatio(_) => "not_monomial_ratio",
            Error::TooLarge { .. } => "too_large",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
