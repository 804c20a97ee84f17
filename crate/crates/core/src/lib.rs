//! Genus-2 Siegel modular forms with exact Fourier coefficients, and the
//! Igusa functions `j1, j2, j3` evaluated to a prescribed decimal precision.
//!
//! The crate computes the Fourier coefficients of the Siegel Eisenstein
//! series `E4, E6, E10, E12` and of the cusp forms `chi10, chi12` as exact
//! rationals, keyed by the discriminant value `N = 4ac - b^2` and the
//! content `gcd(a, b, c)` of the index matrix. The coefficients come from
//! one-variable generating series (Cohen functions and Jacobi cusp-form
//! series) built as isobaric polynomials in the theta series `theta` and
//! `theta_tilde`; an independent L-value route through generalized Bernoulli
//! numbers serves as an oracle for the same numbers.
//!
//! On the numeric side, the crate reduces a point of the Siegel upper half
//! plane towards the fundamental domain, derives a rigorous truncation and
//! working-precision plan (trace bound, digit budget, certified lower bound
//! for `|chi10|`), evaluates the four forms by truncated Fourier sums, and
//! assembles the Igusa functions.
//!
//! Module map:
//!
//! * [`series`] — exact truncated q-expansions (theta blocks, products,
//!   isobaric combinations).
//! * [`halfint`] — Cohen functions `H_w`, cusp series `K10, K12`,
//!   generalized Bernoulli numbers and L-values.
//! * [`tables`] — per-form coefficient tables keyed by `(N, content)`,
//!   with a checksummed text file format.
//! * [`bounds`] — explicit coefficient bounds, tail integrals, the
//!   `|chi10|` lower-bound certification and the precision plan.
//! * [`waldspurger`] — Petersson-ratio estimates through twisted central
//!   L-values of the Shimura lifts.
//! * [`point`] — Siegel upper half-plane points, symplectic action and
//!   reduction.
//! * [`evaluator`] — truncated Fourier sums and the Igusa functions.
//! * [`verify`] — cross-checking suites wired into the CLI.

pub mod arith;
pub mod bounds;
pub mod cnum;
pub mod evaluator;
pub mod halfint;
pub mod point;
pub mod series;
pub mod tables;
pub mod verify;
pub mod waldspurger;

use std::fmt;

/// Errors surfaced by table construction, file I/O, and the numeric
/// evaluation pipeline.
#[derive(Debug)]
pub enum Error {
    /// Weight outside the supported set {4, 6, 10, 12} (or {10, 12} for
    /// cusp series).
    UnsupportedWeight(u32),
    /// `gen_bernoulli` was asked for a modulus that is not 1 or a negative
    /// fundamental discriminant.
    NonFundamental(i64),
    /// A coefficient was requested for negative `N = 4ac - b^2`; such
    /// matrices are not positive semi-definite and nothing is stored.
    NegativeDiscriminant(i64),
    /// `coeff_for_matrix` got a matrix that is not positive semi-definite.
    NotSemiDefinite { a: i64, b: i64, c: i64 },
    /// A lookup fell outside the range a table was built for.
    TableRange { need: i64, have: i64 },
    /// Table file parse failure.
    Format(String),
    /// Table file failed its checksum.
    Checksum,
    /// Table file has an unknown format version.
    Version(String),
    /// Table file holds a different form than requested.
    FormMismatch { want: String, got: String },
    /// Underlying I/O failure.
    Io(std::io::Error),
    /// The imaginary part of a point is not positive definite.
    NotInUpperHalfPlane,
    /// Bound parameters must be positive.
    BadBoundParams,
    /// `tail_integral` needs `B >= 1`.
    BadTailRange(i64),
    /// The chi10 partial sum stayed numerically zero up to the trace cap;
    /// the point may be a zero of chi10 and the Igusa values undefined.
    Chi10NearZero,
    /// Requested digits exceed what the input literals can certify.
    InputPrecision { requested: u32, available: u32 },
    /// A matrix inversion lost essentially all working precision.
    PrecisionExhausted,
    /// Malformed decimal literal in a point.
    BadPointLiteral(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnsupportedWeight(w) => write!(f, "unsupported weight {w}"),
            Error::NonFundamental(d) => {
                write!(f, "{d} is not 1 or a negative fundamental discriminant")
            }
            Error::NegativeDiscriminant(n) => {
                write!(
                    f,
                    "negative discriminant value {n}: matrix not semi-definite"
                )
            }
            Error::NotSemiDefinite { a, b, c } => {
                write!(
                    f,
                    "matrix ({a}, {b}/2; {b}/2, {c}) is not positive semi-definite"
                )
            }
            Error::TableRange { need, have } => {
                write!(f, "table covers up to {have} but {need} was requested")
            }
            Error::Format(msg) => write!(f, "malformed table file: {msg}"),
            Error::Checksum => write!(f, "table file checksum mismatch"),
            Error::Version(v) => write!(f, "unsupported table file version {v}"),
            Error::FormMismatch { want, got } => {
                write!(f, "table file holds {got} but {want} was requested")
            }
            Error::Io(e) => write!(f, "io error: {e}"),
            Error::NotInUpperHalfPlane => {
                write!(f, "imaginary part is not positive definite")
            }
            Error::BadBoundParams => write!(f, "epsilon and eta must be positive"),
            Error::BadTailRange(b) => write!(f, "tail integral needs B >= 1, got {b}"),
            Error::Chi10NearZero => write!(
                f,
                "chi10 partial sums vanish up to the trace cap; cannot certify a lower bound"
            ),
            Error::InputPrecision {
                requested,
                available,
            } => write!(
                f,
                "requested {requested} digits but the input literals carry only {available}"
            ),
            Error::PrecisionExhausted => write!(f, "working precision exhausted in matrix action"),
            Error::BadPointLiteral(s) => write!(f, "malformed decimal literal: {s}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
