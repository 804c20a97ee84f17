//! Rigorous truncation and precision analysis.
//!
//! Everything that turns "evaluate to k digits" into concrete numbers
//! lives here:
//!
//! * explicit growth constants for the Eisenstein coefficients
//!   (`|a(T)| <= c_w (4 det T)^(w - 3/2)` with a computable `c_w`),
//! * the cusp-coefficient bounds
//!   `|a_10(T)| <= 320 B2(eta) sqrt(B(eps, 9)) (4 det T)^(4.5 + eps/2 + eta)`
//!   (and the chi12 analogue with 3843 and exponent 5.5 + eps/2 + eta),
//! * closed-form upper bounds for the exponential tail integrals,
//! * the `|chi10(tau)| >= 10^(-n)` certification by comparing a trace
//!   partial sum against a majorant for everything beyond it,
//! * the full [`PrecisionPlan`]: digit budget `l`, trace bound `B`, and
//!   the working precision for the point powers.
//!
//! Analytic constants (zeta and gamma values) are evaluated once at 50
//! decimal digits, far beyond what any bound here needs. Bound arithmetic
//! rounds outward: bounds are nudged up, certified magnitudes down, so a
//! certification that succeeds numerically is genuinely conservative.

use std::sync::OnceLock;

use rug::{ops::Pow, Float, Integer};

use crate::cnum::{neg_log10_ceil, neg_log10_floor};
use crate::evaluator::form_trace_sums;
use crate::halfint::{bernoulli, zeta_odd_negative};
use crate::point::SiegelPoint;
use crate::tables::{CoeffTable, FormId};
use crate::{Error, Result};

/// Working precision (bits) for analytic constants and bound arithmetic:
/// 50 decimal digits plus slack.
const BOUND_BITS: u32 = 200;

/// Traces up to which the `|chi10|` certification escalates its partial
/// sums before giving up on a certified bound.
pub const CERTIFICATION_TRACE_CAP: i64 = 8;

/// Coefficient of the uniform tail integrand: the chi12 bound constant at
/// `(eps, eta) = (0.1, 1.45)`, whose integrand `C t^15 e^(-2 pi t delta)`
/// dominates the tail of all four evaluated forms.
pub const TAIL_COEFF: f64 = 524093.0;
/// Exponent of the uniform tail integrand.
pub const TAIL_POWER: f64 = 15.0;

/// `(epsilon, eta)` pair for the Phragmen-Lindelof / divisor-count bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundParams {
    pub epsilon: f64,
    pub eta: f64,
}

impl BoundParams {
    pub fn new(epsilon: f64, eta: f64) -> Result<BoundParams> {
        if epsilon > 0.0 && eta > 0.0 {
            Ok(BoundParams { epsilon, eta })
        } else {
            Err(Error::BadBoundParams)
        }
    }
}

/// The grid searched when optimizing `(epsilon, eta)`; a small fixed grid
/// is more robust than analytic optimization and the optimum depends on
/// `delta(tau)`.
pub const PARAM_GRID: [(f64, f64); 12] = [
    (0.1, 1.05),
    (0.1, 1.37),
    (0.1, 1.45),
    (0.1, 1.5),
    (0.28, 1.05),
    (0.28, 1.37),
    (0.28, 1.45),
    (0.28, 1.5),
    (0.5, 1.05),
    (0.5, 1.37),
    (0.5, 1.45),
    (0.5, 1.5),
];

fn f(x: f64) -> Float {
    Float::with_val(BOUND_BITS, x)
}

fn nudge_up(x: Float) -> Float {
    let eps = Float::with_val(BOUND_BITS, Float::i_exp(1, -(BOUND_BITS as i32) + 24));
    let factor = Float::with_val(BOUND_BITS, 1) + eps;
    x * factor
}

fn nudge_down(x: Float) -> Float {
    let eps = Float::with_val(BOUND_BITS, Float::i_exp(1, -(BOUND_BITS as i32) + 24));
    let factor = Float::with_val(BOUND_BITS, 1) - eps;
    x * factor
}

/// `B2(eta) = exp(2^(1/eta) / (eta log 2))`: the explicit divisor-count
/// constant with `sigma_0(n) <= B2(eta) n^eta`.
pub fn b2_constant(eta: f64) -> Result<Float> {
    if eta <= 0.0 {
        return Err(Error::BadBoundParams);
    }
    let ln2 = f(2.0).ln();
    let power = f(2.0).pow(f(1.0) / f(eta));
    Ok((power / (f(eta) * ln2)).exp())
}

/// `B(eps, n) = (1/sqrt(2 pi)) max{zeta(1+eps)^2,
/// zeta(1+eps)^2 Gamma(n+1/2+eps)/Gamma(n-1/2-eps)}`: the explicit
/// convexity bound for the twisted central L-values.
pub fn phragmen_lindelof_constant(eps: f64, n: u32) -> Result<Float> {
    if eps <= 0.0 {
        return Err(Error::BadBoundParams);
    }
    let zeta2 = f(1.0 + eps).zeta().square();
    let gamma_ratio = f(n as f64 + 0.5 + eps).gamma() / f(n as f64 - 0.5 - eps).gamma();
    let one = f(1.0);
    let factor = if gamma_ratio > one { gamma_ratio } else { one };
    let two_pi = Float::with_val(BOUND_BITS, rug::float::Constant::Pi) * 2u32;
    Ok(zeta2 * factor / two_pi.sqrt())
}

/// The constant in front of the cusp coefficient bound:
/// `M_10 = 320 B2(eta) sqrt(B(eps, 9))`, `M_12 = 3843 B2(eta)
/// sqrt(B(eps, 11))`.
pub fn cusp_bound_constant(form: FormId, params: BoundParams) -> Result<Float> {
    let (lead, n) = match form {
        FormId::Chi10 => (320.0, 9),
        FormId::Chi12 => (3843.0, 11),
        _ => return Err(Error::UnsupportedWeight(form.weight())),
    };
    let b2 = b2_constant(params.eta)?;
    let bl = phragmen_lindelof_constant(params.epsilon, n)?;
    Ok(nudge_up(f(lead) * b2 * bl.sqrt()))
}

/// Exponent of `4 det T` in the cusp coefficient bound.
pub fn cusp_bound_exponent(form: FormId, params: BoundParams) -> Result<f64> {
    match form {
        FormId::Chi10 => Ok(4.5 + params.epsilon / 2.0 + params.eta),
        FormId::Chi12 => Ok(5.5 + params.epsilon / 2.0 + params.eta),
        _ => Err(Error::UnsupportedWeight(form.weight())),
    }
}

/// `|a(T)| <= M_form(eps, eta) (4 det T)^exponent` evaluated at
/// `4 det T = n`.
pub fn cusp_coeff_bound(form: FormId, n: i64, params: BoundParams) -> Result<Float> {
    assert!(n >= 1, "cusp_coeff_bound needs N >= 1");
    let m = cusp_bound_constant(form, params)?;
    let e = cusp_bound_exponent(form, params)?;
    Ok(nudge_up(m * f(n as f64).pow(f(e))))
}

/// Explicit Eisenstein growth constant
/// `c_w = |4w (w-2)! zeta(w-1)^2 zeta(2w-3) zeta(w-2) /
/// (pi^(w-1) zeta(3-2w) B_w)|` with `|a(T)| <= c_w (4 det T)^(w-3/2)`.
pub fn eisenstein_bound_const(w: u32) -> Result<Float> {
    if !matches!(w, 4 | 6 | 10 | 12) {
        return Err(Error::UnsupportedWeight(w));
    }
    let wf = w as f64;
    let factorial = Float::with_val(BOUND_BITS, Integer::from(Integer::factorial(w - 2)));
    let num = f(4.0 * wf)
        * factorial
        * f(wf - 1.0).zeta().square()
        * f(2.0 * wf - 3.0).zeta()
        * f(wf - 2.0).zeta();
    let pi = Float::with_val(BOUND_BITS, rug::float::Constant::Pi);
    let zeta_neg = Float::with_val(BOUND_BITS, &zeta_odd_negative(w));
    let bw = Float::with_val(BOUND_BITS, &bernoulli(w));
    let den = pi.pow(f(wf - 1.0)) * zeta_neg * bw;
    Ok(nudge_up((num / den).abs()))
}

/// Trace-form Eisenstein bound `|a(T)| <= c_w Tr(T)^(2w-3)` (AGM:
/// `4 det T <= Tr(T)^2`).
pub fn eisenstein_trace_bound(w: u32, t: i64) -> Result<Float> {
    let c = eisenstein_bound_const(w)?;
    Ok(nudge_up(c * f(t as f64).pow((2 * w - 3) as i32)))
}

/// Bound on `|E_w(tau)|` for `delta = delta(tau)`, from integrating the
/// trace-form coefficient bound against the exponential decay:
/// `|E4| <= 1 + 80/d^8 + 144/d^7 + 76/d^6` and `|E6| <= 1 + 93/d^10`;
/// at `delta >= 1` these are below the stated constants 302 and 94.
pub fn eisenstein_magnitude_bound(w: u32, delta: &Float) -> Result<Float> {
    let d = Float::with_val(BOUND_BITS, delta);
    match w {
        4 => Ok(nudge_up(
            f(1.0) + f(80.0) / d.clone().pow(8) + f(144.0) / d.clone().pow(7) + f(76.0) / d.pow(6),
        )),
        6 => Ok(nudge_up(f(1.0) + f(93.0) / d.pow(10))),
        _ => Err(Error::UnsupportedWeight(w)),
    }
}

/// Magnitude bounds for the cusp forms on `delta(tau) >= 1`: 3487 for
/// chi10 and 361893 for chi12 (the `(eta, eps) = (1.37, 0.28)` values;
/// both are decreasing in `delta`, so the `delta = 1` constant is valid
/// throughout the region).
pub fn cusp_magnitude_bound(form: FormId, delta: &Float) -> Result<Float> {
    if delta.clone() < 1 {
        return Err(Error::BadBoundParams);
    }
    match form {
        FormId::Chi10 => Ok(f(3487.0)),
        FormId::Chi12 => Ok(f(361893.0)),
        _ => Err(Error::UnsupportedWeight(form.weight())),
    }
}

/// Upper bound for `C * integral_(B-1)^infinity t^p e^(-2 pi delta t) dt`.
///
/// With `s = 2 pi delta` and `pbar = ceil(p)` the closed form
///
/// ```text
/// C e^(-s x) sum_{j=0}^{pbar} (pbar!/j!) x^j / s^(pbar+1-j),   x = B - 1
/// ```
///
/// is exact for the integer exponent `pbar` and majorizes the `t^p`
/// integrand on `t >= 1`. For `B < 2` the slice `[x, 1]` is covered by the
/// crude bound `(1-x) e^(-s x)` (there `t^p <= 1`). Errors on `B < 1`.
pub fn tail_integral(c: &Float, p: f64, delta: &Float, b: i64) -> Result<Float> {
    if b < 1 {
        return Err(Error::BadTailRange(b));
    }
    assert!(p >= 0.0);
    let s = Float::with_val(BOUND_BITS, rug::float::Constant::Pi)
        * 2u32
        * Float::with_val(BOUND_BITS, delta);
    let pbar = p.ceil() as u32;
    let x = f((b - 1).max(1) as f64);
    // sum_{j=0}^{pbar} (pbar!/j!) x^j / s^(pbar+1-j)
    let mut sum = Float::new(BOUND_BITS);
    let mut falling = Integer::from(1);
    // Walk j downward: j = pbar gives falling factor 1.
    for j in (0..=pbar).rev() {
        let term =
            Float::with_val(BOUND_BITS, &falling) * x.clone().pow(j) / s.clone().pow(pbar + 1 - j);
        sum += term;
        if j > 0 {
            falling *= j;
        }
    }
    let exp_factor = (-Float::with_val(BOUND_BITS, &s * &x)).exp();
    let mut total = sum * exp_factor;
    if b == 1 {
        // Cover [0, 1] where rounding the exponent up is not a majorant.
        total += f(1.0);
    }
    Ok(nudge_up(total * c))
}

/// Minimal trace bound `B >= 3` with
/// `tail_integral(524093, 15, delta, B) <= 10^(-l)`.
pub fn b_for(delta: &Float, l: i64) -> i64 {
    let target = f(10.0).pow(-f(l as f64));
    let c = f(TAIL_COEFF);
    let mut b = 2i64;
    while b < 100_000 {
        if let Ok(t) = tail_integral(&c, TAIL_POWER, delta, b) {
            if t <= target {
                break;
            }
        }
        b += 1;
    }
    b.max(3)
}

/// Recompute the uniform tail coefficient from the chi12 bound formula at
/// `(eps, eta) = (0.1, 1.45)` and report it with its ratio to the pinned
/// 524093. The two must agree within a factor of 2.
pub fn verify_tail_constant() -> (Float, f64) {
    let params = BoundParams {
        epsilon: 0.1,
        eta: 1.45,
    };
    let m = cusp_bound_constant(FormId::Chi12, params).expect("chi12 constant");
    let ratio = (m.to_f64() / TAIL_COEFF).abs();
    (m, ratio)
}

/// Result of the `|chi10(tau)|` lower-bound certification.
#[derive(Clone, Debug)]
pub struct Chi10Certificate {
    /// Exponent with `|chi10(tau)| >= 10^(-n)` (certified) or the
    /// best-effort estimate from the deepest partial sum.
    pub n: i64,
    pub certified: bool,
    /// Traces included in the certifying partial sum.
    pub t0: i64,
    /// Absolute value of the partial sum, rounded down.
    pub partial_abs: Float,
    /// Real part of the partial sum (purely imaginary points give real sums).
    pub partial_re: Float,
    /// The tail majorant the partial sum was compared against.
    pub majorant: Float,
    /// The grid pair that produced the winning majorant.
    pub params: BoundParams,
}

fn certification_digits(delta_f64: f64, t0: i64) -> u32 {
    let decay_digits =
        (t0 + 2) as f64 * 2.0 * std::f64::consts::PI * delta_f64 / std::f64::consts::LN_10;
    (decay_digits.ceil() as u32).saturating_add(40)
}

/// Tail majorant for the chi10 sum beyond trace `t0`:
/// `10 * integral_{t0}^inf 2 M(eps, eta) t^(11 + eps + 2 eta)
/// e^(-2 pi t delta) dt`, minimized over the parameter grid.
fn chi10_tail_majorant(delta: &Float, t0: i64) -> Result<(Float, BoundParams)> {
    let mut best: Option<(Float, BoundParams)> = None;
    for (eps, eta) in PARAM_GRID {
        let params = BoundParams { epsilon: eps, eta };
        let m = cusp_bound_constant(FormId::Chi10, params)?;
        let c = f(20.0) * m;
        let p = 11.0 + eps + 2.0 * eta;
        let tail = tail_integral(&c, p, delta, t0 + 1)?;
        if best.as_ref().is_none_or(|(b, _)| tail < *b) {
            best = Some((tail, params));
        }
    }
    Ok(best.expect("non-empty grid"))
}

/// Tail majorant for the chi12 sum beyond trace `t0` (no factor 10: this
/// one feeds an upper bound, not a ratio test).
fn chi12_tail_majorant(delta: &Float, t0: i64) -> Result<Float> {
    let mut best: Option<Float> = None;
    for (eps, eta) in PARAM_GRID {
        let params = BoundParams { epsilon: eps, eta };
        let m = cusp_bound_constant(FormId::Chi12, params)?;
        let c = f(2.0) * m;
        let p = 13.0 + eps + 2.0 * eta;
        let tail = tail_integral(&c, p, delta, t0 + 1)?;
        if best.as_ref().is_none_or(|b| tail < *b) {
            best = Some(tail);
        }
    }
    Ok(best.expect("non-empty grid"))
}

/// Certify `|chi10(tau)| >= 10^(-n)` at an already-reduced point.
///
/// Starting from the trace-2 matrices, the partial sum `c` over traces
/// `<= t0` is compared against the grid-minimized majorant of everything
/// beyond `t0`; when `|c|` wins, `|chi10| >= 9/10 |c|` and
/// `n = ceil(-log10(0.9 |c|))`. The trace window escalates to
/// [`CERTIFICATION_TRACE_CAP`]; past that a best-effort uncertified `n`
/// is returned, or [`Error::Chi10NearZero`] when the partial sums stay
/// below the numeric noise floor.
pub fn chi10_lower_bound(point: &SiegelPoint, table: &CoeffTable) -> Result<Chi10Certificate> {
    let delta = point.delta()?;
    let delta_f64 = delta.to_f64();
    let mut last: Option<Chi10Certificate> = None;
    for t0 in 2..=CERTIFICATION_TRACE_CAP {
        let digits = certification_digits(delta_f64, t0);
        let pt = point.with_digits(digits);
        let sums = form_trace_sums(table, &pt, t0)?;
        let mut c = crate::cnum::CNum::new(pt.bits());
        for s in &sums {
            c = c.add(s);
        }
        let cabs = nudge_down(Float::with_val(BOUND_BITS, &c.abs()));
        let noise = f(10.0).pow(-(f(digits as f64) - f(12.0)));
        if cabs <= noise {
            last = None;
            continue;
        }
        let (majorant, params) = chi10_tail_majorant(&delta, t0)?;
        let cert = Chi10Certificate {
            n: neg_log10_ceil(&(cabs.clone() * f(0.9))),
            certified: cabs >= majorant,
            t0,
            partial_abs: cabs.clone(),
            partial_re: Float::with_val(BOUND_BITS, &c.re),
            majorant: majorant.clone(),
            params,
        };
        if cert.certified {
            return Ok(cert);
        }
        last = Some(cert);
    }
    match last {
        Some(cert) => Ok(cert),
        None => Err(Error::Chi10NearZero),
    }
}

/// Rigorous upper bound for `|chi12(tau)|`: the trace partial sum plus
/// the tail majorant.
pub fn chi12_upper_bound(point: &SiegelPoint, table: &CoeffTable, t0: i64) -> Result<Float> {
    let delta = point.delta()?;
    let digits = certification_digits(delta.to_f64(), t0);
    let pt = point.with_digits(digits);
    let sums = form_trace_sums(table, &pt, t0)?;
    let mut c = crate::cnum::CNum::new(pt.bits());
    for s in &sums {
        c = c.add(s);
    }
    let partial = nudge_up(Float::with_val(BOUND_BITS, &c.abs()));
    let tail = chi12_tail_majorant(&delta, t0)?;
    Ok(nudge_up(partial + tail))
}

/// The truncation / working-precision plan for one evaluation.
#[derive(Clone, Debug)]
pub struct PrecisionPlan {
    /// Certified lower rounding of `delta(tau)` at the reduced point.
    pub delta: Float,
    /// Requested output digits.
    pub k: u32,
    /// `|chi10(tau)| >= 10^(-n)`.
    pub n: i64,
    /// Whether `n` is certified (vs best-effort).
    pub certified: bool,
    /// Digits gained per chi12 factor: `|chi12(tau)| <= 10^(-gain)`.
    pub chi12_gain: i64,
    /// Working digits for the form values: `k + max{22, 1 + 6n - 5 gain}`.
    pub l: i64,
    /// Trace bound: all matrices with `Tr(T) <= B` enter the sums.
    pub b: i64,
    /// Decimal digits of the largest coefficient bound at trace `B`.
    pub coeff_bound_digits: i64,
    /// Working decimal precision for the point powers:
    /// `l + coeff_bound_digits + 15` guard digits.
    pub point_digits: u32,
    /// Trace window the certification used.
    pub t0: i64,
}

/// Largest coefficient-bound magnitude (decimal digits) over the four
/// evaluated forms at trace `b`.
fn coeff_bound_digits(b: i64) -> i64 {
    let params = BoundParams {
        epsilon: 0.1,
        eta: 1.45,
    };
    let mut worst = f(1.0);
    for w in [4u32, 6] {
        let bound = eisenstein_trace_bound(w, b).expect("weights 4, 6");
        if bound > worst {
            worst = bound;
        }
    }
    for form in [FormId::Chi10, FormId::Chi12] {
        let m = cusp_bound_constant(form, params).expect("cusp constant");
        let e = cusp_bound_exponent(form, params).expect("cusp exponent");
        let bound = m * f((b * b) as f64).pow(f(e));
        if bound > worst {
            worst = bound;
        }
    }
    let digits = worst.log10().to_f64().ceil() as i64;
    digits.max(1)
}

/// Build the evaluation plan for `k` requested digits at a reduced point.
///
/// The digit budget follows the precision-loss ledger: dividing by
/// `chi10^6` loses `6n` digits, multiplying by `chi12^5` recovers
/// `5 * gain` digits where `gain = floor(-log10 |chi12|_upper)` is what
/// the certified upper bound guarantees, and one extra digit absorbs the
/// constant factors; the budget never drops below the flat 22 digits the
/// product terms need. The trace bound solves the uniform tail
/// inequality for `10^(-l)`.
pub fn make_plan(
    point: &SiegelPoint,
    k: u32,
    chi10_table: &CoeffTable,
    chi12_table: &CoeffTable,
) -> Result<PrecisionPlan> {
    let delta = point.delta()?;
    let cert = chi10_lower_bound(point, chi10_table)?;
    let u12 = chi12_upper_bound(point, chi12_table, cert.t0)?;
    let gain = neg_log10_floor(&u12).max(0);
    let loss = 1 + 6 * cert.n - 5 * gain;
    let l = k as i64 + loss.max(22);
    let b = b_for(&delta, l);
    let cbd = coeff_bound_digits(b);
    let point_digits = (l + cbd + 15).max(32) as u32;
    Ok(PrecisionPlan {
        delta,
        k,
        n: cert.n,
        certified: cert.certified,
        chi12_gain: gain,
        l,
        b,
        coeff_bound_digits: cbd,
        point_digits,
        t0: cert.t0,
    })
}

/// 50-digit zeta cache for external callers (the Waldspurger module and
/// tests); values are computed once.
pub fn zeta_50(s: f64) -> Float {
    static CACHE: OnceLock<std::sync::Mutex<std::collections::HashMap<u64, Float>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| std::sync::Mutex::new(std::collections::HashMap::new()));
    let key = s.to_bits();
    let mut guard = cache.lock().unwrap();
    guard.entry(key).or_insert_with(|| f(s).zeta()).clone()
}
