//! Petersson-norm ratio estimates through Waldspurger's formula.
//!
//! The Shimura lifts of the half-integral cusp series `K10` and `K12` are
//! the weight-18 and weight-22 eigenforms `g18 = Delta E6` and
//! `g22 = Delta E10` (both spaces are one-dimensional). Waldspurger's
//! formula ties the squared coefficients of `K_w` to twisted central
//! L-values of the lift:
//!
//! ```text
//! |a(D)|^2 = (<g,g> / <f,f>) ((w-2)! / pi^(w-1)) L(g, chi_D, w-1) |D|^(w-3/2)
//! ```
//!
//! so each fundamental discriminant `D` with `a(D) != 0` yields the same
//! ratio `<g,g>/<f,f>`. The central value is computed by the exponentially
//! convergent sum
//!
//! ```text
//! L(g, chi_D, w-1) = (2/Gamma(w-1)) (2 pi/|D|)^(w-1)
//!                    sum_{n>=1} (D/n) c(n) phi_{w-2}(2 pi n / |D|)
//! ```
//!
//! with `phi_p(x) = integral_1^inf y^p e^(-xy) dy
//! = (p!/x^(p+1)) e^(-x) sum_{j<=p} x^j/j!` (closed form verified against
//! quadrature in the tests). Agreement of the ratio across discriminants
//! validates the series coefficients, the lifts and the L-machinery at
//! once; the ratios must stay below 75634 for `K10` and 1197339 for
//! `K12`.

use rug::{ops::Pow, Float, Integer, Rational};

use crate::arith::kronecker;
use crate::halfint::{bernoulli, cusp_series};
use crate::series::QSeries;
use crate::tables::FormId;
use crate::{Error, Result};

/// Working precision for the L-value sums.
const L_BITS: u32 = 320;

/// Classical (genus 1) Eisenstein series
/// `E_w = 1 - (2w/B_w) sum sigma_{w-1}(n) q^n` to order `n`.
pub fn classical_eisenstein(w: u32, n: usize) -> QSeries {
    let scale = -Rational::from(2 * w) / bernoulli(w);
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(Rational::from(1));
    for m in 1..=n {
        coeffs.push(scale.clone() * Rational::from(crate::arith::sigma_pow(w - 1, m as i64)));
    }
    QSeries::from_coeffs(coeffs)
}

/// The discriminant cusp form `Delta = (E4^3 - E6^2) / 1728` to order `n`.
pub fn delta_series(n: usize) -> QSeries {
    let e4 = classical_eisenstein(4, n);
    let e6 = classical_eisenstein(6, n);
    e4.pow(3).sub(&e6.pow(2)).scale(&Rational::from((1, 1728)))
}

/// The Shimura lift of `K_w`: `Delta * E6` (weight 18) for `w = 10` and
/// `Delta * E10` (weight 22) for `w = 12`.
pub fn shimura_lift(form: FormId, n: usize) -> Result<QSeries> {
    let delta = delta_series(n);
    match form {
        FormId::Chi10 => Ok(delta.mul(&classical_eisenstein(6, n))),
        FormId::Chi12 => Ok(delta.mul(&classical_eisenstein(10, n))),
        _ => Err(Error::UnsupportedWeight(form.weight())),
    }
}

/// `phi_p(x) = integral_1^inf y^p e^(-xy) dy` in closed form.
pub fn phi_tail(p: u32, x: &Float) -> Float {
    let prec = x.prec();
    let mut sum = Float::new(prec);
    let mut term = Float::with_val(prec, 1);
    let mut fact = Float::with_val(prec, 1);
    for j in 0..=p {
        if j > 0 {
            fact *= j;
            term = Float::with_val(prec, &term * x);
        }
        sum += Float::with_val(prec, &term / &fact);
    }
    let p_fact = Float::with_val(prec, Integer::from(Integer::factorial(p)));
    let front = p_fact / Float::with_val(prec, x).pow(p + 1);
    front * (-x.clone()).exp() * sum
}

/// Twisted central L-value `L(g, chi_D, w-1)` for the level-1 eigenform
/// `g` of weight `2w - 2`, by the exponentially convergent tail-integral
/// sum. `coeffs` are the Fourier coefficients of `g` starting at `q^1`.
pub fn twisted_central_value(coeffs: &QSeries, w: u32, d: i64) -> Result<Float> {
    assert!(
        d < 0,
        "twisted_central_value expects a negative discriminant"
    );
    let abs_d = Float::with_val(L_BITS, -d);
    let two_pi = Float::with_val(L_BITS, rug::float::Constant::Pi) * 2u32;
    let ratio = Float::with_val(L_BITS, &two_pi / &abs_d);
    let mut sum = Float::new(L_BITS);
    let mut converged = false;
    for n in 1..coeffs.len() {
        let chi = kronecker(d, n as i64);
        if chi == 0 {
            continue;
        }
        let x = Float::with_val(L_BITS, &ratio * n as u32);
        let phi = phi_tail(w - 2, &x);
        let c = Float::with_val(L_BITS, &coeffs.coeff(n));
        let term = c * phi;
        let scaled = if chi > 0 { term } else { -term };
        sum += &scaled;
        // The terms decay like e^(-2 pi n / |D|); stop when far below the
        // target resolution.
        if scaled.clone().abs() < Float::with_val(L_BITS, Float::i_exp(1, -(L_BITS as i32) + 40))
            && n as i64 > -4 * d
        {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::TableRange {
            need: coeffs.len() as i64,
            have: coeffs.len() as i64 - 1,
        });
    }
    let gamma = Float::with_val(L_BITS, Integer::from(Integer::factorial(w - 2)));
    Ok(Float::with_val(L_BITS, 2) / gamma * ratio.pow(w - 1) * sum)
}

/// One discriminant's contribution to the ratio report.
#[derive(Clone, Debug)]
pub struct RatioSample {
    pub d: i64,
    /// `K_w` coefficient at `|d|`.
    pub coeff: Rational,
    pub l_value: Float,
    pub ratio: Float,
}

/// Report of the Waldspurger consistency check for one form.
#[derive(Clone, Debug)]
pub struct RatioReport {
    pub form: FormId,
    pub samples: Vec<RatioSample>,
    /// Discriminants skipped because the coefficient vanishes.
    pub skipped: Vec<i64>,
    pub max_ratio: Float,
    /// Relative spread `(max - min) / max` across the samples.
    pub relative_spread: Float,
    /// The Petersson-ratio bound the samples must stay below.
    pub bound: f64,
}

impl RatioReport {
    pub fn passes(&self) -> bool {
        !self.samples.is_empty()
            && self.max_ratio.to_f64() <= self.bound
            && self.relative_spread.to_f64() < 1.0e-4
    }
}

/// Estimate `<g,g>/<f,f>` via Waldspurger's formula over the given
/// fundamental discriminants and check mutual consistency.
pub fn ratio_check(form: FormId, discriminants: &[i64]) -> Result<RatioReport> {
    let (w, bound) = match form {
        FormId::Chi10 => (10u32, 75634.0),
        FormId::Chi12 => (12u32, 1197339.0),
        _ => return Err(Error::UnsupportedWeight(form.weight())),
    };
    // Series length: the L-sums need ~|D| * bits terms to bottom out.
    let max_abs = discriminants.iter().map(|d| -d).max().unwrap_or(4) as usize;
    let len = 64 * max_abs + 64;
    let lift = shimura_lift(form, len)?;
    let k_series = cusp_series(w, max_abs)?;

    let pi = Float::with_val(L_BITS, rug::float::Constant::Pi);
    let gamma = Float::with_val(L_BITS, Integer::from(Integer::factorial(w - 2)));
    let mut samples = Vec::new();
    let mut skipped = Vec::new();
    for &d in discriminants {
        assert!(d < 0);
        let coeff = k_series.coeff((-d) as usize);
        if coeff.cmp0() == std::cmp::Ordering::Equal {
            skipped.push(d);
            continue;
        }
        let l = twisted_central_value(&lift, w, d)?;
        // ratio = |a(D)|^2 pi^(w-1) / ((w-2)! L |D|^(w-3/2)).
        let a_sq = Float::with_val(L_BITS, &coeff).square();
        let d_pow = Float::with_val(L_BITS, -d).pow(Float::with_val(L_BITS, w as f64 - 1.5));
        let ratio = a_sq * pi.clone().pow(w - 1) / (gamma.clone() * l.clone() * d_pow);
        samples.push(RatioSample {
            d,
            coeff,
            l_value: l,
            ratio,
        });
    }
    let mut max_ratio = Float::new(L_BITS);
    let mut min_ratio: Option<Float> = None;
    for s in &samples {
        if s.ratio > max_ratio {
            max_ratio = s.ratio.clone();
        }
        if min_ratio.as_ref().is_none_or(|m| s.ratio < *m) {
            min_ratio = Some(s.ratio.clone());
        }
    }
    let spread = match (&min_ratio, samples.is_empty()) {
        (Some(min), false) => Float::with_val(L_BITS, &max_ratio - min) / max_ratio.clone(),
        _ => Float::with_val(L_BITS, 1),
    };
    Ok(RatioReport {
        form,
        samples,
        skipped,
        max_ratio,
        relative_spread: spread,
        bound,
    })
}
