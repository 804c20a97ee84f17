//! Arbitrary-precision real and complex scalars with an explicit digit
//! budget.
//!
//! Reals are MPFR floats ([`rug::Float`]); [`CNum`] is a complex number
//! stored as a real/imaginary pair at a common precision. Only the
//! operations the evaluator needs are provided: ring operations, division,
//! absolute value, and `e^(2 pi i z)`, plus decimal parsing and printing
//! helpers that keep every digit (the CLI never emits binary floats).

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::{Error, Result};

/// Bits of mantissa for a requested number of decimal digits, with a small
/// fixed slack.
pub fn digits_to_bits(digits: u32) -> u32 {
    // log2(10) = 3.3219...; +32 guard bits.
    (digits as f64 * 3.3219280948873626).ceil() as u32 + 32
}

/// A complex number over MPFR reals. Both parts carry the same precision.
#[derive(Clone, Debug)]
pub struct CNum {
    pub re: Float,
    pub im: Float,
}

impl CNum {
    pub fn new(prec: u32) -> Self {
        CNum {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn from_parts(re: Float, im: Float) -> Self {
        debug_assert_eq!(re.prec(), im.prec());
        CNum { re, im }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        CNum {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn from_rational(prec: u32, r: &Rational) -> Self {
        CNum {
            re: Float::with_val(prec, r),
            im: Float::new(prec),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    /// Round/extend to a new working precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        CNum {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn add(&self, other: &CNum) -> CNum {
        CNum {
            re: Float::with_val(self.prec(), &self.re + &other.re),
            im: Float::with_val(self.prec(), &self.im + &other.im),
        }
    }

    pub fn sub(&self, other: &CNum) -> CNum {
        CNum {
            re: Float::with_val(self.prec(), &self.re - &other.re),
            im: Float::with_val(self.prec(), &self.im - &other.im),
        }
    }

    pub fn neg(&self) -> CNum {
        CNum {
            re: Float::with_val(self.prec(), -&self.re),
            im: Float::with_val(self.prec(), -&self.im),
        }
    }

    pub fn mul(&self, other: &CNum) -> CNum {
        let p = self.prec();
        let re =
            Float::with_val(p, &self.re * &other.re) - Float::with_val(p, &self.im * &other.im);
        let im =
            Float::with_val(p, &self.re * &other.im) + Float::with_val(p, &self.im * &other.re);
        CNum {
            re: Float::with_val(p, re),
            im: Float::with_val(p, im),
        }
    }

    pub fn mul_float(&self, other: &Float) -> CNum {
        let p = self.prec();
        CNum {
            re: Float::with_val(p, &self.re * other),
            im: Float::with_val(p, &self.im * other),
        }
    }

    pub fn div(&self, other: &CNum) -> CNum {
        let p = self.prec();
        let den = other.norm_sqr();
        let re =
            Float::with_val(p, &self.re * &other.re) + Float::with_val(p, &self.im * &other.im);
        let im =
            Float::with_val(p, &self.im * &other.re) - Float::with_val(p, &self.re * &other.im);
        CNum {
            re: Float::with_val(p, re / &den),
            im: Float::with_val(p, im / &den),
        }
    }

    pub fn recip(&self) -> CNum {
        let p = self.prec();
        let one = CNum {
            re: Float::with_val(p, 1),
            im: Float::new(p),
        };
        one.div(self)
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.clone().square() + self.im.clone().square())
    }

    pub fn abs(&self) -> Float {
        self.norm_sqr().sqrt()
    }

    /// `exp(2 pi i z) = e^(-2 pi Im z) (cos(2 pi Re z) + i sin(2 pi Re z))`.
    pub fn exp_2pi_i(z: &CNum) -> CNum {
        let p = z.prec();
        let two_pi = Float::with_val(p, rug::float::Constant::Pi) * 2u32;
        let radius = (-Float::with_val(p, &two_pi * &z.im)).exp();
        let angle = Float::with_val(p, &two_pi * &z.re);
        let (sin, cos) = angle.sin_cos(Float::new(p));
        CNum {
            re: Float::with_val(p, &cos * &radius),
            im: Float::with_val(p, &sin * &radius),
        }
    }

    /// Integer powers via the stored ladder-free route (used only for small
    /// exponents in the final Igusa assembly).
    pub fn pow_u(&self, e: u32) -> CNum {
        let p = self.prec();
        let mut result = CNum {
            re: Float::with_val(p, 1),
            im: Float::new(p),
        };
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }
}

/// Parse an exact decimal literal (`-12.375e-2` style) into a [`Float`] at
/// the given precision, together with the number of significant digits it
/// states. Integer literals are exact and report `u32::MAX` digits.
pub fn parse_decimal(s: &str, prec: u32) -> Result<(Float, u32)> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::BadPointLiteral(s.into()));
    }
    let incomplete = Float::parse(t).map_err(|_| Error::BadPointLiteral(s.into()))?;
    let value = Float::with_val(prec, incomplete);
    // Count stated significant digits: mantissa digits, leading zeros
    // stripped.
    let mantissa: String = t
        .trim_start_matches(['+', '-'])
        .chars()
        .take_while(|c| *c != 'e' && *c != 'E')
        .filter(|c| c.is_ascii_digit() || *c == '.')
        .collect();
    let has_point = mantissa.contains('.');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let significant = digits.trim_start_matches('0').len() as u32;
    if digits.is_empty() {
        return Err(Error::BadPointLiteral(s.into()));
    }
    let stated = if has_point {
        significant.max(1)
    } else {
        u32::MAX
    };
    Ok((value, stated))
}

/// Format a real to `frac_digits` digits after the decimal point, rounded
/// to nearest, without exponent notation. Suited to the magnitudes the
/// Igusa values take; digits are never silently dropped.
pub fn decimal_string(x: &Float, frac_digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let prec = x.prec();
    let scale = Float::with_val(prec, 10u32).pow(frac_digits as u32);
    let scaled = Float::with_val(prec, x * &scale);
    let int = scaled
        .to_integer_round(Round::Nearest)
        .map(|(i, _)| i)
        .unwrap_or_default();
    let negative = int.cmp0() == std::cmp::Ordering::Less;
    let digits = Integer::from(int.abs_ref()).to_string();
    let (int_part, frac_part) = if digits.len() > frac_digits {
        let split = digits.len() - frac_digits;
        (digits[..split].to_string(), digits[split..].to_string())
    } else {
        ("0".to_string(), format!("{digits:0>frac_digits$}"))
    };
    let sign = if negative { "-" } else { "" };
    if frac_digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// `ceil(-log10(x))` for `0 < x < 1`-ish magnitudes: the exponent `n` with
/// `x >= 10^(-n)`, rounded the safe way for lower bounds.
pub fn neg_log10_ceil(x: &Float) -> i64 {
    let l = Float::with_val(x.prec(), x.log10_ref());
    let neg = -l;
    neg.ceil().to_f64() as i64
}

/// `floor(-log10(x))`: guaranteed digits of smallness of an upper bound.
pub fn neg_log10_floor(x: &Float) -> i64 {
    let l = Float::with_val(x.prec(), x.log10_ref());
    let neg = -l;
    neg.floor().to_f64() as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_field_ops() {
        let p = 128;
        let a = CNum::from_f64(p, 3.0, 4.0);
        let b = CNum::from_f64(p, 1.0, -2.0);
        let prod = a.mul(&b);
        assert_eq!(prod.re.to_f64(), 11.0);
        assert_eq!(prod.im.to_f64(), -2.0);
        let back = prod.div(&b);
        assert!((back.re.to_f64() - 3.0).abs() < 1e-30);
        assert!((back.im.to_f64() - 4.0).abs() < 1e-30);
        assert_eq!(a.abs().to_f64(), 5.0);
    }

    #[test]
    fn exp_of_pure_imaginary_argument() {
        // z = i y: e^(2 pi i z) = e^(-2 pi y), real.
        let p = 256;
        let z = CNum::from_f64(p, 0.0, 1.0);
        let q = CNum::exp_2pi_i(&z);
        let want = (-2.0 * std::f64::consts::PI).exp();
        assert!((q.re.to_f64() - want).abs() < 1e-18);
        assert!(q.im.to_f64().abs() < 1e-60);
    }

    #[test]
    fn exp_periodicity() {
        // e^(2 pi i (z+1)) = e^(2 pi i z).
        let p = 192;
        let z = CNum::from_f64(p, 0.3125, 0.75);
        let z1 = z.add(&CNum::from_f64(p, 1.0, 0.0));
        let a = CNum::exp_2pi_i(&z);
        let b = CNum::exp_2pi_i(&z1);
        let diff = a.sub(&b).abs();
        assert!(diff.to_f64() < 1e-50);
    }

    #[test]
    fn parse_and_count_digits() {
        let (v, d) = parse_decimal("2.4060038200", 128).unwrap();
        assert!((v.to_f64() - 2.40600382).abs() < 1e-12);
        assert_eq!(d, 11);
        let (_, d) = parse_decimal("-0.4595058410", 128).unwrap();
        assert_eq!(d, 10);
        let (v, d) = parse_decimal("83", 128).unwrap();
        assert_eq!(v.to_f64(), 83.0);
        assert_eq!(d, u32::MAX);
        assert!(parse_decimal("5i", 128).is_err());
        assert!(parse_decimal("", 128).is_err());
    }

    #[test]
    fn decimal_formatting() {
        let x = Float::with_val(128, -1.5);
        assert_eq!(decimal_string(&x, 3), "-1.500");
        let y = Float::with_val(256, 6202728393750.0f64);
        assert_eq!(decimal_string(&y, 1), "6202728393750.0");
        let z = Float::with_val(128, 0.0625);
        assert_eq!(decimal_string(&z, 4), "0.0625");
        assert_eq!(decimal_string(&z, 0), "0");
    }

    #[test]
    fn log10_helpers() {
        let x = Float::with_val(128, 1.28e-28);
        assert_eq!(neg_log10_ceil(&x), 28);
        assert_eq!(neg_log10_floor(&x), 27);
        let y = Float::with_val(128, 4.37e-29);
        assert_eq!(neg_log10_ceil(&y), 29);
        assert_eq!(neg_log10_floor(&y), 28);
    }
}
