//! Half-integral-weight generating series and the L-value oracle.
//!
//! Two independent routes to the same numbers live here:
//!
//! * the **series route**: Cohen's functions `H4, H6, H10, H12` (weight
//!   `w - 1/2` forms on `Gamma0(4)`) and the cusp-form series `K10, K12`
//!   (weights 19/2 and 23/2), built as isobaric polynomials in `theta` and
//!   `theta_tilde`;
//! * the **L-value route**: `alpha_w(D)` assembled from generalized
//!   Bernoulli numbers through `L_{D0}(2-w)` and a Möbius/divisor sum.
//!
//! The coefficient of `q^n` in `H_w` is `alpha_w(-n)`, so the two routes
//! must agree coefficient for coefficient; that equivalence is the central
//! test of this module and part of the acceptance suite.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rug::{ops::Pow, Integer, Rational};

use crate::arith::{
    divisors, fundamental_decompose, is_fundamental_discriminant, kronecker, moebius, sigma_pow,
};
use crate::series::QSeries;
use crate::{Error, Result};

/// Which generating series a [`HalfIntTable`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TableTag {
    H4,
    H6,
    H10,
    H12,
    K10,
    K12,
}

impl TableTag {
    pub fn name(self) -> &'static str {
        match self {
            TableTag::H4 => "H4",
            TableTag::H6 => "H6",
            TableTag::H10 => "H10",
            TableTag::H12 => "H12",
            TableTag::K10 => "K10",
            TableTag::K12 => "K12",
        }
    }
}

/// Coefficients of one half-integral-weight generating series.
///
/// `coeffs[n]` is the coefficient of `q^n`: `alpha_w(-n)` for the Cohen
/// tables, `c_{phi_w,1}(n)` for the cusp tables. Both vanish unless
/// `n = 0, 3 mod 4`.
#[derive(Clone, Debug)]
pub struct HalfIntTable {
    pub tag: TableTag,
    series: QSeries,
}

impl HalfIntTable {
    pub fn coeff(&self, n: usize) -> Rational {
        self.series.coeff(n)
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    pub fn series(&self) -> &QSeries {
        &self.series
    }
}

/// `-2w / B_w`, the scale that turns `H_w` into the Jacobi Eisenstein
/// coefficient series: 240, -504, -264, 65520/691 for w = 4, 6, 10, 12.
pub fn eisenstein_scale(w: u32) -> Result<Rational> {
    valid_weight(w)?;
    let bw = bernoulli(w);
    Ok(-Rational::from(2 * w) / bw)
}

/// The normalization applied to `K_w` inside the cusp forms:
/// `chi10 = Psi(-phi_{10,1}/4)` and `chi12 = Psi(phi_{12,1}/12)`.
pub fn cusp_scale(w: u32) -> Result<Rational> {
    match w {
        10 => Ok(Rational::from((-1, 4))),
        12 => Ok(Rational::from((1, 12))),
        _ => Err(Error::UnsupportedWeight(w)),
    }
}

fn valid_weight(w: u32) -> Result<()> {
    if matches!(w, 4 | 6 | 10 | 12) {
        Ok(())
    } else {
        Err(Error::UnsupportedWeight(w))
    }
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

/// Cohen's function `H_w` to order `n`: the isobaric theta polynomial
///
/// ```text
/// H4  = (theta^7 + 7 theta^3 ttilde) / 8
/// H6  = (-theta^11 + 22 theta^7 ttilde + 11 theta^3 ttilde^2) / 32
/// H10 = (-43867 theta^19 + 725876 theta^15 ttilde + 12824886 theta^11 ttilde^2
///        + 8845412 theta^7 ttilde^3 + 107597 theta^3 ttilde^4) / 22459904
/// H12 = (77683 theta^23 + 212405 theta^19 ttilde + 38627902 theta^15 ttilde^2
///        + 100820362 theta^11 ttilde^3 + 19313951 theta^7 ttilde^4
///        + 42481 theta^3 ttilde^5) / 159094784
/// ```
///
/// The coefficient of `q^n` equals `alpha_w(-n)`; in particular the
/// constant term is 1.
pub fn cohen_series(w: u32, n: usize) -> Result<HalfIntTable> {
    valid_weight(w)?;
    let (tag, terms): (TableTag, Vec<(Rational, u32, u32)>) = match w {
        4 => (TableTag::H4, vec![(rat(1, 8), 7, 0), (rat(7, 8), 3, 1)]),
        6 => (
            TableTag::H6,
            vec![
                (rat(-1, 32), 11, 0),
                (rat(22, 32), 7, 1),
                (rat(11, 32), 3, 2),
            ],
        ),
        10 => {
            let d = 22459904;
            (
                TableTag::H10,
                vec![
                    (rat(-43867, d), 19, 0),
                    (rat(725876, d), 15, 1),
                    (rat(12824886, d), 11, 2),
                    (rat(8845412, d), 7, 3),
                    (rat(107597, d), 3, 4),
                ],
            )
        }
        12 => {
            let d = 159094784;
            (
                TableTag::H12,
                vec![
                    (rat(77683, d), 23, 0),
                    (rat(212405, d), 19, 1),
                    (rat(38627902, d), 15, 2),
                    (rat(100820362, d), 11, 3),
                    (rat(19313951, d), 7, 4),
                    (rat(42481, d), 3, 5),
                ],
            )
        }
        _ => unreachable!(),
    };
    Ok(HalfIntTable {
        tag,
        series: QSeries::isobaric_combine(&terms, n),
    })
}

/// The Jacobi cusp-form series `K10, K12` to order `n`:
///
/// ```text
/// K10 = (theta^15 ttilde - 3 theta^11 ttilde^2 + 3 theta^7 ttilde^3
///        - theta^3 ttilde^4) / 4096
/// K12 = (5 theta^19 ttilde - 16 theta^15 ttilde^2 + 18 theta^11 ttilde^3
///        - 8 theta^7 ttilde^4 + theta^3 ttilde^5) / 16384
/// ```
///
/// The coefficient of `q^k` is `c_{phi_w,1}(k)`; the constant term vanishes.
pub fn cusp_series(w: u32, n: usize) -> Result<HalfIntTable> {
    let (tag, terms): (TableTag, Vec<(Rational, u32, u32)>) = match w {
        10 => (
            TableTag::K10,
            vec![
                (rat(1, 4096), 15, 1),
                (rat(-3, 4096), 11, 2),
                (rat(3, 4096), 7, 3),
                (rat(-1, 4096), 3, 4),
            ],
        ),
        12 => (
            TableTag::K12,
            vec![
                (rat(5, 16384), 19, 1),
                (rat(-16, 16384), 15, 2),
                (rat(18, 16384), 11, 3),
                (rat(-8, 16384), 7, 4),
                (rat(1, 16384), 3, 5),
            ],
        ),
        _ => return Err(Error::UnsupportedWeight(w)),
    };
    Ok(HalfIntTable {
        tag,
        series: QSeries::isobaric_combine(&terms, n),
    })
}

/// Ordinary Bernoulli number `B_k` (convention `B_1 = -1/2`), from the
/// exact expansion of `t / (e^t - 1)`. Memoized.
pub fn bernoulli(k: u32) -> Rational {
    static CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    let mut guard = cache.lock().unwrap();
    if guard.len() <= k as usize {
        // (e^t - 1)/t = sum t^m / (m+1)!, invert and read off coefficients.
        let order = (k as usize).max(guard.len().saturating_sub(1)) + 8;
        let mut denom = Vec::with_capacity(order + 1);
        let mut fact = Integer::from(1);
        for m in 0..=order {
            fact *= (m + 1) as u32;
            denom.push(Rational::from((Integer::from(1), fact.clone())));
        }
        let inv = QSeries::from_coeffs(denom).inverse();
        let mut fact = Integer::from(1);
        let mut values = Vec::with_capacity(order + 1);
        for m in 0..=order {
            if m > 0 {
                fact *= m as u32;
            }
            values.push(inv.coeff(m) * Rational::from(&fact));
        }
        *guard = values;
    }
    guard[k as usize].clone()
}

/// Generalized Bernoulli number `B_k(chi_n)` for the quadratic character
/// `chi_n = (d0/.)` of conductor `n = |d0|`, where `d0` is 1 or a negative
/// fundamental discriminant.
///
/// Computed by exact power-series division of the defining generating
/// function `sum_{r=1..n} chi(r) t e^{rt} / (e^{nt} - 1)` to order `k`;
/// no floating point is involved. Results are memoized per `(d0, k)`.
pub fn gen_bernoulli(d0: i64, k: u32) -> Result<Rational> {
    if !(d0 == 1 || (d0 < 0 && is_fundamental_discriminant(d0))) {
        return Err(Error::NonFundamental(d0));
    }
    static CACHE: OnceLock<Mutex<HashMap<(i64, u32), Rational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&(d0, k)) {
        return Ok(v.clone());
    }

    let n = d0.unsigned_abs() as u32;
    let order = k as usize;
    // Numerator: t * sum_r chi(r) e^{rt} = sum_m (sum_r chi(r) r^m) t^{m+1}/m!.
    // Denominator: e^{nt} - 1 = n t * u(t), u(t) = sum_m (nt)^m / (m+1)!.
    // Quotient = (1/n) * [sum_m S_m t^m / m!] * u(t)^{-1}.
    let mut char_sums = vec![Integer::new(); order + 1];
    for r in 1..=n as i64 {
        let chi = kronecker(d0, r);
        if chi == 0 {
            continue;
        }
        let mut rpow = Integer::from(1);
        for sum in char_sums.iter_mut() {
            if chi > 0 {
                *sum += &rpow;
            } else {
                *sum -= &rpow;
            }
            rpow *= r;
        }
    }
    let mut fact = Integer::from(1);
    let mut num = Vec::with_capacity(order + 1);
    let mut unit = Vec::with_capacity(order + 1);
    let mut npow = Integer::from(1);
    let mut factp1 = Integer::from(1);
    for (m, char_sum) in char_sums.iter().enumerate() {
        if m > 0 {
            fact *= m as u32;
            npow *= n;
        }
        factp1 *= (m + 1) as u32;
        num.push(Rational::from((char_sum.clone(), fact.clone())));
        unit.push(Rational::from((npow.clone(), factp1.clone())));
    }
    let quotient = QSeries::from_coeffs(num)
        .mul(&QSeries::from_coeffs(unit).inverse())
        .scale(&Rational::from((1, n)));

    // B_k(chi) = k! * [t^k] quotient; fill the cache for all indices <= k.
    let mut fact = Integer::from(1);
    let mut guard = cache.lock().unwrap();
    for m in 0..=order {
        if m > 0 {
            fact *= m as u32;
        }
        let val = quotient.coeff(m) * Rational::from(&fact);
        guard.entry((d0, m as u32)).or_insert(val);
    }
    Ok(guard[&(d0, k)].clone())
}

/// `L_{d0}(2 - w) = -B_{w-1}(chi_{d0}) / (w - 1)` for `w >= 2`.
pub fn lvalue(d0: i64, w: u32) -> Result<Rational> {
    assert!(w >= 2, "lvalue needs w >= 2");
    let b = gen_bernoulli(d0, w - 1)?;
    Ok(-b / Rational::from(w - 1))
}

/// `zeta(3 - 2w) = -B_{2w-2} / (2w - 2)`, exactly.
pub fn zeta_odd_negative(w: u32) -> Rational {
    -bernoulli(2 * w - 2) / Rational::from(2 * w - 2)
}

/// `alpha_w(D)` by the L-value route: the independent oracle against
/// [`cohen_series`].
///
/// `alpha_w(0) = 1`; for `D < 0` a discriminant with `D = D0 f^2`,
///
/// ```text
/// alpha_w(D) = L_{D0}(2-w) / zeta(3-2w)
///              * sum_{d | f} mu(d) (D0/d) d^(w-2) sigma_{2w-3}(f/d)
/// ```
///
/// and `alpha_w(D) = 0` when `D < 0` is not a discriminant.
pub fn alpha_direct(w: u32, d: i64) -> Result<Rational> {
    valid_weight(w)?;
    if d == 0 {
        return Ok(Rational::from(1));
    }
    assert!(d < 0, "alpha_direct: D must be <= 0");
    if !matches!(d.rem_euclid(4), 0 | 1) {
        return Ok(Rational::new());
    }
    let (d0, f) = fundamental_decompose(d);
    let l = lvalue(d0, w)?;
    let mut sum = Rational::new();
    for e in divisors(f) {
        let mu = moebius(e);
        if mu == 0 {
            continue;
        }
        let chi = kronecker(d0, e);
        if chi == 0 {
            continue;
        }
        let sign = mu * chi;
        let term = Integer::from(e).pow(w - 2) * sigma_pow(2 * w - 3, f / e);
        if sign > 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(l * sum / zeta_odd_negative(w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), Rational::from(1));
        assert_eq!(bernoulli(1), Rational::from((-1, 2)));
        assert_eq!(bernoulli(2), Rational::from((1, 6)));
        assert_eq!(bernoulli(4), Rational::from((-1, 30)));
        assert_eq!(bernoulli(6), Rational::from((1, 42)));
        assert_eq!(bernoulli(10), Rational::from((5, 66)));
        assert_eq!(bernoulli(12), Rational::from((-691, 2730)));
        assert_eq!(bernoulli(18), Rational::from((43867, 798)));
        assert_eq!(bernoulli(22), Rational::from((854513, 138)));
    }

    #[test]
    fn eisenstein_scales() {
        assert_eq!(eisenstein_scale(4).unwrap(), Rational::from(240));
        assert_eq!(eisenstein_scale(6).unwrap(), Rational::from(-504));
        assert_eq!(eisenstein_scale(10).unwrap(), Rational::from(-264));
        assert_eq!(eisenstein_scale(12).unwrap(), Rational::from((65520, 691)));
        assert!(eisenstein_scale(8).is_err());
    }

    #[test]
    fn gen_bernoulli_trivial_character_is_ordinary() {
        assert_eq!(gen_bernoulli(1, 2).unwrap(), Rational::from((1, 6)));
        assert_eq!(gen_bernoulli(1, 12).unwrap(), Rational::from((-691, 2730)));
        // k = 1 differs from the ordinary convention: te^t/(e^t-1) gives +1/2.
        assert_eq!(gen_bernoulli(1, 1).unwrap(), Rational::from((1, 2)));
    }

    #[test]
    fn gen_bernoulli_small_characters() {
        // Classical values for conductors 3 and 4.
        assert_eq!(gen_bernoulli(-3, 3).unwrap(), Rational::from((2, 3)));
        assert_eq!(gen_bernoulli(-4, 3).unwrap(), Rational::from((3, 2)));
    }

    #[test]
    fn gen_bernoulli_rejects_non_fundamental() {
        assert!(gen_bernoulli(-12, 3).is_err());
        assert!(gen_bernoulli(5, 3).is_err());
        assert!(gen_bernoulli(0, 3).is_err());
    }

    #[test]
    fn lvalue_matches_alpha_assembly() {
        // L_{-4}(-2) = -B_3(chi_4)/3 = -1/2, and alpha_4(-4) = 126.
        assert_eq!(lvalue(-4, 4).unwrap(), Rational::from((-1, 2)));
        assert_eq!(alpha_direct(4, -4).unwrap(), Rational::from(126));
        // L_{-3}(-2) = -2/9 gives alpha_4(-3) = 56.
        assert_eq!(lvalue(-3, 4).unwrap(), Rational::from((-2, 9)));
        assert_eq!(alpha_direct(4, -3).unwrap(), Rational::from(56));
    }

    #[test]
    fn alpha_small_values() {
        assert_eq!(alpha_direct(4, 0).unwrap(), Rational::from(1));
        assert_eq!(alpha_direct(4, -7).unwrap(), Rational::from(576));
        assert_eq!(alpha_direct(4, -8).unwrap(), Rational::from(756));
        assert_eq!(alpha_direct(4, -11).unwrap(), Rational::from(1512));
        assert_eq!(alpha_direct(4, -16).unwrap(), Rational::from(4158));
        // Content-2 assembly for N = 16: alpha(-16) + 8 alpha(-4) = 5166.
        let v = alpha_direct(4, -16).unwrap() + Rational::from(8) * alpha_direct(4, -4).unwrap();
        assert_eq!(v, Rational::from(5166));
        // Non-discriminants vanish.
        assert_eq!(alpha_direct(4, -1).unwrap(), Rational::new());
        assert_eq!(alpha_direct(4, -2).unwrap(), Rational::new());
        assert_eq!(alpha_direct(6, -5).unwrap(), Rational::new());
    }

    #[test]
    fn cohen_constant_terms() {
        for w in [4u32, 6, 10, 12] {
            let h = cohen_series(w, 4).unwrap();
            assert_eq!(h.coeff(0), Rational::from(1), "w={w}");
        }
    }

    #[test]
    fn scaled_h4_fixture() {
        let h = cohen_series(4, 12).unwrap();
        let scale = eisenstein_scale(4).unwrap();
        let want: [(usize, i64); 6] = [
            (0, 240),
            (3, 13440),
            (4, 30240),
            (7, 138240),
            (8, 181440),
            (11, 362880),
        ];
        for (n, v) in want {
            assert_eq!(h.coeff(n) * scale.clone(), Rational::from(v), "n={n}");
        }
        for n in [1usize, 2, 5, 6, 9, 10] {
            assert_eq!(h.coeff(n), Rational::new(), "n={n}");
        }
    }

    #[test]
    fn scaled_h6_fixture() {
        let h = cohen_series(6, 10).unwrap();
        let scale = eisenstein_scale(6).unwrap();
        let want: [(usize, i64); 5] = [
            (0, -504),
            (3, 44352),
            (4, 166320),
            (7, 2128896),
            (8, 3792096),
        ];
        for (n, v) in want {
            assert_eq!(h.coeff(n) * scale.clone(), Rational::from(v), "n={n}");
        }
    }

    #[test]
    fn k10_fixture() {
        let k = cusp_series(10, 12).unwrap();
        let scale = cusp_scale(10).unwrap();
        // (-1/4) K10 = -1/4 q^3 + 1/2 q^4 + 4 q^7 - 9 q^8 - 99/4 q^11 + ...
        let want: [(usize, (i64, i64)); 5] = [
            (3, (-1, 4)),
            (4, (1, 2)),
            (7, (4, 1)),
            (8, (-9, 1)),
            (11, (-99, 4)),
        ];
        for (n, v) in want {
            assert_eq!(k.coeff(n) * scale.clone(), Rational::from(v), "n={n}");
        }
        for n in 0..=2 {
            assert_eq!(k.coeff(n), Rational::new(), "n={n}");
        }
    }

    #[test]
    fn k12_fixture() {
        let k = cusp_series(12, 12).unwrap();
        let scale = cusp_scale(12).unwrap();
        // (1/12) K12 = 1/12 q^3 + 5/6 q^4 - 22/3 q^7 - 11 q^8 + 425/4 q^11 + ...
        let want: [(usize, (i64, i64)); 5] = [
            (3, (1, 12)),
            (4, (5, 6)),
            (7, (-22, 3)),
            (8, (-11, 1)),
            (11, (425, 4)),
        ];
        for (n, v) in want {
            assert_eq!(k.coeff(n) * scale.clone(), Rational::from(v), "n={n}");
        }
        assert_eq!(k.coeff(0), Rational::new());
    }

    #[test]
    fn cusp_series_rejects_other_weights() {
        assert!(cusp_series(4, 4).is_err());
        assert!(cohen_series(8, 4).is_err());
    }

    #[test]
    fn support_is_discriminants_only() {
        for w in [4u32, 6, 10, 12] {
            let h = cohen_series(w, 101).unwrap();
            let k = if w >= 10 {
                Some(cusp_series(w, 101).unwrap())
            } else {
                None
            };
            for n in 0..=101usize {
                if matches!(n % 4, 1 | 2) {
                    assert_eq!(h.coeff(n), Rational::new(), "H{w} n={n}");
                    if let Some(k) = &k {
                        assert_eq!(k.coeff(n), Rational::new(), "K{w} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn oracle_equivalence_modest_range() {
        // The acceptance suite runs the full range 0..=500; keep the unit
        // test quick.
        for w in [4u32, 6, 10, 12] {
            let h = cohen_series(w, 120).unwrap();
            for n in 0..=120usize {
                let direct = alpha_direct(w, -(n as i64)).unwrap();
                assert_eq!(h.coeff(n), direct, "w={w} n={n}");
            }
        }
    }
}
