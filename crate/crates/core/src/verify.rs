//! Self-check suites: oracle equivalence, denominator discipline, bound
//! domination, Spezialschar consistency against Eisenstein products, and
//! the Waldspurger ratio comparison.
//!
//! Each check returns a small report struct with a `passes` flag plus the
//! observed extremes, so the CLI `verify` command and the acceptance tests
//! share one implementation.

use rug::{ops::Pow, Integer, Rational};

use crate::arith::isqrt;
use crate::bounds::{cusp_coeff_bound, eisenstein_bound_const, BoundParams};
use crate::halfint::{alpha_direct, bernoulli, cohen_series};
use crate::tables::{CoeffTable, FormId};
use crate::Result;

/// Outcome of the cohen-series vs L-value oracle comparison.
#[derive(Clone, Debug)]
pub struct OracleReport {
    pub max_n: usize,
    pub weights: Vec<u32>,
    pub mismatches: Vec<(u32, usize)>,
}

impl OracleReport {
    pub fn passes(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compare every Cohen-series coefficient against the generalized
/// Bernoulli route, exactly, for `0 <= n <= max_n`.
pub fn oracle_equivalence(max_n: usize) -> Result<OracleReport> {
    let weights = vec![4u32, 6, 10, 12];
    let mut mismatches = Vec::new();
    for &w in &weights {
        let h = cohen_series(w, max_n)?;
        for n in 0..=max_n {
            let direct = alpha_direct(w, -(n as i64))?;
            if h.coeff(n) != direct {
                mismatches.push((w, n));
            }
        }
    }
    Ok(OracleReport {
        max_n,
        weights,
        mismatches,
    })
}

/// Outcome of the denominator-discipline check.
#[derive(Clone, Debug)]
pub struct DenominatorReport {
    pub nmax: i64,
    /// Entries whose denominator does not divide `n_w * n_{2w-2}`.
    pub violations: Vec<(FormId, i64, i64)>,
    /// Non-integer entries for weights 4 and 6 (must be empty).
    pub non_integer_low_weight: Vec<(FormId, i64, i64)>,
}

impl DenominatorReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty() && self.non_integer_low_weight.is_empty()
    }
}

/// Bernoulli-numerator bound: every Eisenstein entry lies in
/// `(1/(n_w n_{2w-2})) Z`; for weights 4 and 6 every entry is an integer.
pub fn denominator_discipline(nmax: i64) -> Result<DenominatorReport> {
    let mut violations = Vec::new();
    let mut non_integer = Vec::new();
    for form in [FormId::E4, FormId::E6, FormId::E10, FormId::E12] {
        let w = form.weight();
        let bound = bernoulli(w).numer().clone().abs() * bernoulli(2 * w - 2).numer().clone().abs();
        let table = CoeffTable::build(form, nmax, nmax)?;
        let mut check = |value: &Rational, n: i64, d: i64| {
            if !bound.is_divisible(value.denom()) {
                violations.push((form, n, d));
            }
            if matches!(w, 4 | 6) && *value.denom() != 1 {
                non_integer.push((form, n, d));
            }
        };
        for n in 1..=nmax {
            for (i, v) in table.row(n)?.iter().enumerate() {
                check(v, n, (i + 1) as i64);
            }
        }
        for t in 1..=nmax {
            let v = table.degenerate(t)?;
            check(&v, 0, t);
        }
    }
    Ok(DenominatorReport {
        nmax,
        violations,
        non_integer_low_weight: non_integer,
    })
}

/// Outcome of the coefficient-bound domination check.
#[derive(Clone, Debug)]
pub struct DominationReport {
    pub nmax: i64,
    pub params: BoundParams,
    pub violations: Vec<(FormId, i64, i64)>,
    /// Largest observed `|a(T)| / bound` per form.
    pub max_fill: Vec<(FormId, f64)>,
}

impl DominationReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check that the explicit coefficient bounds dominate every stored table
/// entry: the cusp bound with the given `(eps, eta)` for `chi10, chi12`,
/// and the growth constant `c_w N^(w-3/2)` for the Eisenstein series.
pub fn bound_domination(nmax: i64, params: BoundParams) -> Result<DominationReport> {
    let mut violations = Vec::new();
    let mut max_fill = Vec::new();
    for form in FormId::ALL {
        let table = CoeffTable::build(form, nmax, 0)?;
        let w = form.weight();
        let mut worst = 0.0f64;
        for n in 1..=nmax {
            let row = table.row(n)?;
            if row.is_empty() {
                continue;
            }
            let bound = if form.is_cusp() {
                cusp_coeff_bound(form, n, params)?
            } else {
                let c = eisenstein_bound_const(w)?;
                c * rug::Float::with_val(200, n).pow(rug::Float::with_val(200, w as f64 - 1.5))
            };
            for (i, v) in row.iter().enumerate() {
                let abs = v.clone().abs();
                let vf = rug::Float::with_val(200, &abs);
                let fill = (vf.clone() / bound.clone()).to_f64();
                if fill > worst {
                    worst = fill;
                }
                if vf > bound {
                    violations.push((form, n, (i + 1) as i64));
                }
            }
        }
        max_fill.push((form, worst));
    }
    Ok(DominationReport {
        nmax,
        params,
        violations,
        max_fill,
    })
}

/// A Siegel q-expansion viewed as a memoized coefficient function on
/// matrices `(a, b, c)`, supporting pointwise products (the convolution
/// over splittings `T = T1 + T2` with both parts semi-definite).
pub struct SiegelSeries<'a> {
    source: Box<dyn Fn(i64, i64, i64) -> Result<Rational> + 'a>,
    memo: std::cell::RefCell<std::collections::HashMap<(i64, i64, i64), Rational>>,
}

impl<'a> SiegelSeries<'a> {
    pub fn from_table(table: &'a CoeffTable) -> SiegelSeries<'a> {
        SiegelSeries {
            source: Box::new(move |a, b, c| table.coeff_for_matrix(a, b, c)),
            memo: std::cell::RefCell::new(std::collections::HashMap::new()),
        }
    }

    pub fn coeff(&self, a: i64, b: i64, c: i64) -> Result<Rational> {
        if let Some(v) = self.memo.borrow().get(&(a, b, c)) {
            return Ok(v.clone());
        }
        let v = (self.source)(a, b, c)?;
        self.memo.borrow_mut().insert((a, b, c), v.clone());
        Ok(v)
    }

    /// Coefficient of the product `f * g` at `T`, by convolving over all
    /// decompositions `T = T1 + T2` into positive semi-definite halves.
    pub fn product_coeff(
        f: &SiegelSeries,
        g: &SiegelSeries,
        a: i64,
        b: i64,
        c: i64,
    ) -> Result<Rational> {
        let mut acc = Rational::new();
        for a1 in 0..=a {
            for c1 in 0..=c {
                let bmax = isqrt(4 * a1 * c1);
                for b1 in -bmax..=bmax {
                    let b2 = b - b1;
                    let (a2, c2) = (a - a1, c - c1);
                    if b2 * b2 > 4 * a2 * c2 {
                        continue;
                    }
                    let x = f.coeff(a1, b1, c1)?;
                    if x.cmp0() == std::cmp::Ordering::Equal {
                        continue;
                    }
                    let y = g.coeff(a2, b2, c2)?;
                    if y.cmp0() == std::cmp::Ordering::Equal {
                        continue;
                    }
                    acc += x * y;
                }
            }
        }
        Ok(acc)
    }
}

/// Outcome of the cusp-form vs Eisenstein-product consistency check.
#[derive(Clone, Debug)]
pub struct ConsistencyReport {
    /// (N, d) pairs checked for chi10 = -43867/(2^12 3^5 5^2 7 53) (E4 E6 - E10).
    pub chi10_checked: usize,
    pub chi10_mismatches: Vec<(i64, i64)>,
    /// (N, d) pairs checked for the weight-12 relation
    /// chi12 = 131*593/(2^13 3^7 5^3 7^2 337) (441 E4^3 + 250 E6^2 - 691 E12).
    pub chi12_checked: usize,
    pub chi12_mismatches: Vec<(i64, i64)>,
}

impl ConsistencyReport {
    pub fn passes(&self) -> bool {
        self.chi10_mismatches.is_empty()
            && self.chi12_mismatches.is_empty()
            && self.chi10_checked > 0
            && self.chi12_checked > 0
    }
}

/// Representative matrix `(a, b, c)` with `4ac - b^2 = n` and content `d`.
fn representative(n: i64, d: i64) -> Option<(i64, i64, i64)> {
    if n % (d * d) != 0 {
        return None;
    }
    let n0 = n / (d * d);
    match n0 % 4 {
        0 => Some((d, 0, d * (n0 / 4))),
        3 => Some((d, d, d * ((n0 + 1) / 4))),
        _ => None,
    }
}

/// Verify the two cusp forms against the Eisenstein-product relations,
/// coefficient by coefficient on representative matrices.
///
/// chi10 is checked for every stored `(N, d)` with `N <= nmax_chi10`;
/// the weight-12 relation (with `E6^2` supplying the second weight-12
/// monomial) is checked on the cheaper range `N <= nmax_chi12` with
/// contents `d <= 2`, since the triple product `E4^3` makes the
/// convolution cubic in the entries.
pub fn spezialschar_consistency(nmax_chi10: i64, nmax_chi12: i64) -> Result<ConsistencyReport> {
    // Tables big enough for every convolution sub-matrix: the inner loops
    // see T1 with a1 <= a, c1 <= c so N1 <= 4 a c <= (trace)^2.
    let amax = |nmax: i64| {
        // representative c-entry is at most d(n0+1)/4 + n over d... bound
        // crudely by nmax.
        let c_top = (nmax / 4 + 1) * 2;
        let trace_top = c_top + isqrt(nmax) + 2;
        trace_top * trace_top
    };
    let need10 = amax(nmax_chi10);
    let need12 = amax(nmax_chi12);
    let need = need10.max(need12);
    let e4 = CoeffTable::build(FormId::E4, need, 2 * need)?;
    let e6 = CoeffTable::build(FormId::E6, need, 2 * need)?;
    let e10 = CoeffTable::build(FormId::E10, need10, 2 * need10)?;
    let e12 = CoeffTable::build(FormId::E12, need12, 2 * need12)?;
    let chi10 = CoeffTable::build(FormId::Chi10, nmax_chi10, 0)?;
    let chi12 = CoeffTable::build(FormId::Chi12, nmax_chi12, 0)?;

    let s_e4 = SiegelSeries::from_table(&e4);
    let s_e6 = SiegelSeries::from_table(&e6);
    let s_e10 = SiegelSeries::from_table(&e10);
    let s_e12 = SiegelSeries::from_table(&e12);

    // chi10 = -43867 / (2^12 3^5 5^2 7 53) (E4 E6 - E10).
    let c10_scale = Rational::from((-43867i64, 4096i64 * 243 * 25 * 7 * 53));
    let mut chi10_checked = 0usize;
    let mut chi10_mismatches = Vec::new();
    for n in 1..=nmax_chi10 {
        for (i, stored) in chi10.row(n)?.iter().enumerate() {
            let d = (i + 1) as i64;
            let Some((a, b, c)) = representative(n, d) else {
                continue;
            };
            debug_assert_eq!(crate::arith::gcd3(a, b, c), d);
            let prod = SiegelSeries::product_coeff(&s_e4, &s_e6, a, b, c)?;
            let lone = s_e10.coeff(a, b, c)?;
            let combined = c10_scale.clone() * (prod - lone);
            chi10_checked += 1;
            if combined != *stored {
                chi10_mismatches.push((n, d));
            }
        }
    }

    // chi12 = 131*593 / (2^13 3^7 5^3 7^2 337)
    //         (3^2 7^2 E4^3 + 2 5^3 E6^2 - 691 E12),
    // with E6^2 as the second weight-12 monomial.
    let den12 = Integer::from(8192i64) * 2187 * 125 * 49 * 337;
    let c12_scale = Rational::from((Integer::from(131i64 * 593), den12));
    let mut chi12_checked = 0usize;
    let mut chi12_mismatches = Vec::new();
    let e4_sq = |a: i64, b: i64, c: i64| SiegelSeries::product_coeff(&s_e4, &s_e4, a, b, c);
    for n in 1..=nmax_chi12 {
        for (i, stored) in chi12.row(n)?.iter().enumerate() {
            let d = (i + 1) as i64;
            if d > 2 {
                continue;
            }
            let Some((a, b, c)) = representative(n, d) else {
                continue;
            };
            // E4^3 at T: convolve E4^2 (as a closure-backed series) with E4.
            let sq_series = SiegelSeries {
                source: Box::new(&e4_sq),
                memo: std::cell::RefCell::new(std::collections::HashMap::new()),
            };
            let cube = SiegelSeries::product_coeff(&sq_series, &s_e4, a, b, c)?;
            let e6sq = SiegelSeries::product_coeff(&s_e6, &s_e6, a, b, c)?;
            let e12v = s_e12.coeff(a, b, c)?;
            let combined = c12_scale.clone()
                * (Rational::from(441) * cube + Rational::from(250) * e6sq
                    - Rational::from(691) * e12v);
            chi12_checked += 1;
            if combined != *stored {
                chi12_mismatches.push((n, d));
            }
        }
    }

    Ok(ConsistencyReport {
        chi10_checked,
        chi10_mismatches,
        chi12_checked,
        chi12_mismatches,
    })
}
