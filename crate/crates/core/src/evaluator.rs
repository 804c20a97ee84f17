//! Numeric evaluation of the Siegel forms by truncated Fourier sums, and
//! the Igusa functions.
//!
//! A form value is
//!
//! ```text
//! f(tau) = sum_T a(T) exp(2 pi i Tr(T tau))
//!        = sum_{t <= B} sum_{a+c=t} sum_{b^2 <= 4ac} a(T) q1^a q2^c q3^b
//! ```
//!
//! with `q1 = exp(2 pi i tau1)`, `q2 = exp(2 pi i tau2)`,
//! `q3 = exp(2 pi i z)`; the off-diagonal exponent `b` runs over negative
//! values too, so ladders for both `q3` and `q3^(-1)` are precomputed. The
//! sum is accumulated by increasing trace so the same code path yields the
//! trace-partial sums that the `|chi10|` lower-bound certification uses.
//!
//! [`igusa`] glues the whole pipeline together: reduce the point, build
//! the precision plan, build or load the coefficient tables, evaluate
//! `E4, E6, chi10, chi12`, and assemble
//!
//! ```text
//! j1 = 2*3^5 chi12^5 / chi10^6
//! j2 = 2^-3 3^3 E4 chi12^3 / chi10^4
//! j3 = 2^-5 3 E6 chi12^2 / chi10^3 + 2^-3 3^2 E4 chi12^3 / chi10^4
//! ```

use rug::{Float, Rational};

use crate::arith::isqrt;
use crate::bounds::{chi10_lower_bound, make_plan, PrecisionPlan};
use crate::cnum::CNum;
use crate::point::{reduce, SiegelPoint, SymplecticMatrix};
use crate::tables::{CoeffTable, FormId, TableStore};
use crate::{Error, Result};

/// Power ladders for the three Fourier variables of a point.
pub struct PowerLadders {
    q1: Vec<CNum>,
    q2: Vec<CNum>,
    q3_pos: Vec<CNum>,
    q3_neg: Vec<CNum>,
}

impl PowerLadders {
    /// Powers `0..=tmax` of `q1, q2, q3` and `q3^(-1)` at the point's
    /// working precision.
    pub fn build(point: &SiegelPoint, tmax: i64) -> PowerLadders {
        let q1 = CNum::exp_2pi_i(&point.tau1);
        let q2 = CNum::exp_2pi_i(&point.tau2);
        let q3 = CNum::exp_2pi_i(&point.z);
        let q3_inv = q3.recip();
        let ladder = |base: &CNum| -> Vec<CNum> {
            let mut v = Vec::with_capacity((tmax + 1) as usize);
            let one = CNum::from_f64(base.prec(), 1.0, 0.0);
            v.push(one);
            for i in 1..=tmax as usize {
                let next = v[i - 1].mul(base);
                v.push(next);
            }
            v
        };
        PowerLadders {
            q1: ladder(&q1),
            q2: ladder(&q2),
            q3_pos: ladder(&q3),
            q3_neg: ladder(&q3_inv),
        }
    }

    fn q3(&self, b: i64) -> &CNum {
        if b >= 0 {
            &self.q3_pos[b as usize]
        } else {
            &self.q3_neg[(-b) as usize]
        }
    }

    /// `q3^b * q3^(-b)` drift from 1, for precision self-checks.
    pub fn q3_roundtrip_error(&self, b: usize) -> Float {
        let prod = self.q3_pos[b].mul(&self.q3_neg[b]);
        let one = CNum::from_f64(prod.prec(), 1.0, 0.0);
        prod.sub(&one).abs()
    }
}

/// Per-trace contributions `sum_{T in S(t)} a(T) exp(2 pi i Tr(T tau))`
/// for `t = 0..=tmax`. The table must cover `N <= tmax^2` and contents up
/// to `tmax`.
pub fn form_trace_sums(table: &CoeffTable, point: &SiegelPoint, tmax: i64) -> Result<Vec<CNum>> {
    if table.nmax() < tmax * tmax {
        return Err(Error::TableRange {
            need: tmax * tmax,
            have: table.nmax(),
        });
    }
    if !table.form().is_cusp() && table.tmax() < tmax {
        return Err(Error::TableRange {
            need: tmax,
            have: table.tmax(),
        });
    }
    let prec = point.bits();
    let ladders = PowerLadders::build(point, tmax);
    let mut sums = Vec::with_capacity((tmax + 1) as usize);
    for t in 0..=tmax {
        let mut bucket = CNum::new(prec);
        for a in 0..=t {
            let c = t - a;
            let bmax = isqrt(4 * a * c);
            for b in -bmax..=bmax {
                let coeff = table.coeff_for_matrix(a, b, c)?;
                if coeff.cmp0() == std::cmp::Ordering::Equal {
                    continue;
                }
                let term = ladders.q1[a as usize]
                    .mul(&ladders.q2[c as usize])
                    .mul(ladders.q3(b))
                    .mul_float(&Float::with_val(prec, &coeff));
                bucket = bucket.add(&term);
            }
        }
        sums.push(bucket);
    }
    Ok(sums)
}

/// Truncated Fourier sum over all matrices of trace at most `b`.
pub fn evaluate_form(table: &CoeffTable, point: &SiegelPoint, b: i64) -> Result<CNum> {
    let sums = form_trace_sums(table, point, b)?;
    let mut acc = CNum::new(point.bits());
    for s in &sums {
        acc = acc.add(s);
    }
    Ok(acc)
}

/// The three Igusa function values with the number of digits the plan
/// certifies.
#[derive(Clone, Debug)]
pub struct IgusaValues {
    pub j1: CNum,
    pub j2: CNum,
    pub j3: CNum,
    pub certified_digits: u32,
}

/// Full outcome of an evaluation: the values plus the provenance a caller
/// needs to report (plan, reduction, the reduced point).
pub struct IgusaOutcome {
    pub values: IgusaValues,
    pub plan: PrecisionPlan,
    pub reduction: SymplecticMatrix,
    pub reduced: SiegelPoint,
}

/// Evaluate the Igusa functions at `tau` to `k` decimal digits.
///
/// `input_cap` is the number of digits the input literals carry
/// (`None` for exact inputs); requesting more than that is refused.
/// `trace_bound_override` forces the trace bound `B` instead of solving
/// the tail inequality (the CLI exposes it; tests use it for
/// truncation-consistency checks).
pub fn igusa(
    point: &SiegelPoint,
    k: u32,
    input_cap: Option<u32>,
    store: &mut TableStore,
    trace_bound_override: Option<i64>,
) -> Result<IgusaOutcome> {
    if let Some(cap) = input_cap {
        if k > cap {
            return Err(Error::InputPrecision {
                requested: k,
                available: cap,
            });
        }
    }
    // Reduce at a healthy fixed precision; the plan then dictates the
    // working precision for the big sum.
    let reduction = reduce(&point.with_digits(point.digits.max(80)))?;
    let reduced = reduction.point.clone();

    // Certification tables: enough rows for partial sums up to the trace
    // cap used by the lower-bound search.
    let cap_t = crate::bounds::CERTIFICATION_TRACE_CAP;
    let chi10_small = store.get(FormId::Chi10, cap_t * cap_t, cap_t)?.clone();
    let chi12_small = store.get(FormId::Chi12, cap_t * cap_t, cap_t)?.clone();

    let mut plan = make_plan(&reduced, k, &chi10_small, &chi12_small)?;
    if let Some(b) = trace_bound_override {
        plan.b = b.max(1);
    }

    let hp = reduced.with_digits(plan.point_digits);
    let b = plan.b;
    let e4 = store.get(FormId::E4, b * b, b)?.clone();
    let e6 = store.get(FormId::E6, b * b, b)?.clone();
    let c10 = store.get(FormId::Chi10, b * b, b)?.clone();
    let c12 = store.get(FormId::Chi12, b * b, b)?.clone();

    let v_e4 = evaluate_form(&e4, &hp, b)?;
    let v_e6 = evaluate_form(&e6, &hp, b)?;
    let v_c10 = evaluate_form(&c10, &hp, b)?;
    let v_c12 = evaluate_form(&c12, &hp, b)?;

    let prec = hp.bits();
    let ratf = |r: Rational| Float::with_val(prec, &r);
    // j1 = 2*3^5 chi12^5 / chi10^6.
    let j1 = v_c12
        .pow_u(5)
        .mul_float(&ratf(Rational::from(486)))
        .div(&v_c10.pow_u(6));
    // X = E4 chi12^3 / chi10^4 enters both j2 and j3.
    let x = v_e4.mul(&v_c12.pow_u(3)).div(&v_c10.pow_u(4));
    let j2 = x.mul_float(&ratf(Rational::from((27, 8))));
    let y = v_e6.mul(&v_c12.pow_u(2)).div(&v_c10.pow_u(3));
    let j3 = y
        .mul_float(&ratf(Rational::from((3, 32))))
        .add(&x.mul_float(&ratf(Rational::from((9, 8)))));

    let certified = k.min(input_cap.unwrap_or(u32::MAX));
    Ok(IgusaOutcome {
        values: IgusaValues {
            j1,
            j2,
            j3,
            certified_digits: certified,
        },
        plan,
        reduction: reduction.matrix,
        reduced,
    })
}

/// Re-export of the certification entry point at the evaluator level so
/// callers get partial sums and the plan through one module.
pub use crate::bounds::Chi10Certificate;

/// Certified (or best-effort) lower-bound exponent for `|chi10|` at an
/// already-reduced point.
pub fn chi10_certificate(point: &SiegelPoint, store: &mut TableStore) -> Result<Chi10Certificate> {
    let cap_t = crate::bounds::CERTIFICATION_TRACE_CAP;
    let table = store.get(FormId::Chi10, cap_t * cap_t, cap_t)?.clone();
    chi10_lower_bound(point, &table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnum::digits_to_bits as d2b;

    fn imag_point(digits: u32, y1: f64, y3: f64, y2: f64) -> SiegelPoint {
        let bits = d2b(digits);
        SiegelPoint::new(
            CNum::from_f64(bits, 0.0, y1),
            CNum::from_f64(bits, 0.0, y3),
            CNum::from_f64(bits, 0.0, y2),
            digits,
        )
        .unwrap()
    }

    #[test]
    fn eisenstein_value_near_constant_term() {
        // At tau = 40i * I2 every non-constant term is below e^(-80 pi);
        // 150 working digits keep the dominant trace-1 correction
        // (2 * 240 e^(-80 pi) ~ 3e-107) representable next to the constant.
        let p = imag_point(150, 40.0, 0.0, 40.0);
        let table = CoeffTable::build(FormId::E4, 9, 3).unwrap();
        let v = evaluate_form(&table, &p, 3).unwrap();
        let one = CNum::from_f64(p.bits(), 1.0, 0.0);
        let diff = v.sub(&one).abs().to_f64();
        assert!(diff > 0.0 && diff < 1.0e-100, "diff = {diff:e}");
    }

    #[test]
    fn diagonal_pullback_factors_into_classical_values() {
        // On the diagonal z = 0 the Eisenstein series of a weight with no
        // classical cusp forms factors exactly:
        // E_w(diag(tau1, tau2)) = E_w(tau1) E_w(tau2) for w = 4, 6, 10.
        // This pits the Siegel triple sum against two one-variable
        // q-series, an entirely independent route.
        let digits = 60u32;
        let bits = d2b(digits);
        let (y1, y2) = (1.1f64, 0.9f64);
        let p = imag_point(digits, y1, 0.0, y2);
        let b = 24i64;
        let classical_at = |w: u32, y: f64| -> Float {
            let series = crate::waldspurger::classical_eisenstein(w, 90);
            let two_pi = Float::with_val(bits, rug::float::Constant::Pi) * 2u32;
            let q = (-(two_pi * Float::with_val(bits, y))).exp();
            // Horner evaluation keeps the rounding behavior simple.
            let mut acc = Float::new(bits);
            for n in (0..=90usize).rev() {
                acc = acc * &q + Float::with_val(bits, &series.coeff(n));
            }
            acc
        };
        for w in [4u32, 6, 10] {
            let form = match w {
                4 => FormId::E4,
                6 => FormId::E6,
                _ => FormId::E10,
            };
            let table = CoeffTable::build(form, b * b, b).unwrap();
            let siegel = evaluate_form(&table, &p, b).unwrap();
            let product = classical_at(w, y1) * classical_at(w, y2);
            let diff = (Float::with_val(bits, &siegel.re) - &product).abs();
            assert!(siegel.im.to_f64().abs() < 1e-55);
            assert!(
                diff.to_f64() < 1e-30,
                "w = {w}: siegel {} vs product {}",
                siegel.re.to_f64(),
                product.to_f64()
            );
        }
    }

    #[test]
    fn cusp_forms_have_no_low_trace_terms() {
        let p = imag_point(50, 5.0, 1.0, 6.0);
        let table = CoeffTable::build(FormId::Chi10, 16, 4).unwrap();
        let sums = form_trace_sums(&table, &p, 4).unwrap();
        assert_eq!(sums[0].abs().to_f64(), 0.0);
        assert_eq!(sums[1].abs().to_f64(), 0.0);
        assert!(sums[2].abs().to_f64() > 0.0);
    }

    #[test]
    fn chi10_trace_two_partial_matches_hand_value() {
        // At (5i, i; i, 6i): (1/2) e^(-22 pi) - (1/4) e^(-24 pi)
        // - (1/4) e^(-20 pi).
        let p = imag_point(80, 5.0, 1.0, 6.0);
        let table = CoeffTable::build(FormId::Chi10, 16, 4).unwrap();
        let sums = form_trace_sums(&table, &p, 2).unwrap();
        let t2 = &sums[2];
        let pi = std::f64::consts::PI;
        // Compare in log scale: the value is ~ -1.285e-28.
        let want = 0.5 * (-22.0 * pi).exp() - 0.25 * (-24.0 * pi).exp() - 0.25 * (-20.0 * pi).exp();
        let got = t2.re.to_f64();
        assert!(
            (got - want).abs() <= want.abs() * 1e-10,
            "got {got:e} want {want:e}"
        );
        assert!(t2.im.to_f64().abs() < 1e-60);
    }

    #[test]
    fn ladders_invert_cleanly() {
        let p = imag_point(60, 2.4, 0.46, 1.9);
        let ladders = PowerLadders::build(&p, 12);
        for b in 0..=12 {
            assert!(ladders.q3_roundtrip_error(b).to_f64() < 1e-55, "b = {b}");
        }
    }

    #[test]
    fn swap_symmetry_of_form_values() {
        // Conjugation by the permutation matrix is in the embedded GL2, so
        // swapping tau1 and tau2 fixes every form value.
        let bits = d2b(60);
        let p = SiegelPoint::new(
            CNum::from_f64(bits, 0.125, 1.5),
            CNum::from_f64(bits, -0.0625, 0.25),
            CNum::from_f64(bits, 0.25, 2.25),
            60,
        )
        .unwrap();
        let q = SiegelPoint::new(p.tau2.clone(), p.z.clone(), p.tau1.clone(), 60).unwrap();
        for form in [FormId::E4, FormId::Chi10, FormId::Chi12] {
            let table = CoeffTable::build(form, 36, 6).unwrap();
            let vp = evaluate_form(&table, &p, 6).unwrap();
            let vq = evaluate_form(&table, &q, 6).unwrap();
            assert!(vp.sub(&vq).abs().to_f64() < 1e-45, "{form:?}");
        }
    }

    #[test]
    fn missing_rows_error() {
        let p = imag_point(40, 3.0, 0.0, 3.0);
        let table = CoeffTable::build(FormId::E4, 9, 3).unwrap();
        assert!(matches!(
            form_trace_sums(&table, &p, 4),
            Err(Error::TableRange { .. })
        ));
    }
}
