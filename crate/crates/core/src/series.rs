//! Truncated one-variable q-expansions with exact rational coefficients.
//!
//! A [`QSeries`] stores the coefficients of `q^0 .. q^N` for some truncation
//! order `N`; index `k` holds the coefficient of `q^k`. All arithmetic is
//! exact: no rounding happens anywhere in this module. The product of two
//! series is truncated to the shorter length, so a series never pretends to
//! know more coefficients than its inputs support.
//!
//! The module provides the two theta series
//!
//! ```text
//! theta(z)       = 1 + 2 sum_{n>=1} q^(n^2)
//! theta_tilde(z) = (1 + 2 sum_{n>=1} (-1)^n q^(n^2))^4
//! ```
//!
//! of weights 1/2 and 2, together with products, powers and isobaric
//! polynomial combinations of them. Multiplication has a packed fast path
//! (Kronecker substitution into one big-integer product) so that tables with
//! ~10^4 coefficients stay cheap; the packed route is exact and is tested
//! against the schoolbook product.

use rug::{Integer, Rational};

/// A truncated q-expansion with exact rational coefficients.
///
/// `coeffs[k]` is the coefficient of `q^k`; the truncation order is
/// `coeffs.len() - 1` (the largest known exponent).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<Rational>,
}

/// Above this output length `mul` switches to the packed big-integer product.
const PACKED_MUL_THRESHOLD: usize = 64;

impl QSeries {
    /// Series with the given coefficient vector.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a series stores at least q^0");
        QSeries { coeffs }
    }

    /// The zero series truncated at order `n`.
    pub fn zero(n: usize) -> Self {
        QSeries {
            coeffs: vec![Rational::new(); n + 1],
        }
    }

    /// The constant series 1 truncated at order `n`.
    pub fn one(n: usize) -> Self {
        let mut s = Self::zero(n);
        s.coeffs[0] = Rational::from(1);
        s
    }

    /// Truncation order `N` (largest stored exponent).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Number of stored coefficients, `N + 1`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coefficient of `q^k`; zero for `k` beyond the truncation order.
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    /// Borrow the coefficient slice.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Restrict to the coefficients of `q^0 .. q^m` (`m <= N`).
    pub fn truncate(&self, m: usize) -> Self {
        assert!(m <= self.order());
        QSeries {
            coeffs: self.coeffs[..=m].to_vec(),
        }
    }

    /// `theta(z) = sum_{n in Z} q^(n^2)`: coefficient 1 at `q^0`, 2 at each
    /// positive perfect square, 0 elsewhere.
    pub fn theta(n: usize) -> Self {
        let mut s = Self::zero(n);
        s.coeffs[0] = Rational::from(1);
        let mut m = 1usize;
        while m * m <= n {
            s.coeffs[m * m] = Rational::from(2);
            m += 1;
        }
        s
    }

    /// The alternating theta series `1 + 2 sum_{n>=1} (-1)^n q^(n^2)`,
    /// i.e. `theta(z + 1/2)`.
    pub fn theta_alt(n: usize) -> Self {
        let mut s = Self::zero(n);
        s.coeffs[0] = Rational::from(1);
        let mut m = 1usize;
        while m * m <= n {
            s.coeffs[m * m] = Rational::from(if m % 2 == 1 { -2 } else { 2 });
            m += 1;
        }
        s
    }

    /// `theta_tilde = theta(z + 1/2)^4`, the weight-2 block.
    pub fn theta_tilde(n: usize) -> Self {
        Self::theta_alt(n).pow(4)
    }

    /// Exact Cauchy product, truncated to the shorter input length.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let out_len = self.coeffs.len().min(other.coeffs.len());
        if out_len >= PACKED_MUL_THRESHOLD {
            self.mul_packed(other)
        } else {
            self.mul_schoolbook(other)
        }
    }

    /// Quadratic-time reference product. Exact; used directly for short
    /// series and as the oracle for the packed product.
    pub fn mul_schoolbook(&self, other: &QSeries) -> QSeries {
        let out_len = self.coeffs.len().min(other.coeffs.len());
        let mut out = vec![Rational::new(); out_len];
        for (i, a) in self.coeffs.iter().enumerate().take(out_len) {
            if a.cmp0() == std::cmp::Ordering::Equal {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(out_len - i) {
                if b.cmp0() == std::cmp::Ordering::Equal {
                    continue;
                }
                out[i + j] += Rational::from(a * b);
            }
        }
        QSeries { coeffs: out }
    }

    /// Packed product: clear denominators, evaluate both polynomials at
    /// `2^F` for a field width `F` large enough that the convolution sums
    /// cannot collide, take one big-integer product, and read the
    /// coefficients back out of the bit pattern. Negative coefficients are
    /// handled by splitting each factor into positive and negative parts,
    /// so every packed integer is non-negative and the digit extraction is
    /// carry-free and exact.
    pub fn mul_packed(&self, other: &QSeries) -> QSeries {
        let out_len = self.coeffs.len().min(other.coeffs.len());
        let da = denominator_lcm(&self.coeffs[..out_len]);
        let db = denominator_lcm(&other.coeffs[..out_len]);
        let ia = scaled_integers(&self.coeffs[..out_len], &da);
        let ib = scaled_integers(&other.coeffs[..out_len], &db);

        let bits_a = max_bits(&ia);
        let bits_b = max_bits(&ib);
        let len_bits = 64 - (out_len as u64).leading_zeros() as usize;
        // Field must hold sum_{i+j=k} |a_i||b_j| <= max|a| max|b| out_len.
        let field_bits = bits_a + bits_b + len_bits + 1;
        let field_limbs = field_bits.div_ceil(64).max(1);

        let (apos, aneg) = pack_split(&ia, field_limbs);
        let (bpos, bneg) = pack_split(&ib, field_limbs);

        let pp = Integer::from(&apos * &bpos);
        let nn = Integer::from(&aneg * &bneg);
        let pn = Integer::from(&apos * &bneg);
        let np = Integer::from(&aneg * &bpos);

        let dpp = unpack(&pp, field_limbs, out_len);
        let dnn = unpack(&nn, field_limbs, out_len);
        let dpn = unpack(&pn, field_limbs, out_len);
        let dnp = unpack(&np, field_limbs, out_len);

        let den = Integer::from(&da * &db);
        let mut out = Vec::with_capacity(out_len);
        for k in 0..out_len {
            let num = Integer::from(&dpp[k] + &dnn[k]) - Integer::from(&dpn[k] + &dnp[k]);
            out.push(Rational::from((num, den.clone())));
        }
        QSeries { coeffs: out }
    }

    /// `self^e` by repeated squaring; `pow(a, 0)` is the constant series 1.
    pub fn pow(&self, e: u32) -> QSeries {
        let mut result = QSeries::one(self.order());
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

    /// Coefficient-wise sum; lengths must match.
    pub fn add(&self, other: &QSeries) -> QSeries {
        assert_eq!(self.len(), other.len(), "add: mismatched truncation");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| Rational::from(a + b))
            .collect();
        QSeries { coeffs }
    }

    /// Coefficient-wise difference; lengths must match.
    pub fn sub(&self, other: &QSeries) -> QSeries {
        assert_eq!(self.len(), other.len(), "sub: mismatched truncation");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| Rational::from(a - b))
            .collect();
        QSeries { coeffs }
    }

    /// Multiply every coefficient by an exact rational.
    pub fn scale(&self, c: &Rational) -> QSeries {
        let coeffs = self.coeffs.iter().map(|a| Rational::from(a * c)).collect();
        QSeries { coeffs }
    }

    /// Multiplicative inverse of a series with nonzero constant term, to the
    /// same truncation order. Quadratic recurrence; only used on the short
    /// generating functions of the Bernoulli machinery.
    pub fn inverse(&self) -> QSeries {
        let c0 = &self.coeffs[0];
        assert!(
            c0.cmp0() != std::cmp::Ordering::Equal,
            "inverse: constant term is zero"
        );
        let n = self.len();
        let mut inv = vec![Rational::new(); n];
        let c0_inv = Rational::from(c0.recip_ref());
        inv[0] = c0_inv.clone();
        for k in 1..n {
            let mut acc = Rational::new();
            for (j, invj) in inv.iter().enumerate().take(k) {
                let a = &self.coeffs[k - j];
                if a.cmp0() == std::cmp::Ordering::Equal {
                    continue;
                }
                acc += Rational::from(a * invj);
            }
            inv[k] = -Rational::from(&acc * &c0_inv);
        }
        QSeries { coeffs: inv }
    }

    /// Evaluate `sum_i c_i * theta^(e_i) * theta_tilde^(f_i)` truncated at
    /// order `n`. Shared powers are computed once: the theta powers are
    /// walked in ascending order and each theta_tilde block is reused across
    /// terms.
    pub fn isobaric_combine(terms: &[(Rational, u32, u32)], n: usize) -> QSeries {
        let theta = Self::theta(n);
        let tilde = Self::theta_tilde(n);

        let mut theta_pows: Vec<u32> = terms.iter().map(|t| t.1).collect();
        theta_pows.sort_unstable();
        theta_pows.dedup();
        let mut tilde_pows: Vec<u32> = terms.iter().map(|t| t.2).collect();
        tilde_pows.sort_unstable();
        tilde_pows.dedup();

        let theta_table = power_ladder(&theta, &theta_pows, n);
        let tilde_table = power_ladder(&tilde, &tilde_pows, n);

        let mut acc = QSeries::zero(n);
        for (c, e, f) in terms {
            if c.cmp0() == std::cmp::Ordering::Equal {
                continue;
            }
            let te = &theta_table[theta_pows.binary_search(e).unwrap()];
            let tf = &tilde_table[tilde_pows.binary_search(f).unwrap()];
            let term = te.mul(tf).scale(c);
            acc = acc.add(&term);
        }
        acc
    }
}

/// Powers `base^e` for each requested exponent (sorted ascending), reusing
/// the previous power at each step.
fn power_ladder(base: &QSeries, exps: &[u32], n: usize) -> Vec<QSeries> {
    let mut out = Vec::with_capacity(exps.len());
    let mut cur = QSeries::one(n);
    let mut cur_e = 0u32;
    for &e in exps {
        let step = base.pow(e - cur_e);
        cur = if cur_e == 0 { step } else { cur.mul(&step) };
        cur_e = e;
        out.push(cur.clone());
    }
    out
}

fn denominator_lcm(coeffs: &[Rational]) -> Integer {
    let mut l = Integer::from(1);
    for c in coeffs {
        l.lcm_mut(c.denom());
    }
    l
}

fn scaled_integers(coeffs: &[Rational], den: &Integer) -> Vec<Integer> {
    coeffs
        .iter()
        .map(|c| {
            let scaled = Rational::from(c * den);
            debug_assert_eq!(*scaled.denom(), 1);
            scaled.numer().clone()
        })
        .collect()
}

fn max_bits(ints: &[Integer]) -> usize {
    ints.iter()
        .map(|i| i.significant_bits() as usize)
        .max()
        .unwrap_or(0)
        .max(1)
}

/// Pack the positive and negative parts of `ints` into two non-negative
/// big integers with `field_limbs` 64-bit limbs per coefficient slot.
fn pack_split(ints: &[Integer], field_limbs: usize) -> (Integer, Integer) {
    let mut pos = vec![0u64; ints.len() * field_limbs];
    let mut neg = vec![0u64; ints.len() * field_limbs];
    for (i, v) in ints.iter().enumerate() {
        if v.cmp0() == std::cmp::Ordering::Equal {
            continue;
        }
        let digits = v.to_digits::<u64>(rug::integer::Order::Lsf);
        debug_assert!(digits.len() <= field_limbs);
        let target = if v.cmp0() == std::cmp::Ordering::Greater {
            &mut pos
        } else {
            &mut neg
        };
        target[i * field_limbs..i * field_limbs + digits.len()].copy_from_slice(&digits);
    }
    (
        Integer::from_digits(&pos, rug::integer::Order::Lsf),
        Integer::from_digits(&neg, rug::integer::Order::Lsf),
    )
}

/// Read `count` non-negative field values of `field_limbs` limbs back out of
/// a packed product.
fn unpack(packed: &Integer, field_limbs: usize, count: usize) -> Vec<Integer> {
    let mut digits = packed.to_digits::<u64>(rug::integer::Order::Lsf);
    digits.resize(count * field_limbs, 0);
    (0..count)
        .map(|k| {
            let slice = &digits[k * field_limbs..(k + 1) * field_limbs];
            Integer::from_digits(slice, rug::integer::Order::Lsf)
        })
        .collect()
}
