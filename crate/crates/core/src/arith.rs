//! Elementary number-theoretic helpers: gcd, divisor enumeration, the
//! Möbius function, power-divisor sums, the Kronecker symbol and
//! discriminant decompositions.
//!
//! Everything here works on machine integers (`i64`); the quantities that
//! can overflow 64 bits (such as `sigma_pow` with large exponents) return
//! [`rug::Integer`].

use rug::{ops::Pow, Integer};

/// Greatest common divisor of two integers, always non-negative.
pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// gcd of three integers, non-negative. `gcd3(0, 0, 0) = 0`.
pub fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    gcd(gcd(a, b), c)
}

/// All positive divisors of `n > 0`, ascending.
pub fn divisors(n: i64) -> Vec<i64> {
    assert!(n > 0, "divisors: n must be positive");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Möbius function of `n > 0`.
pub fn moebius(n: i64) -> i32 {
    assert!(n > 0);
    let mut n = n;
    let mut count = 0;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            count += 1;
        }
        p += 1;
    }
    if n > 1 {
        count += 1;
    }
    if count % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sum of the `k`-th powers of the divisors of `n > 0`, exactly.
pub fn sigma_pow(k: u32, n: i64) -> Integer {
    let mut s = Integer::new();
    for d in divisors(n) {
        s += Integer::from(d).pow(k);
    }
    s
}

/// Kronecker symbol `(a / n)`, defined for all integers.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    if a % 2 == 0 && n % 2 == 0 {
        return 0;
    }
    let mut a = a;
    let mut n = n;
    let mut result = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    // Split off the even part of n using (a/2) = (2/a).
    let mut v = 0u32;
    while n % 2 == 0 {
        n /= 2;
        v += 1;
    }
    if v % 2 == 1 {
        match a.rem_euclid(8) {
            1 | 7 => {}
            3 | 5 => result = -result,
            _ => return 0, // a even
        }
    }
    // Now n is odd and positive: the Jacobi symbol.
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n.rem_euclid(8), 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.rem_euclid(4) == 3 && n.rem_euclid(4) == 3 {
            result = -result;
        }
        a = a.rem_euclid(n);
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Squarefree decomposition `n = n0 * f^2` with `n0` squarefree, for `n > 0`.
pub fn squarefree_decompose(n: i64) -> (i64, i64) {
    assert!(n > 0);
    let mut n0 = 1i64;
    let mut f = 1i64;
    let mut m = n;
    let mut p = 2i64;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            if e % 2 == 1 {
                n0 *= p;
            }
            f *= p.pow((e / 2) as u32);
        }
        p += 1;
    }
    n0 *= m;
    (n0, f)
}

/// True if `d` is 1 or a fundamental discriminant (of either sign).
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    if d == 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => {
            let (d0, f) = squarefree_decompose(d.abs());
            let _ = d0;
            f == 1
        }
        0 => {
            let q = d / 4;
            let (_, f) = squarefree_decompose(q.abs());
            f == 1 && matches!(q.rem_euclid(4), 2 | 3)
        }
        _ => false,
    }
}

/// Decompose a discriminant `d < 0` (so `d = 0, 1 mod 4`) as `d = d0 * f^2`
/// with `d0` the discriminant of `Q(sqrt(d))`.
pub fn fundamental_decompose(d: i64) -> (i64, i64) {
    assert!(
        d < 0 && matches!(d.rem_euclid(4), 0 | 1),
        "not a discriminant: {d}"
    );
    let (m0, s) = squarefree_decompose(-d);
    let d0 = -m0;
    if d0.rem_euclid(4) == 1 {
        (d0, s)
    } else {
        debug_assert_eq!(s % 2, 0);
        (4 * d0, s / 2)
    }
}

/// Integer square root of `n >= 0`.
pub fn isqrt(n: i64) -> i64 {
    assert!(n >= 0);
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as i64;
    while x > 0 && x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Smallest-prime-factor sieve, for factoring many consecutive integers
/// cheaply when building large coefficient tables.
pub struct SpfSieve {
    spf: Vec<u32>,
}

impl SpfSieve {
    pub fn new(limit: usize) -> Self {
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        SpfSieve { spf }
    }

    /// `(p, e)` factorisation of `n` with `2 <= n <= limit`.
    pub fn factor(&self, n: i64) -> Vec<(i64, u32)> {
        let mut n = n as usize;
        assert!(n >= 1 && n < self.spf.len());
        let mut out = Vec::new();
        while n > 1 {
            let p = self.spf[n] as usize;
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p as i64, e));
        }
        out
    }

    /// Squarefree decomposition `n = n0 * f^2` via the sieve.
    pub fn squarefree_decompose(&self, n: i64) -> (i64, i64) {
        let mut n0 = 1i64;
        let mut f = 1i64;
        for (p, e) in self.factor(n) {
            if e % 2 == 1 {
                n0 *= p;
            }
            f *= p.pow(e / 2);
        }
        (n0, f)
    }
}
