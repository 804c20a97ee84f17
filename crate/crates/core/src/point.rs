//! Points of the Siegel upper half-plane, the symplectic action, and
//! reduction towards the fundamental domain.
//!
//! A [`SiegelPoint`] is `tau = (tau1, z; z, tau2)` with `Im(tau)` positive
//! definite, carried at an explicit decimal working precision. A
//! [`SymplecticMatrix`] is an integer 4x4 matrix `M` with `M J M^T = J`
//! (checked exactly); it acts by `tau -> (A tau + B)(C tau + D)^(-1)`.
//!
//! [`reduce`] moves a point towards the fundamental domain with the
//! candidate set: Minkowski reduction of `Im(tau)` through the embedded
//! GL2(Z), integer translation of `Re(tau)`, and a precomputed family of
//! inversions (the full inversion `J`, the two embedded SL2 inversions,
//! and every symplectic completion `[[0, -C^-T], [C, D]]` over C, D with
//! entries in {-1, 0, 1}). An inversion is applied only when it increases
//! `det Im(tau)` by a relative margin, which makes the loop terminate:
//! `det Im` is non-decreasing and bounded on the orbit.

use std::sync::OnceLock;

use rug::Float;

use crate::cnum::{digits_to_bits, CNum};
use crate::{Error, Result};

/// A point `tau = (tau1, z; z, tau2)` of the Siegel upper half-plane at a
/// stated decimal working precision.
#[derive(Clone, Debug)]
pub struct SiegelPoint {
    pub tau1: CNum,
    pub z: CNum,
    pub tau2: CNum,
    /// Decimal working precision the entries are carried at.
    pub digits: u32,
}

impl SiegelPoint {
    /// Build and validate a point. `digits` sets the working precision.
    pub fn new(tau1: CNum, z: CNum, tau2: CNum, digits: u32) -> Result<SiegelPoint> {
        let p = SiegelPoint {
            tau1,
            z,
            tau2,
            digits,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !(self.tau1.is_finite() && self.z.is_finite() && self.tau2.is_finite()) {
            return Err(Error::NotInUpperHalfPlane);
        }
        let y1 = &self.tau1.im;
        let det = self.im_det();
        if y1.is_sign_positive() && y1.cmp0() != Some(std::cmp::Ordering::Equal) && det > 0 {
            Ok(())
        } else {
            Err(Error::NotInUpperHalfPlane)
        }
    }

    pub fn bits(&self) -> u32 {
        digits_to_bits(self.digits)
    }

    /// Carry the entries at a new decimal precision.
    pub fn with_digits(&self, digits: u32) -> SiegelPoint {
        let bits = digits_to_bits(digits);
        SiegelPoint {
            tau1: self.tau1.with_prec(bits),
            z: self.z.with_prec(bits),
            tau2: self.tau2.with_prec(bits),
            digits,
        }
    }

    /// `det Im(tau) = y1 y2 - y3^2`.
    pub fn im_det(&self) -> Float {
        let p = self.tau1.prec();
        let y1y2 = Float::with_val(p, &self.tau1.im * &self.tau2.im);
        let y3sq = Float::with_val(p, &self.z.im * &self.z.im);
        y1y2 - y3sq
    }

    /// `delta(tau)`: the smallest eigenvalue of `Im(tau)`, i.e.
    /// `(tr - sqrt(tr^2 - 4 det)) / 2` for the symmetric 2x2 imaginary
    /// part. The result is nudged down by one ulp-scale factor so it is a
    /// certified lower rounding.
    pub fn delta(&self) -> Result<Float> {
        self.validate()?;
        let p = self.tau1.prec();
        let tr = Float::with_val(p, &self.tau1.im + &self.tau2.im);
        let det = self.im_det();
        let disc = Float::with_val(p, tr.clone().square() - 4u32 * det);
        let root = disc.sqrt();
        let lambda = (tr - root) / 2u32;
        // Certified lower rounding: shave a few ulps.
        let down = Float::with_val(p, 1) - Float::with_val(p, Float::i_exp(1, -(p as i32) + 8));
        Ok(lambda * down)
    }
}

/// A 2x2 integer block of a symplectic matrix.
type Block2 = [[i64; 2]; 2];

/// An element of Sp4(Z) as an integer 4x4 matrix in (A, B; C, D) block
/// form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymplecticMatrix(pub [[i64; 4]; 4]);

impl SymplecticMatrix {
    pub fn identity() -> Self {
        let mut m = [[0i64; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        SymplecticMatrix(m)
    }

    /// Exact check of `M J M^T = J` with `J = (0, 1; -1, 0)` in 2x2 blocks.
    pub fn is_symplectic(&self) -> bool {
        let m = &self.0;
        // J has entries J[i][j]: J[0][2] = J[1][3] = 1, J[2][0] = J[3][1] = -1.
        let j = |i: usize, k: usize| -> i128 {
            match (i, k) {
                (0, 2) | (1, 3) => 1,
                (2, 0) | (3, 1) => -1,
                _ => 0,
            }
        };
        for i in 0..4 {
            for k in 0..4 {
                let mut acc: i128 = 0;
                for a in 0..4 {
                    for b in 0..4 {
                        acc += m[i][a] as i128 * j(a, b) * m[k][b] as i128;
                    }
                }
                if acc != j(i, k) {
                    return false;
                }
            }
        }
        true
    }

    pub fn mul(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        let mut out = [[0i64; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (k, cell) in row.iter_mut().enumerate() {
                let mut acc: i128 = 0;
                for a in 0..4 {
                    acc += self.0[i][a] as i128 * other.0[a][k] as i128;
                }
                *cell = i64::try_from(acc).expect("symplectic product overflow");
            }
        }
        SymplecticMatrix(out)
    }

    /// Embed `U in GL2(Z)` as `diag(U, U^-T)`, acting by
    /// `tau -> U tau U^T`.
    pub fn gl2_embed(u: [[i64; 2]; 2]) -> SymplecticMatrix {
        let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
        assert!(det == 1 || det == -1, "GL2 embed needs det = +-1");
        // U^-1 = adj(U) * det for det = +-1; transpose it.
        let inv = [
            [u[1][1] * det, -u[0][1] * det],
            [-u[1][0] * det, u[0][0] * det],
        ];
        let inv_t = [[inv[0][0], inv[1][0]], [inv[0][1], inv[1][1]]];
        let mut m = [[0i64; 4]; 4];
        for i in 0..2 {
            for k in 0..2 {
                m[i][k] = u[i][k];
                m[2 + i][2 + k] = inv_t[i][k];
            }
        }
        let s = SymplecticMatrix(m);
        debug_assert!(s.is_symplectic());
        s
    }

    /// Translation `tau -> tau + S` for integer symmetric `S`.
    pub fn translation(s11: i64, s12: i64, s22: i64) -> SymplecticMatrix {
        let mut m = SymplecticMatrix::identity().0;
        m[0][2] = s11;
        m[0][3] = s12;
        m[1][2] = s12;
        m[1][3] = s22;
        let s = SymplecticMatrix(m);
        debug_assert!(s.is_symplectic());
        s
    }

    /// The full inversion `tau -> -tau^(-1)`.
    pub fn inversion() -> SymplecticMatrix {
        SymplecticMatrix([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
    }

    fn blocks(&self) -> (Block2, Block2, Block2, Block2) {
        let m = &self.0;
        (
            [[m[0][0], m[0][1]], [m[1][0], m[1][1]]],
            [[m[0][2], m[0][3]], [m[1][2], m[1][3]]],
            [[m[2][0], m[2][1]], [m[3][0], m[3][1]]],
            [[m[2][2], m[2][3]], [m[3][2], m[3][3]]],
        )
    }
}

fn cmat(prec: u32, m: [[i64; 2]; 2]) -> [CNum; 4] {
    [
        CNum::from_f64(prec, m[0][0] as f64, 0.0),
        CNum::from_f64(prec, m[0][1] as f64, 0.0),
        CNum::from_f64(prec, m[1][0] as f64, 0.0),
        CNum::from_f64(prec, m[1][1] as f64, 0.0),
    ]
}

fn mat_mul(a: &[CNum; 4], b: &[CNum; 4]) -> [CNum; 4] {
    [
        a[0].mul(&b[0]).add(&a[1].mul(&b[2])),
        a[0].mul(&b[1]).add(&a[1].mul(&b[3])),
        a[2].mul(&b[0]).add(&a[3].mul(&b[2])),
        a[2].mul(&b[1]).add(&a[3].mul(&b[3])),
    ]
}

fn mat_add(a: &[CNum; 4], b: &[CNum; 4]) -> [CNum; 4] {
    [
        a[0].add(&b[0]),
        a[1].add(&b[1]),
        a[2].add(&b[2]),
        a[3].add(&b[3]),
    ]
}

fn mat_det(a: &[CNum; 4]) -> CNum {
    a[0].mul(&a[3]).sub(&a[1].mul(&a[2]))
}

fn mat_inv(a: &[CNum; 4]) -> Result<[CNum; 4]> {
    let det = mat_det(a);
    let abs = det.abs();
    if abs.cmp0() == Some(std::cmp::Ordering::Equal) || !abs.is_finite() {
        return Err(Error::PrecisionExhausted);
    }
    Ok([
        a[3].div(&det),
        a[1].neg().div(&det),
        a[2].neg().div(&det),
        a[0].div(&det),
    ])
}

fn point_mat(p: &SiegelPoint) -> [CNum; 4] {
    [p.tau1.clone(), p.z.clone(), p.z.clone(), p.tau2.clone()]
}

/// Apply `M` to `tau`: `(A tau + B)(C tau + D)^(-1)`, symmetrized against
/// rounding by averaging the two off-diagonal entries.
pub fn act(m: &SymplecticMatrix, p: &SiegelPoint) -> Result<SiegelPoint> {
    assert!(m.is_symplectic(), "act requires a symplectic matrix");
    let prec = p.tau1.prec();
    let (a, b, c, d) = m.blocks();
    let tau = point_mat(p);
    let num = mat_add(&mat_mul(&cmat(prec, a), &tau), &cmat(prec, b));
    let den = mat_add(&mat_mul(&cmat(prec, c), &tau), &cmat(prec, d));
    // Guard: det(C tau + D) must stay well above the rounding floor.
    let det_abs = mat_det(&den).abs();
    let floor = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 16));
    if det_abs < floor {
        return Err(Error::PrecisionExhausted);
    }
    let inv = mat_inv(&den)?;
    let res = mat_mul(&num, &inv);
    let half = Float::with_val(prec, 0.5f64);
    let z = res[1].add(&res[2]).mul_float(&half);
    SiegelPoint::new(res[0].clone(), z, res[3].clone(), p.digits)
}

/// Gauss/Minkowski reduction of the positive binary form `Im(tau)`:
/// returns `U in GL2(Z)` with `U Y U^T` reduced
/// (`2|y12| <= y11 <= y22`).
fn minkowski_gl2(p: &SiegelPoint) -> [[i64; 2]; 2] {
    let prec = p.tau1.prec();
    let mut y11 = p.tau1.im.clone();
    let mut y12 = p.z.im.clone();
    let mut y22 = p.tau2.im.clone();
    let mut u = [[1i64, 0], [0, 1]];
    for _ in 0..512 {
        // Translate: y12 -= t y11.
        let ratio = Float::with_val(prec, &y12 / &y11);
        let t = ratio.to_f64().round() as i64;
        if t != 0 {
            // Row op: (1, 0; -t, 1) acting as U Y U^T updates.
            let ty11 = Float::with_val(prec, &y11 * t);
            let new_y22 =
                Float::with_val(prec, &y22 - Float::with_val(prec, 2.0f64 * t as f64) * &y12)
                    + Float::with_val(prec, &ty11 * t);
            let new_y12 = Float::with_val(prec, &y12 - &ty11);
            y22 = new_y22;
            y12 = new_y12;
            u = [
                [u[0][0], u[0][1]],
                [u[1][0] - t * u[0][0], u[1][1] - t * u[0][1]],
            ];
        }
        if y22 < y11 {
            std::mem::swap(&mut y11, &mut y22);
            y12 = -y12;
            u = [[u[1][0], u[1][1]], [-u[0][0], -u[0][1]]];
            continue;
        }
        let twelve = Float::with_val(prec, y12.abs_ref());
        let half = Float::with_val(prec, &y11 / 2u32);
        let slack = Float::with_val(prec, &half * 1.0e-12f64);
        if twelve <= half + slack {
            break;
        }
    }
    u
}

/// Inversion candidates: J, the embedded SL2 inversions, and the
/// completions `[[0, -C^-T], [C, D]]` for unimodular `C` and compatible
/// `D` with entries in {-1, 0, 1}.
fn inversion_candidates() -> &'static Vec<SymplecticMatrix> {
    static CANDIDATES: OnceLock<Vec<SymplecticMatrix>> = OnceLock::new();
    CANDIDATES.get_or_init(|| {
        let mut list = Vec::new();
        list.push(SymplecticMatrix::inversion());
        // Embedded SL2 inversion on tau1 and on tau2.
        list.push(SymplecticMatrix([
            [0, 0, -1, 0],
            [0, 1, 0, 0],
            [1, 0, 0, 0],
            [0, 0, 0, 1],
        ]));
        list.push(SymplecticMatrix([
            [1, 0, 0, 0],
            [0, 0, 0, -1],
            [0, 0, 1, 0],
            [0, 1, 0, 0],
        ]));
        // All [[0, -C^-T], [C, D]] with unimodular small C and CD^T
        // symmetric.
        let vals = [-1i64, 0, 1];
        let mut cs = Vec::new();
        for c00 in vals {
            for c01 in vals {
                for c10 in vals {
                    for c11 in vals {
                        if (c00 * c11 - c01 * c10).abs() == 1 {
                            cs.push([[c00, c01], [c10, c11]]);
                        }
                    }
                }
            }
        }
        for c in &cs {
            let det = c[0][0] * c[1][1] - c[0][1] * c[1][0];
            // C^-1 = adj(C)/det; C^-T its transpose.
            let cinv = [
                [c[1][1] * det, -c[0][1] * det],
                [-c[1][0] * det, c[0][0] * det],
            ];
            let cinv_t = [[cinv[0][0], cinv[1][0]], [cinv[0][1], cinv[1][1]]];
            for d00 in vals {
                for d01 in vals {
                    for d10 in vals {
                        for d11 in vals {
                            let d = [[d00, d01], [d10, d11]];
                            // CD^T symmetric.
                            let cdt01 = c[0][0] * d[1][0] + c[0][1] * d[1][1];
                            let cdt10 = c[1][0] * d[0][0] + c[1][1] * d[0][1];
                            if cdt01 != cdt10 {
                                continue;
                            }
                            let m = SymplecticMatrix([
                                [0, 0, -cinv_t[0][0], -cinv_t[0][1]],
                                [0, 0, -cinv_t[1][0], -cinv_t[1][1]],
                                [c[0][0], c[0][1], d[0][0], d[0][1]],
                                [c[1][0], c[1][1], d[1][0], d[1][1]],
                            ]);
                            if m.is_symplectic() {
                                list.push(m);
                            }
                        }
                    }
                }
            }
        }
        list
    })
}

/// `|det(C tau + D)|^2` at f64 scale, for ranking inversion candidates.
fn det_ctau_d_sqr(m: &SymplecticMatrix, p: &SiegelPoint) -> f64 {
    let (_, _, c, d) = m.blocks();
    let t1 = (p.tau1.re.to_f64(), p.tau1.im.to_f64());
    let zz = (p.z.re.to_f64(), p.z.im.to_f64());
    let t2 = (p.tau2.re.to_f64(), p.tau2.im.to_f64());
    let tau = [t1, zz, zz, t2];
    let mut e = [(0.0f64, 0.0f64); 4];
    for i in 0..2 {
        for k in 0..2 {
            let mut re = d[i][k] as f64;
            let mut im = 0.0;
            for a in 0..2 {
                let (tr, ti) = tau[a * 2 + k];
                re += c[i][a] as f64 * tr;
                im += c[i][a] as f64 * ti;
            }
            e[i * 2 + k] = (re, im);
        }
    }
    let (a, b, c2, d2) = (e[0], e[1], e[2], e[3]);
    let det_re = a.0 * d2.0 - a.1 * d2.1 - (b.0 * c2.0 - b.1 * c2.1);
    let det_im = a.0 * d2.1 + a.1 * d2.0 - (b.0 * c2.1 + b.1 * c2.0);
    det_re * det_re + det_im * det_im
}

/// Outcome of [`reduce`].
pub struct Reduction {
    pub point: SiegelPoint,
    pub matrix: SymplecticMatrix,
    /// False when the iteration cap was hit before the point stabilized.
    pub converged: bool,
}

/// Move `tau` towards the fundamental domain. Returns the reduced point,
/// the symplectic matrix that achieves it, and a convergence flag.
///
/// The loop Minkowski-reduces the imaginary part, translates the real part
/// into `[-1/2, 1/2]`, and applies the best inversion candidate while one
/// increases `det Im(tau)` by more than a relative `1e-10`.
pub fn reduce(p: &SiegelPoint) -> Result<Reduction> {
    let mut cur = p.clone();
    let mut total = SymplecticMatrix::identity();
    let mut converged = false;
    for _ in 0..64 {
        // GL2 step.
        let u = minkowski_gl2(&cur);
        if u != [[1, 0], [0, 1]] {
            let m = SymplecticMatrix::gl2_embed(u);
            cur = act(&m, &cur)?;
            total = m.mul(&total);
        }
        // Translation step.
        let s11 = -cur.tau1.re.to_f64().round() as i64;
        let s12 = -cur.z.re.to_f64().round() as i64;
        let s22 = -cur.tau2.re.to_f64().round() as i64;
        if (s11, s12, s22) != (0, 0, 0) {
            let m = SymplecticMatrix::translation(s11, s12, s22);
            cur = act(&m, &cur)?;
            total = m.mul(&total);
        }
        // Inversion step: apply the candidate with the smallest
        // |det(C tau + D)| when it is below 1.
        let mut best: Option<(f64, &SymplecticMatrix)> = None;
        for cand in inversion_candidates() {
            let v = det_ctau_d_sqr(cand, &cur);
            if v.is_finite() && best.is_none_or(|(bv, _)| v < bv) {
                best = Some((v, cand));
            }
        }
        match best {
            Some((v, m)) if v < 1.0 - 1.0e-10 => {
                cur = act(m, &cur)?;
                total = m.mul(&total);
            }
            _ => {
                converged = true;
                break;
            }
        }
    }
    Ok(Reduction {
        point: cur,
        matrix: total,
        converged,
    })
}
