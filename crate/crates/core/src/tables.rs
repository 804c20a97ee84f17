//! Exact Fourier coefficient tables for the six Siegel forms, keyed by
//! `(N = 4ac - b^2, content)`.
//!
//! A coefficient of a form in the Maass Spezialschar depends on the index
//! matrix `T = (a, b/2; b/2, c)` only through `N = 4ac - b^2` and
//! `d = gcd(a, b, c)`, so a [`CoeffTable`] stores
//!
//! * `posdef[N]`: a dense vector over contents `d = 1..f(N)` (zero-padded
//!   at `d` with `d^2` not dividing `N`), where `f(N)` is the largest `f`
//!   with `f^2 | N` and `N/f^2 = 0, 3 mod 4` or `N/f^2 = 1`;
//! * `degenerate[t]`: the coefficient of the rank-1 matrices of content
//!   `t` (any such matrix is GL2(Z)-equivalent to diag(t, 0));
//! * `constant`: the coefficient of the zero matrix.
//!
//! For the Eisenstein series `E_w` the entries are
//! `(-2w/B_w) sum_{e | d} e^(w-1) alpha_w(-N/e^2)`, the degenerate entries
//! are `(-2w/B_w) sigma_{w-1}(t)` and the constant is 1. For the cusp
//! forms the entries are `s_w sum_{e | d} e^(w-1) c_{phi_w,1}(N/e^2)` with
//! `s_10 = -1/4`, `s_12 = 1/12`, and everything semi-definite vanishes.
//!
//! Tables round-trip through a versioned line-oriented text format ending
//! in a SHA-256 checksum line.

use std::fmt::Write as _;
use std::path::Path;

use rug::{ops::Pow, Integer, Rational};
use sha2::{Digest, Sha256};

use crate::arith::{divisors, gcd3, isqrt, sigma_pow};
use crate::halfint::{cohen_series, cusp_scale, cusp_series, eisenstein_scale};
use crate::{Error, Result};

/// Which of the six Siegel forms a table belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormId {
    E4,
    E6,
    E10,
    E12,
    Chi10,
    Chi12,
}

impl FormId {
    pub const ALL: [FormId; 6] = [
        FormId::E4,
        FormId::E6,
        FormId::E10,
        FormId::E12,
        FormId::Chi10,
        FormId::Chi12,
    ];

    pub fn weight(self) -> u32 {
        match self {
            FormId::E4 => 4,
            FormId::E6 => 6,
            FormId::E10 | FormId::Chi10 => 10,
            FormId::E12 | FormId::Chi12 => 12,
        }
    }

    pub fn is_cusp(self) -> bool {
        matches!(self, FormId::Chi10 | FormId::Chi12)
    }

    pub fn name(self) -> &'static str {
        match self {
            FormId::E4 => "e4",
            FormId::E6 => "e6",
            FormId::E10 => "e10",
            FormId::E12 => "e12",
            FormId::Chi10 => "chi10",
            FormId::Chi12 => "chi12",
        }
    }

    pub fn parse(s: &str) -> Option<FormId> {
        match s {
            "e4" => Some(FormId::E4),
            "e6" => Some(FormId::E6),
            "e10" => Some(FormId::E10),
            "e12" => Some(FormId::E12),
            "chi10" => Some(FormId::Chi10),
            "chi12" => Some(FormId::Chi12),
            _ => None,
        }
    }
}

/// Largest content slot stored for a row: the biggest `f >= 1` with
/// `f^2 | n` and `n/f^2 = 0, 3 (mod 4)` or `n/f^2 = 1`. Zero when the row
/// is empty (`n = 1, 2 mod 4`, which no integral matrix attains).
pub fn content_slots(n: i64) -> i64 {
    debug_assert!(n >= 1);
    let mut f = isqrt(n);
    while f >= 1 {
        if n % (f * f) == 0 {
            let q = n / (f * f);
            if q == 1 || matches!(q % 4, 0 | 3) {
                return f;
            }
        }
        f -= 1;
    }
    0
}

/// Exact Fourier coefficients of one form, for all `N <= nmax` and all
/// rank-1 classes of content `<= tmax`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffTable {
    form: FormId,
    nmax: i64,
    tmax: i64,
    posdef: Vec<Vec<Rational>>,
    degenerate: Vec<Rational>,
    constant: Rational,
}

impl CoeffTable {
    pub fn form(&self) -> FormId {
        self.form
    }

    pub fn nmax(&self) -> i64 {
        self.nmax
    }

    pub fn tmax(&self) -> i64 {
        self.tmax
    }

    /// Coefficient of the zero matrix: 1 for Eisenstein series, 0 for cusp
    /// forms.
    pub fn constant(&self) -> Rational {
        self.constant.clone()
    }

    /// Coefficient of the rank-1 class of content `t >= 1`.
    pub fn degenerate(&self, t: i64) -> Result<Rational> {
        if t < 1 || t > self.tmax {
            return Err(Error::TableRange {
                need: t,
                have: self.tmax,
            });
        }
        Ok(self.degenerate[(t - 1) as usize].clone())
    }

    /// Stored row for `N`: entries for contents `1..=content_slots(N)`.
    pub fn row(&self, n: i64) -> Result<&[Rational]> {
        if n < 1 || n > self.nmax {
            return Err(Error::TableRange {
                need: n,
                have: self.nmax,
            });
        }
        Ok(&self.posdef[(n - 1) as usize])
    }

    /// Coefficient for `(N, d)` with `N >= 1`. Zero when `d^2` does not
    /// divide `N` or the slot is past the stored row.
    pub fn coeff(&self, n: i64, d: i64) -> Result<Rational> {
        if n < 0 {
            return Err(Error::NegativeDiscriminant(n));
        }
        if n == 0 {
            return self.degenerate(d);
        }
        let row = self.row(n)?;
        let idx = (d - 1) as usize;
        Ok(row.get(idx).cloned().unwrap_or_default())
    }

    /// Coefficient of the matrix `T = (a, b/2; b/2, c)`, dispatching on
    /// `N = 4ac - b^2` and `gcd(a, b, c)`.
    pub fn coeff_for_matrix(&self, a: i64, b: i64, c: i64) -> Result<Rational> {
        let n = 4 * a * c - b * b;
        if a < 0 || c < 0 || n < 0 {
            return Err(Error::NotSemiDefinite { a, b, c });
        }
        let d = gcd3(a, b, c);
        if d == 0 {
            return Ok(self.constant());
        }
        if n == 0 {
            return self.degenerate(d);
        }
        self.coeff(n, d)
    }

    /// Build a table from the half-integral generating series.
    ///
    /// One series of length `nmax` is built per form; each row is then a
    /// small divisor sum over the content, so the total work is the series
    /// build plus `O(sum_N #divisors(f(N)))` exact-rational operations.
    pub fn build(form: FormId, nmax: i64, tmax: i64) -> Result<CoeffTable> {
        assert!(nmax >= 0 && tmax >= 0);
        let w = form.weight();
        let (scale, series) = if form.is_cusp() {
            (cusp_scale(w)?, cusp_series(w, nmax.max(0) as usize)?)
        } else {
            (eisenstein_scale(w)?, cohen_series(w, nmax.max(0) as usize)?)
        };

        let mut posdef = Vec::with_capacity(nmax as usize);
        for n in 1..=nmax {
            let f = content_slots(n);
            let mut row = Vec::with_capacity(f.max(0) as usize);
            for d in 1..=f {
                if n % (d * d) != 0 {
                    row.push(Rational::new());
                    continue;
                }
                let mut sum = Rational::new();
                for e in divisors(d) {
                    let idx = (n / (e * e)) as usize;
                    let coeff = series.coeff(idx);
                    if coeff.cmp0() == std::cmp::Ordering::Equal {
                        continue;
                    }
                    sum += coeff * Rational::from(Integer::from(e).pow(w - 1));
                }
                row.push(sum * scale.clone());
            }
            posdef.push(row);
        }

        let mut degenerate = Vec::with_capacity(tmax as usize);
        for t in 1..=tmax {
            if form.is_cusp() {
                degenerate.push(Rational::new());
            } else {
                degenerate.push(scale.clone() * Rational::from(sigma_pow(w - 1, t)));
            }
        }
        let constant = if form.is_cusp() {
            Rational::new()
        } else {
            Rational::from(1)
        };

        Ok(CoeffTable {
            form,
            nmax,
            tmax,
            posdef,
            degenerate,
            constant,
        })
    }

    /// Serialize to the versioned text format and write to `path`.
    ///
    /// Layout: a header line, the constant, the nonzero degenerate and
    /// positive-definite entries, then a SHA-256 line over every preceding
    /// byte of the file.
    pub fn save(&self, path: &Path) -> Result<()> {
        let body = self.serialize_body();
        let digest = Sha256::digest(body.as_bytes());
        let mut out = body;
        let _ = writeln!(out, "SHA256 {}", hex_string(&digest));
        std::fs::write(path, out)?;
        Ok(())
    }

    fn serialize_body(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "SIEGEL-COEFFS v1 {} {} {} {}",
            self.form.name(),
            self.form.weight(),
            self.nmax,
            self.tmax
        );
        let _ = writeln!(s, "C {}/{}", self.constant.numer(), self.constant.denom());
        for (i, v) in self.degenerate.iter().enumerate() {
            if v.cmp0() != std::cmp::Ordering::Equal {
                let _ = writeln!(s, "D {} {}/{}", i + 1, v.numer(), v.denom());
            }
        }
        for (i, row) in self.posdef.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if v.cmp0() != std::cmp::Ordering::Equal {
                    let _ = writeln!(s, "P {} {} {}/{}", i + 1, j + 1, v.numer(), v.denom());
                }
            }
        }
        s
    }

    /// Load a table saved by [`CoeffTable::save`], verifying the checksum.
    pub fn load(path: &Path) -> Result<CoeffTable> {
        let raw = std::fs::read_to_string(path)?;
        let sha_pos = raw
            .rfind("SHA256 ")
            .ok_or_else(|| Error::Format("missing SHA256 line".into()))?;
        let (body, sha_line) = raw.split_at(sha_pos);
        let stated = sha_line
            .trim_end()
            .strip_prefix("SHA256 ")
            .ok_or_else(|| Error::Format("bad SHA256 line".into()))?;
        let digest = Sha256::digest(body.as_bytes());
        if hex_string(&digest) != stated {
            return Err(Error::Checksum);
        }

        let mut lines = body.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty file".into()))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("SIEGEL-COEFFS") {
            return Err(Error::Format("bad magic".into()));
        }
        let version = parts.next().unwrap_or("");
        if version != "v1" {
            return Err(Error::Version(version.into()));
        }
        let form_name = parts
            .next()
            .ok_or_else(|| Error::Format("missing form".into()))?;
        let form = FormId::parse(form_name)
            .ok_or_else(|| Error::Format(format!("unknown form {form_name}")))?;
        let weight: u32 = parse_field(parts.next(), "weight")?;
        if weight != form.weight() {
            return Err(Error::Format(format!(
                "weight {weight} does not match {form_name}"
            )));
        }
        let nmax: i64 = parse_field(parts.next(), "nmax")?;
        let tmax: i64 = parse_field(parts.next(), "tmax")?;

        let mut posdef: Vec<Vec<Rational>> = (1..=nmax)
            .map(|n| vec![Rational::new(); content_slots(n).max(0) as usize])
            .collect();
        let mut degenerate = vec![Rational::new(); tmax.max(0) as usize];
        let mut constant = Rational::new();
        for line in lines {
            let mut w = line.split_whitespace();
            match w.next() {
                Some("C") => {
                    constant = parse_rational(w.next())?;
                }
                Some("D") => {
                    let t: i64 = parse_field(w.next(), "degenerate index")?;
                    if t < 1 || t > tmax {
                        return Err(Error::Format(format!("degenerate index {t} out of range")));
                    }
                    degenerate[(t - 1) as usize] = parse_rational(w.next())?;
                }
                Some("P") => {
                    let n: i64 = parse_field(w.next(), "row index")?;
                    let d: i64 = parse_field(w.next(), "content index")?;
                    if n < 1 || n > nmax {
                        return Err(Error::Format(format!("row index {n} out of range")));
                    }
                    let row = &mut posdef[(n - 1) as usize];
                    if d < 1 || d as usize > row.len() {
                        return Err(Error::Format(format!("content {d} out of range for N={n}")));
                    }
                    row[(d - 1) as usize] = parse_rational(w.next())?;
                }
                Some(other) => {
                    return Err(Error::Format(format!("unknown record {other}")));
                }
                None => {}
            }
        }
        Ok(CoeffTable {
            form,
            nmax,
            tmax,
            posdef,
            degenerate,
            constant,
        })
    }
}

/// Single-entry convenience used by tests and the CLI row lookup: builds
/// the minimal series and assembles one coefficient. `t` selects the
/// rank-1 class when `n = 0` (`t = 0` is the zero matrix).
pub fn coeff(form: FormId, n: i64, d: i64, t: i64) -> Result<Rational> {
    if n < 0 {
        return Err(Error::NegativeDiscriminant(n));
    }
    if n == 0 {
        let table = CoeffTable::build(form, 0, t)?;
        return if t == 0 {
            Ok(table.constant())
        } else {
            table.degenerate(t)
        };
    }
    let table = CoeffTable::build(form, n, 0)?;
    table.coeff(n, d)
}

/// In-memory (and optionally on-disk) cache of coefficient tables.
///
/// Keyed by form; a cached table is served whenever it covers the request,
/// and is extended (built to the larger range, superseding the old file)
/// when it does not. Cache files are named `<form>-v1.tbl` under the
/// configured directory. A corrupt cache file is rebuilt with a warning on
/// stderr rather than failing the computation.
pub struct TableStore {
    dir: Option<std::path::PathBuf>,
    cached: std::collections::HashMap<FormId, CoeffTable>,
}

impl TableStore {
    pub fn new(dir: Option<std::path::PathBuf>) -> TableStore {
        TableStore {
            dir,
            cached: std::collections::HashMap::new(),
        }
    }

    pub fn in_memory() -> TableStore {
        TableStore::new(None)
    }

    fn path_for(&self, form: FormId) -> Option<std::path::PathBuf> {
        self.dir
            .as_ref()
            .map(|d| d.join(format!("{}-v1.tbl", form.name())))
    }

    /// A table for `form` covering `N <= nmax` and contents `<= tmax`.
    pub fn get(&mut self, form: FormId, nmax: i64, tmax: i64) -> Result<&CoeffTable> {
        let covers = |t: &CoeffTable| t.nmax() >= nmax && t.tmax() >= tmax;
        let mut have = self.cached.get(&form).map(covers).unwrap_or(false);
        if !have {
            if let Some(path) = self.path_for(form) {
                if path.exists() {
                    match CoeffTable::load(&path) {
                        Ok(t) if t.form() == form => {
                            have = covers(&t);
                            self.cached.insert(form, t);
                        }
                        Ok(t) => {
                            return Err(Error::FormMismatch {
                                want: form.name().into(),
                                got: t.form().name().into(),
                            });
                        }
                        Err(e) => {
                            eprintln!(
                                "warning: cache {} unreadable ({e}); rebuilding",
                                path.display()
                            );
                        }
                    }
                }
            }
        }
        if !have {
            // Extend past the request so nearby queries stay cached.
            let grown_n = nmax.max(self.cached.get(&form).map(|t| t.nmax()).unwrap_or(0));
            let grown_t = tmax.max(self.cached.get(&form).map(|t| t.tmax()).unwrap_or(0));
            let table = CoeffTable::build(form, grown_n, grown_t)?;
            if let Some(path) = self.path_for(form) {
                if let Some(parent) = path.parent() {
                    std::fs::create_dir_all(parent)?;
                }
                table.save(&path)?;
            }
            self.cached.insert(form, table);
        }
        Ok(self.cached.get(&form).expect("just inserted"))
    }
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, what: &str) -> Result<T> {
    field
        .ok_or_else(|| Error::Format(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::Format(format!("bad {what}")))
}

fn parse_rational(field: Option<&str>) -> Result<Rational> {
    let s = field.ok_or_else(|| Error::Format("missing rational".into()))?;
    let (num, den) = s
        .split_once('/')
        .ok_or_else(|| Error::Format(format!("rational without denominator: {s}")))?;
    let num: Integer = num
        .parse()
        .map_err(|_| Error::Format(format!("bad numerator {num}")))?;
    let den: Integer = den
        .parse()
        .map_err(|_| Error::Format(format!("bad denominator {den}")))?;
    if den.cmp0() == std::cmp::Ordering::Equal {
        return Err(Error::Format("zero denominator".into()));
    }
    Ok(Rational::from((num, den)))
}

fn hex_string(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        let _ = write!(s, "{b:02x}");
    }
    s
}
