//! Exact integer arithmetic: q-adic words, signed b-adic expansions and
//! membership in the zero set of the Fourier transform.

mod sparse;

pub use sparse::SparseDigits;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The pair `(q, b)` defining `mu_{q,b}`, with `r = b/q` when `q | b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct MeasureParams {
    q: u32,
    b: u32,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    q: u32,
    b: u32,
}

impl TryFrom<RawParams> for MeasureParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        MeasureParams::new(raw.q, raw.b)
    }
}

impl From<MeasureParams> for RawParams {
    fn from(p: MeasureParams) -> Self {
        RawParams { q: p.q, b: p.b }
    }
}

/// Largest base accepted; keeps digit arithmetic inside `i64`.
pub const MAX_BASE: u32 = 1 << 16;

impl MeasureParams {
    pub fn new(q: u32, b: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidParameters(format!("q = {q} must be at least 2")));
        }
        if b < 3 || b > MAX_BASE {
            return Err(Error::InvalidParameters(format!(
                "b = {b} must lie in [3, {MAX_BASE}]"
            )));
        }
        if q >= b {
            return Err(Error::InvalidParameters(format!("need q < b, got q = {q}, b = {b}")));
        }
        Ok(MeasureParams { q, b })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    /// `b/q` if `q` divides `b`.
    pub fn r(&self) -> Option<u32> {
        (self.b % self.q == 0).then_some(self.b / self.q)
    }

    pub fn require_r(&self) -> Result<u32> {
        self.r().ok_or_else(|| {
            Error::Unsupported(format!("q = {} does not divide b = {}", self.q, self.b))
        })
    }

    pub fn gcd(&self) -> u32 {
        self.q.gcd(&self.b)
    }
}

impl fmt::Display for MeasureParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(q={}, b={})", self.q, self.b)
    }
}

/// The residue of `v` modulo `b` lying in `{-1, 0, ..., b-2}`.
#[inline]
pub fn canonical_residue(v: i64, b: u32) -> i64 {
    (v + 1).rem_euclid(b as i64) - 1
}

/// Checks `b >= 3` for signed expansions.
fn check_base(b: u32) -> Result<()> {
    if b < 3 || b > MAX_BASE {
        return Err(Error::InvalidParameters(format!(
            "base {b} outside [3, {MAX_BASE}]; the digit set would be degenerate"
        )));
    }
    Ok(())
}

/// A finite canonical expansion over `{-1, ..., b-2}`, least significant digit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedDigits {
    digits: Vec<i32>,
    base: u32,
}

impl SignedDigits {
    /// Validates range and canonical form (no trailing zero).
    pub fn new(digits: Vec<i32>, base: u32) -> Result<Self> {
        check_base(base)?;
        if let Some(&d) = digits.iter().find(|&&d| d < -1 || d > base as i32 - 2) {
            return Err(Error::InvalidParameters(format!(
                "digit {d} outside [-1, {}]",
                base - 2
            )));
        }
        if digits.last() == Some(&0) {
            return Err(Error::NonCanonical("trailing zero digit".into()));
        }
        Ok(SignedDigits { digits, base })
    }

    pub fn digits(&self) -> &[i32] {
        &self.digits
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn eval(&self) -> BigInt {
        b_adic_eval(self)
    }
}

/// Signed b-adic expansion of `n` by repeated division `n = l*b + c`, `c` canonical.
pub fn b_adic_expand(n: &BigInt, b: u32) -> Result<SignedDigits> {
    check_base(b)?;
    let mut digits = Vec::new();
    if let Some(mut v) = n.to_i64().filter(|v| v.unsigned_abs() < (1u64 << 62)) {
        while v != 0 {
            let c = canonical_residue(v, b);
            digits.push(c as i32);
            v = (v - c) / b as i64;
        }
    } else {
        let big_b = BigInt::from(b);
        let mut v = n.clone();
        while !v.is_zero() {
            let c: BigInt = (&v + 1u32).mod_floor(&big_b) - 1;
            let ci = c.to_i32().expect("residue fits");
            digits.push(ci);
            v = (v - c) / &big_b;
        }
    }
    Ok(SignedDigits { digits, base: b })
}

/// Evaluates `sum digits[k] * b^k`.
pub fn b_adic_eval(d: &SignedDigits) -> BigInt {
    let b = BigInt::from(d.base);
    d.digits
        .iter()
        .rev()
        .fold(BigInt::zero(), |acc, &c| acc * &b + c)
}

/// A node of the q-adic tree: a finite word over `{0, ..., q-1}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<u32>);

impl Word {
    pub fn root() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All letters below `q`.
    pub fn check_alphabet(&self, q: u32) -> Result<()> {
        match self.0.iter().find(|&&l| l >= q) {
            Some(l) => Err(Error::InvalidParameters(format!(
                "letter {l} outside alphabet of size {q} in {self}"
            ))),
            None => Ok(()),
        }
    }

    /// Drops trailing zero letters.
    pub fn stem(&self) -> &[u32] {
        strip_zeros(&self.0)
    }

    pub fn concat(&self, other: &[u32]) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(other);
        Word(v)
    }
}

pub(crate) fn strip_zeros(w: &[u32]) -> &[u32] {
    let k = w.iter().rposition(|&l| l != 0).map_or(0, |i| i + 1);
    &w[..k]
}

impl std::borrow::Borrow<[u32]> for Word {
    fn borrow(&self) -> &[u32] {
        &self.0
    }
}

impl From<Vec<u32>> for Word {
    fn from(v: Vec<u32>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("]")
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Accepts `[1,0,1]`, `1,0,1`, `[]` or the empty string.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = match (t.strip_prefix('['), t.ends_with(']')) {
            (Some(rest), true) => &rest[..rest.len() - 1],
            (None, false) => t,
            _ => return Err(Error::schema("word", "unbalanced brackets")),
        };
        if inner.trim().is_empty() {
            return Ok(Word::root());
        }
        inner
            .split(',')
            .enumerate()
            .map(|(i, tok)| {
                tok.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::schema(format!("word[{i}]"), e.to_string()))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

/// The q-adic word of `n >= 1`, least significant letter first.
pub fn q_adic_expand(n: u64, q: u32) -> Result<Word> {
    if q < 2 {
        return Err(Error::InvalidParameters(format!("q = {q} must be at least 2")));
    }
    if n == 0 {
        return Err(Error::Domain("0 corresponds to the root word".into()));
    }
    Ok(Word(q_adic_letters(n, q)))
}

pub(crate) fn q_adic_letters(mut n: u64, q: u32) -> Vec<u32> {
    let mut letters = Vec::new();
    while n > 0 {
        letters.push((n % q as u64) as u32);
        n /= q as u64;
    }
    letters
}

/// Inverse of [`q_adic_expand`].
pub fn q_adic_eval(w: &Word, q: u32) -> Result<u64> {
    w.check_alphabet(q)?;
    match w.0.last() {
        None => return Err(Error::NonCanonical("empty word".into())),
        Some(0) => return Err(Error::NonCanonical(format!("trailing zero in {w}"))),
        _ => {}
    }
    word_index(&w.0, q).ok_or_else(|| Error::Range(format!("index of {w} exceeds 64 bits")))
}

/// `sum w_j q^(j-1)` without canonical checks; `None` on overflow.
pub(crate) fn word_index(w: &[u32], q: u32) -> Option<u64> {
    w.iter().rev().try_fold(0u64, |acc, &l| {
        acc.checked_mul(q as u64)?.checked_add(l as u64)
    })
}

/// Writes `m = b^n * a` with `b` not dividing `a`.
pub fn strip_base_powers(m: &BigInt, b: u32) -> Result<(u64, BigInt)> {
    if m.is_zero() {
        return Err(Error::Domain("cannot strip powers from 0".into()));
    }
    if b < 2 {
        return Err(Error::InvalidParameters(format!("base {b} must be at least 2")));
    }
    let big_b = BigInt::from(b);
    let mut a = m.clone();
    let mut n = 0u64;
    loop {
        let (quot, rem) = a.div_rem(&big_b);
        if !rem.is_zero() {
            return Ok((n, a));
        }
        a = quot;
        n += 1;
    }
}

/// Whether `d` lies in the zero set `r * {b^n a : n >= 0, q does not divide a}`.
pub fn in_zero_set(d: &BigInt, p: &MeasureParams) -> Result<bool> {
    let r = p.require_r()?;
    if d.is_zero() {
        return Ok(false);
    }
    let (quot, rem) = d.div_rem(&BigInt::from(r));
    if !rem.is_zero() {
        return Ok(false);
    }
    let (_, a) = strip_base_powers(&quot, p.b())?;
    Ok(!(a.abs() % p.q()).is_zero())
}

/// Machine-integer form of [`in_zero_set`]; requires `q | b`.
pub fn in_zero_set_i64(d: i64, p: &MeasureParams) -> Result<bool> {
    let r = p.require_r()? as i64;
    if d == 0 || d % r != 0 {
        return Ok(false);
    }
    Ok(scaled_zero_member(d / r, p.q(), p.b()))
}

/// Whether `x = b^n a` for some `n >= 0` and `a` not divisible by `q`.
///
/// For any `(q, b)` the frequency `(b/q) x` is a zero of the Fourier
/// transform exactly when this holds.
pub fn scaled_zero_member(x: i64, q: u32, b: u32) -> bool {
    if x == 0 {
        return false;
    }
    let (q, b) = (q as i64, b as i64);
    let mut a = x;
    while a % b == 0 {
        a /= b;
    }
    a % q != 0
}

/// Parses a comma or whitespace separated list of integers.
pub fn parse_integer_list(s: &str) -> Result<Vec<BigInt>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .enumerate()
        .map(|(i, t)| {
            t.parse::<BigInt>()
                .map_err(|e| Error::schema(format!("list[{i}]"), format!("{t:?}: {e}")))
        })
        .collect()
}
