use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::{b_adic_expand, canonical_residue, SignedDigits};

/// Expansions with more digits than this are never materialized as `BigInt`.
pub const MATERIALIZE_LIMIT: u64 = 1 << 16;

/// A canonical signed b-adic expansion stored as `(position, digit)` pairs.
///
/// Positions are strictly increasing and every stored digit is a nonzero
/// element of `{-1, ..., b-2}`. Values whose top digit sits at position
/// `2^40` are fine; nothing here allocates proportionally to the position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparseDigits {
    base: u32,
    terms: Vec<(u64, i32)>,
}

impl SparseDigits {
    pub fn zero(base: u32) -> Self {
        SparseDigits { base, terms: Vec::new() }
    }

    /// Normalizes an arbitrary sum `sum coef * b^pos` into canonical form.
    pub fn from_terms<I>(base: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (u64, i64)>,
    {
        let mut raw: Vec<(u64, i64)> = terms.into_iter().filter(|t| t.1 != 0).collect();
        raw.sort_unstable_by_key(|t| t.0);
        let mut merged: Vec<(u64, i64)> = Vec::with_capacity(raw.len());
        for (p, c) in raw {
            match merged.last_mut() {
                Some(last) if last.0 == p => last.1 += c,
                _ => merged.push((p, c)),
            }
        }
        let b = base as i64;
        let mut out = Vec::with_capacity(merged.len() + 2);
        let mut carry = 0i64;
        let mut pos = 0u64;
        let mut i = 0;
        loop {
            if carry == 0 {
                match merged.get(i) {
                    Some(&(p, _)) => pos = p,
                    None => break,
                }
            }
            let mut v = carry;
            if let Some(&(p, c)) = merged.get(i) {
                if p == pos {
                    v += c;
                    i += 1;
                }
            }
            let c = canonical_residue(v, base);
            if c != 0 {
                out.push((pos, c as i32));
            }
            carry = (v - c) / b;
            pos += 1;
        }
        SparseDigits { base, terms: out }
    }

    pub fn from_bigint(n: &BigInt, base: u32) -> Self {
        let d = b_adic_expand(n, base).expect("base validated by caller");
        Self::from_signed_digits(&d)
    }

    pub fn from_signed_digits(d: &SignedDigits) -> Self {
        let terms = d
            .digits()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i as u64, c))
            .collect();
        SparseDigits { base: d.base(), terms }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn terms(&self) -> &[(u64, i32)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn top_position(&self) -> Option<u64> {
        self.terms.last().map(|t| t.0)
    }

    /// Number of digit positions up to the last nonzero one.
    pub fn digit_count(&self) -> u64 {
        self.top_position().map_or(0, |p| p + 1)
    }

    pub fn nonzero_count(&self) -> usize {
        self.terms.len()
    }

    pub fn digit_at(&self, pos: u64) -> i32 {
        match self.terms.binary_search_by_key(&pos, |t| t.0) {
            Ok(i) => self.terms[i].1,
            Err(_) => 0,
        }
    }

    /// Sign of the represented integer; the top digit decides it.
    pub fn signum(&self) -> i32 {
        self.terms.last().map_or(0, |t| t.1.signum())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1)
    }

    fn combine(&self, other: &Self, sign: i64) -> Self {
        assert_eq!(self.base, other.base, "mixed bases");
        let it = self
            .terms
            .iter()
            .map(|&(p, c)| (p, c as i64))
            .chain(other.terms.iter().map(|&(p, c)| (p, sign * c as i64)));
        Self::from_terms(self.base, it)
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::from_terms(self.base, self.terms.iter().map(|&(p, c)| (p, k * c as i64)))
    }

    /// Multiplies by `b^k`.
    pub fn shift_up(&self, k: u64) -> Self {
        SparseDigits {
            base: self.base,
            terms: self.terms.iter().map(|&(p, c)| (p + k, c)).collect(),
        }
    }

    /// Keeps the digits at positions `>= k`, moved down by `k`.
    pub fn shift_down(&self, k: u64) -> Self {
        SparseDigits {
            base: self.base,
            terms: self
                .terms
                .iter()
                .filter(|t| t.0 >= k)
                .map(|&(p, c)| (p - k, c))
                .collect(),
        }
    }

    /// Keeps the digits at positions `< k`.
    pub fn truncate(&self, k: u64) -> Self {
        SparseDigits {
            base: self.base,
            terms: self.terms.iter().copied().filter(|t| t.0 < k).collect(),
        }
    }

    /// Lowest position where the two canonical expansions differ, with both digits there.
    ///
    /// The difference `self - other` is `b^p (x - y)` modulo `b^(p+1)`.
    pub fn lowest_difference(&self, other: &Self) -> Option<(u64, i32, i32)> {
        let (a, b) = (&self.terms, &other.terms);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return None,
                (Some(&(p, x)), None) => return Some((p, x, 0)),
                (None, Some(&(p, y))) => return Some((p, 0, y)),
                (Some(&(p, x)), Some(&(s, y))) => match p.cmp(&s) {
                    Ordering::Less => return Some((p, x, 0)),
                    Ordering::Greater => return Some((s, 0, y)),
                    Ordering::Equal if x != y => return Some((p, x, y)),
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }

    /// The integer value, unless it has more than [`MATERIALIZE_LIMIT`] digits.
    pub fn to_bigint(&self) -> Option<BigInt> {
        if self.digit_count() > MATERIALIZE_LIMIT {
            return None;
        }
        let b = BigInt::from(self.base);
        let mut acc = BigInt::zero();
        let mut pos = self.digit_count();
        for &(p, c) in self.terms.iter().rev() {
            acc *= num_traits::pow(b.clone(), (pos - p) as usize);
            acc += c;
            pos = p;
        }
        acc *= num_traits::pow(b, pos as usize);
        Some(acc)
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.digit_count() > 64 {
            return None;
        }
        self.to_bigint()?.to_i64()
    }

    /// Floating approximation; infinite when out of range.
    pub fn to_f64(&self) -> f64 {
        let lb = (self.base as f64).ln();
        let mut s = 0.0;
        for &(p, c) in &self.terms {
            s += c as f64 * (p as f64 * lb).exp();
        }
        s
    }

    pub fn to_signed_digits(&self) -> Option<SignedDigits> {
        let n = self.digit_count();
        if n > MATERIALIZE_LIMIT {
            return None;
        }
        let mut v = vec![0i32; n as usize];
        for &(p, c) in &self.terms {
            v[p as usize] = c;
        }
        SignedDigits::new(v, self.base).ok()
    }

    pub fn to_decimal_string(&self) -> Option<String> {
        self.to_bigint().map(|v| v.to_string())
    }
}

impl Ord for SparseDigits {
    /// Numeric order; for canonical expansions the first differing digit from the top decides.
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.terms, &other.terms);
        let (mut i, mut j) = (a.len(), b.len());
        loop {
            let x = if i > 0 { Some(a[i - 1]) } else { None };
            let y = if j > 0 { Some(b[j - 1]) } else { None };
            let (dx, dy) = match (x, y) {
                (None, None) => return Ordering::Equal,
                (Some((_, c)), None) => (c, 0),
                (None, Some((_, c))) => (0, c),
                (Some((p, c)), Some((s, d))) => match p.cmp(&s) {
                    Ordering::Greater => (c, 0),
                    Ordering::Less => (0, d),
                    Ordering::Equal => (c, d),
                },
            };
            if dx != dy {
                return dx.cmp(&dy);
            }
            match (x, y) {
                (Some((p, _)), Some((s, _))) if p == s => {
                    i -= 1;
                    j -= 1;
                }
                _ => unreachable!("distinct positions always give differing digits"),
            }
        }
    }
}

impl PartialOrd for SparseDigits {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
