use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::json;

use super::TreeMappingSpec;
use crate::error::{Error, Result};
use crate::numtheory::{q_adic_letters, MeasureParams, SparseDigits, Word};

/// Default cap on enumerated elements.
pub const MAX_ENUMERATION: usize = 1_000_000;

/// One element `lambda` of an orthogonal set together with its digit statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateEntry {
    /// Position in the q-adic index order of the tree (or in the input list).
    pub index: u64,
    pub word: Option<Word>,
    pub lambda: SparseDigits,
    /// Position of the last nonzero digit, counted from 1.
    pub n_last: u64,
    /// Nonzero digits past the q-adic length of the index.
    pub n_star: Option<u64>,
}

impl CandidateEntry {
    /// Level of the stem (`word length - 1`); `None` for the root.
    pub fn level(&self) -> Option<usize> {
        self.word.as_ref().and_then(|w| w.len().checked_sub(1))
    }

    /// One JSON line: `{n, index, word, lambda, digits, N, Nstar}`.
    pub fn to_json_line(&self, n: usize) -> String {
        let digits: Vec<(u64, i32)> = self.lambda.terms().to_vec();
        json!({
            "n": n,
            "index": self.index,
            "word": self.word,
            "lambda": self.lambda.to_decimal_string(),
            "digits": digits,
            "N": self.n_last,
            "Nstar": self.n_star,
        })
        .to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CandidateSource {
    Spec { regular: bool },
    Subtree { stem: Word },
    External,
}

/// An ordered finite prefix of `Lambda(tau)`; the orthogonal set is `r * lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCandidate {
    pub params: MeasureParams,
    pub entries: Vec<CandidateEntry>,
    pub source: CandidateSource,
}

impl SpectrumCandidate {
    /// Wraps an explicit list of integers (pre-scaling).
    pub fn from_integers(params: MeasureParams, values: &[BigInt]) -> Result<Self> {
        params.require_r()?;
        let entries = values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let lambda = SparseDigits::from_bigint(v, params.b());
                CandidateEntry { index: i as u64, word: None, n_last: lambda.digit_count(), lambda, n_star: None }
            })
            .collect();
        Ok(SpectrumCandidate { params, entries, source: CandidateSource::External })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lambdas(&self) -> impl Iterator<Item = &SparseDigits> {
        self.entries.iter().map(|e| &e.lambda)
    }

    /// The first `n` entries.
    pub fn prefix(&self, n: usize) -> SpectrumCandidate {
        SpectrumCandidate {
            params: self.params,
            entries: self.entries[..n.min(self.entries.len())].to_vec(),
            source: self.source.clone(),
        }
    }

    /// A copy without the entry at position `i`.
    pub fn without(&self, i: usize) -> SpectrumCandidate {
        let mut c = self.clone();
        c.entries.remove(i);
        c.source = CandidateSource::External;
        c
    }

    /// `lambda` as big integers, where representable.
    pub fn to_bigints(&self) -> Option<Vec<BigInt>> {
        self.lambdas().map(|l| l.to_bigint()).collect()
    }
}

fn entry_for(spec: &TreeMappingSpec, index: u64, word: Vec<u32>) -> Option<CandidateEntry> {
    let (lambda, n_star) = spec.path_with_tail(&word)?;
    Some(CandidateEntry { index, word: Some(Word(word)), n_last: lambda.digit_count(), lambda, n_star: Some(n_star) })
}

/// `lambda_n = Pi(sigma 0^inf)` for the first `count` regular stems in index order.
pub fn enumerate(spec: &TreeMappingSpec, count: usize) -> Result<SpectrumCandidate> {
    if count > MAX_ENUMERATION {
        return Err(Error::Resource(format!("{count} elements exceed the enumeration cap {MAX_ENUMERATION}")));
    }
    let q = spec.params().q();
    let entries = if spec.is_regular() {
        (0..count as u64)
            .into_par_iter()
            .map(|n| entry_for(spec, n, q_adic_letters(n, q)).expect("regular spec"))
            .collect()
    } else {
        let mut out = Vec::with_capacity(count);
        let mut n = 0u64;
        while out.len() < count {
            if let Some(e) = entry_for(spec, n, q_adic_letters(n, q)) {
                out.push(e);
            }
            n += 1;
        }
        out
    };
    Ok(SpectrumCandidate { params: *spec.params(), entries, source: CandidateSource::Spec { regular: spec.is_regular() } })
}

/// Elements of `Lambda_I(tau)`: the digits of `Pi(I J 0^inf)` past position `|I|`,
/// for `J` in index order. `J` empty is included iff `I 0^inf` is regular.
pub fn subtree_enumerate(spec: &TreeMappingSpec, stem: &Word, count: usize) -> Result<SpectrumCandidate> {
    if count > MAX_ENUMERATION {
        return Err(Error::Resource(format!("{count} elements exceed the enumeration cap {MAX_ENUMERATION}")));
    }
    stem.check_alphabet(spec.params().q())?;
    let q = spec.params().q();
    let k = stem.len() as u64;
    let mut entries = Vec::with_capacity(count);
    let mut n = 0u64;
    let limit = (count as u64 + 1).saturating_mul(1 + spec.irregular_paths().len() as u64 * 64);
    while entries.len() < count && n <= limit {
        let j = q_adic_letters(n, q);
        let full = stem.concat(&j);
        if let Some((value, _)) = spec.path_with_tail(full.letters()) {
            let lambda = value.shift_down(k);
            let own = j.len() as u64;
            let n_star = lambda.terms().iter().filter(|t| t.0 >= own).count() as u64;
            entries.push(CandidateEntry { index: n, word: Some(Word(j)), n_last: lambda.digit_count(), lambda, n_star: Some(n_star) });
        }
        n += 1;
    }
    Ok(SpectrumCandidate { params: *spec.params(), entries, source: CandidateSource::Subtree { stem: stem.clone() } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treemap::{canonical_spec, TailGenerator};

    fn ints(c: &SpectrumCandidate) -> Vec<i64> {
        c.lambdas().map(|l| l.to_i64().unwrap()).collect()
    }

    #[test]
    fn canonical_prefixes() {
        let p = MeasureParams::new(2, 4).unwrap();
        assert_eq!(ints(&enumerate(&canonical_spec(&p).unwrap(), 4).unwrap()), vec![0, 1, 4, 5]);
        let p = MeasureParams::new(3, 6).unwrap();
        assert_eq!(ints(&enumerate(&canonical_spec(&p).unwrap(), 4).unwrap()), vec![0, 1, 2, 6]);
    }

    #[test]
    fn subtree_of_canonical() {
        let p = MeasureParams::new(2, 4).unwrap();
        let spec = canonical_spec(&p).unwrap();
        let sub = subtree_enumerate(&spec, &Word(vec![1]), 4).unwrap();
        assert_eq!(ints(&sub), vec![0, 1, 4, 5]);
        let whole = subtree_enumerate(&spec, &Word::root(), 16).unwrap();
        assert_eq!(ints(&whole), ints(&enumerate(&spec, 16).unwrap()));
    }

    #[test]
    fn irregular_stems_are_skipped() {
        let p = MeasureParams::new(2, 4).unwrap();
        let spec = canonical_spec(&p)
            .unwrap()
            .with_irregular_path(Word(vec![1]), TailGenerator::EveryLevel { digit: 2 })
            .unwrap();
        let c = enumerate(&spec, 3).unwrap();
        assert_eq!(c.entries.iter().map(|e| e.index).collect::<Vec<_>>(), vec![0, 2, 3]);
        let sub = subtree_enumerate(&spec, &Word(vec![1]), 2).unwrap();
        assert_eq!(sub.entries[0].index, 1);
    }

    #[test]
    fn cap_enforced() {
        let p = MeasureParams::new(2, 4).unwrap();
        assert!(matches!(enumerate(&canonical_spec(&p).unwrap(), MAX_ENUMERATION + 1), Err(Error::Resource(_))));
    }

    #[test]
    fn json_line_fields() {
        let p = MeasureParams::new(2, 4).unwrap();
        let c = enumerate(&canonical_spec(&p).unwrap(), 6).unwrap();
        let v: serde_json::Value = serde_json::from_str(&c.entries[5].to_json_line(5)).unwrap();
        assert_eq!(v["lambda"], "17");
        assert_eq!(v["word"], serde_json::json!([1, 0, 1]));
        assert_eq!(v["N"], 3);
        assert_eq!(v["Nstar"], 0);
    }
}
