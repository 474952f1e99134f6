//! Maximal mappings on the q-adic tree and the orthogonal sets they encode.
//!
//! A node is a word over `{0, ..., q-1}`. A node whose last letter is nonzero
//! is labeled by `base_residues` (or an override); a node `s 0^l` with `s`
//! ending in a nonzero letter is the `l`-th tail node of the stem `s` and is
//! labeled by the tail rule. The path `s 0^inf` projects to the integer
//! `sum tau(s|_k) b^(k-1)`.

mod construct;
mod enumerate;
mod json;
mod reconstruct;
mod stats;
mod validate;

pub use construct::{canonical_spec, nonspectrum_spec, regularize, slow_growth_spec, sparse_spec, MAX_SPARSE_POSITION};
pub use enumerate::{enumerate, subtree_enumerate, CandidateEntry, CandidateSource, SpectrumCandidate, MAX_ENUMERATION};
pub use reconstruct::{mapping_from_set, DigitSetConflict, NodeAssignment, PartialMapping, ReconstructionReport};
pub use stats::{profile_stats, stats, DigitStats, LevelStats};
pub use validate::{validate, Clause, ValidationReport, Violation};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numtheory::{strip_zeros, word_index, MeasureParams, SparseDigits, Word};

/// How many nonzero digits a leading tail block carries.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockCount {
    Constant(u64),
    /// `floor(log_base(log_q n))` for the stem with index `n`, and 0 when `log_q n < 1`.
    IteratedLog { base: f64 },
    /// `ceil(coefficient * log_base(l))` for stems of length `l + 1`.
    LevelLog { coefficient: f64, base: f64 },
}

impl BlockCount {
    /// Block length for the stem with index `n` at level `level`.
    pub fn count(&self, n: u64, level: u64, q: u32) -> u64 {
        match self {
            BlockCount::Constant(c) => *c,
            BlockCount::IteratedLog { base } => iterated_log_count(log_q(n, q), *base),
            BlockCount::LevelLog { coefficient, base } => level_log_count(level, *coefficient, *base),
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            BlockCount::Constant(_) => Ok(()),
            BlockCount::IteratedLog { base } | BlockCount::LevelLog { base, .. } if !(*base > 1.0 && base.is_finite()) => {
                Err(Error::InvalidParameters(format!("logarithm base {base} must exceed 1")))
            }
            BlockCount::LevelLog { coefficient, .. } if !(*coefficient > 0.0 && coefficient.is_finite()) => {
                Err(Error::InvalidParameters(format!("coefficient {coefficient} must be positive")))
            }
            _ => Ok(()),
        }
    }
}

pub(crate) fn iterated_log_count(x: f64, base: f64) -> u64 {
    if x < 1.0 {
        return 0;
    }
    (x.ln() / base.ln()).floor().max(0.0) as u64
}

pub(crate) fn level_log_count(level: u64, coefficient: f64, base: f64) -> u64 {
    if level < 1 {
        return 0;
    }
    (coefficient * (level as f64).ln() / base.ln()).ceil().max(0.0) as u64
}

/// `log_q n`, exact when `n` is a power of `q`.
pub(crate) fn log_q(n: u64, q: u32) -> f64 {
    if n == 0 {
        return f64::NEG_INFINITY;
    }
    let mut k = 0u64;
    let mut m = n;
    while m % q as u64 == 0 {
        m /= q as u64;
        k += 1;
    }
    if m == 1 {
        k as f64
    } else {
        (n as f64).ln() / (q as f64).ln()
    }
}

/// The value `tau(s 0^l)` for `l >= 1` at each stem `s`.
#[derive(Debug, Clone, PartialEq)]
pub enum TailRule {
    AllZero,
    /// `digit` at `l = m_n` where `n` is the stem index; `m_n` continues by
    /// increments of one past the listed exponents.
    SparsePowers { exponents: Vec<u64>, digit: i32, growth: Option<String> },
    /// `digit` at `l = 1, ..., count`.
    LeadingBlock { digit: i32, count: BlockCount },
    /// Finite table `(stem, l) -> digit`; zero elsewhere.
    Custom { entries: BTreeMap<(Word, u64), i32> },
}

impl TailRule {
    /// `m_n` for a sparse rule.
    pub fn sparse_exponent(exponents: &[u64], n: u64) -> u64 {
        let len = exponents.len() as u64;
        if n >= 1 && n <= len {
            exponents[(n - 1) as usize]
        } else {
            exponents.last().copied().unwrap_or(0).saturating_add(n.saturating_sub(len))
        }
    }
}

/// Tail labels along an irregular path `s 0^inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TailGenerator {
    /// `digit` at every tail node.
    EveryLevel { digit: i32 },
    /// `digit` at `l = 1, 2, 4, 8, ...`.
    Doubling { digit: i32 },
}

impl TailGenerator {
    pub fn digit_at(&self, ell: u64) -> i32 {
        match *self {
            TailGenerator::EveryLevel { digit } => digit,
            TailGenerator::Doubling { digit } if ell.is_power_of_two() => digit,
            TailGenerator::Doubling { .. } => 0,
        }
    }

    pub fn digit(&self) -> i32 {
        match *self {
            TailGenerator::EveryLevel { digit } | TailGenerator::Doubling { digit } => digit,
        }
    }

    /// Parses `every_level`, `doubling` or `name:digit`; the digit defaults to `q`.
    pub fn parse(s: &str, q: u32) -> Result<Self> {
        let (name, digit) = match s.split_once(':') {
            Some((n, d)) => (
                n.trim(),
                d.trim()
                    .parse::<i32>()
                    .map_err(|e| Error::schema("tail_digits", format!("digit {d:?}: {e}")))?,
            ),
            None => (s.trim(), q as i32),
        };
        if digit == 0 {
            return Err(Error::schema("tail_digits", "an irregular tail needs a nonzero digit"));
        }
        match name {
            "every_level" => Ok(TailGenerator::EveryLevel { digit }),
            "doubling" => Ok(TailGenerator::Doubling { digit }),
            _ => Err(Error::schema("tail_digits", format!("unknown generator {name:?}"))),
        }
    }
}

impl fmt::Display for TailGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailGenerator::EveryLevel { digit } => write!(f, "every_level:{digit}"),
            TailGenerator::Doubling { digit } => write!(f, "doubling:{digit}"),
        }
    }
}

/// A finitely described maximal mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeMappingSpec {
    params: MeasureParams,
    base_residues: Vec<i32>,
    tail_rule: TailRule,
    overrides: BTreeMap<Word, i32>,
    irregular_paths: BTreeMap<Word, TailGenerator>,
    regularized_stems: BTreeSet<Word>,
    tail_overrides: BTreeMap<Word, BTreeMap<u64, i32>>,
}

/// The projection of a path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathValue {
    Regular(SparseDigits),
    Irregular,
}

impl PathValue {
    pub fn regular(self) -> Option<SparseDigits> {
        match self {
            PathValue::Regular(v) => Some(v),
            PathValue::Irregular => None,
        }
    }
}

fn check_stem(stem: &Word, q: u32) -> Result<()> {
    stem.check_alphabet(q)?;
    match stem.letters().last() {
        None => Err(Error::NonCanonical("a stem must be nonempty".into())),
        Some(0) => Err(Error::NonCanonical(format!("stem {stem} ends in a zero letter"))),
        _ => Ok(()),
    }
}

impl TreeMappingSpec {
    /// A spec without overrides or irregular paths. Residue constraints are
    /// checked by [`validate`], not here.
    pub fn new(params: MeasureParams, base_residues: Vec<i32>, tail_rule: TailRule) -> Result<Self> {
        params.require_r()?;
        if base_residues.len() != params.q() as usize {
            return Err(Error::InvalidParameters(format!(
                "expected {} base residues, got {}",
                params.q(),
                base_residues.len()
            )));
        }
        match &tail_rule {
            TailRule::SparsePowers { exponents, .. } => {
                if exponents.is_empty() || exponents[0] == 0 {
                    return Err(Error::InvalidParameters("sparse exponents must be positive and nonempty".into()));
                }
                if exponents.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidParameters("sparse exponents must be strictly increasing".into()));
                }
            }
            TailRule::LeadingBlock { count, .. } => count.check()?,
            TailRule::Custom { entries } => {
                for (stem, ell) in entries.keys() {
                    check_stem(stem, params.q())?;
                    if *ell == 0 {
                        return Err(Error::InvalidParameters(format!("custom entry at {stem} needs l >= 1")));
                    }
                }
            }
            TailRule::AllZero => {}
        }
        Ok(TreeMappingSpec {
            params,
            base_residues,
            tail_rule,
            overrides: BTreeMap::new(),
            irregular_paths: BTreeMap::new(),
            regularized_stems: BTreeSet::new(),
            tail_overrides: BTreeMap::new(),
        })
    }

    /// Sets `tau(word) = digit`. Words of the form `0^n` are fixed at 0 and rejected.
    pub fn with_override(mut self, word: Word, digit: i32) -> Result<Self> {
        word.check_alphabet(self.params.q())?;
        let stem = strip_zeros(word.letters());
        if stem.is_empty() {
            return Err(Error::InvalidParameters(format!("override at {word} would touch a 0^n node")));
        }
        if stem.len() < word.len() {
            let ell = (word.len() - stem.len()) as u64;
            self.tail_overrides.entry(Word(stem.to_vec())).or_default().insert(ell, digit);
        }
        self.overrides.insert(word, digit);
        Ok(self)
    }

    /// Declares `stem 0^inf` irregular with the given tail labels.
    pub fn with_irregular_path(mut self, stem: Word, generator: TailGenerator) -> Result<Self> {
        check_stem(&stem, self.params.q())?;
        self.regularized_stems.remove(&stem);
        self.irregular_paths.insert(stem, generator);
        Ok(self)
    }

    pub(crate) fn with_regularized_stem(mut self, stem: Word) -> Result<Self> {
        check_stem(&stem, self.params.q())?;
        self.irregular_paths.remove(&stem);
        self.regularized_stems.insert(stem);
        Ok(self)
    }

    pub fn params(&self) -> &MeasureParams {
        &self.params
    }

    pub fn base_residues(&self) -> &[i32] {
        &self.base_residues
    }

    pub fn tail_rule(&self) -> &TailRule {
        &self.tail_rule
    }

    pub fn overrides(&self) -> &BTreeMap<Word, i32> {
        &self.overrides
    }

    pub fn irregular_paths(&self) -> &BTreeMap<Word, TailGenerator> {
        &self.irregular_paths
    }

    pub fn regularized_stems(&self) -> &BTreeSet<Word> {
        &self.regularized_stems
    }

    pub fn is_regular(&self) -> bool {
        self.irregular_paths.is_empty()
    }

    pub fn is_irregular_stem(&self, stem: &[u32]) -> bool {
        self.irregular_paths.contains_key(stem)
    }

    /// `tau(node)`.
    pub fn label(&self, node: &[u32]) -> i32 {
        let stem = strip_zeros(node);
        if stem.is_empty() {
            return 0;
        }
        if stem.len() == node.len() {
            if let Some(&d) = self.overrides.get(node) {
                return d;
            }
            return self.base_residues[*node.last().expect("nonempty") as usize];
        }
        self.tail_label(stem, (node.len() - stem.len()) as u64)
    }

    fn tail_label(&self, stem: &[u32], ell: u64) -> i32 {
        if self.regularized_stems.contains(stem) {
            return 0;
        }
        if let Some(&d) = self.tail_overrides.get(stem).and_then(|m| m.get(&ell)) {
            return d;
        }
        if let Some(g) = self.irregular_paths.get(stem) {
            return g.digit_at(ell);
        }
        self.rule_digit(stem, ell)
    }

    fn stem_index(&self, stem: &[u32]) -> u64 {
        word_index(stem, self.params.q()).unwrap_or(u64::MAX)
    }

    fn rule_digit(&self, stem: &[u32], ell: u64) -> i32 {
        match &self.tail_rule {
            TailRule::AllZero => 0,
            TailRule::SparsePowers { exponents, digit, .. } => {
                if ell == TailRule::sparse_exponent(exponents, self.stem_index(stem)) {
                    *digit
                } else {
                    0
                }
            }
            TailRule::LeadingBlock { digit, count } => {
                let n = self.stem_index(stem);
                if ell <= count.count(n, stem.len() as u64 - 1, self.params.q()) {
                    *digit
                } else {
                    0
                }
            }
            TailRule::Custom { entries } => entries.get(&(Word(stem.to_vec()), ell)).copied().unwrap_or(0),
        }
    }

    /// Nonzero tail labels `(l, tau(stem 0^l))` of a regular stem, sorted by `l`.
    ///
    /// `None` when the path `stem 0^inf` is irregular.
    pub fn tail_digits(&self, stem: &[u32]) -> Option<Vec<(u64, i32)>> {
        if self.regularized_stems.contains(stem) {
            return Some(Vec::new());
        }
        if self.irregular_paths.contains_key(stem) {
            return None;
        }
        let mut tails: BTreeMap<u64, i32> = match &self.tail_rule {
            TailRule::AllZero => BTreeMap::new(),
            TailRule::SparsePowers { exponents, digit, .. } => {
                let m = TailRule::sparse_exponent(exponents, self.stem_index(stem));
                BTreeMap::from([(m, *digit)])
            }
            TailRule::LeadingBlock { digit, count } => {
                let c = count.count(self.stem_index(stem), stem.len() as u64 - 1, self.params.q());
                (1..=c).map(|l| (l, *digit)).collect()
            }
            TailRule::Custom { entries } => {
                let key = Word(stem.to_vec());
                entries
                    .range((key.clone(), 0)..=(key, u64::MAX))
                    .map(|((_, l), d)| (*l, *d))
                    .collect()
            }
        };
        if let Some(m) = self.tail_overrides.get(stem) {
            tails.extend(m.iter().map(|(&l, &d)| (l, d)));
        }
        Some(tails.into_iter().filter(|t| t.1 != 0).collect())
    }

    /// Projection of `word 0^inf` together with its tail count.
    pub(crate) fn path_with_tail(&self, word: &[u32]) -> Option<(SparseDigits, u64)> {
        let stem = strip_zeros(word);
        let b = self.params.b();
        if stem.is_empty() {
            return Some((SparseDigits::zero(b), 0));
        }
        let tails = self.tail_digits(stem)?;
        let k = stem.len() as u64;
        let mut terms: Vec<(u64, i64)> = (1..=stem.len())
            .map(|j| ((j - 1) as u64, self.label(&stem[..j]) as i64))
            .collect();
        terms.extend(tails.iter().map(|&(l, d)| (k - 1 + l, d as i64)));
        Some((SparseDigits::from_terms(b, terms), tails.len() as u64))
    }

    /// `Pi(word 0^inf)`, or `Irregular` when the path is not eventually zero.
    pub fn project(&self, word: &Word) -> PathValue {
        match self.path_with_tail(word.letters()) {
            Some((v, _)) => PathValue::Regular(v),
            None => PathValue::Irregular,
        }
    }

    /// `sum_{k <= |node|} tau(node|_k) b^(k-1)`.
    pub fn prefix_value(&self, node: &[u32]) -> SparseDigits {
        let terms = (1..=node.len()).map(|j| ((j - 1) as u64, self.label(&node[..j]) as i64));
        SparseDigits::from_terms(self.params.b(), terms)
    }

    /// Stems whose statistics may differ from the tail rule.
    pub(crate) fn exceptional_stems(&self) -> BTreeSet<Word> {
        let mut s: BTreeSet<Word> = self.tail_overrides.keys().cloned().collect();
        s.extend(self.regularized_stems.iter().cloned());
        s.extend(self.irregular_paths.keys().cloned());
        if let TailRule::Custom { entries } = &self.tail_rule {
            s.extend(entries.keys().map(|(w, _)| w.clone()));
        }
        s
    }
}

impl FromStr for TreeMappingSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::from_json_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn p24() -> MeasureParams {
        MeasureParams::new(2, 4).unwrap()
    }

    fn value(spec: &TreeMappingSpec, w: &[u32]) -> BigInt {
        spec.project(&Word(w.to_vec())).regular().unwrap().to_bigint().unwrap()
    }

    #[test]
    fn canonical_projection() {
        let spec = canonical_spec(&p24()).unwrap();
        assert_eq!(value(&spec, &[]), BigInt::from(0));
        assert_eq!(value(&spec, &[1, 0, 1]), BigInt::from(17));
        assert_eq!(value(&spec, &[1, 1]), BigInt::from(5));
    }

    #[test]
    fn labels_follow_rules() {
        let spec = TreeMappingSpec::new(
            p24(),
            vec![0, 1],
            TailRule::SparsePowers { exponents: vec![2, 3, 5], digit: 2, growth: None },
        )
        .unwrap();
        assert_eq!(spec.label(&[1]), 1);
        assert_eq!(spec.label(&[1, 0]), 0);
        assert_eq!(spec.label(&[1, 0, 0]), 2);
        assert_eq!(spec.label(&[0, 1, 0, 0, 0]), 2);
        assert_eq!(spec.label(&[0, 0, 0]), 0);
        assert_eq!(value(&spec, &[1]), BigInt::from(1 + 2 * 16));
        // [1,0,1] passes through the tail node [1,0] of [1], then its own m_5 = 5 + 2 = 7.
        assert_eq!(value(&spec, &[1, 0, 1]), BigInt::from(1 + 16 + 2 * 4i64.pow(2 + 7)));
    }

    #[test]
    fn irregular_and_regularized() {
        let spec = canonical_spec(&p24())
            .unwrap()
            .with_irregular_path(Word(vec![1]), TailGenerator::EveryLevel { digit: 2 })
            .unwrap();
        assert_eq!(spec.project(&Word(vec![1])), PathValue::Irregular);
        assert_eq!(spec.label(&[1, 0, 0]), 2);
        assert_eq!(value(&spec, &[1, 0, 1]), BigInt::from(1 + 2 * 4 + 16));
        let reg = regularize(&spec, &[Word(vec![1])]).unwrap();
        assert_eq!(value(&reg, &[1]), BigInt::from(1));
        assert!(reg.is_regular());
    }

    #[test]
    fn override_rules() {
        let spec = canonical_spec(&p24()).unwrap();
        assert!(spec.clone().with_override(Word(vec![0, 0]), 0).is_err());
        let s = spec.with_override(Word(vec![1, 0, 0]), 2).unwrap();
        assert_eq!(s.tail_digits(&[1]).unwrap(), vec![(2, 2)]);
        assert_eq!(value(&s, &[1]), BigInt::from(1 + 2 * 16));
    }

    #[test]
    fn generators() {
        let g = TailGenerator::parse("doubling", 2).unwrap();
        assert_eq!((g.digit_at(1), g.digit_at(3), g.digit_at(4)), (2, 0, 2));
        assert!(TailGenerator::parse("every_level:0", 2).is_err());
        assert!(TailGenerator::parse("sometimes", 2).is_err());
        assert_eq!(TailGenerator::parse(&g.to_string(), 3).unwrap(), g);
    }

    #[test]
    fn exact_log() {
        assert_eq!(log_q(8, 2), 3.0);
        assert_eq!(log_q(243, 3), 5.0);
        assert!((log_q(10, 2) - 10f64.log2()).abs() < 1e-12);
    }
}
