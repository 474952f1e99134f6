use serde::Serialize;

use super::{iterated_log_count, BlockCount, SpectrumCandidate, TailRule, TreeMappingSpec};
use crate::error::{Error, Result};
use crate::numtheory::q_adic_letters;

/// Extremes of `N*` and `N` over the stems of one level (`q^l <= k < q^(l+1)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LevelStats {
    /// `u64::MAX` when the level has no regular stem.
    pub min_nstar: u64,
    pub max_nstar: u64,
    /// Saturates at `u64::MAX`.
    pub max_n: u64,
    /// Computed stem by stem rather than from the rule's closed form.
    pub exact: bool,
}

impl LevelStats {
    fn empty(exact: bool) -> Self {
        LevelStats { min_nstar: u64::MAX, max_nstar: 0, max_n: 0, exact }
    }

    fn absorb(&mut self, n_last: u64, n_star: u64) {
        self.min_nstar = self.min_nstar.min(n_star);
        self.max_nstar = self.max_nstar.max(n_star);
        self.max_n = self.max_n.max(n_last);
    }
}

/// Window statistics of a candidate, level by level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DigitStats {
    pub q: u32,
    pub levels: Vec<LevelStats>,
    /// A bound on `N*` over all stems when the rule provides one.
    pub nstar_sup: Option<u64>,
}

impl DigitStats {
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.levels.len() {
            return Err(Error::Range(format!("level {n} beyond the {} available", self.levels.len())));
        }
        Ok(())
    }

    /// `max { N*_k : q^m <= k < q^n }`.
    pub fn nstar_window(&self, m: usize, n: usize) -> Result<u64> {
        if m >= n {
            return Err(Error::Range(format!("empty window [{m}, {n})")));
        }
        self.check(n)?;
        Ok(self.levels[m..n].iter().map(|l| l.max_nstar).max().unwrap_or(0))
    }

    /// `min { N*_k : q^n <= k < q^(n+1) }`.
    pub fn lstar(&self, n: usize) -> Result<u64> {
        self.check(n + 1)?;
        Ok(self.levels[n].min_nstar)
    }

    /// `max { N_k : 1 <= k < q^n }`.
    pub fn m_max(&self, n: usize) -> Result<u64> {
        self.check(n)?;
        Ok(self.levels[..n].iter().map(|l| l.max_n).max().unwrap_or(0))
    }
}

/// Exact statistics from an enumerated candidate covering all stems below `q^up_to_level`.
pub fn stats(c: &SpectrumCandidate, up_to_level: usize) -> Result<DigitStats> {
    let q = c.params.q();
    let needed = (q as u64)
        .checked_pow(up_to_level as u32)
        .ok_or_else(|| Error::Range(format!("q^{up_to_level} overflows")))?;
    let covered = c.entries.last().map_or(0, |e| e.index + 1);
    if covered < needed {
        return Err(Error::Range(format!(
            "candidate covers indices below {covered}, statistics to level {up_to_level} need {needed}"
        )));
    }
    let mut levels = vec![LevelStats::empty(true); up_to_level];
    for e in &c.entries {
        if e.index == 0 || e.index >= needed {
            continue;
        }
        let level = e.level().ok_or_else(|| Error::Precondition("stats need entries with words".into()))?;
        let n_star = e.n_star.ok_or_else(|| Error::Precondition("stats need tail counts".into()))?;
        levels[level].absorb(e.n_last, n_star);
    }
    Ok(DigitStats { q, levels, nstar_sup: None })
}

const EXACT_LEVEL_STEMS: u64 = 1 << 16;

/// Level statistics straight from the spec: stem by stem on small levels, from the
/// tail rule's closed form (merged with the exceptional stems) on large ones.
pub fn profile_stats(spec: &TreeMappingSpec, levels: usize) -> DigitStats {
    let q = spec.params().q();
    let exceptional = spec.exceptional_stems();
    let mut out = Vec::with_capacity(levels);
    for level in 0..levels {
        let size = (q as u64).checked_pow(level as u32).and_then(|s| s.checked_mul(q as u64 - 1));
        match size {
            Some(s) if s <= EXACT_LEVEL_STEMS => {
                let start = (q as u64).pow(level as u32);
                let mut st = LevelStats::empty(true);
                for n in start..start + s {
                    let w = q_adic_letters(n, q);
                    if let Some((n_last, n_star)) = stem_stats(spec, &w) {
                        st.absorb(n_last, n_star);
                    }
                }
                out.push(st);
            }
            _ => {
                let mut st = rule_profile(spec, level as u64);
                for stem in exceptional.iter().filter(|w| w.len() == level + 1) {
                    if let Some((n_last, n_star)) = stem_stats(spec, stem.letters()) {
                        st.absorb(n_last, n_star);
                    }
                }
                out.push(st);
            }
        }
    }
    let nstar_sup = rule_sup(spec).map(|s| {
        exceptional
            .iter()
            .filter_map(|w| stem_stats(spec, w.letters()))
            .map(|t| t.1)
            .fold(s, u64::max)
    });
    DigitStats { q, levels: out, nstar_sup }
}

/// `(N, N*)` of a regular stem.
fn stem_stats(spec: &TreeMappingSpec, stem: &[u32]) -> Option<(u64, u64)> {
    let tails = spec.tail_digits(stem)?;
    let k = stem.len() as u64;
    let n_last = tails.last().map_or(k, |&(l, _)| k.saturating_add(l));
    Some((n_last, tails.len() as u64))
}

fn rule_profile(spec: &TreeMappingSpec, level: u64) -> LevelStats {
    let q = spec.params().q();
    let k = level + 1;
    let n_lo = (q as u64).checked_pow(level as u32);
    let n_hi = (q as u64).checked_pow(level as u32 + 1).map(|x| x - 1);
    let flat = |n_star: u64, extra: u64| LevelStats {
        min_nstar: n_star,
        max_nstar: n_star,
        max_n: k.saturating_add(extra),
        exact: false,
    };
    match spec.tail_rule() {
        TailRule::AllZero => flat(0, 0),
        TailRule::SparsePowers { exponents, digit, .. } => {
            if *digit == 0 {
                return flat(0, 0);
            }
            let m = TailRule::sparse_exponent(exponents, n_hi.unwrap_or(u64::MAX));
            flat(1, m)
        }
        TailRule::LeadingBlock { digit, count } => {
            if *digit == 0 {
                return flat(0, 0);
            }
            let (lo, hi) = match count {
                BlockCount::IteratedLog { base } => {
                    let lo = iterated_log_count(level as f64, *base);
                    let hi = match n_hi {
                        Some(n) => count.count(n, level, q),
                        None => iterated_log_count(level as f64 + 1.0, *base),
                    };
                    (lo, hi)
                }
                _ => {
                    let c = count.count(n_lo.unwrap_or(u64::MAX), level, q);
                    (c, c)
                }
            };
            LevelStats { min_nstar: lo, max_nstar: hi, max_n: k.saturating_add(hi), exact: false }
        }
        TailRule::Custom { entries } => {
            let mut st = flat(0, 0);
            for ((stem, _), _) in entries.iter().filter(|((w, _), _)| w.len() as u64 == k) {
                if let Some(tails) = spec.tail_digits(stem.letters()) {
                    st.max_nstar = st.max_nstar.max(tails.len() as u64);
                    if let Some(&(l, _)) = tails.last() {
                        st.max_n = st.max_n.max(k + l);
                    }
                }
            }
            st
        }
    }
}

fn rule_sup(spec: &TreeMappingSpec) -> Option<u64> {
    match spec.tail_rule() {
        TailRule::AllZero => Some(0),
        TailRule::SparsePowers { digit, .. } => Some(u64::from(*digit != 0)),
        TailRule::LeadingBlock { digit: 0, .. } => Some(0),
        TailRule::LeadingBlock { count: BlockCount::Constant(c), .. } => Some(*c),
        TailRule::LeadingBlock { .. } => None,
        TailRule::Custom { entries } => {
            let mut best = 0u64;
            let mut prev: Option<&[u32]> = None;
            let mut run = 0u64;
            for ((w, _), &d) in entries {
                if prev != Some(w.letters()) {
                    run = 0;
                    prev = Some(w.letters());
                }
                if d != 0 {
                    run += 1;
                }
                best = best.max(run);
            }
            Some(best)
        }
    }
}
