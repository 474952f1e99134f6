use std::collections::BTreeSet;

use serde::Serialize;

use super::{TailRule, TreeMappingSpec};
use crate::numtheory::{strip_zeros, Word};

/// Which clause of the maximal-mapping definition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Clause {
    /// `tau(0^n) = 0`.
    ZeroPath,
    /// The label at a node lies in the residue class of its last letter.
    Residue,
    /// Every node has a regular continuation.
    RegularContinuation,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub node: Word,
    pub clause: Clause,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub depth: usize,
    pub nodes_checked: u64,
    /// Whether every node up to `depth` was visited.
    pub exhaustive: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

const MAX_EXHAUSTIVE_NODES: u64 = 2_000_000;

/// Checks the maximal-mapping clauses on all nodes up to `depth` and structurally
/// on every rule, override and generator.
pub fn validate(spec: &TreeMappingSpec, depth: usize) -> ValidationReport {
    let q = spec.params().q();
    let b = spec.params().b() as i32;
    let in_class = |d: i32, letter: u32| d >= -1 && d <= b - 2 && (d - letter as i32).rem_euclid(q as i32) == 0;
    let mut found: BTreeSet<Violation> = BTreeSet::new();
    let mut report = |node: Word, clause: Clause, message: String| {
        found.insert(Violation { node, clause, message });
    };

    if spec.base_residues()[0] != 0 {
        report(Word::root(), Clause::ZeroPath, format!("base residue for letter 0 is {}, must be 0", spec.base_residues()[0]));
    }
    for (i, &d) in spec.base_residues().iter().enumerate().skip(1) {
        if !in_class(d, i as u32) {
            report(Word(vec![i as u32]), Clause::Residue, format!("base residue {d} not congruent to {i} mod {q} within [-1, {}]", b - 2));
        }
    }
    for (w, &d) in spec.overrides() {
        let last = *w.letters().last().expect("overrides are nonempty");
        if !in_class(d, last) {
            report(w.clone(), Clause::Residue, format!("override {d} not congruent to {last} mod {q} within [-1, {}]", b - 2));
        }
    }
    let first_stem = Word(vec![1]);
    match spec.tail_rule() {
        TailRule::SparsePowers { digit, .. } | TailRule::LeadingBlock { digit, .. } => {
            if !in_class(*digit, 0) {
                report(first_stem.clone(), Clause::Residue, format!("tail digit {digit} is not a multiple of {q} within [-1, {}]", b - 2));
            }
        }
        TailRule::Custom { entries } => {
            for ((stem, ell), &d) in entries {
                if !in_class(d, 0) {
                    let node = if *ell <= 64 {
                        stem.concat(&vec![0; *ell as usize])
                    } else {
                        stem.clone()
                    };
                    report(node, Clause::Residue, format!("tail digit {d} at l = {ell} is not a multiple of {q}"));
                }
            }
        }
        TailRule::AllZero => {}
    }
    for (stem, g) in spec.irregular_paths() {
        if !in_class(g.digit(), 0) {
            report(stem.clone(), Clause::Residue, format!("irregular tail digit {} is not a multiple of {q}", g.digit()));
        }
    }

    let total: u64 = (1..=depth as u32).try_fold(0u64, |acc, k| acc.checked_add((q as u64).checked_pow(k)?)).unwrap_or(u64::MAX);
    let exhaustive = total <= MAX_EXHAUSTIVE_NODES;
    let mut nodes_checked = 0;
    if exhaustive {
        let mut node: Vec<u32> = Vec::with_capacity(depth);
        for len in 1..=depth {
            node.clear();
            node.resize(len, 0);
            loop {
                nodes_checked += 1;
                let d = spec.label(&node);
                let last = node[len - 1];
                if strip_zeros(&node).is_empty() {
                    if d != 0 {
                        report(Word(node.clone()), Clause::ZeroPath, format!("label {d} on a 0^n node"));
                    }
                } else if !in_class(d, last) {
                    report(Word(node.clone()), Clause::Residue, format!("label {d} not congruent to {last} mod {q} within [-1, {}]", b - 2));
                }
                if !next_word(&mut node, q) {
                    break;
                }
            }
        }
    }

    for stem in spec.irregular_paths().keys() {
        for extra in 0..=depth.saturating_sub(stem.len()) {
            let node = stem.concat(&vec![0; extra]);
            nodes_checked += 1;
            if regular_continuation(spec, node.letters(), 6).is_none() {
                report(node, Clause::RegularContinuation, "no regular continuation found".into());
            }
        }
    }

    ValidationReport { depth, nodes_checked, exhaustive, violations: found.into_iter().collect() }
}

/// Advances to the next word of the same length in little-endian counting order.
fn next_word(w: &mut [u32], q: u32) -> bool {
    for l in w.iter_mut() {
        *l += 1;
        if *l < q {
            return true;
        }
        *l = 0;
    }
    false
}

/// A suffix `s` such that `node s 0^inf` is regular, searched breadth first.
pub(crate) fn regular_continuation(spec: &TreeMappingSpec, node: &[u32], max_len: usize) -> Option<Vec<u32>> {
    let q = spec.params().q();
    let stem = strip_zeros(node);
    if stem.is_empty() || !spec.is_irregular_stem(stem) {
        return Some(Vec::new());
    }
    for len in 1..=max_len {
        let mut suffix = vec![0u32; len];
        loop {
            if suffix[len - 1] != 0 {
                let mut w = node.to_vec();
                w.extend_from_slice(&suffix);
                if !spec.is_irregular_stem(&w) {
                    return Some(suffix);
                }
            }
            if !next_word(&mut suffix, q) {
                break;
            }
        }
    }
    None
}
