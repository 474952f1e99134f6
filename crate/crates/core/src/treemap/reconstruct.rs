use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use super::TreeMappingSpec;
use crate::error::{Error, Result};
use crate::numtheory::{b_adic_expand, in_zero_set, MeasureParams, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "state", content = "digit")]
pub enum NodeAssignment {
    Determined(i32),
    /// The sample has no element through this node.
    Undetermined,
    /// Several digits of the matching residue class occur.
    Conflicted,
}

/// A labeling recovered from a finite sample, node by node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialMapping {
    pub params: MeasureParams,
    pub depth: usize,
    pub nodes: BTreeMap<Word, NodeAssignment>,
}

impl PartialMapping {
    /// Determined nodes whose digit differs from the spec's label.
    pub fn mismatches(&self, spec: &TreeMappingSpec) -> Vec<Word> {
        self.nodes
            .iter()
            .filter_map(|(w, a)| match a {
                NodeAssignment::Determined(d) if *d != spec.label(w.letters()) => Some(w.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn determined_count(&self) -> usize {
        self.nodes.values().filter(|a| matches!(a, NodeAssignment::Determined(_))).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConflictKind {
    SameResidue,
    TooMany,
}

/// A digit set `D(c_1, ..., c_n)` that cannot come from a maximal mapping.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DigitSetConflict {
    pub prefix: Vec<i32>,
    pub digits: Vec<i32>,
    pub kind: ConflictKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionReport {
    /// First pair (in input order) whose difference is not a zero of the transform.
    #[serde(serialize_with = "ser_pair")]
    pub violation: Option<(BigInt, BigInt)>,
    pub conflicts: Vec<DigitSetConflict>,
}

fn ser_pair<S: serde::Serializer>(p: &Option<(BigInt, BigInt)>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match p {
        Some((a, b)) => s.collect_seq([a.to_string(), b.to_string()]),
        None => s.serialize_none(),
    }
}

const MAX_NODES: u64 = 2_000_000;

/// Rebuilds the labels of a maximal mapping from a finite orthogonal set `r * Lambda`.
pub fn mapping_from_set(lams: &[BigInt], p: &MeasureParams, depth: usize) -> Result<(PartialMapping, ReconstructionReport)> {
    let r = BigInt::from(p.require_r()?);
    let q = p.q();
    if !lams.iter().any(|x| x.is_zero()) {
        return Err(Error::Normalization("the set must contain 0".into()));
    }
    if let Some(x) = lams.iter().find(|x| !x.is_multiple_of(&r)) {
        return Err(Error::NotRepresentable(format!("{x} is not a multiple of r = {r}")));
    }
    let total: u64 = (1..=depth as u32)
        .try_fold(0u64, |acc, k| acc.checked_add((q as u64).checked_pow(k)?))
        .unwrap_or(u64::MAX);
    if total > MAX_NODES {
        return Err(Error::Resource(format!("{total} nodes to depth {depth}")));
    }

    let mut violation = None;
    'outer: for (i, a) in lams.iter().enumerate() {
        for bb in &lams[..i] {
            if a != bb && !in_zero_set(&(a - bb), p)? {
                violation = Some((a.clone(), bb.clone()));
                break 'outer;
            }
        }
    }

    let distinct: BTreeSet<&BigInt> = lams.iter().collect();
    let expansions: Vec<Vec<i32>> = distinct
        .iter()
        .map(|x| {
            let mut d = b_adic_expand(&(*x / &r), p.b())?.digits().to_vec();
            d.resize(d.len().max(depth), 0);
            Ok(d)
        })
        .collect::<Result<_>>()?;

    let mut dsets: BTreeMap<Vec<i32>, BTreeSet<i32>> = BTreeMap::new();
    for e in &expansions {
        for n in 0..depth {
            dsets.entry(e[..n].to_vec()).or_default().insert(e[n]);
        }
    }
    let mut conflicts = Vec::new();
    for (prefix, digits) in &dsets {
        let residues: BTreeSet<i32> = digits.iter().map(|d| d.rem_euclid(q as i32)).collect();
        if residues.len() < digits.len() {
            conflicts.push(DigitSetConflict { prefix: prefix.clone(), digits: digits.iter().copied().collect(), kind: ConflictKind::SameResidue });
        }
        if digits.len() > q as usize {
            conflicts.push(DigitSetConflict { prefix: prefix.clone(), digits: digits.iter().copied().collect(), kind: ConflictKind::TooMany });
        }
    }

    let mut nodes = BTreeMap::new();
    nodes.insert(Word::root(), NodeAssignment::Determined(0));
    let mut frontier: Vec<(Vec<u32>, Option<Vec<i32>>)> = vec![(Vec::new(), Some(Vec::new()))];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(frontier.len() * q as usize);
        for (node, prefix) in &frontier {
            for letter in 0..q {
                let mut child = node.clone();
                child.push(letter);
                let (assignment, child_prefix) = match prefix.as_ref().and_then(|c| dsets.get(c).map(|d| (c, d))) {
                    None => (NodeAssignment::Undetermined, None),
                    Some((c, digits)) => {
                        let matching: Vec<i32> = digits.iter().copied().filter(|d| (d - letter as i32).rem_euclid(q as i32) == 0).collect();
                        match matching.as_slice() {
                            [] => (NodeAssignment::Undetermined, None),
                            [d] => {
                                let mut cp = c.clone();
                                cp.push(*d);
                                (NodeAssignment::Determined(*d), Some(cp))
                            }
                            _ => (NodeAssignment::Conflicted, None),
                        }
                    }
                };
                nodes.insert(Word(child.clone()), assignment);
                next.push((child, child_prefix));
            }
        }
        frontier = next;
    }
    Ok((PartialMapping { params: *p, depth, nodes }, ReconstructionReport { violation, conflicts }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treemap::canonical_spec;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn recovers_canonical() {
        let p = MeasureParams::new(2, 4).unwrap();
        let (m, rep) = mapping_from_set(&ints(&[0, 2, 8, 10]), &p, 2).unwrap();
        assert!(rep.violation.is_none() && rep.conflicts.is_empty());
        assert!(m.mismatches(&canonical_spec(&p).unwrap()).is_empty());
        assert_eq!(m.nodes[&Word(vec![1, 1])], NodeAssignment::Determined(1));
        assert_eq!(m.determined_count(), 7);
    }

    #[test]
    fn reports_violation() {
        let p = MeasureParams::new(2, 4).unwrap();
        let (_, rep) = mapping_from_set(&ints(&[0, 2, 6]), &p, 2).unwrap();
        assert_eq!(rep.violation, Some((BigInt::from(6), BigInt::from(2))));
    }

    #[test]
    fn singleton_is_mostly_undetermined() {
        let p = MeasureParams::new(2, 4).unwrap();
        let (m, _) = mapping_from_set(&ints(&[0]), &p, 3).unwrap();
        for (w, a) in &m.nodes {
            if w.letters().iter().all(|&l| l == 0) {
                assert_eq!(*a, NodeAssignment::Determined(0));
            } else {
                assert_eq!(*a, NodeAssignment::Undetermined);
            }
        }
    }

    #[test]
    fn input_errors() {
        let p = MeasureParams::new(2, 4).unwrap();
        assert!(matches!(mapping_from_set(&ints(&[2, 8]), &p, 2), Err(Error::Normalization(_))));
        assert!(matches!(mapping_from_set(&ints(&[0, 3]), &p, 2), Err(Error::NotRepresentable(_))));
    }
}
