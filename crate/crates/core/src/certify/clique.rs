use serde::Serialize;

use crate::error::{Error, Result};
use crate::numtheory::{scaled_zero_member, MeasureParams};

/// Largest window accepted by [`max_orthogonal_search`].
pub const MAX_CLIQUE_WINDOW: u64 = 2000;

const NODE_BUDGET: u64 = 200_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliqueResult {
    pub window: u64,
    /// Size of the largest orthogonal set found, including `0`.
    pub size: usize,
    /// The frequencies are `(b/q) x` for these integers `x`.
    pub witness: Vec<i64>,
    pub nodes: u64,
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }
    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
    fn first(&self) -> Option<usize> {
        self.0.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
    }
    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn and_not_assign(&mut self, other: &Bits) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a &= !b);
    }
}

struct Search {
    adj: Vec<Bits>,
    best: Vec<usize>,
    current: Vec<usize>,
    nodes: u64,
}

impl Search {
    /// Greedy colouring in index order; returns vertices with nondecreasing colour bounds.
    fn colour(&self, p: &Bits) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut uncoloured = p.clone();
        let mut k = 0;
        while !uncoloured.is_empty() {
            k += 1;
            let mut avail = uncoloured.clone();
            while let Some(v) = avail.first() {
                avail.clear(v);
                avail.and_not_assign(&self.adj[v]);
                uncoloured.clear(v);
                out.push((v, k));
            }
        }
        out
    }

    fn expand(&mut self, mut p: Bits) -> Result<()> {
        self.nodes += 1;
        if self.nodes > NODE_BUDGET {
            return Err(Error::Resource(format!("clique search exceeded {NODE_BUDGET} nodes")));
        }
        for (v, k) in self.colour(&p).into_iter().rev() {
            if self.current.len() + k <= self.best.len() {
                return Ok(());
            }
            self.current.push(v);
            let next = p.and(&self.adj[v]);
            if next.is_empty() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next)?;
            }
            self.current.pop();
            p.clear(v);
        }
        Ok(())
    }
}

/// Exact maximum of `#Lambda` over orthogonal sets `Lambda = (b/q) X` with
/// `0 in X` and `X` inside `[-window, window]`.
///
/// Vertices are the nonzero `x` with `(b/q) x` a zero of the transform; edges join
/// `x, y` whose difference is again such a zero. Works for any `gcd(q, b)`.
pub fn max_orthogonal_search(p: &MeasureParams, window: u64) -> Result<CliqueResult> {
    if window > MAX_CLIQUE_WINDOW {
        return Err(Error::Resource(format!("window {window} exceeds {MAX_CLIQUE_WINDOW}")));
    }
    let (q, b) = (p.q(), p.b());
    let w = window as i64;
    let mut verts: Vec<i64> = (-w..=w).filter(|&x| scaled_zero_member(x, q, b)).collect();
    let n = verts.len();
    let degree = |x: i64, vs: &[i64]| vs.iter().filter(|&&y| y != x && scaled_zero_member(x - y, q, b)).count();
    let degs: Vec<usize> = verts.iter().map(|&x| degree(x, &verts)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(degs[i]), verts[i]));
    verts = order.iter().map(|&i| verts[i]).collect();
    let mut adj = vec![Bits::empty(n); n];
    for i in 0..n {
        for j in i + 1..n {
            if scaled_zero_member(verts[i] - verts[j], q, b) {
                adj[i].set(j);
                adj[j].set(i);
            }
        }
    }
    let mut all = Bits::empty(n);
    (0..n).for_each(|i| all.set(i));
    let mut s = Search { adj, best: Vec::new(), current: Vec::new(), nodes: 0 };
    if n > 0 {
        s.expand(all)?;
    }
    let mut witness: Vec<i64> = std::iter::once(0).chain(s.best.iter().map(|&i| verts[i])).collect();
    witness.sort_unstable();
    Ok(CliqueResult { window, size: witness.len(), witness, nodes: s.nodes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn search(q: u32, b: u32, w: u64) -> CliqueResult {
        max_orthogonal_search(&MeasureParams::new(q, b).unwrap(), w).unwrap()
    }

    fn brute(q: u32, b: u32, w: i64) -> usize {
        let v: Vec<i64> = (-w..=w).filter(|&x| scaled_zero_member(x, q, b)).collect();
        let mut best = 1;
        let n = v.len();
        for mask in 1u32..(1 << n) {
            let s: Vec<i64> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| v[i]).collect();
            let ok = s.iter().enumerate().all(|(i, &x)| s[..i].iter().all(|&y| scaled_zero_member(x - y, q, b)));
            if ok {
                best = best.max(s.len() + 1);
            }
        }
        best
    }

    #[test]
    fn matches_brute_force() {
        for (q, b, w) in [(2, 4, 7), (2, 3, 8), (3, 6, 6), (4, 6, 8), (3, 5, 8)] {
            assert_eq!(search(q, b, w as u64).size, brute(q, b, w), "q={q} b={b}");
        }
    }

    #[test]
    fn examples() {
        let r = search(3, 5, 500);
        assert!(r.size <= 3);
        let x = &r.witness;
        assert!(x.iter().enumerate().all(|(i, &a)| x[..i].iter().all(|&c| scaled_zero_member(a - c, 3, 5))));
        assert!(search(2, 4, 100).size >= 8);
        assert!(search(2, 3, 500).size <= 3);
        assert!(max_orthogonal_search(&MeasureParams::new(2, 3).unwrap(), 5000).unwrap_err().is_resource());
    }
}
