use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numtheory::SparseDigits;
use crate::treemap::SpectrumCandidate;

/// A pair `(lambda_i, lambda_j)`, `i > j`, whose scaled difference misses the zero set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BizeroWitness {
    pub i: usize,
    pub j: usize,
    pub lambda_i: Option<String>,
    pub lambda_j: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BizeroReport {
    pub holds: bool,
    pub elements: usize,
    pub witness: Option<BizeroWitness>,
}

/// Whether `r (lambda_i - lambda_j)` lies in the zero set.
///
/// The lowest differing digits `x, y` give the difference as `b^p (x - y + b k)`,
/// so membership is `q` not dividing `x - y`.
pub(crate) fn orthogonal(a: &SparseDigits, b: &SparseDigits, q: u32) -> bool {
    match a.lowest_difference(b) {
        None => false,
        Some((_, x, y)) => (x - y).rem_euclid(q as i32) != 0,
    }
}

/// Exhaustive pairwise check, scanning `i = 1, 2, ...` and `j < i`.
pub fn check_bizero(c: &SpectrumCandidate) -> Result<BizeroReport> {
    c.params.require_r()?;
    let q = c.params.q();
    let lams: Vec<&SparseDigits> = c.lambdas().collect();
    let bad = (1..lams.len())
        .into_par_iter()
        .find_map_first(|i| (0..i).find(|&j| !orthogonal(lams[i], lams[j], q)).map(|j| (i, j)));
    Ok(BizeroReport {
        holds: bad.is_none(),
        elements: lams.len(),
        witness: bad.map(|(i, j)| BizeroWitness {
            i,
            j,
            lambda_i: lams[i].to_decimal_string(),
            lambda_j: lams[j].to_decimal_string(),
        }),
    })
}

/// Frequencies `theta = r m`, `|m| <= window`, orthogonal to the first `prefix`
/// elements but not among them.
pub fn check_maximality_window(c: &SpectrumCandidate, window: u64, prefix: usize) -> Result<Vec<BigInt>> {
    let r = c.params.require_r()?;
    if prefix > c.len() {
        return Err(Error::Range(format!("prefix {prefix} exceeds the {} available elements", c.len())));
    }
    if window > i64::MAX as u64 / (2 * r as u64) {
        return Err(Error::Range(format!("window {window} too large")));
    }
    let q = c.params.q();
    let b = c.params.b();
    let lams: Vec<&SparseDigits> = c.lambdas().take(prefix).collect();
    let w = window as i64;
    let survivors: Vec<BigInt> = (-w..=w)
        .into_par_iter()
        .filter_map(|m| {
            let theta = SparseDigits::from_bigint(&BigInt::from(m), b);
            if lams.iter().any(|l| **l == theta) {
                return None;
            }
            let ok = theta.is_zero() || orthogonal(&theta, &SparseDigits::zero(b), q);
            if ok && lams.iter().all(|l| l.is_zero() || orthogonal(&theta, l, q)) {
                Some(BigInt::from(m) * r)
            } else {
                None
            }
        })
        .collect();
    Ok(survivors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::{in_zero_set, MeasureParams};
    use crate::treemap::{canonical_spec, enumerate};

    fn p24() -> MeasureParams {
        MeasureParams::new(2, 4).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn bizero_examples() {
        let c = enumerate(&canonical_spec(&p24()).unwrap(), 64).unwrap();
        assert!(check_bizero(&c).unwrap().holds);
        let bad = SpectrumCandidate::from_integers(p24(), &ints(&[0, 1, 2])).unwrap();
        let rep = check_bizero(&bad).unwrap();
        let w = rep.witness.unwrap();
        assert_eq!((w.i, w.j), (2, 0));
        assert_eq!(w.lambda_i.as_deref(), Some("2"));
        let single = SpectrumCandidate::from_integers(p24(), &ints(&[0])).unwrap();
        assert!(check_bizero(&single).unwrap().holds);
    }

    #[test]
    fn digit_test_matches_zero_set() {
        let p = MeasureParams::new(3, 6).unwrap();
        for x in -300i64..300 {
            for y in [-7i64, 0, 5, 36] {
                let a = SparseDigits::from_bigint(&BigInt::from(x), 6);
                let b = SparseDigits::from_bigint(&BigInt::from(y), 6);
                let want = in_zero_set(&BigInt::from(2 * (x - y)), &p).unwrap();
                assert_eq!(orthogonal(&a, &b, 3), want, "x={x} y={y}");
            }
        }
    }

    #[test]
    fn maximality_examples() {
        let c = enumerate(&canonical_spec(&p24()).unwrap(), 64).unwrap();
        assert!(check_maximality_window(&c, 200, 64).unwrap().is_empty());
        let holed = c.without(1);
        assert_eq!(check_maximality_window(&holed, 200, 63).unwrap(), vec![BigInt::from(2)]);
        let zero = c.prefix(1);
        let got = check_maximality_window(&zero, 10, 1).unwrap();
        let want: Vec<BigInt> = (-10i64..=10)
            .filter(|&m| in_zero_set(&BigInt::from(2 * m), &p24()).unwrap())
            .map(|m| BigInt::from(2 * m))
            .collect();
        assert_eq!(got, want);
    }
}
