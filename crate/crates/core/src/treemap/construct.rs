use super::{BlockCount, TailRule, TreeMappingSpec};
use crate::error::{Error, Result};
use crate::fourier::MaskConstants;
use crate::growth::GrowthFn;
use crate::numtheory::{MeasureParams, Word};

/// Sparse exponents are capped here so digit positions stay well inside `u64`.
pub const MAX_SPARSE_POSITION: u64 = 1 << 40;

/// Base residues `i -> i` with all-zero tails.
pub fn canonical_spec(p: &MeasureParams) -> Result<TreeMappingSpec> {
    p.require_r()?;
    TreeMappingSpec::new(*p, (0..p.q() as i32).collect(), TailRule::AllZero)
}

/// One tail digit `q` at `l = m_n`, where `b^(m_n) >= 2 h^-1(b^(n+1))`.
///
/// Exponents are listed for `n <= window_hint` as long as they stay below
/// [`MAX_SPARSE_POSITION`]; later stems continue with `m_n = m_(n-1) + 1`.
pub fn sparse_spec(p: &MeasureParams, g: &GrowthFn, window_hint: u64) -> Result<TreeMappingSpec> {
    p.require_r()?;
    if window_hint == 0 {
        return Err(Error::InvalidParameters("window hint must be at least 1".into()));
    }
    let b = p.b();
    let lb = (b as f64).ln();
    let log_b_two = std::f64::consts::LN_2 / lb;
    let mut exponents: Vec<u64> = Vec::new();
    let mut prev = 1u64;
    for n in 1..=window_hint {
        let y = ((n + 1) as f64 * lb).exp();
        if !y.is_finite() {
            break;
        }
        let u = g.log_inverse_minorant(y, b);
        if !u.is_finite() {
            break;
        }
        let need = (log_b_two + u + 1e-9).ceil().max(0.0);
        if need >= MAX_SPARSE_POSITION as f64 {
            break;
        }
        let m = (need as u64).max(prev + 1).max(2);
        if m > MAX_SPARSE_POSITION {
            break;
        }
        exponents.push(m);
        prev = m;
    }
    if exponents.is_empty() {
        return Err(Error::InvalidParameters(format!(
            "growth function {g} admits no exponent below 2^40"
        )));
    }
    TreeMappingSpec::new(
        *p,
        (0..p.q() as i32).collect(),
        TailRule::SparsePowers { exponents, digit: p.q() as i32, growth: Some(g.to_string()) },
    )
}

/// `ceil((1+eps) log_{1/c_2}(l))` tail digits `q` after every stem of length `l + 1`.
pub fn nonspectrum_spec(p: &MeasureParams, epsilon: f64, mc: &MaskConstants) -> Result<TreeMappingSpec> {
    p.require_r()?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameters(format!("epsilon {epsilon} must be positive")));
    }
    let c2 = mc.c2();
    if !(c2 > 0.0 && c2 < 1.0) {
        return Err(Error::Precondition(format!("c_max upper end {c2} outside (0, 1)")));
    }
    TreeMappingSpec::new(
        *p,
        (0..p.q() as i32).collect(),
        TailRule::LeadingBlock {
            digit: p.q() as i32,
            count: BlockCount::LevelLog { coefficient: 1.0 + epsilon, base: 1.0 / c2 },
        },
    )
}

/// `floor(log_{c_1^-2} log_q n)` tail digits `q` right after the stem with index `n`.
pub fn slow_growth_spec(p: &MeasureParams, mc: &MaskConstants) -> Result<TreeMappingSpec> {
    p.require_r()?;
    let c1 = mc.c1();
    if !(c1 > 0.0 && c1 < 1.0) {
        return Err(Error::Precondition(format!("c_min lower end {c1} outside (0, 1)")));
    }
    TreeMappingSpec::new(
        *p,
        (0..p.q() as i32).collect(),
        TailRule::LeadingBlock { digit: p.q() as i32, count: BlockCount::IteratedLog { base: c1.powi(-2) } },
    )
}

/// Zeroes the tails `tau(s 0^k)`, `k >= 1`, on the listed stems.
pub fn regularize(spec: &TreeMappingSpec, paths: &[Word]) -> Result<TreeMappingSpec> {
    paths
        .iter()
        .try_fold(spec.clone(), |s, w| s.with_regularized_stem(w.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::compute_mask_constants;
    use crate::treemap::{enumerate, validate, TailGenerator};
    use num_bigint::BigInt;

    #[test]
    fn sparse_exponents_for_log() {
        let p = MeasureParams::new(2, 4).unwrap();
        let spec = sparse_spec(&p, &GrowthFn::Log2, 64).unwrap();
        let TailRule::SparsePowers { exponents, .. } = spec.tail_rule() else { panic!() };
        assert_eq!(exponents[0], 9);
        for (i, &m) in exponents.iter().enumerate() {
            let n = i as i32 + 1;
            let y = 4f64.powi(n + 1);
            assert!(m as f64 * 2.0 >= 1.0 + y - 1e-6, "m_{n} = {m}");
        }
        assert!(exponents.windows(2).all(|w| w[0] < w[1]));
        assert!(*exponents.last().unwrap() <= MAX_SPARSE_POSITION);
        let c = enumerate(&spec, 2).unwrap();
        let expected = BigInt::from(1) + BigInt::from(2) * num_traits::pow(BigInt::from(4), 9);
        assert_eq!(c.entries[1].lambda.to_bigint().unwrap(), expected);
        assert!(validate(&spec, 6).is_clean());
    }

    #[test]
    fn block_constructions_validate() {
        let p = MeasureParams::new(2, 4).unwrap();
        let mc = compute_mask_constants(&p, 1e-3).unwrap();
        assert!(validate(&nonspectrum_spec(&p, 1.0, &mc).unwrap(), 6).is_clean());
        assert!(validate(&slow_growth_spec(&p, &mc).unwrap(), 6).is_clean());
        assert!(nonspectrum_spec(&p, 0.0, &mc).is_err());
    }

    #[test]
    fn regularize_properties() {
        let p = MeasureParams::new(2, 4).unwrap();
        let canon = canonical_spec(&p).unwrap();
        assert_eq!(regularize(&canon, &[]).unwrap(), canon);
        let irr = canon.with_irregular_path(Word(vec![1]), TailGenerator::EveryLevel { digit: 2 }).unwrap();
        let once = regularize(&irr, &[Word(vec![1])]).unwrap();
        assert!(once.is_regular());
        assert_eq!(regularize(&once, &[Word(vec![1])]).unwrap(), once);
        assert!(validate(&once, 6).is_clean());
        assert!(matches!(regularize(&irr, &[Word(vec![1, 0])]), Err(Error::NonCanonical(_))));
    }
}
