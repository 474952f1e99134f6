use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{Interval, MaskConstants};
use crate::treemap::DigitStats;

/// The sequence `alpha_n` tested in the divergence criterion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AlphaSequence {
    /// `alpha_1 = 1`, `alpha_{n+1} = n + M_{alpha_n}` (at least `alpha_n + 1`).
    #[default]
    MaxNRecursion,
    /// `alpha_n = n^2`.
    Squares,
    /// Explicit strictly increasing values `alpha_1, alpha_2, ...`.
    Explicit(Vec<u64>),
}

impl AlphaSequence {
    fn terms(&self, stats: &DigitStats, max_terms: usize) -> Result<Vec<u64>> {
        let levels = stats.level_count() as u64;
        let mut out = Vec::new();
        match self {
            AlphaSequence::MaxNRecursion => {
                let mut a = 1u64;
                out.push(a);
                for n in 1..max_terms as u64 {
                    if a > levels {
                        break;
                    }
                    a = n.saturating_add(stats.m_max(a as usize)?).max(a + 1);
                    out.push(a);
                }
            }
            AlphaSequence::Squares => {
                for n in 1..=max_terms as u64 {
                    out.push(n * n);
                }
            }
            AlphaSequence::Explicit(v) => {
                if v.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidParameters("alpha must be strictly increasing".into()));
                }
                out.extend(v.iter().take(max_terms).copied());
            }
        }
        Ok(out)
    }
}

/// Thresholds for the finite-horizon judgments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionConfig {
    /// `alpha_{n+1} - M_{alpha_n}` must stay at or above this.
    pub gap_threshold: i64,
    /// Consecutive terms the gap must stay above the threshold at the end of the horizon.
    pub gap_sustain: usize,
    /// Partial sum of `c_1^{N*}` taken as divergence evidence.
    pub sum_threshold: f64,
    /// Alternative divergence evidence: `(n+1) t_n` bounded below on the tail half.
    pub harmonic_threshold: f64,
    /// Decay exponent of `c_2^{L*_n}` required for convergence.
    pub exponent_threshold: f64,
    /// Fewer usable terms than this gives an inconclusive report.
    pub min_terms: usize,
}

impl Default for CriterionConfig {
    fn default() -> Self {
        CriterionConfig {
            gap_threshold: 10,
            gap_sustain: 3,
            sum_threshold: 20.0,
            harmonic_threshold: 0.5,
            exponent_threshold: 1.1,
            min_terms: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conclusion {
    SatisfiesI,
    SatisfiesII,
    Neither,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub c1_interval: Interval,
    pub c2_interval: Interval,
    pub alpha_seq: Vec<u64>,
    /// `alpha_{n+1} - M_{alpha_n}`.
    pub gaps: Vec<i64>,
    /// Partial sums of `c_1^{N*_{alpha_n, alpha_{n+1}}}`.
    pub partial_sums_i: Vec<f64>,
    /// Partial sums of `c_2^{L*_n}` for `n = 1, 2, ...`.
    pub partial_sums_ii: Vec<f64>,
    /// The `alpha` test was settled by a finite bound on `N*` and the exact gap `n`.
    pub structural_i: bool,
    pub holds_i: bool,
    /// Smallest `ln(1/t_n)/ln n` over the tail half of the horizon.
    pub decay_exponent: Option<f64>,
    /// Bound on `sum_{n >= horizon} c_2^{L*_n}` assuming the fitted decay persists.
    pub tail_bound_ii: Option<f64>,
    pub holds_ii: bool,
    pub conclusion: Conclusion,
}

/// Largest horizon `H` with `alpha_{H+1}` within the available levels.
pub fn fitting_horizon(stats: &DigitStats, alpha: &AlphaSequence, max_terms: usize) -> Result<usize> {
    let levels = stats.level_count() as u64;
    let a = alpha.terms(stats, max_terms + 1)?;
    Ok(a.iter().skip(1).take_while(|&&x| x <= levels).count())
}

/// Terms `c_2^{L*_n}`, `n = 1 .. levels-1`; empty levels contribute nothing.
pub(crate) fn lstar_terms(stats: &DigitStats, c2: f64) -> Result<Vec<f64>> {
    (1..stats.level_count())
        .map(|n| {
            let l = stats.lstar(n)?;
            Ok(if l == u64::MAX { 0.0 } else { c2.powf(l as f64) })
        })
        .collect()
}

/// Fitted `p` with `t_n <= n^-p` on the tail half, and the matching bound on the remainder.
pub(crate) fn decay_fit(terms: &[f64]) -> (Option<f64>, Option<f64>) {
    let h = terms.len();
    if h < 4 {
        return (None, None);
    }
    let p = (h / 2..h)
        .map(|i| {
            let n = (i + 1) as f64;
            if terms[i] <= 0.0 {
                f64::INFINITY
            } else {
                -terms[i].ln() / n.ln()
            }
        })
        .fold(f64::INFINITY, f64::min);
    if p > 1.0 {
        let tail = if p.is_infinite() { 0.0 } else { (h as f64).powf(1.0 - p) / (p - 1.0) };
        (Some(p), Some(tail))
    } else {
        (Some(p), None)
    }
}

fn running(terms: &[f64]) -> Vec<f64> {
    terms
        .iter()
        .scan(0.0, |s, t| {
            *s += t;
            Some(*s)
        })
        .collect()
}

/// Evaluates both growth criteria over `horizon` terms of `alpha`.
pub fn criterion_report(
    stats: &DigitStats,
    mc: &MaskConstants,
    alpha: &AlphaSequence,
    horizon: usize,
    cfg: &CriterionConfig,
) -> Result<CriterionReport> {
    let (c1, c2) = (mc.c1(), mc.c2());

    let ii_terms = lstar_terms(stats, c2)?;
    let partial_sums_ii = running(&ii_terms);
    let (decay_exponent, tail_bound_ii) = decay_fit(&ii_terms);
    let holds_ii = ii_terms.len() >= cfg.min_terms && decay_exponent.is_some_and(|p| p > cfg.exponent_threshold);

    let structural_i = matches!(alpha, AlphaSequence::MaxNRecursion) && stats.nstar_sup.is_some();
    let available = fitting_horizon(stats, alpha, horizon)?;
    if available < horizon && !structural_i {
        return Err(Error::Range(format!(
            "alpha horizon {horizon} needs more than the {} available levels (fits {available})",
            stats.level_count()
        )));
    }
    let h = available.min(horizon);
    let alpha_seq = alpha.terms(stats, h + 1)?;
    let mut gaps = Vec::with_capacity(h);
    let mut i_terms = Vec::with_capacity(h);
    for n in 0..h {
        let (a, next) = (alpha_seq[n], alpha_seq[n + 1]);
        gaps.push(next as i64 - stats.m_max(a as usize)? as i64);
        i_terms.push(c1.powf(stats.nstar_window(a as usize, next as usize)? as f64));
    }
    let partial_sums_i = running(&i_terms);

    let holds_i = if structural_i {
        true
    } else if h < cfg.min_terms {
        false
    } else {
        let sustained = gaps.iter().rev().take_while(|&&g| g >= cfg.gap_threshold).count() >= cfg.gap_sustain;
        let big_sum = partial_sums_i.last().is_some_and(|&s| s >= cfg.sum_threshold);
        let harmonic = (h / 2..h)
            .map(|n| (n + 2) as f64 * i_terms[n])
            .fold(f64::INFINITY, f64::min)
            >= cfg.harmonic_threshold;
        sustained && (big_sum || harmonic)
    };

    let conclusion = if holds_i {
        Conclusion::SatisfiesI
    } else if holds_ii {
        Conclusion::SatisfiesII
    } else if h < cfg.min_terms && ii_terms.len() < cfg.min_terms {
        Conclusion::Inconclusive
    } else {
        Conclusion::Neither
    };
    Ok(CriterionReport {
        c1_interval: mc.c_min,
        c2_interval: mc.c_max,
        alpha_seq,
        gaps,
        partial_sums_i,
        partial_sums_ii,
        structural_i,
        holds_i,
        decay_exponent,
        tail_bound_ii,
        holds_ii,
        conclusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::compute_mask_constants;
    use crate::numtheory::MeasureParams;
    use crate::treemap::{canonical_spec, nonspectrum_spec, profile_stats, slow_growth_spec};

    fn setup() -> (MeasureParams, MaskConstants) {
        let p = MeasureParams::new(2, 4).unwrap();
        let mc = compute_mask_constants(&p, 1e-4).unwrap();
        (p, mc)
    }

    #[test]
    fn canonical_recursion() {
        let (p, mc) = setup();
        let st = profile_stats(&canonical_spec(&p).unwrap(), 40);
        let rep = criterion_report(&st, &mc, &AlphaSequence::MaxNRecursion, 6, &CriterionConfig::default()).unwrap();
        assert_eq!(rep.alpha_seq, vec![1, 2, 4, 7, 11, 16, 22]);
        assert_eq!(rep.gaps, vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(rep.conclusion, Conclusion::SatisfiesI);
        assert!(!rep.holds_ii);
    }

    #[test]
    fn slow_growth_squares() {
        let (p, mc) = setup();
        let spec = slow_growth_spec(&p, &mc).unwrap();
        let st = profile_stats(&spec, 26 * 26);
        let rep = criterion_report(&st, &mc, &AlphaSequence::Squares, 25, &CriterionConfig::default()).unwrap();
        assert!(!rep.structural_i);
        assert_eq!(rep.conclusion, Conclusion::SatisfiesI, "{rep:?}");
    }

    #[test]
    fn nonspectrum_converges() {
        let (p, mc) = setup();
        let spec = nonspectrum_spec(&p, 1.0, &mc).unwrap();
        let st = profile_stats(&spec, 64);
        let rep = criterion_report(&st, &mc, &AlphaSequence::Squares, 7, &CriterionConfig::default()).unwrap();
        assert!(rep.holds_ii);
        assert!(rep.decay_exponent.unwrap() >= 1.9);
        assert!(!rep.holds_i);
        assert_eq!(rep.conclusion, Conclusion::SatisfiesII);
    }

    #[test]
    fn horizon_beyond_stats() {
        let (p, mc) = setup();
        let st = profile_stats(&slow_growth_spec(&p, &mc).unwrap(), 20);
        assert!(criterion_report(&st, &mc, &AlphaSequence::Squares, 10, &CriterionConfig::default()).is_err());
    }
}
