use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{mu_hat_at, mu_n_abs_sq_at, Frequency, TruncationPolicy};
use crate::treemap::SpectrumCandidate;

const LEAF: usize = 64;

/// Sum over a fixed binary reduction tree; the result does not depend on the thread count.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    let (a, b) = if xs.len() > 1 << 14 {
        rayon::join(|| pairwise_sum(&xs[..mid]), || pairwise_sum(&xs[mid..]))
    } else {
        (pairwise_sum(&xs[..mid]), pairwise_sum(&xs[mid..]))
    };
    a + b
}

/// `max |sum_{k < q^n} |mu_n_hat(xi + r lambda_k)|^2 - 1|` over `xis`.
pub fn qn_identity_check(c: &SpectrumCandidate, n: u32, xis: &[f64]) -> Result<f64> {
    let p = c.params;
    let r = p.require_r()? as i64;
    let need = (p.q() as u64)
        .checked_pow(n)
        .filter(|&k| k <= c.len() as u64)
        .ok_or_else(|| Error::Range(format!("level {n} needs q^{n} elements, have {}", c.len())))?;
    let lams: Vec<_> = c.lambdas().take(need as usize).collect();
    let worst = xis
        .par_iter()
        .map(|&xi| {
            let terms: Vec<f64> = lams.iter().map(|l| mu_n_abs_sq_at(&Frequency::shifted(xi, l, r), n, &p)).collect();
            (pairwise_sum(&terms) - 1.0).abs()
        })
        .reduce(|| 0.0, f64::max);
    Ok(worst)
}

/// A partial sum of `Q(xi)` with the accumulated truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QValue {
    pub xi: f64,
    pub q: f64,
    pub error_budget: f64,
    pub terms: usize,
}

/// Per-term `(|mu_hat(xi + r lambda_k)|^2, error)` for the first `terms` elements.
pub fn q_terms(c: &SpectrumCandidate, xi: f64, terms: usize, t: &TruncationPolicy) -> Result<Vec<(f64, f64)>> {
    let p = c.params;
    let r = p.require_r()? as i64;
    if terms > c.len() {
        return Err(Error::Range(format!("{terms} terms requested, {} available", c.len())));
    }
    c.entries[..terms]
        .par_iter()
        .map(|e| {
            let v = mu_hat_at(&Frequency::shifted(xi, &e.lambda, r), &p, t)?;
            Ok((v.abs_sq(), v.abs_sq_error()))
        })
        .collect()
}

/// `sum_{k < terms} |mu_hat(xi + r lambda_k)|^2`.
pub fn q_eval(c: &SpectrumCandidate, xi: f64, terms: usize, t: &TruncationPolicy) -> Result<QValue> {
    let v = q_terms(c, xi, terms, t)?;
    let (vals, errs): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
    Ok(QValue { xi, q: pairwise_sum(&vals), error_budget: pairwise_sum(&errs), terms })
}
