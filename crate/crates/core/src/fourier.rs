//! The mask `m`, the Fourier transform of `mu_{q,b}` and its finite-level
//! truncations, with explicit error accounting.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::{MeasureParams, SparseDigits};

/// `(1/q) sum_{j<q} e^{2 pi i j xi}`.
pub fn mask(xi: f64, q: u32) -> Complex64 {
    let eta = xi - xi.round();
    if eta == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let amp = (q as f64 * PI * eta).sin() / (q as f64 * (PI * eta).sin());
    Complex64::from_polar(amp, PI * (q as f64 - 1.0) * eta)
}

/// `|m(xi)|^2` from the closed form.
pub fn mask_abs_sq(xi: f64, q: u32) -> f64 {
    let eta = xi - xi.round();
    if eta == 0.0 {
        return 1.0;
    }
    let amp = (q as f64 * PI * eta).sin() / (q as f64 * (PI * eta).sin());
    amp * amp
}

/// How many factors of the infinite product to keep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    /// Factors kept after the real offset and after every integer digit.
    pub depth: u32,
    /// Target for the multiplicative deviation of the neglected tail.
    pub tail_tol: f64,
}

impl TruncationPolicy {
    pub fn new(depth: u32, tail_tol: f64) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidParameters("truncation depth must be at least 1".into()));
        }
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::InvalidParameters(format!("tail_tol {tail_tol} outside (0, 1)")));
        }
        Ok(TruncationPolicy { depth, tail_tol })
    }

    pub fn with_depth(depth: u32) -> Result<Self> {
        Self::new(depth, 1e-9)
    }

    /// Smallest depth with `|xi|/b^J <= 1/2` plus `extra` factors.
    pub fn covering(xi: f64, b: u32, extra: u32) -> Self {
        let need = if xi.abs() <= 0.5 {
            0
        } else {
            ((2.0 * xi.abs()).ln() / (b as f64).ln()).ceil() as u32
        };
        TruncationPolicy { depth: (need + extra).max(1), tail_tol: 1e-9 }
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { depth: 40, tail_tol: 1e-9 }
    }
}

/// A frequency `offset + sum coef * b^pos` with sparse integer part.
///
/// The integer part never has to be materialized; factor arguments are
/// produced by the recurrence `A_j = (A_{j-1} + c_{j-1}) / b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frequency {
    pub offset: f64,
    terms: Vec<(u64, i64)>,
}

impl Frequency {
    pub fn real(offset: f64) -> Self {
        Frequency { offset, terms: Vec::new() }
    }

    /// `offset + sum coef * b^pos`; positions must be distinct.
    pub fn new(offset: f64, mut terms: Vec<(u64, i64)>) -> Self {
        terms.retain(|t| t.1 != 0);
        terms.sort_unstable_by_key(|t| t.0);
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        Frequency { offset, terms }
    }

    /// `offset + scale * lambda`.
    pub fn shifted(offset: f64, lambda: &SparseDigits, scale: i64) -> Self {
        Frequency {
            offset,
            terms: lambda.terms().iter().map(|&(p, c)| (p, scale * c as i64)).collect(),
        }
    }

    pub fn terms(&self) -> &[(u64, i64)] {
        &self.terms
    }

    pub fn approx(&self, b: u32) -> f64 {
        let lb = (b as f64).ln();
        self.offset
            + self
                .terms
                .iter()
                .map(|&(p, c)| c as f64 * (p as f64 * lb).exp())
                .sum::<f64>()
    }
}

/// A truncated transform value kept in log-magnitude and phase form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformValue {
    /// `ln |value|`; `-inf` when some factor vanished exactly.
    pub log_abs: f64,
    pub phase: f64,
    /// Certifies `| |mu_hat| - |value| | <= tail_bound`.
    pub tail_bound: f64,
    pub factors: u64,
}

impl TransformValue {
    pub fn abs(&self) -> f64 {
        self.log_abs.exp()
    }

    pub fn abs_sq(&self) -> f64 {
        (2.0 * self.log_abs).exp()
    }

    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(self.abs(), self.phase)
    }

    /// Bound on `| |mu_hat|^2 - |value|^2 |`.
    pub fn abs_sq_error(&self) -> f64 {
        let t = self.tail_bound;
        t * (2.0 * self.abs() + t)
    }
}

struct Accumulator {
    q: u32,
    log_abs: f64,
    phase: f64,
    rounding: f64,
    factors: u64,
}

impl Accumulator {
    fn new(q: u32) -> Self {
        Accumulator { q, log_abs: 0.0, phase: 0.0, rounding: 0.0, factors: 0 }
    }

    fn push(&mut self, a: f64) {
        let m = mask(a, self.q);
        let lip = PI * (self.q as f64 - 1.0);
        self.rounding += lip * 2.0 * f64::EPSILON * (a.abs() + 1.0) + 2.0 * f64::EPSILON;
        self.factors += 1;
        let amp = m.norm();
        if amp == 0.0 {
            self.log_abs = f64::NEG_INFINITY;
        } else {
            self.log_abs += amp.ln();
            self.phase += m.arg();
        }
    }
}

/// `m(xi/b) ... m(xi/b^n)` for real `xi`.
pub fn mu_n_hat(xi: f64, n: u32, p: &MeasureParams) -> Complex64 {
    mu_n_hat_at(&Frequency::real(xi), n, p)
}

/// `m(f/b) ... m(f/b^n)` at a frequency with sparse integer part.
pub fn mu_n_hat_at(f: &Frequency, n: u32, p: &MeasureParams) -> Complex64 {
    let mut acc = Accumulator::new(p.q());
    for_each_argument(f, n, p.b(), |a| acc.push(a));
    if acc.log_abs == f64::NEG_INFINITY {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(acc.log_abs.exp(), acc.phase)
}

/// `|mu_n_hat(f)|^2` via the closed form of `|m|^2`.
pub fn mu_n_abs_sq_at(f: &Frequency, n: u32, p: &MeasureParams) -> f64 {
    let mut log = 0.0f64;
    for_each_argument(f, n, p.b(), |a| log += mask_abs_sq(a, p.q()).ln());
    log.exp()
}

fn for_each_argument(f: &Frequency, n: u32, b: u32, mut visit: impl FnMut(f64)) {
    let bf = b as f64;
    let mut a = f.offset;
    let mut idx = 0;
    for j in 0..n as u64 {
        let mut c = 0i64;
        if let Some(&(pos, coef)) = f.terms.get(idx) {
            if pos == j {
                c = coef;
                idx += 1;
            }
        }
        a = (a + c as f64) / bf;
        visit(a);
    }
}

/// The truncated transform at a real frequency.
pub fn mu_hat(xi: f64, p: &MeasureParams, t: &TruncationPolicy) -> Result<(Complex64, f64)> {
    let v = mu_hat_at(&Frequency::real(xi), p, t)?;
    Ok((v.value(), v.tail_bound))
}

/// The truncated transform at `f`.
///
/// Factor `j` is kept when `j <= depth` or when some integer digit at position
/// `e < j` has `j - e <= depth`; the skipped factors are bounded with
/// `|1 - m(eta)| <= pi (q-1) |eta|`.
pub fn mu_hat_at(f: &Frequency, p: &MeasureParams, t: &TruncationPolicy) -> Result<TransformValue> {
    let bf = p.b() as f64;
    let ratio = f.offset.abs() / bf.powi(t.depth as i32);
    if ratio > 0.5 {
        return Err(Error::TruncationInfeasible { ratio });
    }
    let mut acc = Accumulator::new(p.q());
    let depth = t.depth as u64;
    let geometric = bf / (bf - 1.0);
    let mut skipped = 0.0f64;
    let mut a = f.offset;
    let mut j = 0u64;
    let mut fresh_until = depth;
    let mut idx = 0;
    loop {
        let mut c = 0i64;
        if let Some(&(pos, coef)) = f.terms.get(idx) {
            if pos == j {
                c = coef;
                idx += 1;
                fresh_until = fresh_until.max(j + depth);
            }
        }
        a = (a + c as f64) / bf;
        j += 1;
        if j <= fresh_until {
            acc.push(a);
            continue;
        }
        skipped += a.abs() * geometric;
        match f.terms.get(idx) {
            Some(&(pos, _)) => {
                let gap = pos - j;
                a *= bf.powf(-(gap as f64));
                j = pos;
            }
            None => break,
        }
    }
    let s = PI * (p.q() as f64 - 1.0) * skipped;
    let amp = acc.log_abs.exp();
    let tail_bound = amp * s.exp_m1() + acc.rounding * (1.0 + s.exp_m1());
    Ok(TransformValue { log_abs: acc.log_abs, phase: acc.phase, tail_bound, factors: acc.factors })
}

/// A certified enclosure `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Enclosures of the constants bounding `|mu_hat|^2` along tree frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaskConstants {
    pub c_min: Interval,
    pub c_max: Interval,
    pub params: MeasureParams,
    pub grid_resolution: f64,
}

impl MaskConstants {
    /// The conservative lower constant (`c_1`).
    pub fn c1(&self) -> f64 {
        self.c_min.lo
    }

    /// The conservative upper constant (`c_2`).
    pub fn c2(&self) -> f64 {
        self.c_max.hi
    }
}

/// Grid minimization of `prod_{j>=0} |m(b^-j xi)|^2` on `|xi| <= (b-1)/(qb)` and
/// maximization of `|m|^2` on `1/b^2 <= |xi| <= (b-1)/(qb)`, with Lipschitz margins.
pub fn compute_mask_constants(p: &MeasureParams, resolution: f64) -> Result<MaskConstants> {
    p.require_r()?;
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::InvalidParameters(format!("resolution {resolution} must be positive")));
    }
    let (q, b) = (p.q() as f64, p.b() as f64);
    let upper = (b - 1.0) / (q * b);
    let lower = 1.0 / (b * b);
    if lower > upper {
        return Err(Error::InvalidParameters(format!(
            "empty domain for c_max: 1/b^2 = {lower} > (b-1)/(qb) = {upper}"
        )));
    }
    let max_points = 50_000_000.0;
    if upper / resolution > max_points {
        return Err(Error::Resource(format!("grid resolution {resolution} needs too many points")));
    }
    let policy = TruncationPolicy::with_depth(40)?;

    let n1 = (upper / resolution).ceil().max(1.0) as u64;
    let h1 = upper / n1 as f64;
    let (min_lo, min_hi) = (0..=n1)
        .into_par_iter()
        .map(|i| {
            let xi = i as f64 * h1;
            let v = mu_hat_at(&Frequency::real(xi), p, &policy).expect("small argument");
            let f = mask_abs_sq(xi, p.q()) * v.abs_sq();
            let e = v.abs_sq_error();
            (f - e, f + e)
        })
        .reduce(|| (f64::INFINITY, f64::INFINITY), |x, y| (x.0.min(y.0), x.1.min(y.1)));
    let lip_min = 2.0 * PI * (q - 1.0) * b / (b - 1.0);
    let c_min = Interval { lo: min_lo - lip_min * h1 / 2.0, hi: min_hi };

    let n2 = ((upper - lower) / resolution).ceil().max(1.0) as u64;
    let h2 = (upper - lower) / n2 as f64;
    let max_val = (0..=n2)
        .into_par_iter()
        .map(|i| mask_abs_sq(lower + i as f64 * h2, p.q()))
        .reduce(|| f64::NEG_INFINITY, f64::max);
    let lip_max = 2.0 * PI * (q - 1.0);
    let c_max = Interval { lo: max_val, hi: max_val + lip_max * h2 / 2.0 };

    if c_min.lo <= 0.0 {
        return Err(Error::RefinementNeeded(format!(
            "resolution {resolution} cannot certify c_min > 0 (lower end {})",
            c_min.lo
        )));
    }
    if c_max.hi >= 1.0 || c_min.hi >= c_max.lo {
        return Err(Error::RefinementNeeded(format!(
            "resolution {resolution} cannot separate c_min {c_min:?} from c_max {c_max:?} below 1"
        )));
    }
    Ok(MaskConstants { c_min, c_max, params: *p, grid_resolution: resolution })
}

/// Whether `[e^{2 pi i jk r/b}]` with `b = qr` satisfies `H H* = q I` to `1e-12`.
pub fn hadamard_check(q: u32, r: u32) -> bool {
    if q < 2 || r < 1 {
        return false;
    }
    let b = (q * r) as f64;
    let n = q as usize;
    let h: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Complex64::from_polar(1.0, 2.0 * PI * (i * j) as f64 * r as f64 / b))
                .collect()
        })
        .collect();
    (0..n).all(|i| {
        (0..n).all(|k| {
            let s: Complex64 = (0..n).map(|j| h[i][j] * h[k][j].conj()).sum();
            let target = if i == k { q as f64 } else { 0.0 };
            (s - target).norm() <= 1e-12
        })
    })
}

/// Outcome of comparing `|mu_hat(t)|^2` with `c_min^(N+1)` and `c_max^N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DigitBoundReport {
    pub n: usize,
    pub abs_sq: f64,
    pub lower: f64,
    pub upper: f64,
    pub tol: f64,
    pub holds: bool,
}

/// Evaluates `t = xi + sum d_k b^{n_k}` and checks the two-sided digit-count bound.
pub fn digit_count_bounds_check(
    xi: f64,
    digit_positions: &[(u64, u32)],
    p: &MeasureParams,
    mc: &MaskConstants,
    t: &TruncationPolicy,
) -> Result<DigitBoundReport> {
    let r = p.require_r()?;
    let b = p.b() as f64;
    let range = r as f64 * (b - 2.0) / (b - 1.0);
    if !(xi.abs() <= range) {
        return Err(Error::Precondition(format!("|xi| = {} exceeds {range}", xi.abs())));
    }
    if digit_positions.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::Precondition("positions must be strictly increasing".into()));
    }
    if let Some(&(n, d)) = digit_positions.iter().find(|&&(n, d)| n == 0 || d == 0 || d >= r) {
        return Err(Error::Precondition(format!(
            "digit {d} at position {n} must satisfy n >= 1 and 1 <= d <= {}",
            r - 1
        )));
    }
    let f = Frequency::new(xi, digit_positions.iter().map(|&(n, d)| (n, d as i64)).collect());
    let v = mu_hat_at(&f, p, t)?;
    let n = digit_positions.len();
    let abs_sq = v.abs_sq();
    let lower = mc.c_min.lo.powi(n as i32 + 1);
    let upper = mc.c_max.hi.powi(n as i32);
    let tol = 1e-6 + v.abs_sq_error();
    Ok(DigitBoundReport { n, abs_sq, lower, upper, tol, holds: lower - tol <= abs_sq && abs_sq <= upper + tol })
}
