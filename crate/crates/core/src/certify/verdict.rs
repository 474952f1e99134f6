use serde::{Deserialize, Serialize};

use super::criteria::{criterion_report, decay_fit, fitting_horizon, lstar_terms};
use super::orthogonality::{check_bizero, BizeroReport};
use super::qsum::{pairwise_sum, q_terms};
use super::{AlphaSequence, CriterionConfig, CriterionReport};
use crate::error::{Error, Result};
use crate::fourier::{compute_mask_constants, TruncationPolicy};
use crate::numtheory::Word;
use crate::treemap::{enumerate, profile_stats, regularize, validate, SpectrumCandidate, TreeMappingSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictKind {
    OrthogonalOnly,
    MaximalOrthogonal,
    SpectrumNumeric,
    NotSpectrumNumeric,
    Unknown,
}

/// One evaluated grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QPoint {
    pub xi: f64,
    pub q: f64,
    pub error_budget: f64,
    pub terms: usize,
    /// Certified upper bound on the full `Q(xi)`, when the decay criterion applies here.
    pub upper_bound: Option<f64>,
}

/// Upper bound `1 - (1 - Q_K - e) prod_{n >= n0} (1 - c_2^{L*_n})` on `Q(xi)`,
/// with `K` the elements indexed below `q^n0` and `n0` chosen to minimize it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeficitCertificate {
    pub xi: f64,
    pub prefix_level: u32,
    pub prefix_terms: usize,
    pub q_prefix: f64,
    pub prefix_budget: f64,
    /// Product over the levels with exact statistics.
    pub product: f64,
    /// Levels below this use computed statistics; beyond it the fitted decay is assumed.
    pub horizon_level: usize,
    pub horizon_tail: f64,
    pub upper_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerdictConfig {
    /// Elements summed in `Q`; zero skips the numeric stage.
    pub terms: usize,
    pub truncation: TruncationPolicy,
    pub grid: Vec<f64>,
    pub bizero_prefix: usize,
    pub validate_depth: usize,
    pub alpha: AlphaSequence,
    pub horizon: usize,
    pub criterion: CriterionConfig,
    pub stat_levels: usize,
    /// Allowed `max |Q - 1| - budget` for a spectrum verdict.
    pub spectrum_tol: f64,
    /// Required deficit `1 - Q` for a non-spectrum verdict.
    pub delta: f64,
    pub mask_resolution: f64,
}

impl VerdictConfig {
    pub fn default_grid() -> Vec<f64> {
        let mut g: Vec<f64> = (1..=32).map(|j| j as f64 / 64.0).collect();
        g.extend([1e-2, 1e-3]);
        g
    }
}

impl Default for VerdictConfig {
    fn default() -> Self {
        VerdictConfig {
            terms: 4096,
            truncation: TruncationPolicy::default(),
            grid: Self::default_grid(),
            bizero_prefix: 512,
            validate_depth: 8,
            alpha: AlphaSequence::MaxNRecursion,
            horizon: 12,
            criterion: CriterionConfig::default(),
            stat_levels: 96,
            spectrum_tol: 1e-3,
            delta: 0.01,
            mask_resolution: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Always "numerical" for the spectrum verdicts.
    pub evidence: &'static str,
    pub bizero: BizeroReport,
    pub criterion: CriterionReport,
    pub q_grid: Vec<QPoint>,
    /// `max |Q - 1| - budget` over the grid.
    pub max_deviation: Option<f64>,
    pub error_budget: f64,
    pub truncation: TruncationPolicy,
    pub terms: usize,
    pub witness: Option<DeficitCertificate>,
}

impl Verdict {
    /// Writes the grid as CSV rows `xi,Q,error_budget,terms`.
    pub fn q_grid_csv(&self) -> String {
        let mut s = String::from("xi,Q,error_budget,terms\n");
        for p in &self.q_grid {
            s.push_str(&format!("{},{},{},{}\n", p.xi, p.q, p.error_budget, p.terms));
        }
        s
    }
}

fn deficit(
    vals: &[(f64, f64)],
    c: &SpectrumCandidate,
    xi: f64,
    ii: &[f64],
    tail: f64,
) -> Option<DeficitCertificate> {
    let q = c.params.q() as u64;
    let covered = c.entries.get(vals.len().checked_sub(1)?)?.index + 1;
    let mut best: Option<DeficitCertificate> = None;
    let mut level = 1u32;
    while let Some(bound) = q.checked_pow(level).filter(|&k| k <= covered && level as usize <= ii.len()) {
        let k = c.entries.iter().take(vals.len()).take_while(|e| e.index < bound).count();
        let (v, e): (Vec<f64>, Vec<f64>) = vals[..k].iter().copied().unzip();
        let (q_prefix, prefix_budget) = (pairwise_sum(&v), pairwise_sum(&e));
        // ii[n - 1] is the term of level n.
        let product: f64 = ii[level as usize - 1..].iter().map(|t| 1.0 - t).product();
        let upper_bound = 1.0 - (1.0 - q_prefix - prefix_budget).max(0.0) * product * (1.0 - tail).max(0.0);
        if best.map_or(true, |b| upper_bound < b.upper_bound) {
            best = Some(DeficitCertificate {
                xi,
                prefix_level: level,
                prefix_terms: k,
                q_prefix,
                prefix_budget,
                product,
                horizon_level: ii.len() + 1,
                horizon_tail: tail,
                upper_bound,
            });
        }
        level += 1;
    }
    best
}

/// Exact orthogonality, growth criteria and a `Q` grid, combined into one verdict.
pub fn spectrum_verdict(spec: &TreeMappingSpec, cfg: &VerdictConfig) -> Result<Verdict> {
    let p = *spec.params();
    let report = validate(spec, cfg.validate_depth);
    let node_note = report
        .violations
        .first()
        .map(|v| format!("node {} ({:?}): {}", v.node, v.clause, v.message));
    let cand = enumerate(spec, cfg.terms.max(cfg.bizero_prefix))?;
    let bizero = check_bizero(&cand.prefix(cfg.bizero_prefix))?;
    if let Some(w) = &bizero.witness {
        let mut msg = format!(
            "orthogonality fails for lambda_{} = {} and lambda_{} = {}",
            w.i,
            w.lambda_i.as_deref().unwrap_or("?"),
            w.j,
            w.lambda_j.as_deref().unwrap_or("?")
        );
        if let Some(n) = node_note {
            msg.push_str(&format!("; first invalid {n}"));
        }
        return Err(Error::Validation(msg));
    }
    if let Some(n) = node_note {
        return Err(Error::Validation(format!("not a maximal mapping: {n}")));
    }
    let mc = compute_mask_constants(&p, cfg.mask_resolution)?;

    let stats = profile_stats(spec, cfg.stat_levels);
    let horizon = cfg.horizon.min(fitting_horizon(&stats, &cfg.alpha, cfg.horizon)?);
    let criterion = criterion_report(&stats, &mc, &cfg.alpha, horizon, &cfg.criterion)?;

    let base = Verdict {
        kind: VerdictKind::MaximalOrthogonal,
        evidence: "numerical",
        bizero,
        criterion,
        q_grid: Vec::new(),
        max_deviation: None,
        error_budget: 0.0,
        truncation: cfg.truncation,
        terms: 0,
        witness: None,
    };
    if cfg.terms == 0 {
        return Ok(base);
    }

    let ii = lstar_terms(&stats, mc.c2())?;
    let tail = decay_fit(&ii).1;
    let b = p.b() as f64;
    let reach = p.require_r()? as f64 * (b - 2.0) / (b - 1.0);
    let mut grid = Vec::with_capacity(cfg.grid.len());
    let mut best: Option<DeficitCertificate> = None;
    for &xi in &cfg.grid {
        let vals = q_terms(&cand, xi, cfg.terms, &cfg.truncation)?;
        let (v, e): (Vec<f64>, Vec<f64>) = vals.iter().copied().unzip();
        let cert = match tail {
            Some(t) if base.criterion.holds_ii && xi.abs() <= reach => deficit(&vals, &cand, xi, &ii, t),
            _ => None,
        };
        if let Some(c) = cert {
            if best.map_or(true, |b| c.upper_bound < b.upper_bound) {
                best = Some(c);
            }
        }
        grid.push(QPoint {
            xi,
            q: pairwise_sum(&v),
            error_budget: pairwise_sum(&e),
            terms: cfg.terms,
            upper_bound: cert.map(|c| c.upper_bound),
        });
    }
    let max_deviation = grid.iter().map(|g| (g.q - 1.0).abs() - g.error_budget).fold(f64::NEG_INFINITY, f64::max);
    let error_budget = grid.iter().map(|g| g.error_budget).fold(0.0, f64::max);
    let kind = if base.criterion.holds_i && max_deviation <= cfg.spectrum_tol {
        VerdictKind::SpectrumNumeric
    } else if best.is_some_and(|c| c.upper_bound < 1.0 - cfg.delta) {
        VerdictKind::NotSpectrumNumeric
    } else {
        VerdictKind::Unknown
    };
    Ok(Verdict {
        kind,
        q_grid: grid,
        max_deviation: Some(max_deviation),
        error_budget,
        terms: cfg.terms,
        witness: if kind == VerdictKind::NotSpectrumNumeric { best } else { None },
        ..base
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularizedComparison {
    pub original: Verdict,
    pub regularized: Verdict,
    pub regularized_stems: Vec<Word>,
    pub agree: bool,
}

/// Verdicts for `tau` and for `tau_R` with every irregular path made regular.
pub fn compare_regularized(spec: &TreeMappingSpec, cfg: &VerdictConfig) -> Result<RegularizedComparison> {
    let stems: Vec<Word> = spec.irregular_paths().keys().cloned().collect();
    let reg = regularize(spec, &stems)?;
    let original = spectrum_verdict(spec, cfg)?;
    let regularized = spectrum_verdict(&reg, cfg)?;
    let agree = original.kind == regularized.kind;
    Ok(RegularizedComparison { original, regularized, regularized_stems: stems, agree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::MeasureParams;
    use crate::treemap::canonical_spec;

    fn quick() -> VerdictConfig {
        VerdictConfig { terms: 256, grid: vec![0.1, 0.25, 0.5], ..VerdictConfig::default() }
    }

    #[test]
    fn canonical_structural_only() {
        let p = MeasureParams::new(2, 4).unwrap();
        let cfg = VerdictConfig { terms: 0, ..quick() };
        let v = spectrum_verdict(&canonical_spec(&p).unwrap(), &cfg).unwrap();
        assert_eq!(v.kind, VerdictKind::MaximalOrthogonal);
        assert!(v.criterion.holds_i);
    }

    #[test]
    fn residue_violation_is_rejected() {
        let p = MeasureParams::new(2, 4).unwrap();
        let spec = canonical_spec(&p).unwrap().with_override(Word(vec![1]), 2).unwrap();
        match spectrum_verdict(&spec, &quick()) {
            Err(Error::Validation(m)) => {
                assert!(m.contains("lambda_1 = 2 and lambda_0 = 0"), "{m}");
                assert!(m.contains("[1]"), "{m}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn grid_csv() {
        let p = MeasureParams::new(2, 4).unwrap();
        let v = spectrum_verdict(&canonical_spec(&p).unwrap(), &quick()).unwrap();
        let csv = v.q_grid_csv();
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with("xi,Q,error_budget,terms\n0.1,"));
    }
}
