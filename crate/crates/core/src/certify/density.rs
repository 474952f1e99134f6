use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::growth::GrowthFn;
use crate::numtheory::SparseDigits;
use crate::treemap::SpectrumCandidate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityRow {
    #[serde(rename = "R")]
    pub radius: f64,
    pub max_count: usize,
    pub g: f64,
    pub ratio: f64,
}

/// `sup_x #(r Lambda ∩ (x - R, x + R)) / g(R)` for each `R`.
///
/// The supremum is the largest number of points spanning less than `2R`, found
/// by a two-pointer sweep over the sorted values with exact integer comparisons.
pub fn beurling_density(c: &SpectrumCandidate, g: &GrowthFn, radii: &[f64]) -> Result<Vec<DensityRow>> {
    let r = c.params.require_r()? as i64;
    let b = c.params.b();
    let mut vals: Vec<SparseDigits> = c.lambdas().map(|l| l.scale(r)).collect();
    vals.sort();
    radii
        .iter()
        .map(|&radius| {
            if !(radius > 0.0 && radius <= 2f64.powi(60)) {
                return Err(Error::InvalidParameters(format!("radius {radius} outside (0, 2^60]")));
            }
            let span = SparseDigits::from_bigint(&BigInt::from((2.0 * radius).ceil() as i64), b);
            let mut best = 0;
            let mut j = 0;
            for i in 0..vals.len() {
                j = j.max(i);
                while j < vals.len() && vals[j].sub(&vals[i]) < span {
                    j += 1;
                }
                best = best.max(j - i);
            }
            let gv = g.eval(radius);
            Ok(DensityRow { radius, max_count: best, g: gv, ratio: best as f64 / gv })
        })
        .collect()
}
