//! Increasing growth functions `g` used as density targets.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A strictly increasing continuous function on `[0, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub enum GrowthFn {
    /// `log2(1 + R)`
    Log2,
    /// `ln(1 + R)`
    Ln,
    /// `R^a`, `a > 0`
    Power(f64),
    /// `log2(1 + log2(1 + R))`
    LogLog,
    /// Piecewise linear through the given points, extended linearly past the last one.
    Table(Vec<(f64, f64)>),
}

impl GrowthFn {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            GrowthFn::Log2 => r.ln_1p() / std::f64::consts::LN_2,
            GrowthFn::Ln => r.ln_1p(),
            GrowthFn::Power(a) => r.powf(*a),
            GrowthFn::LogLog => (r.ln_1p() / std::f64::consts::LN_2).ln_1p() / std::f64::consts::LN_2,
            GrowthFn::Table(pts) => table_eval(pts, r),
        }
    }

    /// The increasing minorant `h` with `h(0) = 0` used when choosing sparse exponents.
    ///
    /// For the closed forms `h = g`; a table is shifted down by `g(0)`.
    pub fn minorant(&self, t: f64) -> f64 {
        match self {
            GrowthFn::Table(pts) => table_eval(pts, t) - table_eval(pts, 0.0),
            _ => self.eval(t),
        }
    }

    /// `log_b h^{-1}(y)`, computed without forming `h^{-1}(y)` itself.
    pub fn log_inverse_minorant(&self, y: f64, b: u32) -> f64 {
        let lb = (b as f64).ln();
        let ln2 = std::f64::consts::LN_2;
        match self {
            // h^{-1}(y) = 2^y - 1
            GrowthFn::Log2 => ln_expm1(y * ln2) / lb,
            GrowthFn::Ln => ln_expm1(y) / lb,
            GrowthFn::Power(a) => y.ln() / (a * lb),
            // h^{-1}(y) = 2^(2^y - 1) - 1
            GrowthFn::LogLog => ln_expm1((y * ln2).exp_m1() * ln2) / lb,
            GrowthFn::Table(pts) => {
                let shift = table_eval(pts, 0.0);
                table_inverse(pts, y + shift).ln() / lb
            }
        }
    }
}

/// `ln(e^x - 1)` without overflow for large `x`.
fn ln_expm1(x: f64) -> f64 {
    if x > 40.0 {
        x + (-(-x).exp()).ln_1p()
    } else {
        x.exp_m1().ln()
    }
}

fn table_eval(pts: &[(f64, f64)], x: f64) -> f64 {
    let i = pts.partition_point(|p| p.0 <= x);
    let (a, b) = if i == 0 {
        (pts[0], pts[1])
    } else if i >= pts.len() {
        (pts[pts.len() - 2], pts[pts.len() - 1])
    } else {
        (pts[i - 1], pts[i])
    };
    a.1 + (x - a.0) * (b.1 - a.1) / (b.0 - a.0)
}

fn table_inverse(pts: &[(f64, f64)], y: f64) -> f64 {
    let i = pts.partition_point(|p| p.1 <= y);
    let (a, b) = if i == 0 {
        (pts[0], pts[1])
    } else if i >= pts.len() {
        (pts[pts.len() - 2], pts[pts.len() - 1])
    } else {
        (pts[i - 1], pts[i])
    };
    a.0 + (y - a.1) * (b.0 - a.0) / (b.1 - a.1)
}

impl FromStr for GrowthFn {
    type Err = Error;

    /// Names: `log`, `log2`, `ln`, `loglog`, `pow:<a>`, `table:x0:y0,x1:y1,...`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |m: String| Error::schema("g", m);
        match s {
            "log" | "log2" => return Ok(GrowthFn::Log2),
            "ln" => return Ok(GrowthFn::Ln),
            "loglog" => return Ok(GrowthFn::LogLog),
            _ => {}
        }
        if let Some(a) = s.strip_prefix("pow:") {
            let a: f64 = a.trim().parse().map_err(|e| bad(format!("exponent {a:?}: {e}")))?;
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::InvalidParameters(format!(
                    "R^{a} is not increasing; exponent must be positive"
                )));
            }
            return Ok(GrowthFn::Power(a));
        }
        if let Some(body) = s.strip_prefix("table:") {
            let pts = body
                .split(',')
                .enumerate()
                .map(|(i, pair)| {
                    let (x, y) = pair
                        .split_once(':')
                        .ok_or_else(|| bad(format!("point {i}: expected x:y")))?;
                    let x: f64 = x.trim().parse().map_err(|e| bad(format!("point {i}: {e}")))?;
                    let y: f64 = y.trim().parse().map_err(|e| bad(format!("point {i}: {e}")))?;
                    if !(x.is_finite() && y.is_finite()) {
                        return Err(bad(format!("point {i}: non-finite value")));
                    }
                    Ok((x, y))
                })
                .collect::<Result<Vec<_>>>()?;
            return GrowthFn::table(pts);
        }
        Err(bad(format!("unknown growth function {s:?}")))
    }
}

impl GrowthFn {
    /// Validated piecewise-linear growth function.
    pub fn table(pts: Vec<(f64, f64)>) -> Result<Self> {
        if pts.len() < 2 {
            return Err(Error::InvalidParameters("table needs at least two points".into()));
        }
        if pts[0].0 != 0.0 {
            return Err(Error::InvalidParameters("table must start at x = 0".into()));
        }
        if pts[0].1 < 0.0 {
            return Err(Error::InvalidParameters("g must be nonnegative".into()));
        }
        if pts.windows(2).any(|w| !(w[1].0 > w[0].0 && w[1].1 > w[0].1)) {
            return Err(Error::InvalidParameters("table is not strictly increasing".into()));
        }
        Ok(GrowthFn::Table(pts))
    }
}

impl fmt::Display for GrowthFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthFn::Log2 => f.write_str("log"),
            GrowthFn::Ln => f.write_str("ln"),
            GrowthFn::LogLog => f.write_str("loglog"),
            GrowthFn::Power(a) => write!(f, "pow:{a}"),
            GrowthFn::Table(pts) => {
                f.write_str("table:")?;
                for (i, (x, y)) in pts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}:{y}")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        assert_eq!("log".parse::<GrowthFn>().unwrap(), GrowthFn::Log2);
        assert_eq!("pow:0.5".parse::<GrowthFn>().unwrap(), GrowthFn::Power(0.5));
        assert!("pow:-1".parse::<GrowthFn>().is_err());
        assert!("table:0:0,1:0".parse::<GrowthFn>().is_err());
        assert!("sqrt".parse::<GrowthFn>().is_err());
        let t: GrowthFn = "table:0:0,10:1,100:2".parse().unwrap();
        assert!((t.eval(55.0) - 1.5).abs() < 1e-12);
        assert_eq!(t.to_string().parse::<GrowthFn>().unwrap(), t);
    }

    #[test]
    fn inverse_matches_direct() {
        for g in [GrowthFn::Log2, GrowthFn::Ln, GrowthFn::Power(0.7), GrowthFn::LogLog] {
            for t in [3.0f64, 100.0, 1e5] {
                let y = g.minorant(t);
                let u = g.log_inverse_minorant(y, 4);
                assert!((4f64.powf(u) - t).abs() < 1e-6 * t, "{g} at {t}");
            }
        }
    }

    #[test]
    fn log_inverse_is_finite_for_huge_arguments() {
        let u = GrowthFn::Log2.log_inverse_minorant(4f64.powi(20), 4);
        assert!((u - 4f64.powi(20) / 2.0).abs() < 1.0);
    }
}
