use serde::Serialize;

use crate::error::Result;
use crate::fourier::hadamard_check;
use crate::numtheory::MeasureParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QbClass {
    AtMostFinitelyManyExponentials,
    InfinitelyManyOrthogonal,
    SpectralByConstruction,
    UnknownSpectrality,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub q: u32,
    pub b: u32,
    pub gcd: u32,
    pub class: QbClass,
    /// Extra flags; `UnknownSpectrality` accompanies `InfinitelyManyOrthogonal`.
    pub flags: Vec<QbClass>,
    /// Whether the `q x q` Fourier matrix for `(q, b/q)` is Hadamard, when `q | b`.
    pub hadamard: Option<bool>,
}

/// Orthogonal-set regime of `mu_{q,b}` by `gcd(q, b)`.
pub fn classify_qb(q: u32, b: u32) -> Result<Classification> {
    let p = MeasureParams::new(q, b)?;
    let g = p.gcd();
    let (class, flags, hadamard) = if g == 1 {
        (QbClass::AtMostFinitelyManyExponentials, vec![], None)
    } else if g == q {
        (QbClass::SpectralByConstruction, vec![], Some(hadamard_check(q, b / q)))
    } else {
        (QbClass::InfinitelyManyOrthogonal, vec![QbClass::UnknownSpectrality], None)
    };
    Ok(Classification { q, b, gcd: g, class, flags, hadamard })
}
