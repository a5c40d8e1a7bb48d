use serde::{Deserialize, Serialize};

use super::besov::{besov_norm, s_p, BesovIndex};
use super::lorentz::{lorentz_norm, weak_l3};
use crate::spectral::SpectralField;
use crate::{Error, Result};

/// Measured ratios for the chain `Ḃ^{s_{q1}}_{q1,∞} ↪ L^{3,∞} ↪ Ḃ^{s_{q2}}_{q2,∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub q1: f64,
    pub q2: f64,
    pub besov_low: f64,
    pub weak_l3: f64,
    pub besov_high: f64,
    /// `weak-L^3 / Besov(q1)`; `None` when the denominator vanishes.
    pub lower_ratio: Option<f64>,
    /// `Besov(q2) / weak-L^3`; `None` when the denominator vanishes.
    pub upper_ratio: Option<f64>,
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

pub fn embedding_report(u: &SpectralField, q1: f64, q2: f64) -> Result<EmbeddingReport> {
    if !(q1 >= 1.0 && q1 < 3.0 && q2 > 3.0) {
        return Err(Error::InvalidExponent(format!(
            "embedding needs 1 <= q1 < 3 < q2, got q1 = {q1}, q2 = {q2}"
        )));
    }
    let besov_low = besov_norm(u, &BesovIndex::new(s_p(q1), q1, f64::INFINITY)?);
    let besov_high = besov_norm(u, &BesovIndex::new(s_p(q2), q2, f64::INFINITY)?);
    let w = weak_l3(u);
    Ok(EmbeddingReport {
        q1,
        q2,
        besov_low,
        weak_l3: w,
        besov_high,
        lower_ratio: ratio(w, besov_low),
        upper_ratio: ratio(besov_high, w),
    })
}

/// Largest finite ratios observed over a corpus of fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingConstants {
    pub lower: f64,
    pub upper: f64,
    pub samples: usize,
}

pub fn embedding_constants(
    fields: &[SpectralField],
    q1: f64,
    q2: f64,
) -> Result<EmbeddingConstants> {
    let mut out = EmbeddingConstants {
        lower: 0.0,
        upper: 0.0,
        samples: 0,
    };
    for f in fields {
        let r = embedding_report(f, q1, q2)?;
        if let (Some(a), Some(b)) = (r.lower_ratio, r.upper_ratio) {
            out.lower = out.lower.max(a);
            out.upper = out.upper.max(b);
            out.samples += 1;
        }
    }
    Ok(out)
}

/// Largest observed `‖g‖_{L^{6,2}} / ‖∇g‖_{L^2}` (the `Ḣ^1 ↪ L^{6,2}`
/// constant) over a set of fields; zero fields are skipped.
pub fn sobolev_lorentz_constant(fields: &[SpectralField]) -> Result<f64> {
    let mut best: f64 = 0.0;
    for f in fields {
        let d = f.h1_seminorm();
        if d > 0.0 {
            best = best.max(lorentz_norm(f, 6.0, 2.0)? / d);
        }
    }
    Ok(best)
}
