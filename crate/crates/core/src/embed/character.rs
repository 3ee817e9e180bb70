use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{distortion_summary, DistortionSummary, EmbeddingMap};
use crate::error::{Error, Result};
use crate::graph::cayley_sl;
use crate::metric::{NormedHost, PointConfig, ProbabilityWeights};

/// Character embedding of SL_k(F_q) with its measured quality.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SlEmbedding {
    pub map: EmbeddingMap,
    pub k: usize,
    pub q: u32,
    pub order: usize,
    pub diameter: u32,
    /// `C·k·ln q / ln k`.
    pub scale: f64,
    /// Largest `‖f(X·s) − f(X)‖` over elements `X` and generators `s`.
    pub generator_displacement: f64,
    /// `scale · 2√k`.
    pub displacement_bound: f64,
    pub injective: bool,
    /// Uniform-measure 1-average distortion.
    pub summary: DistortionSummary,
    /// Uniform-measure 2-average distortion.
    pub quadratic_summary: DistortionSummary,
}

/// `X ↦ scale·(cos(2πx_jl/q), sin(2πx_jl/q))_{j,l}` in ℓ2^{2k²}.
pub fn sl_character_embed(k: usize, q: u32, c: f64) -> Result<SlEmbedding> {
    if k < 2 {
        return Err(Error::param("k", k, "needs k >= 2 since the scale divides by ln k"));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::param("C", c, "scale constant must be positive"));
    }
    let group = cayley_sl(k, q)?;
    let scale = c * k as f64 * f64::from(q).ln() / (k as f64).ln();
    let angle = 2.0 * PI / f64::from(q);
    let points: Vec<Vec<f64>> = group
        .elements
        .iter()
        .map(|g| {
            g.entries()
                .iter()
                .flat_map(|&x| {
                    let (s, co) = (angle * f64::from(x)).sin_cos();
                    [scale * co, scale * s]
                })
                .collect()
        })
        .collect();
    let image = PointConfig::new(NormedHost::l2(2 * k * k), points)?;
    let mut generator_displacement = 0.0f64;
    for (i, g) in group.elements.iter().enumerate() {
        for s in &group.generators {
            let j = group.index_of(&g.mul(s)).expect("group is closed under generators");
            generator_displacement = generator_displacement.max(image.dist(i, j));
        }
    }
    let n = group.order();
    let injective = (0..n).all(|i| ((i + 1)..n).all(|j| image.dist(i, j) > 0.0));
    let map = EmbeddingMap::new(group.metric.clone(), ProbabilityWeights::uniform(n)?, image)?;
    let summary = distortion_summary(&map, 1.0, 1.0)?;
    let quadratic_summary = distortion_summary(&map, 2.0, 1.0)?;
    Ok(SlEmbedding {
        map,
        k,
        q,
        order: n,
        diameter: group.diameter,
        scale,
        generator_displacement,
        displacement_bound: scale * 2.0 * (k as f64).sqrt(),
        injective,
        summary,
        quadratic_summary,
    })
}
