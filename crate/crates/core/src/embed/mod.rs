//! Constructive average-distortion embeddings and the bookkeeping that
//! measures them.

mod character;
mod hilbert;
mod line;
mod snowflake;

pub use character::{sl_character_embed, SlEmbedding};
pub use hilbert::{hilbert_realize_snowflake, HilbertRealization};
pub use line::{
    advisory_raise_distortion, line_embed, lower_exponent, raise_exponent, ExponentChange, LineEmbedding,
    LineProfile, LOWER_TAU,
};
pub use snowflake::{
    frechet_map, self_embed_holder_bound, snowflake_self_embed, transfer_advisory, transfer_snowflake,
    SelfEmbedding, Transfer, TRANSFER_ENVELOPE,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{pow_nonneg, weighted_pair_sum, FiniteMetricSpace, PointConfig, ProbabilityWeights};

/// A map from a finite metric space, recorded by the images of its points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEmbedding")]
pub struct EmbeddingMap {
    domain: FiniteMetricSpace,
    weights: ProbabilityWeights,
    image: PointConfig,
}

#[derive(Deserialize)]
struct RawEmbedding {
    domain: FiniteMetricSpace,
    weights: ProbabilityWeights,
    image: PointConfig,
}

impl TryFrom<RawEmbedding> for EmbeddingMap {
    type Error = Error;
    fn try_from(raw: RawEmbedding) -> Result<Self> {
        EmbeddingMap::new(raw.domain, raw.weights, raw.image)
    }
}

impl EmbeddingMap {
    pub fn new(domain: FiniteMetricSpace, weights: ProbabilityWeights, image: PointConfig) -> Result<Self> {
        for found in [weights.len(), image.len()] {
            if found != domain.n() {
                return Err(Error::DimensionMismatch {
                    expected: domain.n(),
                    found,
                });
            }
        }
        Ok(EmbeddingMap { domain, weights, image })
    }

    pub fn domain(&self) -> &FiniteMetricSpace {
        &self.domain
    }

    pub fn weights(&self) -> &ProbabilityWeights {
        &self.weights
    }

    pub fn image(&self) -> &PointConfig {
        &self.image
    }

    pub fn n(&self) -> usize {
        self.domain.n()
    }

    /// Same map with every image point multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> EmbeddingMap {
        let points = self.image.points().iter().map(|p| p.iter().map(|v| v * factor).collect()).collect();
        EmbeddingMap {
            domain: self.domain.clone(),
            weights: self.weights.clone(),
            image: PointConfig::new(self.image.host().clone(), points).expect("scaling keeps the shape"),
        }
    }

    /// Same image over a different domain metric on the same labels.
    pub(crate) fn with_domain(&self, domain: FiniteMetricSpace) -> EmbeddingMap {
        EmbeddingMap {
            domain,
            weights: self.weights.clone(),
            image: self.image.clone(),
        }
    }

    /// Measured distortion with Hölder exponent `omega` and moment `p`.
    pub fn summary(&self, p: f64, omega: f64) -> Result<DistortionSummary> {
        distortion_summary(self, p, omega)
    }
}

/// Measured Hölder constant and moment ratio of an [`EmbeddingMap`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionSummary {
    pub holder_exponent: f64,
    pub p: f64,
    /// `max ‖f(x)−f(y)‖ / d(x,y)^ω` over support pairs.
    pub holder_constant: f64,
    /// `(Σμμ‖Δf‖^p / Σμμ d^{pω})^{1/p}`
    pub p_average_ratio: f64,
    /// `L / r`; infinite (null in JSON) when the image average vanishes.
    pub certified_avg_distortion: f64,
    pub degenerate: bool,
}

/// Computes the [`DistortionSummary`] of `f` for exponents `(p, ω)`.
///
/// A domain with no positive distance on the support gets the convention
/// `D = 1`; a constant image of a nontrivial domain gets `D = ∞`.
pub fn distortion_summary(f: &EmbeddingMap, p: f64, omega: f64) -> Result<DistortionSummary> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::param("p", p, "exponent must be positive and finite"));
    }
    if !(omega > 0.0 && omega <= 1.0) {
        return Err(Error::param("omega", omega, "must lie in (0, 1]"));
    }
    let holder = holder_constant(f, omega);
    let w = f.weights.as_slice();
    let domain_avg = weighted_pair_sum(w, p * omega, |i, j| f.domain.d(i, j));
    let image_avg = weighted_pair_sum(w, p, |i, j| f.image.dist(i, j));
    let (ratio, distortion, degenerate) = if domain_avg == 0.0 {
        (1.0, 1.0, true)
    } else if image_avg == 0.0 {
        (0.0, f64::INFINITY, true)
    } else {
        let r = pow_nonneg(image_avg / domain_avg, 1.0 / p);
        (r, holder / r, false)
    };
    Ok(DistortionSummary {
        holder_exponent: omega,
        p,
        holder_constant: holder,
        p_average_ratio: ratio,
        certified_avg_distortion: distortion,
        degenerate,
    })
}

/// `max ‖f(x_i)−f(x_j)‖ / d_ij^ω` over pairs in the support of the weights;
/// infinite if two points at distance zero have distinct images.
pub fn holder_constant(f: &EmbeddingMap, omega: f64) -> f64 {
    let support = f.weights.support();
    let mut worst = 0.0f64;
    for (a, &i) in support.iter().enumerate() {
        for &j in &support[a + 1..] {
            let img = f.image.dist(i, j);
            if img == 0.0 {
                continue;
            }
            let d = f.domain.d(i, j);
            if d == 0.0 {
                return f64::INFINITY;
            }
            worst = worst.max(img / pow_nonneg(d, omega));
        }
    }
    worst
}
