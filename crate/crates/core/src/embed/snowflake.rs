//! Self-embedding of snowflaked normed spaces and the exponent-transfer
//! pipeline built on it.

use serde::{Deserialize, Serialize};
use std::f64::consts::E;

use super::line::{lower_exponent, raise_exponent, ExponentChange};
use super::{distortion_summary, DistortionSummary, EmbeddingMap};
use crate::error::{Error, Result};
use crate::mazur::{eta, f_omega};
use crate::metric::{
    distance_matrix, frechet_embed, pow_nonneg, snowflake, weighted_pair_sum, FiniteMetricSpace, PointConfig,
    ProbabilityWeights,
};

/// Slack allowed between the measured transfer distortion and the closed-form
/// advisory value with unit constants. The fuzz corpus stays below 0.8; this is an
/// envelope for regression purposes, not a proven constant.
pub const TRANSFER_ENVELOPE: f64 = 4.0;

/// Output of [`snowflake_self_embed`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SelfEmbedding {
    pub map: EmbeddingMap,
    pub summary: DistortionSummary,
    /// Index of the support point used as the center `u`.
    pub center: usize,
    /// Normalizer `c`; absent when every support point coincides.
    pub normalizer: Option<f64>,
    /// `2^{(1−ω)(1+1/(pω))}/η(p,ω)`.
    pub holder_bound: f64,
    pub degenerate: bool,
}

/// Upper bound on the Hölder constant of the self-embedding.
pub fn self_embed_holder_bound(p: f64, omega: f64) -> Result<f64> {
    if omega == 1.0 {
        return Ok(1.0);
    }
    let eta = eta(p, omega)?;
    Ok(2f64.powf((1.0 - omega) * (1.0 + 1.0 / (p * omega))) / eta)
}

/// `φ(z) = c·f_ω(z − u)`, normalized so `Σμμ‖φ(x)−φ(y)‖^p = Σμμ‖x−y‖^{pω}`.
pub fn snowflake_self_embed(
    config: &PointConfig,
    mu: &ProbabilityWeights,
    p: f64,
    omega: f64,
) -> Result<SelfEmbedding> {
    if mu.len() != config.len() {
        return Err(Error::DimensionMismatch {
            expected: config.len(),
            found: mu.len(),
        });
    }
    let holder_bound = self_embed_holder_bound(p, omega)?;
    let host = config.host();
    let w = mu.as_slice();
    let support = mu.support();
    let pw = p * omega;
    let spread = |i: usize| -> f64 {
        support
            .iter()
            .map(|&j| w[j] * pow_nonneg(config.dist(i, j), pw))
            .sum()
    };
    let mut center = support[0];
    let mut best = spread(center);
    for &i in &support[1..] {
        let s = spread(i);
        if s < best {
            best = s;
            center = i;
        }
    }
    let u = config.point(center);
    let shifted: Vec<Vec<f64>> = config
        .points()
        .iter()
        .map(|x| x.iter().zip(u).map(|(a, b)| a - b).collect())
        .collect();
    let g: Vec<Vec<f64>> = shifted
        .iter()
        .map(|x| f_omega(host, x, omega))
        .collect::<Result<_>>()?;
    let target = weighted_pair_sum(w, pw, |i, j| config.dist(i, j));
    let achieved = weighted_pair_sum(w, p, |i, j| host.distance_unchecked(&g[i], &g[j]));
    let degenerate = target == 0.0 || achieved == 0.0;
    let normalizer = (!degenerate).then(|| (target / achieved).powf(1.0 / p));
    let c = normalizer.unwrap_or(0.0);
    let image = if degenerate {
        vec![vec![0.0; host.dim()]; config.len()]
    } else {
        g.into_iter().map(|v| v.into_iter().map(|t| c * t).collect()).collect()
    };
    let map = EmbeddingMap::new(distance_matrix(config), mu.clone(), PointConfig::new(host.clone(), image)?)?;
    let summary = distortion_summary(&map, p, omega)?;
    Ok(SelfEmbedding {
        map,
        summary,
        center,
        normalizer,
        holder_bound,
        degenerate,
    })
}

/// Isometric map of `m` into ℓ∞^n through distance profiles.
pub fn frechet_map(m: &FiniteMetricSpace, mu: &ProbabilityWeights) -> Result<EmbeddingMap> {
    EmbeddingMap::new(m.clone(), mu.clone(), frechet_embed(m))
}

/// `ω^{−max(1, 1/(qω))}·(D + qω/(p·ln(e + qω/(pD))))^{max(p/q, ω)}`: the
/// closed-form distortion of the transferred snowflake with unit constants.
pub fn transfer_advisory(d: f64, p: f64, q: f64, omega: f64) -> f64 {
    let qw = q * omega;
    let base = d + qw / (p * (E + qw / (p * d)).ln());
    base.powf((p / q).max(omega)) / omega.powf(1f64.max(1.0 / qw))
}

/// Output of [`transfer_snowflake`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Transfer {
    /// ω-Hölder map of the original domain.
    pub map: EmbeddingMap,
    /// Measured `q`-average distortion of the ω-snowflake.
    pub summary: DistortionSummary,
    pub beta: f64,
    pub input_distortion: f64,
    pub first_step: ExponentChange,
    pub self_embedding_normalizer: Option<f64>,
    pub self_embedding_holder: f64,
    pub last_step: ExponentChange,
    pub advisory: f64,
    pub envelope: f64,
}

/// From a `p`-average distortion embedding of `M` to a `q`-average distortion
/// embedding of the ω-snowflake of `M` into the same kind of host:
/// change the exponent to `β = max(qω, 1)`, compose with the self-embedding
/// for exponent `β/ω`, then lower the exponent from `β/ω` to `q`.
pub fn transfer_snowflake(initial: &EmbeddingMap, p: f64, q: f64, omega: f64) -> Result<Transfer> {
    if !(omega > 0.0 && omega <= 1.0) {
        return Err(Error::param("omega", omega, "must lie in (0, 1]"));
    }
    for (name, v) in [("p", p), ("q", q)] {
        if !(v >= 1.0) || !v.is_finite() {
            return Err(Error::param(name, v, "exponent must be at least 1"));
        }
    }
    let input_distortion = distortion_summary(initial, p, 1.0)?.certified_avg_distortion;
    let beta = (q * omega).max(1.0);
    let first_step = if beta >= p {
        raise_exponent(initial, p, beta)?
    } else {
        lower_exponent(initial, p, beta)?
    };
    // qω/ω can round below q.
    let lifted = (beta / omega).max(q);
    let selfemb = snowflake_self_embed(first_step.map.image(), initial.weights(), lifted, omega)?;
    let snow = snowflake(initial.domain(), omega)?;
    let composite = selfemb.map.with_domain(snow);
    let last_step = lower_exponent(&composite, lifted, q)?;
    let map = EmbeddingMap::new(initial.domain().clone(), initial.weights().clone(), last_step.map.image().clone())?;
    let summary = distortion_summary(&map, q, omega)?;
    Ok(Transfer {
        map,
        summary,
        beta,
        input_distortion,
        first_step,
        self_embedding_normalizer: selfemb.normalizer,
        self_embedding_holder: selfemb.summary.holder_constant,
        last_step,
        advisory: transfer_advisory(input_distortion, p, q, omega),
        envelope: TRANSFER_ENVELOPE,
    })
}
