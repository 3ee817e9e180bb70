//! Real-line embeddings through the Fréchet mean, and the two lemmas that
//! move an average-distortion bound between moment exponents.

use serde::{Deserialize, Serialize};
use std::f64::consts::E;

use super::{distortion_summary, DistortionSummary, EmbeddingMap};
use crate::error::{Error, Result};
use crate::metric::{pow_nonneg, weighted_pair_sum, FiniteMetricSpace, NormedHost, PointConfig, ProbabilityWeights};

/// Radius multiplier of the set kept when lowering the exponent.
pub const LOWER_TAU: f64 = 8.0;

/// Distances `‖j(x_i) − ∫j dμ‖_∞` of the Fréchet profiles from their mean.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LineProfile {
    pub radii: Vec<f64>,
    weights: Vec<f64>,
}

impl LineProfile {
    pub fn new(m: &FiniteMetricSpace, mu: &ProbabilityWeights) -> Result<Self> {
        let n = m.n();
        if mu.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: mu.len(),
            });
        }
        let w = mu.as_slice();
        let mut mean = vec![0.0; n];
        for (i, wi) in w.iter().enumerate() {
            for (acc, d) in mean.iter_mut().zip(m.matrix().row(i)) {
                *acc += wi * d;
            }
        }
        let radii = (0..n)
            .map(|i| {
                m.matrix()
                    .row(i)
                    .iter()
                    .zip(&mean)
                    .fold(0.0f64, |acc, (d, c)| acc.max((d - c).abs()))
            })
            .collect();
        Ok(LineProfile {
            radii,
            weights: w.to_vec(),
        })
    }

    /// `I_r = (Σ μ_i radius_i^r)^{1/r}`.
    pub fn moment(&self, r: f64) -> f64 {
        let s: f64 = self.radii.iter().zip(&self.weights).map(|(x, w)| w * pow_nonneg(*x, r)).sum();
        pow_nonneg(s, 1.0 / r)
    }

    /// Membership in `A_τ = {x : radius(x) ≤ τ·I_q}`.
    pub fn a_tau(&self, tau: f64, q: f64) -> Vec<bool> {
        let cut = tau * self.moment(q);
        self.radii.iter().map(|r| *r <= cut).collect()
    }

    /// `μ(M ∖ A_τ)`, at most `τ^{−q}` by Markov's inequality.
    pub fn tail_mass(&self, tau: f64, q: f64) -> f64 {
        self.a_tau(tau, q)
            .iter()
            .zip(&self.weights)
            .filter(|(inside, _)| !**inside)
            .map(|(_, w)| w)
            .sum()
    }
}

/// Output of [`line_embed`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LineEmbedding {
    pub map: EmbeddingMap,
    pub summary: DistortionSummary,
    /// Unscaled values `‖j(x) − ∫j dμ‖_∞`.
    pub raw: Vec<f64>,
    /// Largest `|raw_i − raw_j| / d_ij`; at most 1.
    pub raw_lipschitz: f64,
    pub scale: f64,
    pub degenerate: bool,
}

/// Maps each point to the ℓ∞ distance of its Fréchet profile from the
/// μ-mean profile, rescaled so the `q`-averages of image and domain agree.
pub fn line_embed(m: &FiniteMetricSpace, mu: &ProbabilityWeights, q: f64) -> Result<LineEmbedding> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::param("q", q, "exponent must be at least 1"));
    }
    let raw = LineProfile::new(m, mu)?.radii;
    let n = m.n();
    let mut raw_lipschitz = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let diff = (raw[i] - raw[j]).abs();
            if diff > 0.0 {
                raw_lipschitz = raw_lipschitz.max(diff / m.d(i, j));
            }
        }
    }
    let w = mu.as_slice();
    let domain_avg = weighted_pair_sum(w, q, |i, j| m.d(i, j));
    let image_avg = weighted_pair_sum(w, q, |i, j| (raw[i] - raw[j]).abs());
    let degenerate = image_avg == 0.0;
    let scale = if degenerate || domain_avg == 0.0 {
        1.0
    } else {
        (domain_avg / image_avg).powf(1.0 / q)
    };
    let image = PointConfig::new(NormedHost::l2(1), raw.iter().map(|v| vec![v * scale]).collect())?;
    let map = EmbeddingMap::new(m.clone(), mu.clone(), image)?;
    let summary = distortion_summary(&map, q, 1.0)?;
    Ok(LineEmbedding {
        map,
        summary,
        raw,
        raw_lipschitz,
        scale,
        degenerate,
    })
}

/// Result of moving an average-distortion embedding to another exponent.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExponentChange {
    pub map: EmbeddingMap,
    /// Measured at the target exponent.
    pub summary: DistortionSummary,
    pub from_exponent: f64,
    pub to_exponent: f64,
    /// Measured distortion of the input at the source exponent.
    pub input_distortion: f64,
    /// `"identity"`, `"rescaled"`, `"restricted"` or `"line"`.
    pub chosen: String,
    /// Target-exponent distortion of the (rescaled) input map.
    pub kept_distortion: f64,
    /// Target-exponent distortion of the line embedding, when it was tried.
    pub line_distortion: Option<f64>,
    pub delta: Option<f64>,
    pub tau: Option<f64>,
    /// The closed-form bound on the new distortion, for comparison only.
    pub advisory_bound: Option<f64>,
    pub line_bound: Option<f64>,
    pub kept_mass: Option<f64>,
    pub kept_is_support: Option<bool>,
    pub restricted_distortion: Option<f64>,
}

/// `Δ = D + q/(p·ln(e + q/(pD)))`.
pub fn advisory_raise_distortion(d: f64, p: f64, q: f64) -> f64 {
    d + q / (p * (E + q / (p * d)).ln())
}

fn check_exponents(p: f64, q: f64) -> Result<()> {
    for (name, v) in [("p", p), ("q", q)] {
        if !(v >= 1.0) || !v.is_finite() {
            return Err(Error::param(name, v, "exponent must be at least 1"));
        }
    }
    Ok(())
}

fn check_spread_support(f: &EmbeddingMap) -> Result<()> {
    if f.weights().support().len() < 2 {
        return Err(Error::param("weights", "single atom", "measure must charge at least two points"));
    }
    Ok(())
}

fn identity_change(f: &EmbeddingMap, p: f64) -> Result<ExponentChange> {
    let summary = distortion_summary(f, p, 1.0)?;
    Ok(ExponentChange {
        map: f.clone(),
        summary,
        from_exponent: p,
        to_exponent: p,
        input_distortion: summary.certified_avg_distortion,
        chosen: "identity".into(),
        kept_distortion: summary.certified_avg_distortion,
        line_distortion: None,
        delta: None,
        tau: None,
        advisory_bound: None,
        line_bound: None,
        kept_mass: None,
        kept_is_support: None,
        restricted_distortion: None,
    })
}

/// Raises the moment exponent from `p` to `q ≥ p`, keeping the better of the
/// rescaled input and the line embedding.
pub fn raise_exponent(f: &EmbeddingMap, p: f64, q: f64) -> Result<ExponentChange> {
    check_exponents(p, q)?;
    if q < p {
        return Err(Error::param("q", q, "raising needs q >= p"));
    }
    check_spread_support(f)?;
    if q == p {
        return identity_change(f, p);
    }
    let input = distortion_summary(f, p, 1.0)?.certified_avg_distortion;
    let profile = LineProfile::new(f.domain(), f.weights())?;
    let delta = profile.moment(p) / profile.moment(q);
    let rescaled = f.scaled(2.0 / delta);
    let rescaled_summary = distortion_summary(&rescaled, q, 1.0)?;
    let line = line_embed(f.domain(), f.weights(), q)?;
    let tau = (1.0 - (-q).exp()).powf(1.0 / (q - p)) * (1.0 / delta).powf(p / (q - p));
    let floor = (-q).exp().exp();
    let shrink = 1.0 - tau.powf(q - p) * delta.powf(p);
    let line_bound = (tau > floor && shrink > 0.0).then(|| 6.0 * tau / ((tau - floor) * shrink.powf(1.0 / q)));
    let use_line = line.summary.certified_avg_distortion < rescaled_summary.certified_avg_distortion;
    let (map, summary, chosen) = if use_line {
        (line.map, line.summary, "line")
    } else {
        (rescaled, rescaled_summary, "rescaled")
    };
    Ok(ExponentChange {
        map,
        summary,
        from_exponent: p,
        to_exponent: q,
        input_distortion: input,
        chosen: chosen.into(),
        kept_distortion: rescaled_summary.certified_avg_distortion,
        line_distortion: Some(line.summary.certified_avg_distortion),
        delta: Some(delta),
        tau: Some(tau),
        advisory_bound: input.is_finite().then(|| advisory_raise_distortion(input, p, q)),
        line_bound,
        kept_mass: None,
        kept_is_support: None,
        restricted_distortion: None,
    })
}

/// Lowers the moment exponent from `p` to `q ≤ p`.
///
/// The set `A_8` of points whose Fréchet profile lies within `8·I_q` of the
/// mean is where the input map is trusted; the proof either keeps the input
/// (rescaled by `(16D)^{p/q−1}`) or falls back to the line embedding, and
/// here both candidates are measured and the better one returned.
pub fn lower_exponent(f: &EmbeddingMap, p: f64, q: f64) -> Result<ExponentChange> {
    check_exponents(p, q)?;
    if q > p {
        return Err(Error::param("q", q, "lowering needs q <= p"));
    }
    check_spread_support(f)?;
    if q == p {
        return identity_change(f, p);
    }
    let input = distortion_summary(f, p, 1.0)?.certified_avg_distortion;
    let profile = LineProfile::new(f.domain(), f.weights())?;
    let inside = profile.a_tau(LOWER_TAU, q);
    let w = f.weights().as_slice();
    let kept_mass: f64 = inside.iter().zip(w).filter(|(k, _)| **k).map(|(_, w)| w).sum();
    if kept_mass <= 0.0 {
        return Err(Error::param("weights", "A_8 empty", "restriction set carries no mass"));
    }
    let kept_is_support = (0..w.len()).all(|i| w[i] == 0.0 || inside[i]);
    let restricted: Vec<f64> = w.iter().zip(&inside).map(|(w, k)| if *k { *w } else { 0.0 }).collect();
    let restricted_distortion = if restricted.iter().filter(|w| **w > 0.0).count() >= 2 {
        let mu = ProbabilityWeights::normalized(&restricted)?;
        let g = EmbeddingMap::new(f.domain().clone(), mu, f.image().clone())?;
        Some(distortion_summary(&g, q, 1.0)?.certified_avg_distortion)
    } else {
        None
    };
    let factor = if input.is_finite() && input > 0.0 {
        (16.0 * input).powf(p / q - 1.0)
    } else {
        1.0
    };
    let kept = f.scaled(factor);
    let kept_summary = distortion_summary(&kept, q, 1.0)?;
    let line = line_embed(f.domain(), f.weights(), q)?;
    let use_line = line.summary.certified_avg_distortion < kept_summary.certified_avg_distortion;
    let (map, summary, chosen) = if use_line {
        (line.map, line.summary, "line")
    } else {
        (kept, kept_summary, "restricted")
    };
    Ok(ExponentChange {
        map,
        summary,
        from_exponent: p,
        to_exponent: q,
        input_distortion: input,
        chosen: chosen.into(),
        kept_distortion: kept_summary.certified_avg_distortion,
        line_distortion: Some(line.summary.certified_avg_distortion),
        delta: None,
        tau: Some(LOWER_TAU),
        advisory_bound: None,
        line_bound: None,
        kept_mass: Some(kept_mass),
        kept_is_support: Some(kept_is_support),
        restricted_distortion,
    })
}
