//! Dimension and average-distortion lower bounds with explicit provenance.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::embed::EmbeddingMap;
use crate::error::{Error, Result};
use crate::gap::{rayleigh_ratio_config, ExtrapolationBranch};
use crate::graph::{bfs_metric, hypercube, Graph};
use crate::markov::{graph_kernel, lazy, power, spectrum, StochasticKernel};
use crate::metric::{pow_nonneg, weighted_pair_sum, NormedHost, PointConfig, ProbabilityWeights};

pub use crate::embed::{distortion_summary as avg_distortion, holder_constant, DistortionSummary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    DimLower,
    AvgDistortionLower,
}

/// How `bound` is obtained from the provenance table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundFormula {
    /// `exp(gap · ratio^{1/p} / (K p))`
    Dimension,
    /// `√gap · moment^{1/2}`, `moment = n^{-2} Σ d^{2ω}`
    SpectralQuadratic,
    /// `max(moment^{1/q} / c_direct, moment^{1/q} / (c_lazy · walk^{1/r}))`
    MixedExponent,
}

/// A lower bound together with every quantity needed to recompute it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub formula: BoundFormula,
    /// `E` for dimension bounds; the snowflake exponent ω otherwise.
    pub exponent: f64,
    pub parametric_constant: f64,
    pub bound: f64,
    pub provenance: BTreeMap<String, f64>,
    pub notes: BTreeMap<String, String>,
}

impl Certificate {
    fn get(&self, key: &str) -> Result<f64> {
        self.provenance
            .get(key)
            .copied()
            .ok_or_else(|| Error::param("provenance", key, "missing provenance entry"))
    }

    /// Recomputes `bound` from the provenance table alone.
    pub fn recompute_bound(&self) -> Result<f64> {
        match self.formula {
            BoundFormula::Dimension => {
                let (gap, ratio, p) = (self.get("gap")?, self.get("ratio")?, self.get("p")?);
                let e = gap * pow_nonneg(ratio, 1.0 / p);
                Ok((e / (self.parametric_constant * p)).exp())
            }
            BoundFormula::SpectralQuadratic => Ok(self.get("gap")?.sqrt() * self.get("moment")?.sqrt()),
            BoundFormula::MixedExponent => {
                let (q, r) = (self.get("q")?, self.get("r")?);
                let m = pow_nonneg(self.get("moment")?, 1.0 / q);
                let direct = m / self.get("c_direct")?;
                let walk = pow_nonneg(self.get("walk_moment")?, 1.0 / r);
                let through_walk = m / (self.get("c_lazy")? * walk);
                Ok(direct.max(through_walk))
            }
        }
    }

    /// Values for the columns `kind, n, gap, ratio, exponent, K, bound`.
    pub fn csv_row(&self) -> [String; 7] {
        let cell = |v: Option<f64>| v.map(fmt_cell).unwrap_or_default();
        let kind = match self.kind {
            CertificateKind::DimLower => "dim_lower",
            CertificateKind::AvgDistortionLower => "avg_distortion_lower",
        };
        [
            kind.to_string(),
            cell(self.provenance.get("n").copied()),
            cell(self.provenance.get("gap").copied()),
            cell(self.provenance.get("ratio").copied()),
            fmt_cell(self.exponent),
            fmt_cell(self.parametric_constant),
            fmt_cell(self.bound),
        ]
    }
}

pub const CSV_HEADER: [&str; 7] = ["kind", "n", "gap", "ratio", "exponent", "K", "bound"];

fn fmt_cell(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else if v > 0.0 {
        "inf".into()
    } else {
        "nan".into()
    }
}

fn table(entries: &[(&str, f64)]) -> BTreeMap<String, f64> {
    entries.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn notes(entries: &[(&str, &str)]) -> BTreeMap<String, String> {
    entries.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

/// Dimension lower bound `exp(E/(K p))` with `E = (1 − λ2) R_p^{1/p}`.
///
/// A configuration with zero edge energy is reported with ratio 0, which
/// gives the trivial bound 1.
pub fn dim_certificate(config: &PointConfig, kernel: &StochasticKernel, p: f64, k_const: f64) -> Result<Certificate> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::param("p", p, "exponent must be in [1, ∞)"));
    }
    if !(k_const > 0.0) || !k_const.is_finite() {
        return Err(Error::param("K", k_const, "constant must be positive"));
    }
    let spectral = spectrum(kernel)?;
    let report = rayleigh_ratio_config(kernel, config, p)?;
    let ratio = if report.denominator > 0.0 { report.ratio } else { 0.0 };
    let exponent = spectral.gap * pow_nonneg(ratio, 1.0 / p);
    let mut cert = Certificate {
        kind: CertificateKind::DimLower,
        formula: BoundFormula::Dimension,
        exponent,
        parametric_constant: k_const,
        bound: (exponent / (k_const * p)).exp(),
        provenance: table(&[
            ("n", config.len() as f64),
            ("gap", spectral.gap),
            ("lambda2", spectral.lambda2),
            ("numerator", report.numerator),
            ("denominator", report.denominator),
            ("ratio", ratio),
            ("p", p),
            ("K", k_const),
        ]),
        notes: notes(&[("host", &config.host().exponent().value().to_string())]),
    };
    if report.denominator == 0.0 {
        cert.notes.insert("degenerate".into(), "zero edge energy".into());
    }
    Ok(cert)
}

/// Which regularity of the embedding the spectral bound assumes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    /// `‖f(x)−f(y)‖ ≤ L d(x,y)^ω` on all pairs.
    #[default]
    Holder,
    /// Only the edge energy `E_edges ‖Δf‖² ≤ L²` is controlled.
    Sobolev,
}

struct GraphData {
    n: usize,
    metric: crate::metric::FiniteMetricSpace,
    kernel: StochasticKernel,
    gap: f64,
    lambda2: f64,
    diameter: u32,
}

fn graph_data(g: &Graph) -> Result<GraphData> {
    if !g.is_connected() {
        return Err(Error::InvalidGraph("graph is disconnected".into()));
    }
    let kernel = graph_kernel(g)?;
    let spectral = spectrum(&kernel)?;
    let (metric, diameter) = bfs_metric(g)?;
    Ok(GraphData {
        n: g.n(),
        metric,
        kernel,
        gap: spectral.gap,
        lambda2: spectral.lambda2,
        diameter,
    })
}

fn uniform_moment(data: &GraphData, s: f64) -> Result<f64> {
    let w = ProbabilityWeights::uniform(data.n)?;
    Ok(weighted_pair_sum(w.as_slice(), s, |i, j| data.metric.d(i, j)))
}

/// Lower bound `√(1−λ2) (n^{-2} Σ d^{2ω})^{1/2}` on the quadratic average
/// distortion of any embedding of the ω-snowflake of `g` into Hilbert space.
pub fn expander_avg_lower(g: &Graph, omega: f64, hypothesis: Hypothesis) -> Result<Certificate> {
    if !(omega > 0.0 && omega <= 1.0) {
        return Err(Error::param("omega", omega, "must lie in (0, 1]"));
    }
    let data = graph_data(g)?;
    let moment = uniform_moment(&data, 2.0 * omega)?;
    let bound = data.gap.sqrt() * moment.sqrt();
    let hyp = match hypothesis {
        Hypothesis::Holder => "holder",
        Hypothesis::Sobolev => "sobolev_edge_energy",
    };
    Ok(Certificate {
        kind: CertificateKind::AvgDistortionLower,
        formula: BoundFormula::SpectralQuadratic,
        exponent: omega,
        parametric_constant: 1.0,
        bound,
        provenance: table(&[
            ("n", data.n as f64),
            ("gap", data.gap),
            ("lambda2", data.lambda2),
            ("moment", moment),
            ("root_gap", data.gap.sqrt()),
            ("root_moment", moment.sqrt()),
            ("diameter", f64::from(data.diameter)),
            ("q", 2.0),
        ]),
        notes: notes(&[("hypothesis", hyp)]),
    })
}

/// Explicit-constant lower bound on the `q`-average distortion of the
/// ω-snowflake of `g` into ℓp, assembled from the mixed-exponent
/// extrapolation constants.
///
/// Two estimates are combined. The direct one uses the graph walk and
/// the Lipschitz condition on edges. The second uses the lazy walk raised to
/// `s = ⌈1/(1−λ2)⌉` and the exact walk moment `Σ π_i A^s_ij d_ij^{ωr}`,
/// `r = max(p, q)`, in place of the cruder `s^{ωr}`.
pub fn general_target_lower(g: &Graph, omega: f64, p: f64, q: f64) -> Result<Certificate> {
    if !(omega > 0.0 && omega <= 1.0) {
        return Err(Error::param("omega", omega, "must lie in (0, 1]"));
    }
    if !(p >= 1.0) || !p.is_finite() || !(q >= 1.0) || !q.is_finite() {
        return Err(Error::param("p", p, "need finite p, q >= 1"));
    }
    let data = graph_data(g)?;
    let r = p.max(q);
    let branch = ExtrapolationBranch::select(p, q);
    let moment = uniform_moment(&data, q * omega)?;
    let m = pow_nonneg(moment, 1.0 / q);
    let c_direct = branch.constant(p, q, data.gap);

    let s = (1.0 / data.gap).ceil().max(1.0);
    let s_int = u32::try_from(s as u64).map_err(|_| Error::param("gap", data.gap, "gap too small for the lazy power"))?;
    let walk = power(&lazy(&data.kernel), s_int)?;
    let lazy_gap = 1.0 - ((1.0 + data.lambda2) / 2.0).powi(s_int as i32);
    let c_lazy = branch.constant(p, q, lazy_gap);
    let mut walk_moment = 0.0;
    for (i, pi) in walk.pi().as_slice().iter().enumerate() {
        for (j, a) in walk.a().row(i).iter().enumerate() {
            if *a > 0.0 && i != j {
                walk_moment += pi * a * pow_nonneg(data.metric.d(i, j), omega * r);
            }
        }
    }
    let direct = m / c_direct;
    let through_walk = m / (c_lazy * pow_nonneg(walk_moment, 1.0 / r));
    let bound = direct.max(through_walk);
    let mut cert = Certificate {
        kind: CertificateKind::AvgDistortionLower,
        formula: BoundFormula::MixedExponent,
        exponent: omega,
        parametric_constant: 1.0,
        bound,
        provenance: table(&[
            ("n", data.n as f64),
            ("gap", data.gap),
            ("lambda2", data.lambda2),
            ("p", p),
            ("q", q),
            ("r", r),
            ("moment", moment),
            ("c_direct", c_direct),
            ("direct", direct),
            ("s", s),
            ("lazy_gap", lazy_gap),
            ("c_lazy", c_lazy),
            ("walk_moment", walk_moment),
            ("chain_walk_moment", s.powf(omega * r)),
            ("through_walk", through_walk),
            ("diameter", f64::from(data.diameter)),
        ]),
        notes: notes(&[
            ("status", "advisory"),
            ("branch", branch_name(branch)),
        ]),
    };
    if p == 2.0 && q == 2.0 {
        // Against the spectral quadratic bound, the direct estimate loses
        // exactly the chain constant c_direct·√gap.
        cert.provenance.insert("chain_constant".into(), c_direct * data.gap.sqrt());
    }
    Ok(cert)
}

fn branch_name(b: ExtrapolationBranch) -> &'static str {
    match b {
        ExtrapolationBranch::UpFromLp => "up_from_lp",
        ExtrapolationBranch::UpThroughHilbert => "up_through_hilbert",
        ExtrapolationBranch::DownFromLp => "down_from_lp",
        ExtrapolationBranch::DownThroughHilbert => "down_through_hilbert",
    }
}

/// Both sides of the diagonal-versus-edge inequality on the cube.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnfloCheck {
    pub k: u32,
    /// `Σ_x ‖f(x) − f(x + 1⃗)‖²`
    pub diagonal: f64,
    /// `Σ_x Σ_i ‖f(x + e_i) − f(x)‖²`
    pub edges: f64,
    pub passed: bool,
}

/// Checks Enflo's inequality for a map from the Hamming cube (vertex `x`
/// is the bit vector of the index) into a Euclidean host.
pub fn enflo_cube_check(f: &EmbeddingMap) -> Result<EnfloCheck> {
    let n = f.n();
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidMetric(format!("{n} points is not a cube")));
    }
    let k = n.trailing_zeros();
    let d = f.domain();
    for x in 0..n {
        for y in 0..n {
            if d.d(x, y) != f64::from((x ^ y).count_ones()) {
                return Err(Error::InvalidMetric(format!(
                    "domain is not the Hamming metric at ({x}, {y})"
                )));
            }
        }
    }
    if f.image().host().plain_lp_exponent() != Some(2.0) {
        return Err(Error::UnsupportedHost("the cube check needs an ℓ2 image".into()));
    }
    let img = f.image();
    // Squared Euclidean distance without the square root round trip.
    let sq = |a: usize, b: usize| -> f64 {
        img.point(a).iter().zip(img.point(b)).map(|(u, v)| (u - v) * (u - v)).sum()
    };
    let all = n - 1;
    let diagonal: f64 = (0..n).map(|x| sq(x, x ^ all)).sum();
    let edges: f64 = (0..n).map(|x| (0..k).map(|i| sq(x, x ^ (1 << i))).sum::<f64>()).sum();
    Ok(EnfloCheck {
        k,
        diagonal,
        edges,
        passed: diagonal <= edges * (1.0 + 1e-12),
    })
}

/// Identity map of the Hamming cube `{0,1}^k` into ℓ2^k with uniform weights;
/// it turns Enflo's inequality into the equality `k·2^k = k·2^k`.
pub fn hypercube_identity(k: u32) -> Result<EmbeddingMap> {
    let (domain, _) = bfs_metric(&hypercube(k)?)?;
    let n = domain.n();
    let points = (0..n)
        .map(|x| (0..k).map(|i| f64::from(((x >> i) & 1) as u8)).collect())
        .collect();
    let image = PointConfig::new(NormedHost::l2(k as usize), points)?;
    EmbeddingMap::new(domain, ProbabilityWeights::uniform(n)?, image)
}

/// Certified `(k/2)^ε` lower bound for the `(½+ε)`-snowflake of the cube,
/// evaluated with exact distance moments (so the bound is at least the
/// Jensen floor recorded in the provenance).
pub fn enflo_lower(k: u32, epsilon: f64) -> Result<Certificate> {
    if !(0.0..=0.5).contains(&epsilon) {
        return Err(Error::param("epsilon", epsilon, "must lie in [0, 1/2]"));
    }
    let mut cert = expander_avg_lower(&hypercube(k)?, 0.5 + epsilon, Hypothesis::Holder)?;
    let k = f64::from(k);
    cert.provenance.insert("jensen_floor".into(), (k / 2.0).powf(epsilon));
    cert.provenance.insert("sharp_advisory".into(), k.powf(epsilon));
    cert.provenance.insert("epsilon".into(), epsilon);
    cert.notes
        .insert("sharp_advisory".into(), "k^epsilon is recorded but not certified".into());
    Ok(cert)
}
