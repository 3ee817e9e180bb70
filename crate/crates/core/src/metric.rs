//! Finite metric spaces, ℓp-type hosts, probability weights, snowflakes and
//! the Fréchet embedding.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Relative slack in the triangle inequality, scaled by the largest distance.
pub const METRIC_REL_TOL: f64 = 1e-12;

/// An exponent in `[1, ∞]`. Serializes as a number or the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    pub fn from_value(p: f64) -> Self {
        if p.is_infinite() && p > 0.0 {
            Exponent::Infinity
        } else {
            Exponent::Finite(p)
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Ok(Exponent::Finite(p)),
            Raw::Text(t) if t == "inf" || t == "infinity" => Ok(Exponent::Infinity),
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", found \"{t}\""
            ))),
        }
    }
}

/// A finite-dimensional normed space built from ℓp sums.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormedHost {
    Lp {
        p: Exponent,
        dim: usize,
    },
    /// ℓp-sum of `copies` copies of `inner`.
    LpProduct {
        p: Exponent,
        copies: usize,
        inner: Box<NormedHost>,
    },
}

impl NormedHost {
    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        let host = NormedHost::Lp {
            p: Exponent::from_value(p),
            dim,
        };
        host.validate()?;
        Ok(host)
    }

    pub fn l1(dim: usize) -> Self {
        NormedHost::Lp {
            p: Exponent::Finite(1.0),
            dim,
        }
    }

    pub fn l2(dim: usize) -> Self {
        NormedHost::Lp {
            p: Exponent::Finite(2.0),
            dim,
        }
    }

    pub fn linf(dim: usize) -> Self {
        NormedHost::Lp {
            p: Exponent::Infinity,
            dim,
        }
    }

    pub fn product(p: f64, copies: usize, inner: NormedHost) -> Result<Self> {
        let host = NormedHost::LpProduct {
            p: Exponent::from_value(p),
            copies,
            inner: Box::new(inner),
        };
        host.validate()?;
        Ok(host)
    }

    pub fn validate(&self) -> Result<()> {
        let (p, count) = match self {
            NormedHost::Lp { p, dim } => (*p, *dim),
            NormedHost::LpProduct { p, copies, inner } => {
                inner.validate()?;
                (*p, *copies)
            }
        };
        if let Exponent::Finite(v) = p {
            if !(v >= 1.0) || !v.is_finite() {
                return Err(Error::param("p", v, "host exponent must lie in [1, ∞]"));
            }
        }
        if count == 0 {
            return Err(Error::param("dim", 0, "host must have at least one coordinate"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            NormedHost::Lp { dim, .. } => *dim,
            NormedHost::LpProduct { copies, inner, .. } => copies * inner.dim(),
        }
    }

    /// Outer exponent of the host.
    pub fn exponent(&self) -> Exponent {
        match self {
            NormedHost::Lp { p, .. } | NormedHost::LpProduct { p, .. } => *p,
        }
    }

    /// Exponent when the host is a plain ℓp space.
    pub fn plain_lp_exponent(&self) -> Option<f64> {
        match self {
            NormedHost::Lp { p, .. } => Some(p.value()),
            NormedHost::LpProduct { .. } => None,
        }
    }

    pub fn with_dim(&self, dim: usize) -> Result<NormedHost> {
        match self {
            NormedHost::Lp { p, .. } => Ok(NormedHost::Lp { p: *p, dim }),
            NormedHost::LpProduct { .. } => Err(Error::UnsupportedHost(
                "product hosts have a fixed dimension".into(),
            )),
        }
    }

    pub fn norm(&self, v: &[f64]) -> Result<f64> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(self.norm_unchecked(v))
    }

    /// Norm without the length check; callers guarantee `v.len() == dim`.
    pub fn norm_unchecked(&self, v: &[f64]) -> f64 {
        match self {
            NormedHost::Lp { p, .. } => lp_norm(v.iter().copied(), *p),
            NormedHost::LpProduct { p, inner, .. } => {
                let block = inner.dim();
                lp_norm(v.chunks(block).map(|c| inner.norm_unchecked(c)), *p)
            }
        }
    }

    pub fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.norm(&diff)
    }

    pub(crate) fn distance_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        if let NormedHost::Lp { p, .. } = self {
            return lp_norm(x.iter().zip(y).map(|(a, b)| a - b), *p);
        }
        let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.norm_unchecked(&diff)
    }
}

fn lp_norm(values: impl Iterator<Item = f64> + Clone, p: Exponent) -> f64 {
    let peak = values.clone().fold(0.0f64, |m, x| m.max(x.abs()));
    if peak == 0.0 {
        return 0.0;
    }
    match p {
        Exponent::Infinity => peak,
        Exponent::Finite(1.0) => values.map(f64::abs).sum(),
        Exponent::Finite(2.0) => peak * values.map(|x| (x / peak).powi(2)).sum::<f64>().sqrt(),
        Exponent::Finite(p) => peak * values.map(|x| (x.abs() / peak).powf(p)).sum::<f64>().powf(1.0 / p),
    }
}

/// Norm of `v` in `host`.
pub fn norm_eval(host: &NormedHost, v: &[f64]) -> Result<f64> {
    host.norm(v)
}

/// Probability vector on `n` labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbabilityWeights(Vec<f64>);

impl ProbabilityWeights {
    pub fn new(pi: Vec<f64>) -> Result<Self> {
        if pi.is_empty() {
            return Err(Error::InvalidWeights("no entries".into()));
        }
        if let Some(bad) = pi.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidWeights(format!("entry {bad} is not a finite nonnegative real")));
        }
        let total: f64 = pi.iter().sum();
        let tol = 1e-12f64.max(4.0 * pi.len() as f64 * f64::EPSILON);
        if (total - 1.0).abs() > tol {
            return Err(Error::InvalidWeights(format!("entries sum to {total}, not 1")));
        }
        Ok(ProbabilityWeights(pi))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidWeights("no entries".into()));
        }
        Ok(ProbabilityWeights(vec![1.0 / n as f64; n]))
    }

    /// Divides nonnegative masses by their total.
    pub fn normalized(mass: &[f64]) -> Result<Self> {
        let total: f64 = mass.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidWeights(format!("total mass {total} cannot be normalized")));
        }
        ProbabilityWeights::new(mass.iter().map(|m| m / total).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Indices with positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] > 0.0).collect()
    }
}

impl std::ops::Index<usize> for ProbabilityWeights {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for ProbabilityWeights {
    type Error = Error;
    fn try_from(pi: Vec<f64>) -> Result<Self> {
        ProbabilityWeights::new(pi)
    }
}

impl From<ProbabilityWeights> for Vec<f64> {
    fn from(w: ProbabilityWeights) -> Self {
        w.0
    }
}

#[derive(Deserialize)]
struct RawMetric {
    n: usize,
    d: Matrix,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

/// Distance matrix on `n` labelled points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMetric")]
pub struct FiniteMetricSpace {
    n: usize,
    d: Matrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl TryFrom<RawMetric> for FiniteMetricSpace {
    type Error = Error;
    fn try_from(raw: RawMetric) -> Result<Self> {
        if raw.d.rows() != raw.n {
            return Err(Error::DimensionMismatch {
                expected: raw.n,
                found: raw.d.rows(),
            });
        }
        let m = FiniteMetricSpace::new(raw.d)?;
        match raw.labels {
            Some(labels) => m.with_labels(labels),
            None => Ok(m),
        }
    }
}

impl FiniteMetricSpace {
    /// Validates with the default scale-relative tolerance.
    pub fn new(d: Matrix) -> Result<Self> {
        let m = FiniteMetricSpace::from_trusted(d)?;
        m.validate(METRIC_REL_TOL * m.max_distance())?;
        Ok(m)
    }

    /// Accepts a matrix that is a metric by construction (BFS, norms); only
    /// shape and finiteness are checked.
    pub(crate) fn from_trusted(d: Matrix) -> Result<Self> {
        if !d.is_square() || d.rows() == 0 {
            return Err(Error::InvalidMetric(format!(
                "distance matrix must be square and nonempty, got {}x{}",
                d.rows(),
                d.cols()
            )));
        }
        if d.as_slice().iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMetric("non-finite distance".into()));
        }
        Ok(FiniteMetricSpace {
            n: d.rows(),
            d,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Checks the metric axioms; the triangle inequality may be violated by
    /// at most `tol` in absolute terms.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let n = self.n;
        let d = &self.d;
        for i in 0..n {
            if d[(i, i)] != 0.0 {
                return Err(Error::InvalidMetric(format!("d[{i}][{i}] = {} is not zero", d[(i, i)])));
            }
            for j in 0..n {
                if d[(i, j)] < 0.0 {
                    return Err(Error::InvalidMetric(format!("d[{i}][{j}] is negative")));
                }
                if d[(i, j)] != d[(j, i)] {
                    return Err(Error::InvalidMetric(format!("d[{i}][{j}] != d[{j}][{i}]")));
                }
            }
        }
        for k in 0..n {
            let dk = d.row(k);
            for i in 0..n {
                let dik = dk[i];
                let di = d.row(i);
                for j in 0..n {
                    if di[j] > dik + dk[j] + tol {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails: d[{i}][{j}] > d[{i}][{k}] + d[{k}][{j}]"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.d[(i, j)]
    }

    pub fn matrix(&self) -> &Matrix {
        &self.d
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn max_distance(&self) -> f64 {
        self.d.as_slice().iter().fold(0.0f64, |m, x| m.max(*x))
    }
}

#[derive(Deserialize)]
struct RawConfig {
    host: NormedHost,
    points: Vec<Vec<f64>>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

/// Points `x_1, …, x_n` in a normed host.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig")]
pub struct PointConfig {
    host: NormedHost,
    points: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl TryFrom<RawConfig> for PointConfig {
    type Error = Error;
    fn try_from(raw: RawConfig) -> Result<Self> {
        let c = PointConfig::new(raw.host, raw.points)?;
        match raw.labels {
            Some(l) => c.with_labels(l),
            None => Ok(c),
        }
    }
}

impl PointConfig {
    pub fn new(host: NormedHost, points: Vec<Vec<f64>>) -> Result<Self> {
        host.validate()?;
        if points.is_empty() {
            return Err(Error::param("points", 0, "configuration needs at least one point"));
        }
        for p in &points {
            if p.len() != host.dim() {
                return Err(Error::DimensionMismatch {
                    expected: host.dim(),
                    found: p.len(),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::param("points", "non-finite", "coordinates must be finite"));
            }
        }
        Ok(PointConfig {
            host,
            points,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.points.len() {
            return Err(Error::DimensionMismatch {
                expected: self.points.len(),
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn host(&self) -> &NormedHost {
        &self.host
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.host.distance_unchecked(&self.points[i], &self.points[j])
    }
}

/// Pairwise host distances of a configuration.
pub fn distance_matrix(config: &PointConfig) -> FiniteMetricSpace {
    let n = config.len();
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = config.dist(i, j);
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    FiniteMetricSpace::from_trusted(d).expect("norm distances are finite")
}

/// Entrywise `d^ω`.
pub fn snowflake(m: &FiniteMetricSpace, omega: f64) -> Result<FiniteMetricSpace> {
    if !(omega > 0.0 && omega <= 1.0) {
        return Err(Error::param("omega", omega, "snowflake exponent must lie in (0, 1]"));
    }
    let n = m.n();
    let d = Matrix::from_fn(n, n, |i, j| if omega == 1.0 { m.d(i, j) } else { m.d(i, j).powf(omega) });
    let mut out = FiniteMetricSpace::from_trusted(d)?;
    out.labels = m.labels.clone();
    Ok(out)
}

/// Distance profiles `x_i ↦ (d(x_i, x_1), …, d(x_i, x_n))` in ℓ∞^n.
pub fn frechet_embed(m: &FiniteMetricSpace) -> PointConfig {
    PointConfig {
        host: NormedHost::linf(m.n()),
        points: m.matrix().to_rows(),
        labels: m.labels.clone(),
    }
}

/// Trapezoid rule for `((1/π)∫_0^{2π} ‖cos θ·x − sin θ·y‖² dθ)^{1/2}`.
pub fn complexification_norm(host: &NormedHost, x: &[f64], y: &[f64], nodes: usize) -> Result<f64> {
    if nodes < 8 {
        return Err(Error::param("nodes", nodes, "quadrature needs at least 8 nodes"));
    }
    for v in [x, y] {
        if v.len() != host.dim() {
            return Err(Error::DimensionMismatch {
                expected: host.dim(),
                found: v.len(),
            });
        }
    }
    let h = 2.0 * PI / nodes as f64;
    let mut buf = vec![0.0; x.len()];
    let mut acc = 0.0;
    for k in 0..nodes {
        let (s, c) = (k as f64 * h).sin_cos();
        for ((b, a), bb) in buf.iter_mut().zip(x).zip(y) {
            *b = c * a - s * bb;
        }
        acc += host.norm_unchecked(&buf).powi(2);
    }
    Ok((acc * h / PI).sqrt())
}

/// `Σ_{i,j} w_i w_j d_ij^s` over a distance callback.
pub(crate) fn weighted_pair_sum(w: &[f64], s: f64, dist: impl Fn(usize, usize) -> f64) -> f64 {
    let n = w.len();
    let mut total = 0.0;
    for i in 0..n {
        if w[i] == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for j in 0..n {
            if j != i && w[j] != 0.0 {
                row += w[j] * pow_nonneg(dist(i, j), s);
            }
        }
        total += w[i] * row;
    }
    total
}

/// `t^s` for `t ≥ 0` with the convention `0^s = 0` and fast paths.
pub(crate) fn pow_nonneg(t: f64, s: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else if s == 1.0 {
        t
    } else if s == 2.0 {
        t * t
    } else {
        t.powf(s)
    }
}
