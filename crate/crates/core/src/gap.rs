//! Nonlinear Rayleigh quotients, searches for large ones, Markov-type ratios
//! and the explicit-constant extrapolation inequalities.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::markov::{eigen_basis, power, spectrum, StochasticKernel};
use crate::metric::{pow_nonneg, FiniteMetricSpace, NormedHost, PointConfig};

/// `1 - λ2` below this counts as a disconnected kernel.
pub const DISCONNECTED_GAP: f64 = 1e-12;
/// Relative slack when comparing the two sides of an inequality.
pub const INEQUALITY_REL_TOL: f64 = 1e-12;

/// Coordinate-descent sweeps applied to every search start.
const REFINE_SWEEPS: usize = 40;

/// Both sums of a nonlinear Rayleigh quotient.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayleighReport {
    /// `Σ π_i π_j d_ij^p`
    pub numerator: f64,
    /// `Σ π_i a_ij d_ij^p`
    pub denominator: f64,
    /// Zero when the denominator vanishes.
    pub ratio: f64,
    pub p: f64,
}

impl RayleighReport {
    fn from_sums(numerator: f64, denominator: f64, p: f64) -> Self {
        RayleighReport {
            numerator,
            denominator,
            ratio: if denominator > 0.0 { numerator / denominator } else { 0.0 },
            p,
        }
    }
}

fn check_exponent(name: &'static str, p: f64) -> Result<()> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::param(name, p, "exponent must be positive and finite"));
    }
    Ok(())
}

fn check_size(k: &StochasticKernel, n: usize) -> Result<()> {
    if k.n() != n {
        return Err(Error::DimensionMismatch {
            expected: k.n(),
            found: n,
        });
    }
    Ok(())
}

/// Sums over an arbitrary `n × n` table of distances `d(x_i, y_j)`.
fn rayleigh_sums(k: &StochasticKernel, p: f64, dist: impl Fn(usize, usize) -> f64) -> RayleighReport {
    let n = k.n();
    let pi = k.pi().as_slice();
    let a = k.a();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        let (mut row_num, mut row_den) = (0.0, 0.0);
        for j in 0..n {
            let dp = pow_nonneg(dist(i, j), p);
            if dp == 0.0 {
                continue;
            }
            row_num += pi[j] * dp;
            row_den += a[(i, j)] * dp;
        }
        num += pi[i] * row_num;
        den += pi[i] * row_den;
    }
    RayleighReport::from_sums(num, den, p)
}

/// Ratio of the π⊗π-average of `d^p` to its edge average; a certified lower
/// bound on `γ(A, d^p)`.
pub fn rayleigh_ratio(k: &StochasticKernel, m: &FiniteMetricSpace, p: f64) -> Result<RayleighReport> {
    check_exponent("p", p)?;
    check_size(k, m.n())?;
    Ok(rayleigh_sums(k, p, |i, j| m.d(i, j)))
}

/// Same as [`rayleigh_ratio`] with distances taken in the configuration's host.
pub fn rayleigh_ratio_config(k: &StochasticKernel, x: &PointConfig, p: f64) -> Result<RayleighReport> {
    check_exponent("p", p)?;
    check_size(k, x.len())?;
    Ok(rayleigh_sums(k, p, |i, j| x.dist(i, j)))
}

/// `γ(A, ‖·‖²_{ℓ2}) = 1/(1 − λ2)`; infinite for disconnected kernels.
pub fn gamma_euclidean_exact(k: &StochasticKernel) -> Result<f64> {
    let gap = spectrum(k)?.gap;
    Ok(if gap <= DISCONNECTED_GAP { f64::INFINITY } else { 1.0 / gap })
}

/// Two-configuration quotient over the cross distances `cross[i][j] = d(x_i, y_j)`;
/// lower-bounds `γ⁺(A, d^p)`.
pub fn absolute_rayleigh(k: &StochasticKernel, cross: &Matrix, p: f64) -> Result<RayleighReport> {
    check_exponent("p", p)?;
    check_size(k, cross.rows())?;
    check_size(k, cross.cols())?;
    Ok(rayleigh_sums(k, p, |i, j| cross[(i, j)]))
}

pub fn absolute_rayleigh_configs(
    k: &StochasticKernel,
    x: &PointConfig,
    y: &PointConfig,
    p: f64,
) -> Result<RayleighReport> {
    if x.host() != y.host() {
        return Err(Error::UnsupportedHost("configurations live in different hosts".into()));
    }
    check_size(k, x.len())?;
    check_size(k, y.len())?;
    check_exponent("p", p)?;
    let host = x.host();
    Ok(rayleigh_sums(k, p, |i, j| host.distance_unchecked(x.point(i), y.point(j))))
}

/// Paired metric on `2n` labels: `x_i` is label `i`, `y_j` is label `n + j`.
pub fn absolute_rayleigh_paired(k: &StochasticKernel, paired: &FiniteMetricSpace, p: f64) -> Result<RayleighReport> {
    let n = k.n();
    if paired.n() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            found: paired.n(),
        });
    }
    check_exponent("p", p)?;
    Ok(rayleigh_sums(k, p, |i, j| paired.d(i, n + j)))
}

/// Best quotient found by a search, with its witness.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapSearch {
    pub best: RayleighReport,
    pub witness: PointConfig,
    /// `"eigenvector"` or `"random"`.
    pub source: String,
    pub starts: usize,
}

/// Incrementally maintained quotient for single-point moves.
struct Climber<'a> {
    k: &'a StochasticKernel,
    host: &'a NormedHost,
    p: f64,
    points: Vec<Vec<f64>>,
    dp: Matrix,
    num: f64,
    den: f64,
}

impl<'a> Climber<'a> {
    fn new(k: &'a StochasticKernel, host: &'a NormedHost, p: f64, points: Vec<Vec<f64>>) -> Self {
        let n = points.len();
        let dp = Matrix::from_fn(n, n, |i, j| pow_nonneg(host.distance_unchecked(&points[i], &points[j]), p));
        let r = rayleigh_sums(k, 1.0, |i, j| dp[(i, j)]);
        Climber {
            k,
            host,
            p,
            points,
            dp,
            num: r.numerator,
            den: r.denominator,
        }
    }

    fn ratio_of(num: f64, den: f64) -> f64 {
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }

    fn ratio(&self) -> f64 {
        Self::ratio_of(self.num, self.den)
    }

    /// Sums after moving point `i` to `cand`, plus the new row of `d^p`.
    fn trial(&self, i: usize, cand: &[f64]) -> (f64, f64, Vec<f64>) {
        let pi = self.k.pi().as_slice();
        let a = self.k.a();
        let n = self.points.len();
        let mut row = vec![0.0; n];
        let (mut dn, mut dd) = (0.0, 0.0);
        for j in 0..n {
            if j == i {
                continue;
            }
            let v = pow_nonneg(self.host.distance_unchecked(cand, &self.points[j]), self.p);
            row[j] = v;
            let delta = v - self.dp[(i, j)];
            dn += pi[j] * delta;
            dd += a[(i, j)] * delta;
        }
        (self.num + 2.0 * pi[i] * dn, self.den + 2.0 * pi[i] * dd, row)
    }

    fn accept(&mut self, i: usize, cand: Vec<f64>, num: f64, den: f64, row: Vec<f64>) {
        for (j, v) in row.into_iter().enumerate() {
            self.dp[(i, j)] = v;
            self.dp[(j, i)] = v;
        }
        self.points[i] = cand;
        self.num = num;
        self.den = den;
    }

    fn refine(&mut self, mut step: f64, sweeps: usize) {
        let n = self.points.len();
        let dim = self.host.dim();
        for _ in 0..sweeps {
            let mut improved = false;
            for i in 0..n {
                for c in 0..dim {
                    let mut best: Option<(Vec<f64>, f64, f64, Vec<f64>)> = None;
                    let mut best_ratio = self.ratio();
                    for sign in [1.0, -1.0] {
                        let mut cand = self.points[i].clone();
                        cand[c] += sign * step;
                        let (num, den, row) = self.trial(i, &cand);
                        let r = Self::ratio_of(num, den);
                        if r > best_ratio * (1.0 + 1e-14) {
                            best_ratio = r;
                            best = Some((cand, num, den, row));
                        }
                    }
                    if let Some((cand, num, den, row)) = best {
                        self.accept(i, cand, num, den, row);
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
    }

    /// Exact sums recomputed from scratch, so drift in the incremental
    /// bookkeeping never reaches a report.
    fn report(&self) -> RayleighReport {
        rayleigh_sums(self.k, self.p, |i, j| self.host.distance_unchecked(&self.points[i], &self.points[j]))
    }
}

/// Heuristic maximization of the quotient over configurations in `host`.
///
/// Starts from the second eigenvector replicated across coordinates, then
/// `budget` Gaussian configurations; every start is refined by coordinate
/// descent. Deterministic for a given seed.
pub fn gamma_lower_bound_search(
    k: &StochasticKernel,
    host: &NormedHost,
    p: f64,
    budget: usize,
    seed: u64,
) -> Result<GapSearch> {
    check_exponent("p", p)?;
    host.validate()?;
    if budget == 0 {
        return Err(Error::param("budget", budget, "search budget must be at least 1"));
    }
    let n = k.n();
    let dim = host.dim();
    let mut starts: Vec<(Vec<Vec<f64>>, &'static str)> = Vec::new();
    if n > 1 {
        let v = eigen_basis(k)?.vector(1);
        starts.push((v.iter().map(|&x| vec![x; dim]).collect(), "eigenvector"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..budget {
        let pts = (0..n)
            .map(|_| (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        starts.push((pts, "random"));
    }
    let mut best: Option<(RayleighReport, Vec<Vec<f64>>, &'static str)> = None;
    let total = starts.len();
    for (pts, source) in starts {
        let spread = pts
            .iter()
            .flat_map(|p: &Vec<f64>| p.iter())
            .fold(0.0f64, |m, x| m.max(x.abs()))
            .max(1e-3);
        let mut climber = Climber::new(k, host, p, pts);
        climber.refine(0.25 * spread, REFINE_SWEEPS);
        let report = climber.report();
        if best.as_ref().is_none_or(|(b, _, _)| report.ratio > b.ratio) {
            best = Some((report, climber.points, source));
        }
    }
    let (best, points, source) = best.expect("at least one start");
    Ok(GapSearch {
        best,
        witness: PointConfig::new(host.clone(), points)?,
        source: source.to_string(),
        starts: total,
    })
}

/// Sums behind the Markov-type ratio.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MarkovTypeReport {
    /// `Σ π_i (A^s)_ij d_ij^p`
    pub walk_sum: f64,
    /// `Σ π_i a_ij d_ij^p`
    pub edge_sum: f64,
    pub s: u32,
    pub p: f64,
    /// `(walk_sum / (s · edge_sum))^{1/p}`, zero when `edge_sum = 0`.
    pub ratio: f64,
}

/// Lower bound on the Markov type `p` constant from one kernel, metric and step count.
pub fn markov_type_ratio(k: &StochasticKernel, m: &FiniteMetricSpace, p: f64, s: u32) -> Result<MarkovTypeReport> {
    check_exponent("p", p)?;
    check_size(k, m.n())?;
    let ks = power(k, s)?;
    let edge = rayleigh_sums(k, p, |i, j| m.d(i, j)).denominator;
    let walk = rayleigh_sums(&ks, p, |i, j| m.d(i, j)).denominator;
    let ratio = if edge > 0.0 {
        (walk / (f64::from(s) * edge)).powf(1.0 / p)
    } else {
        0.0
    };
    Ok(MarkovTypeReport {
        walk_sum: walk,
        edge_sum: edge,
        s,
        p,
        ratio,
    })
}

/// Outcome of comparing the two sides of an extrapolation inequality.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ExtrapolationCheck {
    pub lhs: f64,
    /// Infinite (serialized as null) when the kernel is disconnected.
    pub rhs: f64,
    pub constant: f64,
    pub gap: f64,
    /// `rhs - lhs`
    pub slack: f64,
    pub passed: bool,
}

fn compare(lhs: f64, rhs: f64, constant: f64, gap: f64) -> ExtrapolationCheck {
    ExtrapolationCheck {
        lhs,
        rhs,
        constant,
        gap,
        slack: rhs - lhs,
        passed: lhs <= rhs * (1.0 + INEQUALITY_REL_TOL) || rhs.is_infinite(),
    }
}

/// `Σπ_iπ_j|s_i−s_j|^β ≤ (β/√(1−λ2))^β Σπ_i a_ij|s_i−s_j|^β` for `β ≥ 2`.
pub fn scalar_extrapolation_check(k: &StochasticKernel, s: &[f64], beta: f64) -> Result<ExtrapolationCheck> {
    if !(beta >= 2.0) || !beta.is_finite() {
        return Err(Error::param("beta", beta, "exponent must be at least 2"));
    }
    check_size(k, s.len())?;
    let gap = spectrum(k)?.gap;
    let r = rayleigh_sums(k, beta, |i, j| (s[i] - s[j]).abs());
    if gap <= DISCONNECTED_GAP {
        return Ok(compare(r.numerator, f64::INFINITY, f64::INFINITY, gap));
    }
    let constant = (beta / gap.sqrt()).powf(beta);
    Ok(compare(r.numerator, constant * r.denominator, constant, gap))
}

/// Which step of the mixed-exponent chain applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtrapolationBranch {
    /// `q ≥ p ≥ 2`: constant `2q/√gap`.
    UpFromLp,
    /// `1 ≤ p < 2`, `q ≥ p`: through the Hilbert realization of the
    /// `p/2`-snowflake, constant `(2q/(p√gap))^{2/p}`.
    UpThroughHilbert,
    /// `p ≥ max(q, 2)`: coordinate-wise, constant `p/√gap`.
    DownFromLp,
    /// `1 ≤ q ≤ p < 2`: coordinate-wise in the Hilbert realization,
    /// constant `(2/√gap)^{2/p}`.
    DownThroughHilbert,
}

impl ExtrapolationBranch {
    pub fn select(p: f64, q: f64) -> Self {
        match (p >= 2.0, q >= p) {
            (true, true) => ExtrapolationBranch::UpFromLp,
            (false, true) => ExtrapolationBranch::UpThroughHilbert,
            (true, false) => ExtrapolationBranch::DownFromLp,
            (false, false) => ExtrapolationBranch::DownThroughHilbert,
        }
    }

    /// Constant `C` in `(Σππ‖·‖^q)^{1/q} ≤ C (Σπa‖·‖^{max(p,q)})^{1/max(p,q)}`.
    pub fn constant(self, p: f64, q: f64, gap: f64) -> f64 {
        let root = gap.sqrt();
        match self {
            ExtrapolationBranch::UpFromLp => 2.0 * q / root,
            ExtrapolationBranch::UpThroughHilbert => (2.0 * q / (p * root)).powf(2.0 / p),
            ExtrapolationBranch::DownFromLp => p / root,
            ExtrapolationBranch::DownThroughHilbert => (2.0 / root).powf(2.0 / p),
        }
    }
}

/// Both sides of the mixed-exponent extrapolation inequality.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct VectorExtrapolationCheck {
    pub branch: ExtrapolationBranch,
    pub p: f64,
    pub q: f64,
    pub check: ExtrapolationCheck,
}

/// Checks `(Σπ_iπ_j‖x_i−x_j‖^q)^{1/q} ≤ C (Σπ_i a_ij‖x_i−x_j‖^r)^{1/r}`,
/// `r = max(p, q)`, for a configuration in ℓp with `1 ≤ p < ∞`.
pub fn vector_extrapolation_bound(k: &StochasticKernel, x: &PointConfig, q: f64) -> Result<VectorExtrapolationCheck> {
    let p = x
        .host()
        .plain_lp_exponent()
        .filter(|p| p.is_finite())
        .ok_or_else(|| Error::UnsupportedHost("extrapolation needs a plain ℓp host with finite p".into()))?;
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::param("q", q, "exponent must be at least 1"));
    }
    check_size(k, x.len())?;
    let gap = spectrum(k)?.gap;
    let branch = ExtrapolationBranch::select(p, q);
    let r = p.max(q);
    let lhs = pow_nonneg(rayleigh_sums(k, q, |i, j| x.dist(i, j)).numerator, 1.0 / q);
    let edge = pow_nonneg(rayleigh_sums(k, r, |i, j| x.dist(i, j)).denominator, 1.0 / r);
    let check = if gap <= DISCONNECTED_GAP {
        compare(lhs, f64::INFINITY, f64::INFINITY, gap)
    } else {
        let c = branch.constant(p, q, gap);
        compare(lhs, c * edge, c, gap)
    };
    Ok(VectorExtrapolationCheck { branch, p, q, check })
}
