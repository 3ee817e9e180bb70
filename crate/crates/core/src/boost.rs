//! Centered boosting of Rayleigh quotients across exponents.
//!
//! For weights `π`, points `x_i` and `ω ∈ (0, 1]`, a zero `x*` of
//! `F(x) = Σ π_i f_ω^{−1}(f_ω(x) − x_i)` yields centered vectors
//! `y_i = f_ω^{−1}(f_ω(x*) − x_i)` with `‖f_ω(y_i) − f_ω(y_j)‖ = ‖x_i − x_j‖`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gap::{rayleigh_ratio_config, RayleighReport};
use crate::linalg::{solve_dense, Matrix};
use crate::markov::StochasticKernel;
use crate::mazur::{f_omega, f_omega_inverse};
use crate::metric::{NormedHost, PointConfig, ProbabilityWeights};

/// Relative slack for the post-solve verifications.
pub const VERIFY_REL_TOL: f64 = 1e-6;
/// Initial damping of the plain step.
pub const INITIAL_DAMPING: f64 = 0.5;
/// Damping below which a start is abandoned.
pub const DAMPING_FLOOR: f64 = 1e-6;
/// Seeded random starts tried after the two deterministic ones.
pub const RANDOM_STARTS: usize = 4;

/// A zero of the centering map.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CenterSolution {
    /// `x*`
    pub center: Vec<f64>,
    /// `f_ω(x*)`
    pub image: Vec<f64>,
    /// `‖F(x*)‖` in host units.
    pub residual: f64,
    /// `max_i ‖x_i‖^{1/ω}`; the residual is compared against `tol · scale`.
    pub scale: f64,
    pub iterations: usize,
    /// `"barycenter"`, `"mean_image"` or `"random"`.
    pub start: String,
    pub starts_tried: usize,
}

struct CenterMap<'a> {
    host: &'a NormedHost,
    pi: &'a [f64],
    points: Vec<Vec<f64>>,
    omega: f64,
}

impl CenterMap<'_> {
    /// `G(z) = Σ π_i f_{1/ω}(z − x_i)`, i.e. `F` in the coordinates `z = f_ω(x)`.
    fn eval(&self, z: &[f64]) -> Vec<f64> {
        let mut acc = vec![0.0; z.len()];
        let mut diff = vec![0.0; z.len()];
        for (w, x) in self.pi.iter().zip(&self.points) {
            if *w == 0.0 {
                continue;
            }
            for ((d, a), b) in diff.iter_mut().zip(z).zip(x) {
                *d = a - b;
            }
            let v = f_omega_inverse(self.host, &diff, self.omega).expect("dimensions agree");
            for (s, t) in acc.iter_mut().zip(v) {
                *s += w * t;
            }
        }
        acc
    }

    fn norm(&self, v: &[f64]) -> f64 {
        self.host.norm_unchecked(v)
    }

    /// Newton direction from a central-difference Jacobian.
    fn newton_direction(&self, z: &[f64], g: &[f64]) -> Option<Vec<f64>> {
        let dim = z.len();
        let h = 1e-7 * self.norm(z).max(1.0);
        let mut jac = Matrix::zeros(dim, dim);
        let mut probe = z.to_vec();
        for c in 0..dim {
            probe[c] = z[c] + h;
            let plus = self.eval(&probe);
            probe[c] = z[c] - h;
            let minus = self.eval(&probe);
            probe[c] = z[c];
            for r in 0..dim {
                jac[(r, c)] = (plus[r] - minus[r]) / (2.0 * h);
            }
        }
        solve_dense(&jac, g).filter(|d| d.iter().all(|v| v.is_finite()))
    }
}

/// Finds a zero of the centering map by damped iteration in the coordinates
/// `z = f_ω(x)`, with Newton-preconditioned steps when they decrease `‖F‖`
/// and plain steps `z ← z − λ F` otherwise.
///
/// Starts, in order: the barycenter, the barycenter pushed through
/// `f_{1/ω}`, then seeded Gaussian points. The first start whose residual
/// drops below `tol · scale` wins. Each start gets `max_iter` iterations.
pub fn solve_center(
    pi: &ProbabilityWeights,
    x: &PointConfig,
    omega: f64,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<CenterSolution> {
    if !(omega > 0.0 && omega <= 1.0) {
        return Err(Error::param("omega", omega, "must lie in (0, 1]"));
    }
    if !(tol > 0.0) {
        return Err(Error::param("tol", tol, "tolerance must be positive"));
    }
    if pi.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: pi.len(),
        });
    }
    let host = x.host();
    let dim = host.dim();
    let size = x.points().iter().map(|p| host.norm_unchecked(p)).fold(0.0f64, f64::max);
    if size == 0.0 {
        return Ok(CenterSolution {
            center: vec![0.0; dim],
            image: vec![0.0; dim],
            residual: 0.0,
            scale: 0.0,
            iterations: 0,
            start: "barycenter".into(),
            starts_tried: 1,
        });
    }
    // F is positively homogeneous of degree 1/ω in (z, x), so solving with
    // unit-size points keeps the damping schedule scale-free.
    let map = CenterMap {
        host,
        pi: pi.as_slice(),
        points: x.points().iter().map(|p| p.iter().map(|v| v / size).collect()).collect(),
        omega,
    };
    let mut bary = vec![0.0; dim];
    for (w, p) in map.pi.iter().zip(&map.points) {
        for (b, v) in bary.iter_mut().zip(p) {
            *b += w * v;
        }
    }
    let mut starts: Vec<(Vec<f64>, &'static str)> = vec![
        (f_omega(host, &bary, omega)?, "barycenter"),
        (bary.clone(), "mean_image"),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_STARTS {
        starts.push(((0..dim).map(|_| StandardNormal.sample(&mut rng)).collect(), "random"));
    }
    let unit = size.powf(1.0 / omega);
    let mut best: Option<(f64, Vec<f64>, usize, &'static str)> = None;
    let mut tried = 0;
    let mut total_iterations = 0;
    for (z0, kind) in starts {
        tried += 1;
        let (z, residual, iterations) = iterate(&map, z0, tol, max_iter);
        total_iterations += iterations;
        let better = best.as_ref().is_none_or(|b| residual < b.0);
        if better {
            best = Some((residual, z, iterations, kind));
        }
        if residual <= tol {
            break;
        }
    }
    let (residual, z, iterations, kind) = best.expect("at least one start");
    if residual > tol {
        return Err(Error::SolverNonConvergence {
            residual: residual * unit,
            iterations: total_iterations,
            starts: tried,
        });
    }
    let image: Vec<f64> = z.iter().map(|v| v * size).collect();
    Ok(CenterSolution {
        center: f_omega_inverse(host, &image, omega)?,
        image,
        residual: residual * unit,
        scale: unit,
        iterations,
        start: kind.into(),
        starts_tried: tried,
    })
}

fn iterate(map: &CenterMap, mut z: Vec<f64>, tol: f64, max_iter: usize) -> (Vec<f64>, f64, usize) {
    let mut g = map.eval(&z);
    let mut r = map.norm(&g);
    let mut damping = INITIAL_DAMPING;
    for it in 0..max_iter {
        if r <= tol {
            return (z, r, it);
        }
        let mut moved = false;
        if let Some(d) = map.newton_direction(&z, &g) {
            let mut t = 1.0;
            while t >= 1.0 / 1024.0 {
                let cand: Vec<f64> = z.iter().zip(&d).map(|(a, b)| a - t * b).collect();
                let gc = map.eval(&cand);
                let rc = map.norm(&gc);
                if rc < r {
                    (z, g, r) = (cand, gc, rc);
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
        }
        while !moved && damping >= DAMPING_FLOOR {
            let cand: Vec<f64> = z.iter().zip(&g).map(|(a, b)| a - damping * b).collect();
            let gc = map.eval(&cand);
            let rc = map.norm(&gc);
            if rc < r {
                (z, g, r) = (cand, gc, rc);
                moved = true;
            } else {
                damping *= 0.5;
            }
        }
        if !moved {
            return (z, r, it);
        }
    }
    (z, r, max_iter)
}

/// Centered vectors and the checks they pass.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoostResult {
    pub p: f64,
    pub q: f64,
    pub omega: f64,
    pub solution: CenterSolution,
    pub y: PointConfig,
    /// `‖Σ π_i y_i‖`
    pub centering: f64,
    pub max_y_norm: f64,
    pub centered: bool,
    /// Smallest `‖Δy‖ / lower − 1` over pairs with a positive lower bound.
    pub lower_margin: f64,
    /// Smallest `upper / ‖Δy‖ − 1` over pairs with positive `‖Δy‖`.
    pub upper_margin: f64,
    pub sandwich_holds: bool,
}

impl BoostResult {
    pub fn verified(&self) -> bool {
        self.centered && self.sandwich_holds
    }
}

/// Solves for the center with `ω = p/q` and verifies centering and the
/// two-sided distance sandwich
/// `2^{1−q/p}‖Δx‖^{q/p} ≤ ‖Δy‖ ≤ (q/p)‖Δx‖((‖y_i‖^p+‖y_j‖^p)/2)^{1/p−1/q}`.
pub fn boost_config(
    pi: &ProbabilityWeights,
    x: &PointConfig,
    p: f64,
    q: f64,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<BoostResult> {
    if !(p >= 1.0) || !(q >= p) || !q.is_finite() {
        return Err(Error::param("q", q, "need 1 <= p <= q < ∞"));
    }
    let omega = p / q;
    let solution = solve_center(pi, x, omega, tol, max_iter, seed)?;
    let host = x.host();
    let ys: Vec<Vec<f64>> = x
        .points()
        .iter()
        .map(|xi| {
            let diff: Vec<f64> = solution.image.iter().zip(xi).map(|(a, b)| a - b).collect();
            f_omega_inverse(host, &diff, omega)
        })
        .collect::<Result<_>>()?;
    let y = PointConfig::new(host.clone(), ys)?;
    let mut sum = vec![0.0; host.dim()];
    for (w, yi) in pi.as_slice().iter().zip(y.points()) {
        for (s, v) in sum.iter_mut().zip(yi) {
            *s += w * v;
        }
    }
    let centering = host.norm_unchecked(&sum);
    let norms: Vec<f64> = y.points().iter().map(|v| host.norm_unchecked(v)).collect();
    let max_y_norm = norms.iter().copied().fold(0.0, f64::max);
    // Against the solver scale as well: when every y_i is at residual level
    // (a single point, say) a test relative to max‖y_i‖ alone is meaningless.
    let centered = centering <= VERIFY_REL_TOL * max_y_norm.max(solution.scale);
    let (mut lower_margin, mut upper_margin) = (f64::INFINITY, f64::INFINITY);
    let n = x.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = x.dist(i, j);
            let dy = y.dist(i, j);
            let lower = 2f64.powf(1.0 - q / p) * dx.powf(q / p);
            let upper = (q / p) * dx * ((norms[i].powf(p) + norms[j].powf(p)) / 2.0).powf(1.0 / p - 1.0 / q);
            if lower > 0.0 {
                lower_margin = lower_margin.min(dy / lower - 1.0);
            }
            if dy > 0.0 {
                upper_margin = upper_margin.min(upper / dy - 1.0);
            }
        }
    }
    let sandwich_holds = lower_margin >= -VERIFY_REL_TOL && upper_margin >= -VERIFY_REL_TOL;
    Ok(BoostResult {
        p,
        q,
        omega,
        solution,
        y,
        centering,
        max_y_norm,
        centered,
        lower_margin,
        upper_margin,
        sandwich_holds,
    })
}

/// Per-configuration form of the exponent-boost inequality.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub boost: BoostResult,
    pub source: RayleighReport,
    pub boosted: RayleighReport,
    /// `(p/2q)^p · R_q(x)^{p/q}`
    pub lhs: f64,
    /// `R_p(y)`
    pub rhs: f64,
    pub passed: bool,
}

/// Boosts `x` with the kernel's stationary weights and checks
/// `(p/2q)^p R_q(x)^{p/q} ≤ R_p(y)`.
pub fn extrapolation_witness_check(
    k: &StochasticKernel,
    x: &PointConfig,
    p: f64,
    q: f64,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<WitnessCheck> {
    let boost = boost_config(k.pi(), x, p, q, tol, max_iter, seed)?;
    let source = rayleigh_ratio_config(k, x, q)?;
    let boosted = rayleigh_ratio_config(k, &boost.y, p)?;
    let lhs = (p / (2.0 * q)).powf(p) * source.ratio.powf(p / q);
    let rhs = boosted.ratio;
    Ok(WitnessCheck {
        passed: lhs <= rhs * (1.0 + VERIFY_REL_TOL),
        boost,
        source,
        boosted,
        lhs,
        rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cycle;
    use crate::markov::{eigen_basis, graph_kernel};

    #[test]
    fn single_point_center() {
        let x = PointConfig::new(NormedHost::l2(2), vec![vec![1.0, 0.0]]).unwrap();
        let s = solve_center(&ProbabilityWeights::uniform(1).unwrap(), &x, 0.5, 1e-12, 100, 0).unwrap();
        assert!((s.center[0] - 1.0).abs() < 1e-12 && s.center[1].abs() < 1e-12);
    }

    #[test]
    fn antipodal_pair() {
        let v = [0.6, -1.2, 0.4];
        let x = PointConfig::new(NormedHost::l2(3), vec![v.to_vec(), v.iter().map(|t| -t).collect()]).unwrap();
        let pi = ProbabilityWeights::uniform(2).unwrap();
        let b = boost_config(&pi, &x, 1.0, 2.0, 1e-10, 1000, 0).unwrap();
        assert!(b.solution.center.iter().all(|c| c.abs() < 1e-12));
        let nv = NormedHost::l2(3).norm(&v).unwrap();
        assert!((b.y.dist(0, 1) - 2.0 * nv * nv).abs() < 1e-10);
        assert!(b.lower_margin.abs() < 1e-10);
        assert!(b.verified());
    }

    #[test]
    fn equal_exponents_translate() {
        let x = PointConfig::new(NormedHost::l2(1), vec![vec![0.0], vec![1.0], vec![5.0]]).unwrap();
        let pi = ProbabilityWeights::uniform(3).unwrap();
        let b = boost_config(&pi, &x, 2.0, 2.0, 1e-12, 100, 0).unwrap();
        assert!((b.solution.center[0] - 2.0).abs() < 1e-12);
        for i in 0..3 {
            assert!((b.y.point(i)[0] - (2.0 - x.point(i)[0])).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvector_witness_on_cycle() {
        let k = graph_kernel(&cycle(6).unwrap()).unwrap();
        let v = eigen_basis(&k).unwrap().vector(1);
        let x = PointConfig::new(NormedHost::l2(1), v.iter().map(|t| vec![*t]).collect()).unwrap();
        let w = extrapolation_witness_check(&k, &x, 1.0, 2.0, 1e-10, 10_000, 0).unwrap();
        assert!(w.passed && w.boost.verified());
    }

    #[test]
    fn constant_config_passes_trivially() {
        let k = graph_kernel(&cycle(4).unwrap()).unwrap();
        let x = PointConfig::new(NormedHost::l2(2), vec![vec![1.0, 1.0]; 4]).unwrap();
        let w = extrapolation_witness_check(&k, &x, 1.0, 3.0, 1e-10, 1000, 0).unwrap();
        assert_eq!((w.lhs, w.rhs), (0.0, 0.0));
        assert!(w.passed);
    }
}
