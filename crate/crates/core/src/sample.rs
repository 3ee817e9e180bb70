//! Seeded random instances shared by tests, benchmarks and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::linalg::Matrix;
use crate::markov::StochasticKernel;
use crate::metric::{NormedHost, PointConfig, ProbabilityWeights};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Reversible kernel from random symmetric weights. Roughly `density` of the
/// off-diagonal pairs are kept; a Hamiltonian cycle of positive weights
/// keeps it irreducible, and the diagonal gets laziness in `[0, 1)`.
pub fn random_kernel<R: Rng>(rng: &mut R, n: usize, density: f64) -> Result<StochasticKernel> {
    let mut w = Matrix::zeros(n, n);
    for i in 0..n {
        w[(i, i)] = rng.random::<f64>();
        for j in (i + 1)..n {
            let ring = j == i + 1 || (i == 0 && j == n - 1);
            if ring || rng.random::<f64>() < density {
                let v = 0.05 + rng.random::<f64>();
                w[(i, j)] = v;
                w[(j, i)] = v;
            }
        }
    }
    StochasticKernel::from_symmetric_weights(&w)
}

pub fn gaussian_vec<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn gaussian_config<R: Rng>(rng: &mut R, host: NormedHost, n: usize) -> Result<PointConfig> {
    let dim = host.dim();
    PointConfig::new(host, (0..n).map(|_| gaussian_vec(rng, dim)).collect())
}

/// Strictly positive weights, normalized.
pub fn random_weights<R: Rng>(rng: &mut R, n: usize) -> Result<ProbabilityWeights> {
    let mass: Vec<f64> = (0..n).map(|_| 0.05 + rng.random::<f64>()).collect();
    ProbabilityWeights::normalized(&mass)
}

/// One of ℓ1, ℓ2, ℓ∞ or ℓp with `p` in `(1, 4)`.
pub fn random_host<R: Rng>(rng: &mut R, dim: usize) -> NormedHost {
    match rng.random_range(0..4) {
        0 => NormedHost::l1(dim),
        1 => NormedHost::l2(dim),
        2 => NormedHost::linf(dim),
        _ => NormedHost::lp(1.0 + 3.0 * rng.random::<f64>(), dim).expect("p > 1"),
    }
}
