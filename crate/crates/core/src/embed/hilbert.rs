use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::metric::{pow_nonneg, NormedHost, PointConfig};

/// Negative Gram eigenvalues down to `-PSD_REL_TOL · trace` count as rounding.
pub const PSD_REL_TOL: f64 = 1e-8;

/// Euclidean points whose distances are `d^{p/2}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HilbertRealization {
    pub config: PointConfig,
    pub min_eigenvalue: f64,
    pub trace: f64,
    /// Largest `|realized − target| / target` over pairs with positive target.
    pub max_relative_error: f64,
}

/// Classical scaling of the squared targets `d_ij^p`: double-center
/// `−½ d^p`, eigendecompose, and keep the positive spectrum.
///
/// For `1 ≤ p ≤ 2` and an ℓp host, `d^p` is of negative type, so the Gram
/// matrix is positive semidefinite up to rounding.
pub fn hilbert_realize_snowflake(config: &PointConfig, p: f64) -> Result<HilbertRealization> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::param("p", p, "Hilbert realization needs 1 <= p <= 2"));
    }
    let n = config.len();
    let sq = Matrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { pow_nonneg(config.dist(i, j), p) });
    let row_mean: Vec<f64> = (0..n).map(|i| sq.row(i).iter().sum::<f64>() / n as f64).collect();
    let total_mean = row_mean.iter().sum::<f64>() / n as f64;
    let gram = Matrix::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_mean[i] - row_mean[j] + total_mean));
    let trace: f64 = (0..n).map(|i| gram[(i, i)]).sum();
    let eig = symmetric_eigen(&gram, true)?;
    let min_eigenvalue = eig.values.last().copied().unwrap_or(0.0);
    if min_eigenvalue < -PSD_REL_TOL * trace.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NotPositiveSemidefinite { min_eigenvalue, trace });
    }
    let v = eig.vectors.expect("vectors requested");
    let keep: Vec<usize> = (0..n).filter(|&k| eig.values[k] > 0.0).collect();
    let dim = keep.len().max(1);
    let points: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = keep.iter().map(|&k| eig.values[k].sqrt() * v[(i, k)]).collect();
            row.resize(dim, 0.0);
            row
        })
        .collect();
    let realized = PointConfig::new(NormedHost::l2(dim), points)?;
    let mut max_relative_error = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let target = sq[(i, j)].sqrt();
            if target > 0.0 {
                max_relative_error = max_relative_error.max((realized.dist(i, j) - target).abs() / target);
            }
        }
    }
    Ok(HilbertRealization {
        config: realized,
        min_eigenvalue,
        trace,
        max_relative_error,
    })
}
