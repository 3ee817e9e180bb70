//! Reversible stochastic kernels, their spectra, lazy walks and powers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, MAX_VERTICES};
use crate::linalg::{symmetric_eigen, EigenMethod, Matrix};
use crate::metric::ProbabilityWeights;

/// Row-sum and detailed-balance tolerance for kernels read from input.
pub const KERNEL_TOL: f64 = 1e-12;

#[derive(Deserialize)]
struct RawKernel {
    a: Matrix,
    pi: ProbabilityWeights,
}

/// Row-stochastic matrix `A` that is reversible with respect to `π`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawKernel")]
pub struct StochasticKernel {
    a: Matrix,
    pi: ProbabilityWeights,
}

impl TryFrom<RawKernel> for StochasticKernel {
    type Error = Error;
    fn try_from(raw: RawKernel) -> Result<Self> {
        StochasticKernel::new(raw.a, raw.pi)
    }
}

impl StochasticKernel {
    pub fn new(a: Matrix, pi: ProbabilityWeights) -> Result<Self> {
        Self::with_tolerance(a, pi, KERNEL_TOL)
    }

    fn with_tolerance(a: Matrix, pi: ProbabilityWeights, tol: f64) -> Result<Self> {
        let n = a.rows();
        if !a.is_square() || n == 0 {
            return Err(Error::InvalidKernel(format!("matrix must be square, got {}x{}", n, a.cols())));
        }
        if n > MAX_VERTICES {
            return Err(Error::SizeCap {
                what: "kernel",
                size: n,
                cap: MAX_VERTICES,
            });
        }
        if pi.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: pi.len(),
            });
        }
        if let Some(i) = (0..n).find(|&i| pi[i] <= 0.0) {
            return Err(Error::InvalidKernel(format!(
                "pi[{i}] = 0; stationary weights must be positive"
            )));
        }
        for i in 0..n {
            let row = a.row(i);
            if row.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
                return Err(Error::InvalidKernel(format!("row {i} has a negative or non-finite entry")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > tol {
                return Err(Error::InvalidKernel(format!("row {i} sums to {sum}")));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let gap = (pi[i] * a[(i, j)] - pi[j] * a[(j, i)]).abs();
                if gap > tol {
                    return Err(Error::InvalidKernel(format!(
                        "not reversible: pi[{i}]a[{i}][{j}] - pi[{j}]a[{j}][{i}] = {gap:e}"
                    )));
                }
            }
        }
        Ok(StochasticKernel { a, pi })
    }

    /// Reversible kernel from a symmetric nonnegative weight matrix:
    /// `a_ij = w_ij / Σ_k w_ik` and `π_i ∝ Σ_k w_ik`.
    pub fn from_symmetric_weights(w: &Matrix) -> Result<Self> {
        let n = w.rows();
        if !w.is_square() {
            return Err(Error::InvalidKernel("weight matrix must be square".into()));
        }
        if w.max_abs_asymmetry() != 0.0 {
            return Err(Error::InvalidKernel("weight matrix must be symmetric".into()));
        }
        let mass: Vec<f64> = (0..n).map(|i| w.row(i).iter().sum()).collect();
        if let Some(i) = mass.iter().position(|m| !(*m > 0.0)) {
            return Err(Error::InvalidKernel(format!("vertex {i} has no positive weight")));
        }
        let a = Matrix::from_fn(n, n, |i, j| w[(i, j)] / mass[i]);
        StochasticKernel::new(a, ProbabilityWeights::normalized(&mass)?)
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn pi(&self) -> &ProbabilityWeights {
        &self.pi
    }

    /// `D^{1/2} A D^{-1/2}`, symmetrized exactly.
    pub fn symmetrization(&self) -> Matrix {
        let n = self.n();
        let root: Vec<f64> = self.pi.as_slice().iter().map(|p| p.sqrt()).collect();
        let mut s = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let forward = root[i] * self.a[(i, j)] / root[j];
                let backward = root[j] * self.a[(j, i)] / root[i];
                let v = 0.5 * (forward + backward);
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        s
    }
}

/// Normalized adjacency of a connected regular graph, uniform `π`.
pub fn graph_kernel(g: &Graph) -> Result<StochasticKernel> {
    let delta = g.regularity().ok_or_else(|| {
        Error::InvalidKernel(
            "graph is not regular; build the kernel with StochasticKernel::from_symmetric_weights".into(),
        )
    })?;
    if delta == 0 {
        return Err(Error::InvalidKernel("graph has no edges".into()));
    }
    if !g.is_connected() {
        return Err(Error::InvalidGraph("graph is disconnected".into()));
    }
    let n = g.n();
    let mut a = Matrix::zeros(n, n);
    let w = 1.0 / delta as f64;
    for &[i, j] in g.edges() {
        a[(i, j)] = w;
        a[(j, i)] = w;
    }
    StochasticKernel::new(a, ProbabilityWeights::uniform(n)?)
}

/// Eigenvalues of a reversible kernel, largest first.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub lambda2: f64,
    pub gap: f64,
    pub abs_gap: f64,
    pub residual: f64,
    pub method: EigenMethod,
}

pub fn spectrum(k: &StochasticKernel) -> Result<Spectrum> {
    let eig = symmetric_eigen(&k.symmetrization(), false)?;
    Ok(summarize(eig.values, eig.residual, eig.method))
}

fn summarize(eigenvalues: Vec<f64>, residual: f64, method: EigenMethod) -> Spectrum {
    let lambda2 = eigenvalues.get(1).copied().unwrap_or(1.0);
    let abs_second = eigenvalues.iter().skip(1).fold(0.0f64, |m, x| m.max(x.abs()));
    Spectrum {
        lambda2,
        gap: 1.0 - lambda2,
        abs_gap: if eigenvalues.len() > 1 { 1.0 - abs_second } else { 1.0 },
        eigenvalues,
        residual,
        method,
    }
}

/// Spectrum together with right eigenvectors of `A` (columns, π-orthonormal).
#[derive(Clone, Debug)]
pub struct EigenBasis {
    pub spectrum: Spectrum,
    pub vectors: Matrix,
}

impl EigenBasis {
    /// Right eigenvector of `A` for the eigenvalue at position `idx`.
    pub fn vector(&self, idx: usize) -> Vec<f64> {
        self.vectors.column(idx)
    }
}

pub fn eigen_basis(k: &StochasticKernel) -> Result<EigenBasis> {
    let eig = symmetric_eigen(&k.symmetrization(), true)?;
    let u = eig.vectors.expect("vectors requested");
    let n = k.n();
    let inv_root: Vec<f64> = k.pi().as_slice().iter().map(|p| 1.0 / p.sqrt()).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| inv_root[i] * u[(i, j)]);
    Ok(EigenBasis {
        spectrum: summarize(eig.values, eig.residual, eig.method),
        vectors,
    })
}

/// `½I + ½A`.
pub fn lazy(k: &StochasticKernel) -> StochasticKernel {
    let n = k.n();
    let a = Matrix::from_fn(n, n, |i, j| 0.5 * k.a[(i, j)] + if i == j { 0.5 } else { 0.0 });
    StochasticKernel { a, pi: k.pi.clone() }
}

/// `A^s` by repeated squaring.
pub fn power(k: &StochasticKernel, s: u32) -> Result<StochasticKernel> {
    if s == 0 {
        return Err(Error::param("s", s, "power must be at least 1"));
    }
    let mut result: Option<Matrix> = None;
    let mut base = k.a.clone();
    let mut e = s;
    loop {
        if e & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => r.matmul(&base)?,
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = base.matmul(&base)?;
    }
    let a = result.expect("s >= 1");
    StochasticKernel::with_tolerance(a, k.pi.clone(), f64::from(s) * KERNEL_TOL)
}
