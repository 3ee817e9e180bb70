//! The fractional normalization map `f_ω(x) = x/‖x‖^{1−ω}` and its sharp
//! Hölder constants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::NormedHost;

/// Nodes of the coarse grid (in `u = σ^ω`) of the numeric η evaluation.
pub const ETA_GRID_NODES: usize = 1 << 12;
/// Bracket width at which golden-section refinement stops.
pub const ETA_SECTION_TOL: f64 = 1e-10;
/// Relative slack allowed on either side of the Hölder sandwich.
pub const SANDWICH_REL_TOL: f64 = 1e-10;

/// Validated `(p, ω)` with `p > 0` and `0 < ω < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnowflakeParams {
    pub p: f64,
    pub omega: f64,
}

impl SnowflakeParams {
    pub fn new(p: f64, omega: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::param("p", p, "exponent must be positive and finite"));
        }
        if !(omega > 0.0 && omega < 1.0) {
            return Err(Error::param("omega", omega, "must lie in (0, 1)"));
        }
        Ok(SnowflakeParams { p, omega })
    }

    pub fn eta(self) -> f64 {
        eta_unchecked(self.p, self.omega)
    }
}

/// `η(p, ω) = inf_{σ∈[0,1)} (1−σ^ω)/(1−σ) · (1+σ^{pω})^{(1−ω)/(pω)}`.
///
/// Closed form `ω·2^{(1−ω)/(pω)}` for `pω ≥ 1`, where the expression is
/// decreasing in σ. Everywhere else the infimum is computed numerically.
/// The value 1 is often right for `p ≤ 1`, but not always: at `p = 1`,
/// `ω > ½` the σ → 1 limit `ω·2^{(1−ω)/ω}` is already below 1.
pub fn eta(p: f64, omega: f64) -> Result<f64> {
    SnowflakeParams::new(p, omega).map(SnowflakeParams::eta)
}

fn eta_unchecked(p: f64, omega: f64) -> f64 {
    if p * omega >= 1.0 {
        omega * 2f64.powf((1.0 - omega) / (p * omega))
    } else {
        eta_minimize(p, omega)
    }
}

/// The σ-expression inside η; `σ = 1` is its limit `ω·2^{(1−ω)/(pω)}`.
pub fn eta_objective(p: f64, omega: f64, sigma: f64) -> f64 {
    let tail = (1.0 - omega) / (p * omega);
    if sigma >= 1.0 {
        return omega * 2f64.powf(tail);
    }
    if sigma <= 0.0 {
        return 1.0;
    }
    let ln = sigma.ln();
    let ratio = -(omega * ln).exp_m1() / (1.0 - sigma);
    ratio * (1.0 + (p * omega * ln).exp()).powf(tail)
}

/// Numeric η for any valid `(p, ω)`: grid scan then golden section.
pub fn eta_numeric(p: f64, omega: f64) -> Result<f64> {
    SnowflakeParams::new(p, omega)?;
    Ok(eta_minimize(p, omega))
}

/// The objective in `u = σ^ω`. For small ω the σ-minimizer can sit below
/// 1e-12, out of reach of any uniform σ-grid; in `u` it is well spread.
fn eta_objective_u(p: f64, omega: f64, u: f64) -> f64 {
    let tail = (1.0 - omega) / (p * omega);
    if u >= 1.0 {
        return omega * 2f64.powf(tail);
    }
    if u <= 0.0 {
        return 1.0;
    }
    let ln = u.ln();
    ln.exp_m1() / (ln / omega).exp_m1() * (1.0 + (p * ln).exp()).powf(tail)
}

fn eta_minimize(p: f64, omega: f64) -> f64 {
    let g = |u: f64| eta_objective_u(p, omega, u);
    let h = 1.0 / ETA_GRID_NODES as f64;
    let (mut best_k, mut best) = (0, g(0.0));
    for k in 1..=ETA_GRID_NODES {
        let v = g(k as f64 * h);
        if v < best {
            best = v;
            best_k = k;
        }
    }
    let lo = (best_k.saturating_sub(1)) as f64 * h;
    let hi = ((best_k + 1).min(ETA_GRID_NODES)) as f64 * h;
    best.min(golden_section_min(g, lo, hi, ETA_SECTION_TOL))
}

fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    f(a).min(f(b)).min(fc).min(fd)
}

/// Three-piece function whose maximum `2^{1−ω}` at `ρ = ½` is the sharp
/// upper Hölder constant of `f_ω`.
pub fn psi_omega(rho: f64, omega: f64) -> Result<f64> {
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(Error::param("rho", rho, "must be a finite nonnegative real"));
    }
    if !(omega > 0.0 && omega < 1.0) {
        return Err(Error::param("omega", omega, "must lie in (0, 1)"));
    }
    Ok(if rho <= 0.5 {
        (1.0 - rho).powf(omega) + rho.powf(omega)
    } else if rho <= 1.0 {
        rho.powf(omega - 1.0)
    } else {
        rho.powf(omega) - (rho - 1.0) / (1.0 + rho).powf(1.0 - omega)
    })
}

fn scale_by_norm_power(host: &NormedHost, x: &[f64], exponent: f64) -> Result<Vec<f64>> {
    let norm = host.norm(x)?;
    if norm == 0.0 {
        return Ok(vec![0.0; x.len()]);
    }
    let factor = norm.powf(exponent);
    Ok(x.iter().map(|v| v * factor).collect())
}

/// `x/‖x‖^{1−ω}`, with `f_ω(0) = 0`.
pub fn f_omega(host: &NormedHost, x: &[f64], omega: f64) -> Result<Vec<f64>> {
    check_map_exponent(omega)?;
    if omega == 1.0 {
        host.norm(x)?;
        return Ok(x.to_vec());
    }
    scale_by_norm_power(host, x, omega - 1.0)
}

/// `f_ω^{−1} = f_{1/ω}`: `z·‖z‖^{1/ω−1}`.
pub fn f_omega_inverse(host: &NormedHost, z: &[f64], omega: f64) -> Result<Vec<f64>> {
    check_map_exponent(omega)?;
    if omega == 1.0 {
        host.norm(z)?;
        return Ok(z.to_vec());
    }
    scale_by_norm_power(host, z, 1.0 / omega - 1.0)
}

fn check_map_exponent(omega: f64) -> Result<()> {
    if !(omega > 0.0 && omega <= 1.0) {
        return Err(Error::param("omega", omega, "must lie in (0, 1]"));
    }
    Ok(())
}

/// Both sides of the two-sided Hölder estimate for one pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichCheck {
    /// `η‖x−y‖/(‖x‖^{pω}+‖y‖^{pω})^{(1−ω)/(pω)}`
    pub lower: f64,
    /// `‖f_ω(x)−f_ω(y)‖`
    pub middle: f64,
    /// `2^{1−ω}‖x−y‖^ω`
    pub upper: f64,
    pub lower_slack: f64,
    pub upper_slack: f64,
    pub passed: bool,
}

pub fn holder_sandwich_check(host: &NormedHost, x: &[f64], y: &[f64], p: f64, omega: f64) -> Result<SandwichCheck> {
    let params = SnowflakeParams::new(p, omega)?;
    sandwich_with_eta(host, x, y, params, params.eta())
}

/// [`holder_sandwich_check`] with a precomputed `η(p, ω)`, for bulk use.
pub fn sandwich_with_eta(
    host: &NormedHost,
    x: &[f64],
    y: &[f64],
    params: SnowflakeParams,
    eta: f64,
) -> Result<SandwichCheck> {
    let SnowflakeParams { p, omega } = params;
    let fx = f_omega(host, x, omega)?;
    let fy = f_omega(host, y, omega)?;
    let middle = host.distance(&fx, &fy)?;
    let dist = host.distance(x, y)?;
    let (nx, ny) = (host.norm(x)?, host.norm(y)?);
    let pw = p * omega;
    let denom_base = nx.powf(pw) + ny.powf(pw);
    let lower = if denom_base == 0.0 {
        0.0
    } else {
        eta * dist / denom_base.powf((1.0 - omega) / pw)
    };
    let upper = 2f64.powf(1.0 - omega) * dist.powf(omega);
    let passed = lower <= middle * (1.0 + SANDWICH_REL_TOL) && middle <= upper * (1.0 + SANDWICH_REL_TOL);
    Ok(SandwichCheck {
        lower,
        middle,
        upper,
        lower_slack: middle - lower,
        upper_slack: upper - middle,
        passed,
    })
}
