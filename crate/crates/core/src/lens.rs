//! Scale sweeps, the uncertainty floor and the optimal observation scale.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::matrix::{JacobianMatrix, ResidueMatrix};
use crate::quadrature::{spectral_summary, Evaluator, QuadConfig, QuadError};

/// Traces below this count as zero when classifying degenerate scales.
pub const ZERO_TRACE: f64 = 1e-24;

/// Relative width at which the golden-section search stops.
pub const GOLDEN_REL_TOL: f64 = 1e-4;

/// Absolute slack for η/𝒟 agreement between sweep points, on top of the
/// quadrature error estimates.
pub const SCALE_CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LensError {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("invalid scale grid: {0}")]
    InvalidGrid(String),
    #[error("residues or Jacobian drift by {deviation:e} between lambda={reference} and lambda={lambda}")]
    ScaleDependence { reference: f64, lambda: f64, deviation: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degeneracy {
    /// `Tr(𝒟*𝒟) = 0`: variance decreases monotonically in λ.
    ZeroJacobian,
    /// `Tr(η*η) = 0`: variance increases monotonically in λ.
    ZeroResidue,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OptimalScale {
    Finite(f64),
    Degenerate(Degeneracy),
}

impl OptimalScale {
    pub fn value(&self) -> Option<f64> {
        match self {
            OptimalScale::Finite(v) => Some(*v),
            OptimalScale::Degenerate(_) => None,
        }
    }
}

impl fmt::Display for OptimalScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptimalScale::Finite(v) => write!(f, "{v:.16e}"),
            OptimalScale::Degenerate(d) => write!(f, "Degenerate({d:?})"),
        }
    }
}

/// `λ* = (Tr(η*η) / Tr(𝒟*𝒟))^{1/4}`.
pub fn optimal_scale(eta: &ResidueMatrix, jacobian: &JacobianMatrix) -> OptimalScale {
    let (te, td) = (eta.gram_trace(), jacobian.gram_trace());
    if td <= ZERO_TRACE {
        OptimalScale::Degenerate(Degeneracy::ZeroJacobian)
    } else if te <= ZERO_TRACE {
        OptimalScale::Degenerate(Degeneracy::ZeroResidue)
    } else {
        OptimalScale::Finite((te / td).powf(0.25))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub variance: f64,
    pub variance_model: f64,
    /// `λ²V − Tr(η*η)`, nonnegative up to rounding.
    pub bound_gap: f64,
    pub est_error: f64,
    pub grid_n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmpiricalMinimum {
    pub lambda: f64,
    pub variance: f64,
    /// The sampled minimum sat at an end of the grid, so the true minimizer
    /// may lie outside it.
    pub at_boundary: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LensSweep {
    pub rows: Vec<SweepRow>,
    /// Residues and Jacobian taken at the smallest scale.
    pub eta: ResidueMatrix,
    pub jacobian: JacobianMatrix,
    pub lambda_star_closed: OptimalScale,
    pub lambda_star_empirical: Option<EmpiricalMinimum>,
}

/// `n` geometrically spaced scales from `min` to `max` inclusive.
pub fn geometric_grid(min: f64, max: f64, n: usize) -> Result<Vec<f64>, LensError> {
    if !(min > 0.0 && min < max && max.is_finite()) || n < 2 {
        return Err(LensError::InvalidGrid(format!("need 0 < min < max and at least 2 steps, got {min}, {max}, {n}")));
    }
    let ratio = (max / min).ln() / (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n).map(|i| min * (ratio * i as f64).exp()).collect();
    grid[n - 1] = max;
    Ok(grid)
}

fn check_grid(grid: &[f64]) -> Result<(), LensError> {
    if grid.is_empty() {
        return Err(LensError::InvalidGrid("empty".into()));
    }
    if grid.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
        return Err(LensError::InvalidGrid("scales must be positive and finite".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LensError::InvalidGrid("scales must be strictly increasing".into()));
    }
    Ok(())
}

/// Spectral summary at every scale of `grid`, plus both optimal-scale
/// estimates.
pub fn variance_sweep(f: &dyn Evaluator, grid: &[f64], cfg: &QuadConfig) -> Result<LensSweep, LensError> {
    check_grid(grid)?;
    let summaries = grid.iter().map(|&l| spectral_summary(f, l, cfg)).collect::<Result<Vec<_>, _>>()?;
    let first = &summaries[0];
    let magnitude = first.eta.iter().chain(first.jacobian.iter()).map(|z| z.norm()).fold(1.0, f64::max);
    for s in &summaries[1..] {
        let deviation = s.eta.max_abs_diff(&first.eta).max(s.jacobian.max_abs_diff(&first.jacobian));
        let allowed = SCALE_CONSISTENCY_TOL * magnitude + s.est_error + first.est_error;
        if deviation > allowed {
            return Err(LensError::ScaleDependence { reference: first.lambda, lambda: s.lambda, deviation });
        }
    }
    let te = first.eta.gram_trace();
    let rows = summaries
        .iter()
        .map(|s| SweepRow {
            lambda: s.lambda,
            variance: s.variance,
            variance_model: s.variance_model(),
            bound_gap: s.lambda * s.lambda * s.variance - te,
            est_error: s.est_error,
            grid_n: s.grid_n,
        })
        .collect();
    let mut sweep = LensSweep {
        rows,
        lambda_star_closed: optimal_scale(&first.eta, &first.jacobian),
        eta: first.eta.clone(),
        jacobian: first.jacobian.clone(),
        lambda_star_empirical: None,
    };
    if grid.len() >= 3 {
        sweep.lambda_star_empirical = Some(empirical_optimal_scale(f, &sweep, cfg)?);
    }
    Ok(sweep)
}

/// Golden-section refinement of the sampled variance minimum.
pub fn empirical_optimal_scale(f: &dyn Evaluator, sweep: &LensSweep, cfg: &QuadConfig) -> Result<EmpiricalMinimum, LensError> {
    let rows = &sweep.rows;
    if rows.len() < 3 {
        return Err(LensError::InvalidGrid("need at least 3 sweep points".into()));
    }
    let best = rows
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.variance.total_cmp(&b.1.variance))
        .map(|(i, _)| i)
        .expect("non-empty");
    let last = rows.len() - 1;
    let at_boundary = best == 0 || best == last;
    let lo_idx = best.saturating_sub(1).min(last - 1);
    let (mut a, mut b) = (rows[lo_idx].lambda, rows[(best + 1).min(last).max(lo_idx + 1)].lambda);

    let variance = |l: f64| spectral_summary(f, l, cfg).map(|s| s.variance);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (variance(c)?, variance(d)?);
    while b - a > GOLDEN_REL_TOL * 0.5 * (a + b) {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = variance(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = variance(d)?;
        }
    }
    let lambda = 0.5 * (a + b);
    Ok(EmpiricalMinimum { lambda, variance: variance(lambda)?, at_boundary })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectabilityReport {
    pub is_detectable: bool,
    /// Largest pairwise deviation of the expectation across probe scales.
    pub drift: f64,
    pub max_variance: f64,
    pub lambdas: Vec<f64>,
    pub expectations: Vec<Vec<Complex64>>,
}

/// Detectable iff the expectation drifts by at most `tol` across the probe
/// scales and every variance is finite.
pub fn detectability_check(f: &dyn Evaluator, probes: &[f64], tol: f64, cfg: &QuadConfig) -> Result<DetectabilityReport, LensError> {
    if probes.len() < 2 {
        return Err(LensError::InvalidGrid("need at least 2 probe scales".into()));
    }
    if probes.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
        return Err(LensError::InvalidGrid("scales must be positive and finite".into()));
    }
    let summaries = probes.iter().map(|&l| spectral_summary(f, l, cfg)).collect::<Result<Vec<_>, _>>()?;
    let mut drift = 0.0f64;
    for (i, a) in summaries.iter().enumerate() {
        for b in &summaries[i + 1..] {
            for (x, y) in a.core.iter().zip(&b.core) {
                drift = drift.max((x - y).norm());
            }
        }
    }
    let max_variance = summaries.iter().map(|s| s.variance).fold(0.0, f64::max);
    Ok(DetectabilityReport {
        is_detectable: drift <= tol && summaries.iter().all(|s| s.variance.is_finite()),
        drift,
        max_variance,
        lambdas: probes.to_vec(),
        expectations: summaries.into_iter().map(|s| s.core).collect(),
    })
}
