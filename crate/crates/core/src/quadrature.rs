//! Torus quadrature: expectations, inner products and Laurent coefficients of
//! black-box functions, computed by uniform sampling of the distinguished
//! torus `|w_j| = λ`.
//!
//! With `N` points per circle the trapezoidal rule integrates every monomial
//! `w^m` with `|m_j| < N` exactly, so the normalized torus integral of a
//! Laurent polynomial is recovered to rounding once the exponent range fits
//! in the grid. For functions analytic near the torus the error decays
//! geometrically in `N`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::expr::{EvalError, MeroExpr};
use crate::laurent::{variance_model, LaurentPoly};
use crate::matrix::{CMatrix, JacobianMatrix, ResidueMatrix};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_GRID: usize = 4096;
pub const DEFAULT_MAX_POINTS: usize = 1 << 22;
pub const DEFAULT_MAX_DIM: usize = 4;
pub const START_GRID: usize = 16;
/// Sample values above this modulus count as a pole on the torus.
pub const BLOWUP: f64 = 1e12;
/// Relative size of a forbidden Laurent coefficient (pole order ≥ 2, mixed
/// pole, or a pole off the origin) that marks a function as outside the class.
pub const CLASS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("pole on the torus |w| = {lambda} near {point:?}")]
    PoleOnTorus { lambda: f64, point: Vec<Complex64> },
    #[error("grid of {points} points exceeds the budget of {budget}")]
    GridTooLarge { points: f64, budget: usize },
    #[error("no convergence up to N = {last_n} (last refinement delta {delta:e})")]
    NonConvergent { last_n: usize, delta: f64 },
    #[error("coefficient index {index:?} too large for N = {n} points per circle")]
    AliasingRisk { index: Vec<i32>, n: usize },
    #[error("function is outside the simple-pole class: coefficient at {exponents:?} has size {magnitude:e}")]
    NotInClass { exponents: Vec<i32>, magnitude: f64 },
    #[error("dimension {n} exceeds the cap of {cap}")]
    DimensionTooLarge { n: usize, cap: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Black-box `C^n → C^k` map. Implementations must be re-entrant and free of
/// side effects.
pub trait Evaluator: Sync {
    fn dim(&self) -> usize;
    fn codim(&self) -> usize;
    fn eval_into(&self, point: &[Complex64], out: &mut [Complex64]) -> Result<(), EvalError>;
}

impl Evaluator for MeroExpr {
    fn dim(&self) -> usize {
        self.n()
    }
    fn codim(&self) -> usize {
        self.k()
    }
    fn eval_into(&self, point: &[Complex64], out: &mut [Complex64]) -> Result<(), EvalError> {
        MeroExpr::eval_into(self, point, out)
    }
}

/// Wraps a closure as an [`Evaluator`].
pub struct FnEvaluator<F> {
    n: usize,
    k: usize,
    f: F,
}

impl<F> FnEvaluator<F>
where
    F: Fn(&[Complex64], &mut [Complex64]) -> Result<(), EvalError> + Sync,
{
    pub fn new(n: usize, k: usize, f: F) -> Self {
        Self { n, k, f }
    }
}

impl<F> Evaluator for FnEvaluator<F>
where
    F: Fn(&[Complex64], &mut [Complex64]) -> Result<(), EvalError> + Sync,
{
    fn dim(&self) -> usize {
        self.n
    }
    fn codim(&self) -> usize {
        self.k
    }
    fn eval_into(&self, point: &[Complex64], out: &mut [Complex64]) -> Result<(), EvalError> {
        (self.f)(point, out)
    }
}

/// Floating-point copy of a [`LaurentPoly`] for fast evaluation.
#[derive(Clone, Debug)]
pub struct NumericLaurent {
    n: usize,
    k: usize,
    terms: Vec<(Vec<i32>, Vec<Complex64>)>,
}

impl From<&LaurentPoly> for NumericLaurent {
    fn from(p: &LaurentPoly) -> Self {
        let terms = p
            .terms()
            .map(|(idx, c)| (idx.exponents().to_vec(), c.iter().map(|x| x.to_c64()).collect()))
            .collect();
        Self { n: p.n(), k: p.k(), terms }
    }
}

impl Evaluator for NumericLaurent {
    fn dim(&self) -> usize {
        self.n
    }
    fn codim(&self) -> usize {
        self.k
    }
    fn eval_into(&self, point: &[Complex64], out: &mut [Complex64]) -> Result<(), EvalError> {
        if self.terms.iter().any(|(e, _)| e.iter().zip(point).any(|(&x, z)| x < 0 && z.norm() < crate::expr::EPS_POLE)) {
            return Err(EvalError::DivisionNearZero {
                point: point.to_vec(),
                modulus: point.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min),
            });
        }
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for (e, c) in &self.terms {
            let m: Complex64 = e.iter().zip(point).map(|(&x, z)| z.powi(x)).product();
            for (o, ci) in out.iter_mut().zip(c) {
                *o += ci * m;
            }
        }
        Ok(())
    }
}

/// Limits and tolerances for the adaptive quadrature.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadConfig {
    pub tol: f64,
    pub start_n: usize,
    pub max_n: usize,
    pub max_points: usize,
    pub max_dim: usize,
    /// Reject spectra with poles of order ≥ 2 or mixed poles. Off for
    /// functions that are legitimately outside the decomposable class.
    pub enforce_class: bool,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            start_n: START_GRID,
            max_n: DEFAULT_MAX_GRID,
            max_points: DEFAULT_MAX_POINTS,
            max_dim: DEFAULT_MAX_DIM,
            enforce_class: true,
        }
    }
}

impl QuadConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// Samples of `f` on the `N^n` torus grid, row-major in the grid index with
/// the `k` components innermost.
#[derive(Clone, Debug)]
pub struct TorusGrid {
    n: usize,
    k: usize,
    lambda: f64,
    points_per_dim: usize,
    values: Vec<Complex64>,
}

fn roots(lambda: f64, big_n: usize) -> Vec<Complex64> {
    (0..big_n).map(|m| Complex64::from_polar(lambda, 2.0 * PI * m as f64 / big_n as f64)).collect()
}

fn grid_points(n: usize, big_n: usize) -> f64 {
    (big_n as f64).powi(n as i32)
}

/// Evaluates `f` on the `N^n` grid `w_j = λ exp(2πi m_j / N)`.
pub fn sample_torus(f: &dyn Evaluator, lambda: f64, big_n: usize, cfg: &QuadConfig) -> Result<TorusGrid, QuadError> {
    let n = f.dim();
    let k = f.codim();
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(QuadError::InvalidInput(format!("lambda must be positive, got {lambda}")));
    }
    if big_n < 4 {
        return Err(QuadError::InvalidInput(format!("need at least 4 points per circle, got {big_n}")));
    }
    if n == 0 || n > cfg.max_dim {
        return Err(QuadError::DimensionTooLarge { n, cap: cfg.max_dim });
    }
    let total = grid_points(n, big_n);
    if total > cfg.max_points as f64 {
        return Err(QuadError::GridTooLarge { points: total, budget: cfg.max_points });
    }
    let total = total as usize;
    let table = roots(lambda, big_n);
    let mut values = vec![Complex64::new(0.0, 0.0); total * k];
    let mut idx = vec![0usize; n];
    let mut point: Vec<Complex64> = vec![table[0]; n];
    for (flat, out) in values.chunks_mut(k).enumerate() {
        if flat > 0 {
            // advance the mixed-radix counter, last axis fastest
            for j in (0..n).rev() {
                idx[j] += 1;
                if idx[j] < big_n {
                    point[j] = table[idx[j]];
                    break;
                }
                idx[j] = 0;
                point[j] = table[0];
            }
        }
        f.eval_into(&point, out).map_err(|_| QuadError::PoleOnTorus { lambda, point: point.clone() })?;
        if out.iter().any(|v| !v.re.is_finite() || !v.im.is_finite() || v.norm() > BLOWUP) {
            return Err(QuadError::PoleOnTorus { lambda, point: point.clone() });
        }
    }
    Ok(TorusGrid { n, k, lambda, points_per_dim: big_n, values })
}

/// Dense table of torus-normalized coefficients `d_a = c_a λ^{|a|}`, indexed
/// like the grid with FFT wrap-around (index `m ≥ N/2` ↦ exponent `m − N`).
#[derive(Clone, Debug)]
pub struct Spectrum {
    n: usize,
    k: usize,
    big_n: usize,
    lambda: f64,
    data: Vec<Complex64>,
}

impl Spectrum {
    fn exponent(&self, m: usize) -> i32 {
        if m < self.big_n / 2 {
            m as i32
        } else {
            m as i32 - self.big_n as i32
        }
    }

    fn flat_index(&self, a: &[i32]) -> usize {
        a.iter().fold(0usize, |acc, &e| acc * self.big_n + e.rem_euclid(self.big_n as i32) as usize)
    }

    /// Laurent coefficient `c_a` (all components).
    pub fn coefficient(&self, a: &[i32]) -> Vec<Complex64> {
        let base = self.flat_index(a) * self.k;
        let scale = self.lambda.powi(-a.iter().sum::<i32>());
        self.data[base..base + self.k].iter().map(|d| d * scale).collect()
    }

    /// Exponent vectors and normalized coefficient vectors of every slot.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<i32>, &[Complex64])> + '_ {
        self.data.chunks(self.k).enumerate().map(move |(flat, d)| {
            let mut a = vec![0i32; self.n];
            let mut rest = flat;
            for j in (0..self.n).rev() {
                a[j] = self.exponent(rest % self.big_n);
                rest /= self.big_n;
            }
            (a, d)
        })
    }

    /// Largest forbidden coefficient, if it exceeds [`CLASS_TOL`] relative to
    /// the largest coefficient overall.
    pub fn class_violation(&self) -> Option<(Vec<i32>, f64)> {
        let scale = self.data.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let mut worst: Option<(Vec<i32>, f64)> = None;
        for (a, d) in self.entries() {
            let forbidden = a.iter().any(|&e| e < -1) || (a.contains(&-1) && a.iter().filter(|&&e| e != 0).count() > 1);
            if !forbidden {
                continue;
            }
            let mag = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if mag > CLASS_TOL * scale && worst.as_ref().is_none_or(|w| mag > w.1) {
                worst = Some((a, mag));
            }
        }
        worst
    }
}

impl TorusGrid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn points_per_dim(&self) -> usize {
        self.points_per_dim
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn len(&self) -> usize {
        self.values.len() / self.k
    }

    /// `c_a = λ^{-|a|} N^{-n} Σ_m f(m) exp(−2πi a·m/N)`, by direct summation.
    pub fn laurent_coefficient(&self, a: &[i32]) -> Result<Vec<Complex64>, QuadError> {
        if a.len() != self.n {
            return Err(QuadError::InvalidInput(format!("index has {} entries, grid has {}", a.len(), self.n)));
        }
        let limit = (self.points_per_dim / 2) as i32 - 1;
        if a.iter().any(|e| e.abs() > limit) {
            return Err(QuadError::AliasingRisk { index: a.to_vec(), n: self.points_per_dim });
        }
        let big_n = self.points_per_dim;
        // twiddles[j][m] = exp(-2πi a_j m / N)
        let twiddles: Vec<Vec<Complex64>> = a
            .iter()
            .map(|&e| (0..big_n).map(|m| Complex64::from_polar(1.0, -2.0 * PI * ((e as i64 * m as i64).rem_euclid(big_n as i64)) as f64 / big_n as f64)).collect())
            .collect();
        let mut acc = vec![Complex64::new(0.0, 0.0); self.k];
        let mut idx = vec![0usize; self.n];
        for (flat, vals) in self.values.chunks(self.k).enumerate() {
            if flat > 0 {
                for j in (0..self.n).rev() {
                    idx[j] += 1;
                    if idx[j] < big_n {
                        break;
                    }
                    idx[j] = 0;
                }
            }
            let tw: Complex64 = idx.iter().zip(&twiddles).map(|(&m, t)| t[m]).product();
            for (s, v) in acc.iter_mut().zip(vals) {
                *s += v * tw;
            }
        }
        let scale = self.lambda.powi(-a.iter().sum::<i32>()) / self.len() as f64;
        Ok(acc.into_iter().map(|s| s * scale).collect())
    }

    /// Full coefficient table via separable FFTs.
    pub fn spectrum(&self) -> Spectrum {
        let big_n = self.points_per_dim;
        let total = self.len();
        let mut planner = FftPlanner::<f64>::new();
        let fft: Arc<dyn rustfft::Fft<f64>> = planner.plan_fft_forward(big_n);
        let mut data = vec![Complex64::new(0.0, 0.0); self.values.len()];
        let mut line = vec![Complex64::new(0.0, 0.0); big_n];
        for alpha in 0..self.k {
            let mut buf: Vec<Complex64> = (0..total).map(|p| self.values[p * self.k + alpha]).collect();
            for axis in 0..self.n {
                let stride = big_n.pow((self.n - 1 - axis) as u32);
                for outer in 0..total / (big_n * stride) {
                    for inner in 0..stride {
                        let base = outer * big_n * stride + inner;
                        for (m, l) in line.iter_mut().enumerate() {
                            *l = buf[base + m * stride];
                        }
                        fft.process(&mut line);
                        for (m, l) in line.iter().enumerate() {
                            buf[base + m * stride] = *l;
                        }
                    }
                }
            }
            for (p, v) in buf.into_iter().enumerate() {
                data[p * self.k + alpha] = v / total as f64;
            }
        }
        Spectrum { n: self.n, k: self.k, big_n, lambda: self.lambda, data }
    }

    /// Grid mean of `Σ_α |f_α|²`, i.e. `⟨f, f⟩` under the exterior measure.
    pub fn mean_norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.len() as f64
    }
}

/// Core, residues, Jacobian and variance of `f` at one scale.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSummary {
    pub lambda: f64,
    pub core: Vec<Complex64>,
    pub eta: ResidueMatrix,
    pub jacobian: JacobianMatrix,
    pub variance: f64,
    pub tail_energy: f64,
    pub est_error: f64,
    pub grid_n: usize,
}

impl SpectralSummary {
    /// Model part `Tr(η*η)/λ² + λ²Tr(𝒟*𝒟)` of the variance.
    pub fn variance_model(&self) -> f64 {
        variance_model(&self.eta, &self.jacobian, self.lambda)
    }

    /// Lower bound `√Tr(η*η)/λ` on the standard deviation.
    pub fn sigma_bound(&self) -> f64 {
        self.eta.gram_trace().sqrt() / self.lambda
    }
}

struct Stats {
    core: Vec<Complex64>,
    eta: CMatrix,
    jacobian: CMatrix,
    variance: f64,
}

impl Stats {
    fn from_grid(grid: &TorusGrid, spectrum: &Spectrum) -> Self {
        let (n, k) = (grid.n, grid.k);
        let zero = vec![0i32; n];
        let core = spectrum.coefficient(&zero);
        let mut eta = CMatrix::zeros(k, n);
        let mut jacobian = CMatrix::zeros(k, n);
        for beta in 0..n {
            let mut a = zero.clone();
            a[beta] = -1;
            for (alpha, c) in spectrum.coefficient(&a).into_iter().enumerate() {
                eta.set(alpha, beta, c);
            }
            a[beta] = 1;
            for (alpha, c) in spectrum.coefficient(&a).into_iter().enumerate() {
                jacobian.set(alpha, beta, c);
            }
        }
        let core_sq: f64 = core.iter().map(|c| c.norm_sqr()).sum();
        let variance = (grid.mean_norm_sqr() - core_sq).max(0.0);
        Self { core, eta, jacobian, variance }
    }

    fn delta(&self, other: &Stats) -> f64 {
        let core = self.core.iter().zip(&other.core).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        core.max(self.eta.max_abs_diff(&other.eta))
            .max(self.jacobian.max_abs_diff(&other.jacobian))
            .max((self.variance - other.variance).abs())
    }

    fn scale(&self) -> f64 {
        self.variance.max(1.0)
    }
}

/// Refines `N` by doubling until two successive grids agree, then reports the
/// decomposition at the finer grid.
pub fn spectral_summary(f: &dyn Evaluator, lambda: f64, cfg: &QuadConfig) -> Result<SpectralSummary, QuadError> {
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(QuadError::InvalidInput("tolerance must be positive".into()));
    }
    let mut big_n = cfg.start_n.max(4);
    let mut prev: Option<(Stats, usize)> = None;
    let mut last_delta = f64::INFINITY;
    loop {
        let too_big = big_n > cfg.max_n || grid_points(f.dim(), big_n) > cfg.max_points as f64;
        if too_big {
            return Err(match prev {
                None => QuadError::GridTooLarge { points: grid_points(f.dim(), big_n), budget: cfg.max_points },
                Some((_, last_n)) => QuadError::NonConvergent { last_n, delta: last_delta },
            });
        }
        let grid = sample_torus(f, lambda, big_n, cfg)?;
        let spectrum = grid.spectrum();
        let stats = Stats::from_grid(&grid, &spectrum);
        if let Some((p, _)) = &prev {
            last_delta = stats.delta(p);
            if last_delta <= cfg.tol * stats.scale() {
                if cfg.enforce_class {
                    if let Some((exponents, magnitude)) = spectrum.class_violation() {
                        return Err(QuadError::NotInClass { exponents, magnitude });
                    }
                }
                let model = variance_model(&stats.eta, &stats.jacobian, lambda);
                return Ok(SpectralSummary {
                    lambda,
                    tail_energy: stats.variance - model,
                    core: stats.core,
                    eta: stats.eta,
                    jacobian: stats.jacobian,
                    variance: stats.variance,
                    est_error: last_delta,
                    grid_n: big_n,
                });
            }
        }
        prev = Some((stats, big_n));
        big_n *= 2;
    }
}

/// `⟨f, g⟩ = ∫ f* g dμ`, with the same doubling refinement.
pub fn inner_product_numeric(f: &dyn Evaluator, g: &dyn Evaluator, lambda: f64, cfg: &QuadConfig) -> Result<Complex64, QuadError> {
    if f.dim() != g.dim() || f.codim() != g.codim() {
        return Err(QuadError::InvalidInput("operands differ in shape".into()));
    }
    let mut big_n = cfg.start_n.max(4);
    let mut prev: Option<(Complex64, usize)> = None;
    let mut last_delta = f64::INFINITY;
    loop {
        if big_n > cfg.max_n || grid_points(f.dim(), big_n) > cfg.max_points as f64 {
            return Err(match prev {
                None => QuadError::GridTooLarge { points: grid_points(f.dim(), big_n), budget: cfg.max_points },
                Some((_, last_n)) => QuadError::NonConvergent { last_n, delta: last_delta },
            });
        }
        let gf = sample_torus(f, lambda, big_n, cfg)?;
        let gg = sample_torus(g, lambda, big_n, cfg)?;
        let sum: Complex64 = gf.values.iter().zip(&gg.values).map(|(a, b)| a.conj() * b).sum();
        let value = sum / gf.len() as f64;
        if let Some((p, _)) = prev {
            last_delta = (value - p).norm();
            if last_delta <= cfg.tol * value.norm().max(1.0) {
                return Ok(value);
            }
        }
        prev = Some((value, big_n));
        big_n *= 2;
    }
}

/// Quadrature counterpart of [`crate::laurent::exterior_integral`]: the grid
/// mean of `F(w) ∏ w_γ^{s_γ+1}` with `F = f` or `conj(f)`.
pub fn exterior_integral_numeric(
    f: &dyn Evaluator,
    s: &[i32],
    conjugate: bool,
    lambda: f64,
    big_n: usize,
    cfg: &QuadConfig,
) -> Result<Vec<Complex64>, QuadError> {
    if s.len() != f.dim() {
        return Err(QuadError::InvalidInput("exponent vector has wrong length".into()));
    }
    let grid = sample_torus(f, lambda, big_n, cfg)?;
    let table = roots(lambda, big_n);
    let n = grid.n;
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.k];
    let mut idx = vec![0usize; n];
    for (flat, vals) in grid.values.chunks(grid.k).enumerate() {
        if flat > 0 {
            for j in (0..n).rev() {
                idx[j] += 1;
                if idx[j] < big_n {
                    break;
                }
                idx[j] = 0;
            }
        }
        let weight: Complex64 = idx.iter().zip(s).map(|(&m, &e)| table[m].powi(e + 1)).product();
        for (a, v) in acc.iter_mut().zip(vals) {
            *a += if conjugate { v.conj() } else { *v } * weight;
        }
    }
    let len = grid.len() as f64;
    Ok(acc.into_iter().map(|a| a / len).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn sample_examples() {
        let f = parse("1/w", 1).unwrap();
        let g = sample_torus(&f, 1.0, 8, &cfg()).unwrap();
        assert_eq!(g.values().len(), 8);
        assert!(g.values().iter().all(|v| (v.norm() - 1.0).abs() < 1e-15));

        let f = parse("1/(w1+w2)", 2).unwrap();
        assert!(matches!(sample_torus(&f, 1.0, 16, &cfg()), Err(QuadError::PoleOnTorus { .. })));

        let f = parse("1/(w-2)", 1).unwrap();
        assert!(sample_torus(&f, 1.0, 8, &cfg()).is_ok());
    }

    #[test]
    fn grid_guards() {
        let f = parse("w1*w2*w3*w4", 4).unwrap();
        assert!(matches!(sample_torus(&f, 1.0, 4096, &cfg()), Err(QuadError::GridTooLarge { .. })));
        assert!(matches!(sample_torus(&f, 1.0, 2, &cfg()), Err(QuadError::InvalidInput(_))));
        let f5 = parse("w1*w5", 5).unwrap();
        assert!(matches!(sample_torus(&f5, 1.0, 4, &cfg()), Err(QuadError::DimensionTooLarge { .. })));
    }

    #[test]
    fn coefficient_examples() {
        let f = parse("1/w", 1).unwrap();
        let g = sample_torus(&f, 0.3, 16, &cfg()).unwrap();
        assert!((g.laurent_coefficient(&[-1]).unwrap()[0] - 1.0).norm() < 1e-12);

        let f = parse("1/(w-2)", 1).unwrap();
        let g = sample_torus(&f, 1.0, 32, &cfg()).unwrap();
        assert!((g.laurent_coefficient(&[1]).unwrap()[0] + 0.25).norm() < 1e-10);

        let f = parse("w^3", 1).unwrap();
        let g = sample_torus(&f, 1.0, 8, &cfg()).unwrap();
        assert!((g.laurent_coefficient(&[3]).unwrap()[0] - 1.0).norm() < 1e-12);
        assert!(matches!(g.laurent_coefficient(&[4]), Err(QuadError::AliasingRisk { .. })));
    }

    #[test]
    fn spectrum_matches_direct_sum() {
        let f = parse("2/w1 + 3*w2 - w1*w2^2 + (1+i)", 2).unwrap();
        let g = sample_torus(&f, 0.7, 16, &cfg()).unwrap();
        let spectrum = g.spectrum();
        for a in [[0, 0], [-1, 0], [0, 1], [1, 2], [3, -2]] {
            let direct = g.laurent_coefficient(&a).unwrap();
            let fast = spectrum.coefficient(&a);
            assert!((direct[0] - fast[0]).norm() < 1e-12, "{a:?}");
        }
    }

    #[test]
    fn summary_examples() {
        let f = parse("1/w + w", 1).unwrap();
        let s = spectral_summary(&f, 1.0, &cfg()).unwrap();
        assert!((s.variance - 2.0).abs() < 1e-10);
        assert!((s.eta.get(0, 0) - 1.0).norm() < 1e-10);
        assert!((s.jacobian.get(0, 0) - 1.0).norm() < 1e-10);
        assert!(s.tail_energy.abs() < 1e-10);

        let f = parse("1/w", 1).unwrap();
        let s = spectral_summary(&f, 0.5, &cfg()).unwrap();
        assert!((s.variance - 4.0).abs() < 1e-10);

        let f = parse("1/(w-2)", 1).unwrap();
        let s = spectral_summary(&f, 1.0, &cfg()).unwrap();
        assert!(s.eta.get(0, 0).norm() < 1e-10);
        assert!((s.core[0] + 0.5).norm() < 1e-10);
    }

    #[test]
    fn summary_rejects_out_of_class() {
        let f = parse("1/(w-0.4)", 1).unwrap();
        assert!(matches!(spectral_summary(&f, 0.5, &cfg()), Err(QuadError::NotInClass { .. })));
        let f = parse("w2/w1", 2).unwrap();
        assert!(matches!(spectral_summary(&f, 1.0, &cfg()), Err(QuadError::NotInClass { .. })));
        let f = parse("1/w^2", 1).unwrap();
        assert!(matches!(spectral_summary(&f, 1.0, &cfg()), Err(QuadError::NotInClass { .. })));
    }

    #[test]
    fn summary_reports_non_convergence() {
        let f = parse("1/(w-1.0001)", 1).unwrap();
        let small = QuadConfig { max_n: 64, ..cfg() };
        assert!(matches!(spectral_summary(&f, 1.0, &small), Err(QuadError::NonConvergent { .. })));
    }

    #[test]
    fn inner_product_examples() {
        let zbar = FnEvaluator::new(1, 1, |p: &[Complex64], o: &mut [Complex64]| {
            o[0] = p[0].conj();
            Ok(())
        });
        let f = parse("1/w", 1).unwrap();
        let v = inner_product_numeric(&zbar, &f, 1.0, &cfg()).unwrap();
        assert!((v - 1.0).norm() < 1e-12);

        let w = parse("w", 1).unwrap();
        let v = inner_product_numeric(&w, &w, 2.0, &cfg()).unwrap();
        assert!((v - 4.0).norm() < 1e-12);

        let one = parse("1", 1).unwrap();
        let v = inner_product_numeric(&one, &one, 0.37, &cfg()).unwrap();
        assert!((v - 1.0).norm() < 1e-15);
    }

    #[test]
    fn exterior_integral_numeric_reads_coefficients() {
        let f = parse("w^2 + 3/w", 1).unwrap();
        let v = exterior_integral_numeric(&f, &[0], false, 0.5, 16, &cfg()).unwrap();
        assert!((v[0] - 3.0).norm() < 1e-12);
        let v = exterior_integral_numeric(&f, &[1], true, 2.0, 16, &cfg()).unwrap();
        assert!((v[0] - 16.0).norm() < 1e-12);
    }
}
