//! Holomorphic coordinate changes fixing the origin, and numerical checks of
//! how residues and Jacobians transform under them.
//!
//! A morph `g` sends chart coordinates `w` to `u = g(w)`. A function `ψ′`
//! written in `u` pulls back to `ψ = ψ′ ∘ g`. With `J[γ][β] = ∂g_γ/∂w_β(0)`
//! and `H = (J⁻¹)ᵀ`, so that `H[γ][β] = ∂w_β/∂u_γ`, the expected laws are
//! `η = η′·H` and `𝒟 = 𝒟′·J`.

use num_complex::Complex64;
use thiserror::Error;

use crate::expr::{EvalError, MeroExpr, Node, EPS_POLE};
use crate::laurent::LaurentPoly;
use crate::matrix::CMatrix;
use crate::quadrature::{spectral_summary, FnEvaluator, QuadConfig, QuadError, SpectralSummary};

/// Scale used for transform checks unless one is given.
pub const DEFAULT_MORPH_LAMBDA: f64 = 0.25;

/// Default residual tolerance for [`verify_transform`].
pub const DEFAULT_TRANSFORM_TOL: f64 = 1e-8;

/// `|det J|` at or below this is singular.
pub const SINGULAR_DET: f64 = 1e-9;

/// Samples per circle for the one-dimensional zero check.
pub const TORUS_SAMPLES: usize = 4096;

/// Upper bound on `sup |h_γ|` over the poly-disc for `n ≥ 2`.
pub const DOMINANCE_BOUND: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MorphError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("scale must be positive, got {0}")]
    InvalidScale(f64),
    #[error("morph components must be polynomials: {0}")]
    NotPolynomial(String),
    #[error("component {component} does not fix the origin (g(0) = {value})")]
    NotFixingOrigin { component: usize, value: Complex64 },
    #[error("Jacobian at the origin is singular (|det| = {det:e})")]
    SingularJacobian { det: f64 },
    #[error("component {component} vanishes on the torus near {point:?}")]
    VanishesOnTorus { component: usize, point: Vec<Complex64> },
    #[error("g has {zeros} zeros inside the disc, expected 1")]
    ExtraZeros { zeros: i64 },
    #[error("component {component} is not diagonal-dominant on the poly-disc (bound {bound})")]
    NotDiagonalDominant { component: usize, bound: f64 },
    #[error(transparent)]
    Quad(#[from] QuadError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Morph {
    map: MeroExpr,
    poly: LaurentPoly,
    jacobian: CMatrix,
    inverse: CMatrix,
    lambda: f64,
}

impl Morph {
    /// Checks `g(0) = 0`, invertibility of `J` and that no `g_γ` vanishes on
    /// the λ-torus.
    pub fn validate(map: MeroExpr, lambda: f64) -> Result<Morph, MorphError> {
        let n = map.n();
        if map.k() != n {
            return Err(MorphError::DimensionMismatch { expected: n, found: map.k() });
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(MorphError::InvalidScale(lambda));
        }
        let poly = map.to_laurent().map_err(|e| MorphError::NotPolynomial(e.to_string()))?;
        if let Some((idx, _)) = poly.terms().find(|(idx, _)| idx.exponents().iter().any(|&e| e < 0)) {
            return Err(MorphError::NotPolynomial(format!("negative exponent {:?}", idx.exponents())));
        }
        for (component, c) in poly.coefficient(&vec![0; n]).iter().enumerate() {
            if !c.is_zero() {
                return Err(MorphError::NotFixingOrigin { component, value: c.to_c64() });
            }
        }
        let jacobian = CMatrix::from_fn(n, n, |gamma, beta| {
            let mut e = vec![0; n];
            e[beta] = 1;
            poly.coefficient(&e)[gamma].to_c64()
        });
        let det = jacobian.determinant().norm();
        if det <= SINGULAR_DET {
            return Err(MorphError::SingularJacobian { det });
        }
        let inverse = jacobian.inverse(0.0).ok_or(MorphError::SingularJacobian { det })?.transpose();
        let morph = Morph { map, poly, jacobian, inverse, lambda };
        if n == 1 {
            morph.check_winding()?;
        } else {
            morph.check_dominance()?;
        }
        Ok(morph)
    }

    pub fn identity(n: usize, lambda: f64) -> Result<Morph, MorphError> {
        let map = MeroExpr::from_components(n, (0..n).map(Node::Var).collect())
            .ok_or(MorphError::DimensionMismatch { expected: 1, found: n })?;
        Morph::validate(map, lambda)
    }

    /// `self ∘ inner`, validated at the scale of `inner`.
    pub fn compose(&self, inner: &Morph) -> Result<Morph, MorphError> {
        if self.n() != inner.n() {
            return Err(MorphError::DimensionMismatch { expected: self.n(), found: inner.n() });
        }
        let map = self.map.substitute(inner.n(), inner.map.components()).expect("matching arity");
        Morph::validate(map, inner.lambda)
    }

    /// Same components, revalidated at another scale.
    pub fn at_scale(&self, lambda: f64) -> Result<Morph, MorphError> {
        if lambda == self.lambda {
            Ok(self.clone())
        } else {
            Morph::validate(self.map.clone(), lambda)
        }
    }

    pub fn n(&self) -> usize {
        self.map.n()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn map(&self) -> &MeroExpr {
        &self.map
    }

    pub fn poly(&self) -> &LaurentPoly {
        &self.poly
    }

    /// `J[γ][β] = ∂g_γ/∂w_β` at 0.
    pub fn jacobian(&self) -> &CMatrix {
        &self.jacobian
    }

    /// `H[γ][β] = ∂w_β/∂u_γ` at 0.
    pub fn inverse_jacobian(&self) -> &CMatrix {
        &self.inverse
    }

    /// Argument principle on the circle: `g` must wind once around 0.
    fn check_winding(&self) -> Result<(), MorphError> {
        let mut values = Vec::with_capacity(TORUS_SAMPLES);
        for m in 0..TORUS_SAMPLES {
            let w = Complex64::from_polar(self.lambda, std::f64::consts::TAU * m as f64 / TORUS_SAMPLES as f64);
            let g = self.map.eval(&[w]).expect("polynomials have no poles")[0];
            if g.norm() < EPS_POLE {
                return Err(MorphError::VanishesOnTorus { component: 0, point: vec![w] });
            }
            values.push((w, g));
        }
        let mut total = 0.0;
        for i in 0..TORUS_SAMPLES {
            let (w, a) = values[i];
            let b = values[(i + 1) % TORUS_SAMPLES].1;
            let step = (b / a).arg();
            // A jump this large means a zero sits between two samples.
            if step.abs() > std::f64::consts::FRAC_PI_2 {
                return Err(MorphError::VanishesOnTorus { component: 0, point: vec![w] });
            }
            total += step;
        }
        let zeros = (total / std::f64::consts::TAU).round() as i64;
        if zeros != 1 {
            return Err(MorphError::ExtraZeros { zeros });
        }
        Ok(())
    }

    /// Certificate for `g_γ = J_γγ·w_γ·(1 + h_γ)`: the triangle-inequality
    /// bound on `sup |h_γ|` over the closed poly-disc must stay below 1/2,
    /// which keeps `g_γ` zero-free on the torus.
    fn check_dominance(&self) -> Result<(), MorphError> {
        let n = self.n();
        for gamma in 0..n {
            let diag = *self.jacobian.get(gamma, gamma);
            let mut bound = 0.0;
            for (idx, c) in self.poly.terms() {
                let e = idx.exponents();
                let c = c[gamma].to_c64();
                if c == Complex64::new(0.0, 0.0) {
                    continue;
                }
                if e[gamma] < 1 || diag.norm() == 0.0 {
                    return Err(MorphError::NotDiagonalDominant { component: gamma, bound: f64::INFINITY });
                }
                if idx.pure_linear() == Some(gamma) {
                    continue;
                }
                bound += (c / diag).norm() * self.lambda.powi(idx.total() as i32 - 1);
            }
            if bound >= DOMINANCE_BOUND {
                return Err(MorphError::NotDiagonalDominant { component: gamma, bound });
            }
        }
        Ok(())
    }
}

/// `ψ′ ∘ g` by substituting `g_γ(w)` for each `u_γ`.
pub fn pullback(psi: &MeroExpr, g: &Morph) -> Result<MeroExpr, MorphError> {
    if psi.n() != g.n() {
        return Err(MorphError::DimensionMismatch { expected: g.n(), found: psi.n() });
    }
    Ok(psi.substitute(g.n(), g.map.components()).expect("matching arity"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformReport {
    pub lambda: f64,
    pub tol: f64,
    pub eta_prime: CMatrix,
    pub jacobian_prime: CMatrix,
    pub eta_direct: CMatrix,
    pub eta_predicted: CMatrix,
    pub jacobian_direct: CMatrix,
    pub jacobian_predicted: CMatrix,
    pub eta_residual: f64,
    pub jacobian_residual: f64,
    /// Linear coefficients contributed by the pulled-back principal part
    /// `Σ_γ η′_γ / g_γ(w)`, which vanish only when `g` is linear.
    pub jacobian_shift: CMatrix,
    /// Residual of `𝒟` against `𝒟′·J + jacobian_shift`.
    pub jacobian_residual_corrected: f64,
}

impl TransformReport {
    pub fn eta_passed(&self) -> bool {
        self.eta_residual <= self.tol
    }

    pub fn jacobian_passed(&self) -> bool {
        self.jacobian_residual <= self.tol
    }

    pub fn passed(&self) -> bool {
        self.eta_passed() && self.jacobian_passed()
    }
}

/// Measures `η′, 𝒟′` of `psi` and `η, 𝒟` of its pullback, and compares the
/// latter with `η′·H` and `𝒟′·J`.
pub fn verify_transform(
    psi: &MeroExpr,
    g: &Morph,
    lambda: f64,
    tol: f64,
    cfg: &QuadConfig,
) -> Result<TransformReport, MorphError> {
    if psi.n() != g.n() {
        return Err(MorphError::DimensionMismatch { expected: g.n(), found: psi.n() });
    }
    let g = g.at_scale(lambda)?;
    let prime = spectral_summary(psi, lambda, cfg)?;
    let pulled = pullback(psi, &g)?;
    // Pullbacks of pole terms carry mixed and higher-order pole terms.
    let loose = QuadConfig { enforce_class: false, ..cfg.clone() };
    let direct = spectral_summary(&pulled, lambda, &loose)?;
    let shift = principal_shift(&prime, &g, lambda, &loose)?;

    let eta_predicted = prime.eta.matmul(g.inverse_jacobian());
    let jacobian_predicted = prime.jacobian.matmul(g.jacobian());
    Ok(TransformReport {
        lambda,
        tol,
        eta_residual: direct.eta.max_abs_diff(&eta_predicted),
        jacobian_residual: direct.jacobian.max_abs_diff(&jacobian_predicted),
        jacobian_residual_corrected: direct.jacobian.max_abs_diff(&jacobian_predicted.add(&shift.jacobian)),
        jacobian_shift: shift.jacobian,
        eta_prime: prime.eta,
        jacobian_prime: prime.jacobian,
        eta_direct: direct.eta,
        jacobian_direct: direct.jacobian,
        eta_predicted,
        jacobian_predicted,
    })
}

fn principal_shift(prime: &SpectralSummary, g: &Morph, lambda: f64, cfg: &QuadConfig) -> Result<SpectralSummary, QuadError> {
    let (n, k) = (g.n(), prime.eta.rows());
    let eta = &prime.eta;
    let map = g.map();
    let eval = FnEvaluator::new(n, k, move |w: &[Complex64], out: &mut [Complex64]| {
        let u = map.eval(w)?;
        if let Some(m) = u.iter().map(|z| z.norm()).find(|m| *m < EPS_POLE) {
            return Err(EvalError::DivisionNearZero { point: w.to_vec(), modulus: m });
        }
        for (alpha, o) in out.iter_mut().enumerate() {
            *o = (0..n).map(|gamma| eta.get(alpha, gamma) / u[gamma]).sum();
        }
        Ok(())
    });
    spectral_summary(&eval, lambda, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, parse_with_prefix};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn morph(text: &str, n: usize, lambda: f64) -> Result<Morph, MorphError> {
        Morph::validate(parse(text, n).unwrap(), lambda)
    }

    #[test]
    fn validate_examples() {
        let g = morph("2*w", 1, 0.25).unwrap();
        assert_eq!(*g.jacobian().get(0, 0), c(2.0, 0.0));
        assert_eq!(*g.inverse_jacobian().get(0, 0), c(0.5, 0.0));
        assert!(matches!(morph("w^2", 1, 0.25), Err(MorphError::SingularJacobian { .. })));
        assert!(matches!(morph("w - w", 1, 0.25), Err(MorphError::SingularJacobian { .. })));
        assert!(matches!(morph("w + 1", 1, 0.25), Err(MorphError::NotFixingOrigin { component: 0, .. })));
        assert!(matches!(morph("1/w", 1, 0.25), Err(MorphError::NotPolynomial(_))));
        assert!(matches!(morph("w, 2*w", 1, 0.25), Err(MorphError::DimensionMismatch { .. })));
    }

    #[test]
    fn zeros_inside_the_disc_are_rejected() {
        // w + w² vanishes at −1, inside the disc of radius 2.
        assert!(matches!(morph("w + w^2", 1, 2.0), Err(MorphError::ExtraZeros { zeros: 2 })));
        assert!(matches!(morph("w + w^2", 1, 1.0), Err(MorphError::VanishesOnTorus { .. })));
        assert!(morph("w + w^2", 1, 0.5).is_ok());
    }

    #[test]
    fn dominance_certificate() {
        assert!(morph("w1*(1 + w2/4), 2*w2 - w1*w2", 2, 0.25).is_ok());
        assert!(matches!(
            morph("w1 + w2, w2", 2, 0.25),
            Err(MorphError::NotDiagonalDominant { component: 0, .. })
        ));
        assert!(matches!(
            morph("w1 + 4*w1*w2, w2", 2, 0.25),
            Err(MorphError::NotDiagonalDominant { component: 0, bound }) if (bound - 1.0).abs() < 1e-15
        ));
    }

    #[test]
    fn pullback_examples() {
        let psi = parse_with_prefix("1/u", 1, 'u').unwrap();
        let g = morph("2*w", 1, 0.25).unwrap();
        assert_eq!(pullback(&psi, &g).unwrap(), parse("1/(2*w)", 1).unwrap());
        let psi = parse_with_prefix("u", 1, 'u').unwrap();
        assert_eq!(pullback(&psi, &g).unwrap(), parse("2*w", 1).unwrap());
        let psi = parse_with_prefix("1/u", 1, 'u').unwrap();
        let g = morph("w + w^2/4", 1, 0.25).unwrap();
        assert_eq!(pullback(&psi, &g).unwrap(), parse("1/(w + w^2/4)", 1).unwrap());
        let psi2 = parse_with_prefix("1/u1", 2, 'u').unwrap();
        assert!(matches!(pullback(&psi2, &g), Err(MorphError::DimensionMismatch { .. })));
    }

    #[test]
    fn transform_examples() {
        let cfg = QuadConfig::default();
        let psi = parse_with_prefix("1/u", 1, 'u').unwrap();
        let r = verify_transform(&psi, &morph("2*w", 1, 0.5).unwrap(), 0.5, 1e-10, &cfg).unwrap();
        assert!((*r.eta_direct.get(0, 0) - c(0.5, 0.0)).norm() < 1e-12);
        assert!(r.eta_residual <= 1e-10 && r.passed());

        let r = verify_transform(&psi, &morph("w + w^2/4", 1, 0.5).unwrap(), 0.5, 1e-8, &cfg).unwrap();
        assert!((*r.eta_direct.get(0, 0) - c(1.0, 0.0)).norm() < 1e-10);
        assert!(r.eta_passed());

        let psi = parse_with_prefix("u", 1, 'u').unwrap();
        let r = verify_transform(&psi, &morph("2*w", 1, 0.5).unwrap(), 0.5, 1e-8, &cfg).unwrap();
        assert!((*r.jacobian_direct.get(0, 0) - c(2.0, 0.0)).norm() < 1e-12);
        assert!(r.passed());
    }

    #[test]
    fn pole_term_shifts_the_jacobian_under_nonlinear_morphs() {
        // 1/(w + w²/4) = 1/w − 1/4 + w/16 − …, so 𝒟 picks up 1/16 from the pole.
        let psi = parse_with_prefix("1/u + u", 1, 'u').unwrap();
        let g = morph("w + w^2/4", 1, 0.25).unwrap();
        let r = verify_transform(&psi, &g, 0.25, 1e-8, &QuadConfig::default()).unwrap();
        assert!((*r.jacobian_direct.get(0, 0) - c(1.0625, 0.0)).norm() < 1e-10);
        assert!((r.jacobian_residual - 0.0625).abs() < 1e-10);
        assert!(r.jacobian_residual_corrected < 1e-10);
        assert!(r.eta_passed() && !r.jacobian_passed());
    }

    #[test]
    fn two_dimensional_diagonal_family() {
        let psi = parse_with_prefix("1/u1 + 2/u2 + u1 - u2, (1+i)/u2 + 3*u1", 2, 'u').unwrap();
        let g = morph("2*w1*(1 + w2/4), -w2*(1 + w1/4 - w2/4)", 2, 0.25).unwrap();
        let r = verify_transform(&psi, &g, 0.25, 1e-8, &QuadConfig::default()).unwrap();
        assert!(r.eta_passed(), "{r:?}");
        assert!(r.jacobian_residual_corrected < 1e-8, "{r:?}");
    }

    #[test]
    fn composition_multiplies_jacobians() {
        let g = morph("2*w + w^2/4", 1, 0.25).unwrap();
        let h = morph("w/2 - i*w^2/4", 1, 0.25).unwrap();
        let hg = h.compose(&g).unwrap();
        assert!(hg.jacobian().max_abs_diff(&h.jacobian().matmul(g.jacobian())) < 1e-10);
        assert!(hg.inverse_jacobian().max_abs_diff(&h.inverse_jacobian().matmul(g.inverse_jacobian())) < 1e-10);
    }

    #[test]
    fn identity_morph_is_exact() {
        let psi = parse_with_prefix("2/u1 + u2, 1/u2 - u1", 2, 'u').unwrap();
        let id = Morph::identity(2, 0.25).unwrap();
        let r = verify_transform(&psi, &id, 0.25, 1e-10, &QuadConfig::default()).unwrap();
        assert!(r.eta_residual < 1e-12 && r.jacobian_residual < 1e-12);
    }
}
