//! Exact multivariate Laurent polynomials with at most a simple pole in each
//! coordinate.
//!
//! This is the symbolic reference every numerical routine in the crate is
//! checked against. Coefficients are exact complex rationals, and the torus
//! integrals reduce to coefficient lookups because distinct monomials are
//! orthogonal on the distinguished torus `|w_j| = λ`:
//!
//! ```text
//! (2πi)^-n ∮ w^m dw = 1   iff m = (-1, ..., -1)
//! conj(w^a) = λ^(2|a|) w^-a   on the torus
//! ```

use std::borrow::Borrow;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::matrix::{CMatrix, Matrix};
use crate::rational::{rat_pow, rat_to_f64, ComplexRational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("exponent {exponents:?} has a pole of order greater than one")]
    AdmissibilityViolation { exponents: Vec<i32> },
    #[error("term {exponents:?} mixes a pole with other variables")]
    MixedPoleTerm { exponents: Vec<i32> },
    #[error("dimension must be at least 1")]
    EmptyIndex,
}

/// Exponent vector of a monomial; every entry is at least −1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<i32>);

impl MultiIndex {
    pub fn new(exponents: Vec<i32>) -> Result<Self, LaurentError> {
        if exponents.is_empty() {
            return Err(LaurentError::EmptyIndex);
        }
        if exponents.iter().any(|&e| e < -1) {
            return Err(LaurentError::AdmissibilityViolation { exponents });
        }
        Ok(Self(exponents))
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// `e` in slot `j`, zero elsewhere.
    pub fn axis(n: usize, j: usize, e: i32) -> Self {
        let mut v = vec![0; n];
        v[j] = e;
        Self(v)
    }

    pub fn exponents(&self) -> &[i32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Sum of exponents; the power of λ picked up by |w^a| on the torus.
    pub fn total(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// `Some(β)` when this is exactly `w_β^{-1}`.
    pub fn pure_pole(&self) -> Option<usize> {
        self.single_axis(-1)
    }

    /// `Some(β)` when this is exactly `w_β`.
    pub fn pure_linear(&self) -> Option<usize> {
        self.single_axis(1)
    }

    fn single_axis(&self, e: i32) -> Option<usize> {
        let mut found = None;
        for (j, &x) in self.0.iter().enumerate() {
            if x == e && found.is_none() {
                found = Some(j);
            } else if x != 0 {
                return None;
            }
        }
        found
    }

    fn is_mixed_pole(&self) -> bool {
        self.0.contains(&-1) && self.0.iter().filter(|&&e| e != 0).count() > 1
    }
}

impl Borrow<[i32]> for MultiIndex {
    fn borrow(&self) -> &[i32] {
        &self.0
    }
}

#[derive(Clone, Debug)]
pub enum ArithOp {
    Add,
    Sub,
    Scale(ComplexRational),
    Mul,
}

/// Finite Laurent polynomial `C^n → C^k` in normal form (no zero coefficient
/// vectors stored).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    n: usize,
    k: usize,
    terms: BTreeMap<MultiIndex, Vec<ComplexRational>>,
}

impl LaurentPoly {
    pub fn zero(n: usize, k: usize) -> Self {
        assert!(n >= 1 && k >= 1, "dimensions must be positive");
        Self { n, k, terms: BTreeMap::new() }
    }

    /// Builds a polynomial from `(exponents, coefficients)` pairs. Repeated
    /// exponents accumulate.
    pub fn from_terms<I>(n: usize, k: usize, terms: I) -> Result<Self, LaurentError>
    where
        I: IntoIterator<Item = (Vec<i32>, Vec<ComplexRational>)>,
    {
        let mut p = Self::zero(n, k);
        for (exps, coeffs) in terms {
            if exps.len() != n {
                return Err(LaurentError::DimensionMismatch { expected: n, found: exps.len() });
            }
            if coeffs.len() != k {
                return Err(LaurentError::DimensionMismatch { expected: k, found: coeffs.len() });
            }
            let idx = MultiIndex::new(exps)?;
            p.accumulate(idx, &coeffs);
        }
        Ok(p)
    }

    /// Scalar (k = 1) monomial `c · w^a`.
    pub fn monomial(exponents: Vec<i32>, c: ComplexRational) -> Result<Self, LaurentError> {
        let n = exponents.len();
        Self::from_terms(n, 1, [(exponents, vec![c])])
    }

    pub fn constant(n: usize, c: Vec<ComplexRational>) -> Self {
        let k = c.len();
        let mut p = Self::zero(n, k);
        p.accumulate(MultiIndex::zero(n), &c);
        p
    }

    /// Stacks scalar polynomials into a vector-valued one.
    pub fn stack(components: &[LaurentPoly]) -> Result<Self, LaurentError> {
        let first = components.first().ok_or(LaurentError::EmptyIndex)?;
        let n = first.n;
        let k = components.iter().map(|c| c.k).sum();
        let mut out = Self::zero(n, k);
        let mut offset = 0;
        for c in components {
            if c.n != n {
                return Err(LaurentError::DimensionMismatch { expected: n, found: c.n });
            }
            for (idx, coeffs) in &c.terms {
                let mut v = vec![ComplexRational::zero(); k];
                v[offset..offset + c.k].clone_from_slice(coeffs);
                out.accumulate(idx.clone(), &v);
            }
            offset += c.k;
        }
        Ok(out)
    }

    /// Component `alpha` as a scalar polynomial.
    pub fn component(&self, alpha: usize) -> LaurentPoly {
        let mut out = Self::zero(self.n, 1);
        for (idx, coeffs) in &self.terms {
            out.accumulate(idx.clone(), std::slice::from_ref(&coeffs[alpha]));
        }
        out
    }

    fn accumulate(&mut self, idx: MultiIndex, coeffs: &[ComplexRational]) {
        let entry = self.terms.entry(idx.clone()).or_insert_with(|| vec![ComplexRational::zero(); coeffs.len()]);
        for (e, c) in entry.iter_mut().zip(coeffs) {
            *e += c;
        }
        if entry.iter().all(ComplexRational::is_zero) {
            self.terms.remove(&idx);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &[ComplexRational])> {
        self.terms.iter().map(|(i, c)| (i, c.as_slice()))
    }

    /// Coefficient vector at an arbitrary exponent (zero when absent).
    pub fn coefficient(&self, exponents: &[i32]) -> Vec<ComplexRational> {
        self.terms.get(exponents).cloned().unwrap_or_else(|| vec![ComplexRational::zero(); self.k])
    }

    fn check_same_shape(&self, other: &Self) -> Result<(), LaurentError> {
        if self.n != other.n {
            return Err(LaurentError::DimensionMismatch { expected: self.n, found: other.n });
        }
        if self.k != other.k {
            return Err(LaurentError::DimensionMismatch { expected: self.k, found: other.k });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.accumulate(idx.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.scale(&(-&ComplexRational::one()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LaurentError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &ComplexRational) -> Self {
        let mut out = Self::zero(self.n, self.k);
        for (idx, coeffs) in &self.terms {
            let v: Vec<_> = coeffs.iter().map(|x| x * c).collect();
            out.accumulate(idx.clone(), &v);
        }
        out
    }

    /// Componentwise product; a scalar (k = 1) operand broadcasts.
    pub fn mul(&self, other: &Self) -> Result<Self, LaurentError> {
        if self.n != other.n {
            return Err(LaurentError::DimensionMismatch { expected: self.n, found: other.n });
        }
        let k = match (self.k, other.k) {
            (a, b) if a == b => a,
            (1, b) => b,
            (a, 1) => a,
            (a, b) => return Err(LaurentError::DimensionMismatch { expected: a, found: b }),
        };
        let mut out = Self::zero(self.n, k);
        for (ia, ca) in &self.terms {
            for (ib, cb) in &other.terms {
                let exps: Vec<i32> = ia.0.iter().zip(&ib.0).map(|(x, y)| x + y).collect();
                let idx = MultiIndex::new(exps)?;
                let v: Vec<_> = (0..k)
                    .map(|a| &ca[if self.k == 1 { 0 } else { a }] * &cb[if other.k == 1 { 0 } else { a }])
                    .collect();
                out.accumulate(idx, &v);
            }
        }
        Ok(out)
    }

    /// Numerical value at a point.
    pub fn eval_c64(&self, point: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.k];
        for (idx, coeffs) in &self.terms {
            let m: Complex64 = idx.0.iter().zip(point).map(|(&e, z)| z.powi(e)).product();
            for (o, c) in out.iter_mut().zip(coeffs) {
                *o += c.to_c64() * m;
            }
        }
        out
    }

    /// Sorted one-term-per-line text form: `(e1,...,en) re im | re im ...`
    /// with exact fractions.
    pub fn to_canonical_string(&self) -> String {
        let mut s = String::new();
        for (idx, coeffs) in &self.terms {
            let exps: Vec<String> = idx.0.iter().map(|e| e.to_string()).collect();
            let cs: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(s, "({}) {}", exps.join(","), cs.join(" | "));
        }
        s
    }
}

/// Applies one of the ring operations; `b` is ignored for `Scale`.
pub fn lp_arith(a: &LaurentPoly, b: &LaurentPoly, op: &ArithOp) -> Result<LaurentPoly, LaurentError> {
    match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Scale(c) => Ok(a.scale(c)),
        ArithOp::Mul => a.mul(b),
    }
}

/// Normalized torus integral `(2πi)^-n ∮ F(w) ∏ w_γ^{s_γ} dw` where `F` is `f`
/// or its conjugate.
///
/// Without conjugation only the coefficient at `-s-1` survives. With it,
/// `conj(f) = Σ conj(c_a) λ^{2|a|} w^{-a}` on the torus, so the coefficient at
/// `s+1` survives, weighted by `λ^{2|s+1|}`.
pub fn exterior_integral(
    f: &LaurentPoly,
    s: &[i32],
    conjugate: bool,
    lambda: &BigRational,
) -> Result<Vec<ComplexRational>, LaurentError> {
    if s.len() != f.n {
        return Err(LaurentError::DimensionMismatch { expected: f.n, found: s.len() });
    }
    if conjugate {
        let a: Vec<i32> = s.iter().map(|x| x + 1).collect();
        let weight = rat_pow(lambda, 2 * a.iter().map(|&e| e as i64).sum::<i64>());
        Ok(f.coefficient(&a).iter().map(|c| c.conj().scale(&weight)).collect())
    } else {
        let a: Vec<i32> = s.iter().map(|x| -x - 1).collect();
        Ok(f.coefficient(&a))
    }
}

/// `⟨f, g⟩ = Σ_α Σ_a conj(f_a) g_a λ^{2|a|}`, conjugate-linear in `f`.
pub fn inner_product_exact(
    f: &LaurentPoly,
    g: &LaurentPoly,
    lambda: &BigRational,
) -> Result<ComplexRational, LaurentError> {
    f.check_same_shape(g)?;
    let mut acc = ComplexRational::zero();
    for (idx, cf) in &f.terms {
        if let Some(cg) = g.terms.get(idx) {
            let w = rat_pow(lambda, 2 * idx.total());
            for (a, b) in cf.iter().zip(cg) {
                acc += &(&a.conj() * b).scale(&w);
            }
        }
    }
    Ok(acc)
}

pub fn inner_product_exact_f64(f: &LaurentPoly, g: &LaurentPoly, lambda: f64) -> Result<Complex64, LaurentError> {
    Ok(inner_product_exact(f, g, &lambda_to_rat(lambda))?.to_c64())
}

/// Core, principal part, analytic part, and the residue/Jacobian matrices of
/// a decomposable polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub core: Vec<ComplexRational>,
    pub principal: LaurentPoly,
    pub analytic: LaurentPoly,
    pub residues: Matrix<ComplexRational>,
    pub jacobian: Matrix<ComplexRational>,
}

impl Decomposition {
    pub fn core_c64(&self) -> Vec<Complex64> {
        self.core.iter().map(ComplexRational::to_c64).collect()
    }

    pub fn residues_c64(&self) -> CMatrix {
        self.residues.map(ComplexRational::to_c64)
    }

    pub fn jacobian_c64(&self) -> CMatrix {
        self.jacobian.map(ComplexRational::to_c64)
    }

    /// Degree-≥2 part of the analytic component.
    pub fn tail(&self) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.analytic.n, self.analytic.k);
        for (idx, c) in &self.analytic.terms {
            if idx.total() >= 2 {
                out.accumulate(idx.clone(), c);
            }
        }
        out
    }
}

pub fn decompose(f: &LaurentPoly) -> Result<Decomposition, LaurentError> {
    let (n, k) = (f.n, f.k);
    let mut principal = LaurentPoly::zero(n, k);
    let mut analytic = LaurentPoly::zero(n, k);
    let mut residues = Matrix::filled(k, n, ComplexRational::zero());
    let mut jacobian = Matrix::filled(k, n, ComplexRational::zero());
    for (idx, coeffs) in &f.terms {
        if idx.is_mixed_pole() {
            return Err(LaurentError::MixedPoleTerm { exponents: idx.0.clone() });
        }
        if idx.is_zero() {
            continue;
        }
        if let Some(beta) = idx.pure_pole() {
            for (alpha, c) in coeffs.iter().enumerate() {
                residues.set(alpha, beta, c.clone());
            }
            principal.accumulate(idx.clone(), coeffs);
        } else {
            if let Some(beta) = idx.pure_linear() {
                for (alpha, c) in coeffs.iter().enumerate() {
                    jacobian.set(alpha, beta, c.clone());
                }
            }
            analytic.accumulate(idx.clone(), coeffs);
        }
    }
    Ok(Decomposition { core: f.coefficient(&vec![0; n]), principal, analytic, residues, jacobian })
}

/// Exact variance `Σ_{a≠0} |c_a|² λ^{2|a|}` over all components.
pub fn variance_exact(f: &LaurentPoly, lambda: &BigRational) -> Result<BigRational, LaurentError> {
    decompose(f)?;
    let mut acc = BigRational::zero();
    for (idx, coeffs) in &f.terms {
        if idx.is_zero() {
            continue;
        }
        let w = rat_pow(lambda, 2 * idx.total());
        for c in coeffs {
            acc += c.norm_sqr() * &w;
        }
    }
    Ok(acc)
}

/// Float-λ convenience form. λ is converted exactly from its binary value, so
/// only the final rounding to `f64` is approximate.
pub fn variance_exact_f64(f: &LaurentPoly, lambda: f64) -> Result<f64, LaurentError> {
    Ok(rat_to_f64(&variance_exact(f, &lambda_to_rat(lambda))?))
}

/// Tail energy `Σ_{|a|≥2} |c_a|² λ^{2|a|}`: the variance not captured by the
/// residue/Jacobian model.
pub fn tail_energy_exact(f: &LaurentPoly, lambda: &BigRational) -> Result<BigRational, LaurentError> {
    let d = decompose(f)?;
    let tail = d.tail();
    let mut acc = BigRational::zero();
    for (idx, coeffs) in &tail.terms {
        let w = rat_pow(lambda, 2 * idx.total());
        for c in coeffs {
            acc += c.norm_sqr() * &w;
        }
    }
    Ok(acc)
}

/// Model variance `Tr(η*η)/λ² + λ² Tr(𝒟*𝒟)`.
pub fn variance_model(residues: &CMatrix, jacobian: &CMatrix, lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    residues.gram_trace() / l2 + l2 * jacobian.gram_trace()
}

pub fn variance_model_exact(
    residues: &Matrix<ComplexRational>,
    jacobian: &Matrix<ComplexRational>,
    lambda: &BigRational,
) -> BigRational {
    let l2 = lambda * lambda;
    let eta: BigRational = residues.iter().map(ComplexRational::norm_sqr).fold(BigRational::zero(), |a, b| a + b);
    let d: BigRational = jacobian.iter().map(ComplexRational::norm_sqr).fold(BigRational::zero(), |a, b| a + b);
    eta / &l2 + l2 * d
}

pub fn lambda_to_rat(lambda: f64) -> BigRational {
    BigRational::from_float(lambda).unwrap_or_else(BigRational::one)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn ci(re: i64) -> ComplexRational {
        ComplexRational::from_ints(re, 0)
    }

    fn mono(e: &[i32], c: i64) -> LaurentPoly {
        LaurentPoly::monomial(e.to_vec(), ci(c)).unwrap()
    }

    fn sum(ps: &[LaurentPoly]) -> LaurentPoly {
        ps.iter().skip(1).fold(ps[0].clone(), |a, b| a.add(b).unwrap())
    }

    #[test]
    fn arith_examples() {
        let s = lp_arith(&mono(&[-1], 2), &mono(&[-1], 3), &ArithOp::Add).unwrap();
        assert_eq!(s, mono(&[-1], 5));
        let p = lp_arith(&mono(&[-1], 1), &mono(&[2], 1), &ArithOp::Mul).unwrap();
        assert_eq!(p, mono(&[1], 1));
        let err = lp_arith(&mono(&[-1], 1), &mono(&[-1], 1), &ArithOp::Mul).unwrap_err();
        assert_eq!(err, LaurentError::AdmissibilityViolation { exponents: vec![-2] });
        let d = lp_arith(&mono(&[1], 1), &mono(&[1], 1), &ArithOp::Sub).unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn dimension_mismatch() {
        let a = mono(&[1], 1);
        let b = mono(&[1, 0], 1);
        assert!(matches!(a.add(&b), Err(LaurentError::DimensionMismatch { .. })));
        assert!(matches!(a.mul(&b), Err(LaurentError::DimensionMismatch { .. })));
    }

    #[test]
    fn exponent_below_minus_one_rejected() {
        assert!(LaurentPoly::monomial(vec![-2], ci(1)).is_err());
    }

    #[test]
    fn exterior_integral_examples() {
        let l1 = rat(1, 1);
        let f = mono(&[-1], 7);
        assert!(exterior_integral(&f, &[-1], false, &l1).unwrap()[0].is_zero());
        let f = mono(&[2], 1);
        assert!(exterior_integral(&f, &[-1], false, &l1).unwrap()[0].is_zero());
        // conj(w²)·w on |w| = 2: survives at a = s + 1 = 2, weight λ⁴.
        let v = exterior_integral(&f, &[1], true, &rat(2, 1)).unwrap();
        assert_eq!(v[0], ci(16));
        // Plain residue read-out: s = 0 picks c_{-1}.
        let g = mono(&[-1], 3);
        assert_eq!(exterior_integral(&g, &[0], false, &l1).unwrap()[0], ci(3));
    }

    #[test]
    fn inner_product_examples() {
        let half = rat(1, 2);
        let p = inner_product_exact(&mono(&[-1], 1), &mono(&[-1], 1), &half).unwrap();
        assert_eq!(p, ci(4));
        let q = inner_product_exact(&mono(&[1], 1), &mono(&[-1], 1), &half).unwrap();
        assert!(q.is_zero());
        let r = inner_product_exact(&mono(&[1], 1), &mono(&[1], 1), &rat(2, 1)).unwrap();
        assert_eq!(r, ci(4));
    }

    #[test]
    fn decompose_examples() {
        let f = sum(&[mono(&[0], 3), mono(&[-1], 2), mono(&[1], 5), mono(&[2], 1)]);
        let d = decompose(&f).unwrap();
        assert_eq!(d.core, vec![ci(3)]);
        assert_eq!(d.residues.get(0, 0), &ci(2));
        assert_eq!(d.jacobian.get(0, 0), &ci(5));
        assert_eq!(d.analytic, sum(&[mono(&[1], 5), mono(&[2], 1)]));
        assert_eq!(d.principal, mono(&[-1], 2));

        let f = sum(&[mono(&[-1, 0], 1), mono(&[0, -1], 1), mono(&[1, 1], 1)]);
        let d = decompose(&f).unwrap();
        assert_eq!(d.residues.row(0), &[ci(1), ci(1)]);
        assert!(d.jacobian.iter().all(ComplexRational::is_zero));
        assert_eq!(d.analytic, mono(&[1, 1], 1));

        let err = decompose(&mono(&[-1, 1], 1)).unwrap_err();
        assert_eq!(err, LaurentError::MixedPoleTerm { exponents: vec![-1, 1] });
    }

    #[test]
    fn variance_examples() {
        let f = sum(&[mono(&[-1], 2), mono(&[1], 5)]);
        assert_eq!(variance_exact(&f, &rat(1, 1)).unwrap(), rat(29, 1));
        assert!(variance_exact(&mono(&[0], 4), &rat(3, 1)).unwrap().is_zero());
        assert_eq!(variance_exact(&mono(&[2], 1), &rat(1, 2)).unwrap(), rat(1, 16));
        assert_eq!(variance_exact_f64(&mono(&[2], 1), 0.5).unwrap(), 0.0625);
    }

    #[test]
    fn variance_model_examples() {
        let one = CMatrix::from_rows(vec![vec![Complex64::new(1.0, 0.0)]]);
        let zero = CMatrix::zeros(1, 1);
        assert_eq!(variance_model(&one, &zero, 0.5), 4.0);
        assert_eq!(variance_model(&one, &one, 1.0), 2.0);
        let eta = CMatrix::from_rows(vec![vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]]);
        assert_eq!(variance_model(&eta, &CMatrix::zeros(1, 2), 1.0), 2.0);
    }

    #[test]
    fn canonical_string_is_sorted_and_exact() {
        let f = sum(&[mono(&[1, 0], 5), mono(&[-1, 0], 2)]).scale(&ComplexRational::new(rat(1, 3), rat(-1, 2)));
        assert_eq!(f.to_canonical_string(), "(-1,0) 2/3 -1\n(1,0) 5/3 -5/2\n");
    }

    #[test]
    fn stack_and_component() {
        let a = mono(&[-1], 1);
        let b = mono(&[1], 2);
        let v = LaurentPoly::stack(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(v.k(), 2);
        assert_eq!(v.component(0), a);
        assert_eq!(v.component(1), b);
    }
}
