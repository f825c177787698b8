//! Seeded random instances for property checks.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::expr::MeroExpr;
use crate::laurent::LaurentPoly;
use crate::rational::{rat, ComplexRational};
use crate::slices::AngularInterval;

/// Gaussian integer with parts in `[-range, range]`.
pub fn coeff<R: Rng>(rng: &mut R, range: i64) -> ComplexRational {
    ComplexRational::from_ints(rng.gen_range(-range..=range), rng.gen_range(-range..=range))
}

pub fn nonzero_coeff<R: Rng>(rng: &mut R, range: i64) -> ComplexRational {
    loop {
        let c = coeff(rng, range);
        if !c.is_zero() {
            return c;
        }
    }
}

/// Complex rational `(a + bi)/d` with small numerators and `d ∈ 1..=4`.
pub fn small_rational<R: Rng>(rng: &mut R) -> ComplexRational {
    let d = BigRational::from_integer(BigInt::from(rng.gen_range(1..=4)));
    let c = coeff(rng, 4);
    ComplexRational::new(&c.re / &d, &c.im / &d)
}

/// Exponent vector in the decomposable class: zero, a single pole
/// `-e_β`, or nonnegative with total degree in `1..=max_degree`.
pub fn decomposable_index<R: Rng>(rng: &mut R, n: usize, max_degree: u32) -> Vec<i32> {
    match rng.gen_range(0..4) {
        0 => vec![0; n],
        1 => {
            let mut e = vec![0; n];
            e[rng.gen_range(0..n)] = -1;
            e
        }
        _ => analytic_index(rng, n, 1, max_degree),
    }
}

/// Nonnegative exponents with total degree in `min..=max`.
pub fn analytic_index<R: Rng>(rng: &mut R, n: usize, min: u32, max: u32) -> Vec<i32> {
    let degree = rng.gen_range(min..=max);
    let mut e = vec![0; n];
    for _ in 0..degree {
        e[rng.gen_range(0..n)] += 1;
    }
    e
}

fn build<R: Rng>(rng: &mut R, n: usize, k: usize, terms: usize, mut index: impl FnMut(&mut R) -> Vec<i32>) -> LaurentPoly {
    let items: Vec<_> = (0..terms).map(|_| (index(rng), (0..k).map(|_| coeff(rng, 3)).collect::<Vec<_>>())).collect();
    LaurentPoly::from_terms(n, k, items).expect("generated exponents are admissible")
}

/// Random decomposable Laurent polynomial with integer coefficients in
/// `[-3, 3]`.
pub fn decomposable<R: Rng>(rng: &mut R, n: usize, k: usize, max_degree: u32) -> LaurentPoly {
    let terms = rng.gen_range(1..=8);
    build(rng, n, k, terms, |r| decomposable_index(r, n, max_degree))
}

/// `f₀ + Σ η_β/w_β + Σ 𝒟_β w_β`, every coefficient drawn independently.
pub fn exact_subclass<R: Rng>(rng: &mut R, n: usize, k: usize) -> LaurentPoly {
    let mut items = vec![(vec![0; n], (0..k).map(|_| coeff(rng, 3)).collect::<Vec<_>>())];
    for beta in 0..n {
        for e in [-1, 1] {
            let mut idx = vec![0; n];
            idx[beta] = e;
            items.push((idx, (0..k).map(|_| coeff(rng, 3)).collect()));
        }
    }
    LaurentPoly::from_terms(n, k, items).expect("admissible")
}

/// Degree-≥`min_degree` polynomial with at least one nonzero term.
pub fn tail<R: Rng>(rng: &mut R, n: usize, k: usize, min_degree: u32, max_degree: u32) -> LaurentPoly {
    loop {
        let terms = rng.gen_range(1..=5);
        let p = build(rng, n, k, terms, |r| analytic_index(r, n, min_degree, max_degree));
        if !p.is_zero() {
            return p;
        }
    }
}

/// Exact-subclass part plus a nonzero tail of degree 2..=4.
pub fn with_tail<R: Rng>(rng: &mut R, n: usize, k: usize) -> LaurentPoly {
    exact_subclass(rng, n, k).add(&tail(rng, n, k, 2, 4)).expect("same shape")
}

/// `f₀ + Σ η_β/w_β + Σ 𝒟_β w_β` with `η ≠ 0` and `𝒟 ≠ 0`.
pub fn pole_plus_linear<R: Rng>(rng: &mut R, n: usize, k: usize) -> LaurentPoly {
    loop {
        let p = exact_subclass(rng, n, k);
        let has = |e: i32| {
            (0..n).any(|b| {
                let mut idx = vec![0; n];
                idx[b] = e;
                p.coefficient(&idx).iter().any(|c| !c.is_zero())
            })
        };
        if has(-1) && has(1) {
            return p;
        }
    }
}

/// Partition of `(-π, π]` into `pieces` half-open intervals `(c_i, c_{i+1}]`.
pub fn partition<R: Rng>(rng: &mut R, pieces: usize) -> Vec<AngularInterval> {
    let mut cuts: Vec<f64> = (1..pieces).map(|_| rng.gen_range(-PI..PI)).collect();
    cuts.push(-PI);
    cuts.push(PI);
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2).map(|w| AngularInterval::new(w[0], w[1], true, false).expect("sorted in range")).collect()
}

/// Random interval inside `[-π, π]` with random endpoint flags.
pub fn interval<R: Rng>(rng: &mut R) -> AngularInterval {
    let (a, b) = (rng.gen_range(-PI..=PI), rng.gen_range(-PI..=PI));
    AngularInterval::new(a.min(b), a.max(b), rng.gen(), rng.gen()).expect("in range")
}

fn quarter_choices() -> Vec<ComplexRational> {
    let q = rat(1, 4);
    let zero = rat(0, 1);
    vec![
        ComplexRational::zero(),
        ComplexRational::new(q.clone(), zero.clone()),
        ComplexRational::new(-q.clone(), zero.clone()),
        ComplexRational::new(zero.clone(), q.clone()),
        ComplexRational::new(zero, -q),
    ]
}

fn scale_choices() -> Vec<ComplexRational> {
    vec![
        ComplexRational::real(rat(1, 2)),
        ComplexRational::one(),
        ComplexRational::from_ints(2, 0),
        ComplexRational::i(),
    ]
}

/// Distinct morphs `g(w) = c·w + a·w²` with `c ∈ {1/2, 1, 2, i}` and
/// `a ∈ {0, ±1/4, ±i/4}`.
pub fn morph_family_1d<R: Rng>(rng: &mut R, count: usize) -> Vec<MeroExpr> {
    let mut pairs: Vec<_> = scale_choices()
        .into_iter()
        .flat_map(|c| quarter_choices().into_iter().map(move |a| (c.clone(), a)))
        .collect();
    pairs.shuffle(rng);
    pairs
        .into_iter()
        .take(count)
        .map(|(c, a)| {
            let p = LaurentPoly::from_terms(1, 1, vec![(vec![1], vec![c]), (vec![2], vec![a])]).expect("admissible");
            MeroExpr::from_laurent(&p)
        })
        .collect()
}

/// Two-dimensional morphs `g_γ = c_γ·w_γ·(1 + h_γ(w))` where `h_γ` has one or
/// two quadratic-or-lower terms with coefficients in `{±1/4, ±i/4}`.
pub fn morph_family_2d<R: Rng>(rng: &mut R, count: usize) -> Vec<MeroExpr> {
    let monomials = [vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]];
    let coefficients = &quarter_choices()[1..];
    (0..count)
        .map(|_| {
            let mut items = Vec::new();
            for gamma in 0..2 {
                let c = scale_choices().choose(rng).expect("non-empty").clone();
                let mut base = vec![0, 0];
                base[gamma] = 1;
                let mut push = |e: Vec<i32>, v: ComplexRational| {
                    let mut coeffs = vec![ComplexRational::zero(); 2];
                    coeffs[gamma] = v;
                    items.push((e, coeffs));
                };
                push(base.clone(), c.clone());
                for _ in 0..rng.gen_range(1..=2) {
                    let m = monomials.choose(rng).expect("non-empty");
                    let a = coefficients.choose(rng).expect("non-empty");
                    let e = base.iter().zip(m).map(|(x, y)| x + y).collect();
                    push(e, &c * a);
                }
            }
            MeroExpr::from_laurent(&LaurentPoly::from_terms(2, 2, items).expect("admissible"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::decompose;
    use crate::morph::{Morph, DEFAULT_MORPH_LAMBDA};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_stay_in_class() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let n = rng.gen_range(1..=3);
            let k = rng.gen_range(1..=2);
            assert!(decompose(&decomposable(&mut rng, n, k, 4)).is_ok());
            let t = tail(&mut rng, n, k, 2, 4);
            assert!(t.terms().all(|(idx, _)| idx.total() >= 2));
        }
    }

    #[test]
    fn partitions_cover_the_circle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for pieces in 1..=16 {
            let p = partition(&mut rng, pieces);
            assert_eq!(p.len(), pieces);
            assert_eq!(p[0].lo(), -PI);
            assert_eq!(p[pieces - 1].hi(), PI);
        }
    }

    #[test]
    fn morph_families_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let one = morph_family_1d(&mut rng, 12);
        assert_eq!(one.len(), 12);
        for g in one.into_iter().chain(morph_family_2d(&mut rng, 6)) {
            Morph::validate(g.clone(), DEFAULT_MORPH_LAMBDA).unwrap_or_else(|e| panic!("{g}: {e}"));
        }
    }
}
