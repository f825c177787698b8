use std::collections::BTreeMap;

use thiserror::Error;

use super::ast::{BinOp, Node};
use super::MeroExpr;
use crate::laurent::{LaurentError, LaurentPoly};
use crate::rational::ComplexRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConversionError {
    #[error("not a Laurent polynomial: {subtree}")]
    NotLaurent { subtree: String },
    #[error(transparent)]
    Admissibility(#[from] LaurentError),
}

/// Unrestricted scalar Laurent polynomial used during expansion; exponents
/// below −1 may appear in intermediate results and are only rejected at the
/// end.
type Raw = BTreeMap<Vec<i32>, ComplexRational>;

fn insert(p: &mut Raw, e: Vec<i32>, c: ComplexRational) {
    let entry = p.entry(e.clone()).or_default();
    *entry += &c;
    if entry.is_zero() {
        p.remove(&e);
    }
}

fn constant(n: usize, c: ComplexRational) -> Raw {
    let mut p = Raw::new();
    insert(&mut p, vec![0; n], c);
    p
}

fn add(a: &Raw, b: &Raw, sign: bool) -> Raw {
    let mut out = a.clone();
    for (e, c) in b {
        insert(&mut out, e.clone(), if sign { c.clone() } else { -c });
    }
    out
}

fn mul(a: &Raw, b: &Raw) -> Raw {
    let mut out = Raw::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            insert(&mut out, e, ca * cb);
        }
    }
    out
}

/// Inverse of a single-term polynomial `c·w^a`.
fn invert_monomial(p: &Raw) -> Option<Raw> {
    if p.len() != 1 {
        return None;
    }
    let (e, c) = p.iter().next()?;
    let mut out = Raw::new();
    insert(&mut out, e.iter().map(|x| -x).collect(), c.inv()?);
    Some(out)
}

fn pow(p: &Raw, n: usize, e: i32) -> Option<Raw> {
    let base = if e < 0 { invert_monomial(p)? } else { p.clone() };
    let mut acc = constant(n, ComplexRational::one());
    for _ in 0..e.unsigned_abs() {
        acc = mul(&acc, &base);
    }
    Some(acc)
}

fn expand(node: &Node, n: usize) -> Result<Raw, ConversionError> {
    let not_laurent = || ConversionError::NotLaurent { subtree: node.to_string() };
    Ok(match node {
        Node::Lit(c) => constant(n, c.clone()),
        Node::Var(j) => {
            let mut e = vec![0; n];
            e[*j] = 1;
            let mut p = Raw::new();
            insert(&mut p, e, ComplexRational::one());
            p
        }
        Node::Neg(a) => add(&Raw::new(), &expand(a, n)?, false),
        Node::Bin(op, a, b) => {
            let (pa, pb) = (expand(a, n)?, expand(b, n)?);
            match op {
                BinOp::Add => add(&pa, &pb, true),
                BinOp::Sub => add(&pa, &pb, false),
                BinOp::Mul => mul(&pa, &pb),
                BinOp::Div => {
                    let inv = invert_monomial(&pb).ok_or_else(|| ConversionError::NotLaurent { subtree: b.to_string() })?;
                    mul(&pa, &inv)
                }
            }
        }
        Node::Pow(a, e) => pow(&expand(a, n)?, n, *e).ok_or_else(not_laurent)?,
    })
}

pub(super) fn convert(expr: &MeroExpr) -> Result<LaurentPoly, ConversionError> {
    let n = expr.n();
    let k = expr.k();
    let raws = expr.components().iter().map(|c| expand(c, n)).collect::<Result<Vec<_>, _>>()?;
    let mut terms = Vec::new();
    for (alpha, raw) in raws.into_iter().enumerate() {
        for (e, c) in raw {
            let mut v = vec![ComplexRational::zero(); k];
            v[alpha] = c;
            terms.push((e, v));
        }
    }
    Ok(LaurentPoly::from_terms(n, k, terms)?)
}

fn term_node(exponents: &[i32], c: &ComplexRational) -> Node {
    let mut node: Option<Node> = None;
    for (j, &e) in exponents.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let factor = if e == 1 { Node::Var(j) } else { Node::pow(Node::Var(j), e) };
        node = Some(match node {
            None => factor,
            Some(acc) => Node::bin(BinOp::Mul, acc, factor),
        });
    }
    match node {
        None => Node::Lit(c.clone()),
        Some(m) if *c == ComplexRational::one() => m,
        Some(m) => Node::bin(BinOp::Mul, Node::Lit(c.clone()), m),
    }
}

/// Sum-of-monomials tree for each component of `p`.
pub(super) fn from_laurent(p: &LaurentPoly) -> MeroExpr {
    let components = (0..p.k())
        .map(|alpha| {
            p.terms()
                .filter(|(_, c)| !c[alpha].is_zero())
                .map(|(idx, c)| term_node(idx.exponents(), &c[alpha]))
                .reduce(|a, b| Node::bin(BinOp::Add, a, b))
                .unwrap_or_else(|| Node::Lit(ComplexRational::zero()))
        })
        .collect();
    MeroExpr::from_components(p.n(), components).expect("indices below n")
}
