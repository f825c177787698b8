//! A small DSL for vector-valued complex rational expressions in `w1..wn`.
//!
//! Parsed expressions evaluate numerically for the quadrature engine and, when
//! they are Laurent polynomials, expand exactly into [`LaurentPoly`].

mod ast;
mod eval;
mod parse;
mod to_laurent;

pub use ast::{BinOp, Node};
pub use eval::{EvalError, EPS_POLE};
pub use parse::ParseError;
pub use to_laurent::ConversionError;

use crate::laurent::LaurentPoly;

/// Parsed expression `C^n → C^k`, one tree per component.
#[derive(Clone, Debug)]
pub struct MeroExpr {
    n: usize,
    components: Vec<Node>,
    program: Vec<eval::Program>,
}

impl PartialEq for MeroExpr {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.components == other.components
    }
}

impl MeroExpr {
    /// Builds from trees; every variable index must be below `n`.
    pub fn from_components(n: usize, components: Vec<Node>) -> Option<Self> {
        if n == 0 || components.is_empty() || components.iter().any(|c| c.arity() > n) {
            return None;
        }
        let program = components.iter().map(eval::Program::compile).collect();
        Some(Self { n, components, program })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Node] {
        &self.components
    }

    /// Evaluates every component at `point`.
    pub fn eval(&self, point: &[crate::Complex64]) -> Result<Vec<crate::Complex64>, EvalError> {
        let mut out = vec![crate::Complex64::new(0.0, 0.0); self.k()];
        self.eval_into(point, &mut out)?;
        Ok(out)
    }

    pub fn eval_into(&self, point: &[crate::Complex64], out: &mut [crate::Complex64]) -> Result<(), EvalError> {
        assert_eq!(point.len(), self.n, "point dimension");
        let mut stack = Vec::with_capacity(16);
        for (o, prog) in out.iter_mut().zip(&self.program) {
            *o = prog.run(point, &mut stack)?;
        }
        Ok(())
    }

    pub fn to_laurent(&self) -> Result<LaurentPoly, ConversionError> {
        to_laurent::convert(self)
    }

    /// Expression whose expansion is exactly `p`.
    pub fn from_laurent(p: &LaurentPoly) -> MeroExpr {
        to_laurent::from_laurent(p)
    }

    /// Replaces each variable `j` by `subs[j]`; `subs` are trees in `m`
    /// variables.
    pub fn substitute(&self, m: usize, subs: &[Node]) -> Option<MeroExpr> {
        if subs.len() != self.n {
            return None;
        }
        Self::from_components(m, self.components.iter().map(|c| c.substitute(subs)).collect())
    }

    /// Canonical text using `prefix` for variables.
    pub fn render(&self, prefix: char) -> String {
        self.components.iter().map(|c| c.render(prefix)).collect::<Vec<_>>().join(", ")
    }
}

impl std::fmt::Display for MeroExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render('w'))
    }
}

/// Parses an expression in `w1..wn` (bare `w` allowed when `n = 1`).
pub fn parse(text: &str, n: usize) -> Result<MeroExpr, ParseError> {
    parse_with_prefix(text, n, 'w')
}

/// Parses with a different variable letter, e.g. `u` for target coordinates.
pub fn parse_with_prefix(text: &str, n: usize, prefix: char) -> Result<MeroExpr, ParseError> {
    let components = parse::parse_components(text, n, prefix)?;
    Ok(MeroExpr::from_components(n.max(1), components).expect("parser only emits in-range variables"))
}
