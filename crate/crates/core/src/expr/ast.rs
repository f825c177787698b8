use std::fmt;

use num_traits::{Signed, Zero};

use crate::rational::{rat_to_decimal, ComplexRational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

/// Expression tree for one scalar component. Variables are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Lit(ComplexRational),
    Var(usize),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Pow(Box<Node>, i32),
}

impl Node {
    pub fn lit(c: ComplexRational) -> Self {
        Node::Lit(c)
    }

    pub fn bin(op: BinOp, a: Node, b: Node) -> Self {
        Node::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn negate(a: Node) -> Self {
        Node::Neg(Box::new(a))
    }

    pub fn pow(a: Node, e: i32) -> Self {
        Node::Pow(Box::new(a), e)
    }

    /// Highest variable index referenced, plus one.
    pub fn arity(&self) -> usize {
        match self {
            Node::Lit(_) => 0,
            Node::Var(j) => j + 1,
            Node::Neg(a) | Node::Pow(a, _) => a.arity(),
            Node::Bin(_, a, b) => a.arity().max(b.arity()),
        }
    }

    /// Replaces every `Var(j)` by `subs[j]`.
    pub fn substitute(&self, subs: &[Node]) -> Node {
        match self {
            Node::Lit(c) => Node::Lit(c.clone()),
            Node::Var(j) => subs[*j].clone(),
            Node::Neg(a) => Node::negate(a.substitute(subs)),
            Node::Pow(a, e) => Node::pow(a.substitute(subs), *e),
            Node::Bin(op, a, b) => Node::bin(*op, a.substitute(subs), b.substitute(subs)),
        }
    }

    /// Canonical text with the given variable prefix. Every compound node is
    /// parenthesized so the text parses back to the same tree.
    pub fn render(&self, prefix: char) -> String {
        let mut s = String::new();
        self.write(&mut s, prefix);
        s
    }

    fn is_atomic(&self) -> bool {
        match self {
            Node::Var(_) => true,
            Node::Lit(c) => is_simple_literal(c),
            _ => false,
        }
    }

    fn write_wrapped(&self, s: &mut String, prefix: char) {
        match self {
            Node::Pow(..) => {
                s.push('(');
                self.write(s, prefix);
                s.push(')');
            }
            _ => self.write(s, prefix),
        }
    }

    fn write(&self, s: &mut String, prefix: char) {
        match self {
            Node::Lit(c) => s.push_str(&render_literal(c)),
            Node::Var(j) => {
                s.push(prefix);
                s.push_str(&(j + 1).to_string());
            }
            Node::Neg(a) => {
                s.push_str("(-");
                a.write_wrapped(s, prefix);
                s.push(')');
            }
            Node::Bin(op, a, b) => {
                s.push('(');
                a.write(s, prefix);
                s.push(' ');
                s.push(op.symbol());
                s.push(' ');
                b.write(s, prefix);
                s.push(')');
            }
            Node::Pow(a, e) => {
                if a.is_atomic() {
                    a.write(s, prefix);
                } else {
                    a.write_wrapped(s, prefix);
                }
                s.push('^');
                s.push_str(&e.to_string());
            }
        }
    }
}

fn is_simple_literal(c: &ComplexRational) -> bool {
    let real = c.im.is_zero() && !c.re.is_negative();
    let imag = c.re.is_zero() && !c.im.is_negative() && !c.im.is_zero();
    (real || imag) && rat_to_decimal(if real { &c.re } else { &c.im }).is_some()
}

fn render_literal(c: &ComplexRational) -> String {
    let dec = |r: &num_rational::BigRational| {
        rat_to_decimal(r).unwrap_or_else(|| format!("({} / {})", r.numer(), r.denom()))
    };
    if c.im.is_zero() {
        if c.re.is_negative() {
            format!("(-{})", dec(&-c.re.clone()))
        } else {
            dec(&c.re)
        }
    } else if c.re.is_zero() && !c.im.is_negative() {
        format!("{}i", dec(&c.im))
    } else {
        let re = render_literal(&ComplexRational::real(c.re.clone()));
        let im = render_literal(&ComplexRational::new(Zero::zero(), c.im.abs()));
        let op = if c.im.is_negative() { '-' } else { '+' };
        format!("({re} {op} {im})")
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render('w'))
    }
}
