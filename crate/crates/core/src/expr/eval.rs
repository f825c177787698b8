use num_complex::Complex64;
use thiserror::Error;

use super::ast::{BinOp, Node};

/// Divisors with modulus below this are treated as hitting a pole.
pub const EPS_POLE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by a value of modulus {modulus:e} at {point:?}")]
    DivisionNearZero { point: Vec<Complex64>, modulus: f64 },
}

#[derive(Clone, Debug)]
enum Op {
    Const(Complex64),
    Var(usize),
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow(i32),
}

/// Postfix form of one component, evaluated with an explicit stack.
#[derive(Clone, Debug)]
pub(super) struct Program {
    ops: Vec<Op>,
}

impl Program {
    pub(super) fn compile(node: &Node) -> Self {
        let mut ops = Vec::new();
        emit(node, &mut ops);
        Self { ops }
    }

    pub(super) fn run(&self, point: &[Complex64], stack: &mut Vec<Complex64>) -> Result<Complex64, EvalError> {
        stack.clear();
        for op in &self.ops {
            match op {
                Op::Const(c) => stack.push(*c),
                Op::Var(j) => stack.push(point[*j]),
                Op::Neg => {
                    let a = stack.pop().expect("stack");
                    stack.push(-a);
                }
                Op::Pow(e) => {
                    let a = stack.pop().expect("stack");
                    if *e < 0 && a.norm() < EPS_POLE {
                        return Err(EvalError::DivisionNearZero { point: point.to_vec(), modulus: a.norm() });
                    }
                    stack.push(a.powi(*e));
                }
                Op::Add | Op::Sub | Op::Mul | Op::Div => {
                    let b = stack.pop().expect("stack");
                    let a = stack.pop().expect("stack");
                    let r = match op {
                        Op::Add => a + b,
                        Op::Sub => a - b,
                        Op::Mul => a * b,
                        _ => {
                            if b.norm() < EPS_POLE {
                                return Err(EvalError::DivisionNearZero { point: point.to_vec(), modulus: b.norm() });
                            }
                            a / b
                        }
                    };
                    stack.push(r);
                }
            }
        }
        Ok(stack.pop().expect("non-empty program"))
    }
}

fn emit(node: &Node, ops: &mut Vec<Op>) {
    match node {
        Node::Lit(c) => ops.push(Op::Const(c.to_c64())),
        Node::Var(j) => ops.push(Op::Var(*j)),
        Node::Neg(a) => {
            emit(a, ops);
            ops.push(Op::Neg);
        }
        Node::Pow(a, e) => {
            emit(a, ops);
            ops.push(Op::Pow(*e));
        }
        Node::Bin(op, a, b) => {
            emit(a, ops);
            emit(b, ops);
            ops.push(match op {
                BinOp::Add => Op::Add,
                BinOp::Sub => Op::Sub,
                BinOp::Mul => Op::Mul,
                BinOp::Div => Op::Div,
            });
        }
    }
}
