use std::fmt::{self, Write};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    X,
    Y,
    Z,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::X => "x",
            Variable::Y => "y",
            Variable::Z => "z",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Function {
    Sin,
    Cos,
    Tan,
}

impl Function {
    pub fn name(self) -> &'static str {
        match self {
            Function::Sin => "sin",
            Function::Cos => "cos",
            Function::Tan => "tan",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Function::Sin => v.sin(),
            Function::Cos => v.cos(),
            Function::Tan => v.tan(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(Variable),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Pow(Box<Node>, u32),
    Neg(Box<Node>),
    Call(Function, Box<Node>),
}

impl Node {
    pub fn eval(&self, p: [f64; 3]) -> f64 {
        match self {
            Node::Const(c) => *c,
            Node::Var(v) => p[*v as usize],
            Node::Add(a, b) => a.eval(p) + b.eval(p),
            Node::Sub(a, b) => a.eval(p) - b.eval(p),
            Node::Mul(a, b) => a.eval(p) * b.eval(p),
            Node::Pow(base, e) => {
                let b = base.eval(p);
                match i32::try_from(*e) {
                    Ok(e) => b.powi(e),
                    Err(_) => b.powf(f64::from(*e)),
                }
            }
            Node::Neg(a) => -a.eval(p),
            Node::Call(f, a) => f.apply(a.eval(p)),
        }
    }

    /// Terms of the top-level sum, with `true` marking subtracted terms.
    pub fn additive_terms(&self) -> Vec<(bool, &Node)> {
        let mut out = Vec::new();
        fn walk<'a>(n: &'a Node, negated: bool, out: &mut Vec<(bool, &'a Node)>) {
            match n {
                Node::Add(a, b) => {
                    walk(a, negated, out);
                    walk(b, negated, out);
                }
                Node::Sub(a, b) => {
                    walk(a, negated, out);
                    walk(b, !negated, out);
                }
                other => out.push((negated, other)),
            }
        }
        walk(self, false, &mut out);
        out
    }

    pub fn any(&self, pred: &impl Fn(&Node) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Node::Const(_) | Node::Var(_) => false,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) => a.any(pred) || b.any(pred),
            Node::Pow(a, _) | Node::Neg(a) | Node::Call(_, a) => a.any(pred),
        }
    }

    fn write_sum(&self, out: &mut String) {
        match self {
            Node::Add(a, b) => {
                a.write_sum(out);
                out.push_str(" + ");
                b.write_operand(out);
            }
            Node::Sub(a, b) => {
                a.write_sum(out);
                out.push_str(" - ");
                b.write_operand(out);
            }
            other => other.write_product(out),
        }
    }

    /// Right operand of `+`/`-`: nested sums need parentheses.
    fn write_operand(&self, out: &mut String) {
        if matches!(self, Node::Add(..) | Node::Sub(..)) {
            out.push('(');
            self.write_sum(out);
            out.push(')');
        } else {
            self.write_product(out);
        }
    }

    fn write_product(&self, out: &mut String) {
        match self {
            Node::Mul(a, b) => {
                a.write_product(out);
                out.push('*');
                b.write_factor(out);
            }
            Node::Neg(a) => {
                out.push('-');
                a.write_factor(out);
            }
            other => other.write_factor(out),
        }
    }

    fn write_factor(&self, out: &mut String) {
        match self {
            Node::Const(c) => {
                let _ = write!(out, "{c}");
            }
            Node::Var(v) => out.push_str(v.name()),
            Node::Call(f, a) => {
                out.push_str(f.name());
                out.push('(');
                a.write_sum(out);
                out.push(')');
            }
            Node::Pow(base, e) => {
                if matches!(**base, Node::Const(_) | Node::Var(_) | Node::Call(..)) {
                    base.write_factor(out);
                } else {
                    out.push('(');
                    base.write_sum(out);
                    out.push(')');
                }
                let _ = write!(out, "^{e}");
            }
            Node::Neg(a) => {
                out.push('-');
                a.write_factor(out);
            }
            Node::Add(..) | Node::Sub(..) | Node::Mul(..) => {
                out.push('(');
                self.write_sum(out);
                out.push(')');
            }
        }
    }
}

/// Observations made while parsing, used for defect detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ParseFacts {
    /// Products formed by adjacency rather than an explicit `*`.
    pub implicit_products: usize,
    pub uses_tan: bool,
}

/// A parsed expression together with the text it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionAst {
    pub root: Node,
    pub source_text: String,
    pub facts: ParseFacts,
}

impl ExpressionAst {
    pub fn eval(&self, x: f64, y: f64, z: f64) -> f64 {
        self.root.eval([x, y, z])
    }

    /// Canonical text: explicit `*`, `^` powers, single spaces around
    /// binary `+`/`-`, no spaces inside products.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        self.root.write_sum(&mut out);
        out
    }
}

impl fmt::Display for ExpressionAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}
