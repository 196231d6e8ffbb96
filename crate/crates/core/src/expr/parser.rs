//! Recursive-descent parser.
//!
//! ```text
//! sum      := product (('+' | '-') product)*
//! product  := signed ('*' signed)*
//! signed   := ('-' | '+') signed | adjacent
//! adjacent := power power*          -- implicit multiplication
//! power    := primary ('^' exponent)?
//! exponent := integer | '(' integer ')'
//! primary  := number | x | y | z | func '(' sum ')' | '(' sum ')'
//! ```
//!
//! Adjacency binds tighter than `*`, so `5y^2z` groups as `(5*y^2)*z`.

use super::ast::{ExpressionAst, Function, Node, ParseFacts};
use super::lexer::{lex, Tok, Token};
use super::{ExprError, PolicyViolation, TrigPolicy};

pub(crate) struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    /// Byte offset reported when input ends early.
    end_offset: usize,
    facts: ParseFacts,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(toks: &'a [Token], end_offset: usize) -> Self {
        Self { toks, pos: 0, end_offset, facts: ParseFacts::default() }
    }

    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).map(|t| t.tok)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_offset, |t| t.start)
    }

    fn error<T>(&self, expected: &str) -> Result<T, ExprError> {
        Err(ExprError::Syntax { position: self.offset(), expected: expected.to_string() })
    }

    /// Parses the whole token slice as one expression.
    pub(crate) fn parse_all(mut self) -> Result<(Node, ParseFacts), ExprError> {
        if self.toks.is_empty() {
            return self.error("expression");
        }
        let node = self.sum()?;
        if self.pos != self.toks.len() {
            return self.error("operator or end of input");
        }
        Ok((node, self.facts))
    }

    fn sum(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.product()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = Node::Add(Box::new(lhs), Box::new(self.product()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.product()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.signed()?;
        while self.peek() == Some(Tok::Star) {
            self.pos += 1;
            lhs = Node::Mul(Box::new(lhs), Box::new(self.signed()?));
        }
        Ok(lhs)
    }

    fn signed(&mut self) -> Result<Node, ExprError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.signed()?)))
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.signed()
            }
            _ => self.adjacent(),
        }
    }

    fn starts_primary(tok: Option<Tok>) -> bool {
        matches!(tok, Some(Tok::Num(_) | Tok::Var(_) | Tok::Func(_) | Tok::LParen))
    }

    fn adjacent(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.power()?;
        while Self::starts_primary(self.peek()) {
            self.facts.implicit_products += 1;
            lhs = Node::Mul(Box::new(lhs), Box::new(self.power()?));
        }
        Ok(lhs)
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.primary()?;
        if self.peek() != Some(Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let parenthesized = self.peek() == Some(Tok::LParen);
        if parenthesized {
            self.pos += 1;
        }
        let exponent = match self.peek() {
            Some(Tok::Num(v)) if v.fract() == 0.0 && v >= 0.0 && v <= f64::from(u32::MAX) => {
                self.pos += 1;
                v as u32
            }
            _ => return self.error("non-negative integer exponent"),
        };
        if parenthesized {
            if self.peek() != Some(Tok::RParen) {
                return self.error("')'");
            }
            self.pos += 1;
        }
        Ok(Node::Pow(Box::new(base), exponent))
    }

    fn primary(&mut self) -> Result<Node, ExprError> {
        match self.peek() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Node::Const(v))
            }
            Some(Tok::Var(v)) => {
                self.pos += 1;
                Ok(Node::Var(v))
            }
            Some(Tok::Func(f)) => {
                self.pos += 1;
                if f == Function::Tan {
                    self.facts.uses_tan = true;
                }
                if self.peek() != Some(Tok::LParen) {
                    return self.error("'(' after function name");
                }
                self.pos += 1;
                let arg = self.sum()?;
                if self.peek() != Some(Tok::RParen) {
                    return self.error("')'");
                }
                self.pos += 1;
                Ok(Node::Call(f, Box::new(arg)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.sum()?;
                if self.peek() != Some(Tok::RParen) {
                    return self.error("')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => self.error("number, variable, function or '('"),
        }
    }
}

/// Parses without applying a [`TrigPolicy`].
pub fn parse_expression_unchecked(payload: &str) -> Result<ExpressionAst, ExprError> {
    if payload.trim().is_empty() {
        return Err(ExprError::Syntax { position: 0, expected: "expression".into() });
    }
    let toks = lex(payload).map_err(|position| ExprError::Syntax {
        position,
        expected: "number, x, y, z, sin, cos, tan, operator or parenthesis".into(),
    })?;
    let (root, facts) = Parser::new(&toks, payload.len()).parse_all()?;
    Ok(ExpressionAst { root, source_text: payload.trim().to_string(), facts })
}

/// Every policy rule the expression breaks, tan first.
pub fn policy_violations(ast: &ExpressionAst, policy: TrigPolicy) -> Vec<PolicyViolation> {
    let mut out = Vec::new();
    if !policy.allow_tan && ast.facts.uses_tan {
        out.push(PolicyViolation::TanUsed);
    }
    if policy.require_trig_only {
        let trig = |n: &Node| matches!(n, Node::Call(Function::Sin | Function::Cos, _));
        if ast.root.additive_terms().iter().any(|(_, term)| !term.any(&trig)) {
            out.push(PolicyViolation::NonTrigTerm);
        }
    }
    out
}

pub fn check_policy(ast: &ExpressionAst, policy: TrigPolicy) -> Result<(), ExprError> {
    match policy_violations(ast, policy).first() {
        Some(&v) => Err(ExprError::Policy(v)),
        None => Ok(()),
    }
}

pub fn parse_expression(payload: &str, policy: TrigPolicy) -> Result<ExpressionAst, ExprError> {
    let ast = parse_expression_unchecked(payload)?;
    check_policy(&ast, policy)?;
    Ok(ast)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canon(s: &str) -> String {
        parse_expression_unchecked(s).unwrap().canonical()
    }

    #[test]
    fn implicit_products_become_explicit() {
        let ast = parse_expression("x^3 + 2xyz + 5y^2z - 7z^3", TrigPolicy::default()).unwrap();
        assert_eq!(ast.root.additive_terms().len(), 4);
        assert_eq!(ast.canonical(), "x^3 + 2*x*y*z + 5*y^2*z - 7*z^3");
        assert_eq!(ast.facts.implicit_products, 6);
        assert_eq!(ast.eval(1.0, 1.0, 1.0), 1.0);
    }

    #[test]
    fn explicit_polynomial_has_eight_terms() {
        let src = "x*y*z + 2*x*y + 3*x*z + 4*y*z + 5*x + 6*y + 7*z + 8";
        let ast = parse_expression(src, TrigPolicy::default()).unwrap();
        assert_eq!(ast.root.additive_terms().len(), 8);
        assert_eq!(ast.facts.implicit_products, 0);
        assert_eq!(ast.canonical(), src);
        assert_eq!(ast.eval(1.0, 1.0, 1.0), 36.0);
    }

    #[test]
    fn trig_expression_canonical_is_stable() {
        let src = "sin(x)*cos(y)*cos(z) + cos(x)*sin(y)*sin(z)";
        assert_eq!(canon(src), src);
        let ast = parse_expression(src, TrigPolicy { allow_tan: false, require_trig_only: true }).unwrap();
        assert_eq!(ast.eval(0.0, 0.0, 0.0), 0.0);
    }

    #[test]
    fn tan_is_a_policy_violation_not_a_syntax_error() {
        assert_eq!(
            parse_expression("tan(x) + 1", TrigPolicy::default()),
            Err(ExprError::Policy(PolicyViolation::TanUsed))
        );
        let ok = parse_expression("tan(x) + 1", TrigPolicy { allow_tan: true, require_trig_only: false });
        assert!(ok.unwrap().facts.uses_tan);
    }

    #[test]
    fn trig_only_policy_rejects_plain_terms() {
        let policy = TrigPolicy { allow_tan: false, require_trig_only: true };
        assert_eq!(
            parse_expression("sin(x) + 1", policy),
            Err(ExprError::Policy(PolicyViolation::NonTrigTerm))
        );
        assert!(parse_expression("2sin(x)cos(y) - cos(z)^2", policy).is_ok());
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_expression_unchecked("x + * y") {
            Err(ExprError::Syntax { position, .. }) => assert_eq!(position, 4),
            other => panic!("unexpected {other:?}"),
        }
        match parse_expression_unchecked("x^-1") {
            Err(ExprError::Syntax { position, expected }) => {
                assert_eq!(position, 2);
                assert!(expected.contains("exponent"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_expression_unchecked("sin x"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expression_unchecked("(x + y"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_expression_unchecked(""), Err(ExprError::Syntax { position: 0, .. })));
    }

    #[test]
    fn canonical_parenthesizes_where_needed() {
        assert_eq!(canon("x - (y + z)"), "x - (y + z)");
        assert_eq!(canon("2(x+1)^2"), "2*(x + 1)^2");
        assert_eq!(canon("-x^2 + -y"), "-x^2 + -y");
        assert_eq!(canon("(-x)^2"), "(-x)^2");
        assert_eq!(canon("sin(x)cos(y)"), "sin(x)*cos(y)");
        assert_eq!(canon("x^(2)"), "x^2");
        assert_eq!(canon("0.5x"), "0.5*x");
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let ast = parse_expression_unchecked("-x^2").unwrap();
        assert_eq!(ast.eval(3.0, 0.0, 0.0), -9.0);
        let ast = parse_expression_unchecked("2 - -3").unwrap();
        assert_eq!(ast.eval(0.0, 0.0, 0.0), 5.0);
    }
}
