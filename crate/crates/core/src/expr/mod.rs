//! Equation payloads: extraction from noisy replies, parsing, evaluation and
//! profile sampling.
//!
//! The grammar covers polynomial / trigonometric expressions in `x`, `y`, `z`:
//! `+ - *`, `^` with a non-negative integer exponent, unary minus,
//! `sin`/`cos`/`tan` calls and implicit multiplication by adjacency
//! (`5y^2z` is `5*y^2*z`). There is no division, so evaluation at a finite
//! point never hits a pole.

mod ast;
mod extract;
mod lexer;
mod parser;
mod profile;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ast::{ExpressionAst, Function, Node, ParseFacts, Variable};
pub use extract::{extract_payload, extract_payload_detailed, Extraction};
pub use parser::{check_policy, parse_expression, parse_expression_unchecked, policy_violations};
pub use profile::{sample_profile, sample_profile_with};

/// What an LLM reply is expected to carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PayloadKind {
    Equation,
    Coordinates,
}

impl std::fmt::Display for PayloadKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PayloadKind::Equation => "equation",
            PayloadKind::Coordinates => "coordinates",
        })
    }
}

/// One LLM message, numbered within its session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawResponse {
    text: String,
    iteration: u64,
}

impl RawResponse {
    pub fn new(text: impl Into<String>, iteration: u64) -> Result<Self, ExprError> {
        let text = text.into();
        if text.is_empty() {
            return Err(ExprError::InvalidArgument("response text is empty".into()));
        }
        Ok(Self { text, iteration })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }
}

/// Which trigonometric forms an expression may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TrigPolicy {
    pub allow_tan: bool,
    /// Every additive term must carry a `sin` or `cos` factor.
    pub require_trig_only: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PolicyViolation {
    TanUsed,
    NonTrigTerm,
}

impl std::fmt::Display for PolicyViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PolicyViolation::TanUsed => f.write_str("tan is not allowed"),
            PolicyViolation::NonTrigTerm => f.write_str("term without sin or cos"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("no {0} payload found")]
    NoPayloadFound(PayloadKind),
    #[error("syntax error at {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("policy violation: {0}")]
    Policy(PolicyViolation),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("expression is not finite at t = {0}")]
    NonFinite(f64),
}
