//! Prompt construction and defect-driven escalation.
//!
//! A [`PromptSpec`] is a base text plus clauses. When a response shows a
//! defect, [`PromptSpec::escalate`] appends the catalog clause that targets
//! it. Clauses are never removed.

mod catalog;
mod defects;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::PayloadKind;
use crate::geom::ViolationCode;

pub use catalog::{Catalog, ConstraintClause, TemplateParams};
pub use defects::{detect_defects, AttemptRecord};

pub const EQUATION_BASE: &str = "Create one polynomial with three variables x, y, and z.";

pub const COORDINATES_BASE: &str = "Generate 10 sets of coordinates for a convex or concave curve in the xz plane, where the y-values are all 0.\n\
Those generated points will be control points of the interpolated closed curve.\n\
Only write coordinates not texts.\n\
Points will be control points that connect closed curves.";

/// Shape-description prompts for equation sessions.
pub const PLACID_PRESET: &str = "Generate a polynomial curve that has placid, calm, and linear waves.";
pub const DRASTIC_PRESET: &str = "Generate a polynomial curve that has surge, drastic, and crazy fluctuation waves";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DefectCode {
    NumberedOutput,
    ProsePresent,
    ImplicitMultiplication,
    TanUsed,
    NotTrig,
    PlaneViolation,
    SelfIntersect,
    NonConvex,
    InnerCircleMiss,
    CenterOutOfBound,
}

impl DefectCode {
    pub const ALL: [DefectCode; 10] = [
        DefectCode::NumberedOutput,
        DefectCode::ProsePresent,
        DefectCode::ImplicitMultiplication,
        DefectCode::TanUsed,
        DefectCode::NotTrig,
        DefectCode::PlaneViolation,
        DefectCode::SelfIntersect,
        DefectCode::NonConvex,
        DefectCode::InnerCircleMiss,
        DefectCode::CenterOutOfBound,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DefectCode::NumberedOutput => "NUMBERED_OUTPUT",
            DefectCode::ProsePresent => "PROSE_PRESENT",
            DefectCode::ImplicitMultiplication => "IMPLICIT_MULTIPLICATION",
            DefectCode::TanUsed => "TAN_USED",
            DefectCode::NotTrig => "NOT_TRIG",
            DefectCode::PlaneViolation => "PLANE_VIOLATION",
            DefectCode::SelfIntersect => "SELF_INTERSECT",
            DefectCode::NonConvex => "NON_CONVEX",
            DefectCode::InnerCircleMiss => "INNER_CIRCLE_MISS",
            DefectCode::CenterOutOfBound => "CENTER_OUT_OF_BOUND",
        }
    }
}

impl fmt::Display for DefectCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DefectCode {
    type Err = PromptError;
    fn from_str(s: &str) -> Result<Self, PromptError> {
        DefectCode::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| PromptError::Catalog(format!("unknown defect code {s:?}")))
    }
}

impl From<ViolationCode> for DefectCode {
    fn from(v: ViolationCode) -> Self {
        match v {
            ViolationCode::NonConvex => DefectCode::NonConvex,
            ViolationCode::SelfIntersect => DefectCode::SelfIntersect,
            ViolationCode::InnerCircleMiss => DefectCode::InnerCircleMiss,
            ViolationCode::CenterOutOfBound => DefectCode::CenterOutOfBound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("defect {0} has no clause and no suppression for {1} prompts")]
    UnmappedDefect(DefectCode, PayloadKind),
    #[error("catalog error: {0}")]
    Catalog(String),
}

/// A prompt: base text followed by escalation clauses, one per line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub base_text: String,
    pub clauses: Vec<ConstraintClause>,
    pub target_kind: PayloadKind,
}

impl PromptSpec {
    pub fn new(base_text: impl Into<String>, target_kind: PayloadKind) -> Self {
        Self { base_text: base_text.into(), clauses: Vec::new(), target_kind }
    }

    /// The unescalated prompt for a payload kind.
    pub fn initial(kind: PayloadKind) -> Self {
        match kind {
            PayloadKind::Equation => Self::new(EQUATION_BASE, kind),
            PayloadKind::Coordinates => Self::new(COORDINATES_BASE, kind),
        }
    }

    pub fn has_clause(&self, id: &str) -> bool {
        self.clauses.iter().any(|c| c.id == id)
    }

    pub fn render(&self) -> String {
        let mut out = self.base_text.clone();
        for c in &self.clauses {
            out.push('\n');
            out.push_str(&c.text);
        }
        out
    }

    /// Appends, in catalog order, every clause targeting one of `defects`
    /// that the spec does not carry yet.
    pub fn escalate(&self, catalog: &Catalog, defects: &[DefectCode]) -> Result<PromptSpec, PromptError> {
        for &d in defects {
            catalog.resolve(d, self.target_kind)?;
        }
        let mut next = self.clone();
        for clause in catalog.clauses() {
            let wanted = clause.applies_to(self.target_kind) && clause.trigger_defects.iter().any(|t| defects.contains(t));
            if wanted && !next.has_clause(&clause.id) {
                next.clauses.push(clause.clone());
            }
        }
        Ok(next)
    }

    /// Ids of clauses in `self` that `previous` lacked.
    pub fn added_since(&self, previous: &PromptSpec) -> Vec<String> {
        self.clauses.iter().filter(|c| !previous.has_clause(&c.id)).map(|c| c.id.clone()).collect()
    }
}

impl fmt::Display for PromptSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
