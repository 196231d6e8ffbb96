use serde::{Deserialize, Serialize};

use super::DefectCode;
use crate::expr::{
    extract_payload_detailed, parse_expression_unchecked, policy_violations, ExpressionAst, PayloadKind,
    PolicyViolation, RawResponse, TrigPolicy,
};
use crate::geom::{parse_coordinates, GeomError, Point3, SectionPlane, ValidationReport};

/// What one parse-and-validate attempt on a response observed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub payload_found: bool,
    pub stripped_numbering: bool,
    pub prose_removed: bool,
    pub implicit_products: usize,
    pub policy_violations: Vec<PolicyViolation>,
    pub plane_violation: bool,
    /// Parse failures that map to no defect code.
    pub error: Option<String>,
    pub report: Option<ValidationReport>,
}

impl AttemptRecord {
    /// Extracts and parses an equation, recording every policy breach.
    pub fn for_equation(response: &RawResponse, policy: TrigPolicy) -> (AttemptRecord, Option<ExpressionAst>) {
        let mut rec = AttemptRecord::default();
        let extraction = match extract_payload_detailed(response.text(), PayloadKind::Equation) {
            Ok(e) => e,
            Err(e) => {
                rec.error = Some(e.to_string());
                return (rec, None);
            }
        };
        rec.payload_found = true;
        rec.stripped_numbering = extraction.stripped_numbering;
        rec.prose_removed = extraction.prose_removed;
        match parse_expression_unchecked(&extraction.payload) {
            Ok(ast) => {
                rec.implicit_products = ast.facts.implicit_products;
                rec.policy_violations = policy_violations(&ast, policy);
                (rec, Some(ast))
            }
            Err(e) => {
                rec.error = Some(e.to_string());
                (rec, None)
            }
        }
    }

    /// Extracts and parses control points in `plane`.
    pub fn for_coordinates(
        response: &RawResponse,
        expected_count: Option<usize>,
        plane: SectionPlane,
    ) -> (AttemptRecord, Option<Vec<Point3>>) {
        let mut rec = AttemptRecord::default();
        let extraction = match extract_payload_detailed(response.text(), PayloadKind::Coordinates) {
            Ok(e) => e,
            Err(e) => {
                rec.error = Some(e.to_string());
                return (rec, None);
            }
        };
        rec.payload_found = true;
        rec.stripped_numbering = extraction.stripped_numbering;
        rec.prose_removed = extraction.prose_removed;
        match parse_coordinates(&extraction.payload, expected_count, plane) {
            Ok(points) => (rec, Some(points)),
            Err(e) => {
                rec.plane_violation = matches!(e, GeomError::PlaneViolation { .. });
                rec.error = Some(e.to_string());
                (rec, None)
            }
        }
    }

    /// No defects, no parse error and, when validated, a passing report.
    pub fn clean(&self) -> bool {
        self.error.is_none() && detect_defects(self).is_empty() && self.report.as_ref().is_none_or(|r| r.passed)
    }
}

/// Defects shown by an attempt, in catalog order and without repeats.
pub fn detect_defects(attempt: &AttemptRecord) -> Vec<DefectCode> {
    let mut out = Vec::new();
    if attempt.stripped_numbering {
        out.push(DefectCode::NumberedOutput);
    }
    if attempt.prose_removed || !attempt.payload_found {
        out.push(DefectCode::ProsePresent);
    }
    if attempt.implicit_products > 0 {
        out.push(DefectCode::ImplicitMultiplication);
    }
    for v in &attempt.policy_violations {
        out.push(match v {
            PolicyViolation::TanUsed => DefectCode::TanUsed,
            PolicyViolation::NonTrigTerm => DefectCode::NotTrig,
        });
    }
    if attempt.plane_violation {
        out.push(DefectCode::PlaneViolation);
    }
    if let Some(report) = &attempt.report {
        out.extend(report.violations.iter().map(|v| DefectCode::from(v.code)));
    }
    out.sort();
    out.dedup();
    out
}
