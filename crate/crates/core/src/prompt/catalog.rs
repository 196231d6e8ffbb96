use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DefectCode, PromptError};
use crate::expr::PayloadKind;

const BUILTIN: &str = include_str!("../../data/clauses.json");

const KINDS: [PayloadKind; 2] = [PayloadKind::Equation, PayloadKind::Coordinates];

/// A sentence appended to a prompt to remediate one or more defects.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintClause {
    pub id: String,
    pub text: String,
    #[serde(rename = "trigger_defect")]
    pub trigger_defects: Vec<DefectCode>,
    /// Prompt kinds the clause applies to; all kinds when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kinds: Option<Vec<PayloadKind>>,
}

impl ConstraintClause {
    pub fn applies_to(&self, kind: PayloadKind) -> bool {
        self.kinds.as_ref().is_none_or(|k| k.contains(&kind))
    }
}

/// Values substituted into `{name}` placeholders of clause texts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemplateParams {
    pub inner_circle_radius: f64,
    pub center_bound_radius: f64,
}

impl Default for TemplateParams {
    fn default() -> Self {
        Self { inner_circle_radius: 6.0, center_bound_radius: 3.0 }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(DefectCode),
    Many(Vec<DefectCode>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<DefectCode> {
        match self {
            OneOrMany::One(d) => vec![d],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    id: Option<String>,
    text: Option<String>,
    trigger_defect: OneOrMany,
    kinds: Option<Vec<PayloadKind>>,
    #[serde(default)]
    suppress: bool,
}

/// Ordered clause list plus the (defect, kind) pairs that need no clause.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    clauses: Vec<ConstraintClause>,
    suppressed: Vec<(DefectCode, PayloadKind)>,
}

fn fill_template(text: &str, params: &TemplateParams) -> Result<String, PromptError> {
    let filled = text
        .replace("{inner_circle_radius}", &params.inner_circle_radius.to_string())
        .replace("{center_bound_radius}", &params.center_bound_radius.to_string());
    if let Some(start) = filled.find('{') {
        if let Some(len) = filled[start + 1..].find('}') {
            let name = &filled[start + 1..start + 1 + len];
            if !name.is_empty() && name.chars().all(|c| c.is_ascii_lowercase() || c == '_') {
                return Err(PromptError::Catalog(format!("unknown placeholder {{{name}}}")));
            }
        }
    }
    Ok(filled)
}

impl Catalog {
    /// The shipped catalog with default radii.
    pub fn builtin() -> Self {
        Self::builtin_with(&TemplateParams::default())
    }

    pub fn builtin_with(params: &TemplateParams) -> Self {
        Self::from_json(BUILTIN, params).expect("shipped clause catalog is valid")
    }

    pub fn load(path: impl AsRef<Path>, params: &TemplateParams) -> Result<Self, PromptError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| PromptError::Catalog(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, params)
    }

    pub fn from_json(json: &str, params: &TemplateParams) -> Result<Self, PromptError> {
        let entries: Vec<Entry> = serde_json::from_str(json).map_err(|e| PromptError::Catalog(e.to_string()))?;
        let mut clauses: Vec<ConstraintClause> = Vec::new();
        let mut suppressed = Vec::new();
        for entry in entries {
            let triggers = entry.trigger_defect.into_vec();
            if triggers.is_empty() {
                return Err(PromptError::Catalog("entry without trigger_defect".into()));
            }
            let kinds = entry.kinds.clone().unwrap_or_else(|| KINDS.to_vec());
            if entry.suppress {
                if entry.id.is_some() || entry.text.is_some() {
                    return Err(PromptError::Catalog("suppression entries carry no id or text".into()));
                }
                for &d in &triggers {
                    suppressed.extend(kinds.iter().map(|&k| (d, k)));
                }
                continue;
            }
            let id = entry.id.ok_or_else(|| PromptError::Catalog("clause without id".into()))?;
            let text = entry.text.filter(|t| !t.trim().is_empty());
            let text = text.ok_or_else(|| PromptError::Catalog(format!("clause {id} has no text")))?;
            if clauses.iter().any(|c| c.id == id) {
                return Err(PromptError::Catalog(format!("duplicate clause id {id}")));
            }
            clauses.push(ConstraintClause {
                text: fill_template(&text, params)?,
                id,
                trigger_defects: triggers,
                kinds: entry.kinds,
            });
        }
        let catalog = Catalog { clauses, suppressed };
        for d in DefectCode::ALL {
            for k in KINDS {
                let n = catalog.clauses.iter().filter(|c| c.applies_to(k) && c.trigger_defects.contains(&d)).count();
                if n > 1 {
                    return Err(PromptError::Catalog(format!("{d} maps to {n} clauses for {k} prompts")));
                }
                if n == 0 && !catalog.suppressed.contains(&(d, k)) {
                    return Err(PromptError::UnmappedDefect(d, k));
                }
            }
        }
        Ok(catalog)
    }

    pub fn clauses(&self) -> &[ConstraintClause] {
        &self.clauses
    }

    pub fn get(&self, id: &str) -> Option<&ConstraintClause> {
        self.clauses.iter().find(|c| c.id == id)
    }

    /// The clause remediating `defect` for `kind`, or `None` when suppressed.
    pub fn resolve(&self, defect: DefectCode, kind: PayloadKind) -> Result<Option<&ConstraintClause>, PromptError> {
        if let Some(c) = self.clauses.iter().find(|c| c.applies_to(kind) && c.trigger_defects.contains(&defect)) {
            return Ok(Some(c));
        }
        if self.suppressed.contains(&(defect, kind)) {
            Ok(None)
        } else {
            Err(PromptError::UnmappedDefect(defect, kind))
        }
    }
}
