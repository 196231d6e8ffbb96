use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SessionError;
use crate::expr::TrigPolicy;
use crate::geom::{Degree, SectionConstraints};
use crate::prompt::{DRASTIC_PRESET, PLACID_PRESET};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionMode {
    /// Each reply is an equation sampled into a wave profile.
    EquationProfile,
    /// Each reply is a set of control points for a closed section.
    CoordinateSections,
}

/// How equation replies become closed sections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProfileParams {
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
    pub amplitude: f64,
    /// Gap between the lowest profile point and the closing baseline.
    pub base_offset: f64,
}

impl Default for ProfileParams {
    fn default() -> Self {
        Self { t_start: -5.0, t_end: 5.0, samples: 64, amplitude: 1.0, base_offset: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionConfig {
    pub mode: SessionMode,
    /// Seconds between request starts; zero runs back to back.
    pub trigger_interval: f64,
    pub max_iterations: u64,
    pub sections_target: usize,
    /// Distance between stacked sections along y (m).
    pub section_spacing: f64,
    pub constraints: SectionConstraints,
    /// Interpolation of coordinate sections.
    pub degree: Degree,
    pub samples_per_span: usize,
    /// Points each coordinate reply must contain; `None` accepts any count ≥ 3.
    pub expected_count: Option<usize>,
    pub trig_policy: TrigPolicy,
    pub profile: ProfileParams,
    /// Replaces the mode's default base prompt.
    pub base_prompt: Option<String>,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self::coordinate_sections()
    }
}

impl SessionConfig {
    /// Column sections: convex, containing the radius-6 circle, centered
    /// within radius 3.
    pub fn coordinate_sections() -> Self {
        Self {
            mode: SessionMode::CoordinateSections,
            trigger_interval: 2.0,
            max_iterations: 20,
            sections_target: 3,
            section_spacing: 3.0,
            constraints: SectionConstraints::column(),
            degree: Degree::Cubic,
            samples_per_span: 8,
            expected_count: Some(10),
            trig_policy: TrigPolicy::default(),
            profile: ProfileParams::default(),
            base_prompt: None,
        }
    }

    pub fn equation_profile() -> Self {
        Self {
            mode: SessionMode::EquationProfile,
            constraints: SectionConstraints::default(),
            degree: Degree::Linear,
            expected_count: None,
            ..Self::coordinate_sections()
        }
    }

    /// Every out-of-range field, in declaration order.
    pub fn issues(&self) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        let mut bad = |field: &'static str, message: String| out.push(ConfigIssue { field, message });
        if !(self.trigger_interval >= 0.0 && self.trigger_interval.is_finite()) {
            bad("trigger_interval", format!("must be ≥ 0, got {}", self.trigger_interval));
        }
        if self.max_iterations < 1 {
            bad("max_iterations", "must be ≥ 1".into());
        }
        if self.sections_target < 2 {
            bad("sections_target", format!("must be ≥ 2, got {}", self.sections_target));
        }
        if !(self.section_spacing > 0.0 && self.section_spacing.is_finite()) {
            bad("section_spacing", format!("must be > 0, got {}", self.section_spacing));
        }
        if let Err(e) = self.constraints.check() {
            bad("constraints", e.to_string());
        }
        if self.samples_per_span < 1 {
            bad("samples_per_span", "must be ≥ 1".into());
        }
        if self.expected_count.is_some_and(|n| n < 3) {
            bad("expected_count", "must be ≥ 3".into());
        }
        let p = &self.profile;
        if !(p.t_start < p.t_end && p.t_start.is_finite() && p.t_end.is_finite()) {
            bad("profile.t_start", format!("range [{}, {}] is empty", p.t_start, p.t_end));
        }
        if p.samples < 2 {
            bad("profile.samples", "must be ≥ 2".into());
        }
        if !(p.amplitude > 0.0 && p.amplitude.is_finite()) {
            bad("profile.amplitude", format!("must be > 0, got {}", p.amplitude));
        }
        if !(p.base_offset > 0.0 && p.base_offset.is_finite()) {
            bad("profile.base_offset", format!("must be > 0, got {}", p.base_offset));
        }
        out
    }

    pub fn validate(&self) -> Result<(), SessionError> {
        match self.issues().into_iter().next() {
            Some(issue) => Err(SessionError::InvalidConfig(issue.to_string())),
            None => Ok(()),
        }
    }
}

/// One invalid configuration field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfigIssue {
    pub field: &'static str,
    pub message: String,
}

impl std::fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}", self.field, self.message)
    }
}

/// Named shape descriptions usable as an equation base prompt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Placid,
    Drastic,
}

impl FromStr for Preset {
    type Err = SessionError;
    fn from_str(s: &str) -> Result<Self, SessionError> {
        match s {
            "placid" => Ok(Preset::Placid),
            "drastic" => Ok(Preset::Drastic),
            other => Err(SessionError::UnknownPreset(other.to_string())),
        }
    }
}

pub fn describe_preset(name: &str) -> Result<&'static str, SessionError> {
    Ok(match name.parse::<Preset>()? {
        Preset::Placid => PLACID_PRESET,
        Preset::Drastic => DRASTIC_PRESET,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_have_no_issues() {
        assert!(SessionConfig::coordinate_sections().issues().is_empty());
        assert!(SessionConfig::equation_profile().issues().is_empty());
    }

    #[test]
    fn every_bad_field_is_listed_and_validate_reports_the_first() {
        let mut c = SessionConfig::coordinate_sections();
        c.trigger_interval = -1.0;
        c.sections_target = 1;
        c.profile.amplitude = 0.0;
        let fields: Vec<&str> = c.issues().iter().map(|i| i.field).collect();
        assert_eq!(fields, ["trigger_interval", "sections_target", "profile.amplitude"]);
        assert_eq!(c.validate(), Err(SessionError::InvalidConfig("trigger_interval must be ≥ 0, got -1".into())));
    }

    #[test]
    fn unknown_preset() {
        assert!(describe_preset("placid").is_ok());
        assert!(matches!(describe_preset("wobbly"), Err(SessionError::UnknownPreset(_))));
    }
}
