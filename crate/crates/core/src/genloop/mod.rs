//! Timer-driven design sessions: ask for a section, validate it, escalate
//! the prompt on defects, stack accepted sections and loft them.

mod config;

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{sample_profile, PayloadKind, RawResponse};
use crate::geom::{
    loft, validate_section, Axis, ClosedSection, Degree, GeomError, LoftedMesh, Point3, Ring, SectionPlane,
    ValidationReport,
};
use crate::llm::{ChatProvider, LlmError, Transcript};
use crate::prompt::{detect_defects, AttemptRecord, Catalog, DefectCode, PromptSpec};

pub use config::{describe_preset, ConfigIssue, Preset, ProfileParams, SessionConfig, SessionMode};

/// Sections are drawn in the xz plane and stacked along y.
pub const STACK_AXIS: Axis = Axis::Y;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SessionError {
    #[error("invalid session config: {0}")]
    InvalidConfig(String),
    #[error("unknown preset {0:?} (use placid or drastic)")]
    UnknownPreset(String),
    #[error("session is {0}, expected {1}")]
    WrongState(SessionState, &'static str),
    #[error("provider error: {0}")]
    Provider(#[from] LlmError),
    #[error("geometry error: {0}")]
    Geometry(#[from] GeomError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FailureReason {
    BudgetExhausted,
    Canceled,
    ProviderError,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "state", content = "reason")]
pub enum SessionState {
    Idle,
    Running,
    Complete,
    Failed(FailureReason),
}

impl SessionState {
    pub fn name(self) -> &'static str {
        match self {
            SessionState::Idle => "idle",
            SessionState::Running => "running",
            SessionState::Complete => "complete",
            SessionState::Failed(_) => "failed",
        }
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, SessionState::Complete | SessionState::Failed(_))
    }
}

impl std::fmt::Display for SessionState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IterationOutcome {
    Accepted,
    Rejected,
    Exhausted,
}

/// What happened on one tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: u64,
    pub outcome: IterationOutcome,
    pub defects: Vec<DefectCode>,
    pub report: Option<ValidationReport>,
    /// Why the reply could not be turned into a section, if it could not.
    pub error: Option<String>,
    /// The prompt sent on this tick.
    pub prompt_text: String,
    /// Clause ids appended because of this tick's defects.
    pub added_clauses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptedSection {
    pub iteration: u64,
    pub section: ClosedSection,
    pub ring: Ring,
}

/// Consistent view of a session between ticks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub id: String,
    pub state: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<FailureReason>,
    pub iteration: u64,
    pub sections_accepted: usize,
    pub prompt_text: String,
    pub last_report: Option<ValidationReport>,
    pub mesh_ready: bool,
}

/// Shared flag checked between ticks and while waiting for the next one.
#[derive(Debug, Clone, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::SeqCst);
    }

    pub fn is_canceled(&self) -> bool {
        self.0.load(Ordering::SeqCst)
    }
}

const CANCEL_POLL: Duration = Duration::from_millis(20);

pub struct DesignSession {
    id: String,
    config: SessionConfig,
    catalog: Catalog,
    prompt: PromptSpec,
    transcript: Transcript,
    provider: Arc<dyn ChatProvider>,
    accepted: Vec<AcceptedSection>,
    records: Vec<IterationRecord>,
    state: SessionState,
    iteration: u64,
}

impl DesignSession {
    pub fn new(
        id: impl Into<String>,
        config: SessionConfig,
        catalog: Catalog,
        provider: Arc<dyn ChatProvider>,
    ) -> Result<Self, SessionError> {
        config.validate()?;
        let id = id.into();
        let kind = match config.mode {
            SessionMode::EquationProfile => PayloadKind::Equation,
            SessionMode::CoordinateSections => PayloadKind::Coordinates,
        };
        let prompt = match &config.base_prompt {
            Some(base) => PromptSpec::new(base.clone(), kind),
            None => PromptSpec::initial(kind),
        };
        Ok(Self {
            transcript: Transcript::new(id.clone()),
            id,
            config,
            catalog,
            prompt,
            provider,
            accepted: Vec::new(),
            records: Vec::new(),
            state: SessionState::Idle,
            iteration: 0,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn state(&self) -> SessionState {
        self.state
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn prompt(&self) -> &PromptSpec {
        &self.prompt
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn records(&self) -> &[IterationRecord] {
        &self.records
    }

    pub fn accepted_sections(&self) -> &[AcceptedSection] {
        &self.accepted
    }

    pub fn snapshot(&self) -> SessionSnapshot {
        SessionSnapshot {
            id: self.id.clone(),
            state: self.state.name().to_string(),
            failure: match self.state {
                SessionState::Failed(r) => Some(r),
                _ => None,
            },
            iteration: self.iteration,
            sections_accepted: self.accepted.len(),
            prompt_text: self.prompt.render(),
            last_report: self.records.iter().rev().find_map(|r| r.report.clone()),
            mesh_ready: self.state == SessionState::Complete,
        }
    }

    pub fn start(&mut self) -> Result<(), SessionError> {
        if self.state != SessionState::Idle {
            return Err(SessionError::WrongState(self.state, "idle"));
        }
        self.state = SessionState::Running;
        Ok(())
    }

    pub fn cancel(&mut self) {
        if !self.state.is_terminal() {
            self.state = SessionState::Failed(FailureReason::Canceled);
        }
    }

    fn next_offset(&self) -> f64 {
        self.accepted.len() as f64 * self.config.section_spacing
    }

    /// Turns a reply into a section at the next stacking offset.
    fn interpret(&self, response: &RawResponse) -> (AttemptRecord, Option<(ClosedSection, Ring)>) {
        let offset = self.next_offset();
        match self.config.mode {
            SessionMode::CoordinateSections => {
                let plane = SectionPlane::new(STACK_AXIS, 0.0);
                let (mut rec, points) = AttemptRecord::for_coordinates(response, self.config.expected_count, plane);
                let Some(points) = points else { return (rec, None) };
                let built = ClosedSection::new(points, self.config.degree, plane)
                    .map(|s| s.moved_to(offset))
                    .and_then(|s| s.sample(self.config.samples_per_span).map(|ring| (s, ring)));
                match built {
                    Ok((section, ring)) => {
                        rec.report = Some(validate_section(&ring, &self.config.constraints));
                        (rec, Some((section, ring)))
                    }
                    Err(e) => {
                        rec.error = Some(e.to_string());
                        (rec, None)
                    }
                }
            }
            SessionMode::EquationProfile => {
                let (mut rec, ast) = AttemptRecord::for_equation(response, self.config.trig_policy);
                let Some(ast) = ast else { return (rec, None) };
                let p = self.config.profile;
                let profile = match sample_profile(&ast, (p.t_start, p.t_end), p.samples, offset, p.amplitude) {
                    Ok(points) => points,
                    Err(e) => {
                        rec.error = Some(e.to_string());
                        return (rec, None);
                    }
                };
                let floor = profile.iter().map(|q| q.z).fold(f64::INFINITY, f64::min) - p.base_offset;
                let mut points = profile;
                points.push(Point3::new(p.t_end, offset, floor));
                points.push(Point3::new(p.t_start, offset, floor));
                let built = ClosedSection::new(points, Degree::Linear, SectionPlane::new(STACK_AXIS, offset))
                    .and_then(|s| s.sample(1).map(|ring| (s, ring)));
                match built {
                    Ok((section, ring)) => {
                        rec.report = Some(validate_section(&ring, &self.config.constraints));
                        (rec, Some((section, ring)))
                    }
                    Err(e) => {
                        rec.error = Some(e.to_string());
                        (rec, None)
                    }
                }
            }
        }
    }

    /// One request, parse, validate and escalate cycle.
    pub fn tick(&mut self) -> Result<IterationOutcome, SessionError> {
        if self.state != SessionState::Running {
            return Err(SessionError::WrongState(self.state, "running"));
        }
        if self.iteration >= self.config.max_iterations {
            self.state = SessionState::Failed(FailureReason::BudgetExhausted);
            return Ok(IterationOutcome::Exhausted);
        }
        self.iteration += 1;
        let prompt_text = self.prompt.render();
        let reply = match self.transcript.send(self.provider.as_ref(), prompt_text.clone(), self.iteration) {
            Ok(reply) => reply,
            Err(e) => {
                self.state = SessionState::Failed(FailureReason::ProviderError);
                return Err(e.into());
            }
        };
        let response = RawResponse::new(reply.content, self.iteration).expect("transcript rejects empty replies");
        let (attempt, section) = self.interpret(&response);
        let defects = detect_defects(&attempt);
        let accepted = attempt.clean();
        let escalated = self.prompt.escalate(&self.catalog, &defects).expect("catalogs are total");
        let added_clauses = escalated.added_since(&self.prompt);
        self.prompt = escalated;
        let outcome = match section {
            Some((section, ring)) if accepted => {
                self.accepted.push(AcceptedSection { iteration: self.iteration, section, ring });
                IterationOutcome::Accepted
            }
            _ => IterationOutcome::Rejected,
        };
        log::debug!("session {} tick {}: {:?} {:?}", self.id, self.iteration, outcome, defects);
        self.records.push(IterationRecord {
            iteration: self.iteration,
            outcome,
            defects,
            report: attempt.report,
            error: attempt.error,
            prompt_text,
            added_clauses,
        });
        if self.accepted.len() >= self.config.sections_target {
            self.state = SessionState::Complete;
        } else if self.iteration >= self.config.max_iterations {
            self.state = SessionState::Failed(FailureReason::BudgetExhausted);
        }
        Ok(outcome)
    }

    /// Ticks at the trigger interval (measured between request starts)
    /// until the session completes, fails or is canceled.
    pub fn run_to_completion(
        &mut self,
        cancel: &CancelToken,
        mut on_iteration: impl FnMut(&IterationRecord, &SessionSnapshot),
    ) -> Result<SessionState, SessionError> {
        self.start()?;
        let interval = Duration::from_secs_f64(self.config.trigger_interval);
        let mut next_start = Instant::now();
        loop {
            if cancel.is_canceled() {
                self.cancel();
                return Ok(self.state);
            }
            next_start += interval;
            self.tick()?;
            if let Some(record) = self.records.last().filter(|r| r.iteration == self.iteration) {
                on_iteration(record, &self.snapshot());
            }
            if self.state.is_terminal() {
                return Ok(self.state);
            }
            while let Some(wait) = next_start.checked_duration_since(Instant::now()).filter(|d| !d.is_zero()) {
                if cancel.is_canceled() {
                    break;
                }
                std::thread::sleep(wait.min(CANCEL_POLL));
            }
        }
    }

    /// Lofts the accepted sections with capped ends.
    pub fn assemble_model(&self) -> Result<LoftedMesh, SessionError> {
        if self.state != SessionState::Complete {
            return Err(SessionError::WrongState(self.state, "complete"));
        }
        let rings: Vec<Ring> = self.accepted.iter().map(|a| a.ring.clone()).collect();
        Ok(loft(&rings, true)?)
    }
}
