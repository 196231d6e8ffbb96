//! Generate, run, feed the error back, regenerate.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{run_scene_script, SceneModel};
use crate::llm::{ChatProvider, LlmError, Role, Transcript};

pub const REPAIR_SYSTEM_PROMPT: &str = "You write scene scripts, one command per line:\n\
level z\n\
wall id x1 y1 x2 y2 height thickness\n\
window id wall_id width height sill offset\n\
door id wall_id width height offset\n\
roof thickness\n\
room length width height wall_thickness\n\
Lengths are meters; offsets run along the wall from its midpoint. \
Reply with the complete script in one fenced code block. \
If I send an error message, reply with the corrected complete script.";

const KEYWORDS: [&str; 6] = ["level", "wall", "window", "door", "roof", "room"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttemptOutcome {
    Scene(SceneModel),
    Error(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairAttempt {
    pub attempt: u32,
    pub script_text: String,
    pub outcome: AttemptOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepairState {
    Running,
    Converged,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairSnapshot {
    pub id: String,
    pub task_prompt: String,
    pub state: RepairState,
    pub budget: u32,
    pub attempts: Vec<RepairAttempt>,
}

/// Pulls the script out of a reply: the first fenced block if there is
/// one, otherwise every line that starts with a scene command.
pub fn extract_script(reply: &str) -> Option<String> {
    if let Some(open) = reply.find("```") {
        let after = &reply[open + 3..];
        let body_start = after.find('\n').map_or(after.len(), |n| n + 1);
        let body = &after[body_start..];
        let body = body.find("```").map_or(body, |close| &body[..close]);
        if !body.trim().is_empty() {
            return Some(body.trim_end().to_string() + "\n");
        }
    }
    let lines: Vec<&str> = reply
        .lines()
        .filter(|l| l.split_whitespace().next().is_some_and(|w| KEYWORDS.contains(&w)))
        .collect();
    (!lines.is_empty()).then(|| lines.join("\n") + "\n")
}

pub struct RepairSession {
    id: String,
    task_prompt: String,
    budget: u32,
    provider: Arc<dyn ChatProvider>,
    transcript: Transcript,
    attempts: Vec<RepairAttempt>,
    state: RepairState,
}

impl RepairSession {
    pub fn new(id: impl Into<String>, task_prompt: impl Into<String>, budget: u32, provider: Arc<dyn ChatProvider>) -> Result<Self, LlmError> {
        if budget < 1 {
            return Err(LlmError::Config("repair budget must be ≥ 1".into()));
        }
        let id = id.into();
        let mut transcript = Transcript::new(id.clone());
        transcript.push(Role::System, REPAIR_SYSTEM_PROMPT, 0)?;
        Ok(Self { id, task_prompt: task_prompt.into(), budget, provider, transcript, attempts: Vec::new(), state: RepairState::Running })
    }

    pub fn state(&self) -> RepairState {
        self.state
    }

    pub fn attempts(&self) -> &[RepairAttempt] {
        &self.attempts
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    /// The converged scene, if any.
    pub fn scene(&self) -> Option<&SceneModel> {
        match (self.state, self.attempts.last().map(|a| &a.outcome)) {
            (RepairState::Converged, Some(AttemptOutcome::Scene(s))) => Some(s),
            _ => None,
        }
    }

    pub fn snapshot(&self) -> RepairSnapshot {
        RepairSnapshot {
            id: self.id.clone(),
            task_prompt: self.task_prompt.clone(),
            state: self.state,
            budget: self.budget,
            attempts: self.attempts.clone(),
        }
    }

    /// One attempt: the task on the first turn, the last error afterwards.
    pub fn step(&mut self) -> Result<RepairState, LlmError> {
        if self.state != RepairState::Running {
            return Ok(self.state);
        }
        let message = match self.attempts.last().map(|a| &a.outcome) {
            Some(AttemptOutcome::Error(e)) => e.clone(),
            _ => self.task_prompt.clone(),
        };
        let n = self.attempts.len() as u32 + 1;
        let reply = self.transcript.send(self.provider.as_ref(), message, n as u64)?;
        let (script_text, outcome) = match extract_script(&reply.content) {
            Some(script) => {
                let outcome = match run_scene_script(&script) {
                    Ok(scene) if !scene.walls.is_empty() => AttemptOutcome::Scene(scene),
                    Ok(_) => AttemptOutcome::Error("the script builds no walls".into()),
                    Err(e) => AttemptOutcome::Error(e.to_string()),
                };
                (script, outcome)
            }
            None => (String::new(), AttemptOutcome::Error("no scene script found in the reply".into())),
        };
        let converged = matches!(outcome, AttemptOutcome::Scene(_));
        self.attempts.push(RepairAttempt { attempt: n, script_text, outcome });
        self.state = if converged {
            RepairState::Converged
        } else if n >= self.budget {
            RepairState::Exhausted
        } else {
            RepairState::Running
        };
        Ok(self.state)
    }

    pub fn run(&mut self) -> Result<RepairState, LlmError> {
        while self.state == RepairState::Running {
            self.step()?;
        }
        Ok(self.state)
    }
}

/// Runs a repair session to convergence or budget exhaustion.
pub fn repair_loop(
    id: impl Into<String>,
    task_prompt: impl Into<String>,
    provider: Arc<dyn ChatProvider>,
    budget: u32,
) -> Result<RepairSession, LlmError> {
    let mut session = RepairSession::new(id, task_prompt, budget, provider)?;
    session.run()?;
    Ok(session)
}
