//! Prompt-driven parametric geometry.
//!
//! The crate turns LLM replies into validated geometry. Equation replies are
//! parsed into [`expr::ExpressionAst`] and sampled into wave profiles;
//! coordinate replies become closed sections that are interpolated, checked
//! against [`geom::SectionConstraints`] and lofted into a watertight
//! [`geom::LoftedMesh`]. Defects in a reply escalate the prompt through a
//! clause catalog ([`prompt`]). [`genloop`] drives timed generation sessions
//! and [`scene`] hosts a small building-scene DSL together with the
//! generate/execute/repair loop that targets it.

pub mod exec;
pub mod expr;
pub mod genloop;
pub mod geom;
pub mod llm;
pub mod prompt;
pub mod scene;

pub use exec::Execution;
