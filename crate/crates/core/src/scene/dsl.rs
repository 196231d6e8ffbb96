//! Scene script interpreter.
//!
//! ```text
//! level z
//! wall id x1 y1 x2 y2 height thickness
//! window id wall_id width height sill offset
//! door id wall_id width height offset
//! roof thickness
//! room length width height wall_thickness
//! ```
//!
//! `#` starts a comment. Execution stops at the first failing line with
//! `line N: CODE: detail`.

use std::fmt::{self, Write};

use super::{ErrorCode, Opening, OpeningKind, SceneError, SceneModel};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptError {
    pub line: usize,
    pub error: SceneError,
}

impl fmt::Display for ScriptError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.error)
    }
}

impl std::error::Error for ScriptError {}

fn arity(cmd: &str, args: &[&str], expected: usize) -> Result<(), SceneError> {
    if args.len() == expected {
        Ok(())
    } else {
        Err(SceneError::new(ErrorCode::BadArity, format!("{cmd} takes {expected} arguments, got {}", args.len())))
    }
}

fn number(token: &str) -> Result<f64, SceneError> {
    token
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| SceneError::new(ErrorCode::BadNumber, format!("{token:?} is not a number")))
}

fn numbers<const N: usize>(tokens: &[&str]) -> Result<[f64; N], SceneError> {
    let mut out = [0.0; N];
    for (slot, t) in out.iter_mut().zip(tokens) {
        *slot = number(t)?;
    }
    Ok(out)
}

fn execute(scene: &mut SceneModel, cmd: &str, args: &[&str]) -> Result<(), SceneError> {
    match cmd {
        "level" => {
            arity(cmd, args, 1)?;
            scene.set_level(number(args[0])?)
        }
        "wall" => {
            arity(cmd, args, 7)?;
            let [x1, y1, x2, y2, h, t] = numbers(&args[1..])?;
            scene.add_wall(args[0], [x1, y1], [x2, y2], h, t)
        }
        "window" => {
            arity(cmd, args, 6)?;
            let [width, height, sill, offset] = numbers(&args[2..])?;
            scene.add_opening(
                OpeningKind::Window,
                Opening {
                    id: args[0].into(),
                    host_wall: args[1].into(),
                    width,
                    height,
                    sill_height: sill,
                    center_offset: offset,
                },
            )
        }
        "door" => {
            arity(cmd, args, 5)?;
            let [width, height, offset] = numbers(&args[2..])?;
            scene.add_opening(
                OpeningKind::Door,
                Opening {
                    id: args[0].into(),
                    host_wall: args[1].into(),
                    width,
                    height,
                    sill_height: 0.0,
                    center_offset: offset,
                },
            )
        }
        "roof" => {
            arity(cmd, args, 1)?;
            scene.add_roof(number(args[0])?)
        }
        "room" => {
            arity(cmd, args, 4)?;
            let [l, w, h, t] = numbers(args)?;
            let corners = [[0.0, 0.0], [l, 0.0], [l, w], [0.0, w]];
            for i in 0..4 {
                scene.add_wall(&format!("w{}", i + 1), corners[i], corners[(i + 1) % 4], h, t)?;
            }
            Ok(())
        }
        other => Err(SceneError::new(ErrorCode::UnknownCommand, other)),
    }
}

/// Runs a scene script, stopping at the first failing line.
pub fn run_scene_script(script: &str) -> Result<SceneModel, ScriptError> {
    let mut scene = SceneModel::default();
    for (n, raw) in script.lines().enumerate() {
        let code = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = code.split_whitespace().collect();
        let Some((cmd, args)) = tokens.split_first() else { continue };
        execute(&mut scene, cmd, args).map_err(|error| ScriptError { line: n + 1, error })?;
    }
    Ok(scene)
}

/// Writes a script that rebuilds `scene` exactly.
pub fn to_script(scene: &SceneModel) -> String {
    let mut out = String::new();
    if scene.level_elevation != 0.0 {
        let _ = writeln!(out, "level {}", scene.level_elevation);
    }
    for w in &scene.walls {
        let _ = writeln!(out, "wall {} {} {} {} {} {} {}", w.id, w.start.x, w.start.y, w.end.x, w.end.y, w.height, w.thickness);
    }
    for o in &scene.windows {
        let _ = writeln!(out, "window {} {} {} {} {} {}", o.id, o.host_wall, o.width, o.height, o.sill_height, o.center_offset);
    }
    for o in &scene.doors {
        let _ = writeln!(out, "door {} {} {} {} {}", o.id, o.host_wall, o.width, o.height, o.center_offset);
    }
    if let Some(r) = &scene.roof {
        let _ = writeln!(out, "roof {}", r.thickness);
    }
    out
}
