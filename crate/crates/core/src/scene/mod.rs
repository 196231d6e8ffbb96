//! BIM-lite scenes: walls with rectangular openings and a flat roof, built
//! from a line-oriented script, plus the generate-run-repair loop that asks
//! a chat model for such scripts.

mod dsl;
mod mesh;
mod repair;
mod room;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geom::Point3;

pub use dsl::{run_scene_script, to_script, ScriptError};
pub use mesh::{scene_components, scene_to_mesh};
pub use repair::{
    extract_script, repair_loop, AttemptOutcome, RepairAttempt, RepairSession, RepairSnapshot, RepairState,
    REPAIR_SYSTEM_PROMPT,
};
pub use room::{build_room, FitError, RoomParams};

/// Minimum clearance between an opening and the edges of its wall (m).
pub const OPENING_MARGIN: f64 = 0.05;
/// Default window sill height (m).
pub const DEFAULT_SILL: f64 = 0.9;
/// Walls taller than this are rejected (m).
pub const MAX_WALL_HEIGHT: f64 = 100.0;

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorCode {
    UnknownCommand,
    BadArity,
    UndefinedReference,
    OpeningExceedsHost,
    OverlappingOpenings,
    NonpositiveDimension,
    BadNumber,
    DuplicateId,
    OutOfRange,
    OpenFootprint,
    BadOrder,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::UnknownCommand => "UNKNOWN_COMMAND",
            ErrorCode::BadArity => "BAD_ARITY",
            ErrorCode::UndefinedReference => "UNDEFINED_REFERENCE",
            ErrorCode::OpeningExceedsHost => "OPENING_EXCEEDS_HOST",
            ErrorCode::OverlappingOpenings => "OVERLAPPING_OPENINGS",
            ErrorCode::NonpositiveDimension => "NONPOSITIVE_DIMENSION",
            ErrorCode::BadNumber => "BAD_NUMBER",
            ErrorCode::DuplicateId => "DUPLICATE_ID",
            ErrorCode::OutOfRange => "OUT_OF_RANGE",
            ErrorCode::OpenFootprint => "OPEN_FOOTPRINT",
            ErrorCode::BadOrder => "BAD_ORDER",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A violated scene invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneError {
    pub code: ErrorCode,
    pub detail: String,
}

impl SceneError {
    fn new(code: ErrorCode, detail: impl Into<String>) -> Self {
        Self { code, detail: detail.into() }
    }
}

impl fmt::Display for SceneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.detail)
    }
}

impl std::error::Error for SceneError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wall {
    pub id: String,
    pub start: Point3,
    pub end: Point3,
    pub height: f64,
    pub thickness: f64,
}

impl Wall {
    pub fn length(&self) -> f64 {
        (self.end.x - self.start.x).hypot(self.end.y - self.start.y)
    }
}

/// A window or door. Doors have `sill_height` 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Opening {
    pub id: String,
    pub host_wall: String,
    pub width: f64,
    pub height: f64,
    pub sill_height: f64,
    /// Position of the opening's center along the wall, from the wall midpoint.
    pub center_offset: f64,
}

impl Opening {
    /// Horizontal extent measured from the wall start.
    pub fn span(&self, wall_length: f64) -> (f64, f64) {
        let mid = wall_length / 2.0 + self.center_offset;
        (mid - self.width / 2.0, mid + self.width / 2.0)
    }

    pub fn top(&self) -> f64 {
        self.sill_height + self.height
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpeningKind {
    Window,
    Door,
}

impl OpeningKind {
    pub fn name(self) -> &'static str {
        match self {
            OpeningKind::Window => "window",
            OpeningKind::Door => "door",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Roof {
    /// Closed wall centerline ring at the top of the walls.
    pub footprint: Vec<Point3>,
    pub thickness: f64,
}

impl Roof {
    /// Plan area of the footprint (m²).
    pub fn area(&self) -> f64 {
        let p = &self.footprint;
        let n = p.len();
        ((0..n).map(|i| p[i].x * p[(i + 1) % n].y - p[(i + 1) % n].x * p[i].y).sum::<f64>() / 2.0).abs()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SceneModel {
    pub walls: Vec<Wall>,
    pub windows: Vec<Opening>,
    pub doors: Vec<Opening>,
    pub roof: Option<Roof>,
    pub level_elevation: f64,
}

fn positive(name: &str, v: f64) -> Result<(), SceneError> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(SceneError::new(ErrorCode::NonpositiveDimension, format!("{name} {v}")))
    }
}

impl SceneModel {
    pub fn new(level_elevation: f64) -> Self {
        Self { level_elevation, ..Default::default() }
    }

    pub fn wall(&self, id: &str) -> Option<&Wall> {
        self.walls.iter().find(|w| w.id == id)
    }

    fn id_taken(&self, id: &str) -> bool {
        self.walls.iter().any(|w| w.id == id) || self.openings().any(|(_, o)| o.id == id)
    }

    /// Windows then doors, tagged with their kind.
    pub fn openings(&self) -> impl Iterator<Item = (OpeningKind, &Opening)> {
        self.windows
            .iter()
            .map(|o| (OpeningKind::Window, o))
            .chain(self.doors.iter().map(|o| (OpeningKind::Door, o)))
    }

    pub fn set_level(&mut self, level: f64) -> Result<(), SceneError> {
        if !self.walls.is_empty() {
            return Err(SceneError::new(ErrorCode::BadOrder, "level must precede every wall"));
        }
        self.level_elevation = level;
        Ok(())
    }

    /// Adds a wall from `(x1, y1)` to `(x2, y2)` at the scene level.
    pub fn add_wall(&mut self, id: &str, from: [f64; 2], to: [f64; 2], height: f64, thickness: f64) -> Result<(), SceneError> {
        positive("height", height)?;
        positive("thickness", thickness)?;
        if height > MAX_WALL_HEIGHT {
            return Err(SceneError::new(ErrorCode::OutOfRange, format!("height {height} > {MAX_WALL_HEIGHT}")));
        }
        let z = self.level_elevation;
        let wall = Wall {
            id: id.to_string(),
            start: Point3::new(from[0], from[1], z),
            end: Point3::new(to[0], to[1], z),
            height,
            thickness,
        };
        positive("wall length", wall.length())?;
        if self.id_taken(id) {
            return Err(SceneError::new(ErrorCode::DuplicateId, id));
        }
        self.walls.push(wall);
        Ok(())
    }

    /// Checks an opening against its host and the openings already there.
    fn check_opening(&self, kind: OpeningKind, o: &Opening) -> Result<(), SceneError> {
        let wall = self
            .wall(&o.host_wall)
            .ok_or_else(|| SceneError::new(ErrorCode::UndefinedReference, format!("wall {}", o.host_wall)))?;
        positive("width", o.width)?;
        positive("height", o.height)?;
        if o.sill_height < 0.0 {
            return Err(SceneError::new(ErrorCode::OutOfRange, format!("sill {} < 0", o.sill_height)));
        }
        if kind == OpeningKind::Door && o.sill_height != 0.0 {
            return Err(SceneError::new(ErrorCode::OutOfRange, format!("door sill {} ≠ 0", o.sill_height)));
        }
        let (length, height) = (wall.length(), wall.height);
        if o.width >= length {
            return Err(SceneError::new(ErrorCode::OpeningExceedsHost, format!("width {} ≥ wall length {length}", o.width)));
        }
        if o.top() >= height {
            let detail = match kind {
                OpeningKind::Door => format!("door height {} ≥ wall height {height}", o.height),
                OpeningKind::Window => format!("sill {} + height {} ≥ wall height {height}", o.sill_height, o.height),
            };
            return Err(SceneError::new(ErrorCode::OpeningExceedsHost, detail));
        }
        let (a, b) = o.span(length);
        let bottom_ok = kind == OpeningKind::Door || o.sill_height >= OPENING_MARGIN - EPS;
        if a < OPENING_MARGIN - EPS || b > length - OPENING_MARGIN + EPS || o.top() > height - OPENING_MARGIN + EPS || !bottom_ok {
            return Err(SceneError::new(
                ErrorCode::OpeningExceedsHost,
                format!("{} {} is closer than {OPENING_MARGIN} m to an edge of wall {}", kind.name(), o.id, wall.id),
            ));
        }
        for (_, other) in self.openings().filter(|(_, p)| p.host_wall == o.host_wall && p.id != o.id) {
            let (c, d) = other.span(length);
            let apart_h = a >= d + OPENING_MARGIN - EPS || c >= b + OPENING_MARGIN - EPS;
            let apart_v = o.sill_height >= other.top() + OPENING_MARGIN - EPS
                || other.sill_height >= o.top() + OPENING_MARGIN - EPS;
            if !(apart_h || apart_v) {
                return Err(SceneError::new(
                    ErrorCode::OverlappingOpenings,
                    format!("{} overlaps {} on wall {} (gap under {OPENING_MARGIN} m)", o.id, other.id, wall.id),
                ));
            }
        }
        Ok(())
    }

    pub fn add_opening(&mut self, kind: OpeningKind, opening: Opening) -> Result<(), SceneError> {
        self.check_opening(kind, &opening)?;
        if self.id_taken(&opening.id) {
            return Err(SceneError::new(ErrorCode::DuplicateId, opening.id));
        }
        match kind {
            OpeningKind::Window => self.windows.push(opening),
            OpeningKind::Door => self.doors.push(opening),
        }
        Ok(())
    }

    /// The walls in order as a closed chain, if they form one.
    fn footprint(&self) -> Result<Vec<Point3>, SceneError> {
        let open = |detail: String| SceneError::new(ErrorCode::OpenFootprint, detail);
        if self.walls.len() < 3 {
            return Err(open(format!("{} walls cannot enclose a roof", self.walls.len())));
        }
        let n = self.walls.len();
        for i in 0..n {
            let (w, next) = (&self.walls[i], &self.walls[(i + 1) % n]);
            if w.end.distance(next.start) > EPS {
                return Err(open(format!("wall {} does not end where wall {} starts", w.id, next.id)));
            }
        }
        let top = self.level_elevation + self.walls.iter().map(|w| w.height).fold(0.0, f64::max);
        Ok(self.walls.iter().map(|w| Point3::new(w.start.x, w.start.y, top)).collect())
    }

    /// Flat roof over the wall centerline ring.
    pub fn add_roof(&mut self, thickness: f64) -> Result<(), SceneError> {
        positive("thickness", thickness)?;
        if self.roof.is_some() {
            return Err(SceneError::new(ErrorCode::DuplicateId, "roof"));
        }
        let footprint = self.footprint()?;
        let roof = Roof { footprint, thickness };
        if roof.area() <= EPS {
            return Err(SceneError::new(ErrorCode::OpenFootprint, "footprint encloses no area"));
        }
        self.roof = Some(roof);
        Ok(())
    }

    /// Re-checks every invariant by rebuilding the scene element by element.
    pub fn validate(&self) -> Result<(), SceneError> {
        let mut rebuilt = SceneModel::new(self.level_elevation);
        for w in &self.walls {
            if (w.start.z - self.level_elevation).abs() > EPS || (w.end.z - self.level_elevation).abs() > EPS {
                return Err(SceneError::new(ErrorCode::OutOfRange, format!("wall {} is off the level", w.id)));
            }
            rebuilt.add_wall(&w.id, [w.start.x, w.start.y], [w.end.x, w.end.y], w.height, w.thickness)?;
        }
        for (kind, o) in self.openings() {
            rebuilt.add_opening(kind, o.clone())?;
        }
        if let Some(roof) = &self.roof {
            rebuilt.add_roof(roof.thickness)?;
            if rebuilt.roof.as_ref() != Some(roof) {
                return Err(SceneError::new(ErrorCode::OpenFootprint, "roof footprint differs from the wall ring"));
            }
        }
        Ok(())
    }
}
