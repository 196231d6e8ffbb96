use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ErrorCode, Opening, OpeningKind, SceneError, SceneModel, DEFAULT_SILL};

/// Inputs of a one-room building, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoomParams {
    pub length: f64,
    pub width: f64,
    pub wall_height: f64,
    pub wall_thickness: f64,
    pub window_width: f64,
    pub window_height: f64,
    pub door_width: f64,
    pub door_height: f64,
    pub level: f64,
}

impl RoomParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        length: f64,
        width: f64,
        wall_height: f64,
        wall_thickness: f64,
        window_width: f64,
        window_height: f64,
        door_width: f64,
        door_height: f64,
        level: f64,
    ) -> Self {
        Self { length, width, wall_height, wall_thickness, window_width, window_height, door_width, door_height, level }
    }
}

/// The room cannot hold the requested openings.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", .0.detail)]
pub struct FitError(pub SceneError);

impl FitError {
    pub fn code(&self) -> ErrorCode {
        self.0.code
    }
}

/// Four walls counterclockwise from the origin, a centered window on each,
/// a door on the first wall and a flat roof. On the first wall the door sits
/// a quarter length left of center and the window a quarter length right.
pub fn build_room(p: &RoomParams) -> Result<SceneModel, FitError> {
    let mut scene = SceneModel::new(p.level);
    let (l, w) = (p.length, p.width);
    let corners = [[0.0, 0.0], [l, 0.0], [l, w], [0.0, w]];
    for i in 0..4 {
        scene.add_wall(&format!("w{}", i + 1), corners[i], corners[(i + 1) % 4], p.wall_height, p.wall_thickness).map_err(FitError)?;
    }
    scene
        .add_opening(
            OpeningKind::Door,
            Opening {
                id: "d1".into(),
                host_wall: "w1".into(),
                width: p.door_width,
                height: p.door_height,
                sill_height: 0.0,
                center_offset: -l / 4.0,
            },
        )
        .map_err(FitError)?;
    for i in 0..4 {
        let window = Opening {
            id: format!("win{}", i + 1),
            host_wall: format!("w{}", i + 1),
            width: p.window_width,
            height: p.window_height,
            sill_height: DEFAULT_SILL,
            center_offset: if i == 0 { l / 4.0 } else { 0.0 },
        };
        scene.add_opening(OpeningKind::Window, window).map_err(FitError)?;
    }
    scene.add_roof(p.wall_thickness).map_err(FitError)?;
    Ok(scene)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{run_scene_script, to_script};

    fn reference() -> RoomParams {
        RoomParams::new(6.0, 4.0, 3.0, 0.2, 1.0, 1.2, 0.9, 2.1, 0.0)
    }

    #[test]
    fn reference_room() {
        let s = build_room(&reference()).unwrap();
        assert_eq!((s.walls.len(), s.windows.len(), s.doors.len()), (4, 4, 1));
        assert_eq!(s.roof.as_ref().unwrap().area(), 24.0);
        assert_eq!(run_scene_script(&to_script(&s)).unwrap(), s);
    }

    #[test]
    fn fit_errors() {
        let wide = RoomParams { window_width: 10.0, ..reference() };
        assert_eq!(build_room(&wide).unwrap_err().code(), ErrorCode::OpeningExceedsHost);
        let tall = RoomParams { door_height: 3.5, ..reference() };
        assert_eq!(build_room(&tall).unwrap_err().to_string(), "door height 3.5 ≥ wall height 3");
        let flat = RoomParams { wall_height: 0.0, ..reference() };
        assert_eq!(build_room(&flat).unwrap_err().code(), ErrorCode::NonpositiveDimension);
    }
}
