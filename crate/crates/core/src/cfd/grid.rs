use crate::error::CfdError;

/// Phase make-up of fluid entering through a pressure boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Composition {
    /// Oil volume fraction.
    pub oil: f64,
    /// Air volume fraction; ignored unless the air phase is enabled.
    pub air: f64,
}

impl Composition {
    pub const WATER: Self = Self { oil: 0.0, air: 0.0 };
    pub const OIL: Self = Self { oil: 1.0, air: 0.0 };
    pub const AIR: Self = Self { oil: 0.0, air: 1.0 };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    /// No-slip, impermeable.
    Wall,
    /// Free-slip, impermeable.
    Symmetry,
    /// Fixed static pressure at the face; fluid may leave or enter.
    PressureOutlet { pressure: f64, inflow: Composition },
}

impl Boundary {
    pub fn outlet(pressure: f64) -> Self {
        Boundary::PressureOutlet {
            pressure,
            inflow: Composition::WATER,
        }
    }

    pub fn is_outlet(&self) -> bool {
        matches!(self, Boundary::PressureOutlet { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

/// Contiguous boundary faces on one side. Faces are numbered by the adjacent
/// cell index along the side: `j` on the left and right, `i` on the bottom
/// and top.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaceRange {
    pub side: Side,
    pub start: usize,
    pub len: usize,
}

impl FaceRange {
    pub fn indices(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len
    }
}

/// Boundary condition overriding a side default on a run of faces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Opening {
    pub faces: FaceRange,
    pub boundary: Boundary,
}

/// Uniform 2D grid with one boundary condition per side plus openings.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    /// Lower-left corner, m.
    pub origin: (f64, f64),
    pub left: Boundary,
    pub right: Boundary,
    pub bottom: Boundary,
    pub top: Boundary,
    pub openings: Vec<Opening>,
}

impl Grid2D {
    /// Closed box with walls on every side.
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64) -> Result<Self, CfdError> {
        if nx < 4 || ny < 4 {
            return Err(CfdError::Geometry(format!(
                "grid must be at least 4x4, got {nx}x{ny}"
            )));
        }
        if !(dx > 0.0 && dy > 0.0 && dx.is_finite() && dy.is_finite()) {
            return Err(CfdError::Geometry(format!(
                "cell sizes must be positive, got dx={dx}, dy={dy}"
            )));
        }
        Ok(Self {
            nx,
            ny,
            dx,
            dy,
            origin: (0.0, 0.0),
            left: Boundary::Wall,
            right: Boundary::Wall,
            bottom: Boundary::Wall,
            top: Boundary::Wall,
            openings: Vec::new(),
        })
    }

    /// Grid of `nx` by `ny` cells covering `width` by `height`.
    pub fn with_extent(nx: usize, ny: usize, width: f64, height: f64) -> Result<Self, CfdError> {
        Self::new(nx, ny, width / nx as f64, height / ny as f64)
    }

    pub fn width(&self) -> f64 {
        self.nx as f64 * self.dx
    }

    pub fn height(&self) -> f64 {
        self.ny as f64 * self.dy
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx * self.dy
    }

    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.origin.0 + (i as f64 + 0.5) * self.dx,
            self.origin.1 + (j as f64 + 0.5) * self.dy,
        )
    }

    pub fn side_len(&self, side: Side) -> usize {
        match side {
            Side::Left | Side::Right => self.ny,
            Side::Bottom | Side::Top => self.nx,
        }
    }

    pub fn set_side(&mut self, side: Side, boundary: Boundary) {
        *match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
            Side::Bottom => &mut self.bottom,
            Side::Top => &mut self.top,
        } = boundary;
    }

    pub fn side_default(&self, side: Side) -> Boundary {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
            Side::Bottom => self.bottom,
            Side::Top => self.top,
        }
    }

    /// Adds an opening; later openings win where ranges overlap.
    pub fn open(&mut self, faces: FaceRange, boundary: Boundary) -> Result<(), CfdError> {
        if faces.len == 0 || faces.start + faces.len > self.side_len(faces.side) {
            return Err(CfdError::Geometry(format!(
                "opening {faces:?} does not fit on a side of {} faces",
                self.side_len(faces.side)
            )));
        }
        self.openings.push(Opening { faces, boundary });
        Ok(())
    }

    /// Condition on face `k` of `side`.
    pub fn face_boundary(&self, side: Side, k: usize) -> Boundary {
        self.openings
            .iter()
            .rev()
            .find(|o| o.faces.side == side && o.faces.indices().contains(&k))
            .map(|o| o.boundary)
            .unwrap_or_else(|| self.side_default(side))
    }

    pub(crate) fn side_table(&self, side: Side) -> Vec<Boundary> {
        (0..self.side_len(side))
            .map(|k| self.face_boundary(side, k))
            .collect()
    }

    /// Sets the pressure on every outlet face of the range.
    pub fn set_outlet_pressure(&mut self, faces: FaceRange, pressure: f64) {
        for o in self.openings.iter_mut().filter(|o| o.faces == faces) {
            if let Boundary::PressureOutlet { pressure: p, .. } = &mut o.boundary {
                *p = pressure;
            }
        }
    }

    pub fn has_outlet(&self) -> bool {
        [Side::Left, Side::Right, Side::Bottom, Side::Top]
            .iter()
            .any(|&s| self.side_table(s).iter().any(Boundary::is_outlet))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_or_degenerate_grids() {
        assert!(Grid2D::new(3, 8, 0.1, 0.1).is_err());
        assert!(Grid2D::new(8, 8, 0.0, 0.1).is_err());
        assert!(Grid2D::new(4, 4, 0.1, 0.1).is_ok());
    }

    #[test]
    fn openings_override_side_defaults() {
        let mut g = Grid2D::new(8, 8, 0.1, 0.1).unwrap();
        let faces = FaceRange {
            side: Side::Right,
            start: 2,
            len: 3,
        };
        g.open(faces, Boundary::outlet(5.0)).unwrap();
        assert_eq!(g.face_boundary(Side::Right, 1), Boundary::Wall);
        assert_eq!(g.face_boundary(Side::Right, 4), Boundary::outlet(5.0));
        assert_eq!(g.face_boundary(Side::Left, 3), Boundary::Wall);
        g.set_outlet_pressure(faces, 7.0);
        assert_eq!(g.face_boundary(Side::Right, 2), Boundary::outlet(7.0));
        assert!(g.has_outlet());
        assert!(g
            .open(
                FaceRange {
                    side: Side::Top,
                    start: 6,
                    len: 3
                },
                Boundary::Wall
            )
            .is_err());
    }
}
