//! Toroidal world arithmetic and circular statistics.
//!
//! Angles are in degrees, 0° along +x, counterclockwise positive. Every
//! position lives in the half-open box `[0, width) × [0, height)` and
//! distances use the minimal wrapped difference on each axis.

use std::f64::consts::TAU;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("world extents must be positive and finite, got {width} x {height}")]
    InvalidWorld { width: f64, height: f64 },
    #[error("non-finite coordinate ({x}, {y})")]
    NonFinite { x: f64, y: f64 },
    #[error("undefined mean: resultant vector is zero")]
    UndefinedMean,
    #[error("cannot average an empty list")]
    Empty,
}

/// Rectangle with opposite edges identified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusWorld {
    width: f64,
    height: f64,
}

impl TorusWorld {
    pub fn new(width: f64, height: f64) -> Result<Self, GeometryError> {
        if !(width.is_finite() && height.is_finite() && width > 0.0 && height > 0.0) {
            return Err(GeometryError::InvalidWorld { width, height });
        }
        Ok(Self { width, height })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    /// Largest possible torus distance between two points.
    pub fn max_distance(&self) -> f64 {
        (self.width / 2.0).hypot(self.height / 2.0)
    }
}

impl Default for TorusWorld {
    fn default() -> Self {
        Self {
            width: 100.0,
            height: 100.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    /// Builds a position without wrapping. Callers outside this module should
    /// go through [`wrap`] unless the coordinates are known to be in-world.
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Translates by `v` and wraps back into the world.
    pub fn translate(self, v: Vec2, world: &TorusWorld) -> Position {
        wrap_axis_pair(self.x + v.dx, self.y + v.dy, world)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub dx: f64,
    pub dy: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { dx: 0.0, dy: 0.0 };

    pub const fn new(dx: f64, dy: f64) -> Self {
        Self { dx, dy }
    }

    pub fn norm(self) -> f64 {
        self.dx.hypot(self.dy)
    }

    pub fn scale(self, k: f64) -> Vec2 {
        Vec2::new(self.dx * k, self.dy * k)
    }

    pub fn is_zero(self) -> bool {
        self.dx == 0.0 && self.dy == 0.0
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;

    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.dx + rhs.dx, self.dy + rhs.dy)
    }
}

impl std::iter::Sum for Vec2 {
    fn sum<I: Iterator<Item = Vec2>>(iter: I) -> Vec2 {
        iter.fold(Vec2::ZERO, |a, b| a + b)
    }
}

/// Heading in degrees, always normalized to `[0, 360)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct HeadingDeg(f64);

impl HeadingDeg {
    pub fn new(degrees: f64) -> Self {
        let d = degrees.rem_euclid(360.0);
        // rem_euclid can round up to the modulus for tiny negative inputs.
        HeadingDeg(if d >= 360.0 { 0.0 } else { d })
    }

    pub fn degrees(self) -> f64 {
        self.0
    }

    pub fn unit(self) -> Vec2 {
        let r = self.0.to_radians();
        Vec2::new(r.cos(), r.sin())
    }

    /// Direction of `v`, or `None` for the zero vector.
    pub fn of_vector(v: Vec2) -> Option<HeadingDeg> {
        if v.is_zero() {
            None
        } else {
            Some(HeadingDeg::new(v.dy.atan2(v.dx).to_degrees()))
        }
    }
}

fn wrap_axis(v: f64, extent: f64) -> f64 {
    let r = v.rem_euclid(extent);
    if r >= extent {
        0.0
    } else {
        r
    }
}

fn wrap_axis_pair(x: f64, y: f64, world: &TorusWorld) -> Position {
    Position::new(wrap_axis(x, world.width), wrap_axis(y, world.height))
}

fn axis_delta(from: f64, to: f64, extent: f64) -> f64 {
    let mut d = to - from;
    let half = extent / 2.0;
    if d > half {
        d -= extent;
    } else if d < -half {
        d += extent;
    }
    d
}

pub fn wrap(x: f64, y: f64, world: &TorusWorld) -> Result<Position, GeometryError> {
    if !(x.is_finite() && y.is_finite()) {
        return Err(GeometryError::NonFinite { x, y });
    }
    Ok(wrap_axis_pair(x, y, world))
}

/// Minimal displacement taking `a` to `b`.
pub fn torus_delta(a: Position, b: Position, world: &TorusWorld) -> Vec2 {
    Vec2::new(
        axis_delta(a.x, b.x, world.width),
        axis_delta(a.y, b.y, world.height),
    )
}

pub fn torus_distance(a: Position, b: Position, world: &TorusWorld) -> f64 {
    torus_delta(a, b, world).norm()
}

// Below this resultant length (per input vector) a mean direction is treated
// as undefined.
const RESULTANT_EPS: f64 = 1e-9;

fn mean_angle_rad(angles: impl Iterator<Item = f64>) -> Result<f64, GeometryError> {
    let (mut c, mut s, mut n) = (0.0, 0.0, 0usize);
    for a in angles {
        c += a.cos();
        s += a.sin();
        n += 1;
    }
    if n == 0 {
        return Err(GeometryError::Empty);
    }
    if c.hypot(s) <= RESULTANT_EPS * n as f64 {
        return Err(GeometryError::UndefinedMean);
    }
    Ok(s.atan2(c))
}

/// Direction of the sum of unit vectors.
pub fn circular_mean(headings: &[HeadingDeg]) -> Result<HeadingDeg, GeometryError> {
    mean_angle_rad(headings.iter().map(|h| h.0.to_radians()))
        .map(|r| HeadingDeg::new(r.to_degrees()))
}

/// Minimal angular difference, in `[0, 180]`.
pub fn heading_diff(a: HeadingDeg, b: HeadingDeg) -> f64 {
    let d = (a.0 - b.0).rem_euclid(360.0);
    d.min(360.0 - d)
}

/// Signed shortest rotation from `current` to `target`, in `[-180, 180)`.
fn signed_turn(current: HeadingDeg, target: HeadingDeg) -> f64 {
    (target.0 - current.0 + 180.0).rem_euclid(360.0) - 180.0
}

/// Rotates `current` toward `target` by at most `max_turn` degrees.
///
/// An exactly antipodal target is approached counterclockwise.
pub fn turn_towards(current: HeadingDeg, target: HeadingDeg, max_turn: f64) -> HeadingDeg {
    let mut turn = signed_turn(current, target);
    if turn <= -180.0 {
        turn = 180.0;
    }
    if turn.abs() <= max_turn {
        target
    } else {
        HeadingDeg::new(current.0 + max_turn.copysign(turn))
    }
}

/// Per-axis circular mean of positions; an axis with zero resultant falls
/// back to the arithmetic mean of its coordinates.
pub fn torus_centroid(points: &[Position], world: &TorusWorld) -> Result<Position, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::Empty);
    }
    let axis = |coords: &dyn Fn(&Position) -> f64, extent: f64| -> f64 {
        let scale = TAU / extent;
        match mean_angle_rad(points.iter().map(|p| coords(p) * scale)) {
            Ok(angle) => angle / scale,
            Err(_) => points.iter().map(coords).sum::<f64>() / points.len() as f64,
        }
    };
    let x = axis(&|p| p.x, world.width);
    let y = axis(&|p| p.y, world.height);
    Ok(wrap_axis_pair(x, y, world))
}
