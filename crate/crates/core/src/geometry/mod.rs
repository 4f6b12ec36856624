//! Geometric primitives: points, bodies, collections and their volumes.
//!
//! All bodies are closed sets, so two bodies that merely touch intersect.
//! Coordinate comparisons use the absolute tolerance [`EPS`].

mod union;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounds::unit_ball_volume;
use crate::error::{Error, Result};

pub use union::{
    union_volume, union_volume_boxes, union_volume_mc, union_volume_mc_with_samples, UnionConfig,
    VolumeEstimate, VolumeMethod,
    MAX_EXACT_CELLS,
};

/// Absolute tolerance for coordinate comparisons.
pub const EPS: f64 = 1e-9;

/// A point in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn origin(d: usize) -> Self {
        Point(vec![0.0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn dist(&self, other: &Point) -> f64 {
        dist(&self.0, &other.0)
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BodyKind {
    #[serde(rename = "box")]
    AxisBox,
    Ball,
    #[serde(rename = "rotrect")]
    RotRect,
}

impl fmt::Display for BodyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BodyKind::AxisBox => "box",
            BodyKind::Ball => "ball",
            BodyKind::RotRect => "rotrect",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    /// `Q(x, r)`: the `l∞` ball of radius `r` (half the side length).
    AxisBox,
    /// Euclidean ball of radius `r`.
    Ball,
    /// Planar rectangle with the given half extents, rotated by `angle`
    /// radians about its center.
    RotRect { half_extents: [f64; 2], angle: f64 },
}

impl Shape {
    pub fn kind(&self) -> BodyKind {
        match self {
            Shape::AxisBox => BodyKind::AxisBox,
            Shape::Ball => BodyKind::Ball,
            Shape::RotRect { .. } => BodyKind::RotRect,
        }
    }
}

/// A closed convex body. For rotated rectangles `radius` is the larger
/// half extent and is kept in sync by every constructor and by [`Body::dilate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BodyRepr", into = "BodyRepr")]
pub struct Body {
    center: Point,
    radius: f64,
    shape: Shape,
}

impl Body {
    pub fn axis_box(center: impl Into<Point>, radius: f64) -> Result<Self> {
        Body::validated(center.into(), radius, Shape::AxisBox)
    }

    pub fn ball(center: impl Into<Point>, radius: f64) -> Result<Self> {
        Body::validated(center.into(), radius, Shape::Ball)
    }

    pub fn rot_rect(center: impl Into<Point>, half_extents: [f64; 2], angle: f64) -> Result<Self> {
        let radius = half_extents[0].max(half_extents[1]);
        Body::validated(
            center.into(),
            radius,
            Shape::RotRect {
                half_extents,
                angle,
            },
        )
    }

    fn validated(center: Point, radius: f64, shape: Shape) -> Result<Self> {
        if center.dim() == 0 {
            return Err(Error::InvalidBody("center has no coordinates".into()));
        }
        if !center.is_finite() {
            return Err(Error::InvalidBody("non-finite center coordinate".into()));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidBody(format!("radius must be positive, got {radius}")));
        }
        if let Shape::RotRect {
            half_extents,
            angle,
        } = shape
        {
            if center.dim() != 2 {
                return Err(Error::InvalidBody(format!(
                    "rotated rectangles live in the plane, got d = {}",
                    center.dim()
                )));
            }
            if !half_extents.iter().all(|h| h.is_finite() && *h > 0.0) {
                return Err(Error::InvalidBody("half extents must be positive".into()));
            }
            if !angle.is_finite() {
                return Err(Error::InvalidBody("non-finite angle".into()));
            }
        }
        Ok(Body {
            center,
            radius,
            shape,
        })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn kind(&self) -> BodyKind {
        self.shape.kind()
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// Lebesgue volume.
    pub fn volume(&self) -> f64 {
        let d = self.dim() as i32;
        match self.shape {
            Shape::AxisBox => (2.0 * self.radius).powi(d),
            Shape::Ball => unit_ball_volume(self.dim()) * self.radius.powi(d),
            Shape::RotRect { half_extents, .. } => 4.0 * half_extents[0] * half_extents[1],
        }
    }

    /// Same center, kind and orientation; every linear size scaled by `factor`.
    pub fn dilate(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dilation factor must be positive, got {factor}"
            )));
        }
        let shape = match self.shape {
            Shape::RotRect {
                half_extents,
                angle,
            } => Shape::RotRect {
                half_extents: [half_extents[0] * factor, half_extents[1] * factor],
                angle,
            },
            s => s,
        };
        Ok(Body {
            center: self.center.clone(),
            radius: self.radius * factor,
            shape,
        })
    }

    /// Same shape with a different center.
    pub fn with_center(&self, center: impl Into<Point>) -> Result<Self> {
        Body::validated(center.into(), self.radius, self.shape)
    }

    /// Same center and shape kind with a new radius (boxes and balls only).
    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        match self.shape {
            Shape::RotRect { .. } => self.dilate(radius / self.radius),
            s => Body::validated(self.center.clone(), radius, s),
        }
    }

    /// Closed membership test with tolerance [`EPS`].
    pub fn contains(&self, p: &[f64]) -> bool {
        let c = self.center.coords();
        match self.shape {
            Shape::AxisBox => c.iter().zip(p).all(|(ci, pi)| (pi - ci).abs() <= self.radius + EPS),
            Shape::Ball => dist(c, p) <= self.radius + EPS,
            Shape::RotRect {
                half_extents,
                angle,
            } => {
                let (u, v) = to_local(c, angle, p);
                u.abs() <= half_extents[0] + EPS && v.abs() <= half_extents[1] + EPS
            }
        }
    }

    /// Axis-aligned bounding box as `(lower, upper)` corners.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let c = self.center.coords();
        let half: Vec<f64> = match self.shape {
            Shape::AxisBox | Shape::Ball => vec![self.radius; c.len()],
            Shape::RotRect {
                half_extents: [a, b],
                angle,
            } => {
                let (s, co) = angle.sin_cos();
                vec![
                    (a * co).abs() + (b * s).abs(),
                    (a * s).abs() + (b * co).abs(),
                ]
            }
        };
        (
            c.iter().zip(&half).map(|(x, h)| x - h).collect(),
            c.iter().zip(&half).map(|(x, h)| x + h).collect(),
        )
    }

    /// Closed-set intersection test. Both bodies must have the same
    /// dimension; use [`intersects`] for a checked version.
    pub fn intersects(&self, other: &Body) -> bool {
        assert_eq!(self.dim(), other.dim(), "intersects: dimension mismatch");
        let (a, b) = (self, other);
        let (ca, cb) = (a.center.coords(), b.center.coords());
        match (a.shape, b.shape) {
            (Shape::AxisBox, Shape::AxisBox) => ca
                .iter()
                .zip(cb)
                .all(|(x, y)| (x - y).abs() <= a.radius + b.radius + EPS),
            (Shape::Ball, Shape::Ball) => dist(ca, cb) <= a.radius + b.radius + EPS,
            (Shape::AxisBox, Shape::Ball) => box_ball(ca, a.radius, cb, b.radius),
            (Shape::Ball, Shape::AxisBox) => box_ball(cb, b.radius, ca, a.radius),
            (Shape::Ball, _) => rect_ball(&b.as_rect(), ca, a.radius),
            (_, Shape::Ball) => rect_ball(&a.as_rect(), cb, b.radius),
            _ => rect_rect(&a.as_rect(), &b.as_rect()),
        }
    }

    fn as_rect(&self) -> Rect {
        let c = self.center.coords();
        let (half, angle) = match self.shape {
            Shape::RotRect {
                half_extents,
                angle,
            } => (half_extents, angle),
            _ => ([self.radius, self.radius], 0.0),
        };
        Rect {
            center: [c[0], c[1]],
            half,
            angle,
        }
    }
}

/// Checked intersection test.
pub fn intersects(a: &Body, b: &Body) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(a.intersects(b))
}

fn box_ball(box_c: &[f64], r: f64, ball_c: &[f64], s: f64) -> bool {
    let d2: f64 = box_c
        .iter()
        .zip(ball_c)
        .map(|(b, x)| {
            let nearest = x.clamp(b - r, b + r);
            (x - nearest) * (x - nearest)
        })
        .sum();
    d2.sqrt() <= s + EPS
}

fn to_local(center: &[f64], angle: f64, p: &[f64]) -> (f64, f64) {
    let (s, c) = angle.sin_cos();
    let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
    (c * dx + s * dy, -s * dx + c * dy)
}

struct Rect {
    center: [f64; 2],
    half: [f64; 2],
    angle: f64,
}

impl Rect {
    fn axes(&self) -> [[f64; 2]; 2] {
        let (s, c) = self.angle.sin_cos();
        [[c, s], [-s, c]]
    }

    /// Half-width of the projection onto a unit axis.
    fn radius_along(&self, axis: [f64; 2]) -> f64 {
        let [u, v] = self.axes();
        self.half[0] * (u[0] * axis[0] + u[1] * axis[1]).abs()
            + self.half[1] * (v[0] * axis[0] + v[1] * axis[1]).abs()
    }
}

/// Separating-axis test for two rectangles.
fn rect_rect(a: &Rect, b: &Rect) -> bool {
    let t = [b.center[0] - a.center[0], b.center[1] - a.center[1]];
    a.axes().into_iter().chain(b.axes()).all(|axis| {
        let sep = (t[0] * axis[0] + t[1] * axis[1]).abs();
        sep <= a.radius_along(axis) + b.radius_along(axis) + EPS
    })
}

fn rect_ball(r: &Rect, c: &[f64], s: f64) -> bool {
    let (u, v) = to_local(&r.center, r.angle, c);
    let du = u - u.clamp(-r.half[0], r.half[0]);
    let dv = v - v.clamp(-r.half[1], r.half[1]);
    (du * du + dv * dv).sqrt() <= s + EPS
}

#[derive(Serialize, Deserialize)]
struct BodyRepr {
    kind: BodyKind,
    center: Vec<f64>,
    radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    half_extents: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
}

impl TryFrom<BodyRepr> for Body {
    type Error = Error;

    fn try_from(r: BodyRepr) -> Result<Self> {
        match r.kind {
            BodyKind::AxisBox => Body::axis_box(r.center, r.radius),
            BodyKind::Ball => Body::ball(r.center, r.radius),
            BodyKind::RotRect => {
                let half = r.half_extents.ok_or_else(|| {
                    Error::InvalidBody("rotrect requires half_extents".into())
                })?;
                Body::rot_rect(r.center, half, r.angle.unwrap_or(0.0))
            }
        }
    }
}

impl From<Body> for BodyRepr {
    fn from(b: Body) -> Self {
        let (half_extents, angle) = match b.shape {
            Shape::RotRect {
                half_extents,
                angle,
            } => (Some(half_extents), Some(angle)),
            _ => (None, None),
        };
        BodyRepr {
            kind: b.kind(),
            center: b.center.0,
            radius: b.radius,
            half_extents,
            angle,
        }
    }
}

/// A finite, non-empty collection of bodies of a common dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CollectionRepr")]
pub struct Collection {
    dimension: usize,
    #[serde(default)]
    label: String,
    bodies: Vec<Body>,
}

#[derive(Deserialize)]
struct CollectionRepr {
    dimension: usize,
    #[serde(default)]
    label: String,
    bodies: Vec<Body>,
}

impl TryFrom<CollectionRepr> for Collection {
    type Error = Error;
    fn try_from(r: CollectionRepr) -> Result<Self> {
        Collection::new(r.dimension, r.label, r.bodies)
    }
}

impl Collection {
    pub fn new(dimension: usize, label: impl Into<String>, bodies: Vec<Body>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidCollection("dimension must be at least 1".into()));
        }
        if bodies.is_empty() {
            return Err(Error::InvalidCollection("collection is empty".into()));
        }
        if let Some(b) = bodies.iter().find(|b| b.dim() != dimension) {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                found: b.dim(),
            });
        }
        Ok(Collection {
            dimension,
            label: label.into(),
            bodies,
        })
    }

    /// Collection of closed intervals `[lo, hi]` as one-dimensional boxes.
    pub fn intervals(intervals: &[(f64, f64)]) -> Result<Self> {
        let bodies = intervals
            .iter()
            .map(|&(lo, hi)| Body::axis_box(vec![(lo + hi) / 2.0], (hi - lo) / 2.0))
            .collect::<Result<Vec<_>>>()?;
        Collection::new(1, "intervals", bodies)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidCollection(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("collection serialises")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn bodies(&self) -> &[Body] {
        &self.bodies
    }

    pub fn len(&self) -> usize {
        self.bodies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bodies.is_empty()
    }

    /// Subcollection with the given indices (in the given order).
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let bodies = indices.iter().map(|&i| self.bodies[i].clone()).collect();
        Collection::new(self.dimension, self.label.clone(), bodies)
    }

    pub fn is_kind(&self, kind: BodyKind) -> bool {
        self.bodies.iter().all(|b| b.kind() == kind)
    }

    pub(crate) fn require_kind(&self, operation: &'static str, kinds: &[BodyKind]) -> Result<BodyKind> {
        let first = self.bodies[0].kind();
        if !kinds.contains(&first) || !self.is_kind(first) {
            return Err(Error::KindMismatch {
                operation,
                expected: match kinds {
                    [BodyKind::AxisBox] => "axis-parallel box",
                    [BodyKind::Ball] => "ball",
                    _ => "a single kind of box or ball",
                },
            });
        }
        Ok(first)
    }

    /// True when all radii agree within [`EPS`].
    pub fn is_congruent(&self) -> bool {
        let r = self.bodies[0].radius();
        self.bodies.iter().all(|b| (b.radius() - r).abs() <= EPS)
    }

    pub(crate) fn require_congruent(&self, operation: &'static str) -> Result<f64> {
        if self.is_congruent() {
            Ok(self.bodies[0].radius())
        } else {
            Err(Error::NotCongruent { operation })
        }
    }

    pub fn total_volume(&self) -> f64 {
        self.bodies.iter().map(Body::volume).sum()
    }

    pub fn max_volume(&self) -> f64 {
        self.bodies.iter().map(Body::volume).fold(0.0, f64::max)
    }

    /// Bounding box of the union.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dimension];
        let mut hi = vec![f64::NEG_INFINITY; self.dimension];
        for b in &self.bodies {
            let (l, h) = b.bounding_box();
            for k in 0..self.dimension {
                lo[k] = lo[k].min(l[k]);
                hi[k] = hi[k].max(h[k]);
            }
        }
        (lo, hi)
    }

    /// True when no two of the given bodies intersect.
    pub fn is_disjoint_subset(&self, indices: &[usize]) -> bool {
        indices.iter().enumerate().all(|(k, &i)| {
            indices[k + 1..]
                .iter()
                .all(|&j| !self.bodies[i].intersects(&self.bodies[j]))
        })
    }

    /// Diameter of the union of equal-radius balls: the largest center
    /// distance plus one diameter.
    pub fn diameter(&self) -> Result<f64> {
        self.require_kind("diameter", &[BodyKind::Ball])?;
        let r = self.require_congruent("diameter")?;
        let mut best = 0.0f64;
        for (i, a) in self.bodies.iter().enumerate() {
            for b in &self.bodies[i + 1..] {
                best = best.max(a.center().dist(b.center()));
            }
        }
        Ok(best + 2.0 * r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_square(x: f64, y: f64) -> Body {
        Body::axis_box(vec![x, y], 0.5).unwrap()
    }

    #[test]
    fn volumes() {
        assert_eq!(Body::axis_box(vec![0.0, 0.0], 1.0).unwrap().volume(), 4.0);
        assert!((Body::ball(vec![0.0, 0.0], 1.0).unwrap().volume() - PI).abs() < 1e-12);
        let cube = Body::axis_box(vec![0.0; 3], 1.0).unwrap();
        assert!((cube.dilate(3.0).unwrap().volume() / cube.volume() - 27.0).abs() < 1e-12);
        let r = Body::rot_rect(vec![0.0, 0.0], [0.5, 0.25], 0.3).unwrap();
        assert!((r.volume() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dilation() {
        let b = Body::axis_box(vec![1.0, -2.0], 1.0).unwrap();
        let t = b.dilate(3.0).unwrap();
        assert_eq!(t.center(), b.center());
        assert_eq!(t.radius(), 3.0);
        assert_eq!(b.dilate(1.0).unwrap(), b);
        assert!(b.dilate(0.0).is_err());
        let r = Body::rot_rect(vec![0.0, 0.0], [1.0, 0.5], 1.0).unwrap().dilate(2.0).unwrap();
        assert_eq!(
            *r.shape(),
            Shape::RotRect {
                half_extents: [2.0, 1.0],
                angle: 1.0
            }
        );
        assert_eq!(r.radius(), 2.0);
    }

    #[test]
    fn touching_intervals_intersect() {
        let c = Collection::intervals(&[(0.0, 1.0), (1.0, 2.0)]).unwrap();
        assert!(c.bodies()[0].intersects(&c.bodies()[1]));
    }

    #[test]
    fn far_balls_do_not_intersect() {
        let a = Body::ball(vec![0.0, 0.0], 1.0).unwrap();
        let b = Body::ball(vec![5.0, 0.0], 1.0).unwrap();
        assert!(!a.intersects(&b));
    }

    #[test]
    fn four_squares_pairwise_intersect() {
        let sq = [
            unit_square(0.5, 0.5),
            unit_square(-0.5, 0.5),
            unit_square(-0.5, -0.5),
            unit_square(0.5, -0.5),
        ];
        for a in &sq {
            for b in &sq {
                assert!(a.intersects(b));
            }
        }
    }

    #[test]
    fn mixed_box_ball() {
        let b = Body::axis_box(vec![0.0, 0.0], 1.0).unwrap();
        // corner at (1,1); ball touching it along the diagonal
        let off = 1.0 + std::f64::consts::FRAC_1_SQRT_2;
        let touching = Body::ball(vec![off, off], 1.0).unwrap();
        assert!(b.intersects(&touching));
        let apart = Body::ball(vec![1.8, 1.8], 1.0).unwrap();
        assert!(!b.intersects(&apart));
        assert!(!apart.intersects(&b));
        assert!(b.intersects(&Body::ball(vec![1.9, 0.0], 1.0).unwrap()));
    }

    #[test]
    fn rotated_rectangles() {
        let thin = |angle: f64, x: f64| Body::rot_rect(vec![x, 0.0], [0.5, 0.01], angle).unwrap();
        // Crossing sticks share the center.
        assert!(thin(0.0, 0.0).intersects(&thin(PI / 2.0, 0.0)));
        // Parallel sticks far apart.
        assert!(!thin(PI / 2.0, 0.0).intersects(&thin(PI / 2.0, 0.1)));
        // A diagonal stick misses a square the axis test alone would report.
        let diag = Body::rot_rect(vec![0.0, 0.0], [1.0, 0.05], PI / 4.0).unwrap();
        let sq = Body::axis_box(vec![0.9, -0.9], 0.5).unwrap();
        assert!(!diag.intersects(&sq));
        assert!(!sq.intersects(&diag));
        let disk = Body::ball(vec![0.0, 0.5], 0.2).unwrap();
        assert!(!diag.intersects(&disk));
        assert!(diag.intersects(&Body::ball(vec![0.0, 0.5], 0.5).unwrap()));
    }

    #[test]
    fn checked_intersects_rejects_dimension_mismatch() {
        let a = Body::ball(vec![0.0], 1.0).unwrap();
        let b = Body::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert_eq!(
            intersects(&a, &b),
            Err(Error::DimensionMismatch {
                expected: 1,
                found: 2
            })
        );
    }

    #[test]
    fn invalid_bodies() {
        assert!(Body::axis_box(vec![0.0], 0.0).is_err());
        assert!(Body::ball(vec![f64::NAN], 1.0).is_err());
        assert!(Body::rot_rect(vec![0.0, 0.0, 0.0], [1.0, 1.0], 0.0).is_err());
        assert!(Body::rot_rect(vec![0.0, 0.0], [1.0, -1.0], 0.0).is_err());
        assert!(Collection::new(2, "", vec![]).is_err());
    }

    #[test]
    fn diameters() {
        let balls = |cs: &[f64]| {
            Collection::new(
                1,
                "",
                cs.iter().map(|&x| Body::ball(vec![x], 1.0).unwrap()).collect(),
            )
            .unwrap()
        };
        assert_eq!(balls(&[0.0]).diameter().unwrap(), 2.0);
        assert_eq!(balls(&[0.0, 3.0]).diameter().unwrap(), 5.0);
        assert_eq!(balls(&[0.0, 2.0, 4.0]).diameter().unwrap(), 6.0);
        let boxes = Collection::intervals(&[(0.0, 1.0)]).unwrap();
        assert!(matches!(boxes.diameter(), Err(Error::KindMismatch { .. })));
    }

    #[test]
    fn json_schema() {
        let s = r#"{"dimension": 2, "label": "t", "bodies": [
            {"kind": "box", "center": [0, 0], "radius": 1},
            {"kind": "ball", "center": [3, 0], "radius": 0.5},
            {"kind": "rotrect", "center": [0, 3], "radius": 1, "half_extents": [1, 0.25], "angle": 0.5}
        ]}"#;
        let c = Collection::from_json(s).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.bodies()[2].kind(), BodyKind::RotRect);
        let back = Collection::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert!(Collection::from_json(r#"{"dimension": 2, "bodies": [{"kind": "box", "center": [0], "radius": 1}]}"#).is_err());
        assert!(Collection::from_json(r#"{"dimension": 2, "bodies": [{"kind": "rotrect", "center": [0, 0], "radius": 1}]}"#).is_err());
    }
}
