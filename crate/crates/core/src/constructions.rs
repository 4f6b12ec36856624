//! Extremal families, the Ajtai almost-counterexample and its composition.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist, union_volume, Body, BodyKind, Collection, UnionConfig, EPS};
use crate::oracle::{IntersectionGraph, Oracle, OracleResult};

const AJTAI_JSON: &str = include_str!("../../../data/ajtai52.json");

/// Axis-parallel rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        let r = Rect { x0, y0, x1, y1 };
        if [x0, y0, x1, y1].iter().all(|v| v.is_finite()) && x0 < x1 && y0 < y1 {
            Ok(r)
        } else {
            Err(Error::InvalidParameter(format!("degenerate rectangle {r}")))
        }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    fn holds(&self, b: &Body) -> bool {
        let (lo, hi) = b.bounding_box();
        lo[0] >= self.x0 - EPS && lo[1] >= self.y0 - EPS && hi[0] <= self.x1 + EPS && hi[1] <= self.y1 + EPS
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.x0, self.y0, self.x1, self.y1)
    }
}

impl FromStr for Rect {
    type Err = Error;

    /// Parses `x0,y0,x1,y1`.
    fn from_str(s: &str) -> Result<Self> {
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidParameter(format!("rectangle {s:?}: {e}")))?;
        match v[..] {
            [x0, y0, x1, y1] => Rect::new(x0, y0, x1, y1),
            _ => Err(Error::InvalidParameter(format!("rectangle {s:?} needs four numbers"))),
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point in the Euclidean ball of radius `r` about the origin.
fn uniform_in_ball(rng: &mut ChaCha8Rng, d: usize, r: f64) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            let scale = r * rng.random::<f64>().powf(1.0 / d as f64) / norm;
            return g.into_iter().map(|x| x * scale).collect();
        }
    }
}

/// Quadrant squares of `[-1, 1]^2`, all sharing the origin.
pub fn four_squares() -> Collection {
    let sq = |x: f64, y: f64| Body::axis_box(vec![x, y], 0.5).expect("valid square");
    Collection::new(
        2,
        "four-squares",
        vec![sq(0.5, 0.5), sq(-0.5, 0.5), sq(-0.5, -0.5), sq(0.5, -0.5)],
    )
    .expect("valid collection")
}

/// `n` unit translates of `K` (cube or ball) with centers uniform in `K`,
/// so every member contains the origin.
pub fn translate_net(kind: BodyKind, d: usize, n: usize, seed: u64) -> Result<Collection> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidParameter("translate_net needs d >= 1 and n >= 1".into()));
    }
    let mut rng = rng(seed);
    let bodies = (0..n)
        .map(|_| match kind {
            BodyKind::AxisBox => {
                let x: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect();
                Body::axis_box(x, 1.0)
            }
            BodyKind::Ball => Body::ball(uniform_in_ball(&mut rng, d, 1.0), 1.0),
            BodyKind::RotRect => Err(Error::InvalidParameter("translate_net supports box and ball".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    Collection::new(d, format!("translate-net {kind:?} d={d} n={n} seed={seed}"), bodies)
}

/// `n` congruent `1 x 1/n` rectangles through the origin at angles `k pi / n`.
pub fn pinwheel(n: usize) -> Result<Collection> {
    if n == 0 {
        return Err(Error::InvalidParameter("pinwheel needs n >= 1".into()));
    }
    let bodies = (0..n)
        .map(|k| {
            let angle = k as f64 * std::f64::consts::PI / n as f64;
            Body::rot_rect(vec![0.0, 0.0], [0.5, 0.5 / n as f64], angle)
        })
        .collect::<Result<Vec<_>>>()?;
    Collection::new(2, format!("pinwheel n={n}"), bodies)
}

/// `n` unit balls with centers uniform in the radius-`radius` ball.
pub fn ball_net(d: usize, radius: f64, n: usize, seed: u64) -> Result<Collection> {
    if d == 0 || n == 0 || !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "ball_net needs d >= 1, n >= 1 and radius >= 0 (got d={d}, n={n}, radius={radius})"
        )));
    }
    let mut rng = rng(seed);
    let bodies = (0..n)
        .map(|_| Body::ball(uniform_in_ball(&mut rng, d, radius), 1.0))
        .collect::<Result<Vec<_>>>()?;
    Collection::new(d, format!("ball-net d={d} R={radius} n={n} seed={seed}"), bodies)
}

/// Unit balls that pairwise intersect: candidates uniform in the radius-2
/// ball are kept when within distance 2 of every kept center.
pub fn pairwise_intersecting_balls(d: usize, n: usize, seed: u64) -> Result<Collection> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidParameter("needs d >= 1 and n >= 1".into()));
    }
    let mut rng = rng(seed);
    let mut centers: Vec<Vec<f64>> = vec![vec![0.0; d]];
    let mut tries = 0;
    while centers.len() < n && tries < 1000 * n {
        tries += 1;
        let x = uniform_in_ball(&mut rng, d, 2.0);
        if centers.iter().all(|c| dist(c, &x) <= 2.0) {
            centers.push(x);
        }
    }
    let bodies = centers
        .into_iter()
        .map(|x| Body::ball(x, 1.0))
        .collect::<Result<Vec<_>>>()?;
    Collection::new(d, format!("pairwise-intersecting d={d} seed={seed}"), bodies)
}

/// Three centers with `|x1 - x2| > 2 sqrt 3` and `|x - x1|, |x - x2| <= 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MidpointInstance {
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub x: Vec<f64>,
}

impl MidpointInstance {
    /// Random instance in a random position and orientation.
    pub fn random(d: usize, seed: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter("midpoint instances need d >= 2".into()));
        }
        let mut rng = rng(seed);
        let gap = 2.0 * 3f64.sqrt();
        loop {
            let sep = rng.random_range(gap..=4.0);
            if sep <= gap {
                continue;
            }
            let shift: Vec<f64> = (0..d).map(|_| rng.random_range(-5.0..5.0)).collect();
            let dir = uniform_in_ball(&mut rng, d, 1.0);
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-6 {
                continue;
            }
            let x1: Vec<f64> = (0..d).map(|k| shift[k] - 0.5 * sep * dir[k] / norm).collect();
            let x2: Vec<f64> = (0..d).map(|k| shift[k] + 0.5 * sep * dir[k] / norm).collect();
            for _ in 0..1000 {
                let off = uniform_in_ball(&mut rng, d, 2.0);
                let x: Vec<f64> = (0..d).map(|k| x1[k] + off[k]).collect();
                if dist(&x, &x2) <= 2.0 {
                    return Ok(MidpointInstance { x1, x2, x });
                }
            }
        }
    }

    pub fn is_valid(&self) -> bool {
        dist(&self.x1, &self.x2) > 2.0 * 3f64.sqrt() && dist(&self.x, &self.x1) <= 2.0 && dist(&self.x, &self.x2) <= 2.0
    }

    /// The midpoint of `x1 x2` lies in the unit ball about `x`.
    pub fn midpoint_covered(&self) -> bool {
        let mid: Vec<f64> = self.x1.iter().zip(&self.x2).map(|(a, b)| 0.5 * (a + b)).collect();
        dist(&mid, &self.x) <= 1.0 + EPS
    }
}

/// The 52-square almost-counterexample (sides 1 and 2) in `[0, 14] x [0, 6]`.
pub fn ajtai_almost_counterexample() -> Result<Collection> {
    let c = Collection::from_json(AJTAI_JSON).map_err(|e| Error::Asset(format!("ajtai52.json: {e}")))?;
    if c.len() != 52 || c.dimension() != 2 || !c.is_kind(BodyKind::AxisBox) {
        return Err(Error::Asset("ajtai52.json: expected 52 planar squares".into()));
    }
    Ok(c)
}

/// Enclosing rectangle of [`ajtai_almost_counterexample`], read from its label.
pub fn ajtai_rectangle() -> Result<Rect> {
    let c = ajtai_almost_counterexample()?;
    rect_from_label(c.label()).ok_or_else(|| Error::Asset("ajtai52.json: label lacks R=".into()))
}

/// Parses a trailing `R=x0,y0,x1,y1` from a collection label.
pub fn rect_from_label(label: &str) -> Option<Rect> {
    label.split_whitespace().find_map(|w| w.strip_prefix("R=")?.parse().ok())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AjtaiReport {
    pub total_area: f64,
    pub best_unconstrained: OracleResult,
    /// Best selection avoiding every square on the lower side of `R`.
    pub best_constrained: OracleResult,
    /// No disjoint subcollection exceeds a quarter of the area.
    pub property1_holds: bool,
    /// Avoiding the bottom row stays strictly below a quarter.
    pub property2_holds: bool,
    pub bottom_row_indices: Vec<usize>,
}

/// Checks both almost-counterexample properties with the exact oracle.
pub fn verify_almost_counterexample(c: &Collection, rect: &Rect) -> Result<AjtaiReport> {
    verify_with(c, rect, &Oracle::default())
}

pub fn verify_with(c: &Collection, rect: &Rect, oracle: &Oracle) -> Result<AjtaiReport> {
    if c.dimension() != 2 || !c.is_kind(BodyKind::AxisBox) {
        return Err(Error::KindMismatch {
            operation: "verify_almost_counterexample",
            expected: "planar square",
        });
    }
    if let Some(i) = c.bodies().iter().position(|b| !rect.holds(b)) {
        return Err(Error::InvalidCollection(format!("square {i} is not inside R = {rect}")));
    }
    let bottom_row_indices: Vec<usize> = c
        .bodies()
        .iter()
        .enumerate()
        .filter(|(_, b)| (b.center().coords()[1] - b.radius() - rect.y0).abs() <= EPS)
        .map(|(i, _)| i)
        .collect();
    let best_unconstrained = oracle.max_disjoint_volume(c, &[])?;
    let best_constrained = oracle.max_disjoint_volume(c, &bottom_row_indices)?;
    let total_area = best_unconstrained.union_volume.value;
    let tol = 1e-9 * total_area;
    Ok(AjtaiReport {
        total_area,
        property1_holds: best_unconstrained.selected_volume <= total_area / 4.0 + tol,
        property2_holds: best_constrained.selected_volume < total_area / 4.0 - tol,
        best_unconstrained,
        best_constrained,
        bottom_row_indices,
    })
}

/// Similarity `p -> rot(scale p) + translation` with `quarter_turns`
/// counter-clockwise quarter rotations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub quarter_turns: u8,
    pub scale: f64,
    pub translation: [f64; 2],
}

fn quarter_turn(q: u8, p: [f64; 2]) -> [f64; 2] {
    match q % 4 {
        0 => p,
        1 => [-p[1], p[0]],
        2 => [-p[0], -p[1]],
        _ => [p[1], -p[0]],
    }
}

impl Placement {
    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        let q = quarter_turn(self.quarter_turns, [self.scale * p[0], self.scale * p[1]]);
        [q[0] + self.translation[0], q[1] + self.translation[1]]
    }
}

/// Slot `k` of the composition: the unit square outside unit square `k`,
/// rotated clockwise by `k` quarter turns from `[0,1] x [1,2]`.
fn slot(k: usize) -> Rect {
    let q = ((4 - k % 4) % 4) as u8;
    let a = quarter_turn(q, [0.0, 1.0]);
    let b = quarter_turn(q, [1.0, 2.0]);
    Rect {
        x0: a[0].min(b[0]),
        y0: a[1].min(b[1]),
        x1: a[0].max(b[0]),
        y1: a[1].max(b[1]),
    }
}

/// Pinwheel placement: copy `k` is scaled to unit width, sits with its
/// bottom side on the outer side of unit square `k`, and is the quarter
/// turn of copy `k - 1` clockwise about the origin. Unit squares are
/// ordered top-right, bottom-right, bottom-left, top-left.
pub fn default_placements(rect: &Rect) -> [Placement; 4] {
    let s = 1.0 / rect.width();
    std::array::from_fn(|k| {
        let q = ((4 - k) % 4) as u8;
        let t = quarter_turn(q, [-s * rect.x0, 1.0 - s * rect.y0]);
        Placement {
            quarter_turns: q,
            scale: s,
            translation: t,
        }
    })
}

/// `Q0 = [-1, 1]^2` split into four unit squares plus four placed copies of
/// the almost-counterexample `a`. Quarter turns keep squares axis-parallel.
pub fn compose_ajtai(a: &Collection, placements: &[Placement; 4]) -> Result<Collection> {
    if a.dimension() != 2 || !a.is_kind(BodyKind::AxisBox) {
        return Err(Error::KindMismatch {
            operation: "compose_ajtai",
            expected: "planar square",
        });
    }
    let mut bodies: Vec<Body> = (0..4)
        .map(|k| {
            let c = quarter_turn(((4 - k) % 4) as u8, [0.5, 0.5]);
            Body::axis_box(vec![c[0], c[1]], 0.5)
        })
        .collect::<Result<_>>()?;
    for (k, p) in placements.iter().enumerate() {
        if !(p.scale > 0.0 && p.scale.is_finite()) {
            return Err(Error::InvalidParameter(format!("placement {k}: scale {}", p.scale)));
        }
        let target = slot(k);
        for b in a.bodies() {
            let x = b.center().coords();
            let c = p.apply([x[0], x[1]]);
            let img = Body::axis_box(vec![c[0], c[1]], p.scale * b.radius())?;
            if !target.holds(&img) {
                return Err(Error::InvalidParameter(format!(
                    "placement {k} moves a square outside its slot {target}"
                )));
            }
            bodies.push(img);
        }
    }
    Collection::new(2, format!("ajtai-composed n={}", bodies.len()), bodies)
}

/// Outcome of sampling random maximal disjoint subcollections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub samples: usize,
    pub union_area: f64,
    pub best_density: f64,
    pub best_chosen: Vec<usize>,
    pub mean_density: f64,
}

/// Greedy maximal disjoint subcollections over `samples` random orders.
pub fn probe_random_maximal(c: &Collection, samples: usize, seed: u64) -> Result<ProbeReport> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    let graph = IntersectionGraph::new(c);
    let n = graph.n;
    let words = n.div_ceil(64);
    let mut closed = vec![0u64; n * words];
    for v in 0..n {
        for &u in graph.neighbors[v].iter().chain(std::iter::once(&v)) {
            closed[v * words + u / 64] |= 1 << (u % 64);
        }
    }
    let union_area = union_volume(c, &UnionConfig::default())?.value;

    let one = |s: usize| -> (f64, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(s as u64);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut blocked = vec![0u64; words];
        let mut chosen = Vec::new();
        let mut vol = 0.0;
        for v in order {
            if blocked[v / 64] >> (v % 64) & 1 == 0 {
                chosen.push(v);
                vol += graph.weights[v];
                for (w, m) in blocked.iter_mut().zip(&closed[v * words..(v + 1) * words]) {
                    *w |= m;
                }
            }
        }
        (vol, chosen)
    };

    #[cfg(feature = "parallel")]
    let runs: Vec<(f64, Vec<usize>)> = {
        use rayon::prelude::*;
        (0..samples).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let runs: Vec<(f64, Vec<usize>)> = (0..samples).map(one).collect();

    let mean = runs.iter().map(|r| r.0).sum::<f64>() / samples as f64;
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("samples > 0");
    let mut best_chosen = best.1;
    best_chosen.sort_unstable();
    Ok(ProbeReport {
        samples,
        union_area,
        best_density: best.0 / union_area,
        best_chosen,
        mean_density: mean / union_area,
    })
}
