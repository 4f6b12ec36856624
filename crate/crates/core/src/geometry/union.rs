//! Volume of a union of bodies: exact for axis-parallel boxes via
//! coordinate compression, Monte Carlo with a Hoeffding error bar otherwise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Body, BodyKind, Collection, Shape, EPS};
use crate::error::{Error, Result};

/// Largest compressed grid the exact box union will enumerate.
pub const MAX_EXACT_CELLS: f64 = 1e8;

const PILOT_SAMPLES: u64 = 20_000;
const MAX_MC_SAMPLES: u64 = 50_000_000;
const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeMethod {
    Exact,
    MonteCarlo,
}

/// A volume with an absolute error bar. For Monte Carlo estimates the true
/// value lies within `value ± abs_error` with the confidence the estimate
/// was requested at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub method: VolumeMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl VolumeEstimate {
    pub fn exact(value: f64) -> Self {
        VolumeEstimate {
            value,
            abs_error: 0.0,
            method: VolumeMethod::Exact,
            seed: None,
        }
    }

    pub fn lower(&self) -> f64 {
        (self.value - self.abs_error).max(0.0)
    }

    pub fn upper(&self) -> f64 {
        self.value + self.abs_error
    }

    pub fn contains(&self, v: f64) -> bool {
        (v - self.value).abs() <= self.abs_error + 1e-9 * v.abs().max(1.0)
    }
}

/// How [`union_volume`] estimates non-box unions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnionConfig {
    pub rel_tol: f64,
    pub confidence: f64,
    pub seed: u64,
}

impl Default for UnionConfig {
    fn default() -> Self {
        UnionConfig {
            rel_tol: 0.005,
            confidence: 0.99,
            seed: 0x5eed,
        }
    }
}

/// Exact union volume when every body is a box (on the line, balls are
/// intervals too) and the compressed grid is small enough, Monte Carlo
/// otherwise.
pub fn union_volume(c: &Collection, cfg: &UnionConfig) -> Result<VolumeEstimate> {
    let boxes = if c.is_kind(BodyKind::AxisBox) {
        Some(c.clone())
    } else if c.dimension() == 1 {
        let iv = c
            .bodies()
            .iter()
            .map(|b| Body::axis_box(b.center().clone(), b.radius()))
            .collect::<Result<Vec<_>>>()?;
        Some(Collection::new(1, c.label(), iv)?)
    } else {
        None
    };
    if let Some(boxes) = boxes {
        match union_volume_boxes(&boxes) {
            Err(e) if e.is_resource_limit() => {}
            other => return other,
        }
    }
    union_volume_mc(c, cfg.rel_tol, cfg.confidence, cfg.seed)
}

/// Exact volume of a union of axis-parallel boxes.
///
/// The face coordinates on every axis cut space into a grid on which the
/// union is a union of whole cells. The first `d - 1` axes are enumerated
/// cell by cell and the union along the last axis is measured as a union of
/// intervals.
pub fn union_volume_boxes(c: &Collection) -> Result<VolumeEstimate> {
    c.require_kind("union_volume_boxes", &[BodyKind::AxisBox])?;
    let d = c.dimension();
    let boxes: Vec<(Vec<f64>, Vec<f64>)> = c.bodies().iter().map(|b| b.bounding_box()).collect();

    let axes: Vec<Vec<f64>> = (0..d)
        .map(|k| {
            let mut v: Vec<f64> = boxes.iter().flat_map(|(lo, hi)| [lo[k], hi[k]]).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        })
        .collect();
    let cells: f64 = axes.iter().map(|a| (a.len() - 1) as f64).product();
    if cells > MAX_EXACT_CELLS {
        return Err(Error::ResourceLimit(format!(
            "box union needs {cells:.3e} grid cells (cap {MAX_EXACT_CELLS:.0e})"
        )));
    }

    let last = d - 1;
    let outer = &axes[..last];
    let mut idx = vec![0usize; last];
    let mut mid = vec![0.0; last];
    let mut intervals: Vec<(f64, f64)> = Vec::with_capacity(boxes.len());
    let mut total = 0.0;
    'cells: loop {
        let mut width = 1.0;
        for k in 0..last {
            let (a, b) = (outer[k][idx[k]], outer[k][idx[k] + 1]);
            mid[k] = 0.5 * (a + b);
            width *= b - a;
        }
        intervals.clear();
        intervals.extend(
            boxes
                .iter()
                .filter(|(lo, hi)| (0..last).all(|k| lo[k] < mid[k] && mid[k] < hi[k]))
                .map(|(lo, hi)| (lo[last], hi[last])),
        );
        if !intervals.is_empty() {
            total += width * interval_union_length(&mut intervals);
        }
        // advance the mixed-radix counter
        for k in 0..last {
            idx[k] += 1;
            if idx[k] + 1 < outer[k].len() {
                continue 'cells;
            }
            idx[k] = 0;
        }
        break;
    }
    Ok(VolumeEstimate::exact(total))
}

fn interval_union_length(iv: &mut [(f64, f64)]) -> f64 {
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let (mut lo, mut hi) = iv[0];
    for &(a, b) in &iv[1..] {
        if a > hi {
            total += hi - lo;
            lo = a;
            hi = b;
        } else {
            hi = hi.max(b);
        }
    }
    total + (hi - lo)
}

fn hoeffding_half_width(samples: u64, confidence: f64) -> f64 {
    ((2.0 / (1.0 - confidence)).ln() / (2.0 * samples as f64)).sqrt()
}

/// Cells of a regular grid over the bounding box of the union that meet the
/// bounding box of some body. The rest of the box is provably empty, so
/// uniform sampling over these cells loses nothing and wastes fewer points
/// on sparse collections.
struct SampleRegion {
    lo: Vec<f64>,
    step: Vec<f64>,
    cells: Vec<Vec<u32>>,
    volume: f64,
}

/// Grid resolution: about 4096 cells in total, at most 32 per axis.
const REGION_CELLS: f64 = 4096.0;

impl SampleRegion {
    fn new(c: &Collection) -> Self {
        let d = c.dimension();
        let (lo, hi) = c.bounding_box();
        let g = (REGION_CELLS.powf(1.0 / d as f64).floor() as u32).clamp(1, 32);
        let step: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| (b - a) / g as f64).collect();
        let mut marked = std::collections::BTreeSet::new();
        for b in c.bodies() {
            let (blo, bhi) = b.bounding_box();
            let range: Vec<(u32, u32)> = (0..d)
                .map(|k| {
                    let at = |x: f64| (((x - lo[k]) / step[k]).floor().max(0.0) as u32).min(g - 1);
                    (at(blo[k]), at(bhi[k]))
                })
                .collect();
            let mut idx: Vec<u32> = range.iter().map(|r| r.0).collect();
            'cells: loop {
                marked.insert(idx.clone());
                for k in 0..d {
                    if idx[k] < range[k].1 {
                        idx[k] += 1;
                        continue 'cells;
                    }
                    idx[k] = range[k].0;
                }
                break;
            }
        }
        let cells: Vec<Vec<u32>> = marked.into_iter().collect();
        let volume = cells.len() as f64 * step.iter().product::<f64>();
        SampleRegion { lo, step, cells, volume }
    }
}

/// Monte Carlo union volume from uniform samples in the part of the
/// bounding box that bodies can reach (see `SampleRegion`).
///
/// A pilot run (on an independent stream) lower-bounds the hit fraction `p`;
/// the main run then draws enough samples for the Hoeffding half-width to be
/// at most `rel_tol * p`. The reported `abs_error` is the Hoeffding bound of
/// the main run alone, valid at `confidence`.
pub fn union_volume_mc(
    c: &Collection,
    rel_tol: f64,
    confidence: f64,
    seed: u64,
) -> Result<VolumeEstimate> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::InvalidParameter(format!("rel_tol must be in (0,1), got {rel_tol}")));
    }
    check_confidence(confidence)?;
    let region = SampleRegion::new(c);
    let pilot = count_hits(c, &region, PILOT_SAMPLES, seed, 1);
    let p_pilot = pilot as f64 / PILOT_SAMPLES as f64;
    let p_lower = (p_pilot - hoeffding_half_width(PILOT_SAMPLES, confidence))
        .max(c.max_volume() / region.volume)
        .min(1.0);
    let eps = rel_tol * p_lower;
    let needed = ((2.0 / (1.0 - confidence)).ln() / (2.0 * eps * eps)).ceil();
    let samples = (needed as u64).clamp(PILOT_SAMPLES, MAX_MC_SAMPLES);
    estimate(c, &region, samples, confidence, seed)
}

/// Monte Carlo union volume with a fixed sample count.
pub fn union_volume_mc_with_samples(
    c: &Collection,
    samples: u64,
    confidence: f64,
    seed: u64,
) -> Result<VolumeEstimate> {
    check_confidence(confidence)?;
    if samples == 0 {
        return Err(Error::InvalidParameter("sample count must be positive".into()));
    }
    estimate(c, &SampleRegion::new(c), samples, confidence, seed)
}

fn estimate(c: &Collection, region: &SampleRegion, samples: u64, confidence: f64, seed: u64) -> Result<VolumeEstimate> {
    let hits = count_hits(c, region, samples, seed, 2);
    Ok(VolumeEstimate {
        value: region.volume * hits as f64 / samples as f64,
        abs_error: region.volume * hoeffding_half_width(samples, confidence),
        method: VolumeMethod::MonteCarlo,
        seed: Some(seed),
    })
}

fn check_confidence(confidence: f64) -> Result<()> {
    if confidence > 0.0 && confidence < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "confidence must be in (0,1), got {confidence}"
        )))
    }
}

/// Membership test with per-body constants hoisted out of the sample loop.
enum Probe {
    Box { c: Vec<f64>, r: f64 },
    Ball { c: Vec<f64>, r2: f64 },
    Rect { c: [f64; 2], half: [f64; 2], cos: f64, sin: f64 },
}

impl Probe {
    fn new(b: &Body) -> Self {
        let c = b.center().coords().to_vec();
        match *b.shape() {
            Shape::AxisBox => Probe::Box { c, r: b.radius() + EPS },
            Shape::Ball => Probe::Ball {
                c,
                r2: (b.radius() + EPS).powi(2),
            },
            Shape::RotRect { half_extents, angle } => Probe::Rect {
                c: [c[0], c[1]],
                half: [half_extents[0] + EPS, half_extents[1] + EPS],
                cos: angle.cos(),
                sin: angle.sin(),
            },
        }
    }

    fn contains(&self, p: &[f64]) -> bool {
        match self {
            Probe::Box { c, r } => c.iter().zip(p).all(|(a, x)| (x - a).abs() <= *r),
            Probe::Ball { c, r2 } => c.iter().zip(p).map(|(a, x)| (x - a) * (x - a)).sum::<f64>() <= *r2,
            Probe::Rect { c, half, cos, sin } => {
                let (dx, dy) = (p[0] - c[0], p[1] - c[1]);
                (cos * dx + sin * dy).abs() <= half[0] && (cos * dy - sin * dx).abs() <= half[1]
            }
        }
    }
}

/// Hits among `samples` uniform points. Work is split into fixed chunks, each
/// with its own ChaCha stream, so the count does not depend on scheduling.
fn count_hits(c: &Collection, region: &SampleRegion, samples: u64, seed: u64, stream: u64) -> u64 {
    let chunks = samples.div_ceil(CHUNK);
    let probes: Vec<Probe> = c.bodies().iter().map(Probe::new).collect();
    let chunk_hits = |k: u64| -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream.wrapping_mul(0x1_0000_0000).wrapping_add(k));
        let n = CHUNK.min(samples - k * CHUNK);
        let mut p = vec![0.0; region.lo.len()];
        let mut hits = 0;
        for _ in 0..n {
            let cell = &region.cells[rng.random_range(0..region.cells.len())];
            for (k, x) in p.iter_mut().enumerate() {
                *x = region.lo[k] + region.step[k] * (cell[k] as f64 + rng.random::<f64>());
            }
            if probes.iter().any(|q| q.contains(&p)) {
                hits += 1;
            }
        }
        hits
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..chunks).into_par_iter().map(chunk_hits).sum()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..chunks).map(chunk_hits).sum()
    }
}
