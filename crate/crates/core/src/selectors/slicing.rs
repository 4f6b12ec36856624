use super::intervals::rado_on_intervals;
use super::{cell_midpoints, certify, congruent_boxes, Algorithm, SelectionResult};
use crate::error::Result;
use crate::geometry::{Collection, UnionConfig};

/// Selection among the cubes `ids` looking only at the first `dims` axes.
///
/// Slices perpendicular to the last axis at heights `t0 + 2 side Z` meet
/// disjoint groups of cubes; each group is solved one dimension down. The
/// phase `t0` ranges over one point per cell between face residues.
fn slice(lows: &[Vec<f64>], ids: &[usize], side: f64, dims: usize) -> Vec<usize> {
    if dims == 1 {
        let iv: Vec<(f64, f64)> = ids.iter().map(|&i| (lows[i][0], lows[i][0] + side)).collect();
        return rado_on_intervals(&iv).into_iter().map(|k| ids[k]).collect();
    }
    let a = dims - 1;
    let period = 2.0 * side;
    let residues = ids
        .iter()
        .flat_map(|&i| [lows[i][a].rem_euclid(period), (lows[i][a] + side).rem_euclid(period)])
        .collect();
    let mut best: Vec<usize> = Vec::new();
    for t0 in cell_midpoints(residues, period) {
        let mut layers: Vec<(i64, usize)> = ids
            .iter()
            .filter_map(|&i| {
                let k = ((lows[i][a] - t0) / period).ceil();
                (t0 + k * period <= lows[i][a] + side).then_some((k as i64, i))
            })
            .collect();
        if layers.len() <= best.len() {
            continue;
        }
        layers.sort_unstable();
        let mut picked = Vec::new();
        for group in layers.chunk_by(|x, y| x.0 == y.0) {
            let members: Vec<usize> = group.iter().map(|&(_, i)| i).collect();
            picked.extend(slice(lows, &members, side, dims - 1));
        }
        if picked.len() > best.len() {
            best = picked;
        }
    }
    best
}

pub fn nordlander_indices(c: &Collection) -> Result<Vec<usize>> {
    let (lows, side) = congruent_boxes(c, "select_nordlander")?;
    let ids: Vec<usize> = (0..lows.len()).collect();
    let mut chosen = slice(&lows, &ids, side, c.dimension());
    chosen.sort_unstable();
    Ok(chosen)
}

/// Guarantee `2^-d`.
pub fn select_nordlander(c: &Collection) -> Result<SelectionResult> {
    let g = 2f64.powi(-(c.dimension() as i32));
    certify(c, nordlander_indices(c)?, Algorithm::Nordlander, g, vec![], &UnionConfig::default())
}
