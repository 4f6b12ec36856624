use serde::{Deserialize, Serialize};

use super::{cell_midpoints, certify, congruent_boxes, Algorithm, SelectionResult};
use crate::error::{Error, Result};
use crate::geometry::{Collection, Point, UnionConfig};

/// Translate of the cubic lattice `spacing * Z^d` chosen by the search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub spacing: f64,
    pub translate: Point,
    /// Lattice points inside the union.
    pub points_covered: usize,
}

struct Search {
    /// `hits[axis][candidate][cube]`: lattice coordinate inside the cube's
    /// extent on that axis, if any.
    hits: Vec<Vec<Vec<Option<i64>>>>,
    best: usize,
    best_pick: Vec<usize>,
}

impl Search {
    fn run(&mut self, axis: usize, live: Vec<usize>, pick: &mut Vec<usize>) {
        if live.len() <= self.best {
            return;
        }
        if axis == self.hits.len() {
            let mut keys: Vec<Vec<i64>> = live
                .iter()
                .map(|&i| pick.iter().enumerate().map(|(k, &j)| self.hits[k][j][i].unwrap()).collect())
                .collect();
            keys.sort();
            keys.dedup();
            if keys.len() > self.best {
                self.best = keys.len();
                self.best_pick = pick.clone();
            }
            return;
        }
        for j in 0..self.hits[axis].len() {
            let next: Vec<usize> = live.iter().copied().filter(|&i| self.hits[axis][j][i].is_some()).collect();
            pick.push(j);
            self.run(axis + 1, next, pick);
            pick.pop();
        }
    }
}

/// Finds the lattice translate of `(2 + eps) * side * Z^d` covering the most
/// lattice points of the union, then keeps one cube per covered point
/// (lowest index). Each cube holds at most one lattice point and cubes
/// holding distinct points are disjoint.
///
/// The count is piecewise constant in the translate, changing only where a
/// lattice coordinate crosses a cube face, so checking one translate per
/// cell of the face-residue grid is exhaustive.
pub fn blichfeldt_lattice(c: &Collection, eps: f64) -> Result<(LatticeSpec, Vec<usize>)> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    let (lows, side) = congruent_boxes(c, "select_blichfeldt")?;
    let d = c.dimension();
    let h = (2.0 + eps) * side;
    let candidates: Vec<Vec<f64>> = (0..d)
        .map(|k| {
            let res = lows
                .iter()
                .flat_map(|lo| [lo[k].rem_euclid(h), (lo[k] + side).rem_euclid(h)])
                .collect();
            cell_midpoints(res, h)
        })
        .collect();
    let work: f64 = candidates.iter().map(|v| v.len() as f64).product::<f64>() * lows.len() as f64;
    if work > 1e10 {
        return Err(Error::ResourceLimit(format!(
            "blichfeldt translate search needs ~{work:.1e} cube tests"
        )));
    }
    let hits = (0..d)
        .map(|k| {
            candidates[k]
                .iter()
                .map(|&t| {
                    lows.iter()
                        .map(|lo| {
                            let m = ((lo[k] - t) / h).ceil();
                            (t + m * h <= lo[k] + side).then_some(m as i64)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut s = Search {
        hits,
        best: 0,
        best_pick: Vec::new(),
    };
    s.run(0, (0..lows.len()).collect(), &mut Vec::with_capacity(d));
    let pick = s.best_pick;
    let mut owners: Vec<(Vec<i64>, usize)> = (0..lows.len())
        .filter_map(|i| {
            let key: Option<Vec<i64>> = pick.iter().enumerate().map(|(k, &j)| s.hits[k][j][i]).collect();
            key.map(|key| (key, i))
        })
        .collect();
    owners.sort();
    owners.dedup_by(|a, b| a.0 == b.0);
    let mut chosen: Vec<usize> = owners.into_iter().map(|(_, i)| i).collect();
    chosen.sort_unstable();
    let spec = LatticeSpec {
        spacing: h,
        translate: Point::new(pick.iter().enumerate().map(|(k, &j)| candidates[k][j]).collect()),
        points_covered: chosen.len(),
    };
    Ok((spec, chosen))
}

/// Guarantee `(2 + eps)^-d`.
pub fn select_blichfeldt(c: &Collection, eps: f64) -> Result<SelectionResult> {
    let (_, chosen) = blichfeldt_lattice(c, eps)?;
    let g = (2.0 + eps).powi(-(c.dimension() as i32));
    certify(c, chosen, Algorithm::Blichfeldt, g, vec![], &UnionConfig::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Body;

    fn unit_squares(corners: &[(f64, f64)]) -> Collection {
        let b = corners
            .iter()
            .map(|&(x, y)| Body::axis_box(vec![x + 0.5, y + 0.5], 0.5).unwrap())
            .collect();
        Collection::new(2, "", b).unwrap()
    }

    #[test]
    fn midpoints_wrap_around() {
        let m = cell_midpoints(vec![1.0, 3.0], 4.0);
        assert_eq!(m, vec![2.0, 0.0]);
        assert_eq!(cell_midpoints(vec![1.0], 4.0), vec![3.0]);
    }

    #[test]
    fn nine_squares_tiling() {
        let corners: Vec<(f64, f64)> = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i as f64, j as f64)))
            .collect();
        let c = unit_squares(&corners);
        let (spec, chosen) = blichfeldt_lattice(&c, 0.01).unwrap();
        assert!(chosen.len() >= 3, "{chosen:?}");
        assert!(c.is_disjoint_subset(&chosen));
        assert_eq!(spec.points_covered, chosen.len());
        assert!((spec.spacing - 2.01).abs() < 1e-15);
        let r = select_blichfeldt(&c, 0.01).unwrap();
        assert!(r.density >= 2.01f64.powi(-2));
    }

    #[test]
    fn single_cube() {
        let c = unit_squares(&[(4.0, -2.0)]);
        assert_eq!(select_blichfeldt(&c, 0.5).unwrap().chosen, vec![0]);
    }

    #[test]
    fn bad_eps_and_kinds() {
        let c = unit_squares(&[(0.0, 0.0)]);
        assert!(blichfeldt_lattice(&c, 0.0).is_err());
        let balls = Collection::new(1, "", vec![Body::ball(vec![0.0], 1.0).unwrap()]).unwrap();
        assert!(blichfeldt_lattice(&balls, 0.1).is_err());
    }
}
