use super::{certify, congruent_boxes, Algorithm, SelectionResult};
use crate::error::{Error, Result};
use crate::geometry::{union_volume_boxes, Body, Collection, UnionConfig};

/// Relative tolerance under which a square counts as aligned with `Q0`.
const ALIGN_TOL: f64 = 1e-9;

fn area(corners: &[[f64; 2]], side: f64) -> Result<f64> {
    let r = 0.5 * side;
    let bodies = corners
        .iter()
        .map(|p| Body::axis_box(vec![p[0] + r, p[1] + r], r))
        .collect::<Result<Vec<_>>>()?;
    Ok(union_volume_boxes(&Collection::new(2, "", bodies)?)?.value)
}

/// Offset of `x` from the grid through `x0`, in `[0, side)`; values within
/// tolerance of a grid line are reported as 0.
fn residue(x: f64, x0: f64, side: f64) -> f64 {
    let r = (x - x0).rem_euclid(side);
    if r < ALIGN_TOL * side || side - r < ALIGN_TOL * side {
        0.0
    } else {
        r
    }
}

/// Aligns every square with square 0 along `axis`, one rigid move of the
/// aligned group at a time.
fn align_axis(corners: &mut [[f64; 2]], side: f64, axis: usize) -> Result<()> {
    let n = corners.len();
    for _ in 0..n {
        let x0 = corners[0][axis];
        let res: Vec<f64> = corners.iter().map(|p| residue(p[axis], x0, side)).collect();
        let pending: Vec<f64> = res.iter().copied().filter(|&r| r > 0.0).collect();
        if pending.is_empty() {
            // exact grid coordinates
            for p in corners.iter_mut() {
                p[axis] = x0 + ((p[axis] - x0) / side).round() * side;
            }
            return Ok(());
        }
        // moving the aligned group by h in [h_minus, h_plus] keeps every
        // intersecting pair intersecting and the area is affine in h, so the
        // better endpoint never loses area
        let h_plus = pending.iter().copied().fold(f64::INFINITY, f64::min);
        let h_minus = pending.iter().copied().fold(f64::NEG_INFINITY, f64::max) - side;
        let moved = |h: f64| -> Vec<[f64; 2]> {
            corners
                .iter()
                .zip(&res)
                .map(|(p, &r)| {
                    let mut q = *p;
                    if r == 0.0 {
                        q[axis] += h;
                    }
                    q
                })
                .collect()
        };
        let (up, down) = (moved(h_plus), moved(h_minus));
        let next = if area(&up, side)? >= area(&down, side)? { up } else { down };
        corners.copy_from_slice(&next);
    }
    Err(Error::Certificate(format!(
        "snap_to_grid did not align axis {axis} within {n} rounds"
    )))
}

fn corners_of(c: &Collection) -> Result<(Vec<[f64; 2]>, f64)> {
    if c.dimension() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: c.dimension(),
        });
    }
    let (lows, side) = congruent_boxes(c, "snap_to_grid")?;
    Ok((lows.iter().map(|p| [p[0], p[1]]).collect(), side))
}

fn snapped_corners(c: &Collection) -> Result<(Vec<[f64; 2]>, f64)> {
    let (mut corners, side) = corners_of(c)?;
    align_axis(&mut corners, side, 0)?;
    align_axis(&mut corners, side, 1)?;
    Ok((corners, side))
}

/// Moves congruent squares onto the grid of square 0 without separating any
/// intersecting pair and without losing union area.
pub fn snap_to_grid(c: &Collection) -> Result<Collection> {
    let (corners, side) = snapped_corners(c)?;
    let r = 0.5 * side;
    let bodies = corners
        .iter()
        .map(|p| Body::axis_box(vec![p[0] + r, p[1] + r], r))
        .collect::<Result<Vec<_>>>()?;
    Collection::new(2, c.label(), bodies)
}

/// Snaps, splits grid positions by coordinate parity and keeps the class
/// with the most distinct positions, one square (lowest index) per position.
pub fn zalgaller_indices(c: &Collection) -> Result<Vec<usize>> {
    let (corners, side) = snapped_corners(c)?;
    let origin = corners[0];
    let mut classes: [Vec<([i64; 2], usize)>; 4] = Default::default();
    for (i, p) in corners.iter().enumerate() {
        let a = ((p[0] - origin[0]) / side).round() as i64;
        let b = ((p[1] - origin[1]) / side).round() as i64;
        classes[(a.rem_euclid(2) + 2 * b.rem_euclid(2)) as usize].push(([a, b], i));
    }
    let mut best: Vec<usize> = Vec::new();
    for mut class in classes {
        class.sort_unstable();
        class.dedup_by(|x, y| x.0 == y.0);
        if class.len() > best.len() {
            best = class.into_iter().map(|(_, i)| i).collect();
        }
    }
    best.sort_unstable();
    Ok(best)
}

/// Guarantee 1/4. The chosen squares are re-checked for disjointness in
/// their original positions.
pub fn select_zalgaller(c: &Collection) -> Result<SelectionResult> {
    certify(c, zalgaller_indices(c)?, Algorithm::Zalgaller, 0.25, vec![], &UnionConfig::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn squares(corners: &[(f64, f64)]) -> Collection {
        let b = corners
            .iter()
            .map(|&(x, y)| Body::axis_box(vec![x + 0.5, y + 0.5], 0.5).unwrap())
            .collect();
        Collection::new(2, "", b).unwrap()
    }

    #[test]
    fn grid_input_is_a_fixed_point() {
        let c = squares(&[(0.0, 0.0), (1.0, 0.0), (3.0, 2.0), (-1.0, 5.0)]);
        assert_eq!(snap_to_grid(&c).unwrap(), c);
    }

    #[test]
    fn two_offset_squares() {
        let c = squares(&[(0.0, 0.0), (0.3, 0.0)]);
        let s = snap_to_grid(&c).unwrap();
        let dx = s.bodies()[1].center().coords()[0] - s.bodies()[0].center().coords()[0];
        assert!(dx == 0.0 || dx == 1.0, "{dx}");
        let before = union_volume_boxes(&c).unwrap().value;
        let after = union_volume_boxes(&s).unwrap().value;
        assert!(after >= before - 1e-9);
        assert!(s.bodies()[0].intersects(&s.bodies()[1]));
    }

    #[test]
    fn four_tiles_give_one_square() {
        let c = squares(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]);
        let r = select_zalgaller(&c).unwrap();
        assert_eq!(r.chosen, vec![0]);
        assert_eq!(r.density, 0.25);
    }

    #[test]
    fn single_square() {
        let r = select_zalgaller(&squares(&[(0.2, 0.7)])).unwrap();
        assert_eq!(r.density, 1.0);
    }

    #[test]
    fn needs_planar_congruent_squares() {
        let c = Collection::intervals(&[(0.0, 1.0)]).unwrap();
        assert!(snap_to_grid(&c).is_err());
        let c = Collection::new(
            2,
            "",
            vec![
                Body::axis_box(vec![0.0, 0.0], 1.0).unwrap(),
                Body::axis_box(vec![3.0, 0.0], 2.0).unwrap(),
            ],
        )
        .unwrap();
        assert!(snap_to_grid(&c).is_err());
    }
}
