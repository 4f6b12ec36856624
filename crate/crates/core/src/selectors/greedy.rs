use super::{certify, sweep_guarantee, Algorithm, SelectionResult};
use crate::error::Result;
use crate::geometry::{Body, BodyKind, Collection, UnionConfig};

/// Accepts bodies in `order`, skipping any that meet an accepted one.
fn greedy_in_order(bodies: &[Body], order: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for i in order {
        if chosen.iter().all(|&j| !bodies[i].intersects(&bodies[j])) {
            chosen.push(i);
        }
    }
    chosen
}

/// Largest remaining body first (ties to the lowest index).
pub fn vitali_indices(c: &Collection) -> Result<Vec<usize>> {
    c.require_kind("select_vitali_greedy", &[BodyKind::AxisBox, BodyKind::Ball])?;
    let b = c.bodies();
    let mut order: Vec<usize> = (0..b.len()).collect();
    order.sort_by(|&i, &j| b[j].radius().total_cmp(&b[i].radius()).then(i.cmp(&j)));
    Ok(greedy_in_order(b, order))
}

/// Guarantee `3^-d`.
pub fn select_vitali_greedy(c: &Collection) -> Result<SelectionResult> {
    let g = 3f64.powi(-(c.dimension() as i32));
    certify(c, vitali_indices(c)?, Algorithm::Greedy, g, vec![], &UnionConfig::default())
}

/// Leftmost remaining body first: ordered by first coordinate of the center,
/// then the second, then index.
pub fn sweep_indices(c: &Collection) -> Result<Vec<usize>> {
    c.require_kind("select_boundary_sweep", &[BodyKind::AxisBox, BodyKind::Ball])?;
    c.require_congruent("select_boundary_sweep")?;
    let b = c.bodies();
    let key = |i: usize| {
        let x = b[i].center().coords();
        (x[0], x.get(1).copied().unwrap_or(0.0))
    };
    let mut order: Vec<usize> = (0..b.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (key(i), key(j));
        a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(i.cmp(&j))
    });
    Ok(greedy_in_order(b, order))
}

/// Guarantee `(3^d - 2^(d-1))^-1`.
pub fn select_boundary_sweep(c: &Collection) -> Result<SelectionResult> {
    let g = sweep_guarantee(c.dimension());
    certify(c, sweep_indices(c)?, Algorithm::Sweep, g, vec![], &UnionConfig::default())
}
