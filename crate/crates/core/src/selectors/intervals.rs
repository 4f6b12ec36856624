use super::{certify, Algorithm, SelectionResult};
use crate::error::{Error, Result};
use crate::geometry::{BodyKind, Collection, UnionConfig};

/// True when closed `[lo, hi]` lies inside the union of `others`
/// (sorted by left end).
fn covered(lo: f64, hi: f64, others: &[(f64, f64)]) -> bool {
    let mut reach = lo;
    for &(a, b) in others {
        if a > reach {
            break;
        }
        reach = reach.max(b);
        if reach >= hi {
            return true;
        }
    }
    false
}

/// Sharp one-dimensional selection on `(lo, hi)` pairs, returning positions
/// into `iv`.
pub(crate) fn rado_on_intervals(iv: &[(f64, f64)]) -> Vec<usize> {
    // drop intervals covered by the others, lowest index first; a single
    // pass is a fixed point because removals only shrink the other unions
    let mut alive = vec![true; iv.len()];
    for i in 0..iv.len() {
        let mut others: Vec<(f64, f64)> = (0..iv.len())
            .filter(|&j| j != i && alive[j])
            .map(|j| iv[j])
            .collect();
        others.sort_by(|a, b| a.0.total_cmp(&b.0));
        if covered(iv[i].0, iv[i].1, &others) {
            alive[i] = false;
        }
    }
    // survivors form a chain: left and right ends both increase, and each
    // one owns the open gap between its neighbours
    let mut rest: Vec<usize> = (0..iv.len()).filter(|&i| alive[i]).collect();
    rest.sort_by(|&i, &j| iv[i].0.total_cmp(&iv[j].0).then(i.cmp(&j)));
    let witness: Vec<f64> = (0..rest.len())
        .map(|k| {
            let (lo, hi) = iv[rest[k]];
            let left = if k > 0 { lo.max(iv[rest[k - 1]].1) } else { lo };
            let right = if k + 1 < rest.len() { hi.min(iv[rest[k + 1]].0) } else { hi };
            0.5 * (left + right)
        })
        .collect();
    let mut by_witness: Vec<usize> = (0..rest.len()).collect();
    by_witness.sort_by(|&a, &b| witness[a].total_cmp(&witness[b]));
    let class = |parity: usize| -> Vec<usize> {
        by_witness
            .iter()
            .skip(parity)
            .step_by(2)
            .map(|&k| rest[k])
            .collect()
    };
    let len = |s: &[usize]| s.iter().map(|&i| iv[i].1 - iv[i].0).sum::<f64>();
    let (even, odd) = (class(0), class(1));
    if len(&odd) > len(&even) {
        odd
    } else {
        even
    }
}

pub fn rado_interval_indices(c: &Collection) -> Result<Vec<usize>> {
    if c.dimension() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: c.dimension(),
        });
    }
    c.require_kind("select_rado_intervals", &[BodyKind::AxisBox])?;
    let iv: Vec<(f64, f64)> = c
        .bodies()
        .iter()
        .map(|b| {
            let x = b.center().coords()[0];
            (x - b.radius(), x + b.radius())
        })
        .collect();
    Ok(rado_on_intervals(&iv))
}

/// Guarantee 1/2, which is sharp.
pub fn select_rado_intervals(c: &Collection) -> Result<SelectionResult> {
    certify(c, rado_interval_indices(c)?, Algorithm::Rado1d, 0.5, vec![], &UnionConfig::default())
}
