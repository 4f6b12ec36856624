//! Constructive selection procedures.
//!
//! Every selector returns a [`SelectionResult`] that has been certified:
//! the chosen bodies are re-checked pairwise for disjointness and the
//! achieved density is compared against the selector's guarantee for its
//! input class. A failed check is reported as [`Error::Certificate`].

mod greedy;
mod grid;
mod intervals;
mod lattice;
mod multiscale;
mod slicing;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{union_volume, Collection, UnionConfig, VolumeEstimate, VolumeMethod};

pub use greedy::{select_boundary_sweep, select_vitali_greedy, sweep_indices, vitali_indices};
pub use grid::{select_zalgaller, snap_to_grid, zalgaller_indices};
pub use intervals::{rado_interval_indices, select_rado_intervals};
pub use lattice::{blichfeldt_lattice, select_blichfeldt, LatticeSpec};
pub use multiscale::{round_radius, select_multiscale, CongruentSelector, MultiscaleParams};
pub use slicing::{nordlander_indices, select_nordlander};

/// Slack allowed between a density and its guarantee.
pub const DENSITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Greedy,
    Rado1d,
    Sweep,
    Blichfeldt,
    Nordlander,
    Zalgaller,
    Multiscale,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Greedy,
        Algorithm::Rado1d,
        Algorithm::Sweep,
        Algorithm::Blichfeldt,
        Algorithm::Nordlander,
        Algorithm::Zalgaller,
        Algorithm::Multiscale,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Rado1d => "rado1d",
            Algorithm::Sweep => "sweep",
            Algorithm::Blichfeldt => "blichfeldt",
            Algorithm::Nordlander => "nordlander",
            Algorithm::Zalgaller => "zalgaller",
            Algorithm::Multiscale => "multiscale",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm {s:?}")))
    }
}

/// One multiplicative factor of a composite guarantee.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuaranteeFactor {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    /// Chosen indices, in the order the algorithm picked them.
    pub chosen: Vec<usize>,
    pub selected_volume: f64,
    pub union_volume: VolumeEstimate,
    pub density: f64,
    pub guarantee: f64,
    pub algorithm: Algorithm,
    /// Factors whose product is `guarantee`, for composite guarantees.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub guarantee_factors: Vec<GuaranteeFactor>,
}

impl SelectionResult {
    /// Density lower bound that holds at the union estimate's confidence.
    pub fn density_lower(&self) -> f64 {
        self.selected_volume / self.union_volume.upper()
    }

    /// Density upper bound at the union estimate's confidence.
    pub fn density_upper(&self) -> f64 {
        self.selected_volume / self.union_volume.lower().max(f64::MIN_POSITIVE)
    }
}

/// Knobs shared by the dispatcher.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectOptions {
    /// Lattice slack for [`Algorithm::Blichfeldt`].
    pub eps: f64,
    /// Multiscale parameters; `None` uses the defaults for the dimension.
    pub multiscale: Option<MultiscaleParams>,
    pub union: UnionConfig,
}

impl Default for SelectOptions {
    fn default() -> Self {
        SelectOptions {
            eps: 0.01,
            multiscale: None,
            union: UnionConfig::default(),
        }
    }
}

/// Runs `algo` on `c` and certifies the result.
pub fn select(c: &Collection, algo: Algorithm, opts: &SelectOptions) -> Result<SelectionResult> {
    match algo {
        Algorithm::Greedy => {
            let chosen = vitali_indices(c)?;
            certify(c, chosen, algo, 3f64.powi(-(c.dimension() as i32)), vec![], &opts.union)
        }
        Algorithm::Rado1d => certify(c, rado_interval_indices(c)?, algo, 0.5, vec![], &opts.union),
        Algorithm::Sweep => {
            let chosen = sweep_indices(c)?;
            certify(c, chosen, algo, sweep_guarantee(c.dimension()), vec![], &opts.union)
        }
        Algorithm::Blichfeldt => {
            let (_, chosen) = blichfeldt_lattice(c, opts.eps)?;
            let g = (2.0 + opts.eps).powi(-(c.dimension() as i32));
            certify(c, chosen, algo, g, vec![], &opts.union)
        }
        Algorithm::Nordlander => {
            let chosen = nordlander_indices(c)?;
            certify(c, chosen, algo, 2f64.powi(-(c.dimension() as i32)), vec![], &opts.union)
        }
        Algorithm::Zalgaller => certify(c, zalgaller_indices(c)?, algo, 0.25, vec![], &opts.union),
        Algorithm::Multiscale => {
            let params = match &opts.multiscale {
                Some(p) => p.clone(),
                None => MultiscaleParams::for_dimension(c.dimension()),
            };
            multiscale::run(c, &params, &opts.union)
        }
    }
}

pub(crate) fn sweep_guarantee(d: usize) -> f64 {
    1.0 / (3f64.powi(d as i32) - 2f64.powi(d as i32 - 1))
}

/// Re-checks disjointness and the density guarantee of `chosen`.
pub(crate) fn certify(
    c: &Collection,
    chosen: Vec<usize>,
    algorithm: Algorithm,
    guarantee: f64,
    guarantee_factors: Vec<GuaranteeFactor>,
    union: &UnionConfig,
) -> Result<SelectionResult> {
    if !c.is_disjoint_subset(&chosen) {
        return Err(Error::Certificate(format!("{algorithm}: chosen bodies intersect")));
    }
    let selected_volume: f64 = chosen.iter().map(|&i| c.bodies()[i].volume()).sum();
    let union_volume = union_volume(c, union)?;
    let density = selected_volume / union_volume.value;
    let result = SelectionResult {
        chosen,
        selected_volume,
        union_volume,
        density,
        guarantee,
        algorithm,
        guarantee_factors,
    };
    // with an estimated union, only a density that stays below the guarantee
    // across the whole confidence interval is a violation
    let tested = match result.union_volume.method {
        VolumeMethod::Exact => density,
        VolumeMethod::MonteCarlo => result.density_upper(),
    };
    if tested < guarantee - DENSITY_TOL {
        return Err(Error::Certificate(format!(
            "{algorithm}: density {density} below guarantee {guarantee}"
        )));
    }
    Ok(result)
}

/// Axis-parallel lower corners and common side of a congruent box collection.
pub(crate) fn congruent_boxes(c: &Collection, operation: &'static str) -> Result<(Vec<Vec<f64>>, f64)> {
    c.require_kind(operation, &[crate::geometry::BodyKind::AxisBox])?;
    let r = c.require_congruent(operation)?;
    let lows = c
        .bodies()
        .iter()
        .map(|b| b.center().coords().iter().map(|x| x - r).collect())
        .collect();
    Ok((lows, 2.0 * r))
}

/// Midpoints of the arcs cut out of the circle `R / h` by the residues.
pub(crate) fn cell_midpoints(mut residues: Vec<f64>, h: f64) -> Vec<f64> {
    residues.sort_by(f64::total_cmp);
    residues.dedup();
    let n = residues.len();
    (0..n)
        .map(|k| {
            let next = if k + 1 < n { residues[k + 1] } else { residues[0] + h };
            (0.5 * (residues[k] + next)).rem_euclid(h)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
            assert_eq!(serde_json::to_string(&a).unwrap(), format!("\"{a}\""));
        }
        assert!("bogus".parse::<Algorithm>().is_err());
    }

    #[test]
    fn sweep_guarantee_values() {
        assert_eq!(sweep_guarantee(1), 0.5);
        assert_eq!(sweep_guarantee(2), 1.0 / 7.0);
        assert_eq!(sweep_guarantee(3), 1.0 / 23.0);
    }

    #[test]
    fn certify_rejects_overlaps() {
        let c = Collection::intervals(&[(0.0, 1.0), (1.0, 2.0)]).unwrap();
        let err = certify(&c, vec![0, 1], Algorithm::Greedy, 0.5, vec![], &UnionConfig::default());
        assert!(matches!(err, Err(Error::Certificate(_))));
        let low = certify(&c, vec![], Algorithm::Greedy, 0.5, vec![], &UnionConfig::default());
        assert!(matches!(low, Err(Error::Certificate(_))));
    }
}
