use serde::{Deserialize, Serialize};

use super::{
    blichfeldt_lattice, certify, nordlander_indices, sweep_guarantee, sweep_indices, vitali_indices,
    zalgaller_indices, Algorithm, GuaranteeFactor, SelectionResult,
};
use crate::error::{Error, Result};
use crate::geometry::{union_volume, Body, BodyKind, Collection, UnionConfig};

/// Selector used on each single-scale layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum CongruentSelector {
    Nordlander,
    Blichfeldt { eps: f64 },
    Zalgaller,
    Sweep,
    Greedy,
}

impl CongruentSelector {
    pub fn guarantee(&self, d: usize) -> f64 {
        let d = d as i32;
        match self {
            CongruentSelector::Nordlander => 2f64.powi(-d),
            CongruentSelector::Blichfeldt { eps } => (2.0 + eps).powi(-d),
            CongruentSelector::Zalgaller => 0.25,
            CongruentSelector::Sweep => sweep_guarantee(d as usize),
            CongruentSelector::Greedy => 3f64.powi(-d),
        }
    }

    fn indices(&self, c: &Collection) -> Result<Vec<usize>> {
        match self {
            CongruentSelector::Nordlander => nordlander_indices(c),
            CongruentSelector::Blichfeldt { eps } => Ok(blichfeldt_lattice(c, *eps)?.1),
            CongruentSelector::Zalgaller => zalgaller_indices(c),
            CongruentSelector::Sweep => sweep_indices(c),
            CongruentSelector::Greedy => vitali_indices(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiscaleParams {
    pub base_scale: f64,
    /// Number `J` of exponent residue classes.
    pub residue_classes: usize,
    pub inflation: f64,
    pub congruent_selector: CongruentSelector,
}

impl MultiscaleParams {
    /// `base = 1 + 1/d`, `J = max(1, ceil(d ln d))`, `inflation = 1 + 2/d`,
    /// slicing selector on each layer.
    pub fn for_dimension(d: usize) -> Self {
        let df = d as f64;
        MultiscaleParams {
            base_scale: 1.0 + 1.0 / df,
            residue_classes: ((df * df.ln()).ceil() as usize).max(1),
            inflation: 1.0 + 2.0 / df,
            congruent_selector: CongruentSelector::Nordlander,
        }
    }

    fn validate(&self, d: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.base_scale > 1.0 && self.base_scale.is_finite()) {
            return bad(format!("base_scale must exceed 1, got {}", self.base_scale));
        }
        if self.residue_classes == 0 {
            return bad("residue_classes must be at least 1".into());
        }
        if !(self.inflation >= 1.0 && self.inflation.is_finite()) {
            return bad(format!("inflation must be at least 1, got {}", self.inflation));
        }
        match self.congruent_selector {
            CongruentSelector::Zalgaller if d != 2 => bad("zalgaller layers need d = 2".into()),
            CongruentSelector::Blichfeldt { eps } if !(eps > 0.0 && eps.is_finite()) => {
                bad(format!("eps must be positive, got {eps}"))
            }
            _ => Ok(()),
        }
    }
}

/// Least integer power of `base` that is at least `r`, as (exponent, value).
pub fn round_radius(r: f64, base: f64) -> (i32, f64) {
    let mut p = (r.ln() / base.ln()).ceil() as i32;
    // absorb round-off on exact powers
    while base.powi(p - 1) >= r * (1.0 - 1e-12) {
        p -= 1;
    }
    while base.powi(p) < r * (1.0 - 1e-12) {
        p += 1;
    }
    (p, base.powi(p))
}

pub(crate) fn run(c: &Collection, params: &MultiscaleParams, union: &UnionConfig) -> Result<SelectionResult> {
    c.require_kind("select_multiscale", &[BodyKind::AxisBox])?;
    let d = c.dimension();
    params.validate(d)?;
    let b = c.bodies();
    let j = params.residue_classes as i32;

    let rounded: Vec<(i32, Body)> = b
        .iter()
        .map(|body| {
            let (p, rho) = round_radius(body.radius(), params.base_scale);
            Ok((p, body.with_radius(rho)?))
        })
        .collect::<Result<_>>()?;
    let rounding = b
        .iter()
        .zip(&rounded)
        .map(|(body, (_, r))| (body.radius() / r.radius()).powi(d as i32))
        .fold(1.0, f64::min);

    // residue class of largest rounded union, ties to the smallest residue
    let mut residues: Vec<i32> = rounded.iter().map(|(p, _)| p.rem_euclid(j)).collect();
    residues.sort_unstable();
    residues.dedup();
    let mut keep = residues[0];
    let mut keep_vol = f64::NEG_INFINITY;
    for &res in &residues {
        let members: Vec<Body> = rounded
            .iter()
            .filter(|(p, _)| p.rem_euclid(j) == res)
            .map(|(_, body)| body.clone())
            .collect();
        let v = union_volume(&Collection::new(d, "", members)?, union)?.value;
        if v > keep_vol {
            keep = res;
            keep_vol = v;
        }
    }

    let mut alive: Vec<usize> = (0..b.len()).filter(|&i| rounded[i].0.rem_euclid(j) == keep).collect();
    let mut scales: Vec<i32> = alive.iter().map(|&i| rounded[i].0).collect();
    scales.sort_unstable_by(|x, y| y.cmp(x));
    scales.dedup();

    let mut chosen = Vec::new();
    for &p in &scales {
        let layer: Vec<usize> = alive.iter().copied().filter(|&i| rounded[i].0 == p).collect();
        if layer.is_empty() {
            continue;
        }
        let bodies = layer.iter().map(|&i| rounded[i].1.clone()).collect();
        let picked = params.congruent_selector.indices(&Collection::new(d, "", bodies)?)?;
        chosen.extend(picked.iter().map(|&k| layer[k]));
        // smaller bodies meeting this layer lie in its inflation
        alive.retain(|&i| rounded[i].0 >= p || layer.iter().all(|&l| !rounded[i].1.intersects(&rounded[l].1)));
    }

    let lambda = params
        .inflation
        .max(1.0 + 2.0 * params.base_scale.powi(-j));
    let inflation = if scales.len() > 1 { lambda.powi(-(d as i32)) } else { 1.0 };
    let factors = vec![
        GuaranteeFactor { name: "rounding".into(), value: rounding },
        GuaranteeFactor { name: "residue_class".into(), value: 1.0 / residues.len() as f64 },
        GuaranteeFactor { name: "inflation".into(), value: inflation },
        GuaranteeFactor {
            name: "congruent".into(),
            value: params.congruent_selector.guarantee(d),
        },
    ];
    let guarantee = factors.iter().map(|f| f.value).product();
    certify(c, chosen, Algorithm::Multiscale, guarantee, factors, union)
}

/// Selection among boxes of arbitrary sizes by scale layering. The
/// guarantee is the product of the losses recorded in
/// [`SelectionResult::guarantee_factors`].
pub fn select_multiscale(c: &Collection, params: &MultiscaleParams) -> Result<SelectionResult> {
    run(c, params, &UnionConfig::default())
}
