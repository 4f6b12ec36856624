//! Seeded random ensembles comparing selectors with the exact oracle.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Body, BodyKind, Collection};
use crate::oracle::Oracle;
use crate::selectors::{select, Algorithm, SelectOptions, DENSITY_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum RadiusModel {
    Equal { radius: f64 },
    Uniform { lo: f64, hi: f64 },
    /// Each body takes `r1` or `r2` with equal probability.
    TwoScale { r1: f64, r2: f64 },
    /// Radii `base^-k` with `k` uniform in `0..levels`.
    Lacunary { base: f64, levels: u32 },
}

impl RadiusModel {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            RadiusModel::Equal { radius } => radius > 0.0,
            RadiusModel::Uniform { lo, hi } => lo > 0.0 && hi >= lo,
            RadiusModel::TwoScale { r1, r2 } => r1 > 0.0 && r2 > 0.0,
            RadiusModel::Lacunary { base, levels } => base > 1.0 && levels >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("bad radius model {self:?}")))
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            RadiusModel::Equal { radius } => radius,
            RadiusModel::Uniform { lo, hi } => {
                if hi > lo {
                    rng.random_range(lo..hi)
                } else {
                    lo
                }
            }
            RadiusModel::TwoScale { r1, r2 } => {
                if rng.random::<bool>() {
                    r1
                } else {
                    r2
                }
            }
            RadiusModel::Lacunary { base, levels } => base.powi(-(rng.random_range(0..levels) as i32)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub dimension: usize,
    pub kind: BodyKind,
    pub n_bodies: usize,
    pub radius_model: RadiusModel,
    /// Centers are uniform in `[-center_box, center_box]^d`.
    pub center_box: f64,
    pub trials: usize,
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
    /// The oracle runs when `n_bodies` is at most this.
    #[serde(default = "default_oracle_max_n")]
    pub oracle_max_n: usize,
    #[serde(default)]
    pub options: SelectOptions,
}

fn default_oracle_max_n() -> usize {
    14
}

impl ExperimentSpec {
    fn validate(&self) -> Result<()> {
        if self.dimension == 0 || self.n_bodies == 0 || self.trials == 0 {
            return Err(Error::InvalidParameter("dimension, n_bodies and trials must be positive".into()));
        }
        if !(self.center_box >= 0.0 && self.center_box.is_finite()) {
            return Err(Error::InvalidParameter(format!("center_box {}", self.center_box)));
        }
        if self.kind == BodyKind::RotRect {
            return Err(Error::InvalidParameter("experiments generate boxes or balls".into()));
        }
        self.radius_model.validate()
    }
}

/// Deterministic collection for `(spec.seed, trial)`.
pub fn generate(spec: &ExperimentSpec, trial: usize) -> Result<Collection> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(trial as u64);
    let cb = spec.center_box;
    let bodies = (0..spec.n_bodies)
        .map(|_| {
            let x: Vec<f64> = (0..spec.dimension)
                .map(|_| if cb > 0.0 { rng.random_range(-cb..=cb) } else { 0.0 })
                .collect();
            let r = spec.radius_model.sample(&mut rng);
            match spec.kind {
                BodyKind::Ball => Body::ball(x, r),
                _ => Body::axis_box(x, r),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Collection::new(spec.dimension, format!("trial {trial} seed {}", spec.seed), bodies)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub trial: usize,
    pub algorithm: Algorithm,
    pub density: Option<f64>,
    pub guarantee: Option<f64>,
    pub oracle_delta: Option<f64>,
    pub ratio_to_oracle: Option<f64>,
    /// Selector failure, e.g. a violated precondition.
    pub error: Option<String>,
    pub certificate_failure: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub failures: usize,
    pub min_density: Option<f64>,
    pub mean_density: Option<f64>,
    /// Smallest density relative to the guarantee.
    pub min_margin: Option<f64>,
    pub worst_ratio_to_oracle: Option<f64>,
    pub max_ratio_to_oracle: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
    pub summary: Vec<AlgorithmSummary>,
}

impl ExperimentReport {
    pub fn certificate_failures(&self) -> usize {
        self.rows.iter().filter(|r| r.certificate_failure).count()
    }

    /// Rows whose density exceeds the oracle optimum.
    pub fn oracle_violations(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| matches!((r.density, r.oracle_delta), (Some(d), Some(o)) if d > o + DENSITY_TOL))
            .count()
    }

    /// CSV of the rows. `stamp` adds a leading `# generated` comment line,
    /// the only part of the output that is not a function of the spec.
    pub fn to_csv(&self, stamp: bool) -> String {
        let mut out = String::new();
        if stamp {
            let secs = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            let _ = writeln!(out, "# generated {secs}");
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["trial", "algorithm", "density", "guarantee", "oracle_delta", "ratio_to_oracle", "error"])
            .expect("in-memory write");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.12e}")).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.trial.to_string(),
                r.algorithm.to_string(),
                opt(r.density),
                opt(r.guarantee),
                opt(r.oracle_delta),
                opt(r.ratio_to_oracle),
                r.error.clone().unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8"));
        out
    }
}

fn run_trial(spec: &ExperimentSpec, trial: usize) -> Result<Vec<ExperimentRow>> {
    let c = generate(spec, trial)?;
    let oracle_delta = if spec.n_bodies <= spec.oracle_max_n {
        let oracle = Oracle::default().with_union(spec.options.union);
        Some(oracle.max_disjoint_volume(&c, &[])?.delta)
    } else {
        None
    };
    Ok(spec
        .algorithms
        .iter()
        .map(|&algorithm| match select(&c, algorithm, &spec.options) {
            Ok(r) => ExperimentRow {
                trial,
                algorithm,
                density: Some(r.density),
                guarantee: Some(r.guarantee),
                oracle_delta,
                ratio_to_oracle: oracle_delta.map(|o| r.density / o),
                error: None,
                certificate_failure: false,
            },
            Err(e) => ExperimentRow {
                trial,
                algorithm,
                density: None,
                guarantee: None,
                oracle_delta,
                ratio_to_oracle: None,
                certificate_failure: matches!(e, Error::Certificate(_)),
                error: Some(e.to_string()),
            },
        })
        .collect())
}

/// Runs every trial (in parallel when enabled) and merges rows in trial
/// order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    #[cfg(feature = "parallel")]
    let per_trial: Vec<Result<Vec<ExperimentRow>>> = {
        use rayon::prelude::*;
        (0..spec.trials).into_par_iter().map(|t| run_trial(spec, t)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let per_trial: Vec<Result<Vec<ExperimentRow>>> = (0..spec.trials).map(|t| run_trial(spec, t)).collect();
    let mut rows = Vec::new();
    for r in per_trial {
        rows.extend(r?);
    }
    let summary = spec
        .algorithms
        .iter()
        .map(|&algorithm| {
            let mine: Vec<&ExperimentRow> = rows.iter().filter(|r| r.algorithm == algorithm).collect();
            let dens: Vec<f64> = mine.iter().filter_map(|r| r.density).collect();
            let ratios: Vec<f64> = mine.iter().filter_map(|r| r.ratio_to_oracle).collect();
            let margins: Vec<f64> = mine
                .iter()
                .filter_map(|r| Some(r.density? / r.guarantee?))
                .collect();
            let min = |v: &[f64]| v.iter().copied().reduce(f64::min);
            AlgorithmSummary {
                algorithm,
                runs: mine.len(),
                failures: mine.len() - dens.len(),
                min_density: min(&dens),
                mean_density: (!dens.is_empty()).then(|| dens.iter().sum::<f64>() / dens.len() as f64),
                min_margin: min(&margins),
                worst_ratio_to_oracle: min(&ratios),
                max_ratio_to_oracle: ratios.iter().copied().reduce(f64::max),
            }
        })
        .collect();
    Ok(ExperimentReport { rows, summary })
}
