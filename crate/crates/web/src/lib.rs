//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a JSON string. Failures are reported as
//! `{"error": "..."}` so the functions behave the same natively and in the
//! browser.

use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use rado_core::bounds::{kl_objective, kl_upper_optimize};
use rado_core::constructions::{
    ajtai_almost_counterexample, ajtai_rectangle, compose_ajtai, default_placements, probe_random_maximal,
    verify_almost_counterexample,
};
use rado_core::experiment::{generate, ExperimentSpec, RadiusModel};
use rado_core::geometry::BodyKind;
use rado_core::oracle::max_disjoint_volume;
use rado_core::selectors::{select, Algorithm, SelectOptions};

/// Bodies above which the demo skips the exact oracle.
const ORACLE_LIMIT: usize = 40;

fn respond(r: Result<Value, String>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

fn to_value(v: &impl Serialize) -> Result<Value, String> {
    serde_json::to_value(v).map_err(|e| e.to_string())
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Random planar collection plus one selector run and, for small inputs,
/// the exact optimum.
///
/// `kind` is `box` or `ball`; `radii` is `equal`, `uniform` or `two-scale`.
#[wasm_bindgen]
pub fn selector_demo(kind: &str, radii: &str, n: u32, seed: u32, algorithm: &str) -> String {
    respond(selector_demo_inner(kind, radii, n as usize, seed as u64, algorithm))
}

fn selector_demo_inner(kind: &str, radii: &str, n: usize, seed: u64, algorithm: &str) -> Result<Value, String> {
    let kind = match kind {
        "box" => BodyKind::AxisBox,
        "ball" => BodyKind::Ball,
        _ => return Err(format!("unknown kind {kind:?}")),
    };
    let radius_model = match radii {
        "equal" => RadiusModel::Equal { radius: 0.5 },
        "uniform" => RadiusModel::Uniform { lo: 0.15, hi: 0.9 },
        "two-scale" => RadiusModel::TwoScale { r1: 1.0, r2: 0.5 },
        _ => return Err(format!("unknown radius model {radii:?}")),
    };
    if n == 0 || n > 400 {
        return Err("n must be between 1 and 400".into());
    }
    let algorithm: Algorithm = algorithm.parse().map_err(err)?;
    let spec = ExperimentSpec {
        dimension: 2,
        kind,
        n_bodies: n,
        radius_model,
        center_box: 2.5,
        trials: 1,
        seed,
        algorithms: vec![algorithm],
        oracle_max_n: ORACLE_LIMIT,
        options: SelectOptions::default(),
    };
    let c = generate(&spec, 0).map_err(err)?;
    let selection = select(&c, algorithm, &SelectOptions::default());
    let oracle = if n <= ORACLE_LIMIT {
        Some(max_disjoint_volume(&c, &[]))
    } else {
        None
    };
    Ok(json!({
        "collection": to_value(&c)?,
        "selection": match selection {
            Ok(r) => to_value(&r)?,
            Err(e) => json!({ "error": e.to_string() }),
        },
        "oracle": match oracle {
            Some(Ok(r)) => to_value(&r)?,
            Some(Err(e)) => json!({ "error": e.to_string() }),
            None => Value::Null,
        },
    }))
}

/// Objective sampled on `points` equally spaced angles in `[pi/3, pi]`,
/// together with the refined minimum.
#[wasm_bindgen]
pub fn kl_curve(points: u32) -> String {
    respond(kl_curve_inner(points as usize))
}

fn kl_curve_inner(points: usize) -> Result<Value, String> {
    if !(2..=20_000).contains(&points) {
        return Err("points must be between 2 and 20000".into());
    }
    let (a, b) = (std::f64::consts::FRAC_PI_3, std::f64::consts::PI);
    let curve = (0..points)
        .map(|i| {
            let t = a + (b - a) * i as f64 / (points - 1) as f64;
            kl_objective(t).map(|f| [t, f])
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let min = kl_upper_optimize(1e-10).map_err(err)?;
    Ok(json!({ "curve": curve, "minimum": to_value(&min)? }))
}

/// The 52-square almost-counterexample with both oracle runs, or the
/// composed family with the best of `samples` random maximal selections.
#[wasm_bindgen]
pub fn ajtai_demo(composed: bool, samples: u32, seed: u32) -> String {
    respond(ajtai_demo_inner(composed, samples as usize, seed as u64))
}

fn ajtai_demo_inner(composed: bool, samples: usize, seed: u64) -> Result<Value, String> {
    let a = ajtai_almost_counterexample().map_err(err)?;
    let rect = ajtai_rectangle().map_err(err)?;
    if composed {
        let c = compose_ajtai(&a, &default_placements(&rect)).map_err(err)?;
        let probe = probe_random_maximal(&c, samples, seed).map_err(err)?;
        return Ok(json!({
            "collection": to_value(&c)?,
            "frame": [-1.0, -1.0, 1.0, 1.0],
            "probe": to_value(&probe)?,
        }));
    }
    let report = verify_almost_counterexample(&a, &rect).map_err(err)?;
    Ok(json!({
        "collection": to_value(&a)?,
        "frame": [rect.x0, rect.y0, rect.x1, rect.y1],
        "report": to_value(&report)?,
    }))
}
