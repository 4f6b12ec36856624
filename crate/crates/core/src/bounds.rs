//! Closed-form values of the named density bounds and the numeric
//! minimisation behind the sphere-packing upper bound for balls.
//!
//! `F` is the best density constant over arbitrary collections of
//! homothets, `f` the same over congruent collections; `f >= F`.
//! Logarithms are natural throughout.

use std::f64::consts::{E, FRAC_PI_2, FRAC_PI_3, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Volume of the unit Euclidean ball in `R^d` (`d = 0` gives 1).
pub fn unit_ball_volume(d: usize) -> f64 {
    // omega_d = omega_{d-2} * 2 pi / d
    let (mut even, mut odd) = (1.0, 2.0);
    for k in 2..=d {
        if k % 2 == 0 {
            even *= 2.0 * PI / k as f64;
        } else {
            odd *= 2.0 * PI / k as f64;
        }
    }
    if d.is_multiple_of(2) {
        even
    } else {
        odd
    }
}

/// Which constant a bound constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "lower_on_F")]
    LowerOnF,
    #[serde(rename = "lower_on_f")]
    LowerOnCongruent,
    #[serde(rename = "upper_on_f")]
    UpperOnCongruent,
    #[serde(rename = "upper_on_F")]
    UpperOnF,
    #[serde(rename = "auxiliary")]
    Auxiliary,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::LowerOnF => "lower_on_F",
            Side::LowerOnCongruent => "lower_on_f",
            Side::UpperOnCongruent => "upper_on_f",
            Side::UpperOnF => "upper_on_F",
            Side::Auxiliary => "auxiliary",
        }
    }
}

/// The body class a bound applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BodyClass {
    /// Every symmetric convex body.
    Any,
    Cube,
    Ball,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundName {
    Vitali,
    RadoEps,
    Sweep,
    RadoCube,
    BdjCube,
    FCube,
    TrivialUpper,
    MultiscaleCube,
    WarmupUpper,
    RadoDisk,
    BdjSquare,
    BdjDisk,
    AjtaiUpper2d,
    CorollaryBall,
    IntervalExact,
    KlAsymptotic,
}

impl BoundName {
    pub const ALL: [BoundName; 16] = [
        BoundName::Vitali,
        BoundName::RadoEps,
        BoundName::Sweep,
        BoundName::RadoCube,
        BoundName::BdjCube,
        BoundName::FCube,
        BoundName::TrivialUpper,
        BoundName::MultiscaleCube,
        BoundName::WarmupUpper,
        BoundName::RadoDisk,
        BoundName::BdjSquare,
        BoundName::BdjDisk,
        BoundName::AjtaiUpper2d,
        BoundName::CorollaryBall,
        BoundName::IntervalExact,
        BoundName::KlAsymptotic,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BoundName::Vitali => "vitali",
            BoundName::RadoEps => "rado_eps",
            BoundName::Sweep => "sweep",
            BoundName::RadoCube => "rado_cube",
            BoundName::BdjCube => "bdj_cube",
            BoundName::FCube => "f_cube",
            BoundName::TrivialUpper => "trivial_upper",
            BoundName::MultiscaleCube => "multiscale_cube",
            BoundName::WarmupUpper => "warmup_upper",
            BoundName::RadoDisk => "rado_disk",
            BoundName::BdjSquare => "bdj_square",
            BoundName::BdjDisk => "bdj_disk",
            BoundName::AjtaiUpper2d => "ajtai_upper_2d",
            BoundName::CorollaryBall => "corollary_ball",
            BoundName::IntervalExact => "interval_exact",
            BoundName::KlAsymptotic => "kl_asymptotic",
        }
    }

    /// Smallest and largest dimension the formula is stated for.
    pub fn valid_dims(&self) -> (usize, usize) {
        match self {
            BoundName::RadoDisk
            | BoundName::BdjSquare
            | BoundName::BdjDisk
            | BoundName::AjtaiUpper2d => (2, 2),
            BoundName::IntervalExact => (1, 1),
            BoundName::MultiscaleCube => (3, usize::MAX),
            // vacuous below d = 8: no alpha >= 1 satisfies alpha <= 0.1349 d
            BoundName::CorollaryBall => (8, usize::MAX),
            _ => (1, usize::MAX),
        }
    }

    fn side_and_class(&self) -> (Side, BodyClass) {
        use BodyClass::*;
        use Side::*;
        match self {
            BoundName::Vitali | BoundName::RadoEps => (LowerOnF, Any),
            BoundName::Sweep => (LowerOnCongruent, Any),
            BoundName::RadoCube | BoundName::BdjSquare => (LowerOnF, Cube),
            BoundName::BdjCube | BoundName::MultiscaleCube => (Auxiliary, Cube),
            BoundName::FCube => (LowerOnCongruent, Cube),
            BoundName::TrivialUpper => (UpperOnCongruent, Any),
            BoundName::WarmupUpper => (UpperOnCongruent, Ball),
            BoundName::RadoDisk => (LowerOnCongruent, Ball),
            BoundName::BdjDisk => (LowerOnF, Ball),
            BoundName::AjtaiUpper2d => (UpperOnF, Cube),
            BoundName::CorollaryBall | BoundName::KlAsymptotic => (Auxiliary, Ball),
            BoundName::IntervalExact => (LowerOnF, Any),
        }
    }

    fn note(&self) -> &'static str {
        match self {
            BoundName::Vitali => "greedy largest-first selection: F(K) >= 3^-d",
            BoundName::RadoEps => {
                "refined greedy: 3^-d (1 + 7^-d (d+2)^-(d^2+d)); correction evaluated in log space"
            }
            BoundName::Sweep => "boundary-first selection: f(K) >= (3^d - 2^(d-1))^-1",
            BoundName::RadoCube => "F(Q^d) > (3^d - 7^-d)^-1",
            BoundName::BdjCube => "F(Q^d) >= (3^d - 1/2 + o(1))^-1; o(1) dropped",
            BoundName::FCube => "exact: f(Q^d) = 2^-d",
            BoundName::TrivialUpper => "translates containing a common point: f(K) <= 2^-d",
            BoundName::MultiscaleCube => {
                "F(Q^d) >= (e^-3 + o(1)) 2^-d / (d ln d); o(1) dropped"
            }
            BoundName::WarmupUpper => "unit balls centred in a ball of radius sqrt 2: f(B^d) <= (d+1)(1+sqrt 2)^-d",
            BoundName::RadoDisk => "f(B^2) >= pi / (8 sqrt 3)",
            BoundName::BdjSquare => "F(Q^2) >= 1/8.4797",
            BoundName::BdjDisk => "F(B^2) >= 1/8.3539",
            BoundName::AjtaiUpper2d => "periodic square tiling: F(Q^2) <= 1/4 - 1/384",
            BoundName::CorollaryBall => {
                "f(B^d) >= 2 * 3^-d restricted to collections with alpha <= d log2(3/(1+sqrt 3))"
            }
            BoundName::IntervalExact => "exact on the line: f(B^1) = F(B^1) = 1/2",
            BoundName::KlAsymptotic => "f(B^d) <= base^(-d + o(d)) with the minimised KL exponent; o(d) dropped",
        }
    }
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BoundName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::UnknownBound(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub name: String,
    pub d: usize,
    pub value: f64,
    pub side: Side,
    pub body: BodyClass,
    pub note: String,
}

/// Evaluate a named bound at dimension `d`.
pub fn bound_value(name: BoundName, d: usize) -> Result<BoundValue> {
    let (lo, hi) = name.valid_dims();
    if d < lo || d > hi {
        return Err(Error::DimensionOutOfRange {
            name: name.to_string(),
            d,
        });
    }
    let df = d as f64;
    let di = d as i32;
    let value = match name {
        BoundName::Vitali => 3f64.powi(-di),
        BoundName::RadoEps => {
            let log_eps = -df * 7f64.ln() - (df * df + df) * (df + 2.0).ln();
            (-df * 3f64.ln() + log_eps.exp().ln_1p()).exp()
        }
        BoundName::Sweep => 1.0 / (3f64.powi(di) - 2f64.powi(di - 1)),
        BoundName::RadoCube => 1.0 / (3f64.powi(di) - 7f64.powi(-di)),
        BoundName::BdjCube => 1.0 / (3f64.powi(di) - 0.5),
        BoundName::FCube | BoundName::TrivialUpper => 2f64.powi(-di),
        BoundName::MultiscaleCube => E.powi(-3) * 2f64.powi(-di) / (df * df.ln()),
        BoundName::WarmupUpper => (df + 1.0) * (1.0 + 2f64.sqrt()).powi(-di),
        BoundName::RadoDisk => PI / (8.0 * 3f64.sqrt()),
        BoundName::BdjSquare => 1.0 / 8.4797,
        BoundName::BdjDisk => 1.0 / 8.3539,
        BoundName::AjtaiUpper2d => 0.25 - 1.0 / 384.0,
        BoundName::CorollaryBall => 2.0 * 3f64.powi(-di),
        BoundName::IntervalExact => 0.5,
        BoundName::KlAsymptotic => kl_upper_optimize(1e-10)?.base.powi(-di),
    };
    let (side, body) = name.side_and_class();
    Ok(BoundValue {
        name: name.to_string(),
        d,
        value,
        side,
        body,
        note: name.note().to_string(),
    })
}

/// Every bound defined at each `d` in `1..=d_max`, after checking that lower
/// and upper bounds are mutually consistent.
pub fn bounds_table(d_max: usize) -> Result<Vec<BoundValue>> {
    if d_max == 0 {
        return Err(Error::InvalidParameter("d_max must be at least 1".into()));
    }
    let mut rows = Vec::new();
    for d in 1..=d_max {
        for name in BoundName::ALL {
            let (lo, hi) = name.valid_dims();
            if (lo..=hi).contains(&d) {
                rows.push(bound_value(name, d)?);
            }
        }
    }
    let violations = consistency_violations(&rows);
    if violations.is_empty() {
        Ok(rows)
    } else {
        Err(Error::Certificate(violations.join("; ")))
    }
}

/// Pairs of bounds that contradict each other, per dimension and body class.
///
/// Lower bounds on `F` must not exceed any upper bound nor `2^-d`; lower
/// bounds on `f` must not exceed upper bounds on `f`. A lower bound on `f`
/// may legitimately exceed an upper bound on `F`.
pub fn consistency_violations(rows: &[BoundValue]) -> Vec<String> {
    let applies = |b: &BoundValue, class: BodyClass| b.body == class || b.body == BodyClass::Any;
    let le = |a: f64, b: f64| a <= b * (1.0 + 1e-12);
    let mut out = Vec::new();
    for class in [BodyClass::Cube, BodyClass::Ball] {
        for lower in rows.iter().filter(|b| applies(b, class)) {
            if lower.side == Side::LowerOnF && !le(lower.value, 2f64.powi(-(lower.d as i32))) {
                out.push(format!("{} exceeds 2^-d at d = {}", lower.name, lower.d));
            }
            for upper in rows.iter().filter(|u| u.d == lower.d && applies(u, class)) {
                let comparable = matches!(
                    (lower.side, upper.side),
                    (Side::LowerOnF, Side::UpperOnF | Side::UpperOnCongruent)
                        | (Side::LowerOnCongruent, Side::UpperOnCongruent)
                );
                if comparable && !le(lower.value, upper.value) {
                    out.push(format!(
                        "{} ({}) > {} ({}) at d = {} for {:?}",
                        lower.name, lower.value, upper.name, upper.value, lower.d, class
                    ));
                }
            }
        }
    }
    out
}

/// CSV with columns `name,d,value,side,note`.
pub fn bounds_csv(rows: &[BoundValue]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["name", "d", "value", "side", "note"]).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.name.clone(),
            r.d.to_string(),
            format!("{:e}", r.value),
            r.side.as_str().to_string(),
            r.note.clone(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Per-dimension exponent of the Kabatiansky-Levenshtein bound on the size
/// of a spherical code with minimum angle `theta`.
///
/// For `theta >= pi/2` a spherical code has at most `2d` points, so the
/// exponent is 0; the formula itself also vanishes at `pi/2`, making the
/// two branches meet with zero slope.
pub fn kl_code_exponent(theta: f64) -> f64 {
    if theta >= FRAC_PI_2 {
        return 0.0;
    }
    let s = theta.sin();
    let a = (1.0 + s) / (2.0 * s);
    let b = (1.0 - s) / (2.0 * s);
    xlnx(a) - xlnx(b)
}

/// Exponent of the upper bound on `f(B^d)` obtained from unit balls centred
/// in a ball of radius `r = 1/sin(theta/2)`.
pub fn kl_objective(theta: f64) -> Result<f64> {
    if !(FRAC_PI_3..=PI).contains(&theta) {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in [pi/3, pi], got {theta}"
        )));
    }
    Ok(kl_code_exponent(theta) - (1.0 / (theta / 2.0).sin()).ln_1p())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KLResult {
    pub theta_star: f64,
    pub objective_min: f64,
    pub r_star: f64,
    /// `exp(-objective_min)`: `f(B^d) <= base^(-d + o(d))`.
    pub base: f64,
    /// Best value on the coarse grid before refinement.
    pub grid_min: f64,
}

const KL_GRID: usize = 10_000;

/// Minimise [`kl_objective`] over `[pi/3, pi]`: dense grid, then
/// golden-section refinement inside the bracketing grid cells.
pub fn kl_upper_optimize(tol: f64) -> Result<KLResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let (a, b) = (FRAC_PI_3, PI);
    let h = (b - a) / KL_GRID as f64;
    let objective = |t: f64| kl_objective(t.clamp(a, b)).expect("clamped into domain");
    let (best_i, grid_min) = (0..=KL_GRID)
        .map(|i| (i, objective(a + h * i as f64)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("non-empty grid");
    let lo = a + h * best_i.saturating_sub(1) as f64;
    let hi = (a + h * (best_i + 1) as f64).min(b);
    let (theta_star, objective_min) = golden_section_min(objective, lo, hi, tol);
    Ok(KLResult {
        theta_star,
        objective_min,
        r_star: 1.0 / (theta_star / 2.0).sin(),
        base: (-objective_min).exp(),
        grid_min,
    })
}

/// Golden-section search for the minimum of a unimodal function on `[a, b]`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// `1 + sqrt 3`.
pub const SIGMA: f64 = 2.732_050_807_568_877;

/// Upper bound on the union volume of unit balls with independence number
/// at most `alpha`, in units of the unit-ball volume.
pub fn v_alpha_bound(d: usize, alpha: usize) -> Result<f64> {
    if d < 3 || alpha < 1 {
        return Err(Error::InvalidParameter(format!(
            "v_alpha_bound needs d >= 3 and alpha >= 1, got d = {d}, alpha = {alpha}"
        )));
    }
    let two_d = 2f64.powi(d as i32);
    Ok(match alpha {
        1 => two_d,
        _ => {
            let p = 2f64.powi(alpha as i32 - 2);
            p * SIGMA.powi(d as i32) + (p - 1.0) * two_d
        }
    })
}

/// Largest `alpha` (as a real) for which the small-independence bound beats
/// greedy by a factor two: `d log2(3 / (1 + sqrt 3))`.
pub fn alpha_threshold(d: usize) -> Result<f64> {
    if d < 3 {
        return Err(Error::DimensionOutOfRange {
            name: "alpha_threshold".into(),
            d,
        });
    }
    Ok(d as f64 * (3.0 / SIGMA).log2())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn unit_ball_volumes() {
        assert_eq!(unit_ball_volume(1), 2.0);
        assert!(close(unit_ball_volume(2), PI, 1e-15));
        assert!(close(unit_ball_volume(3), 4.0 * PI / 3.0, 1e-14));
        assert!(close(unit_ball_volume(4), PI * PI / 2.0, 1e-14));
    }

    #[test]
    fn named_values() {
        assert!(close(bound_value(BoundName::Sweep, 2).unwrap().value, 1.0 / 7.0, 1e-16));
        assert!(close(bound_value(BoundName::Vitali, 2).unwrap().value, 1.0 / 9.0, 1e-16));
        let disk = bound_value(BoundName::RadoDisk, 2).unwrap().value;
        assert!(close(disk, 0.226_724_9, 1e-7), "{disk}");
        let ajtai = bound_value(BoundName::AjtaiUpper2d, 2).unwrap().value;
        assert!(close(ajtai, 0.247_395_833_333, 1e-12));
        assert_eq!(bound_value(BoundName::AjtaiUpper2d, 2).unwrap().side, Side::UpperOnF);
        for d in 1..=20 {
            let w = bound_value(BoundName::WarmupUpper, d).unwrap().value;
            assert!(close(w / (1.0 + 2f64.sqrt()).powi(-(d as i32)), d as f64 + 1.0, 1e-9));
        }
    }

    #[test]
    fn rado_eps_survives_underflow() {
        let v = bound_value(BoundName::RadoEps, 20).unwrap().value;
        assert!(v.is_finite() && v >= 3f64.powi(-20) * (1.0 - 1e-12));
        let v1 = bound_value(BoundName::RadoEps, 1).unwrap().value;
        assert!(close(v1, (1.0 + 1.0 / (7.0 * 9.0)) / 3.0, 1e-14));
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            bound_value(BoundName::RadoDisk, 3),
            Err(Error::DimensionOutOfRange { .. })
        ));
        assert!(matches!("nope".parse::<BoundName>(), Err(Error::UnknownBound(_))));
        assert_eq!("sweep".parse::<BoundName>().unwrap(), BoundName::Sweep);
        assert!(kl_objective(1.0).is_err());
        assert!(v_alpha_bound(2, 3).is_err());
        assert!(alpha_threshold(2).is_err());
    }

    #[test]
    fn kl_endpoints() {
        assert!(close(kl_objective(PI).unwrap(), -2f64.ln(), 1e-15));
        assert!(kl_objective(FRAC_PI_3).unwrap() > -0.8952);
        assert!(close(kl_objective(1.45251).unwrap(), -0.895227, 5e-5));
        // the two branches meet at pi/2
        let below = kl_objective(FRAC_PI_2 - 1e-7).unwrap();
        let above = kl_objective(FRAC_PI_2 + 1e-7).unwrap();
        assert!(close(below, above, 1e-6));
    }

    #[test]
    fn golden_section_on_parabola() {
        let (x, fx) = golden_section_min(|x| (x - 0.3) * (x - 0.3) + 1.0, -2.0, 2.0, 1e-10);
        // flat minimum: x is only resolved to about sqrt(machine epsilon)
        assert!(close(x, 0.3, 1e-7));
        assert!(close(fx, 1.0, 1e-15));
    }

    #[test]
    fn v_alpha_closed_form() {
        assert_eq!(v_alpha_bound(3, 1).unwrap(), 8.0);
        assert!(close(v_alpha_bound(3, 2).unwrap(), SIGMA.powi(3), 1e-12));
        assert!(close(v_alpha_bound(3, 3).unwrap(), 2.0 * SIGMA.powi(3) + 8.0, 1e-12));
        assert!(close(SIGMA, 1.0 + 3f64.sqrt(), 1e-15));
    }

    #[test]
    fn alpha_threshold_is_linear() {
        let t10 = alpha_threshold(10).unwrap();
        assert!(close(t10, 1.349, 1e-3), "{t10}");
        assert!(close(alpha_threshold(100).unwrap(), 10.0 * t10, 1e-12));
    }

    #[test]
    fn table_is_consistent() {
        let rows = bounds_table(20).unwrap();
        assert!(rows.iter().any(|r| r.d == 1 && r.name == "interval_exact" && r.value == 0.5));
        let csv = bounds_csv(&rows);
        assert!(csv.starts_with("name,d,value,side,note\n"));
        assert_eq!(csv.lines().count(), rows.len() + 1);
    }

    #[test]
    fn inconsistent_rows_are_reported() {
        let mut rows = vec![bound_value(BoundName::TrivialUpper, 2).unwrap()];
        let mut fake = bound_value(BoundName::Vitali, 2).unwrap();
        fake.value = 0.3;
        rows.push(fake);
        assert!(!consistency_violations(&rows).is_empty());
    }
}
