use proptest::prelude::*;

use rado_core::bounds::{kl_objective, kl_upper_optimize, v_alpha_bound};
use rado_core::constructions::{pinwheel, translate_net};
use rado_core::experiment::{generate, ExperimentSpec, RadiusModel};
use rado_core::geometry::{union_volume_boxes, union_volume_mc, BodyKind};
use rado_core::oracle::{independence_number, intersection_graph, max_disjoint_volume};
use rado_core::selectors::{
    blichfeldt_lattice, round_radius, select, Algorithm, MultiscaleParams, SelectOptions,
};
use rado_core::{Body, Collection};

fn boxes(d: usize, max_n: usize) -> impl Strategy<Value = Collection> {
    prop::collection::vec((prop::collection::vec(-4.0f64..4.0, d), 0.1f64..2.0), 1..=max_n).prop_map(move |v| {
        let b = v.into_iter().map(|(c, r)| Body::axis_box(c, r).unwrap()).collect();
        Collection::new(d, "", b).unwrap()
    })
}

fn balls(d: usize, max_n: usize) -> impl Strategy<Value = Collection> {
    prop::collection::vec((prop::collection::vec(-4.0f64..4.0, d), 0.1f64..2.0), 1..=max_n).prop_map(move |v| {
        let b = v.into_iter().map(|(c, r)| Body::ball(c, r).unwrap()).collect();
        Collection::new(d, "", b).unwrap()
    })
}

fn any_body() -> impl Strategy<Value = (Body, Body)> {
    let planar = (-3.0f64..3.0, -3.0f64..3.0, 0.1f64..2.0, 0.1f64..2.0, 0.0f64..6.3);
    (0usize..3, planar.clone(), planar).prop_map(|(kind, a, b)| {
        let make = |(x, y, r, s, t): (f64, f64, f64, f64, f64)| match kind {
            0 => Body::axis_box(vec![x, y], r).unwrap(),
            1 => Body::ball(vec![x, y], r).unwrap(),
            _ => Body::rot_rect(vec![x, y], [r, s], t).unwrap(),
        };
        (make(a), make(b))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn intersects_is_symmetric_and_reflexive((a, b) in any_body()) {
        prop_assert_eq!(a.intersects(&b), b.intersects(&a));
        prop_assert!(a.intersects(&a));
    }

    #[test]
    fn dilation_round_trip(c in prop::collection::vec(-5.0f64..5.0, 3), r in 0.01f64..10.0, l in 0.05f64..20.0) {
        let b = Body::ball(c, r).unwrap();
        let back = b.dilate(l).unwrap().dilate(1.0 / l).unwrap();
        prop_assert!((back.radius() - r).abs() <= 1e-12 * r);
        let v = b.dilate(l).unwrap().volume() / b.volume();
        prop_assert!((v - l.powi(3)).abs() <= 1e-9 * v);
    }

    #[test]
    fn box_union_bounds(c in boxes(2, 12)) {
        let u = union_volume_boxes(&c).unwrap().value;
        prop_assert!(u <= c.total_volume() * (1.0 + 1e-12));
        prop_assert!(u >= c.max_volume() * (1.0 - 1e-12));
        let all: Vec<usize> = (0..c.len()).collect();
        if c.is_disjoint_subset(&all) {
            prop_assert!((u - c.total_volume()).abs() <= 1e-9 * u);
        }
    }

    #[test]
    fn oracle_invariants(c in boxes(2, 10), forbid in prop::collection::vec(0usize..10, 0..4)) {
        let forbid: Vec<usize> = forbid.into_iter().filter(|&i| i < c.len()).collect();
        let free = max_disjoint_volume(&c, &[]).unwrap();
        prop_assert!(c.is_disjoint_subset(&free.chosen));
        let sum: f64 = free.chosen.iter().map(|&i| c.bodies()[i].volume()).sum();
        prop_assert!((sum - free.selected_volume).abs() <= 1e-12 * sum.max(1.0));
        prop_assert!(free.delta <= 1.0 + 1e-12);
        prop_assert!(free.delta >= c.max_volume() / free.union_volume.value - 1e-12);
        let constrained = max_disjoint_volume(&c, &forbid).unwrap();
        prop_assert!(constrained.selected_volume <= free.selected_volume + 1e-12);
        prop_assert!(constrained.chosen.iter().all(|i| !forbid.contains(i)));
        let g = intersection_graph(&c);
        let complete = g.edges().len() == c.len() * (c.len() - 1) / 2;
        prop_assert_eq!(independence_number(&c).unwrap() == 1, complete);
    }

    #[test]
    fn selectors_never_beat_the_oracle(c in boxes(2, 10)) {
        let best = max_disjoint_volume(&c, &[]).unwrap().delta;
        for algo in [Algorithm::Greedy, Algorithm::Multiscale] {
            let r = select(&c, algo, &SelectOptions::default()).unwrap();
            prop_assert!(r.density <= best + 1e-9);
            prop_assert!(r.density >= r.guarantee - 1e-9);
        }
    }

    #[test]
    fn ball_selectors_never_beat_the_oracle(c in balls(2, 8)) {
        let r = select(&c, Algorithm::Greedy, &SelectOptions::default()).unwrap();
        let best = max_disjoint_volume(&c, &[]).unwrap();
        // both densities share the same union estimate
        prop_assert!(r.selected_volume <= best.selected_volume + 1e-12);
        prop_assert!(r.density <= best.delta + 1e-9);
    }

    #[test]
    fn rounding_inflates_union_by_at_most_base_power(c in boxes(2, 10), base in 1.05f64..3.0) {
        let rounded: Vec<Body> = c
            .bodies()
            .iter()
            .map(|b| b.with_radius(round_radius(b.radius(), base).1).unwrap())
            .collect();
        let before = union_volume_boxes(&c).unwrap().value;
        let after = union_volume_boxes(&Collection::new(2, "", rounded).unwrap()).unwrap().value;
        prop_assert!(after >= before * (1.0 - 1e-12));
        prop_assert!(after <= base * base * before * (1.0 + 1e-12));
    }
}

#[test]
fn mc_interval_covers_exact_box_unions() {
    let c = Collection::new(
        2,
        "",
        vec![
            Body::axis_box(vec![0.0, 0.0], 1.0).unwrap(),
            Body::axis_box(vec![1.2, 0.4], 0.7).unwrap(),
            Body::axis_box(vec![-2.0, 3.0], 0.5).unwrap(),
        ],
    )
    .unwrap();
    let exact = union_volume_boxes(&c).unwrap().value;
    let covered = (0..1000u64)
        .filter(|&s| union_volume_mc(&c, 0.05, 0.99, s).unwrap().contains(exact))
        .count();
    assert!(covered >= 990, "{covered} of 1000 intervals cover {exact}");
}

#[test]
fn congruent_selectors_on_random_ensembles() {
    for d in 1..=3usize {
        for trial in 0..60 {
            let spec = ExperimentSpec {
                dimension: d,
                kind: BodyKind::AxisBox,
                n_bodies: 12,
                radius_model: RadiusModel::Equal { radius: 0.5 },
                center_box: 2.0,
                trials: 1,
                seed: 7,
                algorithms: vec![],
                oracle_max_n: 14,
                options: SelectOptions::default(),
            };
            let c = generate(&spec, trial).unwrap();
            let best = max_disjoint_volume(&c, &[]).unwrap().delta;
            let mut algos = vec![Algorithm::Sweep, Algorithm::Blichfeldt, Algorithm::Nordlander, Algorithm::Multiscale];
            if d == 1 {
                algos.push(Algorithm::Rado1d);
            }
            if d == 2 {
                algos.push(Algorithm::Zalgaller);
            }
            for algo in algos {
                let r = select(&c, algo, &SelectOptions::default()).unwrap();
                assert!(r.density <= best + 1e-9, "{algo} beats the oracle");
                assert!(r.density >= r.guarantee - 1e-9);
            }
            // the best translate covers at least the average number of points
            let (lattice, chosen) = blichfeldt_lattice(&c, 0.01).unwrap();
            let avg = union_volume_boxes(&c).unwrap().value / lattice.spacing.powi(d as i32);
            assert!(chosen.len() as f64 >= avg.ceil() - 1e-9);
        }
    }
}

#[test]
fn multiscale_reports_its_losses() {
    let spec = ExperimentSpec {
        dimension: 3,
        kind: BodyKind::AxisBox,
        n_bodies: 20,
        radius_model: RadiusModel::Lacunary { base: 5.0, levels: 3 },
        center_box: 2.0,
        trials: 1,
        seed: 3,
        algorithms: vec![],
        oracle_max_n: 14,
        options: SelectOptions::default(),
    };
    let params = MultiscaleParams::for_dimension(3);
    for trial in 0..20 {
        let c = generate(&spec, trial).unwrap();
        let opts = SelectOptions {
            multiscale: Some(params.clone()),
            ..SelectOptions::default()
        };
        let r = select(&c, Algorithm::Multiscale, &opts).unwrap();
        let names: Vec<&str> = r.guarantee_factors.iter().map(|f| f.name.as_str()).collect();
        assert_eq!(names, ["rounding", "residue_class", "inflation", "congruent"]);
        let product: f64 = r.guarantee_factors.iter().map(|f| f.value).product();
        assert!((product - r.guarantee).abs() <= 1e-15);
        assert!(r.density >= r.guarantee);
    }
}

#[test]
fn pinwheel_pairs_all_meet() {
    for n in [1, 2, 5, 16] {
        let c = pinwheel(n).unwrap();
        assert_eq!(intersection_graph(&c).edges().len(), n * (n - 1) / 2);
        assert_eq!(independence_number(&c).unwrap(), 1);
    }
}

#[test]
fn translate_net_union_inside_doubled_body() {
    for d in 1..=3 {
        // exact grid union cost grows like n^d
        let n = if d == 3 { 60 } else { 300 };
        let c = translate_net(BodyKind::AxisBox, d, n, d as u64).unwrap();
        let u = union_volume_boxes(&c).unwrap().value;
        assert!(u <= 4f64.powi(d as i32) + 1e-9);
        let c = translate_net(BodyKind::Ball, d, 300, d as u64).unwrap();
        let est = union_volume_mc(&c, 0.01, 0.99, 1).unwrap();
        let cap = 2f64.powi(d as i32) * rado_core::bounds::unit_ball_volume(d);
        assert!(est.lower() <= cap);
    }
}

#[test]
fn kl_grid_and_refinement_agree() {
    let r = kl_upper_optimize(1e-9).unwrap();
    assert!((r.grid_min - r.objective_min).abs() < 1e-6);
    assert!(r.base > 1.0 + 2f64.sqrt());
    assert!(r.r_star > 2f64.sqrt());
    // smooth on the open domain
    let h = 1e-5;
    for k in 1..100 {
        let t = std::f64::consts::FRAC_PI_3 + k as f64 * (2.0 * std::f64::consts::PI / 3.0) / 100.0;
        if (t - std::f64::consts::FRAC_PI_2).abs() < 2.0 * h {
            continue;
        }
        let slope = (kl_objective(t + h).unwrap() - kl_objective(t - h).unwrap()) / (2.0 * h);
        assert!(slope.is_finite());
    }
}

#[test]
fn v_alpha_recurrence_range() {
    for d in 3..=10 {
        assert_eq!(v_alpha_bound(d, 1).unwrap(), 2f64.powi(d as i32));
        for a in 3..=12 {
            let lhs = v_alpha_bound(d, a).unwrap();
            let rhs = 2.0 * v_alpha_bound(d, a - 1).unwrap() + 2f64.powi(d as i32);
            assert!((lhs - rhs).abs() <= 1e-12 * lhs);
        }
    }
}
