use proptest::prelude::*;
use sepnet_core::construct::{
    cube_covering_radius, patch_bijection, patched_net, radial_rescale_to_window, DensityField,
    Reference,
};
use sepnet_core::displacement::{
    bottleneck_bijection, brute_force_bottleneck, compose_curves, counting_lower_bound,
    displacement_curve,
};
use sepnet_core::growth::{concave_majorant, radius_schedule, GrowthFunction};
use sepnet_core::net::{
    counting_measure_discrepancy, dyadic_boxes, integer_lattice_window, NetWindow, TargetMeasure,
};

fn point_sets(dim: usize, max: usize) -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    (1..=max).prop_flat_map(move |n| {
        let pt = prop::collection::vec(0.0..10.0f64, dim);
        (
            prop::collection::vec(pt.clone(), n),
            prop::collection::vec(pt, n..=n + 2),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bottleneck_ignores_input_order((s, t) in point_sets(2, 7), rot in 0usize..7) {
        let base = bottleneck_bijection(&s, &t, 100.0).unwrap().bottleneck;
        let mut s2 = s.clone();
        s2.rotate_left(rot % s.len());
        let mut t2 = t.clone();
        t2.reverse();
        prop_assert_eq!(bottleneck_bijection(&s2, &t2, 100.0).unwrap().bottleneck, base);
    }

    #[test]
    fn bottleneck_is_isometry_invariant((s, t) in point_sets(2, 6), dx in -5.0..5.0f64) {
        let base = brute_force_bottleneck(&s, &t).unwrap();
        // coordinate swap plus an exactly representable shift keeps distances bit-identical
        let move_pt = |p: &Vec<f64>| vec![p[1] + dx.round(), p[0]];
        let s2: Vec<_> = s.iter().map(move_pt).collect();
        let t2: Vec<_> = t.iter().map(move_pt).collect();
        let m = bottleneck_bijection(&s2, &t2, 100.0).unwrap();
        prop_assert!((m.bottleneck - base).abs() <= 1e-12);
        prop_assert_eq!(m.bottleneck, m.recomputed_bottleneck());
    }

    #[test]
    fn matching_curve_matches_pairs((s, t) in point_sets(1, 7)) {
        let m = bottleneck_bijection(&s, &t, 100.0).unwrap();
        let f = m.to_map(f64::INFINITY).unwrap();
        let top = s.iter().map(|p| p[0].abs()).fold(0.0, f64::max);
        let c = displacement_curve(&f, &[top]).unwrap();
        prop_assert_eq!(c.samples[0].1, m.bottleneck);
    }

    #[test]
    fn inverse_round_trips(a in 0.1..5.0f64, beta in 0.1..1.0f64, alpha in 0.0..2.0f64, r in 1.0..1e5f64) {
        let phi = GrowthFunction::power_log(a, beta, alpha, 0.0).unwrap();
        let y = phi.evaluate(r).unwrap();
        let back = phi.inverse(y).unwrap();
        prop_assert!((phi.evaluate(back).unwrap() - y).abs() <= 1e-9 * y.max(1.0));
    }

    #[test]
    fn doubling_at_most_two_without_log(a in 0.1..5.0f64, beta in 0.0..=1.0f64) {
        let phi = GrowthFunction::power_log(a, beta, 0.0, 0.0).unwrap();
        prop_assert!(phi.doubling_constant(1.0, 1e4).unwrap() <= 2.0 + 1e-12);
    }

    #[test]
    fn majorant_dominates_samples(ys in prop::collection::vec(0.1..50.0f64, 2..30)) {
        let samples: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, &y)| ((i + 1) as f64, y)).collect();
        let m = concave_majorant(&samples).unwrap();
        for &(x, y) in &samples {
            prop_assert!(m.evaluate(x).unwrap() >= y - 1e-9);
        }
        let top = samples.last().unwrap().0;
        prop_assert!(m.check_concave_increasing(1.0, top).unwrap().ok);
    }

    #[test]
    fn counting_bound_never_beats_bottleneck(shift in 0.0..0.5f64, scale in 0.5..1.0f64, r in 3.0..8.0f64) {
        let z = integer_lattice_window(2, 20.0, 1.0, &[0.0, 0.0]).unwrap();
        let y = integer_lattice_window(2, 10.0, scale, &[shift, 0.0]).unwrap();
        let b = counting_lower_bound(&y, &z, r).unwrap();
        let sources = y.points_within(r);
        let targets = z.points_within(20.0);
        let m = bottleneck_bijection(&sources, &targets, 40.0).unwrap();
        prop_assert!(b.value <= m.bottleneck);
    }
}

#[test]
fn lattice_discrepancy_shrinks_with_radius() {
    let w = integer_lattice_window(2, 800.0, 1.0, &[0.0, 0.0]).unwrap();
    let boxes = dyadic_boxes(2, 3);
    let disc = |r: f64| counting_measure_discrepancy(&w, r, &boxes, &TargetMeasure::Lebesgue).unwrap();
    let d: Vec<f64> = [25.0, 50.0, 100.0, 200.0].iter().map(|&r| disc(r)).collect();
    assert!(d.windows(2).all(|p| p[1] < p[0]), "{d:?}");
    // single doublings can tick up (200 → 400), three of them always pay off here
    for r in [50.0, 100.0] {
        assert!(disc(8.0 * r) < disc(r) / 2.0, "R = {r}");
    }
}

#[test]
fn rescale_counts_match_for_random_phi() {
    let x = integer_lattice_window(2, 150.0, 1.0, &[0.0, 0.0]).unwrap();
    for (a, beta) in [(1.0, 0.5), (0.5, 0.7), (2.0, 0.3)] {
        let phi = GrowthFunction::power(a, beta).unwrap();
        let sched = radius_schedule(&phi, 4.0, 1.0, 4).unwrap();
        let out = radial_rescale_to_window(&x, Reference::Same, &phi, &sched).unwrap();
        assert!(out.profile.slopes.iter().all(|&c| c <= 1.0));
        for &r in x.sorted_norms().iter().step_by(211) {
            assert_eq!(out.y.ball_count(out.profile.gamma(r)).unwrap(), x.ball_count(r).unwrap());
        }
    }
}

#[test]
fn composed_patch_maps_stay_under_bound() {
    let rho = DensityField::checkerboard(2, 4, 0.5, 1.5).unwrap();
    let psi_a = GrowthFunction::power(20.0, 1.0).unwrap();
    let psi_b = GrowthFunction::power(30.0, 1.0).unwrap();
    let (xa, la) = patched_net(&rho, &[2, 3, 4], &psi_a, 3).unwrap();
    let (xb, lb) = patched_net(&rho, &[2, 3, 4], &psi_b, 3).unwrap();
    let f = patch_bijection(&xa, &la).unwrap();
    let g = patch_bijection(&xb, &lb).unwrap().inverse(lb.window_radius);
    let reach = la.window_radius.min(lb.window_radius) - 10.0;
    let h = f.then(&g, reach).unwrap();
    let radii: Vec<f64> = (1..=(reach as usize / 2)).map(|i| 2.0 * i as f64).collect();
    let fc = displacement_curve(&f, &radii).unwrap();
    let gc = displacement_curve(&g, &radii).unwrap();
    let hc = displacement_curve(&h, &radii[..radii.len() - 5]).unwrap();
    let bound = compose_curves(&fc, &gc).unwrap();
    for &(r, v) in &hc.samples {
        assert!(v <= bound.value_at_or_above(r).unwrap() + 1e-12, "R = {r}");
    }
}

#[test]
fn patched_net_constants_do_not_grow_with_k() {
    let psi = GrowthFunction::power(5.0, 1.0).unwrap();
    let sides: Vec<u64> = (2..=9).collect();
    let mut seps = Vec::new();
    let mut covers = Vec::new();
    for k_max in 3..=8 {
        let (net, layout) = patched_net(&DensityField::uniform(2), &sides, &psi, k_max).unwrap();
        let pts: Vec<Vec<f64>> = net.points().map(<[f64]>::to_vec).collect();
        seps.push(sepnet_core::construct::point_set_separation(2, &pts));
        let cover = layout
            .r
            .iter()
            .map(|r| {
                let near: Vec<Vec<f64>> = pts
                    .iter()
                    .filter(|p| {
                        p.iter().enumerate().all(|(a, &c)| c >= r.corner[a] - 2.0 && c <= r.hi(a) + 2.0)
                    })
                    .cloned()
                    .collect();
                cube_covering_radius(&near, r, 0.25).unwrap()
            })
            .fold(0.0, f64::max);
        covers.push(cover);
    }
    assert!(seps.iter().all(|&s| s > 0.4), "{seps:?}");
    assert!(covers.iter().all(|&c| c <= 1.5), "{covers:?}");
}

#[test]
fn window_json_is_stable() {
    let w = NetWindow::new(2, 3.0, "tiny", vec![vec![0.0, 1.0], vec![-1.0, 0.5]]).unwrap();
    let text = w.to_json().unwrap();
    assert_eq!(NetWindow::from_json(&text).unwrap().to_json().unwrap(), text);
}
