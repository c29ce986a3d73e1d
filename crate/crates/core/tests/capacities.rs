use std::f64::consts::PI;

use proptest::prelude::*;
use symcap::capacities::{
    barrier_test, biran_pinched_bounds, f_delta, lower_bound_holed, registry_lookup, CapacityOptions,
};
use symcap::convex::{ConvexBody, VolumeMethod};
use symcap::sampling::{shard_rng, uniform};
use symcap::{capacity_of_with, DomainF64, Error};

fn fast() -> CapacityOptions<f64> {
    CapacityOptions { samples: 500, k_max: 0, ..CapacityOptions::default() }
}

type Gauge = fn(&[f64]) -> f64;

/// Gauge of the ball, cube and ellipsoid (1, 1.3), written out directly.
fn gauges() -> Vec<(ConvexBody, Gauge)> {
    vec![
        (ConvexBody::ball(2, 1.0).unwrap(), |p| p[0].hypot(p[1])),
        (ConvexBody::unit_cube(2).unwrap(), |p| p[0].abs().max(p[1].abs())),
        (ConvexBody::ellipsoid(&[1.0, 1.3]).unwrap(), |p| p[0].hypot(p[1] / 1.3)),
    ]
}

#[test]
fn shifted_half_body_stays_in_the_hole_complement() {
    for (k, gauge) in gauges() {
        for delta in [0.0, 0.25, 0.5] {
            let half = (1.0 - delta) / 2.0;
            let mut rng = shard_rng(5, (delta * 100.0) as u64);
            let mut failures = 0;
            let mut drawn = 0;
            while drawn < 10_000 {
                let z = [uniform(&mut rng, -1.3, 1.3) * half, uniform(&mut rng, -1.3, 1.3) * half];
                if gauge(&z) > half {
                    continue;
                }
                drawn += 1;
                let g = gauge(&f_delta(&k, delta, &z).unwrap());
                if !(g <= 1.0 + 1e-12 && g >= delta - 1e-12 && g > 0.0) {
                    failures += 1;
                }
            }
            assert_eq!(failures, 0, "{k} δ = {delta}");
            let cert = lower_bound_holed(&k, delta, 10_000, 0).unwrap().unwrap();
            assert!((cert.lower.unwrap() - 4.0 * half).abs() < 1e-12);
        }
    }
}

#[test]
fn annulus_and_punctured_cube_intervals() {
    let opts = CapacityOptions { k_max: 6, ..CapacityOptions::default() };
    for delta in [0.0, 0.5, 0.8] {
        let iv = capacity_of_with(&DomainF64::from_id("annulus_disk", Some(2), &[delta]).unwrap(), &opts).unwrap();
        let want = 2.0 * (1.0 - delta);
        assert!(iv.lower <= want && want <= iv.upper && iv.width() <= 2e-3, "{delta}: {iv:?}");
        assert!((iv.a_min.unwrap() - want).abs() <= 1e-4);
    }
    let iv = capacity_of_with(&DomainF64::from_id("punctured_cube_diamond", Some(2), &[]).unwrap(), &opts).unwrap();
    assert!(iv.lower == 2.0 && iv.upper <= 2.0 + 2e-3);
    assert!((iv.a_min.unwrap() - 2.0).abs() <= 1e-4);
}

#[test]
fn disk_square_is_exact() {
    let iv = capacity_of_with(&DomainF64::from_id("disk_square", None, &[]).unwrap(), &fast()).unwrap();
    assert_eq!((iv.lower, iv.upper), (4.0, 4.0));
}

#[test]
fn barrier_examples() {
    let ball = barrier_test(&ConvexBody::ball(2, 1.0).unwrap(), VolumeMethod::Exact).unwrap();
    assert!(ball.barrier_certified && ball.left == 2.0 && (ball.mid - PI).abs() < 1e-12 && ball.right == 4.0);
    let e = ConvexBody::ellipsoid(&[1.0, 1.1]).unwrap();
    let rep = barrier_test(&e, VolumeMethod::MonteCarlo { samples: 100_000, seed: 3 }).unwrap();
    assert!(rep.barrier_certified, "{rep:?}");
    // Vol(E)Vol(E°) = π² for every ellipse
    assert!((rep.mid - PI).abs() <= 4.0 * rep.mid_std_error);
    let wide = ConvexBody::ellipsoid(&[1.0, 1.3]).unwrap();
    assert!(matches!(barrier_test(&wide, VolumeMethod::Exact), Err(Error::Precondition(_))));
}

#[test]
fn pinched_holed_ball_bounds() {
    let c = PI * 1.1;
    let b = biran_pinched_bounds(1.0, 1.2, c).unwrap();
    assert_eq!((b.interval.lower, b.interval.upper), (c / 4.0, c));
    assert!(b.strict_upper);
    assert!(matches!(biran_pinched_bounds(1.0, 1.5, c), Err(Error::Precondition(_))));
}

#[test]
fn registry_values() {
    assert_eq!(registry_lookup::<f64>("ball(2.5)").unwrap().value, 2.5);
    assert_eq!(registry_lookup::<f64>("disk_disk(3)").unwrap().value, 4.0);
    assert!(matches!(registry_lookup::<f64>("torus(1)"), Err(Error::NotFound(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn conformality(mu in 0.2f64..4.0, id in 0usize..3, delta in 0.0f64..0.9) {
        let dom = match id {
            0 => DomainF64::from_id("disk_disk", Some(2), &[]).unwrap(),
            1 => DomainF64::from_id("cube_diamond", Some(3), &[]).unwrap(),
            _ => DomainF64::from_id("annulus_disk", Some(2), &[delta]).unwrap(),
        };
        let base = capacity_of_with(&dom, &fast()).unwrap();
        let scaled = capacity_of_with(&dom.scaled(mu).unwrap(), &fast()).unwrap();
        let m2 = mu * mu;
        prop_assert!((scaled.lower - m2 * base.lower).abs() <= 1e-9 * m2.max(1.0));
        prop_assert!((scaled.upper - m2 * base.upper).abs() <= 1e-9 * m2.max(1.0));
    }

    #[test]
    fn larger_holes_never_raise_the_bounds(d1 in 0.0f64..0.9, d2 in 0.0f64..0.9) {
        let (small, big) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let a = capacity_of_with(&DomainF64::from_id("annulus_disk", Some(2), &[small]).unwrap(), &fast()).unwrap();
        let b = capacity_of_with(&DomainF64::from_id("annulus_disk", Some(2), &[big]).unwrap(), &fast()).unwrap();
        // monotonicity: c(big hole) ≤ c(small hole) ≤ c(no hole)
        prop_assert!(b.lower <= a.upper);
        prop_assert!(a.lower <= 4.0);
    }
}
