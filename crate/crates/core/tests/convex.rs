use std::f64::consts::PI;

use proptest::prelude::*;
use symcap::convex::{unit_ball_volume, ConvexBody, VolumeMethod};
use symcap::sampling::{shard_rng, unit_direction};

fn standard_bodies(dim: usize) -> Vec<ConvexBody> {
    let axes: Vec<f64> = (0..dim).map(|i| 1.0 + 0.3 * i as f64).collect();
    let mut v = vec![
        ConvexBody::ball(dim, 1.3).unwrap(),
        ConvexBody::cube(&axes).unwrap(),
        ConvexBody::unit_cube(dim).unwrap(),
        ConvexBody::cross_polytope(dim, 0.7).unwrap(),
        ConvexBody::ellipsoid(&axes).unwrap(),
    ];
    if dim == 2 {
        v.push(
            ConvexBody::polytope(vec![
                vec![1.0, 0.0],
                vec![0.3, 1.2],
                vec![-0.9, 0.4],
                vec![-0.5, -1.0],
                vec![0.8, -0.7],
            ])
            .unwrap(),
        );
    }
    v
}

/// Direct maximum of `⟨u, x⟩` over a vertex list.
fn vertex_support(vs: &[Vec<f64>], u: &[f64]) -> f64 {
    vs.iter().map(|v| v.iter().zip(u).map(|(a, b)| a * b).sum::<f64>()).fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn support_matches_closed_forms() {
    let mut rng = shard_rng(1, 0);
    for _ in 0..200 {
        let u: Vec<f64> = unit_direction(&mut rng, 3).iter().map(|c: &f64| c * 2.5).collect();
        let len = u.iter().map(|c| c * c).sum::<f64>().sqrt();
        let ball = ConvexBody::ball(3, 1.3).unwrap();
        assert!((ball.support(&u).unwrap() - 1.3 * len).abs() < 1e-12);
        let cube = ConvexBody::cube(&[1.0, 2.0, 0.5]).unwrap();
        let l1 = u[0].abs() + 2.0 * u[1].abs() + 0.5 * u[2].abs();
        assert!((cube.support(&u).unwrap() - l1).abs() < 1e-12);
        let e = ConvexBody::ellipsoid(&[1.0, 2.0, 0.5]).unwrap();
        let h = ((u[0]).powi(2) + (2.0 * u[1]).powi(2) + (0.5 * u[2]).powi(2)).sqrt();
        assert!((e.support(&u).unwrap() - h).abs() < 1e-12);
        let cross = ConvexBody::cross_polytope(3, 0.7).unwrap();
        let linf = u.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        assert!((cross.support(&u).unwrap() - 0.7 * linf).abs() < 1e-12);
    }
}

#[test]
fn dual_involution_on_standard_kinds() {
    for dim in [2, 3] {
        for k in standard_bodies(dim) {
            let kk = k.polar_dual().unwrap().polar_dual().unwrap();
            let mut rng = shard_rng(2, dim as u64);
            for _ in 0..200 {
                let u: Vec<f64> = unit_direction(&mut rng, dim);
                let (a, b) = (k.support(&u).unwrap(), kk.support(&u).unwrap());
                assert!((a - b).abs() <= 1e-6, "{k}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn polytope_support_matches_vertex_maximum() {
    let k = &standard_bodies(2)[5];
    let vs = k.vertices().unwrap();
    let mut rng = shard_rng(3, 0);
    for _ in 0..200 {
        let u: Vec<f64> = unit_direction(&mut rng, 2);
        assert!((k.support(&u).unwrap() - vertex_support(&vs, &u)).abs() < 1e-12);
    }
}

#[test]
fn monte_carlo_volume_within_four_sigma() {
    for (k, exact) in [
        (ConvexBody::ball(2, 1.0).unwrap(), PI),
        (ConvexBody::ball(3, 1.0).unwrap(), 4.0 * PI / 3.0),
        (ConvexBody::cube(&[1.0, 0.5]).unwrap(), 2.0),
        (ConvexBody::unit_cube(3).unwrap(), 8.0),
    ] {
        let est = k.volume(VolumeMethod::MonteCarlo { samples: 200_000, seed: 11 }).unwrap();
        assert!((est.value - exact).abs() <= 4.0 * est.std_error.max(1e-12), "{k}: {} ± {}", est.value, est.std_error);
    }
    assert!((unit_ball_volume::<f64>(4) - PI * PI / 2.0).abs() < 1e-12);
    assert!((unit_ball_volume::<f64>(5) - 8.0 * PI * PI / 15.0).abs() < 1e-12);
}

#[test]
fn single_precision_bodies() {
    let k = ConvexBody::<f32>::cube(&[1.0, 2.0]).unwrap();
    assert!((k.support(&[1.0, -1.0]).unwrap() - 3.0).abs() < 1e-6);
    assert!((k.polar_dual().unwrap().support(&[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gauge_is_dual_support(idx in 0usize..6, angle in 0.0..(2.0 * PI), scale in 0.1f64..3.0) {
        let k = &standard_bodies(2)[idx];
        let u = [scale * angle.cos(), scale * angle.sin()];
        let dual = k.polar_dual().unwrap();
        prop_assert!((dual.support(&u).unwrap() - k.gauge(&u).unwrap()).abs() <= 1e-8);
    }

    #[test]
    fn boundary_lies_between_radial_extremes(idx in 0usize..6, angle in 0.0..(2.0 * PI)) {
        let k = &standard_bodies(2)[idx];
        let ext = k.radial_extremes();
        let p = k.boundary_point(&[angle.cos(), angle.sin()]).unwrap();
        let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
        prop_assert!(r >= ext.k_min - 1e-9 && r <= ext.k_max + 1e-9);
        prop_assert!(k.contains(&p).unwrap());
    }
}
