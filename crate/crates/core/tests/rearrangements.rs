use std::f64::consts::PI;

use proptest::prelude::*;
use symcap::rearrangements::{phi_lambda_check, verify_sigma, RectToDisk, SigmaMap};
use symcap::sampling::{shard_rng, uniform};

fn shoelace(pts: &[[f64; 2]]) -> f64 {
    let k = pts.len();
    (0..k).map(|i| pts[i][0] * pts[(i + 1) % k][1] - pts[(i + 1) % k][0] * pts[i][1]).sum::<f64>().abs() / 2.0
}

/// Half-width and half-height of the level-`a` rectangle, from the defining
/// formulas.
fn rectangle(n: usize, eps: f64, a: f64) -> (f64, f64) {
    let w = eps / (2.0 * n as f64);
    let x = 1.0 - w + w * a / 8.0;
    (x, a / (4.0 * x))
}

#[test]
fn sigma_verification_passes() {
    for (n, eps, lambda) in [(1, 0.05, 0.9), (2, 0.2, 0.8)] {
        let map = SigmaMap::new(n, eps).unwrap();
        let rep = verify_sigma(&map, lambda, 20_000, 1e-6, 4).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.max_cell_area_rel_error <= 1e-3);
        assert_eq!(rep.item3_covered, rep.item3_grid_points);
    }
}

#[test]
fn phi_lambda_preimages() {
    let (n, lambda, eps) = (2, 0.9, 0.05);
    let mut rng = shard_rng(9, 0);
    for i in 0..1000 {
        let fiber = i % 4 == 0;
        let x: Vec<f64> = (0..n).map(|_| if fiber { 0.0 } else { uniform(&mut rng, -lambda, lambda) }).collect();
        // rejection sample λ◇ⁿ
        let y = loop {
            let y: Vec<f64> = (0..n).map(|_| uniform(&mut rng, -lambda, lambda)).collect();
            if y.iter().map(|c| c.abs()).sum::<f64>() < lambda {
                break y;
            }
        };
        let pt: Vec<f64> = x.iter().chain(&y).copied().collect();
        let rep = phi_lambda_check(n, lambda, eps, &pt).unwrap();
        let area: f64 = PI * rep.preimage.iter().map(|c| c * c).sum::<f64>();
        assert!(area < 4.0 && rep.in_ball, "{pt:?}");
        if fiber {
            assert!(rep.in_lagrangian);
        }
    }
}

#[test]
fn rect_to_disk_preserves_area() {
    let m = RectToDisk::<f64>::new(0.5, 0.0, 0.5, 1.0, 0.01).unwrap();
    let h = 1e-6;
    let mut rng = shard_rng(10, 0);
    for _ in 0..500 {
        let (x, y) = (uniform(&mut rng, 0.01, 0.99), uniform(&mut rng, -0.99, 0.99));
        let dx = [m.apply(x + h, y), m.apply(x - h, y)];
        let dy = [m.apply(x, y + h), m.apply(x, y - h)];
        let j = [
            [(dx[0][0] - dx[1][0]) / (2.0 * h), (dy[0][0] - dy[1][0]) / (2.0 * h)],
            [(dx[0][1] - dx[1][1]) / (2.0 * h), (dy[0][1] - dy[1][1]) / (2.0 * h)],
        ];
        assert!(((j[0][0] * j[1][1] - j[0][1] * j[1][0]).abs() - 1.0).abs() < 1e-6);
        let p = m.apply(x, y);
        assert!(PI * (p[0] * p[0] + p[1] * p[1]) < 4.0 * 0.5 * 1.0 + 0.01);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn level_curves_enclose_their_area(a in 1e-3f64..4.0, n in 1usize..4, eps in 0.01f64..0.5) {
        let map = SigmaMap::new(n, eps).unwrap();
        let (hx, hy) = rectangle(n, eps, a);
        prop_assert!((shoelace(&map.curve(a)) - a).abs() <= 1e-12);
        prop_assert!((map.half_width(a) - hx).abs() <= 1e-14 && (map.half_height(a) - hy).abs() <= 1e-14);
    }

    #[test]
    fn circles_land_on_rectangles(a in 1e-2f64..3.99, t in 0.0..(2.0 * PI), n in 1usize..4, eps in 0.01f64..0.5) {
        let map = SigmaMap::new(n, eps).unwrap();
        let r = (a / PI).sqrt();
        let z = [r * t.cos(), r * t.sin()];
        let p = map.apply(z).unwrap();
        let (hx, hy) = rectangle(n, eps, a);
        prop_assert!(((p[0].abs() / hx).max(p[1].abs() / hy) - 1.0).abs() <= 1e-9);
        let back = map.inverse(p).unwrap();
        prop_assert!((back[0] - z[0]).abs().max((back[1] - z[1]).abs()) <= 1e-9);
    }
}
