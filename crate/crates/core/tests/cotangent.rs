use std::f64::consts::PI;

use proptest::prelude::*;
use symcap::cotangent::{camel_map_g, g_of_a, lower_map_h, verify_camel, CamelPiece, CylinderBundle};
use symcap::sampling::shard_rng;
use symcap::symplectic::verify_map;

/// `ω_target(Jv, Jw) − ω_source(v, w)` over basis pairs for
/// `f = (s + p_θ, −θ/(s + p_θ), z, p_z)`, by central differences.
fn f_pullback_defect(s: f64, q: [f64; 4]) -> f64 {
    let f = |q: [f64; 4]| {
        let rho = s + q[3];
        [rho, -q[1] / rho, q[0], q[2]]
    };
    let h = 1e-6;
    let mut jac = [[0.0; 4]; 4];
    for k in 0..4 {
        let (mut a, mut b) = (q, q);
        a[k] += h;
        b[k] -= h;
        let (fa, fb) = (f(a), f(b));
        for i in 0..4 {
            jac[i][k] = (fa[i] - fb[i]) / (2.0 * h);
        }
    }
    let rho = f(q)[0];
    // target −ρ dρ∧dφ + dy∧dx on (ρ, φ, x, y); source dp_z∧dz + dp_θ∧dθ
    let target = |u: [f64; 4], v: [f64; 4]| -rho * (u[0] * v[1] - u[1] * v[0]) + (u[3] * v[2] - u[2] * v[3]);
    let source = |u: [f64; 4], v: [f64; 4]| (u[2] * v[0] - u[0] * v[2]) + (u[3] * v[1] - u[1] * v[3]);
    let mut worst: f64 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            let ja = [jac[0][a], jac[1][a], jac[2][a], jac[3][a]];
            let jb = [jac[0][b], jac[1][b], jac[2][b], jac[3][b]];
            let (mut ea, mut eb) = ([0.0; 4], [0.0; 4]);
            ea[a] = 1.0;
            eb[b] = 1.0;
            worst = worst.max((target(ja, jb) - source(ea, eb)).abs());
        }
    }
    worst
}

#[test]
fn cylinder_f_is_symplectic() {
    for r in [1.0, PI, 5.0] {
        let b = CylinderBundle::new(r, None).unwrap();
        let rep = verify_map(&b.f_spec(), &|rng: &mut _| b.sample(rng), 10_000, 1e-6, 0).unwrap();
        assert!(rep.max_symplectic_defect <= 1e-6 && rep.skipped == 0, "R = {r}: {rep:?}");
        let mut rng = shard_rng(12, 0);
        for _ in 0..200 {
            let q = b.sample(&mut rng);
            assert!(f_pullback_defect(b.s(), [q[0], q[1], q[2], q[3]]) < 1e-6);
        }
    }
}

#[test]
fn lower_map_membership() {
    for (a, eps) in [(1.0, 0.1), (5.0, 0.1)] {
        let b = CylinderBundle::new(PI, Some(a)).unwrap();
        let cert = b.lower_certificate(eps, 10_000, 0).unwrap();
        assert_eq!(cert.failures, 0);
        assert!(cert.lower.unwrap() >= g_of_a(a).unwrap() - 2.0 * eps);
    }
    let p = lower_map_h(1.0, 0.1, &[0.5, 1.0, 0.3, -0.2]).unwrap();
    assert_eq!(p, vec![0.5, 1.0, 0.3, -0.2]);
}

#[test]
fn squeeze_pins_g() {
    for a in [1.0, PI, 5.0] {
        let b = CylinderBundle::new(PI, Some(a)).unwrap();
        let (cert, _) = b.upper_certificate(1e-3, 10_000, 1e-6, 0).unwrap();
        assert!(cert.upper.unwrap() <= g_of_a(a).unwrap() + 1e-3, "a = {a}");
    }
    // the angular factor has area 4√(πR), not 4R
    let b = CylinderBundle::new(5.0, None).unwrap();
    let (cert, _) = b.upper_certificate(1e-3, 2000, 1e-6, 0).unwrap();
    assert!((cert.upper.unwrap() - 4.0 * (5.0 * PI).sqrt()).abs() < 1e-12);
}

#[test]
fn camel_checks() {
    for a in [0.5, 2.0] {
        let rep = verify_camel(a, 10_000, 1000, 1e-6, 0).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.piecewise.overall.seam_max_gap <= 1e-9);
        assert_eq!(rep.separation_failures, 0);
        assert!(rep.fourth_positive > 0 && rep.fourth_negative > 0);
        assert!((rep.hole_constant - 4.0 * PI).abs() < 1e-15);
    }
}

proptest! {
    #[test]
    fn cap_images_are_separated(a in 0.1f64..5.0, r in 1.0f64..3.0, t in -PI..PI, pr in -0.7f64..0.7, pt in -0.7f64..0.7) {
        prop_assume!(pr * pr + pt * pt / (r * r) < 1.0);
        let up = camel_map_g(a, &[r, t, a, pr, pt, 0.0], CamelPiece::Upper).unwrap();
        let down = camel_map_g(a, &[r, t, -a, pr, pt, 0.0], CamelPiece::Lower).unwrap();
        prop_assert!(up[2] >= a && down[2] <= -a);
    }
}
