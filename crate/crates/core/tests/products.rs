use proptest::prelude::*;
use symcap::products::{balance_stretch, LagrangianProductDomain, StandardId};
use symcap::sampling::shard_rng;
use symcap::symplectic::verify_map;

#[test]
fn standard_domains_parse_and_display() {
    for (name, n, params) in [
        ("disk_disk", Some(3), vec![]),
        ("annulus_disk", Some(2), vec![0.5]),
        ("a_r_diamond", None, vec![2.0]),
        ("rect_diamond", None, vec![1.0, 2.0]),
    ] {
        let id = StandardId::<f64>::parse(name, n, &params).unwrap();
        assert!(id.to_string().starts_with(name));
        LagrangianProductDomain::standard(id).unwrap();
    }
    assert!(StandardId::<f64>::parse("annulus_disk", None, &[]).is_err());
}

#[test]
fn a_r_position_vertices() {
    let d = LagrangianProductDomain::<f64>::from_id("a_r_diamond", None, &[2.0]).unwrap();
    let hull = d.position().hull();
    for v in [[0.0, 1.0], [2.0, 1.0], [2.0, -1.0], [0.0, -1.0], [-2.0, 0.0]] {
        assert!(hull.contains(&v).unwrap());
        assert!(!hull.contains(&[v[0] * 1.01, v[1] * 1.01]).unwrap());
    }
}

#[test]
fn balance_stretch_is_symplectic() {
    let m = balance_stretch::<f64>(2, 2.0, 0.5).unwrap();
    let rep = verify_map(&m, &|rng: &mut _| symcap::sampling::in_ball(rng, 4, 1.0), 2000, 1e-9, 0).unwrap();
    assert!(rep.max_symplectic_defect <= 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn samples_lie_in_the_domain(seed in 0u64..1000, id in 0usize..4) {
        let d = match id {
            0 => LagrangianProductDomain::<f64>::from_id("disk_disk", Some(2), &[]),
            1 => LagrangianProductDomain::from_id("annulus_disk", Some(2), &[0.4]),
            2 => LagrangianProductDomain::from_id("punctured_cube_diamond", Some(3), &[]),
            _ => LagrangianProductDomain::from_id("a_r_diamond", None, &[1.5]),
        }
        .unwrap();
        let mut rng = shard_rng(seed, 0);
        for _ in 0..50 {
            let z = d.sample(&mut rng);
            prop_assert!(d.contains_point(&z).unwrap());
        }
    }

    #[test]
    fn scaling_commutes_with_membership(mu in 0.2f64..3.0, seed in 0u64..1000) {
        let d = LagrangianProductDomain::<f64>::from_id("annulus_disk", Some(2), &[0.3]).unwrap();
        let big = d.scaled(mu).unwrap();
        let mut rng = shard_rng(seed, 1);
        let z = d.sample(&mut rng);
        let mz: Vec<f64> = z.iter().map(|c| c * mu).collect();
        prop_assert!(big.contains_point(&mz).unwrap());
    }
}
