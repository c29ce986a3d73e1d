use crate::convex::{boundary_tol, BodyKind, ConvexBody};
use crate::error::{invalid, precondition, rejected, Result};
use crate::linalg::unit;
use crate::sampling::sharded;
use crate::scalar::Real;

use super::{Certificate, CertificateKind};

fn check_args<T: Real>(k: &ConvexBody<T>, delta: T) -> Result<()> {
    if !k.is_centrally_symmetric() {
        return Err(precondition("the body must be centrally symmetric"));
    }
    if !(delta >= T::zero() && delta < T::one()) {
        return Err(invalid(format!("delta must lie in [0, 1), got {delta}")));
    }
    Ok(())
}

/// `((1+δ)/2)·ρ_K(e₁)·e₁ + z` for `z ∈ ((1−δ)/2)·K`, a point of `K∖δK`.
///
/// `ρ_K(e₁)e₁` is the boundary point of `K` on the positive first axis; it
/// equals `h_K(e₁)e₁` whenever that point lies on `∂K`.
pub fn f_delta<T: Real>(k: &ConvexBody<T>, delta: T, z: &[T]) -> Result<Vec<T>> {
    check_args(k, delta)?;
    if z.len() != k.dim() {
        return Err(invalid(format!("expected a point of length {}, got {}", k.dim(), z.len())));
    }
    let half = (T::one() - delta) / T::lit(2.0);
    let tol = boundary_tol::<T>();
    if k.gauge(z)? > half * (T::one() + tol) + tol {
        return Err(precondition("z lies outside ((1−δ)/2)·K"));
    }
    Ok(f_delta_unchecked(k.radial(&unit(k.dim(), 0))?, delta, z))
}

fn f_delta_unchecked<T: Real>(rho: T, delta: T, z: &[T]) -> Vec<T> {
    let mut out = z.to_vec();
    out[0] = out[0] + (T::one() + delta) / T::lit(2.0) * rho;
    out
}

/// `c(K ×_L K°)` when it follows from the registry, with the entries used.
pub fn dual_product_value<T: Real>(k: &ConvexBody<T>) -> Option<(T, Vec<String>)> {
    let n = k.dim();
    let four = T::lit(4.0);
    match k.kind() {
        BodyKind::Ball { .. } => Some((four, vec![format!("disk_disk({n})"), "linear stretch".into()])),
        BodyKind::Ellipsoid { .. } => Some((four, vec![format!("disk_disk({n})"), "linear symplectic image".into()])),
        BodyKind::Cube { .. } => Some((four, vec![format!("cube_diamond({n})"), "linear stretch".into()])),
        BodyKind::CrossPolytope { .. } => {
            Some((four, vec![format!("cube_diamond({n})"), "factor exchange (x, y) ↦ (y, −x)".into()]))
        }
        BodyKind::Polytope(_) | BodyKind::SupportSampled(_) => None,
    }
}

/// Lower bound `((1−δ)/2)·c(K ×_L K°)` on `c((K∖δK) ×_L K°)`, certified by
/// checking that `f_delta` lands in `K∖δK` on `samples` points.
///
/// Returns `Ok(None)` when `c(K ×_L K°)` is not available.
pub fn lower_bound_holed<T: Real>(
    k: &ConvexBody<T>,
    delta: T,
    samples: usize,
    seed: u64,
) -> Result<Option<Certificate<T>>> {
    check_args(k, delta)?;
    let Some((base, axioms)) = dual_product_value(k) else { return Ok(None) };
    if samples == 0 {
        return Err(invalid("need at least one sample"));
    }
    let half = (T::one() - delta) / T::lit(2.0);
    let rho = k.radial(&unit(k.dim(), 0))?;
    let tol = boundary_tol::<T>();
    let failures: usize = sharded(samples, seed, |rng, count| {
        (0..count)
            .filter(|_| {
                let z: Vec<T> = k.sample_interior(rng).into_iter().map(|c| c * half).collect();
                let p = f_delta_unchecked(rho, delta, &z);
                let g = k.gauge(&p).unwrap_or(T::nan());
                let inside = g <= T::one() + tol && g >= delta - tol && g > T::zero();
                !inside
            })
            .count()
    })
    .into_iter()
    .sum();
    if failures > 0 {
        return Err(rejected(format!("f_delta left K∖δK on {failures} of {samples} samples")));
    }
    let mut cert = Certificate::new(CertificateKind::HoledLower, "shifted half-body embedding")
        .with_lower(half * base)
        .with_verification(samples, 0, None);
    for a in axioms {
        cert = cert.with_axiom(a);
    }
    Ok(Some(cert.with_axiom("conformality")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let d = ConvexBody::<f64>::ball(3, 1.0).unwrap();
        assert_eq!(f_delta(&d, 0.0, &[0.0; 3]).unwrap(), vec![0.5, 0.0, 0.0]);
        let sq = ConvexBody::<f64>::unit_cube(2).unwrap();
        let p = f_delta(&sq, 0.5, &[0.2, 0.1]).unwrap();
        assert!((p[0] - 0.95).abs() < 1e-15 && p[1] == 0.1);
        assert!(sq.contains(&p).unwrap() && sq.gauge(&p).unwrap() >= 0.5);
        let delta = 0.3;
        let q = f_delta(&d, delta, &[-(1.0 - delta) / 2.0, 0.0, 0.0]).unwrap();
        assert!((q[0] - delta).abs() < 1e-15);
    }

    #[test]
    fn outside_scaled_body_is_rejected() {
        let d = ConvexBody::<f64>::ball(2, 1.0).unwrap();
        assert!(matches!(f_delta(&d, 0.5, &[0.3, 0.0]), Err(crate::Error::Precondition(_))));
    }

    #[test]
    fn lower_bounds() {
        let d = ConvexBody::<f64>::ball(2, 1.0).unwrap();
        assert_eq!(lower_bound_holed(&d, 0.0, 1000, 0).unwrap().unwrap().lower, Some(2.0));
        let l = lower_bound_holed(&d, 0.3, 1000, 0).unwrap().unwrap().lower.unwrap();
        assert!((l - 1.4).abs() < 1e-12);
        let c = ConvexBody::<f64>::unit_cube(3).unwrap();
        assert_eq!(lower_bound_holed(&c, 0.0, 1000, 0).unwrap().unwrap().lower, Some(2.0));
        let tri = ConvexBody::<f64>::polytope(vec![vec![1.0, 0.0], vec![-1.0, 1.0], vec![-1.0, -1.0]]).unwrap();
        assert!(lower_bound_holed(&tri, 0.0, 10, 0).is_err());
    }
}
