use crate::convex::ConvexBody;
use crate::error::{invalid, precondition, rejected, Result};
use crate::linalg::Matrix;
use crate::products::LagrangianProductDomain;
use crate::rearrangements::{phi_lambda_check, RectToDisk};
use crate::sampling::{sharded, uniform};
use crate::scalar::Real;
use crate::symplectic::{verify_map, Chart, SymplecticMapSpec, R_MIN};

use super::{Certificate, CertificateKind};

/// Squeeze of `(Dⁿ∖δDⁿ) ×_L Dⁿ` into `ℝ² × B²(2(1−δ)+ε) × ℝ^{2n−4}`.
///
/// In polar coordinates `(r, θ, p_r, p_θ)` on the first position plane the
/// map sends `(θ, p_θ)` to the point of polar radius `√(2(1+p_θ))` and angle
/// `−θ`, and squeezes the strip `δ ≤ r ≤ 1, |p_r| ≤ 1` into a disk with
/// [`RectToDisk`]. Output is in the paired chart `(u, v, X, Y, x₃, y₃, ..)`.
pub fn annulus_squeeze_map<T: Real>(n: usize, delta: T, eps: T) -> Result<SymplecticMapSpec<T>> {
    if n < 2 {
        return Err(invalid("the annulus squeeze needs n ≥ 2"));
    }
    if !(delta >= T::zero() && delta < T::one()) {
        return Err(invalid(format!("delta must lie in [0, 1), got {delta}")));
    }
    let two = T::lit(2.0);
    let strip = RectToDisk::new((T::one() + delta) / two, T::zero(), (T::one() - delta) / two, T::one(), eps)?;
    let cap = strip.target_area();
    let source = Chart::cartesian(n).with_domain("annulus_polar", |q: &[T]| q[0].hypot(q[1]) > T::lit(R_MIN));
    Ok(SymplecticMapSpec::new("annulus_squeeze", source, Chart::paired(n), move |q: &[T]| {
        let (x, y) = q.split_at(n);
        let r = x[0].hypot(x[1]);
        let theta = x[1].atan2(x[0]);
        let p_r = (x[0] * y[0] + x[1] * y[1]) / r;
        let p_theta = x[0] * y[1] - x[1] * y[0];
        let rho = (two * (T::one() + p_theta)).max(T::zero()).sqrt();
        let [big_x, big_y] = strip.apply(r, p_r);
        let mut out = vec![rho * theta.cos(), -rho * theta.sin(), big_x, big_y];
        for i in 2..n {
            out.push(x[i]);
            out.push(y[i]);
        }
        out
    })
    .with_containment(move |p: &[T]| T::PI() * (p[2] * p[2] + p[3] * p[3]) < cap))
}

/// `(x, y) ↦ (xᵢ, yᵢ, remaining pairs in order)` into the paired chart,
/// contained when `|xᵢ| ≤ a` and `|yᵢ| ≤ b`.
pub fn factor_swap_map<T: Real>(n: usize, i: usize, a: T, b: T) -> Result<SymplecticMapSpec<T>> {
    if i >= n {
        return Err(invalid(format!("factor index {i} out of range for n = {n}")));
    }
    let order: Vec<usize> = std::iter::once(i).chain((0..n).filter(|&j| j != i)).collect();
    let mut jac = Matrix::zeros(2 * n, 2 * n);
    for (slot, &j) in order.iter().enumerate() {
        jac[(2 * slot, j)] = T::one();
        jac[(2 * slot + 1, n + j)] = T::one();
    }
    let tol = T::lit(1e-12);
    let eval_order = order.clone();
    Ok(SymplecticMapSpec::new("factor_swap", Chart::cartesian(n), Chart::paired(n), move |q: &[T]| {
        eval_order.iter().flat_map(|&j| [q[j], q[n + j]]).collect()
    })
    .with_jacobian(move |_| jac.clone())
    .with_containment(move |p: &[T]| p[0].abs() <= a + tol && p[1].abs() <= b + tol))
}

/// Upper bound `target_capacity` from an embedding of `dom` into a cylinder
/// over a 2D region of that capacity, verified on `samples` points.
pub fn upper_bound_nonsqueezing<T: Real>(
    dom: &LagrangianProductDomain<T>,
    map: &SymplecticMapSpec<T>,
    target_capacity: T,
    samples: usize,
    tol: T,
    seed: u64,
) -> Result<Certificate<T>> {
    if map.source().dim() != 2 * dom.dim() {
        return Err(invalid("map source dimension does not match the domain"));
    }
    let rep = verify_map(map, &|rng: &mut _| dom.sample(rng), samples, tol, seed)?;
    let defect = rep.max_symplectic_defect;
    if rep.containment_failures > 0 || rep.skipped > 0 || !(defect <= tol) {
        return Err(rejected(format!(
            "{}: {} containment failures, {} skipped, defect {defect}",
            map.name(),
            rep.containment_failures,
            rep.skipped
        )));
    }
    Ok(Certificate::new(CertificateKind::NonSqueezing, map.name())
        .with_upper(target_capacity)
        .with_axiom("non-squeezing")
        .with_verification(rep.samples, 0, Some(defect.to_f64_lossy())))
}

/// Upper bound `2/λ²` on the punctured cube product from the embedding of
/// `λ(□ⁿ ×_L ◇ⁿ)` into `B^{2n}(4)` that sends the removed fiber into the
/// barrier. The embedding is checked on `samples` points, a quarter of
/// them on the fiber `x = 0`.
pub fn upper_bound_biran_cube<T: Real>(n: usize, lambda: T, samples: usize, seed: u64) -> Result<Certificate<T>> {
    if !(lambda > T::zero() && lambda < T::one()) {
        return Err(precondition(format!("lambda must lie in (0, 1), got {lambda}")));
    }
    if samples == 0 {
        return Err(invalid("need at least one sample"));
    }
    let eps = (T::one() / lambda - T::one()) / T::lit(2.0);
    let diamond = ConvexBody::cross_polytope(n, lambda)?;
    let counts = sharded(samples, seed, |rng, count| {
        let mut failures = 0usize;
        for s in 0..count {
            let on_fiber = s % 4 == 0;
            let mut pt: Vec<T> =
                (0..n).map(|_| if on_fiber { T::zero() } else { uniform(rng, -lambda, lambda) }).collect();
            pt.extend(diamond.sample_interior(rng));
            let ok = match phi_lambda_check(n, lambda, eps, &pt) {
                Ok(r) => r.in_ball && r.chain_holds && (!on_fiber || r.in_lagrangian),
                Err(_) => false,
            };
            if !ok {
                failures += 1;
            }
        }
        failures
    });
    let failures: usize = counts.into_iter().sum();
    if failures > 0 {
        return Err(rejected(format!("phi_lambda failed on {failures} of {samples} samples")));
    }
    Ok(Certificate::new(CertificateKind::LagrangianBarrier, "barrier embedding of the cube product")
        .with_upper(T::lit(2.0) / (lambda * lambda))
        .with_axiom("biran_holed_ball(4)")
        .with_axiom("conformality")
        .with_verification(samples, 0, None)
        .with_note("tends to 2 as lambda → 1"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::products::StandardId;

    #[test]
    fn annulus_squeeze_is_certified() {
        let dom = LagrangianProductDomain::<f64>::standard(StandardId::AnnulusDisk(2, 0.5)).unwrap();
        let map = annulus_squeeze_map(2, 0.5, 1e-3).unwrap();
        let c = upper_bound_nonsqueezing(&dom, &map, 1.0 + 1e-3, 2000, 1e-6, 0).unwrap();
        assert_eq!(c.upper, Some(1.001));
    }

    #[test]
    fn too_small_target_is_rejected() {
        let dom = LagrangianProductDomain::<f64>::standard(StandardId::DiskDisk(2)).unwrap();
        let map = factor_swap_map(2, 0, 0.5, 1.0).unwrap();
        assert!(matches!(upper_bound_nonsqueezing(&dom, &map, 2.0, 2000, 1e-6, 0), Err(crate::Error::Rejected(_))));
    }

    #[test]
    fn swap_is_exact() {
        let dom = LagrangianProductDomain::<f64>::standard(StandardId::DiskSquare).unwrap();
        let map = factor_swap_map(2, 0, 1.0, 1.0).unwrap();
        let c = upper_bound_nonsqueezing(&dom, &map, 4.0, 1000, 1e-12, 0).unwrap();
        assert_eq!(c.defect, Some(0.0));
    }

    #[test]
    fn biran_bound() {
        let c = upper_bound_biran_cube::<f64>(2, 0.9, 400, 0).unwrap();
        assert!((c.upper.unwrap() - 2.0 / 0.81).abs() < 1e-12);
        assert!(upper_bound_biran_cube::<f64>(2, 1.0, 10, 0).is_err());
    }
}
