//! Certified capacity intervals for Lagrangian products.
//!
//! Capacities are normalized by `c(B(r)) = r` where `B(r)` is the ball of
//! area parameter `r`. Deep results enter as registry values; everything
//! built on top of them is verified numerically and recorded as a
//! [`Certificate`].

mod holed;
mod interval;
mod pinched;
mod upper;

pub use holed::{dual_product_value, f_delta, lower_bound_holed};
pub use interval::{
    registry_certificate, registry_lookup, CapacityInterval, Certificate, CertificateKind, KnownResult,
};
pub use pinched::{
    barrier_test, biran_pinched_bounds, pinched_product_bounds, pinching_alpha, BarrierReport, BiranPinchedBounds,
    PinchedBounds,
};
pub use upper::{annulus_squeeze_map, factor_swap_map, upper_bound_biran_cube, upper_bound_nonsqueezing};

use crate::billiards::{annulus_min_action, scatterer_min_action};
use crate::convex::{BodyKind, ConvexBody};
use crate::error::{invalid, Result};
use crate::products::{LagrangianProductDomain, PositionFactor, StandardId};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityOptions<T = f64> {
    /// Slack in upper bounds that only hold in a limit.
    pub eps: T,
    /// Samples per verified certificate.
    pub samples: usize,
    pub tol: T,
    pub seed: u64,
    /// Bounce limit for the attached billiard search; 0 skips it.
    pub k_max: usize,
}

impl<T: Real> Default for CapacityOptions<T> {
    fn default() -> Self {
        Self { eps: T::lit(1e-3), samples: 10_000, tol: T::lit(1e-6), seed: 0, k_max: 4 }
    }
}

/// [`capacity_of_with`] with default options.
pub fn capacity_of<T: Real>(dom: &LagrangianProductDomain<T>) -> Result<CapacityInterval<T>> {
    capacity_of_with(dom, &CapacityOptions::default())
}

/// Intersection of every certificate that applies to `dom`.
pub fn capacity_of_with<T: Real>(
    dom: &LagrangianProductDomain<T>,
    opts: &CapacityOptions<T>,
) -> Result<CapacityInterval<T>> {
    if !(opts.eps > T::zero()) {
        return Err(invalid("eps must be positive"));
    }
    let mut iv = match dom.id() {
        Some(id) => standard_interval(id, opts)?,
        None => match recognize(dom) {
            Some((id, factor)) => {
                let mut iv = standard_interval(id, opts)?.scaled(factor)?;
                for c in iv.certificates.iter_mut() {
                    c.axioms.push("linear stretch".into());
                }
                iv
            }
            None => sandwich_interval(dom.position(), dom.momentum())?,
        },
    };
    let s = dom.scale();
    if s != T::one() {
        iv = iv.scaled(s * s)?;
        for c in iv.certificates.iter_mut() {
            c.axioms.push("conformality".into());
        }
    }
    Ok(iv)
}

fn standard_interval<T: Real>(id: StandardId<T>, opts: &CapacityOptions<T>) -> Result<CapacityInterval<T>> {
    let one = T::one();
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let base = LagrangianProductDomain::standard(id)?;
    let mut certs = Vec::new();
    let mut a_min = None;
    match id {
        StandardId::DiskDisk(n) => certs.push(registry_certificate(&format!("disk_disk({n})"))?),
        StandardId::CubeDiamond(n) => certs.push(registry_certificate(&format!("cube_diamond({n})"))?),
        StandardId::AnnulusDisk(n, delta) => {
            let ball = ConvexBody::ball(n, one)?;
            let (lower, upper) = rayon::join(
                || lower_bound_holed(&ball, delta, opts.samples, opts.seed),
                || {
                    let map = annulus_squeeze_map(n, delta, opts.eps)?;
                    upper_bound_nonsqueezing(
                        &base,
                        &map,
                        two * (one - delta) + opts.eps,
                        opts.samples,
                        opts.tol,
                        opts.seed,
                    )
                },
            );
            certs.extend(lower?);
            certs.push(upper?);
            if opts.k_max >= 2 {
                a_min = Some(annulus_min_action(delta, opts.k_max)?.value);
            }
        }
        StandardId::PuncturedCubeDiamond(n) => {
            let cube = ConvexBody::unit_cube(n)?;
            let lambda = (one + opts.eps / two).sqrt().recip();
            let (lower, upper) = rayon::join(
                || lower_bound_holed(&cube, T::zero(), opts.samples, opts.seed),
                || upper_bound_biran_cube(n, lambda, opts.samples, opts.seed),
            );
            certs.extend(lower?);
            certs.push(upper?);
            if opts.k_max >= 2 {
                let diamond = ConvexBody::cross_polytope(n, one)?;
                a_min = Some(scatterer_min_action(&[vec![T::zero(); n]], &cube, &diamond, opts.k_max)?.value);
            }
        }
        StandardId::DiskSquare => {
            // ◇ ⊂ D, and ◇ × □ is carried onto □ × ◇ by (x, y) ↦ (y, −x)
            let disk = ConvexBody::ball(2, one)?;
            let diamond = ConvexBody::cross_polytope(2, one)?;
            certs.push(inclusion_certificate(&diamond.vertices().unwrap_or_default(), &disk, four, "cube_diamond(2)")?);
            let map = factor_swap_map(2, 0, one, one)?;
            certs.push(
                upper_bound_nonsqueezing(&base, &map, four, opts.samples, opts.tol, opts.seed)?
                    .with_axiom("rectangle_cylinder(4)"),
            );
        }
        StandardId::ARDiamond(_) => {
            // the square [ε, 2−ε] × [−(1−ε), 1−ε] sits in A_r away from the origin
            let side = one - opts.eps;
            let square: Vec<Vec<T>> = [(one, one), (one, -one), (-one, -one), (-one, one)]
                .iter()
                .map(|&(a, b)| vec![one + a * side, b * side])
                .collect();
            let hull = base.position().hull().clone();
            certs.push(
                inclusion_certificate(&square, &hull, four * side * side, "cube_diamond(2)")?.with_axiom("translation"),
            );
            let map = factor_swap_map(2, 1, one, one)?;
            certs.push(
                upper_bound_nonsqueezing(&base, &map, four, opts.samples, opts.tol, opts.seed)?
                    .with_axiom("rectangle_cylinder(4)"),
            );
        }
        StandardId::RectDiamond(a, b) => {
            let m = a.min(b);
            let i = if a <= b { 0 } else { 1 };
            let square = ConvexBody::cube(&[m, m])?.vertices().unwrap_or_default();
            let rect = ConvexBody::cube(&[a, b])?;
            certs.push(inclusion_certificate(&square, &rect, four * m, "cube_diamond(2)")?.with_axiom("conformality"));
            let map = factor_swap_map(2, i, m, one)?;
            certs.push(
                upper_bound_nonsqueezing(&base, &map, four * m, opts.samples, opts.tol, opts.seed)?
                    .with_axiom(format!("rectangle_cylinder({})", four * m)),
            );
        }
    }
    let mut iv = CapacityInterval::from_certificates(certs)?;
    iv.a_min = a_min;
    Ok(iv)
}

/// The standard product that `dom` is a stretch of, with `m` such that
/// `c(dom) = m·c(standard)`. `(x, y) ↦ (x/r, r y)` turns `rP ×_L tQ` into
/// `P ×_L rtQ`, which is `√(rt)·(P ×_L Q)`.
fn recognize<T: Real>(dom: &LagrangianProductDomain<T>) -> Option<(StandardId<T>, T)> {
    let n = dom.dim();
    let ball = |k: &ConvexBody<T>| match k.kind() {
        BodyKind::Ball { radius } => Some(*radius),
        _ => None,
    };
    let cube = |k: &ConvexBody<T>| match k.kind() {
        BodyKind::Cube { half_widths } if half_widths.iter().all(|&a| a == half_widths[0]) => Some(half_widths[0]),
        _ => None,
    };
    let at_origin = |pts: &[Vec<T>]| pts.len() == 1 && pts[0].iter().all(|&c| c == T::zero());
    let mom = dom.momentum();
    match (dom.position(), mom.kind()) {
        (PositionFactor::Body(p), BodyKind::Ball { radius: t }) => ball(p).map(|r| (StandardId::DiskDisk(n), r * *t)),
        (PositionFactor::Body(p), BodyKind::CrossPolytope { radius: t }) => {
            cube(p).map(|a| (StandardId::CubeDiamond(n), a * *t))
        }
        (PositionFactor::Body(p), BodyKind::Cube { .. }) if n == 2 => {
            Some((StandardId::DiskSquare, ball(p)? * cube(mom)?))
        }
        (PositionFactor::Annulus { outer, delta }, BodyKind::Ball { radius: t }) => {
            ball(outer).map(|r| (StandardId::AnnulusDisk(n, *delta), r * *t))
        }
        (PositionFactor::Punctured { body, points }, BodyKind::CrossPolytope { radius: t }) if at_origin(points) => {
            cube(body).map(|a| (StandardId::PuncturedCubeDiamond(n), a * *t))
        }
        _ => None,
    }
}

/// Lower bound `value` from `conv(verts) ⊆ outer`, checked on the vertices.
fn inclusion_certificate<T: Real>(
    verts: &[Vec<T>],
    outer: &ConvexBody<T>,
    value: T,
    axiom: &str,
) -> Result<Certificate<T>> {
    if verts.is_empty() {
        return Err(invalid("inclusion needs at least one vertex"));
    }
    let failures = verts.iter().filter(|v| !outer.contains(v).unwrap_or(false)).count();
    if failures > 0 {
        return Err(crate::error::rejected(format!("{failures} vertices of the inner body lie outside")));
    }
    Ok(Certificate::new(CertificateKind::Inclusion, "product inclusion")
        .with_lower(value)
        .with_axiom(axiom)
        .with_axiom("monotonicity")
        .with_verification(verts.len(), 0, Some(0.0)))
}

/// `[4 p̌ ť, 4 p̂ t̂]` from round balls inside and around both factors; the
/// lower end is dropped when the position factor has holes.
fn sandwich_interval<T: Real>(position: &PositionFactor<T>, momentum: &ConvexBody<T>) -> Result<CapacityInterval<T>> {
    let four = T::lit(4.0);
    let n = momentum.dim();
    let p = position.hull().radial_extremes();
    let t = momentum.radial_extremes();
    let mut cert = Certificate::new(CertificateKind::Sandwich, "ball sandwich")
        .with_upper(four * p.k_max * t.k_max)
        .with_axiom(format!("disk_disk({n})"))
        .with_axiom("monotonicity")
        .with_axiom("conformality");
    if !position.is_holed() {
        cert = cert.with_lower(four * p.k_min * t.k_min);
    }
    CapacityInterval::from_certificates([cert])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> CapacityOptions<f64> {
        CapacityOptions { samples: 2000, k_max: 0, ..CapacityOptions::default() }
    }

    #[test]
    fn registry_backed() {
        let d = LagrangianProductDomain::<f64>::standard(StandardId::CubeDiamond(3)).unwrap();
        let iv = capacity_of_with(&d, &quick()).unwrap();
        assert_eq!((iv.lower, iv.upper), (4.0, 4.0));
    }

    #[test]
    fn annulus_interval() {
        let d = LagrangianProductDomain::<f64>::standard(StandardId::AnnulusDisk(2, 0.5)).unwrap();
        let iv = capacity_of_with(&d, &quick()).unwrap();
        assert_eq!(iv.lower, 1.0);
        assert!((iv.upper - 1.001).abs() < 1e-12);
    }

    #[test]
    fn disk_square_is_exact() {
        let d = LagrangianProductDomain::<f64>::standard(StandardId::DiskSquare).unwrap();
        let iv = capacity_of_with(&d, &quick()).unwrap();
        assert_eq!((iv.lower, iv.upper), (4.0, 4.0));
    }

    #[test]
    fn pentagon_and_rectangle() {
        let d = LagrangianProductDomain::<f64>::standard(StandardId::ARDiamond(0.5)).unwrap();
        let iv = capacity_of_with(&d, &quick()).unwrap();
        assert!(iv.upper == 4.0 && (iv.lower - 4.0 * 0.999f64.powi(2)).abs() < 1e-12);
        let r = LagrangianProductDomain::<f64>::standard(StandardId::RectDiamond(0.5, 2.0)).unwrap();
        let iv = capacity_of_with(&r, &quick()).unwrap();
        assert_eq!((iv.lower, iv.upper), (2.0, 2.0));
    }

    #[test]
    fn scaling_is_quadratic() {
        let d = LagrangianProductDomain::<f64>::standard(StandardId::DiskDisk(2)).unwrap().scaled(2.0).unwrap();
        let iv = capacity_of_with(&d, &quick()).unwrap();
        assert_eq!((iv.lower, iv.upper), (16.0, 16.0));
    }

    #[test]
    fn custom_sandwich() {
        let d = LagrangianProductDomain::new(
            PositionFactor::Body(ConvexBody::<f64>::ellipsoid(&[1.0, 2.0]).unwrap()),
            ConvexBody::ball(2, 1.0).unwrap(),
        )
        .unwrap();
        let iv = capacity_of(&d).unwrap();
        assert_eq!((iv.lower, iv.upper), (4.0, 8.0));
    }
}
