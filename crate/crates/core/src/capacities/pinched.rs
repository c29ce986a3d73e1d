use serde::Serialize;

use crate::convex::{ConvexBody, VolumeMethod};
use crate::error::{invalid, precondition, rejected, Result};
use crate::products::balance_stretch;
use crate::sampling::SampleRng;
use crate::scalar::Real;
use crate::symplectic::verify_map;

use super::{CapacityInterval, Certificate, CertificateKind};

/// `(4/π)^{2/3}`.
pub fn pinching_alpha<T: Real>() -> T {
    (T::lit(4.0) / T::PI()).powf(T::lit(2.0) / T::lit(3.0))
}

/// Both versions of the pinched dual-product bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PinchedBounds<T = f64> {
    /// `k̂ / ǩ`.
    pub ratio: T,
    /// `[b·√(ǩ/k̂), b·√(k̂/ǩ)]` with `b = 4`, or `2` when holed.
    pub printed: CapacityInterval<T>,
    /// `[b·ǩ/k̂, b·k̂/ǩ]` from the ball sandwich and a balancing stretch.
    pub sandwich: CapacityInterval<T>,
    /// The two intervals differ (any `ratio > 1`).
    pub exponent_discrepancy: bool,
}

/// Bounds on `c(K ×_L K°)`, or on `c((K∖{0}) ×_L K°)` when `holed`.
pub fn pinched_product_bounds<T: Real>(k: &ConvexBody<T>, holed: bool) -> Result<PinchedBounds<T>> {
    if !k.contains(&vec![T::zero(); k.dim()])? {
        return Err(precondition("the origin must be an interior point"));
    }
    let ext = k.radial_extremes();
    let (lo, hi) = (ext.k_min, ext.k_max);
    let q = hi / lo;
    let n = k.dim();
    let (base, base_id) =
        if holed { (T::lit(2.0), format!("annulus_disk({n}, 0)")) } else { (T::lit(4.0), format!("disk_disk({n})")) };

    let printed =
        CapacityInterval::from_certificates([Certificate::new(CertificateKind::Pinched, "pinched dual product")
            .with_lower(base / q.sqrt())
            .with_upper(base * q.sqrt())
            .with_axiom(base_id.clone())
            .with_note("exponent 1/2 as printed")])?;

    // D(ǩ) × D(1/k̂) ⊆ K × K° ⊆ D(k̂) × D(1/ǩ), each balanced by a stretch
    let inner = stretch_check(n, lo, T::one() / hi)?;
    let outer = stretch_check(n, hi, T::one() / lo)?;
    let sandwich = CapacityInterval::from_certificates([Certificate::new(CertificateKind::Sandwich, "ball sandwich")
        .with_lower(base * lo / hi)
        .with_upper(base * hi / lo)
        .with_axiom(base_id)
        .with_axiom("conformality")
        .with_verification(inner.0 + outer.0, 0, Some(inner.1.max(outer.1)))])?;
    Ok(PinchedBounds { ratio: q, printed, sandwich, exponent_discrepancy: q > T::one() + T::lit(1e-12) })
}

/// Checks that the balancing stretch carries `D(a) × D(b)` onto
/// `D(√ab) × D(√ab)`; returns `(samples, defect)`.
fn stretch_check<T: Real>(n: usize, a: T, b: T) -> Result<(usize, f64)> {
    let m = (a * b).sqrt();
    let tol = T::lit(1e-9);
    let map = balance_stretch(n, a, b)?.with_containment(move |p: &[T]| {
        let (x, y) = p.split_at(n);
        let nx = x.iter().fold(T::zero(), |s, &c| s + c * c).sqrt();
        let ny = y.iter().fold(T::zero(), |s, &c| s + c * c).sqrt();
        nx <= m * (T::one() + tol) && ny <= m * (T::one() + tol)
    });
    let da = ConvexBody::ball(n, a)?;
    let db = ConvexBody::ball(n, b)?;
    let sampler = |rng: &mut SampleRng| {
        let mut z = da.sample_interior(rng);
        z.extend(db.sample_interior(rng));
        z
    };
    let rep = verify_map(&map, &sampler, 1000, tol, 0)?;
    if !rep.passes(tol) {
        return Err(rejected(format!("balance stretch failed: {rep:?}")));
    }
    Ok((rep.samples, rep.max_symplectic_defect.to_f64_lossy()))
}

/// Lagrangian barrier test for a planar body.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierReport<T = f64> {
    pub barrier_certified: bool,
    /// Upper end of the holed interval.
    pub left: T,
    /// `√(Vol(K) Vol(K°))`.
    pub mid: T,
    pub mid_std_error: T,
    /// Lower end of the full interval.
    pub right: T,
    pub ratio: T,
    /// The same test with the sandwich intervals.
    pub sandwich_left: T,
    pub sandwich_right: T,
    pub sandwich_certified: bool,
}

/// `left < mid ≤ right` for an `α`-pinched symmetric `K ⊂ ℝ²`.
pub fn barrier_test<T: Real>(k: &ConvexBody<T>, volume: VolumeMethod) -> Result<BarrierReport<T>> {
    if k.dim() != 2 {
        return Err(precondition(format!("the barrier test is planar, got dimension {}", k.dim())));
    }
    if !k.is_centrally_symmetric() {
        return Err(precondition("the body must be centrally symmetric"));
    }
    let alpha = pinching_alpha::<T>();
    let pinch = k.pinching_report(alpha)?;
    if !pinch.is_alpha_pinched {
        return Err(precondition(format!("pinching ratio {} exceeds {alpha}", pinch.ratio)));
    }
    let holed = pinched_product_bounds(k, true)?;
    let full = pinched_product_bounds(k, false)?;
    let m = k.mahler_sqrt(volume)?;
    let (left, right) = (holed.printed.upper, full.printed.lower);
    let (sl, sr) = (holed.sandwich.upper, full.sandwich.lower);
    Ok(BarrierReport {
        barrier_certified: left < m.value && m.value <= right,
        left,
        mid: m.value,
        mid_std_error: m.std_error,
        right,
        ratio: pinch.ratio,
        sandwich_left: sl,
        sandwich_right: sr,
        sandwich_certified: sl < m.value && m.value <= sr,
    })
}

/// Bounds on `c(M∖𝓛)` for `B(πm̌²) ⊆ M ⊆ B(πm̂²)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiranPinchedBounds<T = f64> {
    /// `[c(M)/4, c(M)]`.
    pub interval: CapacityInterval<T>,
    /// The upper end is strict (`c(M) > πm̌²`).
    pub strict_upper: bool,
    /// `[πm̌²/2, πm̂²/2]`.
    pub sandwich: CapacityInterval<T>,
}

/// Requires `m̂ < √2·m̌`.
pub fn biran_pinched_bounds<T: Real>(m_check: T, m_hat: T, c_m: T) -> Result<BiranPinchedBounds<T>> {
    if !(m_check > T::zero() && m_hat >= m_check && c_m > T::zero()) {
        return Err(invalid("need 0 < m̌ ≤ m̂ and c(M) > 0"));
    }
    if !(m_hat < T::SQRT_2() * m_check) {
        return Err(precondition(format!("pinching ratio {} is not below √2", m_hat / m_check)));
    }
    let pi = T::PI();
    let two = T::lit(2.0);
    let interval =
        CapacityInterval::from_certificates([Certificate::new(CertificateKind::LagrangianBarrier, "pinched barrier")
            .with_lower(c_m / T::lit(4.0))
            .with_upper(c_m)
            .with_axiom("biran_holed_ball")])?;
    let sandwich = CapacityInterval::from_certificates([Certificate::new(CertificateKind::Sandwich, "ball sandwich")
        .with_lower(pi * m_check * m_check / two)
        .with_upper(pi * m_hat * m_hat / two)
        .with_axiom("biran_holed_ball")
        .with_axiom("monotonicity")])?;
    Ok(BiranPinchedBounds { interval, strict_upper: c_m > pi * m_check * m_check, sandwich })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ball_bounds_agree() {
        let b = ConvexBody::<f64>::ball(2, 1.0).unwrap();
        let p = pinched_product_bounds(&b, false).unwrap();
        assert_eq!((p.printed.lower, p.printed.upper), (4.0, 4.0));
        assert_eq!((p.sandwich.lower, p.sandwich.upper), (4.0, 4.0));
        assert!(!p.exponent_discrepancy);
    }

    #[test]
    fn ellipse_bounds() {
        let e = ConvexBody::<f64>::ellipsoid(&[1.0, 1.05]).unwrap();
        let p = pinched_product_bounds(&e, false).unwrap();
        assert!((p.printed.lower - 4.0 / 1.05f64.sqrt()).abs() < 1e-12);
        assert!((p.printed.upper - 4.0 * 1.05f64.sqrt()).abs() < 1e-12);
        let h = pinched_product_bounds(&e, true).unwrap();
        assert!((h.sandwich.lower - 2.0 / 1.05).abs() < 1e-12 && (h.sandwich.upper - 2.1).abs() < 1e-12);
        assert!(h.exponent_discrepancy);
    }

    #[test]
    fn barrier_for_the_disk() {
        let b = ConvexBody::<f64>::ball(2, 1.0).unwrap();
        let r = barrier_test(&b, VolumeMethod::Exact).unwrap();
        assert!(r.barrier_certified);
        assert_eq!((r.left, r.right), (2.0, 4.0));
        assert!((r.mid - PI).abs() < 1e-12);
        let wide = ConvexBody::<f64>::ellipsoid(&[1.0, 1.3]).unwrap();
        assert!(matches!(barrier_test(&wide, VolumeMethod::Exact), Err(crate::Error::Precondition(_))));
    }

    #[test]
    fn biran_examples() {
        let r = (1.0 / PI).sqrt();
        let b = biran_pinched_bounds(r, r, 1.0).unwrap();
        assert!((b.sandwich.lower - 0.5).abs() < 1e-15 && (b.sandwich.upper - 0.5).abs() < 1e-15);
        let m = biran_pinched_bounds(1.0, 1.2, PI * 1.1).unwrap();
        assert!(m.strict_upper && (m.interval.lower - PI * 1.1 / 4.0).abs() < 1e-15);
        assert!(matches!(biran_pinched_bounds(1.0, 1.5, 3.0), Err(crate::Error::Precondition(_))));
    }
}
