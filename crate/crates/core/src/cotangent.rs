//! Disk cotangent bundles of cylinders and of the dumbbell.
//!
//! Cylinder points use the chart `(z, θ, p_z, p_θ)` with
//! `dp_z∧dz + dp_θ∧dθ`; the base circle encloses area `R`. Dumbbell points
//! use `(r, θ, z, p_r, p_θ, p_z)`.

use std::sync::Arc;

use serde::Serialize;

use crate::capacities::{CapacityInterval, Certificate, CertificateKind};
use crate::error::{domain, invalid, rejected, Result};
use crate::linalg::Matrix;
use crate::rearrangements::RectToDisk;
use crate::sampling::{in_ball, sharded, uniform, SampleRng};
use crate::scalar::Real;
use crate::symplectic::{
    verify_map, verify_piecewise, Chart, PiecewiseMap, PiecewiseReport, Sampler, Seam, SymplecticMapSpec,
    VerificationReport, R_MIN,
};

/// Height sampled for unbounded cylinders.
pub const Z_MAX: f64 = 1e3;

/// `4a` for `a ≤ π`, `4π` beyond.
pub fn g_of_a<T: Real>(a: T) -> Result<T> {
    if !(a > T::zero()) {
        return Err(invalid(format!("a must be positive, got {a}")));
    }
    Ok(T::lit(4.0) * a.min(T::PI()))
}

/// `−ρ dρ∧dφ + dy∧dx` on `(ρ, φ, x, y)`, allowing either sign of `ρ`.
fn polar_target<T: Real>(name: &str) -> Chart<T> {
    Chart::new(
        name,
        4,
        |q: &[T]| {
            let mut m = Matrix::zeros(4, 4);
            m[(0, 1)] = -q[0];
            m[(1, 0)] = q[0];
            m[(3, 2)] = T::one();
            m[(2, 3)] = -T::one();
            m
        },
        |q: &[T]| q.len() == 4 && q[0].abs() > T::lit(R_MIN),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CylinderBundle<T = f64> {
    r: T,
    /// Half-height; `None` for the unbounded cylinder.
    a: Option<T>,
}

/// Which factor the upper-bound squeeze confines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SqueezeBranch {
    /// The `(θ, p_θ)` annulus, of area `4√(πR)`.
    Angular,
    /// The `(z, p_z)` strip, squeezed into a disk of area `4a + ε`.
    Axial,
}

impl<T: Real> CylinderBundle<T> {
    pub fn new(r: T, a: Option<T>) -> Result<Self> {
        if !(r > T::zero() && r.is_finite()) {
            return Err(invalid(format!("R must be positive, got {r}")));
        }
        if let Some(a) = a {
            if !(a > T::zero() && a.is_finite()) {
                return Err(invalid(format!("a must be positive, got {a}")));
            }
        }
        Ok(Self { r, a })
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn a(&self) -> Option<T> {
        self.a
    }

    /// Radius `√(R/π)` of the base circle.
    pub fn s(&self) -> T {
        (self.r / T::PI()).sqrt()
    }

    fn height(&self) -> T {
        self.a.unwrap_or(T::lit(Z_MAX))
    }

    /// `|z| < a` and `(π/R) p_θ² + p_z² < 1`.
    pub fn contains(&self, pt: &[T]) -> bool {
        pt.len() == 4
            && self.a.is_none_or(|a| pt[0].abs() < a)
            && T::PI() / self.r * pt[3] * pt[3] + pt[2] * pt[2] < T::one()
    }

    pub fn sample(&self, rng: &mut SampleRng) -> Vec<T> {
        let h = self.height();
        let z = uniform(rng, -h, h);
        let theta = uniform(rng, -T::PI(), T::PI());
        let p = in_ball::<T>(rng, 2, T::one());
        vec![z, theta, p[0], self.s() * p[1]]
    }

    fn source_chart(&self) -> Chart<T> {
        let me = *self;
        Chart::cylinder_cotangent().with_domain("cylinder_bundle", move |q: &[T]| me.contains(q))
    }

    /// `(s + p_θ, −θ/(s + p_θ), z, p_z)` in polar-first coordinates.
    pub fn map_f(&self, pt: &[T]) -> Result<Vec<T>> {
        if !self.contains(pt) {
            return Err(domain("point outside the cylinder bundle"));
        }
        Ok(f_formula(self.s(), pt))
    }

    pub fn f_spec(&self) -> SymplecticMapSpec<T> {
        let s = self.s();
        SymplecticMapSpec::new("cylinder_f", self.source_chart(), polar_target("polar_first4"), move |q: &[T]| {
            f_formula(s, q)
        })
    }

    /// Injective squeeze into a cylinder over one factor, with the target
    /// capacity and the branch used.
    pub fn squeeze(&self, eps: T) -> Result<(SymplecticMapSpec<T>, T, SqueezeBranch)> {
        let s = self.s();
        let four = T::lit(4.0);
        let angular = four * T::PI() * s;
        let strip = RectToDisk::new(T::zero(), T::zero(), self.height(), T::one(), eps)?;
        let (cap, branch) = match self.a {
            Some(a) if four * a + eps < angular => (strip.target_area(), SqueezeBranch::Axial),
            _ => (angular, SqueezeBranch::Angular),
        };
        let bounded = self.a.is_some();
        let map =
            SymplecticMapSpec::new("cylinder_squeeze", self.source_chart(), Chart::paired(2), move |q: &[T]| {
                let rho = (T::lit(2.0) * (s + q[3])).max(T::zero()).sqrt();
                let [x, y] = if bounded { strip.apply(q[0], q[2]) } else { [q[0], q[2]] };
                vec![rho * q[1].cos(), -rho * q[1].sin(), x, y]
            })
            .with_containment(move |p: &[T]| {
                let (i, j) = if branch == SqueezeBranch::Angular { (0, 1) } else { (2, 3) };
                T::PI() * (p[i] * p[i] + p[j] * p[j]) < cap
            });
        Ok((map, cap, branch))
    }

    /// Half-widths of the box `□(a − ε/2, s(π − ε/2))` embedded by `h`.
    fn lower_box(&self, eps: T) -> Result<(T, T)> {
        let half = eps / T::lit(2.0);
        if !(eps > T::zero() && half < T::PI()) {
            return Err(invalid(format!("eps must lie in (0, 2π), got {eps}")));
        }
        let b1 = self.height() - half;
        if !(b1 > T::zero()) {
            return Err(invalid("eps too large for the cylinder height"));
        }
        Ok((b1, self.s() * (T::PI() - half)))
    }

    /// `(x₁, x₂, y₁, y₂) ↦ (x₁, x₂/s, y₁, s y₂)` on `□(a−ε/2, s(π−ε/2)) ×_L ◇(1)`;
    /// the identity when `R = π`.
    pub fn lower_map_h(&self, eps: T, pt: &[T]) -> Result<Vec<T>> {
        let (b1, b2) = self.lower_box(eps)?;
        if pt.len() != 4 || !(pt[0].abs() < b1 && pt[1].abs() < b2 && pt[2].abs() + pt[3].abs() < T::one()) {
            return Err(domain("point outside the box-diamond product"));
        }
        let s = self.s();
        Ok(vec![pt[0], pt[1] / s, pt[2], s * pt[3]])
    }

    /// Lower bound `4·min(a − ε/2, s(π − ε/2))` from the ball inside the
    /// box-diamond product, with `h` checked on `samples` points.
    pub fn lower_certificate(&self, eps: T, samples: usize, seed: u64) -> Result<Certificate<T>> {
        let (b1, b2) = self.lower_box(eps)?;
        let value = T::lit(4.0) * if self.a.is_some() { b1.min(b2) } else { b2 };
        let failures: usize = sharded(samples, seed, |rng, count| {
            (0..count)
                .filter(|_| {
                    let x = [uniform(rng, -b1, b1), uniform(rng, -b2, b2)];
                    let y = loop {
                        let y = [uniform(rng, -T::one(), T::one()), uniform(rng, -T::one(), T::one())];
                        if y[0].abs() + y[1].abs() < T::one() {
                            break y;
                        }
                    };
                    let pt = [x[0], x[1], y[0], y[1]];
                    !self.lower_map_h(eps, &pt).is_ok_and(|img| self.contains(&img))
                })
                .count()
        })
        .into_iter()
        .sum();
        if failures > 0 {
            return Err(rejected(format!("h left the bundle on {failures} of {samples} samples")));
        }
        Ok(Certificate::new(CertificateKind::BallEmbedding, "box-diamond ball in the cylinder bundle")
            .with_lower(value)
            .with_axiom("cube_diamond(2)")
            .with_axiom("conformality")
            .with_verification(samples, 0, Some(0.0)))
    }

    pub fn upper_certificate(
        &self,
        eps: T,
        samples: usize,
        tol: T,
        seed: u64,
    ) -> Result<(Certificate<T>, SqueezeBranch)> {
        let (map, cap, branch) = self.squeeze(eps)?;
        let me = *self;
        let rep = verify_map(&map, &move |rng: &mut SampleRng| me.sample(rng), samples, tol, seed)?;
        if rep.containment_failures > 0 || rep.skipped > 0 || !(rep.max_symplectic_defect <= tol) {
            return Err(rejected(format!("cylinder squeeze: {rep:?}")));
        }
        let cert = Certificate::new(CertificateKind::NonSqueezing, "cylinder squeeze")
            .with_upper(cap)
            .with_axiom("non-squeezing")
            .with_verification(rep.samples, 0, Some(rep.max_symplectic_defect.to_f64_lossy()));
        Ok((cert, branch))
    }
}

fn f_formula<T: Real>(s: T, q: &[T]) -> Vec<T> {
    let rho = s + q[3];
    vec![rho, -q[1] / rho, q[0], q[2]]
}

/// `f` for the unbounded cylinder of parameter `R`.
pub fn cylinder_map_f<T: Real>(r: T, pt: &[T]) -> Result<Vec<T>> {
    CylinderBundle::new(r, None)?.map_f(pt)
}

/// `h` for `D*C_a` with `R = π`.
pub fn lower_map_h<T: Real>(a: T, eps: T, pt: &[T]) -> Result<Vec<T>> {
    CylinderBundle::new(T::PI(), Some(a))?.lower_map_h(eps, pt)
}

#[derive(Debug, Clone, Serialize)]
pub struct CylinderReport<T = f64> {
    pub r: T,
    pub a: Option<T>,
    /// `g(a)`, reported when `R = π`.
    pub g: Option<T>,
    pub interval: CapacityInterval<T>,
    pub upper_branch: SqueezeBranch,
    /// Verification of `f` as a symplectic map.
    pub f_defect: VerificationReport<T>,
}

pub fn cylinder_report<T: Real>(
    bundle: &CylinderBundle<T>,
    eps: T,
    samples: usize,
    tol: T,
    seed: u64,
) -> Result<CylinderReport<T>> {
    let lower = bundle.lower_certificate(eps, samples, seed)?;
    let (upper, upper_branch) = bundle.upper_certificate(eps, samples, tol, seed)?;
    let interval = CapacityInterval::from_certificates([lower, upper])?;
    let b = *bundle;
    let f_defect = verify_map(&bundle.f_spec(), &move |rng: &mut SampleRng| b.sample(rng), samples, tol, seed)?;
    let g = if (bundle.r - T::PI()).abs() <= T::lit(1e-12) {
        Some(bundle.a.map_or(Ok(T::lit(4.0) * T::PI()), g_of_a)?)
    } else {
        None
    };
    Ok(CylinderReport { r: bundle.r, a: bundle.a, g, interval, upper_branch, f_defect })
}

/// `4π`: capacity of the hole disk `{y = 0, r² + x² ≤ 4}`.
pub fn camel_hole_constant<T: Real>() -> T {
    T::lit(4.0) * T::PI()
}

/// Squared radius of the hole.
pub fn camel_hole_radius_sq<T: Real>() -> T {
    T::lit(4.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CamelPiece {
    #[serde(rename = "C_a")]
    Cylinder,
    #[serde(rename = "X+")]
    Upper,
    #[serde(rename = "X-")]
    Lower,
}

impl CamelPiece {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Cylinder => "C_a",
            Self::Upper => "X+",
            Self::Lower => "X-",
        }
    }
}

const PIECE_TOL: f64 = 1e-12;

fn in_piece<T: Real>(a: T, piece: CamelPiece, q: &[T]) -> bool {
    let tol = T::lit(PIECE_TOL);
    let one = T::one();
    let (r, z, p_r, p_theta, p_z) = (q[0], q[2], q[3], q[4], q[5]);
    match piece {
        CamelPiece::Cylinder => {
            (r - one).abs() <= tol && p_r.abs() <= tol && z.abs() <= a + tol && p_theta * p_theta + p_z * p_z < one
        }
        CamelPiece::Upper | CamelPiece::Lower => {
            let side = if piece == CamelPiece::Upper { a } else { -a };
            (z - side).abs() <= tol
                && p_z.abs() <= tol
                && r >= one - tol
                && p_r * p_r + p_theta * p_theta / (r * r) < one
        }
    }
}

fn camel_formula<T: Real>(a: T, piece: CamelPiece, q: &[T]) -> Vec<T> {
    let (r, theta, z, p_r, p_theta, p_z) = (q[0], q[1], q[2], q[3], q[4], q[5]);
    let rho = T::one() + p_theta;
    let shift = r - T::one() + a;
    let (x, y) = match piece {
        CamelPiece::Cylinder => (z, p_z),
        CamelPiece::Upper => (shift, p_r),
        CamelPiece::Lower => (-shift, -p_r),
    };
    vec![rho, -theta / rho, x, y]
}

/// The camel map on the labeled piece; `pt = (r, θ, z, p_r, p_θ, p_z)`.
pub fn camel_map_g<T: Real>(a: T, pt: &[T], piece: CamelPiece) -> Result<Vec<T>> {
    if !(a > T::zero()) {
        return Err(invalid(format!("a must be positive, got {a}")));
    }
    if pt.len() != 6 || !in_piece(a, piece, pt) {
        return Err(domain(format!("point is not in piece {}", piece.label())));
    }
    Ok(camel_formula(a, piece, pt))
}

/// `(z, θ, p_z, p_θ)` on the cylinder, `(r, θ, p_r, p_θ)` on the caps.
fn lift<T: Real>(a: T, piece: CamelPiece, q: &[T]) -> [T; 6] {
    match piece {
        CamelPiece::Cylinder => [T::one(), q[1], q[0], T::zero(), q[3], q[2]],
        CamelPiece::Upper => [q[0], q[1], a, q[2], q[3], T::zero()],
        CamelPiece::Lower => [q[0], q[1], -a, q[2], q[3], T::zero()],
    }
}

/// Camel map as a piecewise map with seams at `r = 1, z = ±a`. Cap samples
/// use `1 ≤ r ≤ r_max`.
pub fn camel_piecewise<T: Real>(a: T, r_max: T) -> Result<PiecewiseMap<T>> {
    if !(a > T::zero() && r_max > T::one()) {
        return Err(invalid("need a > 0 and r_max > 1"));
    }
    let pi = T::PI();
    let mut pieces = Vec::new();
    for piece in [CamelPiece::Cylinder, CamelPiece::Upper, CamelPiece::Lower] {
        let source = Chart::cartesian(2)
            .with_domain(format!("dumbbell_{}", piece.label()), move |q: &[T]| in_piece(a, piece, &lift(a, piece, q)));
        let spec = SymplecticMapSpec::new(
            format!("camel_{}", piece.label()),
            source,
            polar_target("camel_target"),
            move |q: &[T]| camel_formula(a, piece, &lift(a, piece, q)),
        );
        let sampler: Sampler<T> = match piece {
            CamelPiece::Cylinder => Arc::new(move |rng: &mut SampleRng| {
                let p = in_ball::<T>(rng, 2, T::one());
                vec![uniform(rng, -a, a), uniform(rng, -pi, pi), p[0], p[1]]
            }),
            _ => Arc::new(move |rng: &mut SampleRng| {
                let r = uniform(rng, T::one(), r_max);
                let p = in_ball::<T>(rng, 2, T::one());
                vec![r, uniform(rng, -pi, pi), p[0], r * p[1]]
            }),
        };
        pieces.push((piece.label().to_string(), spec, sampler));
    }
    let seam_sampler: Sampler<T> = Arc::new(move |rng: &mut SampleRng| {
        let p = in_ball::<T>(rng, 2, T::one());
        vec![uniform(rng, -pi, pi), p[0], p[1]]
    });
    let seam = |name: &str, piece: CamelPiece, sign: T| Seam {
        name: name.to_string(),
        sampler: seam_sampler.clone(),
        left: Arc::new(move |s: &[T]| {
            camel_formula(a, CamelPiece::Cylinder, &[T::one(), s[0], sign * a, T::zero(), s[2], s[1]])
        }),
        right: Arc::new(move |s: &[T]| {
            camel_formula(a, piece, &[T::one(), s[0], sign * a, sign * s[1], s[2], T::zero()])
        }),
    };
    Ok(PiecewiseMap {
        name: "camel_g".into(),
        pieces,
        seams: vec![seam("top", CamelPiece::Upper, T::one()), seam("bottom", CamelPiece::Lower, -T::one())],
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CamelReport<T = f64> {
    pub a: T,
    pub piecewise: PiecewiseReport<T>,
    /// Cap images with `±x < a`.
    pub separation_failures: usize,
    pub cap_samples: usize,
    /// Sign counts of the fourth coordinate on cap images.
    pub fourth_positive: usize,
    pub fourth_negative: usize,
    pub hole_constant: T,
    pub pass: bool,
}

pub fn verify_camel<T: Real>(a: T, samples: usize, seam_samples: usize, tol: T, seed: u64) -> Result<CamelReport<T>> {
    let map = camel_piecewise(a, T::lit(3.0))?;
    let piecewise = verify_piecewise(&map, samples, seam_samples, tol, seed)?;
    let (mut fails, mut pos, mut neg, mut total) = (0, 0, 0, 0);
    for (i, (_, spec, sampler)) in map.pieces.iter().enumerate().skip(1) {
        let sign = if i == 1 { T::one() } else { -T::one() };
        let counts = sharded(samples, seed ^ 0xca3e1 ^ i as u64, |rng, count| {
            let (mut f, mut p, mut n) = (0usize, 0usize, 0usize);
            for _ in 0..count {
                let img = spec.eval(&sampler(rng)).unwrap_or_else(|_| vec![T::nan(); 4]);
                if !(sign * img[2] >= a) {
                    f += 1;
                }
                if img[3] > T::zero() {
                    p += 1;
                } else if img[3] < T::zero() {
                    n += 1;
                }
            }
            (f, p, n)
        });
        for (f, p, n) in counts {
            fails += f;
            pos += p;
            neg += n;
        }
        total += samples;
    }
    let pass = piecewise.overall.max_symplectic_defect <= tol
        && piecewise.overall.seam_max_gap <= T::lit(1e-9)
        && piecewise.overall.skipped == 0
        && fails == 0;
    Ok(CamelReport {
        a,
        piecewise,
        separation_failures: fails,
        cap_samples: total,
        fourth_positive: pos,
        fourth_negative: neg,
        hole_constant: camel_hole_constant(),
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn g_values() {
        assert!((g_of_a(PI / 2.0).unwrap() - 2.0 * PI).abs() < 1e-15);
        assert!((g_of_a(PI).unwrap() - 4.0 * PI).abs() < 1e-15);
        assert!((g_of_a(10.0).unwrap() - 4.0 * PI).abs() < 1e-15);
        assert!(g_of_a(0.0f64).is_err());
    }

    #[test]
    fn f_at_origin() {
        assert_eq!(cylinder_map_f(PI, &[0.0, 0.0, 0.0, 0.0]).unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        assert!(cylinder_map_f(PI, &[0.0, 0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn h_certificates() {
        let b = CylinderBundle::new(PI, Some(1.0)).unwrap();
        let c = b.lower_certificate(0.1, 2000, 0).unwrap();
        assert!((c.lower.unwrap() - 3.8).abs() < 1e-12);
        let b = CylinderBundle::new(PI, Some(10.0)).unwrap();
        let c = b.lower_certificate(0.1, 2000, 0).unwrap();
        assert!((c.lower.unwrap() - (4.0 * PI - 0.2)).abs() < 1e-12);
        assert!(lower_map_h(1.0, 0.1, &[0.96, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn camel_pieces() {
        let a = 1.0;
        let g = camel_map_g(a, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], CamelPiece::Cylinder).unwrap();
        assert_eq!(g, vec![1.0, 0.0, 0.0, 0.0]);
        let top = camel_map_g(a, &[1.0, 0.3, a, 0.2, 0.1, 0.0], CamelPiece::Upper).unwrap();
        let cyl = camel_map_g(a, &[1.0, 0.3, a, 0.0, 0.1, 0.2], CamelPiece::Cylinder).unwrap();
        assert_eq!(top, cyl);
        assert!(camel_map_g(a, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], CamelPiece::Upper).is_err());
        assert!((camel_hole_constant::<f64>() - 4.0 * PI).abs() < 1e-15);
    }
}
