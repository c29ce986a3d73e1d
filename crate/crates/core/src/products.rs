//! Lagrangian products `A ×_L B ⊂ ℝⁿ × ℝⁿ` with the form `Σ dyᵢ∧dxᵢ`.
//!
//! Points are stored as `(x₁..xₙ, y₁..yₙ)`; `x` lives in the position factor
//! and `y` in the momentum factor.

use std::fmt;

use crate::convex::{boundary_tol, ConvexBody};
use crate::error::{invalid, Result};
use crate::linalg::{max_abs_diff, norm, Matrix};
use crate::sampling::SampleRng;
use crate::scalar::Real;
use crate::symplectic::{Chart, SymplecticMapSpec};

/// Tolerance for matching a removed fiber.
pub const PUNCTURE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum PositionFactor<T = f64> {
    Body(ConvexBody<T>),
    /// `K ∖ δK`; for `δ = 0` only the origin is removed.
    Annulus {
        outer: ConvexBody<T>,
        delta: T,
    },
    /// `K` minus the fibers over the listed points.
    Punctured {
        body: ConvexBody<T>,
        points: Vec<Vec<T>>,
    },
}

impl<T: Real> PositionFactor<T> {
    /// The convex hull of the factor.
    pub fn hull(&self) -> &ConvexBody<T> {
        match self {
            Self::Body(b) | Self::Annulus { outer: b, .. } | Self::Punctured { body: b, .. } => b,
        }
    }

    pub fn is_holed(&self) -> bool {
        !matches!(self, Self::Body(_))
    }

    pub fn contains(&self, x: &[T]) -> Result<bool> {
        let hull = self.hull();
        if !hull.contains(x)? {
            return Ok(false);
        }
        Ok(match self {
            Self::Body(_) => true,
            Self::Annulus { outer, delta } => {
                if *delta == T::zero() {
                    norm(x) > T::lit(PUNCTURE_TOL)
                } else {
                    outer.gauge(x)? >= *delta - boundary_tol::<T>()
                }
            }
            Self::Punctured { points, .. } => points.iter().all(|p| max_abs_diff(p, x) > T::lit(PUNCTURE_TOL)),
        })
    }
}

/// The named domains used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StandardId<T = f64> {
    DiskDisk(usize),
    CubeDiamond(usize),
    AnnulusDisk(usize, T),
    PuncturedCubeDiamond(usize),
    DiskSquare,
    ARDiamond(T),
    RectDiamond(T, T),
}

impl<T: Real> StandardId<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Self::DiskDisk(_) => "disk_disk",
            Self::CubeDiamond(_) => "cube_diamond",
            Self::AnnulusDisk(..) => "annulus_disk",
            Self::PuncturedCubeDiamond(_) => "punctured_cube_diamond",
            Self::DiskSquare => "disk_square",
            Self::ARDiamond(_) => "a_r_diamond",
            Self::RectDiamond(..) => "rect_diamond",
        }
    }

    /// Parses `name` with the given parameters. Missing dimension defaults to 2.
    pub fn parse(name: &str, n: Option<usize>, params: &[T]) -> Result<Self> {
        let n = n.unwrap_or(2);
        let need = |k: usize| -> Result<()> {
            if params.len() < k {
                return Err(invalid(format!("{name} needs {k} parameter(s)")));
            }
            Ok(())
        };
        Ok(match name {
            "disk_disk" => Self::DiskDisk(n),
            "cube_diamond" => Self::CubeDiamond(n),
            "annulus_disk" => {
                need(1)?;
                Self::AnnulusDisk(n, params[0])
            }
            "punctured_cube_diamond" => Self::PuncturedCubeDiamond(n),
            "disk_square" => Self::DiskSquare,
            "a_r_diamond" => {
                need(1)?;
                Self::ARDiamond(params[0])
            }
            "rect_diamond" => {
                need(2)?;
                Self::RectDiamond(params[0], params[1])
            }
            other => return Err(invalid(format!("unknown domain id {other:?}"))),
        })
    }
}

impl<T: Real> fmt::Display for StandardId<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DiskDisk(n) | Self::CubeDiamond(n) | Self::PuncturedCubeDiamond(n) => {
                write!(f, "{}({n})", self.name())
            }
            Self::AnnulusDisk(n, d) => write!(f, "annulus_disk({n}, {d})"),
            Self::DiskSquare => write!(f, "disk_square"),
            Self::ARDiamond(r) => write!(f, "a_r_diamond({r})"),
            Self::RectDiamond(a, b) => write!(f, "rect_diamond({a}, {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianProductDomain<T = f64> {
    position: PositionFactor<T>,
    momentum: ConvexBody<T>,
    id: Option<StandardId<T>>,
    citation: Option<&'static str>,
    scale: T,
}

impl<T: Real> LagrangianProductDomain<T> {
    pub fn new(position: PositionFactor<T>, momentum: ConvexBody<T>) -> Result<Self> {
        let n = position.hull().dim();
        if momentum.dim() != n {
            return Err(invalid(format!("factor dimensions differ: {n} vs {}", momentum.dim())));
        }
        match &position {
            PositionFactor::Annulus { delta, .. } if !(*delta >= T::zero() && *delta < T::one()) => {
                return Err(invalid(format!("delta must lie in [0, 1), got {delta}")));
            }
            PositionFactor::Punctured { body, points } => {
                for p in points {
                    if p.len() != n || !body.contains(p)? {
                        return Err(invalid("removed points must lie in the position factor"));
                    }
                }
            }
            _ => {}
        }
        Ok(Self { position, momentum, id: None, citation: None, scale: T::one() })
    }

    pub fn standard(id: StandardId<T>) -> Result<Self> {
        let one = T::one();
        let (position, momentum, citation) = match id {
            StandardId::DiskDisk(n) => {
                (PositionFactor::Body(ConvexBody::ball(n, one)?), ConvexBody::ball(n, one)?, "disk times disk")
            }
            StandardId::CubeDiamond(n) => (
                PositionFactor::Body(ConvexBody::unit_cube(n)?),
                ConvexBody::cross_polytope(n, one)?,
                "cube times diamond",
            ),
            StandardId::AnnulusDisk(n, delta) => (
                PositionFactor::Annulus { outer: ConvexBody::ball(n, one)?, delta },
                ConvexBody::ball(n, one)?,
                "holed disk times disk",
            ),
            StandardId::PuncturedCubeDiamond(n) => (
                PositionFactor::Punctured { body: ConvexBody::unit_cube(n)?, points: vec![vec![T::zero(); n]] },
                ConvexBody::cross_polytope(n, one)?,
                "punctured cube times diamond",
            ),
            StandardId::DiskSquare => {
                (PositionFactor::Body(ConvexBody::ball(2, one)?), ConvexBody::unit_cube(2)?, "disk times square")
            }
            StandardId::ARDiamond(r) => {
                if !(r > T::zero()) {
                    return Err(invalid(format!("r must be positive, got {r}")));
                }
                let v = |a: f64, b: f64| vec![T::lit(a), T::lit(b)];
                let verts = vec![v(0.0, 1.0), v(2.0, 1.0), v(2.0, -1.0), v(0.0, -1.0), vec![-r, T::zero()]];
                (
                    PositionFactor::Body(ConvexBody::polytope(verts)?),
                    ConvexBody::cross_polytope(2, one)?,
                    "pentagon times diamond",
                )
            }
            StandardId::RectDiamond(a, b) => (
                PositionFactor::Body(ConvexBody::cube(&[a, b])?),
                ConvexBody::cross_polytope(2, one)?,
                "rectangle times diamond",
            ),
        };
        let mut dom = Self::new(position, momentum)?;
        dom.id = Some(id);
        dom.citation = Some(citation);
        Ok(dom)
    }

    /// Parses an id string such as `annulus_disk`.
    pub fn from_id(name: &str, n: Option<usize>, params: &[T]) -> Result<Self> {
        Self::standard(StandardId::parse(name, n, params)?)
    }

    pub fn dim(&self) -> usize {
        self.momentum.dim()
    }

    pub fn position(&self) -> &PositionFactor<T> {
        &self.position
    }

    pub fn momentum(&self) -> &ConvexBody<T> {
        &self.momentum
    }

    pub fn id(&self) -> Option<StandardId<T>> {
        self.id
    }

    pub fn citation(&self) -> Option<&'static str> {
        self.citation
    }

    /// Overall dilation factor `μ` of `μ·X`.
    pub fn scale(&self) -> T {
        self.scale
    }

    /// `μ·X`, keeping the base description.
    pub fn scaled(&self, mu: T) -> Result<Self> {
        if !(mu > T::zero()) {
            return Err(invalid(format!("scale must be positive, got {mu}")));
        }
        let mut d = self.clone();
        d.scale = d.scale * mu;
        Ok(d)
    }

    pub fn contains_point(&self, z: &[T]) -> Result<bool> {
        let n = self.dim();
        if z.len() != 2 * n {
            return Err(invalid(format!("expected a point of length {}, got {}", 2 * n, z.len())));
        }
        let x: Vec<T> = z[..n].iter().map(|&c| c / self.scale).collect();
        let y: Vec<T> = z[n..].iter().map(|&c| c / self.scale).collect();
        Ok(self.position.contains(&x)? && self.momentum.contains(&y)?)
    }

    /// Uniform sample from the (scaled) domain by rejection.
    pub fn sample(&self, rng: &mut SampleRng) -> Vec<T> {
        loop {
            let mut z = self.position.hull().sample_interior(rng);
            z.extend(self.momentum.sample_interior(rng));
            for c in z.iter_mut() {
                *c = *c * self.scale;
            }
            if self.contains_point(&z).unwrap_or(false) {
                return z;
            }
        }
    }
}

impl<T: Real> fmt::Display for LagrangianProductDomain<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match &self.id {
            Some(id) => id.to_string(),
            None => {
                let pos = match &self.position {
                    PositionFactor::Body(b) => b.to_string(),
                    PositionFactor::Annulus { outer, delta } => format!("{outer}∖{delta}·{outer}"),
                    PositionFactor::Punctured { body, points } => format!("{body}∖{} fibers", points.len()),
                };
                format!("{pos} ×_L {}", self.momentum)
            }
        };
        if self.scale == T::one() {
            write!(f, "{base}")
        } else {
            write!(f, "{}·{base}", self.scale)
        }
    }
}

/// The linear symplectomorphism `(x, y) ↦ (t x, y / t)` with `t = √(b/a)`,
/// carrying `D(a) ×_L D(b)` onto `D(√(ab)) ×_L D(√(ab))`.
pub fn balance_stretch<T: Real>(n: usize, a: T, b: T) -> Result<SymplecticMapSpec<T>> {
    if !(a > T::zero() && b > T::zero()) {
        return Err(invalid("stretch lengths must be positive"));
    }
    let t = (b / a).sqrt();
    let diag: Vec<T> = (0..2 * n).map(|i| if i < n { t } else { T::one() / t }).collect();
    let jac = Matrix::from_diagonal(&diag);
    let d2 = diag.clone();
    Ok(SymplecticMapSpec::new("balance_stretch", Chart::cartesian(n), Chart::cartesian(n), move |q: &[T]| {
        q.iter().zip(&d2).map(|(&c, &s)| c * s).collect()
    })
    .with_jacobian(move |_| jac.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::shard_rng;

    #[test]
    fn standard_examples() {
        let d = LagrangianProductDomain::<f64>::standard(StandardId::DiskDisk(2)).unwrap();
        assert_eq!(d.dim(), 2);
        assert!(!d.position().is_holed());
        let a = LagrangianProductDomain::<f64>::standard(StandardId::AnnulusDisk(3, 0.3)).unwrap();
        assert!(a.position().is_holed());
        let p = LagrangianProductDomain::<f64>::standard(StandardId::ARDiamond(2.0)).unwrap();
        assert!(p.contains_point(&[-1.9, 0.0, 0.0, 0.0]).unwrap());
        assert!(!p.contains_point(&[-0.5, 0.9, 0.0, 0.0]).unwrap());
    }

    #[test]
    fn unknown_id_is_invalid() {
        assert!(LagrangianProductDomain::<f64>::from_id("torus", None, &[]).is_err());
        assert!(LagrangianProductDomain::<f64>::from_id("annulus_disk", None, &[]).is_err());
        assert!(LagrangianProductDomain::<f64>::from_id("annulus_disk", Some(2), &[1.0]).is_err());
    }

    #[test]
    fn membership_examples() {
        let p = LagrangianProductDomain::<f64>::standard(StandardId::PuncturedCubeDiamond(2)).unwrap();
        assert!(!p.contains_point(&[0.0, 0.0, 0.2, 0.3]).unwrap());
        assert!(p.contains_point(&[0.1, 0.0, 0.2, 0.3]).unwrap());
        let a = LagrangianProductDomain::<f64>::standard(StandardId::AnnulusDisk(2, 0.5)).unwrap();
        assert!(a.contains_point(&[0.7, 0.0, 0.0, 0.5]).unwrap());
        assert!(!a.contains_point(&[0.3, 0.0, 0.0, 0.5]).unwrap());
        let s = LagrangianProductDomain::<f64>::standard(StandardId::DiskSquare).unwrap();
        assert!(!s.contains_point(&[0.9, 0.9, 0.0, 0.0]).unwrap());
        assert!(s.contains_point(&[0.0, 0.0, 0.99, -0.99]).unwrap());
        assert!(s.contains_point(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn removed_points_must_be_inside() {
        let k = ConvexBody::<f64>::unit_cube(2).unwrap();
        let pos = PositionFactor::Punctured { body: k, points: vec![vec![2.0, 0.0]] };
        assert!(LagrangianProductDomain::new(pos, ConvexBody::cross_polytope(2, 1.0).unwrap()).is_err());
    }

    #[test]
    fn scaled_membership() {
        let d = LagrangianProductDomain::<f64>::standard(StandardId::DiskDisk(1)).unwrap().scaled(2.0).unwrap();
        assert!(d.contains_point(&[1.9, -1.9]).unwrap());
        assert!(!d.contains_point(&[2.1, 0.0]).unwrap());
    }

    #[test]
    fn samples_lie_in_the_domain() {
        let d = LagrangianProductDomain::<f64>::standard(StandardId::AnnulusDisk(2, 0.5)).unwrap();
        let mut rng = shard_rng(0, 0);
        for _ in 0..200 {
            assert!(d.contains_point(&d.sample(&mut rng)).unwrap());
        }
    }

    #[test]
    fn stretch_examples() {
        let id = balance_stretch(2, 1.0, 1.0).unwrap();
        assert_eq!(id.eval(&[1.0, 2.0, 3.0, 4.0]).unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
        let s = balance_stretch(1, 4.0, 1.0).unwrap();
        assert_eq!(s.eval(&[4.0, 1.0]).unwrap(), vec![2.0, 2.0]);
        assert_eq!(s.symplecticity_defect(&[0.3, 0.2]).unwrap(), 0.0);
        assert!(balance_stretch(1, 0.0, 1.0).is_err());
    }
}
