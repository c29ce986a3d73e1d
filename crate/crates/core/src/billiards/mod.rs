//! Closed (Minkowski) billiard trajectories and their action.
//!
//! A chord `v` of a trajectory in the table `K` costs `h_T(v)`, where `T` is
//! the geometry body (the Euclidean case is `T = ball(1)`). Point scatterers
//! reverse the direction of motion.

mod annulus;
mod scatter;
mod search;

pub use annulus::{annulus_min_action, caustic_action, lagrange_critical_check, mixed_patterns};
pub use scatter::{scatterer_min_action, table_min_action};
pub use search::{find_critical_orbit, reflection_angle_gap, CriticalOrbitReport, Slot};

use std::fmt;

use serde::Serialize;

use crate::convex::ConvexBody;
use crate::error::{invalid, Result};
use crate::linalg::{norm, sub};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub enum Obstacle<T = f64> {
    /// `δ·K` for the outer body `K`.
    ScaledCopy(T),
    Point(Vec<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BilliardTable<T = f64> {
    pub outer: ConvexBody<T>,
    pub obstacles: Vec<Obstacle<T>>,
    pub geometry: ConvexBody<T>,
}

impl<T: Real> BilliardTable<T> {
    pub fn new(outer: ConvexBody<T>, obstacles: Vec<Obstacle<T>>, geometry: ConvexBody<T>) -> Result<Self> {
        let n = outer.dim();
        if !(2..=3).contains(&n) || geometry.dim() != n {
            return Err(invalid("billiard tables must be planar or spatial with matching geometry"));
        }
        for (i, o) in obstacles.iter().enumerate() {
            match o {
                Obstacle::ScaledCopy(d) if !(*d > T::zero() && *d < T::one()) => {
                    return Err(invalid(format!("obstacle scale must lie in (0, 1), got {d}")));
                }
                Obstacle::Point(p) => {
                    if p.len() != n || outer.gauge(p)? >= T::one() {
                        return Err(invalid("point obstacles must lie strictly inside the table"));
                    }
                    let dup = obstacles[..i].iter().any(|q| matches!(q, Obstacle::Point(q) if q == p));
                    if dup {
                        return Err(invalid("point obstacles must be distinct"));
                    }
                }
                _ => {}
            }
        }
        Ok(Self { outer, obstacles, geometry })
    }

    /// Euclidean billiard in the annulus `Dⁿ(1) ∖ Dⁿ(δ)`; `δ = 0` is a point
    /// scatterer at the origin.
    pub fn annulus(dim: usize, delta: T) -> Result<Self> {
        let obstacle =
            if delta == T::zero() { Obstacle::Point(vec![T::zero(); dim]) } else { Obstacle::ScaledCopy(delta) };
        Self::new(ConvexBody::ball(dim, T::one())?, vec![obstacle], ConvexBody::ball(dim, T::one())?)
    }

    pub fn dim(&self) -> usize {
        self.outer.dim()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ComponentLabel {
    Outer,
    Obstacle(usize),
}

impl fmt::Display for ComponentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Outer => write!(f, "outer"),
            Self::Obstacle(i) => write!(f, "obstacle{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BilliardTrajectory<T = f64> {
    pub bounce_points: Vec<Vec<T>>,
    pub component_labels: Vec<ComponentLabel>,
    pub central_angles: Option<Vec<T>>,
    /// Euclidean lengths of the chords `q_{j+1} − q_j`.
    pub chord_lengths: Vec<T>,
    pub action: T,
}

impl<T: Real> BilliardTrajectory<T> {
    pub fn new(points: Vec<Vec<T>>, labels: Vec<ComponentLabel>, geometry: &ConvexBody<T>) -> Result<Self> {
        if labels.len() != points.len() {
            return Err(invalid("one component label per bounce point"));
        }
        let action = minkowski_action(geometry, &points)?;
        let k = points.len();
        let chord_lengths = (0..k).map(|j| norm(&sub(&points[(j + 1) % k], &points[j]))).collect();
        Ok(Self { bounce_points: points, component_labels: labels, central_angles: None, chord_lengths, action })
    }

    pub fn bounces(&self) -> usize {
        self.bounce_points.len()
    }

    /// Polar angle of the first outer bounce, used for tie-breaking.
    pub fn first_angle(&self) -> T {
        let idx = self.component_labels.iter().position(|l| *l == ComponentLabel::Outer).unwrap_or(0);
        let p = &self.bounce_points[idx];
        let a = p[1].atan2(p[0]);
        if a < T::zero() {
            a + T::PI() + T::PI()
        } else {
            a
        }
    }
}

/// How a candidate orbit was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateFamily {
    /// Outer ↔ inner along a ray.
    Radial,
    /// Explicit corner orbit of a polytope table.
    Corner,
    /// Scatterer ↔ boundary chains, traversed back and forth.
    ScattererChain,
    PointToPoint,
    /// Closed star polygon in the outer circle avoiding the obstacle.
    StarPolygon,
    /// Numerically found orbit with bounces on several components.
    Mixed,
    /// Numerically found orbit on the outer boundary only.
    PureBoundary,
    /// Formal critical point of the chord-length sum with every chord
    /// tangent to the inner circle; closes only for special `δ`.
    CausticTangent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitCandidate<T = f64> {
    pub family: CandidateFamily,
    pub k: usize,
    pub action: T,
    /// Whether the candidate is a genuine closed billiard trajectory.
    pub closed: bool,
    /// All boundary bounces sit at vertices of a polytope table.
    pub at_vertices: bool,
    pub trajectory: BilliardTrajectory<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinActionResult<T = f64> {
    pub value: T,
    pub trajectory: BilliardTrajectory<T>,
    pub family: CandidateFamily,
    pub candidates: Vec<OrbitCandidate<T>>,
}

/// Relative tolerance under which two actions count as tied.
pub const ACTION_TIE: f64 = 1e-9;

/// Deterministic argmin: action first; ties prefer corner orbits, then fewer
/// bounces, then family order, then the angle of the first bounce.
pub(crate) fn select_min<T: Real>(candidates: Vec<OrbitCandidate<T>>) -> Result<MinActionResult<T>> {
    let closed: Vec<&OrbitCandidate<T>> = candidates.iter().filter(|c| c.closed).collect();
    let min = closed.iter().map(|c| c.action).fold(T::infinity(), T::min);
    if !min.is_finite() {
        return Err(crate::error::domain("no closed orbit found"));
    }
    let tie = T::lit(ACTION_TIE) * min.abs().max(T::one());
    let best = closed
        .into_iter()
        .filter(|c| c.action <= min + tie)
        .min_by(|a, b| {
            (!a.at_vertices, a.k, a.family)
                .cmp(&(!b.at_vertices, b.k, b.family))
                .then(a.trajectory.first_angle().partial_cmp(&b.trajectory.first_angle()).unwrap())
        })
        .expect("nonempty")
        .clone();
    Ok(MinActionResult { value: best.action, trajectory: best.trajectory, family: best.family, candidates })
}

/// `Σⱼ h_T(q_{j+1} − q_j)` over the closed polygon.
pub fn minkowski_action<T: Real>(geometry: &ConvexBody<T>, polygon: &[Vec<T>]) -> Result<T> {
    if polygon.len() < 2 {
        return Err(invalid("a closed polygon needs at least 2 vertices"));
    }
    let k = polygon.len();
    let mut total = T::zero();
    for j in 0..k {
        let v = sub(&polygon[(j + 1) % k], &polygon[j]);
        if v.iter().all(|&c| c == T::zero()) {
            continue;
        }
        total = total + geometry.support(&v)?;
    }
    Ok(total)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The regular `(k, m)` star polygon inscribed in the unit circle.
pub fn disk_orbit<T: Real>(k: usize, m: usize) -> Result<BilliardTrajectory<T>> {
    let valid = k >= 2 && m >= 1 && gcd(k, m) == 1 && (2 * m < k || (k, m) == (2, 1));
    if !valid {
        return Err(invalid(format!("invalid rotation data (k, m) = ({k}, {m})")));
    }
    let step = T::lit(std::f64::consts::TAU * m as f64 / k as f64);
    let points: Vec<Vec<T>> = (0..k)
        .map(|j| {
            let a = step * T::from_count(j);
            vec![a.cos(), a.sin()]
        })
        .collect();
    let mut traj = BilliardTrajectory::new(points, vec![ComponentLabel::Outer; k], &ConvexBody::ball(2, T::one())?)?;
    traj.central_angles = Some(vec![step; k]);
    Ok(traj)
}

/// Closed form `2k sin(πm/k)`.
pub fn disk_orbit_action<T: Real>(k: usize, m: usize) -> T {
    T::lit(2.0 * k as f64) * T::lit(std::f64::consts::PI * m as f64 / k as f64).sin()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn action_examples() {
        let diamond = ConvexBody::<f64>::cross_polytope(2, 1.0).unwrap();
        let a = minkowski_action(&diamond, &[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(a, 2.0);
        let a = minkowski_action(&diamond, &[vec![-1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(a, 4.0);
        let ball = ConvexBody::<f64>::ball(2, 1.0).unwrap();
        let a = minkowski_action(&ball, &[vec![1.0, 0.0], vec![0.3, 0.0]]).unwrap();
        assert!((a - 1.4).abs() < 1e-15);
        assert!(minkowski_action(&ball, &[vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn disk_orbit_examples() {
        assert!((disk_orbit::<f64>(2, 1).unwrap().action - 4.0).abs() < 1e-14);
        assert!((disk_orbit::<f64>(3, 1).unwrap().action - 3.0 * 3f64.sqrt()).abs() < 1e-14);
        let s = disk_orbit::<f64>(5, 2).unwrap();
        assert!((s.action - 10.0 * (2.0 * std::f64::consts::PI / 5.0).sin()).abs() < 1e-13);
        assert!(disk_orbit::<f64>(4, 2).is_err());
        assert!(disk_orbit::<f64>(5, 3).is_err());
    }

    #[test]
    fn chord_length_matches_cosine_law() {
        let t = disk_orbit::<f64>(7, 3).unwrap();
        let alpha = t.central_angles.as_ref().unwrap()[0];
        for l in &t.chord_lengths {
            assert!((l - (2.0 * (1.0 - alpha.cos())).sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn table_validation() {
        let b = ConvexBody::<f64>::ball(2, 1.0).unwrap();
        let bad = BilliardTable::new(b.clone(), vec![Obstacle::Point(vec![1.0, 0.0])], b.clone());
        assert!(bad.is_err());
        let dup = vec![Obstacle::Point(vec![0.1, 0.0]), Obstacle::Point(vec![0.1, 0.0])];
        assert!(BilliardTable::new(b.clone(), dup, b.clone()).is_err());
        assert!(BilliardTable::new(b.clone(), vec![Obstacle::ScaledCopy(1.0)], b).is_err());
    }
}
