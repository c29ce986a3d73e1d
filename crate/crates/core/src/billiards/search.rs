use rayon::prelude::*;
use serde::Serialize;

use super::{BilliardTable, BilliardTrajectory, ComponentLabel, Obstacle};
use crate::convex::{compass_search, sphere_point, BodyKind, ConvexBody};
use crate::error::{invalid, Result};
use crate::linalg::{dot, norm, scaled, sub, Matrix};
use crate::sampling::{shard_rng, uniform, SampleRng};
use crate::scalar::Real;

const MAX_ITER: usize = 200;
const HESSIAN_STEP: f64 = 1e-6;
const CHORD_MIN: f64 = 1e-9;
const REFLECTION_TOL: f64 = 1e-6;

/// One bounce of a trajectory pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Slot {
    /// A point on a boundary component, described by the angle block `param`.
    Boundary { label: ComponentLabel, param: usize },
    /// A point scatterer (obstacle index).
    Fixed { obstacle: usize },
}

impl Slot {
    pub fn label(&self) -> ComponentLabel {
        match *self {
            Slot::Boundary { label, .. } => label,
            Slot::Fixed { obstacle } => ComponentLabel::Obstacle(obstacle),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalOrbitReport<T = f64> {
    pub trajectory: BilliardTrajectory<T>,
    pub gradient_norm: T,
    /// Size of the momentum jump `|p_in − p_out|` at each bounce.
    pub multipliers: Vec<T>,
    /// Clearance of each chord from the obstacles (empty without obstacles).
    pub slacks: Vec<T>,
    pub converged: bool,
    pub iterations: usize,
    /// Reason the orbit is not an admissible billiard trajectory, if any.
    pub invalid_reason: Option<String>,
}

impl<T> CriticalOrbitReport<T> {
    pub fn is_admissible(&self) -> bool {
        self.converged && self.invalid_reason.is_none()
    }
}

pub(crate) struct Problem<'a, T: Real> {
    pub table: &'a BilliardTable<T>,
    pub slots: Vec<Slot>,
    pub n_params: usize,
}

impl<'a, T: Real> Problem<'a, T> {
    pub fn new(table: &'a BilliardTable<T>, slots: Vec<Slot>) -> Result<Self> {
        if slots.len() < 2 {
            return Err(invalid("a closed orbit needs at least 2 bounces"));
        }
        let mut n_params = 0;
        for s in &slots {
            match *s {
                Slot::Boundary { label, param } => {
                    if let ComponentLabel::Obstacle(i) = label {
                        if !matches!(table.obstacles.get(i), Some(Obstacle::ScaledCopy(_))) {
                            return Err(invalid(format!("obstacle {i} is not a boundary component")));
                        }
                    }
                    n_params = n_params.max(param + 1);
                }
                Slot::Fixed { obstacle } => {
                    if !matches!(table.obstacles.get(obstacle), Some(Obstacle::Point(_))) {
                        return Err(invalid(format!("obstacle {obstacle} is not a point scatterer")));
                    }
                }
            }
        }
        Ok(Self { table, slots, n_params })
    }

    fn block(&self) -> usize {
        self.table.dim() - 1
    }

    pub fn param_len(&self) -> usize {
        self.n_params * self.block()
    }

    fn scale_of(&self, label: ComponentLabel) -> T {
        match label {
            ComponentLabel::Outer => T::one(),
            ComponentLabel::Obstacle(i) => match &self.table.obstacles[i] {
                Obstacle::ScaledCopy(d) => *d,
                Obstacle::Point(_) => T::zero(),
            },
        }
    }

    fn boundary_point(&self, label: ComponentLabel, angles: &[T]) -> Vec<T> {
        let u = sphere_point(self.table.dim(), angles);
        let g = self.table.outer.gauge_unchecked(&u);
        scaled(&u, self.scale_of(label) / g)
    }

    /// Derivatives of the boundary point with respect to its angles.
    fn tangents(&self, label: ComponentLabel, angles: &[T]) -> Vec<Vec<T>> {
        let dim = self.table.dim();
        if let BodyKind::Ball { radius } = self.table.outer.kind() {
            let r = *radius * self.scale_of(label);
            return if dim == 2 {
                vec![vec![-r * angles[0].sin(), r * angles[0].cos()]]
            } else {
                let (az, pol) = (angles[0], angles[1]);
                vec![
                    vec![-r * pol.sin() * az.sin(), r * pol.sin() * az.cos(), T::zero()],
                    vec![r * pol.cos() * az.cos(), r * pol.cos() * az.sin(), -r * pol.sin()],
                ]
            };
        }
        let h = T::lit(1e-7);
        (0..angles.len())
            .map(|a| {
                let mut p = angles.to_vec();
                let mut m = angles.to_vec();
                p[a] = p[a] + h;
                m[a] = m[a] - h;
                let qp = self.boundary_point(label, &p);
                let qm = self.boundary_point(label, &m);
                qp.iter().zip(&qm).map(|(&x, &y)| (x - y) / (h + h)).collect()
            })
            .collect()
    }

    fn angles<'p>(&self, params: &'p [T], param: usize) -> &'p [T] {
        let b = self.block();
        &params[param * b..(param + 1) * b]
    }

    pub fn points(&self, params: &[T]) -> Vec<Vec<T>> {
        self.slots
            .iter()
            .map(|s| match *s {
                Slot::Boundary { label, param } => self.boundary_point(label, self.angles(params, param)),
                Slot::Fixed { obstacle } => match &self.table.obstacles[obstacle] {
                    Obstacle::Point(p) => p.clone(),
                    Obstacle::ScaledCopy(_) => unreachable!("checked in Problem::new"),
                },
            })
            .collect()
    }

    fn momentum(&self, v: &[T]) -> Vec<T> {
        if v.iter().all(|&c| c == T::zero()) {
            return vec![T::zero(); v.len()];
        }
        self.table.geometry.support_point(v).expect("dimension checked")
    }

    /// Momentum jumps `p_in − p_out` at each bounce.
    fn jumps(&self, pts: &[Vec<T>]) -> Vec<Vec<T>> {
        let k = pts.len();
        (0..k)
            .map(|j| {
                let p_in = self.momentum(&sub(&pts[j], &pts[(j + k - 1) % k]));
                let p_out = self.momentum(&sub(&pts[(j + 1) % k], &pts[j]));
                sub(&p_in, &p_out)
            })
            .collect()
    }

    pub fn action(&self, params: &[T]) -> T {
        let pts = self.points(params);
        let k = pts.len();
        (0..k).fold(T::zero(), |s, j| {
            let v = sub(&pts[(j + 1) % k], &pts[j]);
            if v.iter().all(|&c| c == T::zero()) {
                s
            } else {
                s + self.table.geometry.support_unchecked(&v)
            }
        })
    }

    pub fn gradient(&self, params: &[T]) -> Vec<T> {
        let pts = self.points(params);
        let jumps = self.jumps(&pts);
        let b = self.block();
        let mut grad = vec![T::zero(); self.param_len()];
        for (j, s) in self.slots.iter().enumerate() {
            if let Slot::Boundary { label, param } = *s {
                for (a, t) in self.tangents(label, self.angles(params, param)).iter().enumerate() {
                    grad[param * b + a] = grad[param * b + a] + dot(&jumps[j], t);
                }
            }
        }
        grad
    }

    fn hessian(&self, params: &[T]) -> Matrix<T> {
        let n = params.len();
        let h = T::lit(HESSIAN_STEP);
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            let mut p = params.to_vec();
            let mut q = params.to_vec();
            p[j] = p[j] + h;
            q[j] = q[j] - h;
            let gp = self.gradient(&p);
            let gq = self.gradient(&q);
            for i in 0..n {
                m[(i, j)] = (gp[i] - gq[i]) / (h + h);
            }
        }
        let half = T::lit(0.5);
        let t = m.transpose();
        let mut s = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                s[(i, j)] = half * (m[(i, j)] + t[(i, j)]);
            }
        }
        s
    }

    /// Damped Newton on `∇A = 0` with Levenberg–Marquardt regularization and
    /// a backtracking descent step on `A` when the damped step stalls.
    pub fn solve(&self, init: &[T], tol: T) -> (Vec<T>, T, bool, usize) {
        let mut x = init.to_vec();
        let mut g = self.gradient(&x);
        let mut gn = norm(&g);
        if x.is_empty() {
            return (x, T::zero(), true, 0);
        }
        let mut mu = T::lit(1e-10);
        for it in 0..MAX_ITER {
            if gn <= tol {
                return (x, gn, true, it);
            }
            let h = self.hessian(&x);
            let hth = h.transpose().matmul(&h);
            let rhs: Vec<T> = h.transpose().matvec(&g).into_iter().map(|c| -c).collect();
            let mut accepted = false;
            for _ in 0..16 {
                let mut a = hth.clone();
                let diag_scale = (0..a.rows()).fold(T::zero(), |m, i| m.max(a[(i, i)])).max(T::lit(1e-12));
                for i in 0..a.rows() {
                    a[(i, i)] = a[(i, i)] + mu * diag_scale;
                }
                if let Some(d) = a.solve(&rhs) {
                    let cand: Vec<T> = x.iter().zip(&d).map(|(&a, &b)| a + b).collect();
                    let gc = self.gradient(&cand);
                    let gcn = norm(&gc);
                    if gcn < gn {
                        x = cand;
                        g = gc;
                        gn = gcn;
                        mu = (mu / T::lit(10.0)).max(T::lit(1e-14));
                        accepted = true;
                        break;
                    }
                }
                mu = mu * T::lit(10.0);
            }
            if !accepted {
                mu = T::lit(1e-10);
                // descent on the action itself
                let a0 = self.action(&x);
                let mut step = T::one();
                let mut moved = false;
                for _ in 0..40 {
                    let cand: Vec<T> = x.iter().zip(&g).map(|(&a, &b)| a - step * b).collect();
                    if self.action(&cand) < a0 - T::lit(1e-4) * step * gn * gn {
                        x = cand;
                        g = self.gradient(&x);
                        gn = norm(&g);
                        moved = true;
                        break;
                    }
                    step = step / T::lit(2.0);
                }
                if !moved {
                    return (x, gn, false, it + 1);
                }
            }
        }
        (x, gn, gn <= tol, MAX_ITER)
    }

    /// Builds the report for the parameter vector `params`.
    pub fn report(&self, params: &[T], gradient_norm: T, converged: bool, iterations: usize) -> CriticalOrbitReport<T> {
        let pts = self.points(params);
        let labels: Vec<ComponentLabel> = self.slots.iter().map(Slot::label).collect();
        let jumps = self.jumps(&pts);
        let multipliers = jumps.iter().map(|j| norm(j)).collect();
        let slacks = self.chord_clearances(&pts);
        let invalid_reason = self.check(&pts, &jumps, &slacks);
        let trajectory = BilliardTrajectory::new(pts, labels, &self.table.geometry).expect("at least two bounces");
        CriticalOrbitReport { trajectory, gradient_norm, multipliers, slacks, converged, iterations, invalid_reason }
    }

    fn chord_clearances(&self, pts: &[Vec<T>]) -> Vec<T> {
        if self.table.obstacles.is_empty() {
            return Vec::new();
        }
        let k = pts.len();
        (0..k)
            .map(|j| {
                let (a, b) = (&pts[j], &pts[(j + 1) % k]);
                self.table
                    .obstacles
                    .iter()
                    .map(|o| match o {
                        Obstacle::ScaledCopy(d) => min_gauge_on_segment(&self.table.outer, a, b) - *d,
                        Obstacle::Point(p) => {
                            if p == a || p == b {
                                T::infinity()
                            } else {
                                segment_distance(p, a, b)
                            }
                        }
                    })
                    .fold(T::infinity(), T::min)
            })
            .collect()
    }

    fn check(&self, pts: &[Vec<T>], jumps: &[Vec<T>], clearances: &[T]) -> Option<String> {
        let k = pts.len();
        let tol = T::lit(REFLECTION_TOL);
        for j in 0..k {
            if norm(&sub(&pts[(j + 1) % k], &pts[j])) <= T::lit(CHORD_MIN) {
                return Some(format!("chord {j} has zero length"));
            }
        }
        for (j, c) in clearances.iter().enumerate() {
            if *c < -T::lit(1e-9) {
                return Some(format!("chord {j} crosses an obstacle"));
            }
        }
        for (j, s) in self.slots.iter().enumerate() {
            match *s {
                Slot::Boundary { label, .. } => {
                    let w = &jumps[j];
                    let wn = norm(w);
                    if wn <= T::lit(CHORD_MIN) {
                        return Some(format!("bounce {j} does not turn"));
                    }
                    let w = scaled(w, T::one() / wn);
                    let (dir, scale) = match label {
                        ComponentLabel::Outer => (w, T::one()),
                        ComponentLabel::Obstacle(_) => (scaled(&w, -T::one()), self.scale_of(label)),
                    };
                    let residual = scale * self.table.outer.support_unchecked(&dir) - dot(&dir, &pts[j]);
                    if residual > tol {
                        return Some(format!("reflection law fails at bounce {j} (residual {residual})"));
                    }
                }
                Slot::Fixed { .. } => {
                    let a = sub(&pts[(j + k - 1) % k], &pts[j]);
                    let b = sub(&pts[(j + 1) % k], &pts[j]);
                    let gap = norm(&sub(&scaled(&a, T::one() / norm(&a)), &scaled(&b, T::one() / norm(&b))));
                    if gap > tol {
                        return Some(format!("scatterer {j} does not reverse the direction"));
                    }
                }
            }
        }
        None
    }

    pub fn random_init(&self, rng: &mut SampleRng) -> Vec<T> {
        let dim = self.table.dim();
        let tau = T::PI() + T::PI();
        (0..self.n_params)
            .flat_map(|_| {
                let az = uniform(rng, T::zero(), tau);
                if dim == 2 {
                    vec![az]
                } else {
                    let c: T = uniform(rng, -T::lit(0.98), T::lit(0.98));
                    vec![az, c.acos()]
                }
            })
            .collect()
    }

    /// Solves from `starts` seeded random initial angles in parallel and
    /// returns the admissible orbits in start order.
    pub fn multi_start(&self, starts: usize, seed: u64, tol: T) -> Vec<CriticalOrbitReport<T>> {
        (0..starts)
            .into_par_iter()
            .map(|s| {
                let mut rng = shard_rng(seed, s as u64);
                let init = self.random_init(&mut rng);
                let (x, gn, ok, it) = self.solve(&init, tol);
                self.report(&x, gn, ok, it)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .filter(CriticalOrbitReport::is_admissible)
            .collect()
    }
}

/// Minimum of the (convex) gauge along a segment by golden-section search.
fn min_gauge_on_segment<T: Real>(body: &ConvexBody<T>, a: &[T], b: &[T]) -> T {
    let at = |t: T| -> T {
        let x: Vec<T> = a.iter().zip(b).map(|(&p, &q)| p + t * (q - p)).collect();
        body.gauge_unchecked(&x)
    };
    let f = |t: &[T]| at(t[0].max(T::zero()).min(T::one()));
    let (best, _) = compass_search(&f, vec![T::lit(0.5)], f(&[T::lit(0.5)]), T::lit(0.25), T::lit(1e-12));
    best.min(at(T::zero())).min(at(T::one()))
}

fn segment_distance<T: Real>(p: &[T], a: &[T], b: &[T]) -> T {
    let ab = sub(b, a);
    let len2 = dot(&ab, &ab);
    let t = if len2 == T::zero() { T::zero() } else { (dot(&sub(p, a), &ab) / len2).max(T::zero()).min(T::one()) };
    let c: Vec<T> = a.iter().zip(&ab).map(|(&x, &d)| x + t * d).collect();
    norm(&sub(p, &c))
}

/// Newton search for a critical orbit with independent bounce parameters.
///
/// `init` holds one angle per bounce on a boundary component in the plane,
/// or an (azimuth, polar) pair in space; point scatterers take no angles.
pub fn find_critical_orbit<T: Real>(
    table: &BilliardTable<T>,
    k: usize,
    labels: &[ComponentLabel],
    init: &[T],
    tol: T,
) -> Result<CriticalOrbitReport<T>> {
    if k < 2 || labels.len() != k {
        return Err(invalid("need k ≥ 2 and one label per bounce"));
    }
    let mut slots = Vec::with_capacity(k);
    let mut next = 0;
    for &l in labels {
        match l {
            ComponentLabel::Obstacle(i) if matches!(table.obstacles.get(i), Some(Obstacle::Point(_))) => {
                slots.push(Slot::Fixed { obstacle: i });
            }
            _ => {
                slots.push(Slot::Boundary { label: l, param: next });
                next += 1;
            }
        }
    }
    let problem = Problem::new(table, slots)?;
    if init.len() != problem.param_len() {
        return Err(invalid(format!("expected {} initial angles, got {}", problem.param_len(), init.len())));
    }
    let (x, gn, ok, it) = problem.solve(init, tol);
    Ok(problem.report(&x, gn, ok, it))
}

/// Largest difference between incidence and reflection angles (Euclidean
/// law) over the boundary bounces of a trajectory in `table`.
pub fn reflection_angle_gap<T: Real>(table: &BilliardTable<T>, traj: &BilliardTrajectory<T>) -> T {
    let pts = &traj.bounce_points;
    let k = pts.len();
    let mut worst = T::zero();
    for j in 0..k {
        let (n, sign) = match traj.component_labels[j] {
            ComponentLabel::Outer => (table.outer.outer_normal(&pts[j]), T::one()),
            ComponentLabel::Obstacle(i) => match &table.obstacles[i] {
                Obstacle::ScaledCopy(d) => (table.outer.outer_normal(&scaled(&pts[j], T::one() / *d)), -T::one()),
                Obstacle::Point(_) => continue,
            },
        };
        let Ok(n) = n else { continue };
        let n = scaled(&n, sign);
        let inc = sub(&pts[j], &pts[(j + k - 1) % k]);
        let out = sub(&pts[(j + 1) % k], &pts[j]);
        let angle = |v: &[T]| (dot(v, &n) / norm(v)).max(-T::one()).min(T::one()).acos();
        let a_in = angle(&inc);
        let a_out = T::PI() - angle(&out);
        worst = worst.max((a_in - a_out).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::billiards::Obstacle;

    fn disk() -> BilliardTable<f64> {
        let b = ConvexBody::ball(2, 1.0).unwrap();
        BilliardTable::new(b.clone(), vec![], b).unwrap()
    }

    #[test]
    fn disk_two_bounce_is_a_diameter() {
        let r = find_critical_orbit(&disk(), 2, &[ComponentLabel::Outer; 2], &[0.3, 2.0], 1e-9).unwrap();
        assert!(r.converged && r.gradient_norm <= 1e-9, "{r:?}");
        assert!((r.trajectory.action - 4.0).abs() < 1e-9);
        assert!(reflection_angle_gap(&disk(), &r.trajectory) < 1e-6);
    }

    #[test]
    fn annulus_radial_orbit() {
        let t = BilliardTable::<f64>::annulus(2, 0.5).unwrap();
        let labels = [ComponentLabel::Outer, ComponentLabel::Obstacle(0)];
        let r = find_critical_orbit(&t, 2, &labels, &[0.2, 0.3], 1e-9).unwrap();
        assert!(r.is_admissible(), "{r:?}");
        assert!((r.trajectory.action - 1.0).abs() < 1e-9);
    }

    #[test]
    fn square_with_diamond_geometry() {
        let sq = ConvexBody::unit_cube(2).unwrap();
        let t = BilliardTable::new(sq, vec![], ConvexBody::cross_polytope(2, 1.0).unwrap()).unwrap();
        // angles pointing slightly above the positive and negative x-axis
        let r =
            find_critical_orbit(&t, 2, &[ComponentLabel::Outer; 2], &[0.1, std::f64::consts::PI - 0.1], 1e-9).unwrap();
        assert!(r.is_admissible(), "{r:?}");
        assert!((r.trajectory.action - 4.0).abs() < 1e-12);
    }

    #[test]
    fn scatterer_chain_reverses() {
        let b = ConvexBody::<f64>::ball(2, 1.0).unwrap();
        let t = BilliardTable::new(b.clone(), vec![Obstacle::Point(vec![0.5, 0.0])], b).unwrap();
        let labels = [ComponentLabel::Obstacle(0), ComponentLabel::Outer];
        let r = find_critical_orbit(&t, 2, &labels, &[0.4], 1e-9).unwrap();
        assert!(r.is_admissible(), "{r:?}");
        assert!((r.trajectory.action - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bad_init_length() {
        assert!(find_critical_orbit(&disk(), 2, &[ComponentLabel::Outer; 2], &[0.3], 1e-9).is_err());
    }
}
