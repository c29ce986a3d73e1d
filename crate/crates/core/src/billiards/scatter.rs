use rayon::prelude::*;

use super::search::Problem;
use super::{
    select_min, BilliardTable, BilliardTrajectory, CandidateFamily, ComponentLabel, MinActionResult, Obstacle,
    OrbitCandidate, Slot,
};
use crate::convex::ConvexBody;
use crate::error::{invalid, Result};
use crate::linalg::norm;
use crate::scalar::Real;

/// Random starts per label pattern.
pub const STARTS_PER_PATTERN: usize = 32;

const SEARCH_TOL: f64 = 1e-9;

fn pattern_seed(slots: &[Slot]) -> u64 {
    // FNV-1a over the pattern, so seeds do not depend on the search budget
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in format!("{slots:?}").bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn boundary(param: usize) -> Slot {
    Slot::Boundary { label: ComponentLabel::Outer, param }
}

/// Label patterns searched on `table` with at most `k_max` bounces.
fn patterns<T: Real>(table: &BilliardTable<T>, k_max: usize) -> Vec<(CandidateFamily, Vec<Slot>)> {
    let mut out = Vec::new();
    let points: Vec<usize> =
        (0..table.obstacles.len()).filter(|&i| matches!(table.obstacles[i], Obstacle::Point(_))).collect();
    for k in 2..=k_max {
        out.push((CandidateFamily::PureBoundary, (0..k).map(boundary).collect()));
    }
    for &s in &points {
        // s → q₀ → … → q_j, turning at q_j and retracing
        for j in 0.. {
            if 2 * j + 2 > k_max {
                break;
            }
            let mut slots = vec![Slot::Fixed { obstacle: s }];
            slots.extend((0..=j).map(boundary));
            slots.extend((0..j).rev().map(boundary));
            out.push((CandidateFamily::ScattererChain, slots));
        }
        // s → q₀ … q_{j−1} → s', retracing back to s
        for &t in points.iter().filter(|&&t| t >= s) {
            for j in 1.. {
                if 2 * j + 2 > k_max {
                    break;
                }
                let mut slots = vec![Slot::Fixed { obstacle: s }];
                slots.extend((0..j).map(boundary));
                slots.push(Slot::Fixed { obstacle: t });
                slots.extend((0..j).rev().map(boundary));
                out.push((CandidateFamily::ScattererChain, slots));
            }
        }
    }
    if let Some(i) = table.obstacles.iter().position(|o| matches!(o, Obstacle::ScaledCopy(_))) {
        for bits in super::annulus::mixed_patterns(k_max) {
            let slots = bits
                .iter()
                .enumerate()
                .map(|(p, &inner)| Slot::Boundary {
                    label: if inner { ComponentLabel::Obstacle(i) } else { ComponentLabel::Outer },
                    param: p,
                })
                .collect();
            out.push((CandidateFamily::Mixed, slots));
        }
    }
    out
}

fn angles_of<T: Real>(v: &[T]) -> Vec<T> {
    let az = v[1].atan2(v[0]);
    if v.len() == 2 {
        vec![az]
    } else {
        vec![az, (v[2] / norm(v)).acos()]
    }
}

fn is_vertex<T: Real>(verts: &Option<Vec<Vec<T>>>, q: &[T]) -> bool {
    verts.as_ref().is_some_and(|vs| vs.iter().any(|v| crate::linalg::max_abs_diff(v, q) <= T::lit(1e-9)))
}

fn candidate<T: Real>(
    family: CandidateFamily,
    traj: BilliardTrajectory<T>,
    verts: &Option<Vec<Vec<T>>>,
) -> OrbitCandidate<T> {
    let at_vertices = verts.is_some()
        && traj
            .bounce_points
            .iter()
            .zip(&traj.component_labels)
            .all(|(q, l)| *l != ComponentLabel::Outer || is_vertex(verts, q));
    OrbitCandidate { family, k: traj.bounces(), action: traj.action, closed: true, at_vertices, trajectory: traj }
}

/// Multi-start critical-orbit search over every label pattern with at most
/// `k_max` bounces, plus explicit corner and scatterer-to-scatterer orbits.
pub fn table_min_action<T: Real>(table: &BilliardTable<T>, k_max: usize, seed: u64) -> Result<MinActionResult<T>> {
    select_min(table_candidates(table, k_max, seed)?)
}

pub(crate) fn table_candidates<T: Real>(
    table: &BilliardTable<T>,
    k_max: usize,
    seed: u64,
) -> Result<Vec<OrbitCandidate<T>>> {
    if k_max < 2 {
        return Err(invalid("bounce budget must be at least 2"));
    }
    let verts = table.outer.vertices();
    let tol = T::lit(SEARCH_TOL);
    let pats = patterns(table, k_max);
    let found: Vec<Vec<OrbitCandidate<T>>> = pats
        .par_iter()
        .map(|(family, slots)| {
            let problem = Problem::new(table, slots.clone()).expect("patterns are well formed");
            problem
                .multi_start(STARTS_PER_PATTERN, seed ^ pattern_seed(slots), tol)
                .into_iter()
                .map(|r| candidate(*family, r.trajectory, &verts))
                .collect()
        })
        .collect();
    let mut out: Vec<OrbitCandidate<T>> = found.into_iter().flatten().collect();

    let points: Vec<(usize, &Vec<T>)> = table
        .obstacles
        .iter()
        .enumerate()
        .filter_map(|(i, o)| match o {
            Obstacle::Point(p) => Some((i, p)),
            Obstacle::ScaledCopy(_) => None,
        })
        .collect();
    // scatterer ↔ scatterer
    for (a, &(i, _)) in points.iter().enumerate() {
        for &(j, _) in &points[a + 1..] {
            let slots = vec![Slot::Fixed { obstacle: i }, Slot::Fixed { obstacle: j }];
            let p = Problem::new(table, slots)?;
            let r = p.report(&[], T::zero(), true, 0);
            if r.invalid_reason.is_none() {
                out.push(candidate(CandidateFamily::PointToPoint, r.trajectory, &verts));
            }
        }
    }
    // corner orbits, evaluated rather than optimized through
    if let Some(vs) = &verts {
        for &(i, _) in &points {
            for v in vs {
                let slots = vec![Slot::Fixed { obstacle: i }, boundary(0)];
                let p = Problem::new(table, slots)?;
                let r = p.report(&angles_of(v), T::zero(), true, 0);
                if r.invalid_reason.is_none() {
                    let mut traj = r.trajectory;
                    traj.bounce_points[1] = v.clone();
                    let traj = BilliardTrajectory::new(traj.bounce_points, traj.component_labels, &table.geometry)?;
                    out.push(candidate(CandidateFamily::Corner, traj, &verts));
                }
            }
        }
    }
    Ok(out)
}

/// Minimal action of the table `outer` with point scatterers at `x_points`
/// and geometry `geometry`.
pub fn scatterer_min_action<T: Real>(
    x_points: &[Vec<T>],
    outer: &ConvexBody<T>,
    geometry: &ConvexBody<T>,
    k_max: usize,
) -> Result<MinActionResult<T>> {
    if x_points.is_empty() {
        return Err(invalid("at least one scatterer is required"));
    }
    let obstacles = x_points.iter().cloned().map(Obstacle::Point).collect();
    let table = BilliardTable::new(outer.clone(), obstacles, geometry.clone())?;
    table_min_action(&table, k_max, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_scatterers() {
        let disk = ConvexBody::<f64>::ball(2, 1.0).unwrap();
        for k in [2.0, 10.0] {
            let pts = vec![vec![(k - 1.0) / k, 0.0], vec![(1.0 - k) / k, 0.0]];
            let r = scatterer_min_action(&pts, &disk, &disk, 4).unwrap();
            assert!((r.value - 2.0 / k).abs() < 1e-9, "{k}: {}", r.value);
            assert_eq!(r.family, CandidateFamily::ScattererChain);
        }
    }

    #[test]
    fn centered_scatterer() {
        let disk = ConvexBody::<f64>::ball(2, 1.0).unwrap();
        let r = scatterer_min_action(&[vec![0.0, 0.0]], &disk, &disk, 4).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn punctured_square_prefers_the_half_diagonal() {
        let sq = ConvexBody::<f64>::unit_cube(2).unwrap();
        let dia = ConvexBody::<f64>::cross_polytope(2, 1.0).unwrap();
        let r = scatterer_min_action(&[vec![0.0, 0.0]], &sq, &dia, 4).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        assert_eq!(r.family, CandidateFamily::Corner);
        let q = &r.trajectory.bounce_points[1];
        assert!((q[0].abs() - 1.0).abs() < 1e-12 && (q[1].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_scatterers_rejected() {
        let disk = ConvexBody::<f64>::ball(2, 1.0).unwrap();
        assert!(scatterer_min_action(&[], &disk, &disk, 4).is_err());
    }
}
