use super::scatter::table_candidates;
use super::search::CriticalOrbitReport;
use super::{
    disk_orbit, select_min, BilliardTable, BilliardTrajectory, CandidateFamily, ComponentLabel, MinActionResult,
    OrbitCandidate,
};
use crate::error::{domain, invalid, Result};
use crate::linalg::norm;
use crate::scalar::Real;

/// Cyclic inner/outer label words of length `2..=k_max` with at least one
/// inner bounce and no two cyclically adjacent inner bounces, one word per
/// rotation class (`true` marks the inner circle).
pub fn mixed_patterns(k_max: usize) -> Vec<Vec<bool>> {
    let mut out = Vec::new();
    for k in 2..=k_max {
        for mask in 1u32..(1 << k) {
            let word: Vec<bool> = (0..k).map(|i| mask >> i & 1 == 1).collect();
            if (0..k).any(|i| word[i] && word[(i + 1) % k]) {
                continue;
            }
            let canonical = (1..k).all(|r| {
                let rot: Vec<bool> = (0..k).map(|i| word[(i + r) % k]).collect();
                word <= rot
            });
            if canonical {
                out.push(word);
            }
        }
    }
    out
}

fn chain_of_angles<T: Real>(alphas: &[T]) -> BilliardTrajectory<T> {
    let mut theta = T::zero();
    let mut pts = Vec::with_capacity(alphas.len());
    for &a in alphas {
        pts.push(vec![theta.cos(), theta.sin()]);
        theta = theta + a;
    }
    let chord_lengths: Vec<T> = alphas.iter().map(|&a| (T::lit(2.0) * (T::one() - a.cos())).sqrt()).collect();
    let action = chord_lengths.iter().fold(T::zero(), |s, &l| s + l);
    BilliardTrajectory {
        bounce_points: pts,
        component_labels: vec![ComponentLabel::Outer; alphas.len()],
        central_angles: Some(alphas.to_vec()),
        chord_lengths,
        action,
    }
}

fn closes<T: Real>(k: usize, alpha: T) -> bool {
    let turns = T::from_count(k) * alpha / (T::PI() + T::PI());
    (turns - turns.round()).abs() <= T::lit(1e-9)
}

/// Minimal action of the Euclidean annulus billiard `D²(1) ∖ D²(δ)` over
/// radial, star-polygon, caustic-tangent and numerically found orbits with
/// at most `k_max` bounces. `δ = 0` is a point scatterer at the origin.
pub fn annulus_min_action<T: Real>(delta: T, k_max: usize) -> Result<MinActionResult<T>> {
    if !(delta >= T::zero() && delta < T::one()) {
        return Err(invalid(format!("delta must lie in [0, 1), got {delta}")));
    }
    if k_max < 2 {
        return Err(invalid("bounce budget must be at least 2"));
    }
    let table = BilliardTable::annulus(2, delta)?;
    let mut cands = Vec::new();

    let radial = BilliardTrajectory::new(
        vec![vec![T::one(), T::zero()], vec![delta, T::zero()]],
        vec![ComponentLabel::Outer, ComponentLabel::Obstacle(0)],
        &table.geometry,
    )?;
    cands.push(OrbitCandidate {
        family: CandidateFamily::Radial,
        k: 2,
        action: radial.action,
        closed: true,
        at_vertices: false,
        trajectory: radial,
    });

    for k in 2..=k_max {
        for m in 1..k {
            let Ok(orbit) = disk_orbit::<T>(k, m) else { continue };
            let clearance = T::lit(std::f64::consts::PI * m as f64 / k as f64).cos() - delta;
            let admissible = clearance >= -T::lit(1e-12) && (delta > T::zero() || clearance > T::lit(1e-12));
            if admissible {
                cands.push(OrbitCandidate {
                    family: CandidateFamily::StarPolygon,
                    k,
                    action: orbit.action,
                    closed: true,
                    at_vertices: false,
                    trajectory: orbit,
                });
            }
        }
        if delta > T::zero() {
            let alpha = (T::lit(2.0) * delta * delta - T::one()).acos();
            let traj = chain_of_angles(&vec![alpha; k]);
            cands.push(OrbitCandidate {
                family: CandidateFamily::CausticTangent,
                k,
                action: traj.action,
                closed: closes(k, alpha),
                at_vertices: false,
                trajectory: traj,
            });
        }
    }
    cands.extend(table_candidates(&table, k_max, 0)?);
    select_min(cands)
}

/// Closed-form value `2k√(1−δ²)` of the chord-length sum at its critical point.
pub fn caustic_action<T: Real>(delta: T, k: usize) -> T {
    T::lit(2.0 * k as f64) * (T::one() - delta * delta).sqrt()
}

/// Solves the stationarity system of
/// `L = Σ √(2(1−cos αᵢ)) − Σ λᵢ (cos αᵢ − 2δ² + 1 − bᵢ²)`
/// by Newton's method and checks `cos αᵢ = 2δ² − 1`.
///
/// The report carries `λᵢ` in `multipliers` and `bᵢ` in `slacks`; whether the
/// chords close up into a polygon is recorded in `invalid_reason`.
pub fn lagrange_critical_check<T: Real>(delta: T, k: usize, tol: T) -> Result<CriticalOrbitReport<T>> {
    if !(delta > T::zero() && delta < T::one()) || k < 2 {
        return Err(invalid("need delta in (0, 1) and k ≥ 2"));
    }
    let two = T::lit(2.0);
    let c = two * delta * delta - T::one();
    let residual = |z: &[T]| -> Vec<T> {
        let mut r = vec![T::zero(); 3 * k];
        for i in 0..k {
            let (a, l, b) = (z[i], z[k + i], z[2 * k + i]);
            let chord = (two * (T::one() - a.cos())).sqrt();
            r[i] = a.sin() / chord + l * a.sin();
            r[k + i] = a.cos() - c - b * b;
            r[2 * k + i] = two * b * l;
        }
        r
    };
    let jacobian = |z: &[T]| -> crate::linalg::Matrix<T> {
        let mut m = crate::linalg::Matrix::zeros(3 * k, 3 * k);
        for i in 0..k {
            let (a, l, b) = (z[i], z[k + i], z[2 * k + i]);
            // d/dα of sin α / √(2(1−cos α)) = d/dα cos(α/2)
            m[(i, i)] = -(a / two).sin() / two + l * a.cos();
            m[(i, k + i)] = a.sin();
            m[(k + i, i)] = -a.sin();
            m[(k + i, 2 * k + i)] = -two * b;
            m[(2 * k + i, k + i)] = two * b;
            m[(2 * k + i, 2 * k + i)] = two * l;
        }
        m
    };
    let mut z = vec![T::zero(); 3 * k];
    for i in 0..k {
        let a = T::lit(1.5) + T::lit(0.05) * T::from_count(i) / T::from_count(k);
        z[i] = a;
        z[k + i] = -T::one() / (two * (T::one() - a.cos())).sqrt();
        z[2 * k + i] = T::lit(1e-3);
    }
    let mut r = residual(&z);
    let mut rn = norm(&r);
    let mut iterations = 0;
    while rn > tol && iterations < 100 {
        iterations += 1;
        let rhs: Vec<T> = r.iter().map(|&v| -v).collect();
        let Some(d) = jacobian(&z).solve(&rhs) else { break };
        let mut step = T::one();
        let mut moved = false;
        for _ in 0..30 {
            let cand: Vec<T> = z.iter().zip(&d).map(|(&a, &b)| a + step * b).collect();
            let rc = residual(&cand);
            if norm(&rc) < rn {
                z = cand;
                r = rc;
                rn = norm(&r);
                moved = true;
                break;
            }
            step = step / two;
        }
        if !moved {
            break;
        }
    }
    let alphas = &z[..k];
    let in_range = alphas.iter().all(|&a| a > T::zero() && a < T::PI());
    if rn > tol || !in_range {
        return Err(domain(format!(
            "no admissible critical point for (δ, k) = ({delta}, {k}): residual {rn}, angles {:?}",
            alphas.iter().map(|a| a.to_f64_lossy()).collect::<Vec<_>>()
        )));
    }
    let trajectory = chain_of_angles(alphas);
    let closed = alphas.iter().all(|&a| closes(k, a));
    let invalid_reason = (!closed).then(|| {
        let turns = T::from_count(k) * alphas[0] / (T::PI() + T::PI());
        format!("chords do not close up: k·α/2π = {turns}")
    });
    Ok(CriticalOrbitReport {
        trajectory,
        gradient_norm: rn,
        multipliers: z[k..2 * k].to_vec(),
        slacks: z[2 * k..].to_vec(),
        converged: true,
        iterations,
        invalid_reason,
    })
}
