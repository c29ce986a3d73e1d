use serde_json::{json, Value};
use symcap::billiards::{
    annulus_min_action, find_critical_orbit, reflection_angle_gap, table_min_action, CandidateFamily, ComponentLabel,
    MinActionResult, Obstacle,
};
use symcap::capacities::{annulus_squeeze_map, factor_swap_map, upper_bound_biran_cube, CapacityOptions};
use symcap::cotangent::{cylinder_report, verify_camel, CylinderBundle};
use symcap::io::{parse_body, parse_domain, trajectories_csv};
use symcap::rearrangements::{verify_sigma, RectToDisk, SigmaMap};
use symcap::sampling::{uniform, SampleRng};
use symcap::symplectic::{verify_map as verify_spec, SymplecticMapSpec, VerificationReport};
use symcap::{capacity_of_with, BilliardTable, ConvexBody, DomainF64, StandardId, VolumeMethod};

use crate::args::{
    BilliardArgs, CapacityArgs, CylinderArgs, GlobalArgs, MapKind, TableKind, VerifyMapArgs, VolumeArgs,
};
use crate::output::{load, value, CliError, Outcome};

type Res<T> = Result<T, CliError>;

/// Reference value of a standard domain, where one is known.
pub fn expected_value(id: StandardId<f64>) -> Option<f64> {
    match id {
        StandardId::DiskDisk(_) | StandardId::CubeDiamond(_) | StandardId::DiskSquare => Some(4.0),
        StandardId::AnnulusDisk(_, d) => Some(2.0 * (1.0 - d)),
        StandardId::PuncturedCubeDiamond(_) => Some(2.0),
        StandardId::ARDiamond(_) | StandardId::RectDiamond(..) => None,
    }
}

fn missing(flag: &str, id: &str) -> CliError {
    CliError::Core(symcap::Error::InvalidArgument(format!("{id} needs --{flag}")))
}

pub fn capacity_options(eps: f64, k_max: usize, g: &GlobalArgs) -> CapacityOptions<f64> {
    CapacityOptions { eps, samples: g.samples, tol: g.tol, seed: g.seed, k_max }
}

pub fn capacity(a: &CapacityArgs, g: &GlobalArgs) -> Res<Outcome> {
    let dom: DomainF64 = match (&a.domain_file, a.id.as_ref().or(a.domain.as_ref())) {
        (Some(path), _) => load(path, parse_domain)?,
        (None, Some(id)) => {
            let params = match id.as_str() {
                "annulus_disk" => vec![a.delta.ok_or_else(|| missing("delta", id))?],
                "a_r_diamond" => vec![a.r.ok_or_else(|| missing("r", id))?],
                "rect_diamond" => vec![a.a.ok_or_else(|| missing("a", id))?, a.b.ok_or_else(|| missing("b", id))?],
                _ => vec![],
            };
            DomainF64::from_id(id, a.n, &params)?
        }
        (None, None) => return Err(CliError::Input("give a domain id or --domain-file".into())),
    };
    let iv = capacity_of_with(&dom, &capacity_options(a.eps, a.k_max, g))?;
    let expected = dom.id().and_then(expected_value).map(|e| e * dom.scale() * dom.scale());
    let resolved = iv.lower.is_finite() && iv.upper.is_finite() && iv.lower <= iv.upper;
    let pass = resolved && expected.is_none_or(|e| iv.lower <= e + g.tol && e <= iv.upper + g.tol);
    let result = json!({
        "domain": dom.to_string(),
        "expected": expected,
        "lower": iv.lower,
        "upper": iv.upper,
        "width": iv.width(),
        "a_min": iv.a_min,
        "certificates": value(&iv.certificates),
    });
    Ok(Outcome::new("capacity", result, pass))
}

fn angles_of(q: &[f64]) -> Vec<f64> {
    let az = q[1].atan2(q[0]);
    if q.len() == 2 {
        vec![az]
    } else {
        let r = q.iter().map(|c| c * c).sum::<f64>().sqrt();
        vec![az, (q[2] / r).acos()]
    }
}

/// Gradient norm of the action at the argmin, by re-solving from its
/// bounce points; `None` at corners or when the solve drifts away.
fn gradient_norm(table: &BilliardTable<f64>, best: &MinActionResult<f64>) -> Option<f64> {
    if best.family == CandidateFamily::Corner {
        return None;
    }
    let traj = &best.trajectory;
    let init: Vec<f64> = traj
        .bounce_points
        .iter()
        .zip(&traj.component_labels)
        .filter(|(_, l)| match l {
            ComponentLabel::Outer => true,
            ComponentLabel::Obstacle(i) => matches!(table.obstacles[*i], Obstacle::ScaledCopy(_)),
        })
        .flat_map(|(q, _)| angles_of(q))
        .collect();
    let rep = find_critical_orbit(table, traj.bounces(), &traj.component_labels, &init, 1e-9).ok()?;
    let close = (rep.trajectory.action - best.value).abs() <= 1e-9 * best.value.abs().max(1.0);
    (rep.converged && close).then_some(rep.gradient_norm)
}

pub fn billiard(a: &BilliardArgs, g: &GlobalArgs) -> Res<Outcome> {
    let (name, table, best) = match a.table {
        TableKind::Annulus => {
            // rotationally symmetric: the planar section carries the minimum
            let table = BilliardTable::annulus(2, a.delta)?;
            ("annulus", table, annulus_min_action(a.delta, a.k_max)?)
        }
        TableKind::PuncturedCube => {
            let table = BilliardTable::new(
                ConvexBody::unit_cube(a.n)?,
                vec![Obstacle::Point(vec![0.0; a.n])],
                ConvexBody::cross_polytope(a.n, 1.0)?,
            )?;
            let best = table_min_action(&table, a.k_max, g.seed)?;
            ("punctured_cube", table, best)
        }
        TableKind::TwoScatterers => {
            let x = (a.k - 1.0) / a.k;
            let disk = ConvexBody::ball(2, 1.0)?;
            let table = BilliardTable::new(
                disk.clone(),
                vec![Obstacle::Point(vec![x, 0.0]), Obstacle::Point(vec![-x, 0.0])],
                disk,
            )?;
            let best = table_min_action(&table, a.k_max, g.seed)?;
            ("two_scatterers", table, best)
        }
        TableKind::File => {
            let path = a.table_file.as_ref().ok_or_else(|| CliError::Input("--table-file is required".into()))?;
            let outer: ConvexBody = load(path, parse_body)?;
            let geometry = match &a.geometry_file {
                Some(p) => load(p, parse_body)?,
                None => ConvexBody::ball(outer.dim(), 1.0)?,
            };
            let table = BilliardTable::new(outer, vec![], geometry)?;
            let best = table_min_action(&table, a.k_max, g.seed)?;
            ("file", table, best)
        }
    };
    let traj = &best.trajectory;
    let labels: Vec<String> = traj.component_labels.iter().map(|l| l.to_string()).collect();
    let mut result = json!({
        "table": name,
        "action": best.value,
        "k": traj.bounces(),
        "labels": labels,
        "family": value(&best.family),
        "gradient_norm": gradient_norm(&table, &best),
        "reflection_gap": reflection_angle_gap(&table, traj),
        "bounce_points": traj.bounce_points,
        "candidates": best.candidates.len(),
        "csv": a.csv.display().to_string(),
    });
    if a.table == TableKind::TwoScatterers {
        result["comparison_bound"] = json!(((a.k - 1.0) / a.k).sqrt());
    }
    let mut out = Outcome::new("billiard", result, best.value.is_finite());
    out.files.push((a.csv.clone(), trajectories_csv(table.dim(), std::slice::from_ref(traj))));
    Ok(out)
}

fn check(
    spec: &SymplecticMapSpec<f64>,
    sampler: &(dyn Fn(&mut SampleRng) -> Vec<f64> + Sync),
    g: &GlobalArgs,
) -> Res<(VerificationReport<f64>, bool)> {
    let rep = verify_spec(spec, sampler, g.samples, g.tol, g.seed)?;
    let pass = rep.passes(g.tol) && rep.skipped == 0;
    Ok((rep, pass))
}

pub fn verify_map(a: &VerifyMapArgs, g: &GlobalArgs) -> Res<Outcome> {
    let (name, report, pass): (&str, Value, bool) = match a.map {
        MapKind::AnnulusSqueeze => {
            let dom = DomainF64::from_id("annulus_disk", Some(a.n), &[a.delta])?;
            let (rep, pass) = check(&annulus_squeeze_map(a.n, a.delta, a.eps)?, &|r: &mut SampleRng| dom.sample(r), g)?;
            ("annulus_squeeze", value(&rep), pass)
        }
        MapKind::FactorSwap => {
            let dom = DomainF64::from_id("disk_square", None, &[])?;
            let (rep, pass) = check(&factor_swap_map(2, 0, 1.0, 1.0)?, &|r: &mut SampleRng| dom.sample(r), g)?;
            ("factor_swap", value(&rep), pass)
        }
        MapKind::RectToDisk => {
            let m = RectToDisk::new(0.0, 0.0, a.a, 1.0, a.eps)?;
            let sampler = |r: &mut SampleRng| vec![uniform(r, -a.a, a.a), uniform(r, -1.0, 1.0)];
            let (rep, pass) = check(&m.map_spec(), &sampler, g)?;
            ("rect_to_disk", value(&rep), pass)
        }
        MapKind::Sigma => {
            let rep = verify_sigma(&SigmaMap::new(a.n, a.eps)?, a.lambda, g.samples, g.tol, g.seed)?;
            ("sigma", value(&rep), rep.pass)
        }
        MapKind::BiranCube => {
            let cert = upper_bound_biran_cube(a.n, a.lambda, g.samples, g.seed)?;
            ("biran_cube", value(&cert), cert.failures == 0)
        }
        MapKind::CylinderF => {
            let b = CylinderBundle::new(a.big_r, Some(a.a))?;
            let (rep, pass) = check(&b.f_spec(), &|r: &mut SampleRng| b.sample(r), g)?;
            ("cylinder_f", value(&rep), pass)
        }
        MapKind::CylinderSqueeze => {
            let b = CylinderBundle::new(a.big_r, Some(a.a))?;
            let (spec, cap, branch) = b.squeeze(a.eps)?;
            let (rep, pass) = check(&spec, &|r: &mut SampleRng| b.sample(r), g)?;
            let mut v = value(&rep);
            v["target_capacity"] = json!(cap);
            v["branch"] = value(&branch);
            ("cylinder_squeeze", v, pass)
        }
        MapKind::Camel => {
            let rep = verify_camel(a.a, g.samples, g.samples.min(1000), g.tol, g.seed)?;
            ("camel", value(&rep), rep.pass)
        }
    };
    Ok(Outcome::new("verify-map", json!({ "map": name, "report": report }), pass))
}

pub fn volume(a: &VolumeArgs, g: &GlobalArgs) -> Res<Outcome> {
    let body: ConvexBody = load(&a.body, parse_body)?;
    let method =
        if a.exact { VolumeMethod::Exact } else { VolumeMethod::MonteCarlo { samples: g.mc_samples, seed: g.seed } };
    let est = body.volume(method)?;
    let exact = body.exact_volume_if_known();
    let pass = exact.is_none_or(|e| (est.value - e).abs() <= 4.0 * est.std_error + 1e-12 * e.abs());
    let mut result = json!({
        "kind": body.kind_name(),
        "dim": body.dim(),
        "volume": value(&est),
        "exact": exact,
    });
    if a.mahler {
        result["mahler_sqrt"] = value(&body.mahler_sqrt(method)?);
    }
    Ok(Outcome::new("volume", result, pass))
}

pub fn cylinder(a: &CylinderArgs, g: &GlobalArgs) -> Res<Outcome> {
    let b = CylinderBundle::new(a.big_r, a.a)?;
    let rep = cylinder_report(&b, a.eps, g.samples, g.tol, g.seed)?;
    let iv = &rep.interval;
    let cert = |i: Option<usize>| i.map(|i| value(&iv.certificates[i]));
    let f_ok = rep.f_defect.max_symplectic_defect <= g.tol && rep.f_defect.skipped == 0;
    let pinned = rep.g.is_none_or(|gv| iv.lower >= gv - 2.0 * a.eps - 1e-12 && iv.upper <= gv + a.eps + 1e-12);
    let result = json!({
        "R": a.big_r,
        "a": a.a,
        "g": rep.g,
        "lower": iv.lower,
        "upper": iv.upper,
        "lower_cert": cert(iv.lower_from),
        "upper_cert": cert(iv.upper_from),
        "upper_branch": value(&rep.upper_branch),
        "defects": { "f": value(&rep.f_defect) },
    });
    Ok(Outcome::new("cylinder", result, f_ok && pinned))
}
