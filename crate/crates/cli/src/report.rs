use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use symcap::capacities::{barrier_test, biran_pinched_bounds};
use symcap::cotangent::{cylinder_report, CylinderBundle};
use symcap::{capacity_of_with, ConvexBody, DomainF64, VolumeMethod};

use crate::args::{GlobalArgs, ReportArgs};
use crate::commands::capacity_options;
use crate::output::{value, CliError, Outcome};

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub name: String,
    pub expected: Option<f64>,
    pub lower: f64,
    pub upper: f64,
    pub a_min: Option<f64>,
    pub pass: bool,
    pub detail: Value,
}

const WIDTH_TOL: f64 = 2e-3;
const ACTION_TOL: f64 = 1e-4;

fn capacity_row(
    name: &str,
    id: &str,
    n: Option<usize>,
    params: &[f64],
    expected: f64,
    a: &ReportArgs,
    g: &GlobalArgs,
) -> Result<Row, CliError> {
    let dom = DomainF64::from_id(id, n, params)?;
    let iv = capacity_of_with(&dom, &capacity_options(a.eps, a.k_max, g))?;
    let contains = iv.lower <= expected + 1e-12 && expected <= iv.upper + 1e-12;
    let action_ok = iv.a_min.is_none_or(|m| (m - expected).abs() <= ACTION_TOL);
    Ok(Row {
        name: name.into(),
        expected: Some(expected),
        lower: iv.lower,
        upper: iv.upper,
        a_min: iv.a_min,
        pass: contains && iv.width() <= WIDTH_TOL && action_ok,
        detail: json!({ "domain": dom.to_string(), "certificates": iv.certificates.len() }),
    })
}

fn row(i: usize, a: &ReportArgs, g: &GlobalArgs) -> Result<Row, CliError> {
    match i {
        0 => capacity_row("annulus_product", "annulus_disk", Some(2), &[a.delta], 2.0 * (1.0 - a.delta), a, g),
        1 => capacity_row("punctured_cube_product", "punctured_cube_diamond", Some(2), &[], 2.0, a, g),
        2 => {
            let rep = barrier_test(&ConvexBody::ball(2, 1.0)?, VolumeMethod::Exact)?;
            Ok(Row {
                name: "pinched_dual_product_barrier".into(),
                expected: Some(rep.mid),
                lower: rep.left,
                upper: rep.right,
                a_min: None,
                pass: rep.barrier_certified,
                detail: value(&rep),
            })
        }
        3 => {
            let c = std::f64::consts::PI * 1.1;
            let rep = biran_pinched_bounds(1.0, 1.2, c)?;
            Ok(Row {
                name: "pinched_holed_ball".into(),
                expected: None,
                lower: rep.interval.lower,
                upper: rep.interval.upper,
                a_min: None,
                pass: rep.strict_upper && rep.interval.lower == c / 4.0 && rep.interval.upper == c,
                detail: json!({ "m_check": 1.0, "m_hat": 1.2, "c_m": c, "strict_upper": rep.strict_upper }),
            })
        }
        4 => {
            let b = CylinderBundle::new(std::f64::consts::PI, Some(a.a))?;
            let rep = cylinder_report(&b, a.eps, g.samples, g.tol, g.seed)?;
            let gv = rep.g.expect("R = π");
            let iv = &rep.interval;
            Ok(Row {
                name: "cylinder_cotangent_bundle".into(),
                expected: Some(gv),
                lower: iv.lower,
                upper: iv.upper,
                a_min: None,
                pass: iv.lower >= gv - 2.0 * a.eps
                    && iv.upper <= gv + a.eps
                    && rep.f_defect.max_symplectic_defect <= g.tol,
                detail: json!({ "a": a.a, "branch": value(&rep.upper_branch), "f_defect": rep.f_defect.max_symplectic_defect }),
            })
        }
        _ => {
            let dom = DomainF64::from_id("disk_square", None, &[])?;
            let iv = capacity_of_with(&dom, &capacity_options(a.eps, 0, g))?;
            Ok(Row {
                name: "disk_square_product".into(),
                expected: Some(4.0),
                lower: iv.lower,
                upper: iv.upper,
                a_min: None,
                pass: iv.lower <= 4.0 && 4.0 <= iv.upper && iv.width() <= 1e-9,
                detail: json!({ "certificates": iv.certificates.len() }),
            })
        }
    }
}

pub const ROWS: usize = 6;

pub fn rows(a: &ReportArgs, g: &GlobalArgs) -> Result<Vec<Row>, CliError> {
    (0..ROWS).into_par_iter().map(|i| row(i, a, g)).collect()
}

pub fn report(a: &ReportArgs, g: &GlobalArgs) -> Result<Outcome, CliError> {
    let rows = rows(a, g)?;
    let pass = rows.iter().all(|r| r.pass);
    Ok(Outcome::new("report", json!({ "rows": value(&rows) }), pass))
}
