//! JSON body and domain files, and trajectory CSV.
//!
//! Bodies look like `{"kind": "cube", "dim": 2, "params": [1, 1]}`;
//! polytopes carry `"vertices"` instead of `"params"`. Domains are
//! `{"product": {"position": …, "momentum": …}}` where the position is a
//! body, `{"annulus": {"outer": body, "delta": d}}` or
//! `{"punctured": {"body": body, "points": [[…]]}}`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::billiards::BilliardTrajectory;
use crate::convex::{BodyKind, ConvexBody};
use crate::error::{Error, Result};
use crate::products::{LagrangianProductDomain, PositionFactor};
use crate::scalar::Real;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodySpec {
    pub kind: String,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
}

impl BodySpec {
    pub fn build<T: Real>(&self) -> Result<ConvexBody<T>> {
        let n = self.dim;
        let p: Vec<T> = self.params.iter().map(|&v| T::lit(v)).collect();
        let scalar = |p: &[T]| -> Result<T> {
            match p {
                [] => Ok(T::one()),
                [r] => Ok(*r),
                _ => Err(parse_err(format!("{} takes one parameter", self.kind))),
            }
        };
        let per_axis = |p: &[T]| -> Result<Vec<T>> {
            match p.len() {
                0 => Ok(vec![T::one(); n]),
                1 => Ok(vec![p[0]; n]),
                k if k == n => Ok(p.to_vec()),
                k => Err(parse_err(format!("{} takes 1 or {n} parameters, got {k}", self.kind))),
            }
        };
        let body = match self.kind.as_str() {
            "ball" => ConvexBody::ball(n, scalar(&p)?),
            "cube" => ConvexBody::cube(&per_axis(&p)?),
            "cross_polytope" => ConvexBody::cross_polytope(n, scalar(&p)?),
            "ellipsoid" => ConvexBody::ellipsoid(&per_axis(&p)?),
            "polytope" => {
                let vs = self.vertices.as_ref().ok_or_else(|| parse_err("polytope needs a \"vertices\" array"))?;
                if vs.iter().any(|v| v.len() != n) {
                    return Err(parse_err(format!("every vertex must have {n} coordinates")));
                }
                ConvexBody::polytope(vs.iter().map(|v| v.iter().map(|&c| T::lit(c)).collect()).collect())
            }
            other => return Err(parse_err(format!("unknown body kind {other:?}"))),
        }?;
        if body.dim() != n {
            return Err(parse_err(format!("declared dim {n} but the body has dim {}", body.dim())));
        }
        Ok(body)
    }

    pub fn from_body<T: Real>(body: &ConvexBody<T>) -> Result<Self> {
        let f = |v: &[T]| v.iter().map(|c| c.to_f64_lossy()).collect::<Vec<f64>>();
        let dim = body.dim();
        let (kind, params, vertices) = match body.kind() {
            BodyKind::Ball { radius } => ("ball", vec![radius.to_f64_lossy()], None),
            BodyKind::Cube { half_widths } => ("cube", f(half_widths), None),
            BodyKind::CrossPolytope { radius } => ("cross_polytope", vec![radius.to_f64_lossy()], None),
            BodyKind::Ellipsoid { semi_axes } => ("ellipsoid", f(semi_axes), None),
            BodyKind::Polytope(_) => {
                ("polytope", vec![], Some(body.vertices().unwrap_or_default().iter().map(|v| f(v)).collect()))
            }
            BodyKind::SupportSampled(_) => return Err(parse_err("sampled bodies have no file form")),
        };
        Ok(Self { kind: kind.into(), dim, params, vertices })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnulusSpec {
    pub outer: BodySpec,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PuncturedSpec {
    pub body: BodySpec,
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PositionSpec {
    Annulus { annulus: AnnulusSpec },
    Punctured { punctured: PuncturedSpec },
    Body(BodySpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductSpec {
    pub position: PositionSpec,
    pub momentum: BodySpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub product: ProductSpec,
}

impl DomainSpec {
    pub fn build<T: Real>(&self) -> Result<LagrangianProductDomain<T>> {
        let position = match &self.product.position {
            PositionSpec::Body(b) => PositionFactor::Body(b.build()?),
            PositionSpec::Annulus { annulus } => {
                PositionFactor::Annulus { outer: annulus.outer.build()?, delta: T::lit(annulus.delta) }
            }
            PositionSpec::Punctured { punctured } => PositionFactor::Punctured {
                body: punctured.body.build()?,
                points: punctured.points.iter().map(|p| p.iter().map(|&c| T::lit(c)).collect()).collect(),
            },
        };
        LagrangianProductDomain::new(position, self.product.momentum.build()?)
    }
}

pub fn parse_body<T: Real>(text: &str) -> Result<ConvexBody<T>> {
    let spec: BodySpec = serde_json::from_str(text).map_err(|e| parse_err(format!("body file: {e}")))?;
    spec.build()
}

pub fn parse_domain<T: Real>(text: &str) -> Result<LagrangianProductDomain<T>> {
    let spec: DomainSpec = serde_json::from_str(text).map_err(|e| parse_err(format!("domain file: {e}")))?;
    spec.build()
}

/// Rows `index,x,y[,z],component_label`; `dim` fixes the header when the
/// list is empty.
pub fn trajectories_csv<T: Real>(dim: usize, trajectories: &[BilliardTrajectory<T>]) -> String {
    let mut out = String::from(if dim == 3 { "index,x,y,z,component_label\n" } else { "index,x,y,component_label\n" });
    for traj in trajectories {
        for (i, (q, label)) in traj.bounce_points.iter().zip(&traj.component_labels).enumerate() {
            let coords: Vec<String> = q.iter().map(|c| format!("{c}")).collect();
            let _ = writeln!(out, "{i},{},{label}", coords.join(","));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::billiards::{disk_orbit, ComponentLabel};

    #[test]
    fn cube_file() {
        let k: ConvexBody = parse_body(r#"{"kind": "cube", "dim": 2, "params": [1, 1]}"#).unwrap();
        assert!(k.contains(&[0.5, -0.9]).unwrap());
        assert!(!k.contains(&[1.1, 0.0]).unwrap());
    }

    #[test]
    fn polytope_file() {
        let k: ConvexBody =
            parse_body(r#"{"kind": "polytope", "dim": 2, "vertices": [[1,0],[0,1],[-1,0],[0,-1]]}"#).unwrap();
        assert!((k.support(&[1.0, 1.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!(parse_body::<f64>(r#"{"kind": "polytope", "dim": 2}"#).is_err());
    }

    #[test]
    fn malformed_files() {
        assert!(matches!(parse_body::<f64>("{"), Err(Error::Parse(_))));
        assert!(matches!(parse_body::<f64>(r#"{"kind": "blob", "dim": 2}"#), Err(Error::Parse(_))));
        assert!(matches!(parse_body::<f64>(r#"{"kind": "cube", "dim": 3, "params": [1, 2]}"#), Err(Error::Parse(_))));
    }

    #[test]
    fn domain_files() {
        let d: LagrangianProductDomain = parse_domain(
            r#"{"product": {"position": {"annulus": {"outer": {"kind": "ball", "dim": 2, "params": [1]}, "delta": 0.5}},
                "momentum": {"kind": "ball", "dim": 2, "params": [1]}}}"#,
        )
        .unwrap();
        assert!(d.position().is_holed());
        assert!(!d.contains_point(&[0.1, 0.0, 0.0, 0.0]).unwrap());
        let d: LagrangianProductDomain = parse_domain(
            r#"{"product": {"position": {"punctured": {"body": {"kind": "cube", "dim": 2}, "points": [[0, 0]]}},
                "momentum": {"kind": "cross_polytope", "dim": 2}}}"#,
        )
        .unwrap();
        assert!(!d.contains_point(&[0.0, 0.0, 0.1, 0.1]).unwrap());
    }

    #[test]
    fn body_round_trip() {
        let k = ConvexBody::<f64>::ellipsoid(&[1.0, 1.3]).unwrap();
        let spec = BodySpec::from_body(&k).unwrap();
        assert_eq!(spec.build::<f64>().unwrap(), k);
    }

    #[test]
    fn csv_rows() {
        assert_eq!(trajectories_csv::<f64>(2, &[]), "index,x,y,component_label\n");
        let t = disk_orbit::<f64>(2, 1).unwrap();
        let csv = trajectories_csv(2, &[t]);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(1).unwrap().ends_with(&format!(",{}", ComponentLabel::Outer)));
    }
}
