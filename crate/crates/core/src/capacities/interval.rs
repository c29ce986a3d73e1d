use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// Value taken from the registry of known results.
    Registry,
    /// Embedding of a scaled full product into the holed one.
    HoledLower,
    /// Embedding into a cylinder, closed by non-squeezing.
    NonSqueezing,
    /// Embedding into a ball minus a Lagrangian barrier.
    LagrangianBarrier,
    /// Inclusion of a product with a known value.
    Inclusion,
    /// Bounds from pinching, exponent as printed.
    Pinched,
    /// Bounds from a ball sandwich and a linear stretch.
    Sandwich,
    /// Explicit ball embedding.
    BallEmbedding,
}

/// One bound on a capacity together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate<T = f64> {
    pub kind: CertificateKind,
    pub theorem: String,
    /// Registry entries and axioms the bound consumes.
    pub axioms: Vec<String>,
    pub lower: Option<T>,
    pub upper: Option<T>,
    /// Largest symplecticity defect seen while verifying the map.
    pub defect: Option<f64>,
    pub samples: usize,
    pub failures: usize,
    pub note: Option<String>,
}

impl<T: Real> Certificate<T> {
    pub fn new(kind: CertificateKind, theorem: impl Into<String>) -> Self {
        Self {
            kind,
            theorem: theorem.into(),
            axioms: Vec::new(),
            lower: None,
            upper: None,
            defect: None,
            samples: 0,
            failures: 0,
            note: None,
        }
    }

    pub fn with_lower(mut self, v: T) -> Self {
        self.lower = Some(v);
        self
    }

    pub fn with_upper(mut self, v: T) -> Self {
        self.upper = Some(v);
        self
    }

    pub fn with_axiom(mut self, axiom: impl Into<String>) -> Self {
        self.axioms.push(axiom.into());
        self
    }

    pub fn with_verification(mut self, samples: usize, failures: usize, defect: Option<f64>) -> Self {
        self.samples = samples;
        self.failures = failures;
        self.defect = defect;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Bounds multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        let mut c = self.clone();
        c.lower = c.lower.map(|v| v * factor);
        c.upper = c.upper.map(|v| v * factor);
        c
    }
}

/// `[lower, upper]` with the certificates that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityInterval<T = f64> {
    pub lower: T,
    pub upper: T,
    pub certificates: Vec<Certificate<T>>,
    /// Minimal billiard action, attached for reference.
    pub a_min: Option<T>,
    /// Index of the certificate attaining `lower`.
    pub lower_from: Option<usize>,
    pub upper_from: Option<usize>,
}

impl<T: Real> CapacityInterval<T> {
    /// `[0, ∞]` without certificates.
    pub fn unresolved() -> Self {
        Self {
            lower: T::zero(),
            upper: T::infinity(),
            certificates: Vec::new(),
            a_min: None,
            lower_from: None,
            upper_from: None,
        }
    }

    pub fn new(lower: T, upper: T) -> Result<Self> {
        let mut s = Self::unresolved();
        s.lower = lower;
        s.upper = upper;
        s.check()
    }

    /// Intersection of all certificate bounds.
    pub fn from_certificates(certs: impl IntoIterator<Item = Certificate<T>>) -> Result<Self> {
        let mut s = Self::unresolved();
        for c in certs {
            s.push(c);
        }
        s.check()
    }

    /// Adds a certificate, tightening the bounds it improves. Call
    /// [`check`](Self::check) once all certificates are in.
    pub fn push(&mut self, cert: Certificate<T>) {
        let idx = self.certificates.len();
        if let Some(l) = cert.lower {
            if l > self.lower || self.lower_from.is_none() && l >= self.lower {
                self.lower = l;
                self.lower_from = Some(idx);
            }
        }
        if let Some(u) = cert.upper {
            if u < self.upper || self.upper_from.is_none() && u <= self.upper {
                self.upper = u;
                self.upper_from = Some(idx);
            }
        }
        self.certificates.push(cert);
    }

    /// Fails with a consistency error unless `0 ≤ lower ≤ upper`.
    pub fn check(self) -> Result<Self> {
        if self.lower.is_nan() || self.upper.is_nan() || self.lower < T::zero() || self.lower > self.upper {
            return Err(Error::Consistency {
                message: format!("certified lower bound {} exceeds upper bound {}", self.lower, self.upper),
                dump: format!("{:#?}", self.certificates),
            });
        }
        Ok(self)
    }

    pub fn intersect(mut self, other: Self) -> Result<Self> {
        for c in other.certificates {
            self.push(c);
        }
        if self.a_min.is_none() {
            self.a_min = other.a_min;
        }
        self.check()
    }

    pub fn width(&self) -> T {
        self.upper - self.lower
    }

    pub fn contains(&self, v: T) -> bool {
        self.lower <= v && v <= self.upper
    }

    /// Endpoints, certificate bounds and `a_min` multiplied by `factor > 0`.
    pub fn scaled(&self, factor: T) -> Result<Self> {
        if !(factor > T::zero()) {
            return Err(invalid(format!("scale factor must be positive, got {factor}")));
        }
        let mut s = self.clone();
        s.lower = s.lower * factor;
        s.upper = s.upper * factor;
        s.a_min = s.a_min.map(|v| v * factor);
        s.certificates = s.certificates.iter().map(|c| c.scaled(factor)).collect();
        Ok(s)
    }
}

/// A registered capacity value (normalization `c(B(r)) = r`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnownResult<T = f64> {
    pub domain_id: String,
    pub value: T,
    pub citation: String,
}

fn parse_id(id: &str) -> Result<(&str, Vec<f64>)> {
    let id = id.trim();
    let Some(open) = id.find('(') else { return Ok((id, Vec::new())) };
    let inner =
        id[open + 1..].strip_suffix(')').ok_or_else(|| Error::Parse(format!("unbalanced parentheses in {id:?}")))?;
    let args = inner
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad argument {s:?} in {id:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok((id[..open].trim(), args))
}

/// Looks up ids such as `ball(4)`, `cube_diamond(3)` or `disk_square`.
pub fn registry_lookup<T: Real>(id: &str) -> Result<KnownResult<T>> {
    let (name, args) = parse_id(id)?;
    let arg = |what: &str| -> Result<f64> {
        match args.as_slice() {
            [v] if *v > 0.0 && v.is_finite() => Ok(*v),
            _ => Err(invalid(format!("{name} takes one positive {what}"))),
        }
    };
    let dim = || -> Result<usize> {
        let v = arg("dimension")?;
        if v.fract() != 0.0 {
            return Err(invalid(format!("{name} takes an integer dimension")));
        }
        Ok(v as usize)
    };
    let (value, citation) = match name {
        "ball" => (arg("capacity")?, "normalization and conformality"),
        "cylinder" => (arg("capacity")?, "normalization and non-squeezing"),
        "disk_disk" => {
            dim()?;
            (4.0, "Lagrangian bidisk value")
        }
        "cube_diamond" => {
            dim()?;
            (4.0, "cube times diamond is symplectomorphic to the ball B(4)")
        }
        "biran_holed_ball" => (arg("capacity")? / 2.0, "Lagrangian barrier in the ball"),
        "disk_square" if args.is_empty() => (4.0, "disk times square"),
        "rectangle_cylinder" => (arg("area")?, "rectangle-to-disk squeeze and non-squeezing"),
        _ => return Err(Error::NotFound(format!("no registry entry for {id:?}"))),
    };
    Ok(KnownResult { domain_id: id.trim().to_string(), value: T::lit(value), citation: citation.to_string() })
}

/// Registry value wrapped as a two-sided certificate.
pub fn registry_certificate<T: Real>(id: &str) -> Result<Certificate<T>> {
    let k = registry_lookup::<T>(id)?;
    Ok(Certificate::new(CertificateKind::Registry, k.citation)
        .with_lower(k.value)
        .with_upper(k.value)
        .with_axiom(k.domain_id))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_values() {
        assert_eq!(registry_lookup::<f64>("cube_diamond(3)").unwrap().value, 4.0);
        assert_eq!(registry_lookup::<f64>("biran_holed_ball(1)").unwrap().value, 0.5);
        assert_eq!(registry_lookup::<f64>("ball(4)").unwrap().value, 4.0);
        assert_eq!(registry_lookup::<f64>("disk_square").unwrap().value, 4.0);
        assert!(matches!(registry_lookup::<f64>("torus(1)"), Err(Error::NotFound(_))));
        assert!(registry_lookup::<f64>("ball(-1)").is_err());
    }

    #[test]
    fn intersection_keeps_binding_certificates() {
        let a = Certificate::new(CertificateKind::Inclusion, "a").with_lower(1.0);
        let b = Certificate::new(CertificateKind::NonSqueezing, "b").with_upper(3.0);
        let c = Certificate::new(CertificateKind::Inclusion, "c").with_lower(2.0).with_upper(5.0);
        let iv = CapacityInterval::from_certificates([a, b, c]).unwrap();
        assert_eq!((iv.lower, iv.upper, iv.lower_from, iv.upper_from), (2.0, 3.0, Some(2), Some(1)));
    }

    #[test]
    fn crossing_bounds_are_a_consistency_error() {
        let a = Certificate::new(CertificateKind::Inclusion, "a").with_lower(3.0);
        let b = Certificate::new(CertificateKind::NonSqueezing, "b").with_upper(2.0);
        assert!(matches!(CapacityInterval::from_certificates([a, b]), Err(Error::Consistency { .. })));
    }
}
