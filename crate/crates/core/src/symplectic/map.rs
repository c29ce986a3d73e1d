use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::chart::{Chart, Predicate};
use crate::error::{domain, invalid, Result};
use crate::linalg::{max_abs_diff, Matrix};
use crate::sampling::{sharded, SampleRng};
use crate::scalar::Real;

pub type PointMap<T> = Arc<dyn Fn(&[T]) -> Vec<T> + Send + Sync>;
pub type JacobianFn<T> = Arc<dyn Fn(&[T]) -> Matrix<T> + Send + Sync>;
pub type Sampler<T> = Arc<dyn Fn(&mut SampleRng) -> Vec<T> + Send + Sync>;

/// Default tolerance for defect checks.
pub const DEFAULT_TOL: f64 = 1e-6;

/// Finite-difference step: `1e-5` in double precision, `∛ε` for coarser types.
pub fn default_step<T: Real>() -> T {
    T::lit(1e-5).max(T::epsilon().cbrt())
}

/// An explicit map between two charts.
#[derive(Clone)]
pub struct SymplecticMapSpec<T = f64> {
    name: String,
    source: Chart<T>,
    target: Chart<T>,
    eval: PointMap<T>,
    analytic_jacobian: Option<JacobianFn<T>>,
    containment_target: Option<Predicate<T>>,
}

impl<T> fmt::Debug for SymplecticMapSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymplecticMapSpec")
            .field("name", &self.name)
            .field("source", &self.source)
            .field("target", &self.target)
            .field("analytic_jacobian", &self.analytic_jacobian.is_some())
            .finish()
    }
}

impl<T: Real> SymplecticMapSpec<T> {
    pub fn new(
        name: impl Into<String>,
        source: Chart<T>,
        target: Chart<T>,
        eval: impl Fn(&[T]) -> Vec<T> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            source,
            target,
            eval: Arc::new(eval),
            analytic_jacobian: None,
            containment_target: None,
        }
    }

    pub fn with_jacobian(mut self, jac: impl Fn(&[T]) -> Matrix<T> + Send + Sync + 'static) -> Self {
        self.analytic_jacobian = Some(Arc::new(jac));
        self
    }

    pub fn with_containment(mut self, region: impl Fn(&[T]) -> bool + Send + Sync + 'static) -> Self {
        self.containment_target = Some(Arc::new(region));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &Chart<T> {
        &self.source
    }

    pub fn target(&self) -> &Chart<T> {
        &self.target
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        self.analytic_jacobian.is_some()
    }

    pub fn eval(&self, q: &[T]) -> Result<Vec<T>> {
        if !self.source.contains(q) {
            return Err(domain(format!("point outside the source chart of {}", self.name)));
        }
        Ok((self.eval)(q))
    }

    /// Whether `f(q)` lies in the containment target (true when none is set).
    pub fn image_contained(&self, image: &[T]) -> bool {
        self.containment_target.as_ref().is_none_or(|p| p(image))
    }

    /// `(f ∘ g)`: apply `self`, then `next`.
    pub fn then(&self, next: &Self) -> Self {
        let (f, g) = (self.eval.clone(), next.eval.clone());
        let jac = match (&self.analytic_jacobian, &next.analytic_jacobian) {
            (Some(jf), Some(jg)) => {
                let (jf, jg, f2) = (jf.clone(), jg.clone(), f.clone());
                Some(Arc::new(move |q: &[T]| jg(&f2(q)).matmul(&jf(q))) as JacobianFn<T>)
            }
            _ => None,
        };
        Self {
            name: format!("{}∘{}", next.name, self.name),
            source: self.source.clone(),
            target: next.target.clone(),
            eval: Arc::new(move |q| g(&f(q))),
            analytic_jacobian: jac,
            containment_target: next.containment_target.clone(),
        }
    }

    /// Analytic Jacobian when available, otherwise central differences.
    pub fn jacobian(&self, q: &[T], h: T) -> Result<Matrix<T>> {
        if !self.source.contains(q) {
            return Err(domain(format!("point outside the source chart of {}", self.name)));
        }
        if let Some(j) = &self.analytic_jacobian {
            return Ok(j(q));
        }
        self.finite_difference_jacobian(q, h)
    }

    /// Central differences; the step is halved (at most 8 times) until every
    /// stencil point lies in the source chart.
    pub fn finite_difference_jacobian(&self, q: &[T], h: T) -> Result<Matrix<T>> {
        if !(h > T::zero()) {
            return Err(invalid("finite-difference step must be positive"));
        }
        let mut step = h;
        for _ in 0..=8 {
            if let Some(j) = self.try_fd(q, step) {
                return Ok(j);
            }
            step = step / T::lit(2.0);
        }
        Err(domain(format!("point too close to the boundary of chart {}", self.source.name())))
    }

    fn try_fd(&self, q: &[T], h: T) -> Option<Matrix<T>> {
        let n = q.len();
        let m = self.target.dim();
        let mut jac = Matrix::zeros(m, n);
        let mut plus = q.to_vec();
        let mut minus = q.to_vec();
        for j in 0..n {
            plus[j] = q[j] + h;
            minus[j] = q[j] - h;
            if !self.source.contains(&plus) || !self.source.contains(&minus) {
                return None;
            }
            let fp = (self.eval)(&plus);
            let fm = (self.eval)(&minus);
            for i in 0..m {
                jac[(i, j)] = (fp[i] - fm[i]) / (h + h);
            }
            plus[j] = q[j];
            minus[j] = q[j];
        }
        Some(jac)
    }

    fn defect_for(&self, q: &[T], image: &[T], jac: &Matrix<T>) -> Result<T> {
        let omega_t = self.target.form_matrix(image)?;
        let omega_s = self.source.form_unchecked(q);
        Ok(jac.congruence(&omega_t).sub(&omega_s).max_abs())
    }

    /// `‖Jᵀ Ω_t(f(q)) J − Ω_s(q)‖_∞` with the default step and tolerance.
    pub fn symplecticity_defect(&self, q: &[T]) -> Result<T> {
        self.defect_with(q, default_step(), T::lit(DEFAULT_TOL)).map(|d| d.symplectic)
    }

    /// Defect at `q`, retrying with a Richardson-extrapolated Jacobian when the
    /// plain central difference misses `tol`.
    pub fn defect_with(&self, q: &[T], h: T, tol: T) -> Result<PointDefect<T>> {
        let image = self.eval(q)?;
        let mut jac = self.jacobian(q, h)?;
        let mut d = self.defect_for(q, &image, &jac)?;
        if d >= tol && self.analytic_jacobian.is_none() {
            let half = self.finite_difference_jacobian(q, h / T::lit(2.0))?;
            let rich = half.scale(T::lit(4.0)).sub(&jac).scale(T::one() / T::lit(3.0));
            let dr = self.defect_for(q, &image, &rich)?;
            if dr < d {
                d = dr;
                jac = rich;
            }
        }
        let area = if q.len() == 2 && self.target.dim() == 2 {
            let ot = self.target.form_unchecked(&image)[(1, 0)];
            let os = self.source.form_unchecked(q)[(1, 0)];
            Some((jac.det() * ot - os).abs())
        } else {
            None
        };
        Ok(PointDefect { symplectic: d, area, image })
    }
}

#[derive(Debug, Clone)]
pub struct PointDefect<T> {
    pub symplectic: T,
    /// `|det J · Ω_t − Ω_s|` for maps between planar charts.
    pub area: Option<T>,
    pub image: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport<T = f64> {
    pub samples: usize,
    pub skipped: usize,
    pub max_symplectic_defect: T,
    pub max_area_defect: T,
    pub containment_failures: usize,
    pub seam_max_gap: T,
}

impl<T: Real> VerificationReport<T> {
    pub fn empty() -> Self {
        Self {
            samples: 0,
            skipped: 0,
            max_symplectic_defect: T::zero(),
            max_area_defect: T::zero(),
            containment_failures: 0,
            seam_max_gap: T::zero(),
        }
    }

    /// Order-independent merge (sums and maxima).
    pub fn merge(mut self, other: &Self) -> Self {
        self.samples += other.samples;
        self.skipped += other.skipped;
        self.max_symplectic_defect = self.max_symplectic_defect.max(other.max_symplectic_defect);
        self.max_area_defect = self.max_area_defect.max(other.max_area_defect);
        self.containment_failures += other.containment_failures;
        self.seam_max_gap = self.seam_max_gap.max(other.seam_max_gap);
        self
    }

    /// Defects within `tol`, no containment failures and at least one sample.
    pub fn passes(&self, tol: T) -> bool {
        self.samples > 0
            && self.max_symplectic_defect <= tol
            && self.max_area_defect <= tol
            && self.seam_max_gap <= tol
            && self.containment_failures == 0
    }

    pub fn to_f64(&self) -> VerificationReport<f64> {
        VerificationReport {
            samples: self.samples,
            skipped: self.skipped,
            max_symplectic_defect: self.max_symplectic_defect.to_f64_lossy(),
            max_area_defect: self.max_area_defect.to_f64_lossy(),
            containment_failures: self.containment_failures,
            seam_max_gap: self.seam_max_gap.to_f64_lossy(),
        }
    }
}

/// Samples `n_samples` points and aggregates defects. Points outside the
/// source chart, or too close to its boundary, are skipped and counted.
pub fn verify_map<T: Real>(
    map: &SymplecticMapSpec<T>,
    sampler: &(dyn Fn(&mut SampleRng) -> Vec<T> + Sync),
    n_samples: usize,
    tol: T,
    seed: u64,
) -> Result<VerificationReport<T>> {
    if n_samples == 0 {
        return Err(invalid("verification needs at least one sample"));
    }
    let h = default_step::<T>();
    let parts = sharded(n_samples, seed, |rng, count| {
        let mut rep = VerificationReport::<T>::empty();
        for _ in 0..count {
            let q = sampler(rng);
            match map.defect_with(&q, h, tol) {
                Ok(d) => {
                    rep.samples += 1;
                    rep.max_symplectic_defect = rep.max_symplectic_defect.max(d.symplectic);
                    if let Some(a) = d.area {
                        rep.max_area_defect = rep.max_area_defect.max(a);
                    }
                    if !map.image_contained(&d.image) {
                        rep.containment_failures += 1;
                    }
                }
                Err(_) => rep.skipped += 1,
            }
        }
        rep
    });
    Ok(parts.iter().fold(VerificationReport::empty(), |acc, p| acc.merge(p)))
}

/// Two pieces of a piecewise map that must agree along a seam.
#[derive(Clone)]
pub struct Seam<T = f64> {
    pub name: String,
    /// Draws a seam parameter.
    pub sampler: Sampler<T>,
    /// Image of the seam parameter under the first piece.
    pub left: PointMap<T>,
    /// Image of the seam parameter under the second piece.
    pub right: PointMap<T>,
}

/// A map assembled from pieces, each with its own chart and sampler.
#[derive(Clone)]
pub struct PiecewiseMap<T = f64> {
    pub name: String,
    pub pieces: Vec<(String, SymplecticMapSpec<T>, Sampler<T>)>,
    pub seams: Vec<Seam<T>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PiecewiseReport<T = f64> {
    pub overall: VerificationReport<T>,
    pub pieces: Vec<(String, VerificationReport<T>)>,
    pub seams: Vec<(String, T)>,
}

/// Per-piece verification plus seam gaps measured in target coordinates.
pub fn verify_piecewise<T: Real>(
    map: &PiecewiseMap<T>,
    n_samples: usize,
    n_seam_samples: usize,
    tol: T,
    seed: u64,
) -> Result<PiecewiseReport<T>> {
    let mut overall = VerificationReport::empty();
    let mut pieces = Vec::new();
    for (i, (label, piece, sampler)) in map.pieces.iter().enumerate() {
        let rep = verify_map(piece, sampler.as_ref(), n_samples, tol, seed.wrapping_add(i as u64))?;
        overall = overall.merge(&rep);
        pieces.push((label.clone(), rep));
    }
    let mut seams = Vec::new();
    for (i, seam) in map.seams.iter().enumerate() {
        let gap = seam_gap(seam, n_seam_samples, seed.wrapping_add(1000 + i as u64));
        overall.seam_max_gap = overall.seam_max_gap.max(gap);
        seams.push((seam.name.clone(), gap));
    }
    Ok(PiecewiseReport { overall, pieces, seams })
}

pub fn seam_gap<T: Real>(seam: &Seam<T>, n: usize, seed: u64) -> T {
    sharded(n, seed, |rng, count| {
        (0..count).fold(T::zero(), |m, _| {
            let s = (seam.sampler)(rng);
            m.max(max_abs_diff(&(seam.left)(&s), &(seam.right)(&s)))
        })
    })
    .into_iter()
    .fold(T::zero(), T::max)
}
