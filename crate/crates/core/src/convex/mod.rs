//! Convex bodies in ℝⁿ with the origin in their interior.
//!
//! Every body answers three questions: its support function `h_K(u)`, its
//! gauge (Minkowski functional) and membership. Standard shapes are handled
//! in closed form; polytopes carry both a vertex and a facet description;
//! `SupportSampled` bodies interpolate a tabulated support function.

mod polytope;
mod sampled;

pub use polytope::Polytope;
pub use sampled::{lattice_directions, SampledSupport};

use serde::Serialize;

use crate::error::{domain, invalid, Result};
use crate::linalg::{norm, unit};
use crate::sampling::{self, sharded};
use crate::scalar::Real;

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 8;

/// Default Monte Carlo sample count.
pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;

/// Slack used by closed-set membership tests.
pub fn boundary_tol<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(64.0))
}

#[derive(Debug, Clone, PartialEq)]
pub enum BodyKind<T> {
    Ball {
        radius: T,
    },
    /// `{|xᵢ| ≤ aᵢ}`.
    Cube {
        half_widths: Vec<T>,
    },
    /// `{Σ|xᵢ| ≤ r}`.
    CrossPolytope {
        radius: T,
    },
    Ellipsoid {
        semi_axes: Vec<T>,
    },
    Polytope(Polytope<T>),
    SupportSampled(SampledSupport<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexBody<T = f64> {
    dim: usize,
    kind: BodyKind<T>,
    centrally_symmetric: bool,
}

/// Smallest and largest distance from the origin to the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialExtremes<T> {
    pub k_min: T,
    pub k_max: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PinchingReport<T> {
    pub ratio: T,
    pub is_alpha_pinched: bool,
    pub is_strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeMethod {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum VolumeMethodUsed {
    Exact,
    MonteCarlo {
        samples: usize,
        seed: u64,
    },
    /// Exact volume was requested for a kind without a closed form.
    MonteCarloFallback {
        samples: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeEstimate<T> {
    pub value: T,
    pub std_error: T,
    pub method: VolumeMethodUsed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MahlerEstimate<T> {
    pub value: T,
    pub std_error: T,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(invalid(format!("dimension must be in 1..={MAX_DIM}, got {dim}")));
    }
    Ok(())
}

fn check_positive<T: Real>(what: &str, v: T) -> Result<()> {
    if !(v > T::zero()) || !v.is_finite() {
        return Err(invalid(format!("{what} must be positive and finite, got {v}")));
    }
    Ok(())
}

impl<T: Real> ConvexBody<T> {
    pub fn ball(dim: usize, radius: T) -> Result<Self> {
        check_dim(dim)?;
        check_positive("radius", radius)?;
        Ok(Self { dim, kind: BodyKind::Ball { radius }, centrally_symmetric: true })
    }

    pub fn cube(half_widths: &[T]) -> Result<Self> {
        check_dim(half_widths.len())?;
        for &a in half_widths {
            check_positive("half width", a)?;
        }
        Ok(Self {
            dim: half_widths.len(),
            kind: BodyKind::Cube { half_widths: half_widths.to_vec() },
            centrally_symmetric: true,
        })
    }

    /// The cube `[-1, 1]ⁿ`.
    pub fn unit_cube(dim: usize) -> Result<Self> {
        Self::cube(&vec![T::one(); dim])
    }

    pub fn cross_polytope(dim: usize, radius: T) -> Result<Self> {
        check_dim(dim)?;
        check_positive("radius", radius)?;
        Ok(Self { dim, kind: BodyKind::CrossPolytope { radius }, centrally_symmetric: true })
    }

    pub fn ellipsoid(semi_axes: &[T]) -> Result<Self> {
        check_dim(semi_axes.len())?;
        for &a in semi_axes {
            check_positive("semi axis", a)?;
        }
        Ok(Self {
            dim: semi_axes.len(),
            kind: BodyKind::Ellipsoid { semi_axes: semi_axes.to_vec() },
            centrally_symmetric: true,
        })
    }

    pub fn polytope(vertices: Vec<Vec<T>>) -> Result<Self> {
        let dim = vertices.first().map_or(0, Vec::len);
        check_dim(dim)?;
        let poly = Polytope::from_vertices(dim, vertices)?;
        let symmetric = poly
            .vertices
            .iter()
            .all(|v| poly.vertices.iter().any(|w| v.iter().zip(w).all(|(&a, &b)| (a + b).abs() <= T::lit(1e-9))));
        Ok(Self { dim, kind: BodyKind::Polytope(poly), centrally_symmetric: symmetric })
    }

    pub fn support_sampled(table: SampledSupport<T>, centrally_symmetric: bool) -> Result<Self> {
        let dim = table.dim();
        Ok(Self { dim, kind: BodyKind::SupportSampled(table), centrally_symmetric })
    }

    /// Tabulates an arbitrary positively homogeneous support function.
    pub fn from_support_fn(
        dim: usize,
        resolution: usize,
        centrally_symmetric: bool,
        h: impl Fn(&[T]) -> T,
    ) -> Result<Self> {
        Self::support_sampled(SampledSupport::from_fn(dim, resolution, h)?, centrally_symmetric)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &BodyKind<T> {
        &self.kind
    }

    pub fn is_centrally_symmetric(&self) -> bool {
        self.centrally_symmetric
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            BodyKind::Ball { .. } => "ball",
            BodyKind::Cube { .. } => "cube",
            BodyKind::CrossPolytope { .. } => "cross_polytope",
            BodyKind::Ellipsoid { .. } => "ellipsoid",
            BodyKind::Polytope(_) => "polytope",
            BodyKind::SupportSampled(_) => "support_sampled",
        }
    }

    fn check_vector(&self, v: &[T]) -> Result<()> {
        if v.len() != self.dim {
            return Err(invalid(format!("expected a vector of length {}, got {}", self.dim, v.len())));
        }
        Ok(())
    }

    /// `h_K(u) = sup_{x∈K} ⟨u, x⟩`.
    pub fn support(&self, u: &[T]) -> Result<T> {
        self.check_vector(u)?;
        if u.iter().all(|&c| c == T::zero()) {
            return Err(invalid("support function needs a nonzero direction"));
        }
        Ok(self.support_unchecked(u))
    }

    pub(crate) fn support_unchecked(&self, u: &[T]) -> T {
        match &self.kind {
            BodyKind::Ball { radius } => *radius * norm(u),
            BodyKind::Cube { half_widths } => half_widths.iter().zip(u).fold(T::zero(), |s, (&a, &c)| s + a * c.abs()),
            BodyKind::CrossPolytope { radius } => *radius * u.iter().fold(T::zero(), |m, &c| m.max(c.abs())),
            BodyKind::Ellipsoid { semi_axes } => {
                semi_axes.iter().zip(u).fold(T::zero(), |s, (&a, &c)| s + a * a * c * c).sqrt()
            }
            BodyKind::Polytope(p) => p.support(u),
            BodyKind::SupportSampled(s) => s.support(u),
        }
    }

    /// A point of `K` attaining the support value in direction `u`.
    pub fn support_point(&self, u: &[T]) -> Result<Vec<T>> {
        self.check_vector(u)?;
        let n = norm(u);
        if n == T::zero() {
            return Err(invalid("support point needs a nonzero direction"));
        }
        Ok(match &self.kind {
            BodyKind::Ball { radius } => u.iter().map(|&c| *radius * c / n).collect(),
            BodyKind::Cube { half_widths } => half_widths.iter().zip(u).map(|(&a, &c)| a * c.sign0()).collect(),
            BodyKind::CrossPolytope { radius } => {
                let (i, _) = u.iter().enumerate().max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap()).unwrap();
                let mut x = vec![T::zero(); self.dim];
                x[i] = *radius * u[i].sign0();
                x
            }
            BodyKind::Ellipsoid { semi_axes } => {
                let h = self.support_unchecked(u);
                semi_axes.iter().zip(u).map(|(&a, &c)| a * a * c / h).collect()
            }
            BodyKind::Polytope(p) => p.support_point(u),
            BodyKind::SupportSampled(_) => {
                // gradient of the homogeneous support function
                let step = T::lit(1e-6) * n;
                (0..self.dim)
                    .map(|i| {
                        let mut a = u.to_vec();
                        let mut b = u.to_vec();
                        a[i] = a[i] + step;
                        b[i] = b[i] - step;
                        (self.support_unchecked(&a) - self.support_unchecked(&b)) / (step + step)
                    })
                    .collect()
            }
        })
    }

    /// Minkowski functional `inf{t > 0 : x ∈ tK}`.
    pub fn gauge(&self, x: &[T]) -> Result<T> {
        self.check_vector(x)?;
        Ok(self.gauge_unchecked(x))
    }

    pub(crate) fn gauge_unchecked(&self, x: &[T]) -> T {
        match &self.kind {
            BodyKind::Ball { radius } => norm(x) / *radius,
            BodyKind::Cube { half_widths } => {
                half_widths.iter().zip(x).fold(T::zero(), |m, (&a, &c)| m.max(c.abs() / a))
            }
            BodyKind::CrossPolytope { radius } => x.iter().fold(T::zero(), |s, &c| s + c.abs()) / *radius,
            BodyKind::Ellipsoid { semi_axes } => {
                semi_axes.iter().zip(x).fold(T::zero(), |s, (&a, &c)| s + (c / a) * (c / a)).sqrt()
            }
            BodyKind::Polytope(p) => p.gauge(x),
            BodyKind::SupportSampled(s) => s.gauge(x),
        }
    }

    /// Closed membership: `gauge(x) ≤ 1`.
    pub fn contains(&self, x: &[T]) -> Result<bool> {
        Ok(self.gauge(x)? <= T::one() + boundary_tol::<T>())
    }

    /// Distance from the origin to `∂K` along `u`, i.e. `|u| / gauge(u)`.
    pub fn radial(&self, u: &[T]) -> Result<T> {
        let g = self.gauge(u)?;
        if g == T::zero() {
            return Err(invalid("radial function needs a nonzero direction"));
        }
        Ok(norm(u) / g)
    }

    /// The boundary point `u / gauge(u)`.
    pub fn boundary_point(&self, u: &[T]) -> Result<Vec<T>> {
        let g = self.gauge(u)?;
        if g == T::zero() {
            return Err(invalid("boundary point needs a nonzero direction"));
        }
        Ok(u.iter().map(|&c| c / g).collect())
    }

    /// Unit outer normal at a boundary point (a subgradient of the gauge where
    /// the boundary is not smooth).
    pub fn outer_normal(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_vector(x)?;
        let g: Vec<T> = match &self.kind {
            BodyKind::Ball { .. } => x.to_vec(),
            BodyKind::Ellipsoid { semi_axes } => semi_axes.iter().zip(x).map(|(&a, &c)| c / (a * a)).collect(),
            _ => {
                let step = T::lit(1e-7) * norm(x).max(T::one());
                (0..self.dim)
                    .map(|i| {
                        let mut a = x.to_vec();
                        let mut b = x.to_vec();
                        a[i] = a[i] + step;
                        b[i] = b[i] - step;
                        (self.gauge_unchecked(&a) - self.gauge_unchecked(&b)) / (step + step)
                    })
                    .collect()
            }
        };
        let n = norm(&g);
        if n == T::zero() {
            return Err(domain("normal undefined at the origin"));
        }
        Ok(g.into_iter().map(|c| c / n).collect())
    }

    /// `μ·K`.
    pub fn scaled(&self, mu: T) -> Result<Self> {
        check_positive("scale", mu)?;
        let kind = match &self.kind {
            BodyKind::Ball { radius } => BodyKind::Ball { radius: *radius * mu },
            BodyKind::Cube { half_widths } => {
                BodyKind::Cube { half_widths: half_widths.iter().map(|&a| a * mu).collect() }
            }
            BodyKind::CrossPolytope { radius } => BodyKind::CrossPolytope { radius: *radius * mu },
            BodyKind::Ellipsoid { semi_axes } => {
                BodyKind::Ellipsoid { semi_axes: semi_axes.iter().map(|&a| a * mu).collect() }
            }
            BodyKind::Polytope(p) => BodyKind::Polytope(p.scaled(mu)),
            BodyKind::SupportSampled(s) => BodyKind::SupportSampled(s.scaled(mu)),
        };
        Ok(Self { dim: self.dim, kind, centrally_symmetric: self.centrally_symmetric })
    }

    /// `K° = {y : ⟨x, y⟩ ≤ 1 ∀x ∈ K}`.
    pub fn polar_dual(&self) -> Result<Self> {
        let kind = match &self.kind {
            BodyKind::Ball { radius } => BodyKind::Ball { radius: T::one() / *radius },
            BodyKind::CrossPolytope { radius } => BodyKind::Cube { half_widths: vec![T::one() / *radius; self.dim] },
            BodyKind::Cube { half_widths } => {
                let a0 = half_widths[0];
                if half_widths.iter().all(|&a| a == a0) {
                    BodyKind::CrossPolytope { radius: T::one() / a0 }
                } else {
                    let mut vertices = Vec::with_capacity(2 * self.dim);
                    for (i, &a) in half_widths.iter().enumerate() {
                        for s in [T::one(), -T::one()] {
                            let mut v = vec![T::zero(); self.dim];
                            v[i] = s / a;
                            vertices.push(v);
                        }
                    }
                    let facets = box_vertices(half_widths);
                    BodyKind::Polytope(Polytope::from_parts(vertices, facets))
                }
            }
            BodyKind::Ellipsoid { semi_axes } => {
                BodyKind::Ellipsoid { semi_axes: semi_axes.iter().map(|&a| T::one() / a).collect() }
            }
            BodyKind::Polytope(p) => BodyKind::Polytope(p.polar()),
            BodyKind::SupportSampled(s) => {
                // h_{K°} is the gauge of K, evaluated on the same lattice
                let values = s.lattice().map(|(p, _)| s.gauge(&p)).collect::<Vec<T>>();
                if values.iter().any(|&v| !(v > T::zero())) {
                    return Err(domain("origin is not interior to the sampled body"));
                }
                BodyKind::SupportSampled(SampledSupport::from_values(s.dim(), s.resolution(), values)?)
            }
        };
        Ok(Self { dim: self.dim, kind, centrally_symmetric: self.centrally_symmetric })
    }

    /// Vertex list for polytopal kinds.
    pub fn vertices(&self) -> Option<Vec<Vec<T>>> {
        match &self.kind {
            BodyKind::Polytope(p) => Some(p.vertices().to_vec()),
            BodyKind::Cube { half_widths } => Some(box_vertices(half_widths)),
            BodyKind::CrossPolytope { radius } => Some(
                (0..2 * self.dim)
                    .map(|i| {
                        let mut v = vec![T::zero(); self.dim];
                        v[i / 2] = if i % 2 == 0 { *radius } else { -*radius };
                        v
                    })
                    .collect(),
            ),
            _ => None,
        }
    }

    /// `(ǩ, k̂)`: minimum and maximum of `‖x‖` over `∂K`.
    pub fn radial_extremes(&self) -> RadialExtremes<T> {
        match &self.kind {
            BodyKind::Ball { radius } => RadialExtremes { k_min: *radius, k_max: *radius },
            BodyKind::Cube { half_widths } => RadialExtremes {
                k_min: half_widths.iter().copied().fold(T::infinity(), T::min),
                k_max: norm(half_widths),
            },
            BodyKind::CrossPolytope { radius } => {
                RadialExtremes { k_min: *radius / T::from_count(self.dim).sqrt(), k_max: *radius }
            }
            BodyKind::Ellipsoid { semi_axes } => RadialExtremes {
                k_min: semi_axes.iter().copied().fold(T::infinity(), T::min),
                k_max: semi_axes.iter().copied().fold(T::zero(), T::max),
            },
            BodyKind::Polytope(p) => RadialExtremes { k_min: p.inradius(), k_max: p.circumradius() },
            BodyKind::SupportSampled(_) => {
                // inradius = min of h over the sphere, circumradius = max of h
                let h = |u: &[T]| self.support_unchecked(u) / norm(u);
                let k_min = sphere_optimize(self.dim, &h, false);
                let k_max = sphere_optimize(self.dim, &h, true);
                RadialExtremes { k_min, k_max }
            }
        }
    }

    pub fn pinching_report(&self, alpha: T) -> Result<PinchingReport<T>> {
        if !(alpha > T::one()) {
            return Err(invalid(format!("pinching constant must exceed 1, got {alpha}")));
        }
        let ext = self.radial_extremes();
        Ok(PinchingReport {
            ratio: ext.k_max / ext.k_min,
            is_alpha_pinched: ext.k_max <= alpha * ext.k_min,
            is_strict: ext.k_max < alpha * ext.k_min,
        })
    }

    fn exact_volume(&self) -> Option<T> {
        let n = self.dim;
        match &self.kind {
            BodyKind::Ball { radius } => Some(unit_ball_volume::<T>(n) * radius.powi(n as i32)),
            BodyKind::Cube { half_widths } => Some(half_widths.iter().fold(T::one(), |p, &a| p * (a + a))),
            BodyKind::CrossPolytope { radius } => {
                let fact = (1..=n).fold(T::one(), |p, k| p * T::from_count(k));
                Some(T::lit(2.0).powi(n as i32) * radius.powi(n as i32) / fact)
            }
            BodyKind::Ellipsoid { semi_axes } => {
                Some(unit_ball_volume::<T>(n) * semi_axes.iter().fold(T::one(), |p, &a| p * a))
            }
            BodyKind::Polytope(p) => p.exact_volume(n),
            BodyKind::SupportSampled(_) => None,
        }
    }

    pub fn volume(&self, method: VolumeMethod) -> Result<VolumeEstimate<T>> {
        match method {
            VolumeMethod::Exact => match self.exact_volume() {
                Some(value) => Ok(VolumeEstimate { value, std_error: T::zero(), method: VolumeMethodUsed::Exact }),
                None => {
                    let (value, std_error) = self.monte_carlo_volume(DEFAULT_MC_SAMPLES, 0)?;
                    Ok(VolumeEstimate {
                        value,
                        std_error,
                        method: VolumeMethodUsed::MonteCarloFallback { samples: DEFAULT_MC_SAMPLES, seed: 0 },
                    })
                }
            },
            VolumeMethod::MonteCarlo { samples, seed } => {
                let (value, std_error) = self.monte_carlo_volume(samples, seed)?;
                Ok(VolumeEstimate { value, std_error, method: VolumeMethodUsed::MonteCarlo { samples, seed } })
            }
        }
    }

    /// Half extents of the axis-aligned bounding box, `(h(-eᵢ), h(eᵢ))`.
    pub fn bounding_box(&self) -> Vec<(T, T)> {
        (0..self.dim)
            .map(|i| {
                let e = unit::<T>(self.dim, i);
                let m: Vec<T> = e.iter().map(|&c| -c).collect();
                (-self.support_unchecked(&m), self.support_unchecked(&e))
            })
            .collect()
    }

    /// Uniform rejection sample from the body.
    pub fn sample_interior(&self, rng: &mut sampling::SampleRng) -> Vec<T> {
        let bbox = self.bounding_box();
        loop {
            let x: Vec<T> = bbox.iter().map(|&(lo, hi)| sampling::uniform(rng, lo, hi)).collect();
            if self.gauge_unchecked(&x) <= T::one() {
                return x;
            }
        }
    }

    fn monte_carlo_volume(&self, samples: usize, seed: u64) -> Result<(T, T)> {
        if samples < 1000 {
            return Err(invalid(format!("Monte Carlo volume needs at least 1000 samples, got {samples}")));
        }
        let bbox = self.bounding_box();
        let box_volume = bbox.iter().fold(T::one(), |p, &(lo, hi)| p * (hi - lo));
        let hits: usize = sharded(samples, seed, |rng, count| {
            let mut x = vec![T::zero(); self.dim];
            (0..count)
                .filter(|_| {
                    for (c, &(lo, hi)) in x.iter_mut().zip(&bbox) {
                        *c = sampling::uniform(rng, lo, hi);
                    }
                    self.gauge_unchecked(&x) <= T::one()
                })
                .count()
        })
        .into_iter()
        .sum();
        let n = T::from_count(samples);
        let p = T::from_count(hits) / n;
        Ok((box_volume * p, box_volume * (p * (T::one() - p) / n).sqrt()))
    }

    /// `√(Vol(K)·Vol(K°))` with first-order error propagation.
    pub fn mahler_sqrt(&self, method: VolumeMethod) -> Result<MahlerEstimate<T>> {
        let dual = self.polar_dual()?;
        let dual_method = match method {
            VolumeMethod::MonteCarlo { samples, seed } => {
                VolumeMethod::MonteCarlo { samples, seed: seed.wrapping_add(1) }
            }
            m => m,
        };
        let v = self.volume(method)?;
        let w = dual.volume(dual_method)?;
        let value = (v.value * w.value).sqrt();
        let rel = ((v.std_error / v.value).powi(2) + (w.std_error / w.value).powi(2)).sqrt();
        Ok(MahlerEstimate { value, std_error: value * rel / T::lit(2.0) })
    }
}

fn box_vertices<T: Real>(half_widths: &[T]) -> Vec<Vec<T>> {
    let n = half_widths.len();
    (0..1usize << n)
        .map(|mask| half_widths.iter().enumerate().map(|(i, &a)| if mask >> i & 1 == 1 { -a } else { a }).collect())
        .collect()
}

/// Volume of the unit Euclidean ball, `π^{n/2} / Γ(n/2 + 1)`.
pub fn unit_ball_volume<T: Real>(n: usize) -> T {
    let two_pi = T::PI() + T::PI();
    let mut v = if n.is_multiple_of(2) { T::one() } else { T::lit(2.0) };
    let mut k = if n.is_multiple_of(2) { 2 } else { 3 };
    while k <= n {
        v = v * two_pi / T::from_count(k);
        k += 2;
    }
    v
}

/// Spherical coordinates → unit vector (dimension 2 or 3).
pub(crate) fn sphere_point<T: Real>(dim: usize, angles: &[T]) -> Vec<T> {
    match dim {
        1 => vec![angles[0].cos().sign0()],
        2 => vec![angles[0].cos(), angles[0].sin()],
        _ => {
            let (az, pol) = (angles[0], angles[1]);
            vec![pol.sin() * az.cos(), pol.sin() * az.sin(), pol.cos()]
        }
    }
}

/// Extremum of a function on the unit sphere (dimension 2 or 3): grid scan,
/// then compass search from the 32 best grid points down to step 1e-9.
pub(crate) fn sphere_optimize<T: Real>(dim: usize, f: &dyn Fn(&[T]) -> T, maximize: bool) -> T {
    let sign = if maximize { -T::one() } else { T::one() };
    let obj = |a: &[T]| sign * f(&sphere_point(dim, a));
    let params = if dim == 2 { 1 } else { 2 };
    let mut grid: Vec<(T, Vec<T>)> = Vec::new();
    let res = 720;
    if params == 1 {
        for i in 0..res {
            let a = vec![T::lit(std::f64::consts::TAU * i as f64 / res as f64)];
            grid.push((obj(&a), a));
        }
    } else {
        let rows = 120;
        for i in 0..=rows {
            let pol = T::lit(std::f64::consts::PI * i as f64 / rows as f64);
            for j in 0..2 * rows {
                let a = vec![T::lit(std::f64::consts::PI * j as f64 / rows as f64), pol];
                grid.push((obj(&a), a));
            }
        }
    }
    grid.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut best = grid[0].0;
    for (start_val, start) in grid.into_iter().take(32) {
        let (val, _) = compass_search(&obj, start, start_val, T::lit(0.01), T::lit(1e-9));
        best = best.min(val);
    }
    sign * best
}

pub(crate) fn compass_search<T: Real>(
    f: &dyn Fn(&[T]) -> T,
    mut x: Vec<T>,
    mut fx: T,
    mut step: T,
    tol: T,
) -> (T, Vec<T>) {
    let two = T::lit(2.0);
    while step > tol {
        let mut improved = false;
        for i in 0..x.len() {
            for s in [step, -step] {
                let mut y = x.clone();
                y[i] = y[i] + s;
                let fy = f(&y);
                if fy < fx {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            step = step / two;
        }
    }
    (fx, x)
}

impl<T: Real> ConvexBody<T> {
    /// Convenience accessor used by tests and reports.
    pub fn exact_volume_if_known(&self) -> Option<T> {
        self.exact_volume()
    }
}

impl<T: Real> std::fmt::Display for ConvexBody<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            BodyKind::Ball { radius } => write!(f, "D^{}({radius})", self.dim),
            BodyKind::Cube { half_widths } => {
                let s: Vec<String> = half_widths.iter().map(|a| a.to_string()).collect();
                write!(f, "cube^{}({})", self.dim, s.join(","))
            }
            BodyKind::CrossPolytope { radius } => write!(f, "diamond^{}({radius})", self.dim),
            BodyKind::Ellipsoid { semi_axes } => {
                let s: Vec<String> = semi_axes.iter().map(|a| a.to_string()).collect();
                write!(f, "ellipsoid({})", s.join(","))
            }
            BodyKind::Polytope(p) => write!(f, "polytope[{} vertices]", p.vertices().len()),
            BodyKind::SupportSampled(s) => write!(f, "support_sampled^{}[N={}]", self.dim, s.resolution()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use std::f64::consts::PI;

    fn sq() -> ConvexBody<f64> {
        ConvexBody::<f64>::cube(&[1.0, 1.0]).unwrap()
    }

    #[test]
    fn support_examples() {
        assert_eq!(sq().support(&[1.0, 0.0]).unwrap(), 1.0);
        let d = ConvexBody::<f64>::cross_polytope(2, 1.0).unwrap();
        assert_eq!(d.support(&[1.0, 1.0]).unwrap(), 1.0);
        let b = ConvexBody::<f64>::ball(3, 2.5).unwrap();
        assert!((b.support(&[0.6, 0.0, 0.8]).unwrap() - 2.5).abs() < 1e-15);
    }

    #[test]
    fn zero_direction_is_invalid() {
        assert!(matches!(sq().support(&[0.0, 0.0]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn dimension_mismatch_is_invalid() {
        assert!(matches!(sq().contains(&[0.0, 0.0, 0.0]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn polar_dual_examples() {
        let dual = ConvexBody::<f64>::unit_cube(3).unwrap().polar_dual().unwrap();
        assert_eq!(dual.kind(), &BodyKind::CrossPolytope { radius: 1.0 });
        let dual = ConvexBody::<f64>::ball(4, 1.0).unwrap().polar_dual().unwrap();
        assert_eq!(dual.kind(), &BodyKind::Ball { radius: 1.0 });
        let dual = ConvexBody::<f64>::ellipsoid(&[1.0, 2.0]).unwrap().polar_dual().unwrap();
        assert_eq!(dual.kind(), &BodyKind::Ellipsoid { semi_axes: vec![1.0, 0.5] });
    }

    #[test]
    fn unequal_cube_dual_is_a_polytope() {
        let k = ConvexBody::<f64>::cube(&[1.0, 2.0]).unwrap();
        let d = k.polar_dual().unwrap();
        assert!(matches!(d.kind(), BodyKind::Polytope(_)));
        for u in [[1.0, 0.3], [-0.2, 1.0], [0.7, -0.7]] {
            assert!((d.support(&u).unwrap() - k.gauge(&u).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn radial_extremes_examples() {
        let r = ConvexBody::<f64>::ball(2, 0.7).unwrap().radial_extremes();
        assert_eq!((r.k_min, r.k_max), (0.7, 0.7));
        let r = sq().radial_extremes();
        assert_eq!(r.k_min, 1.0);
        assert!((r.k_max - 2f64.sqrt()).abs() < 1e-15);
        let r = ConvexBody::<f64>::ellipsoid(&[1.0, 2.0]).unwrap().radial_extremes();
        assert_eq!((r.k_min, r.k_max), (1.0, 2.0));
    }

    #[test]
    fn pinching_examples() {
        let p = ConvexBody::<f64>::ball(2, 1.0).unwrap().pinching_report(1.01).unwrap();
        assert!(p.is_alpha_pinched && p.ratio == 1.0);
        let alpha = (4.0 / PI).powf(2.0 / 3.0);
        assert!((alpha - 1.174_735_461_986_454).abs() < 1e-12);
        let p = ConvexBody::<f64>::ellipsoid(&[1.0, 1.1]).unwrap().pinching_report(alpha).unwrap();
        assert!(p.is_alpha_pinched && (p.ratio - 1.1).abs() < 1e-12);
        let p = sq().pinching_report(1.2).unwrap();
        assert!(!p.is_alpha_pinched && !p.is_strict);
        assert!(matches!(sq().pinching_report(1.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn exact_volumes() {
        let v = ConvexBody::<f64>::cross_polytope(2, 1.0).unwrap().volume(VolumeMethod::Exact).unwrap();
        assert_eq!(v.value, 2.0);
        let v = ConvexBody::<f64>::unit_cube(3).unwrap().volume(VolumeMethod::Exact).unwrap();
        assert_eq!(v.value, 8.0);
        assert!((unit_ball_volume::<f64>(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((unit_ball_volume::<f64>(4) - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn monte_carlo_ellipsoid_volume() {
        let e = ConvexBody::<f64>::ellipsoid(&[1.0, 2.0]).unwrap();
        let v = e.volume(VolumeMethod::MonteCarlo { samples: 1_000_000, seed: 0 }).unwrap();
        assert!((v.value - 2.0 * PI).abs() <= 3.0 * v.std_error, "{v:?}");
        assert!(v.std_error > 0.0);
    }

    #[test]
    fn too_few_samples_rejected() {
        let e = ConvexBody::<f64>::ellipsoid(&[1.0, 2.0]).unwrap();
        assert!(e.volume(VolumeMethod::MonteCarlo { samples: 10, seed: 0 }).is_err());
    }

    #[test]
    fn sampled_kind_falls_back_to_monte_carlo() {
        let s = ConvexBody::<f64>::from_support_fn(2, 16, true, |u| u[0].abs() + u[1].abs()).unwrap();
        let v = s.volume(VolumeMethod::Exact).unwrap();
        assert!(matches!(v.method, VolumeMethodUsed::MonteCarloFallback { .. }));
        assert!((v.value - 4.0).abs() < 4.0 * v.std_error + 1e-9);
    }

    #[test]
    fn mahler_examples() {
        let m = ConvexBody::<f64>::ball(2, 1.0).unwrap().mahler_sqrt(VolumeMethod::Exact).unwrap();
        assert!((m.value - PI).abs() < 1e-14);
        let m = sq().mahler_sqrt(VolumeMethod::Exact).unwrap();
        assert!((m.value - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        let m = ConvexBody::<f64>::ellipsoid(&[1.0, 1.1]).unwrap().mahler_sqrt(VolumeMethod::Exact).unwrap();
        assert!(m.value >= PI / 1.1 && m.value <= 1.1 * PI);
    }

    #[test]
    fn membership_examples() {
        assert!(sq().contains(&[0.5, -0.9]).unwrap());
        assert!(!ConvexBody::<f64>::cross_polytope(2, 1.0).unwrap().contains(&[0.6, 0.6]).unwrap());
        let b = ConvexBody::<f64>::ball(2, 1.0).unwrap();
        let t = 0.3f64;
        assert!(b.contains(&[t.cos(), t.sin()]).unwrap());
    }

    #[test]
    fn sampled_radial_extremes_match_square() {
        let s = ConvexBody::<f64>::from_support_fn(2, 32, true, |u| u[0].abs() + u[1].abs()).unwrap();
        let r = s.radial_extremes();
        assert!((r.k_min - 1.0).abs() < 1e-8, "{r:?}");
        assert!((r.k_max - 2f64.sqrt()).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn f32_bodies_work() {
        let b = ConvexBody::<f32>::ellipsoid(&[1.0, 2.0]).unwrap();
        assert!((b.support(&[0.0, 1.0]).unwrap() - 2.0).abs() < 1e-6);
        assert!(b.contains(&[0.0, 1.999]).unwrap());
        let d = b.polar_dual().unwrap();
        assert!((d.volume(VolumeMethod::Exact).unwrap().value - std::f32::consts::PI / 2.0).abs() < 1e-5);
    }
}
