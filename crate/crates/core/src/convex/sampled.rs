//! Support functions tabulated on the integer lattice of the ℓ¹ sphere.
//!
//! The directions are the integer vectors `p` with `|p|₁ = N` (N is the
//! resolution). They form a geodesic-style grid: 4N points on the circle,
//! 4N² + 2 on the 2-sphere (each octant face of the octahedron subdivided
//! into N² triangles). A direction `u` is projected to `N·u/|u|₁` and the
//! tabulated values are interpolated barycentrically, then extended
//! positively homogeneously.

use std::collections::HashMap;

use crate::error::{invalid, Result};
use crate::linalg::dot;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct SampledSupport<T> {
    dim: usize,
    resolution: usize,
    points: Vec<Vec<i32>>,
    values: Vec<T>,
    index: HashMap<Vec<i32>, usize>,
}

/// Lattice directions in canonical (lexicographic) order.
pub fn lattice_directions(dim: usize, resolution: usize) -> Vec<Vec<i32>> {
    let n = resolution as i32;
    let mut out = Vec::new();
    let mut cur = vec![-n; dim];
    loop {
        if cur.iter().map(|c| c.abs()).sum::<i32>() == n {
            out.push(cur.clone());
        }
        let mut i = dim;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n {
                cur[i] += 1;
                for c in cur.iter_mut().skip(i + 1) {
                    *c = -n;
                }
                break;
            }
        }
    }
}

impl<T: Real> SampledSupport<T> {
    /// `values[k]` is the support value at the lattice vector `lattice_directions(dim, N)[k]`
    /// itself (not at its normalization).
    pub fn from_values(dim: usize, resolution: usize, values: Vec<T>) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(invalid("support_sampled bodies are limited to dimension 2 or 3"));
        }
        if resolution == 0 {
            return Err(invalid("resolution must be positive"));
        }
        let points = lattice_directions(dim, resolution);
        if points.len() != values.len() {
            return Err(invalid(format!(
                "support table needs {} values for dim {dim} at resolution {resolution}, got {}",
                points.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !(*v > T::zero()) || !v.is_finite()) {
            return Err(crate::error::domain("support values must be positive (origin interior)"));
        }
        let index = points.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        Ok(Self { dim, resolution, points, values, index })
    }

    pub fn from_fn(dim: usize, resolution: usize, f: impl Fn(&[T]) -> T) -> Result<Self> {
        let pts = lattice_directions(dim, resolution);
        let values = pts.iter().map(|p| f(&to_real::<T>(p))).collect();
        Self::from_values(dim, resolution, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn lattice(&self) -> impl Iterator<Item = (Vec<T>, T)> + '_ {
        self.points.iter().zip(&self.values).map(|(p, &v)| (to_real(p), v))
    }

    fn value_at(&self, p: &[i32]) -> T {
        self.values[self.index[p]]
    }

    pub fn support(&self, u: &[T]) -> T {
        let l1 = u.iter().fold(T::zero(), |s, &c| s + c.abs());
        let n = T::from_count(self.resolution);
        let q: Vec<T> = u.iter().map(|&c| c.abs() * n / l1).collect();
        let signs: Vec<i32> = u.iter().map(|&c| if c < T::zero() { -1 } else { 1 }).collect();
        let nn = self.resolution as i32;
        let signed = |a: &[i32]| -> Vec<i32> { a.iter().zip(&signs).map(|(&x, &s)| x * s).collect() };
        let h = match self.dim {
            2 => {
                let i = (q[0].floor().to_i32().unwrap_or(0)).clamp(0, nn - 1);
                let f = q[0] - T::from(i).unwrap();
                let a = self.value_at(&signed(&[i, nn - i]));
                let b = self.value_at(&signed(&[i + 1, nn - i - 1]));
                a * (T::one() - f) + b * f
            }
            _ => {
                let i = q[0].floor().to_i32().unwrap_or(0).clamp(0, nn);
                let j = q[1].floor().to_i32().unwrap_or(0).clamp(0, nn - i);
                if i + j == nn {
                    self.value_at(&signed(&[i, j, 0]))
                } else {
                    let f1 = q[0] - T::from(i).unwrap();
                    let f2 = q[1] - T::from(j).unwrap();
                    let k = nn - i - j;
                    if f1 + f2 <= T::one() {
                        let w0 = T::one() - f1 - f2;
                        self.value_at(&signed(&[i, j, k])) * w0
                            + self.value_at(&signed(&[i + 1, j, k - 1])) * f1
                            + self.value_at(&signed(&[i, j + 1, k - 1])) * f2
                    } else {
                        self.value_at(&signed(&[i + 1, j + 1, k - 2])) * (f1 + f2 - T::one())
                            + self.value_at(&signed(&[i, j + 1, k - 1])) * (T::one() - f1)
                            + self.value_at(&signed(&[i + 1, j, k - 1])) * (T::one() - f2)
                    }
                }
            }
        };
        h * l1 / n
    }

    /// Gauge of the body cut out by the tabulated half-spaces.
    pub fn gauge(&self, x: &[T]) -> T {
        self.points.iter().zip(&self.values).map(|(p, &h)| dot(&to_real::<T>(p), x) / h).fold(T::zero(), T::max)
    }

    pub fn scaled(&self, mu: T) -> Self {
        Self { values: self.values.iter().map(|&v| v * mu).collect(), ..self.clone() }
    }
}

pub(crate) fn to_real<T: Real>(p: &[i32]) -> Vec<T> {
    p.iter().map(|&c| T::from(c).unwrap()).collect()
}
