//! Vertex-described polytopes with an origin-interior facet description.
//!
//! A facet is stored as its "polar vertex" `p`, i.e. the body is
//! `{x : ⟨p, x⟩ ≤ 1 for every facet p}`. Polarity then just swaps the two
//! lists.

use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, norm, Matrix};
use crate::scalar::Real;

/// Upper bound on the number of vertex subsets examined by facet enumeration.
const MAX_SUBSETS: u128 = 4_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Polytope<T> {
    pub(crate) vertices: Vec<Vec<T>>,
    pub(crate) facets: Vec<Vec<T>>,
}

impl<T: Real> Polytope<T> {
    /// Builds the polytope `conv(vertices)`; fails unless the origin is interior.
    pub fn from_vertices(dim: usize, vertices: Vec<Vec<T>>) -> Result<Self> {
        if vertices.iter().any(|v| v.len() != dim) {
            return Err(invalid("vertex dimension does not match body dimension"));
        }
        if vertices.len() < dim + 1 {
            return Err(Error::Domain(format!(
                "{} vertices cannot span a full-dimensional polytope in R^{dim}",
                vertices.len()
            )));
        }
        let facets = enumerate_facets(dim, &vertices)?;
        let vertices = extreme_points(&vertices, &facets);
        Ok(Self { vertices, facets })
    }

    pub(crate) fn from_parts(vertices: Vec<Vec<T>>, facets: Vec<Vec<T>>) -> Self {
        Self { vertices, facets }
    }

    pub fn vertices(&self) -> &[Vec<T>] {
        &self.vertices
    }

    /// Facet normals scaled so that the facet is `⟨p, x⟩ = 1`.
    pub fn facet_polars(&self) -> &[Vec<T>] {
        &self.facets
    }

    pub fn support(&self, u: &[T]) -> T {
        self.vertices.iter().map(|v| dot(v, u)).fold(T::neg_infinity(), T::max)
    }

    pub fn support_point(&self, u: &[T]) -> Vec<T> {
        self.vertices
            .iter()
            .max_by(|a, b| dot(a, u).partial_cmp(&dot(b, u)).unwrap())
            .cloned()
            .expect("polytope has vertices")
    }

    pub fn gauge(&self, x: &[T]) -> T {
        self.facets.iter().map(|p| dot(p, x)).fold(T::zero(), T::max)
    }

    pub fn polar(&self) -> Self {
        Self { vertices: self.facets.clone(), facets: self.vertices.clone() }
    }

    pub fn scaled(&self, mu: T) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| v.iter().map(|&c| c * mu).collect()).collect(),
            facets: self.facets.iter().map(|p| p.iter().map(|&c| c / mu).collect()).collect(),
        }
    }

    /// Largest vertex norm.
    pub fn circumradius(&self) -> T {
        self.vertices.iter().map(|v| norm(v)).fold(T::zero(), T::max)
    }

    /// Distance from the origin to the nearest facet hyperplane.
    pub fn inradius(&self) -> T {
        self.facets.iter().map(|p| T::one() / norm(p)).fold(T::infinity(), T::min)
    }

    /// Exact volume for dimensions up to 3.
    pub fn exact_volume(&self, dim: usize) -> Option<T> {
        match dim {
            1 => {
                let hi = self.vertices.iter().map(|v| v[0]).fold(T::neg_infinity(), T::max);
                let lo = self.vertices.iter().map(|v| v[0]).fold(T::infinity(), T::min);
                Some(hi - lo)
            }
            2 => Some(polygon_area(&order_by_angle(&self.vertices))),
            3 => Some(self.volume_3d()),
            _ => None,
        }
    }

    fn volume_3d(&self) -> T {
        let tol = T::lit(1e-9);
        let mut total = T::zero();
        for p in &self.facets {
            let on: Vec<&Vec<T>> = self.vertices.iter().filter(|v| (dot(p, v) - T::one()).abs() <= tol).collect();
            if on.len() < 3 {
                continue;
            }
            let pn = norm(p);
            let n: Vec<T> = p.iter().map(|&c| c / pn).collect();
            let centroid: Vec<T> =
                (0..3).map(|i| on.iter().fold(T::zero(), |s, v| s + v[i]) / T::from_count(on.len())).collect();
            // orthonormal frame in the facet plane
            let e1 = {
                let d: Vec<T> = (0..3).map(|i| on[0][i] - centroid[i]).collect();
                let dn = norm(&d);
                d.into_iter().map(|c| c / dn).collect::<Vec<T>>()
            };
            let e2 = cross(&n, &e1);
            let mut pts: Vec<(T, T)> = on
                .iter()
                .map(|v| {
                    let d: Vec<T> = (0..3).map(|i| v[i] - centroid[i]).collect();
                    (dot(&d, &e1), dot(&d, &e2))
                })
                .collect();
            pts.sort_by(|a, b| a.1.atan2(a.0).partial_cmp(&b.1.atan2(b.0)).unwrap());
            let mut area = T::zero();
            for i in 0..pts.len() {
                let (x0, y0) = pts[i];
                let (x1, y1) = pts[(i + 1) % pts.len()];
                area = area + (x0 * y1 - x1 * y0);
            }
            let area = area.abs() / T::lit(2.0);
            // cone over the facet with apex at the origin; height = 1/|p|
            total = total + area / (T::lit(3.0) * pn);
        }
        total
    }
}

fn cross<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    vec![a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn order_by_angle<T: Real>(pts: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut v = pts.to_vec();
    v.sort_by(|a, b| a[1].atan2(a[0]).partial_cmp(&b[1].atan2(b[0])).unwrap());
    v
}

pub(crate) fn polygon_area<T: Real>(ordered: &[Vec<T>]) -> T {
    let n = ordered.len();
    let mut s = T::zero();
    for i in 0..n {
        let a = &ordered[i];
        let b = &ordered[(i + 1) % n];
        s = s + (a[0] * b[1] - b[0] * a[1]);
    }
    s.abs() / T::lit(2.0)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Hyperplanes through `dim`-subsets of vertices that leave every vertex on
/// one side; each is returned as the polar vertex `a / b`.
fn enumerate_facets<T: Real>(dim: usize, vertices: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let m = vertices.len();
    if binomial(m, dim) > MAX_SUBSETS {
        return Err(invalid(format!("polytope with {m} vertices in R^{dim} is too large for facet enumeration")));
    }
    let scale = vertices.iter().map(|v| norm(v)).fold(T::zero(), T::max).max(T::one());
    let tol = T::lit(1e-10) * scale;
    let mut facets: Vec<Vec<T>> = Vec::new();
    let mut combo: Vec<usize> = (0..dim).collect();
    loop {
        if let Some(normal) = hyperplane_normal(dim, vertices, &combo) {
            let nn = norm(&normal);
            if nn > tol * tol {
                let normal: Vec<T> = normal.into_iter().map(|c| c / nn).collect();
                let b = dot(&normal, &vertices[combo[0]]);
                let (mut above, mut below) = (false, false);
                for v in vertices {
                    let s = dot(&normal, v) - b;
                    above |= s > tol;
                    below |= s < -tol;
                }
                if !(above && below) {
                    let (normal, b) = if above { (normal.iter().map(|&c| -c).collect(), -b) } else { (normal, b) };
                    if b <= tol {
                        return Err(Error::Domain("origin is not interior to the polytope".into()));
                    }
                    let polar: Vec<T> = normal.iter().map(|&c| c / b).collect();
                    if !facets.iter().any(|f| crate::linalg::max_abs_diff(f, &polar) <= T::lit(1e-9) * norm(&polar)) {
                        facets.push(polar);
                    }
                }
            }
        }
        if !next_combination(&mut combo, m) {
            break;
        }
    }
    if facets.len() < dim + 1 {
        return Err(Error::Domain("vertex set is not full-dimensional".into()));
    }
    Ok(facets)
}

fn hyperplane_normal<T: Real>(dim: usize, vertices: &[Vec<T>], combo: &[usize]) -> Option<Vec<T>> {
    if dim == 1 {
        return Some(vec![T::one()]);
    }
    let base = &vertices[combo[0]];
    let rows: Vec<Vec<T>> =
        combo[1..].iter().map(|&i| vertices[i].iter().zip(base).map(|(&a, &b)| a - b).collect()).collect();
    // generalized cross product via cofactors
    let mut normal = Vec::with_capacity(dim);
    for j in 0..dim {
        let minor: Vec<Vec<T>> =
            rows.iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect()).collect();
        let d = Matrix::from_rows(&minor).det();
        normal.push(if j % 2 == 0 { d } else { -d });
    }
    Some(normal)
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Drops input points that are not vertices of the hull.
fn extreme_points<T: Real>(points: &[Vec<T>], facets: &[Vec<T>]) -> Vec<Vec<T>> {
    let tol = T::lit(1e-9);
    let mut out: Vec<Vec<T>> = Vec::new();
    for v in points {
        let tight: Vec<&Vec<T>> = facets.iter().filter(|p| (dot(p, v) - T::one()).abs() <= tol).collect();
        // a vertex lies on at least `dim` facets with linearly independent normals
        let dim = v.len();
        if tight.len() >= dim && rank(&tight) == dim && !out.iter().any(|o| crate::linalg::max_abs_diff(o, v) <= tol) {
            out.push(v.clone());
        }
    }
    out
}

fn rank<T: Real>(rows: &[&Vec<T>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut a: Vec<Vec<T>> = rows.iter().map(|r| (*r).clone()).collect();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap()) else {
            break;
        };
        if a[p][c].abs() <= T::lit(1e-10) {
            continue;
        }
        a.swap(r, p);
        for i in r + 1..a.len() {
            let f = a[i][c] / a[r][c];
            let (top, bottom) = a.split_at_mut(i);
            for (x, &v) in bottom[0][c..cols].iter_mut().zip(&top[r][c..cols]) {
                *x = *x - f * v;
            }
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    r
}
