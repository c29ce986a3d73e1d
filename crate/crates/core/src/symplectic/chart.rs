use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

pub type FormFn<T> = Arc<dyn Fn(&[T]) -> Matrix<T> + Send + Sync>;
pub type Predicate<T> = Arc<dyn Fn(&[T]) -> bool + Send + Sync>;

/// Polar charts exclude `r ≤ R_MIN`.
pub const R_MIN: f64 = 1e-6;

/// A coordinate chart carrying the coefficient matrix `Ω(q)` of the
/// symplectic form, `ω(u, v) = uᵀ Ω(q) v`.
#[derive(Clone)]
pub struct Chart<T = f64> {
    name: String,
    dim: usize,
    form: FormFn<T>,
    domain: Predicate<T>,
}

impl<T> fmt::Debug for Chart<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart").field("name", &self.name).field("dim", &self.dim).finish()
    }
}

/// Adds `c · dyᵢ∧dxⱼ`-style terms: `ω(u,v) += c (u_a v_b − u_b v_a)`.
fn add_pair<T: Real>(m: &mut Matrix<T>, a: usize, b: usize, c: T) {
    m[(a, b)] = m[(a, b)] + c;
    m[(b, a)] = m[(b, a)] - c;
}

impl<T: Real> Chart<T> {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        form: impl Fn(&[T]) -> Matrix<T> + Send + Sync + 'static,
        domain: impl Fn(&[T]) -> bool + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), dim, form: Arc::new(form), domain: Arc::new(domain) }
    }

    /// Chart with a constant form and no domain restriction.
    pub fn constant(name: impl Into<String>, form: Matrix<T>) -> Self {
        let dim = form.rows();
        Self::new(name, dim, move |_| form.clone(), move |q: &[T]| q.len() == dim)
    }

    /// Same form, domain narrowed to points also satisfying `pred`.
    pub fn with_domain(self, name: impl Into<String>, pred: impl Fn(&[T]) -> bool + Send + Sync + 'static) -> Self {
        let outer = self.domain.clone();
        Self { name: name.into(), domain: Arc::new(move |q: &[T]| outer(q) && pred(q)), ..self }
    }

    /// `(x₁..xₙ, y₁..yₙ)` with `Σ dyᵢ∧dxᵢ`.
    pub fn cartesian(n: usize) -> Self {
        let mut m = Matrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            add_pair(&mut m, n + i, i, T::one());
        }
        Self::constant(format!("cartesian{}", 2 * n), m)
    }

    /// `(x₁, y₁, x₂, y₂, ..)` with `Σ dyᵢ∧dxᵢ`.
    pub fn paired(n: usize) -> Self {
        Self::constant(format!("paired{}", 2 * n), paired_form(n))
    }

    /// `(ρ, φ, x₂, y₂, ..)`: polar coordinates in the first factor with
    /// `−ρ dρ∧dφ + Σ dyᵢ∧dxᵢ`.
    pub fn polar_first(n: usize) -> Self {
        let dim = 2 * n;
        Self::new(
            format!("polar_first{dim}"),
            dim,
            move |q: &[T]| {
                let mut m = paired_form(n);
                m[(0, 1)] = -q[0];
                m[(1, 0)] = q[0];
                m
            },
            move |q: &[T]| q.len() == dim && q[0] > T::lit(R_MIN),
        )
    }

    /// `(r, θ, x₃..xₙ, p_r, p_θ, y₃..yₙ)`: polar coordinates on the first
    /// position plane with `dp_r∧dr + dp_θ∧dθ + Σ dyᵢ∧dxᵢ`.
    pub fn polar_cotangent(n: usize) -> Self {
        let mut m = Matrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            add_pair(&mut m, n + i, i, T::one());
        }
        let dim = 2 * n;
        Self::new(
            format!("polar_cotangent{dim}"),
            dim,
            move |_| m.clone(),
            move |q: &[T]| q.len() == dim && q[0] > T::lit(R_MIN),
        )
    }

    /// `(z, θ, p_z, p_θ)` with `dp_z∧dz + dp_θ∧dθ`.
    pub fn cylinder_cotangent() -> Self {
        let mut c = Self::cartesian(2);
        c.name = "cylinder_cotangent".into();
        c
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains(&self, q: &[T]) -> bool {
        q.len() == self.dim && q.iter().all(|c| c.is_finite()) && (self.domain)(q)
    }

    pub fn form_matrix(&self, q: &[T]) -> Result<Matrix<T>> {
        if !self.contains(q) {
            return Err(domain(format!("point outside the domain of chart {}", self.name)));
        }
        Ok((self.form)(q))
    }

    pub(crate) fn form_unchecked(&self, q: &[T]) -> Matrix<T> {
        (self.form)(q)
    }
}

fn paired_form<T: Real>(n: usize) -> Matrix<T> {
    let mut m = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        add_pair(&mut m, 2 * i + 1, 2 * i, T::one());
    }
    m
}
