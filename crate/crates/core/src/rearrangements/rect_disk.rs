use crate::error::{invalid, Result};
use crate::scalar::Real;
use crate::symplectic::{Chart, SymplecticMapSpec};

/// Area-preserving embedding of the rectangle
/// `[x₀−a, x₀+a] × [y₀−b, y₀+b]` into the disk of area `4ab + ε`.
///
/// Rows of the rectangle become concentric circles: the row at height `y`
/// goes to the circle enclosing area `ε/2 + 2a(y − y₀ + b)`, traversed so
/// that `x` runs once around it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectToDisk<T = f64> {
    pub x0: T,
    pub y0: T,
    pub a: T,
    pub b: T,
    pub eps: T,
}

impl<T: Real> RectToDisk<T> {
    pub fn new(x0: T, y0: T, a: T, b: T, eps: T) -> Result<Self> {
        if !(a > T::zero() && b > T::zero() && eps > T::zero()) {
            return Err(invalid("rectangle half-widths and eps must be positive"));
        }
        Ok(Self { x0, y0, a, b, eps })
    }

    /// Capacity of the target disk.
    pub fn target_area(&self) -> T {
        T::lit(4.0) * self.a * self.b + self.eps
    }

    pub fn apply(&self, x: T, y: T) -> [T; 2] {
        let two = T::lit(2.0);
        let area = self.eps / two + two * self.a * (y - self.y0 + self.b);
        let s = (self.x0 + self.a - x) / (two * self.a);
        let r = (area.max(T::zero()) / T::PI()).sqrt();
        let phi = (T::PI() + T::PI()) * s;
        [r * phi.cos(), r * phi.sin()]
    }

    /// `πr² < 4ab + ε`.
    pub fn in_target(&self, p: &[T]) -> bool {
        T::PI() * (p[0] * p[0] + p[1] * p[1]) < self.target_area()
    }

    pub fn contains_source(&self, x: T, y: T) -> bool {
        (x - self.x0).abs() <= self.a && (y - self.y0).abs() <= self.b
    }

    pub fn map_spec(&self) -> SymplecticMapSpec<T> {
        let m = *self;
        SymplecticMapSpec::new("rect_to_disk", Chart::cartesian(1), Chart::cartesian(1), move |q: &[T]| {
            m.apply(q[0], q[1]).to_vec()
        })
        .with_containment(move |p: &[T]| m.in_target(p))
    }
}

/// `[−a, a] × [−1, 1]` into `B²(4a + ε)`.
pub fn rect_to_disk<T: Real>(a: T, eps: T) -> Result<SymplecticMapSpec<T>> {
    Ok(RectToDisk::new(T::zero(), T::zero(), a, T::one(), eps)?.map_spec())
}
