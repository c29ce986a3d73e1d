use serde::Serialize;

use crate::error::{domain, invalid, precondition, Result};
use crate::sampling::{sharded, uniform, SampleRng};
use crate::scalar::Real;
use crate::symplectic::{Chart, SymplecticMapSpec};

/// Area-preserving map from `B²(4)` onto nested rectangles.
///
/// The circle of area `a` goes to the boundary of
/// `R_a = {|x| ≤ X(a), |y| ≤ Y(a)}` with `X(a) = 1 − w + w·a/8` and
/// `Y(a) = a / (4 X(a))`, so `R_a` has area `a` and the family is strictly
/// nested. Angles are transported by swept area within each quadrant, which
/// makes the map symmetric under `x ↦ −x` and `y ↦ −y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaMap<T = f64> {
    n: usize,
    eps: T,
    w: T,
}

impl<T: Real> SigmaMap<T> {
    /// Connector width `w = ε / (2n)`; requires `0 < ε < 2n`.
    pub fn new(n: usize, eps: T) -> Result<Self> {
        if n == 0 {
            return Err(invalid("dimension must be positive"));
        }
        let two_n = T::from_count(2 * n);
        if !(eps > T::zero() && eps < two_n) {
            return Err(invalid(format!("eps must lie in (0, {}), got {eps}", 2 * n)));
        }
        Ok(Self { n, eps, w: eps / two_n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn w(&self) -> T {
        self.w
    }

    pub fn half_width(&self, a: T) -> T {
        T::one() - self.w + self.w * a / T::lit(8.0)
    }

    pub fn half_height(&self, a: T) -> T {
        a / (T::lit(4.0) * self.half_width(a))
    }

    fn dx(&self) -> T {
        self.w / T::lit(8.0)
    }

    fn dy(&self, a: T) -> T {
        let x = self.half_width(a);
        (T::one() - self.w) / (T::lit(4.0) * x * x)
    }

    /// Corners of `R_a`, counter-clockwise from the first quadrant.
    pub fn curve(&self, a: T) -> Vec<[T; 2]> {
        let (x, y) = (self.half_width(a), self.half_height(a));
        vec![[x, y], [-x, y], [-x, -y], [x, -y]]
    }

    /// Quarter-turn parameter `τ ∈ [0, 1/4]` at which the side meets the bar.
    pub fn corner_tau(&self, a: T) -> T {
        self.dx() * self.half_height(a)
    }

    /// `σ(z)` for `z ∈ B²(4)`.
    pub fn apply(&self, z: [T; 2]) -> Result<[T; 2]> {
        let a = T::PI() * (z[0] * z[0] + z[1] * z[1]);
        if !(a < T::lit(4.0)) {
            return Err(domain("point outside B²(4)"));
        }
        if a == T::zero() {
            return Ok([T::zero(), T::zero()]);
        }
        let tau = z[1].abs().atan2(z[0].abs()) / (T::PI() + T::PI());
        let (x, y) = if tau <= self.corner_tau(a) {
            (self.half_width(a), tau / self.dx())
        } else {
            ((T::lit(0.25) - tau) / self.dy(a), self.half_height(a))
        };
        Ok([x * z[0].sign0(), y * z[1].sign0()])
    }

    /// Closed-form inverse; `None` outside the image. Points of the segment
    /// `{y = 0, |x| < 1 − w}` collapse to the origin.
    pub fn inverse(&self, p: [T; 2]) -> Option<[T; 2]> {
        let (ax, ay) = (p[0].abs(), p[1].abs());
        let one = T::one();
        let w = self.w;
        if ay == T::zero() && ax < one - w {
            return Some([T::zero(), T::zero()]);
        }
        let a_bar = T::lit(4.0) * ay * (one - w) / (one - w * ay / T::lit(2.0));
        let (a, tau) = if ax <= self.half_width(a_bar) {
            (a_bar, T::lit(0.25) - ax * self.dy(a_bar))
        } else {
            (T::lit(8.0) * (ax - one + w) / w, ay * self.dx())
        };
        if !(a >= T::zero() && a < T::lit(4.0)) {
            return None;
        }
        let r = (a / T::PI()).sqrt();
        let psi = (T::PI() + T::PI()) * tau;
        Some([r * psi.cos() * p[0].sign0(), r * psi.sin() * p[1].sign0()])
    }

    pub fn map_spec(&self) -> SymplecticMapSpec<T> {
        let m = *self;
        let four = T::lit(4.0);
        SymplecticMapSpec::new(
            "sigma",
            Chart::cartesian(1).with_domain("disk4", move |q: &[T]| T::PI() * (q[0] * q[0] + q[1] * q[1]) < four),
            Chart::cartesian(1),
            move |q: &[T]| m.apply([q[0], q[1]]).map(|p| p.to_vec()).unwrap_or_else(|_| vec![T::nan(); 2]),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaReport {
    pub samples: usize,
    pub cells: usize,
    /// Largest relative error between the polygonal area of `σ(cell)` and
    /// the cell area.
    pub max_cell_area_rel_error: f64,
    /// Monte Carlo counts of inverse images per cell: largest deviation in
    /// standard errors.
    pub max_cell_mc_sigmas: f64,
    pub item1_restricted_failures: usize,
    /// Lower-bound violations on the connector sides (expected, reported).
    pub item1_unrestricted_lower_violations: usize,
    pub item1_upper_failures: usize,
    pub item2_failures: usize,
    pub item3_grid_points: usize,
    pub item3_covered: usize,
    /// Largest `|det J − 1|` away from the side/bar transition.
    pub max_area_defect: f64,
    pub pass: bool,
}

fn shoelace<T: Real>(pts: &[[T; 2]]) -> T {
    let k = pts.len();
    let twice = (0..k).fold(T::zero(), |s, i| {
        let (p, q) = (pts[i], pts[(i + 1) % k]);
        s + p[0] * q[1] - q[0] * p[1]
    });
    twice.abs() / T::lit(2.0)
}

/// Relative error allowed in the area of each annular cell image.
pub const CELL_AREA_TOL: f64 = 1e-3;

/// Bound on the largest of the 100 per-cell Monte Carlo z-scores; a
/// two-sided 5σ excursion in any cell has probability about 6e-5.
pub const MC_MAX_SIGMAS: f64 = 5.0;

/// Checks area transport, item (1) in restricted and unrestricted form,
/// item (2) and the coverage of `(−λ, λ) × (−λ(1+ε/n), λ(1+ε/n))`.
pub fn verify_sigma<T: Real>(map: &SigmaMap<T>, lambda: T, samples: usize, tol: T, seed: u64) -> Result<SigmaReport> {
    if samples < 1000 {
        return Err(invalid(format!("sigma verification needs at least 1000 samples, got {samples}")));
    }
    if !(lambda > T::zero() && lambda < T::one() - map.w / T::lit(2.0)) {
        return Err(precondition(format!("lambda must lie in (0, 1 − w/2), got {lambda}")));
    }
    let four = T::lit(4.0);
    let tau_full = T::PI() + T::PI();
    let r_max = (four / T::PI()).sqrt();
    let eps_n = map.eps / T::from_count(map.n);

    // (i) area transport on a 10 × 10 grid of annular cells
    let (na, nt) = (10usize, 10usize);
    let edge = 2000usize;
    let mut max_rel = T::zero();
    // a = 0 would hit the collapsed point instead of its limit on the segment
    let polar = |a: T, psi: T| -> [T; 2] {
        let r = (a.max(T::lit(1e-300)) / T::PI()).sqrt();
        [r * psi.cos(), r * psi.sin()]
    };
    for i in 0..na {
        let a0 = four * T::from_count(i) / T::from_count(na);
        let a1 = four * T::from_count(i + 1) / T::from_count(na) * (T::one() - T::lit(1e-12));
        for j in 0..nt {
            let p0 = tau_full * T::from_count(j) / T::from_count(nt);
            let p1 = tau_full * T::from_count(j + 1) / T::from_count(nt);
            let mut boundary = Vec::with_capacity(4 * edge);
            let lerp = |u: T, v: T, s: usize| u + (v - u) * T::from_count(s) / T::from_count(edge);
            for s in 0..edge {
                boundary.push(polar(a0, lerp(p0, p1, s)));
            }
            for s in 0..edge {
                boundary.push(polar(lerp(a0, a1, s), p1));
            }
            for s in 0..edge {
                boundary.push(polar(a1, lerp(p1, p0, s)));
            }
            for s in 0..edge {
                boundary.push(polar(lerp(a1, a0, s), p0));
            }
            let image: Vec<[T; 2]> = boundary.iter().map(|&z| map.apply(z)).collect::<Result<_>>()?;
            let area = shoelace(&image);
            let exact = (a1 - a0) * (p1 - p0) / tau_full;
            max_rel = max_rel.max(((area - exact) / exact).abs());
        }
    }

    // Monte Carlo: uniform points in the image box, binned by preimage cell
    let (bx, by) = (map.half_width(four), map.half_height(four));
    let box_area = four * bx * by;
    let counts: Vec<Vec<usize>> = sharded(samples, seed, |rng: &mut SampleRng, count| {
        let mut c = vec![0usize; na * nt];
        for _ in 0..count {
            let p = [uniform(rng, -bx, bx), uniform(rng, -by, by)];
            if let Some(z) = map.inverse(p) {
                let a = T::PI() * (z[0] * z[0] + z[1] * z[1]);
                let mut psi = z[1].atan2(z[0]);
                if psi < T::zero() {
                    psi = psi + tau_full;
                }
                let i = ((a / four * T::from_count(na)).to_f64_lossy() as usize).min(na - 1);
                let j = ((psi / tau_full * T::from_count(nt)).to_f64_lossy() as usize).min(nt - 1);
                c[i * nt + j] += 1;
            }
        }
        c
    });
    let mut totals = vec![0usize; na * nt];
    for c in &counts {
        for (t, v) in totals.iter_mut().zip(c) {
            *t += v;
        }
    }
    let nf = samples as f64;
    let cell_area = 4.0 / (na * nt) as f64;
    let p_exp = cell_area / box_area.to_f64_lossy();
    let sd = (p_exp * (1.0 - p_exp) / nf).sqrt();
    let max_sigmas = totals.iter().map(|&c| ((c as f64 / nf) - p_exp).abs() / sd).fold(0.0, f64::max);

    // items (1) and (2) and the Jacobian, on uniform samples of B²(4)
    let h = T::lit(1e-6);
    let spec = map.map_spec();
    #[derive(Default)]
    struct Counts {
        restricted: usize,
        lower: usize,
        upper: usize,
        item2: usize,
        defect: f64,
    }
    let parts = sharded(samples, seed ^ 0x5151, |rng: &mut SampleRng, count| {
        let mut c = Counts::default();
        for _ in 0..count {
            let z = loop {
                let z = [uniform(rng, -r_max, r_max), uniform(rng, -r_max, r_max)];
                if T::PI() * (z[0] * z[0] + z[1] * z[1]) < four {
                    break z;
                }
            };
            let a = T::PI() * (z[0] * z[0] + z[1] * z[1]);
            let Ok(p) = map.apply(z) else { continue };
            let lower_ok = p[1].abs() >= a / four;
            if !lower_ok {
                c.lower += 1;
                if p[0].abs() < T::one() - map.w {
                    c.restricted += 1;
                }
            }
            if !(p[1].abs() < a / four + eps_n) {
                c.upper += 1;
            }
            let zy = [T::zero(), z[1]];
            if map.apply(zy).map_or(true, |q| q[0] != T::zero()) {
                c.item2 += 1;
            }
            let tau = z[1].abs().atan2(z[0].abs()) / tau_full;
            let away = (tau - map.corner_tau(a)).abs() > T::lit(1e-3) && a > T::lit(1e-3);
            if away {
                if let Ok(j) = spec.finite_difference_jacobian(&z, h) {
                    c.defect = c.defect.max((j.det() - T::one()).abs().to_f64_lossy());
                }
            }
        }
        c
    });
    let mut tot = Counts::default();
    for c in parts {
        tot.restricted += c.restricted;
        tot.lower += c.lower;
        tot.upper += c.upper;
        tot.item2 += c.item2;
        tot.defect = tot.defect.max(c.defect);
    }

    // item (3): cell-centred grid, so the collapsed segment y = 0 is avoided
    let g = 100usize;
    let ymax = lambda * (T::one() + eps_n);
    let mut covered = 0;
    for i in 0..g {
        for j in 0..g {
            let x = -lambda + (lambda + lambda) * (T::from_count(i) + T::lit(0.5)) / T::from_count(g);
            let y = -ymax + (ymax + ymax) * (T::from_count(j) + T::lit(0.5)) / T::from_count(g);
            if let Some(z) = map.inverse([x, y]) {
                if let Ok(p) = map.apply(z) {
                    if (p[0] - x).abs().max((p[1] - y).abs()) <= T::lit(1e-9) {
                        covered += 1;
                    }
                }
            }
        }
    }

    let max_rel = max_rel.to_f64_lossy();
    let pass = max_rel <= CELL_AREA_TOL
        && tot.defect <= tol.to_f64_lossy()
        && max_sigmas <= MC_MAX_SIGMAS
        && tot.restricted == 0
        && tot.upper == 0
        && tot.item2 == 0
        && covered == g * g;
    Ok(SigmaReport {
        samples,
        cells: na * nt,
        max_cell_area_rel_error: max_rel,
        max_cell_mc_sigmas: max_sigmas,
        item1_restricted_failures: tot.restricted,
        item1_unrestricted_lower_violations: tot.lower,
        item1_upper_failures: tot.upper,
        item2_failures: tot.item2,
        item3_grid_points: g * g,
        item3_covered: covered,
        max_area_defect: tot.defect,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiLambdaReport<T = f64> {
    /// `(z₁, …, z_n)` as `(x(z₁), y(z₁), x(z₂), …)`.
    pub preimage: Vec<T>,
    /// `π Σ|zᵢ|²`; below 4 means the preimage lies in `B^{2n}(4)`.
    pub ball_area: T,
    pub in_ball: bool,
    /// The point has zero position part and every `x(zᵢ)` vanishes.
    pub in_lagrangian: bool,
    /// `Σ π|zᵢ|²/4 ≤ λ Σ|yᵢ| < λ(1+ε) < 1`.
    pub chain_holds: bool,
}

/// Componentwise inversion of `σ × ⋯ × σ` at a point of `λ(□ⁿ ×_L ◇ⁿ(1))`,
/// given as `(x₁..xₙ, y₁..yₙ)`.
pub fn phi_lambda_check<T: Real>(n: usize, lambda: T, eps: T, pt: &[T]) -> Result<PhiLambdaReport<T>> {
    if !(lambda > T::zero() && lambda < T::one()) {
        return Err(precondition(format!("lambda must lie in (0, 1), got {lambda}")));
    }
    if !(eps > T::zero() && eps < T::one() / lambda - T::one()) {
        return Err(precondition(format!("eps must lie in (0, 1/λ − 1), got {eps}")));
    }
    if pt.len() != 2 * n {
        return Err(invalid(format!("expected a point of length {}, got {}", 2 * n, pt.len())));
    }
    let (x, y) = pt.split_at(n);
    let l1 = y.iter().fold(T::zero(), |s, &c| s + c.abs());
    if x.iter().any(|c| c.abs() > lambda) || l1 > lambda {
        return Err(precondition("point outside λ(□ⁿ × ◇ⁿ(1))"));
    }
    let sigma = SigmaMap::new(n, eps).map_err(|e| precondition(e.to_string()))?;
    let mut preimage = Vec::with_capacity(2 * n);
    for i in 0..n {
        let z = sigma.inverse([x[i], y[i]]).ok_or_else(|| domain("point outside the image of σ"))?;
        preimage.extend_from_slice(&z);
    }
    let ball_area = preimage.iter().fold(T::zero(), |s, &c| s + c * c) * T::PI();
    let lhs = ball_area / T::lit(4.0);
    let chain_holds = lhs <= l1 + T::lit(1e-12) && l1 < T::one() + eps && lambda * (T::one() + eps) < T::one();
    let in_lagrangian = x.iter().all(|&c| c == T::zero()) && (0..n).all(|i| preimage[2 * i] == T::zero());
    Ok(PhiLambdaReport { preimage, ball_area, in_ball: ball_area < T::lit(4.0), in_lagrangian, chain_holds })
}
