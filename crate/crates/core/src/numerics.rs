//! Quadrature with arcsine weight, bracketed root finding and 1-D maximization.
//!
//! Every integral in the crate has the shape `∫ f(t) / sqrt((t − α)(β − t)) dt`
//! with `f` smooth on the closed interval. The substitution
//! `t = (α+β)/2 − (β−α)/2 · cos θ` removes both endpoint singularities, so
//! Gauss–Chebyshev sums and cosine series in `θ` converge spectrally.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub node_count: usize,
    pub target_rel_tol: f64,
    pub max_refinements: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            node_count: 64,
            target_rel_tol: 1e-12,
            max_refinements: 12,
        }
    }
}

impl QuadratureSpec {
    pub fn new(node_count: usize, target_rel_tol: f64, max_refinements: usize) -> Result<Self> {
        if node_count < 8 || !(target_rel_tol > 0.0) || max_refinements == 0 {
            return Err(Error::InvalidParameters(format!(
                "quadrature settings need node_count >= 8, tol > 0, refinements > 0 \
                 (got {node_count}, {target_rel_tol}, {max_refinements})"
            )));
        }
        Ok(Self {
            node_count,
            target_rel_tol,
            max_refinements,
        })
    }
}

/// N-point Gauss–Chebyshev sum and the matching sum of `|f|`.
fn chebyshev_rule<F: Fn(f64) -> f64>(f: &F, alpha: f64, beta: f64, n: usize) -> (f64, f64) {
    let mid = 0.5 * (alpha + beta);
    let half = 0.5 * (beta - alpha);
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for i in 1..=n {
        let t = mid + half * ((2 * i - 1) as f64 * PI / (2 * n) as f64).cos();
        let v = f(t);
        sum += v;
        abs_sum += v.abs();
    }
    let w = PI / n as f64;
    (w * sum, w * abs_sum)
}

/// `∫_α^β f(t) / sqrt((t − α)(β − t)) dt` by Gauss–Chebyshev sums, doubling
/// the node count until two successive estimates agree to the target
/// tolerance (relative to the integral of `|f|` when the integral cancels).
pub fn integrate_singular<F: Fn(f64) -> f64>(
    f: F,
    alpha: f64,
    beta: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if !(alpha < beta) {
        return Err(Error::InvalidParameters(format!(
            "integration interval [{alpha}, {beta}] is empty"
        )));
    }
    let mut n = quad.node_count;
    let (mut prev, _) = chebyshev_rule(&f, alpha, beta, n);
    let mut last_change = f64::INFINITY;
    for _ in 0..quad.max_refinements {
        n *= 2;
        let (est, magnitude) = chebyshev_rule(&f, alpha, beta, n);
        last_change = (est - prev).abs();
        if !est.is_finite() {
            break;
        }
        if last_change <= quad.target_rel_tol * est.abs().max(magnitude) {
            return Ok(est);
        }
        prev = est;
    }
    Err(Error::NoConvergence {
        refinements: quad.max_refinements,
        last_change,
    })
}

/// Principal value of `∫_α^β g(t) / ((pole − t) sqrt((t − α)(β − t))) dt`.
///
/// For a pole inside `(α, β)` the singular part is subtracted:
/// the principal value of `∫ 1/((pole − t) sqrt((t−α)(β−t)))` vanishes there,
/// leaving a smooth integrand.
pub fn integrate_singular_pv<G: Fn(f64) -> f64>(
    g: G,
    pole: f64,
    alpha: f64,
    beta: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if !(alpha < pole && pole < beta) {
        return integrate_singular(|t| g(t) / (pole - t), alpha, beta, quad);
    }
    let g_pole = g(pole);
    let step = 1e-5 * (beta - alpha);
    let slope = (g(pole + step) - g(pole - step)) / (2.0 * step);
    let near = 1e-9 * (beta - alpha);
    integrate_singular(
        |t| {
            if (pole - t).abs() < near {
                -slope
            } else {
                (g(t) - g_pole) / (pole - t)
            }
        },
        alpha,
        beta,
        quad,
    )
}

/// Cosine-series representation of a smooth `f` on `[α, β]` in the angle
/// `θ` of `t = (α+β)/2 − (β−α)/2 · cos θ`.
///
/// Integrating against the arcsine weight becomes integrating the series in
/// `θ`, which gives the running integral `∫_α^x f(t)/sqrt((t−α)(β−t)) dt`
/// at arbitrary `x` in closed form.
#[derive(Debug, Clone)]
pub struct ArcsineSeries {
    alpha: f64,
    beta: f64,
    coeffs: Vec<f64>,
}

impl ArcsineSeries {
    /// Fits with doubling sizes starting at 32 until the trailing quarter of
    /// the coefficients falls below `tol` relative to the largest one.
    pub fn fit<F: Fn(f64) -> f64>(f: F, alpha: f64, beta: f64, tol: f64, max_terms: usize) -> Result<Self> {
        if !(alpha < beta) {
            return Err(Error::InvalidParameters(format!(
                "series interval [{alpha}, {beta}] is empty"
            )));
        }
        let mid = 0.5 * (alpha + beta);
        let half = 0.5 * (beta - alpha);
        let mut m = 32usize;
        loop {
            let samples: Vec<f64> = (0..m)
                .map(|j| {
                    let theta = (j as f64 + 0.5) * PI / m as f64;
                    f(mid - half * theta.cos())
                })
                .collect();
            let coeffs = dct2(&samples);
            let scale = coeffs.iter().fold(0.0_f64, |acc, c| acc.max(c.abs()));
            let tail = coeffs[3 * m / 4..]
                .iter()
                .fold(0.0_f64, |acc, c| acc.max(c.abs()));
            if !scale.is_finite() {
                return Err(Error::NoConvergence {
                    refinements: 0,
                    last_change: f64::NAN,
                });
            }
            if tail <= tol * scale.max(f64::MIN_POSITIVE) {
                let mut keep = coeffs.len();
                while keep > 1 && coeffs[keep - 1].abs() <= 1e-17 * scale {
                    keep -= 1;
                }
                let mut coeffs = coeffs;
                coeffs.truncate(keep);
                return Ok(Self { alpha, beta, coeffs });
            }
            if 2 * m > max_terms {
                return Err(Error::NoConvergence {
                    refinements: m.trailing_zeros() as usize,
                    last_change: tail / scale,
                });
            }
            m *= 2;
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.alpha, self.beta)
    }

    /// `∫_α^β f(t) / sqrt((t−α)(β−t)) dt`.
    pub fn integral(&self) -> f64 {
        self.coeffs[0] * PI
    }

    /// Smooth interpolant of `f`.
    pub fn value(&self, x: f64) -> f64 {
        let (theta, _) = self.angles(x);
        let c = theta.cos();
        // Clenshaw for a cosine series.
        let (mut b1, mut b2) = (0.0, 0.0);
        for &a in self.coeffs[1..].iter().rev() {
            let b0 = a + 2.0 * c * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + c * b1 - b2
    }

    /// `(∫_α^x, ∫_x^β)` of `f(t)/sqrt((t−α)(β−t)) dt`, each computed from
    /// its own end so that both stay accurate near the endpoints.
    pub fn split_integral(&self, x: f64) -> (f64, f64) {
        let (theta, phi) = self.angles(x);
        let total = self.integral();
        if theta <= phi {
            let left = self.coeffs[0] * theta + sine_sum(&self.coeffs, theta, false);
            (left, total - left)
        } else {
            let right = self.coeffs[0] * phi + sine_sum(&self.coeffs, phi, true);
            (total - right, right)
        }
    }

    /// `θ` measured from `α` and `φ = π − θ` measured from `β`.
    fn angles(&self, x: f64) -> (f64, f64) {
        let width = self.beta - self.alpha;
        let u = ((x - self.alpha) / width).clamp(0.0, 1.0);
        let v = ((self.beta - x) / width).clamp(0.0, 1.0);
        (2.0 * u.sqrt().asin(), 2.0 * v.sqrt().asin())
    }
}

/// `Σ_{m≥1} A_m s_m sin(mθ)/m` with `s_m = (−1)^m` when `alternate`.
fn sine_sum(coeffs: &[f64], theta: f64, alternate: bool) -> f64 {
    let c = theta.cos();
    let (mut b1, mut b2) = (0.0, 0.0);
    for m in (1..coeffs.len()).rev() {
        let sign = if alternate && m % 2 == 1 { -1.0 } else { 1.0 };
        let b0 = sign * coeffs[m] / m as f64 + 2.0 * c * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    b1 * theta.sin()
}

/// Cosine coefficients from samples at `θ_j = (j + ½)π/M`:
/// `f(θ) ≈ A_0 + Σ A_m cos(mθ)`.
fn dct2(samples: &[f64]) -> Vec<f64> {
    let m = samples.len();
    let period = 4 * m;
    let table: Vec<f64> = (0..period)
        .map(|k| (k as f64 * PI / (2 * m) as f64).cos())
        .collect();
    (0..m)
        .map(|k| {
            let mut acc = 0.0;
            for (j, &s) in samples.iter().enumerate() {
                acc += s * table[(k * (2 * j + 1)) % period];
            }
            if k == 0 {
                acc / m as f64
            } else {
                2.0 * acc / m as f64
            }
        })
        .collect()
}

/// Brent's method on a sign-changing bracket. Returns a point whose bracket
/// has width at most `tol` (or an exact zero).
pub fn find_root_bracketed<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (g(a), g(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.signum() != fb.signum()) || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoSignChange { lo, hi });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = g(b);
    }
    Ok(b)
}

/// Grid scan over `grid` equispaced points (endpoints included) followed by
/// golden-section refinement on the cells around the best grid point.
/// Returns `(argmax, max)`.
pub fn maximize_on_interval<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, grid: usize, tol: f64) -> (f64, f64) {
    if hi <= lo {
        return (lo, f(lo));
    }
    let grid = grid.max(2);
    let step = (hi - lo) / (grid - 1) as f64;
    let point = |i: usize| if i + 1 == grid { hi } else { lo + step * i as f64 };
    let mut best = (lo, f64::NEG_INFINITY);
    let mut best_i = 0;
    for i in 0..grid {
        let x = point(i);
        let v = f(x);
        if v > best.1 {
            best = (x, v);
            best_i = i;
        }
    }
    let a = point(best_i.saturating_sub(1));
    let b = point((best_i + 1).min(grid - 1));
    let refined = golden_section_max(&f, a, b, tol);
    if refined.1 > best.1 {
        refined
    } else {
        best
    }
}

fn golden_section_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let tol = tol.max(4.0 * f64::EPSILON * a.abs().max(b.abs()));
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (a + b);
    let v = f(x);
    [(x1, f1), (x2, f2), (x, v)]
        .into_iter()
        .fold((x, f64::NEG_INFINITY), |acc, p| if p.1 > acc.1 { p } else { acc })
}
