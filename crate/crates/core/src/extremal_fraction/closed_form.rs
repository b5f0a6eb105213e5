//! Closed forms for special pole sets and special `E`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::harmonic_measure::PolePoint;
use crate::interval_system::quadratic_map;

/// `T_n(x)` by the three-term recurrence.
pub fn chebyshev_t(n: usize, x: f64) -> f64 {
    let (mut t0, mut t1) = (1.0, x);
    if n == 0 {
        return t0;
    }
    for _ in 1..n {
        let t2 = 2.0 * x * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    t1
}

/// `T_n'(x)` via `U_{n−1}`.
pub fn chebyshev_t_prime(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let (mut u0, mut u1) = (1.0, 2.0 * x);
    for _ in 1..n - 1 {
        let u2 = 2.0 * x * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
    let u = if n == 1 { u0 } else { u1 };
    n as f64 * u
}

/// `n² b / (b² − a²)` for `[−b, −a] ∪ [a, b]` with all poles at infinity.
pub fn corollary_markov_constant(n: usize, a: f64, b: f64) -> f64 {
    (n * n) as f64 * b / (b * b - a * a)
}

/// `S_n(x) = T_{n/2}(u(x))`, `n` even.
pub fn corollary_s(n: usize, a: f64, b: f64, x: f64) -> f64 {
    chebyshev_t(n / 2, quadratic_map(a, b, x))
}

pub fn corollary_s_prime(n: usize, a: f64, b: f64, x: f64) -> f64 {
    chebyshev_t_prime(n / 2, quadratic_map(a, b, x)) * 4.0 * x / (b * b - a * a)
}

/// Phase derivative `n|x| / sqrt((b² − x²)(x² − a²))` on the bands.
pub fn corollary_gamma_prime(n: usize, a: f64, b: f64, x: f64) -> f64 {
    n as f64 * x.abs() / ((b * b - x * x) * (x * x - a * a)).sqrt()
}

/// `(8x⁴ − 8x²(1 + a²) + 1 + 6a² + a⁴) / (1 − a²)²`.
pub fn remark_m4(a: f64, x: f64) -> f64 {
    let a2 = a * a;
    (8.0 * x.powi(4) - 8.0 * x * x * (1.0 + a2) + 1.0 + 6.0 * a2 + a2 * a2) / (1.0 - a2).powi(2)
}

pub fn remark_m4_prime(a: f64, x: f64) -> f64 {
    let a2 = a * a;
    (32.0 * x.powi(3) - 16.0 * x * (1.0 + a2)) / (1.0 - a2).powi(2)
}

/// The single-interval fraction written through parameters `a_k = −1/ξ_k`.
///
/// `cos(½ Σ arccos((x + a_k)/(1 + a_k x)))` equals `(−1)^n m_n(x)`; this
/// type reports the crate convention `m_n(−1) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RusakFraction {
    params: Vec<Complex64>,
}

impl RusakFraction {
    pub fn new(params: Vec<Complex64>) -> Result<Self> {
        if params.is_empty() || !params.len().is_multiple_of(2) {
            return Err(Error::ParameterOutOfRange(format!(
                "need an even, nonzero number of parameters (got {})",
                params.len()
            )));
        }
        if let Some(a) = params.iter().find(|a| !(a.norm() < 1.0)) {
            return Err(Error::ParameterOutOfRange(format!("|{a}| >= 1")));
        }
        let mut used = vec![false; params.len()];
        for i in 0..params.len() {
            if used[i] || params[i].im == 0.0 {
                continue;
            }
            used[i] = true;
            let target = params[i].conj();
            match (0..params.len()).find(|&j| !used[j] && (params[j] - target).norm() <= 1e-14) {
                Some(j) => used[j] = true,
                None => {
                    return Err(Error::ParameterOutOfRange(format!(
                        "{} has no conjugate partner",
                        params[i]
                    )))
                }
            }
        }
        Ok(Self { params })
    }

    pub fn from_real(params: &[f64]) -> Result<Self> {
        Self::new(params.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn from_poles(poles: &[PolePoint]) -> Result<Self> {
        Self::new(
            poles
                .iter()
                .map(|p| match p.as_complex() {
                    Some(z) => -1.0 / z,
                    None => Complex64::new(0.0, 0.0),
                })
                .collect(),
        )
    }

    pub fn params(&self) -> &[Complex64] {
        &self.params
    }

    pub fn degree(&self) -> usize {
        self.params.len() / 2
    }

    /// `ξ_k = −1/a_k`, infinity for `a_k = 0`.
    pub fn poles(&self) -> Vec<PolePoint> {
        self.params
            .iter()
            .map(|&a| {
                if a.norm() == 0.0 {
                    PolePoint::Infinity
                } else {
                    PolePoint::from_complex(-1.0 / a)
                }
            })
            .collect()
    }

    fn raw_phase(&self, x: f64) -> f64 {
        0.5 * self
            .params
            .iter()
            .map(|&a| ((x + a) / (1.0 + a * x)).acos().re)
            .sum::<f64>()
    }

    /// `m_n(x)` on `[−1, 1]`.
    pub fn m_eval(&self, x: f64) -> f64 {
        let sign = if self.degree().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        sign * self.raw_phase(x).cos()
    }

    /// `λ_n(x) = ½ Σ sqrt(1 − a_k²) / (1 + a_k x)`.
    pub fn lambda(&self, x: f64) -> f64 {
        0.5 * self
            .params
            .iter()
            .map(|&a| ((1.0 - a * a).sqrt() / (1.0 + a * x)).re)
            .sum::<f64>()
    }

    /// `λ_n(x) / sqrt(1 − x²)` on `(−1, 1)`.
    pub fn gamma_prime(&self, x: f64) -> f64 {
        self.lambda(x) / (1.0 - x * x).sqrt()
    }

    /// `m_n'(x) = −sin γ_n(x) γ_n'(x)` with `γ_n = nπ − ½ Σ arccos(…)`.
    pub fn m_prime(&self, x: f64) -> f64 {
        let gamma = self.degree() as f64 * std::f64::consts::PI - self.raw_phase(x);
        -gamma.sin() * self.gamma_prime(x)
    }
}
