//! Harmonic-measure densities of `C \ E` on the bands of `E`.
//!
//! For poles `ξ` off `E` the Green differential of `C \ E` is
//! `(K(t) + P(t)) / sqrt(H(t)) dt`, where the kernel `K` carries the
//! logarithmic singularity at the poles and `P` is a real correction
//! polynomial of degree `l − 1`. Its coefficients are fixed by requiring
//! that the differential integrates to zero across every gap (the Green
//! function vanishes on all bands) and that the total mass equals the
//! number of poles. On band `k` the density is
//!
//! ```text
//! σ_k (K(t) + P(t)) / (π sqrt|H(t)|),   σ_k = (−1)^(l−1−k)
//! ```
//!
//! with the branch of `sqrt(H)` that behaves like `z^l` at infinity.
//!
//! Complex poles only ever appear together with their conjugate; the
//! evaluator then represents the pair density `ϖ(t, ξ) + ϖ(t, ξ̄)`.

mod laplace;

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::interval_system::IntervalSystem;
use crate::numerics::{integrate_singular, integrate_singular_pv, QuadratureSpec};

pub use laplace::{laplace_fd_band_measures, laplace_fd_oracle, BOX_HALF_WIDTH};

/// Minimum clearance of a finite pole from the unit disk and from `E`.
pub const POLE_GUARD: f64 = 1e-6;

/// A point of the extended complex plane used as a pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolePoint {
    Infinity,
    Real(f64),
    Complex(Complex64),
}

impl PolePoint {
    /// Normalizes a complex value with zero imaginary part to [`PolePoint::Real`].
    pub fn from_complex(z: Complex64) -> Self {
        if z.im == 0.0 {
            PolePoint::Real(z.re)
        } else {
            PolePoint::Complex(z)
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, PolePoint::Infinity)
    }

    pub fn is_real(&self) -> bool {
        !matches!(self, PolePoint::Complex(_))
    }

    pub fn modulus(&self) -> f64 {
        match self {
            PolePoint::Infinity => f64::INFINITY,
            PolePoint::Real(x) => x.abs(),
            PolePoint::Complex(z) => z.norm(),
        }
    }

    pub fn as_complex(&self) -> Option<Complex64> {
        match self {
            PolePoint::Infinity => None,
            PolePoint::Real(x) => Some(Complex64::new(*x, 0.0)),
            PolePoint::Complex(z) => Some(*z),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            PolePoint::Complex(z) => PolePoint::Complex(z.conj()),
            other => *other,
        }
    }
}

impl fmt::Display for PolePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolePoint::Infinity => write!(f, "inf"),
            PolePoint::Real(x) => write!(f, "{x:?}"),
            PolePoint::Complex(z) => {
                if z.im < 0.0 {
                    write!(f, "{:?}-{:?}i", z.re, -z.im)
                } else {
                    write!(f, "{:?}+{:?}i", z.re, z.im)
                }
            }
        }
    }
}

impl FromStr for PolePoint {
    type Err = Error;

    /// Accepts `inf`, a decimal real, or `a+bi` / `a-bi` / `bi`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad pole literal {s:?}"));
        match s.to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "∞" => return Ok(PolePoint::Infinity),
            _ => {}
        }
        if let Some(body) = s.strip_suffix('i') {
            // split at the last sign that is not a leading sign or an exponent sign
            let bytes = body.as_bytes();
            let split = (1..bytes.len())
                .rev()
                .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
            let (re, im) = match split {
                Some(i) => {
                    let re: f64 = body[..i].parse().map_err(|_| bad())?;
                    let im_txt = &body[i..];
                    let im: f64 = match im_txt {
                        "+" => 1.0,
                        "-" => -1.0,
                        t => t.parse().map_err(|_| bad())?,
                    };
                    (re, im)
                }
                None => {
                    let im: f64 = match body {
                        "" | "+" => 1.0,
                        "-" => -1.0,
                        t => t.parse().map_err(|_| bad())?,
                    };
                    (0.0, im)
                }
            };
            if !re.is_finite() || !im.is_finite() {
                return Err(bad());
            }
            return Ok(PolePoint::from_complex(Complex64::new(re, im)));
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        if x.is_infinite() {
            return Ok(PolePoint::Infinity);
        }
        if x.is_nan() {
            return Err(bad());
        }
        Ok(PolePoint::Real(x))
    }
}

/// Parses a comma-separated list of pole literals.
pub fn parse_pole_list(s: &str) -> Result<Vec<PolePoint>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// `sqrt(H(z))` on the branch asymptotic to `z^l`, cut along `E`.
pub(crate) fn sqrt_h(system: &IntervalSystem, z: Complex64) -> Complex64 {
    system.endpoints().iter().map(|&a| (z - a).sqrt()).product()
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kernel {
    /// `weight / (pole − t)`
    Real { pole: f64, weight: f64 },
    /// `2 Re(weight / (pole − t))` for the pair `{pole, conj(pole)}`
    Pair { pole: Complex64, weight: Complex64 },
}

impl Kernel {
    fn for_pole(system: &IntervalSystem, pole: &PolePoint) -> Option<Self> {
        match pole {
            PolePoint::Infinity => None,
            PolePoint::Real(x) => Some(Kernel::Real {
                pole: *x,
                weight: sqrt_h(system, Complex64::new(*x, 0.0)).re,
            }),
            PolePoint::Complex(z) => {
                let upper = if z.im > 0.0 { *z } else { z.conj() };
                Some(Kernel::Pair {
                    pole: upper,
                    weight: sqrt_h(system, upper),
                })
            }
        }
    }

    fn eval(&self, t: f64) -> f64 {
        match *self {
            Kernel::Real { pole, weight } => weight / (pole - t),
            Kernel::Pair { pole, weight } => 2.0 * (weight / (pole - t)).re,
        }
    }
}

fn check_pole(system: &IntervalSystem, pole: &PolePoint) -> Result<()> {
    let too_close = match pole {
        PolePoint::Infinity => false,
        PolePoint::Real(x) => {
            !x.is_finite() || x.abs() <= 1.0 + POLE_GUARD || system.distance_to(*x) <= POLE_GUARD
        }
        PolePoint::Complex(z) => !z.is_finite() || z.norm() <= 1.0 + POLE_GUARD,
    };
    if too_close {
        return Err(Error::PoleTooClose {
            pole: pole.to_string(),
        });
    }
    Ok(())
}

/// Groups poles into kernels, pairing every complex pole with its conjugate.
fn kernels_for(system: &IntervalSystem, poles: &[PolePoint]) -> Result<Vec<Kernel>> {
    let mut kernels = Vec::new();
    let mut used = vec![false; poles.len()];
    for (i, pole) in poles.iter().enumerate() {
        check_pole(system, pole)?;
        if used[i] {
            continue;
        }
        used[i] = true;
        if let PolePoint::Complex(z) = pole {
            let partner = poles.iter().enumerate().position(|(j, q)| {
                !used[j]
                    && matches!(q, PolePoint::Complex(w)
                        if (w - z.conj()).norm() <= 1e-12 * z.norm().max(1.0))
            });
            match partner {
                Some(j) => used[j] = true,
                None => {
                    return Err(Error::ConjugatePairMissing {
                        pole: pole.to_string(),
                    })
                }
            }
        }
        if let Some(k) = Kernel::for_pole(system, pole) {
            kernels.push(k);
        }
    }
    Ok(kernels)
}

/// Density of a (sum of) harmonic measure(s) on the bands of `E`.
#[derive(Debug, Clone)]
pub struct DensityEvaluator {
    system: IntervalSystem,
    kernels: Vec<Kernel>,
    /// ascending powers of `s = (t − center) / half`
    scaled_correction: Vec<f64>,
    center: f64,
    half: f64,
    mass: f64,
    band_masses: Vec<f64>,
    period_residuals: Vec<f64>,
}

impl DensityEvaluator {
    fn build(
        system: &IntervalSystem,
        kernels: Vec<Kernel>,
        mass: f64,
        quad: &QuadratureSpec,
    ) -> Result<Self> {
        let l = system.band_count();
        let (lo, hi) = system.hull();
        let center = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let power = |i: usize, t: f64| ((t - center) / half).powi(i as i32);
        let kernel_sum = |t: f64| kernels.iter().map(|k| k.eval(t)).sum::<f64>();

        let mut matrix = DMatrix::<f64>::zeros(l, l);
        let mut rhs = DVector::<f64>::zeros(l);

        for g in 0..l - 1 {
            let (ga, gb) = system.gap(g)?;
            let idx = 2 * g + 1;
            let weight = |t: f64| 1.0 / system.h_reduced(idx, t).sqrt();
            for i in 0..l {
                matrix[(g, i)] = integrate_singular(|t| power(i, t) * weight(t), ga, gb, quad)?;
            }
            let mut acc = 0.0;
            for k in &kernels {
                acc += match *k {
                    Kernel::Real { pole, weight: c } if ga < pole && pole < gb => {
                        integrate_singular_pv(|t| c * weight(t), pole, ga, gb, quad)?
                    }
                    _ => integrate_singular(|t| k.eval(t) * weight(t), ga, gb, quad)?,
                };
            }
            rhs[g] = -acc;
        }

        let mass_row = l - 1;
        rhs[mass_row] = mass;
        for k in 0..l {
            let (ba, bb) = system.band(k);
            let scale = system.band_sign(k) / PI;
            let weight = |t: f64| 1.0 / system.h_reduced(2 * k, t).sqrt();
            for i in 0..l {
                matrix[(mass_row, i)] +=
                    scale * integrate_singular(|t| power(i, t) * weight(t), ba, bb, quad)?;
            }
            if !kernels.is_empty() {
                rhs[mass_row] -= scale * integrate_singular(|t| kernel_sum(t) * weight(t), ba, bb, quad)?;
            }
        }

        let singular = matrix.clone().svd(false, false).singular_values;
        let (smax, smin) = singular
            .iter()
            .fold((0.0_f64, f64::INFINITY), |(a, b), &s| (a.max(s), b.min(s)));
        if !(smin > 1e-13 * smax) {
            return Err(Error::SingularPeriodSystem);
        }
        let solution = matrix
            .clone()
            .lu()
            .solve(&rhs)
            .ok_or(Error::SingularPeriodSystem)?;
        let residual = &matrix * &solution - &rhs;
        let period_residuals = residual.iter().take(l - 1).copied().collect();

        let mut evaluator = Self {
            system: system.clone(),
            kernels,
            scaled_correction: solution.iter().copied().collect(),
            center,
            half,
            mass,
            band_masses: Vec::new(),
            period_residuals,
        };
        evaluator.band_masses = (0..l)
            .map(|k| {
                let (ba, bb) = system.band(k);
                integrate_singular(|t| evaluator.regular_part(k, t), ba, bb, quad)
            })
            .collect::<Result<_>>()?;
        Ok(evaluator)
    }

    pub fn system(&self) -> &IntervalSystem {
        &self.system
    }

    /// Mass the construction was normalized to (number of poles it carries).
    pub fn expected_mass(&self) -> f64 {
        self.mass
    }

    /// `K(t) + P(t)`.
    pub fn numerator(&self, t: f64) -> f64 {
        let s = (t - self.center) / self.half;
        let poly = self
            .scaled_correction
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * s + c);
        self.kernels.iter().map(|k| k.eval(t)).sum::<f64>() + poly
    }

    /// Density at `t`; zero off `E`, unbounded at band endpoints.
    pub fn density(&self, t: f64) -> f64 {
        match self.system.band_of(t) {
            Some(k) => {
                self.system.band_sign(k) * self.numerator(t) / (PI * self.system.h_eval(t).abs().sqrt())
            }
            None => 0.0,
        }
    }

    /// `density(t) · sqrt((t − lo)(hi − t))` on band `k`: smooth on the closed band.
    pub fn regular_part(&self, k: usize, t: f64) -> f64 {
        self.system.band_sign(k) * self.numerator(t) / (PI * self.system.h_reduced(2 * k, t).sqrt())
    }

    /// Mass on each band.
    pub fn band_masses(&self) -> &[f64] {
        &self.band_masses
    }

    pub fn total_mass(&self) -> f64 {
        self.band_masses.iter().sum()
    }

    /// Residuals of the gap-period equations after the linear solve.
    pub fn period_residuals(&self) -> &[f64] {
        &self.period_residuals
    }

    /// Coefficients of the correction polynomial in ascending powers of `t`.
    pub fn correction_coeffs(&self) -> Vec<f64> {
        // expand Σ c_i ((t − center)/half)^i
        let n = self.scaled_correction.len();
        let mut out = vec![0.0; n];
        let mut basis = vec![1.0]; // coefficients of ((t − center)/half)^i
        for (i, &c) in self.scaled_correction.iter().enumerate() {
            for (j, &b) in basis.iter().enumerate() {
                out[j] += c * b;
            }
            if i + 1 < n {
                let mut next = vec![0.0; basis.len() + 1];
                for (j, &b) in basis.iter().enumerate() {
                    next[j + 1] += b / self.half;
                    next[j] -= b * self.center / self.half;
                }
                basis = next;
            }
        }
        out
    }
}

/// Harmonic measure per band, `ω_k(ξ)` for `k = 0..l`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMeasureVector {
    pub values: Vec<f64>,
}

impl BandMeasureVector {
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Equilibrium density of `E` (harmonic measure at infinity).
pub fn equilibrium_density(system: &IntervalSystem) -> Result<DensityEvaluator> {
    DensityEvaluator::build(system, Vec::new(), 1.0, &QuadratureSpec::default())
}

/// Density of `ϖ(·, ξ)`. For a complex `ξ` the result is the pair density
/// `ϖ(·, ξ) + ϖ(·, ξ̄)` with total mass 2.
pub fn pole_density(system: &IntervalSystem, pole: &PolePoint) -> Result<DensityEvaluator> {
    check_pole(system, pole)?;
    let mass = if matches!(pole, PolePoint::Complex(_)) {
        2.0
    } else {
        1.0
    };
    let kernels = Kernel::for_pole(system, pole).into_iter().collect();
    DensityEvaluator::build(system, kernels, mass, &QuadratureSpec::default())
}

/// `Σ_j ϖ(·, ξ_j)` over a conjugate-closed list of poles.
pub fn combined_density(system: &IntervalSystem, poles: &[PolePoint]) -> Result<DensityEvaluator> {
    let kernels = kernels_for(system, poles)?;
    DensityEvaluator::build(system, kernels, poles.len() as f64, &QuadratureSpec::default())
}

/// `ω_k(ξ)` for every band.
pub fn band_measures(system: &IntervalSystem, pole: &PolePoint) -> Result<BandMeasureVector> {
    let density = pole_density(system, pole)?;
    let share = density.expected_mass();
    Ok(BandMeasureVector {
        values: density.band_masses().iter().map(|m| m / share).collect(),
    })
}
