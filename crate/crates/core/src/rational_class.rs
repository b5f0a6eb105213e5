//! Fractions `r(x) = (b_0 x^n + … + b_n) / sqrt(ρ(x))` with a fixed pole set.
//!
//! The star subclass asks for `|r(x)| > ‖r‖_{C(E)}` on every gap of `E`.
//! By continuity such an `r` attains its norm at every inner gap endpoint,
//! so random perturbations of `m_n` are drawn from the directions that keep
//! those endpoint values fixed and push `|r|` inward at the remaining
//! oscillation nodes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremal_fraction::{polyval, polyval_prime, ExtremalFraction, PoleConfiguration};
use crate::harmonic_measure::{parse_pole_list, PolePoint};
use crate::interval_system::IntervalSystem;
use crate::numerics::maximize_on_interval;

pub const NORM_GRID: usize = 2048;
pub const NORM_TOL: f64 = 1e-10;
pub const DEFAULT_SAMPLING_BUDGET: usize = 64;

/// A member of the class with real coefficients, leading coefficient first.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFraction {
    coeffs: Vec<f64>,
    poles: PoleConfiguration,
}

/// Outcome of the grid test for the star subclass.
#[derive(Debug, Clone, PartialEq)]
pub struct StarMembershipReport {
    pub is_member: bool,
    /// `min |r(x)| − ‖r‖_E` over the gap grids; `+∞` when `E` has no gaps.
    pub min_gap_margin: f64,
    pub worst_point: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct FractionJson {
    coeffs: Vec<f64>,
    poles: Vec<String>,
}

impl RationalFraction {
    /// `coeffs` must hold exactly `n + 1` entries.
    pub fn new(coeffs: Vec<f64>, poles: PoleConfiguration) -> Result<Self> {
        if coeffs.len() != poles.degree() + 1 {
            return Err(Error::InvalidParameters(format!(
                "expected {} coefficients for {} poles, got {}",
                poles.degree() + 1,
                poles.poles().len(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameters("non-finite coefficient".into()));
        }
        Ok(Self { coeffs, poles })
    }

    /// Lower-degree numerators are padded with leading zeros.
    pub fn from_polynomial(mut coeffs: Vec<f64>, poles: PoleConfiguration) -> Result<Self> {
        let want = poles.degree() + 1;
        if coeffs.len() < want {
            let mut padded = vec![0.0; want - coeffs.len()];
            padded.append(&mut coeffs);
            coeffs = padded;
        }
        Self::new(coeffs, poles)
    }

    pub fn from_extremal(ef: &ExtremalFraction) -> Self {
        Self {
            coeffs: ef.numerator().to_vec(),
            poles: ef.poles().clone(),
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn poles(&self) -> &PoleConfiguration {
        &self.poles
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|b| b * c).collect(),
            poles: self.poles.clone(),
        }
    }

    pub fn r_eval(&self, x: f64) -> f64 {
        polyval(&self.coeffs, x) / self.poles.rho(x).sqrt()
    }

    /// `(p' − ½ p ρ'/ρ) / sqrt(ρ)`.
    pub fn r_prime(&self, x: f64) -> f64 {
        let p = polyval(&self.coeffs, x);
        let dp = polyval_prime(&self.coeffs, x);
        (dp - 0.5 * p * self.poles.log_derivative(x)) / self.poles.rho(x).sqrt()
    }

    /// `(‖r‖_E, argmax)`.
    pub fn sup_norm_on_e(&self, system: &IntervalSystem, grid: usize, tol: f64) -> (f64, f64) {
        band_max(system, |x| self.r_eval(x).abs(), grid, tol)
    }

    /// `(‖r'‖_E, argmax)`.
    pub fn derivative_sup_norm(&self, system: &IntervalSystem, grid: usize, tol: f64) -> (f64, f64) {
        band_max(system, |x| self.r_prime(x).abs(), grid, tol)
    }

    /// Grid test of `|r| > ‖r‖_E` on `conv(E) \ E`, keeping a distance `tol`
    /// from the gap endpoints.
    pub fn star_membership(&self, system: &IntervalSystem, grid: usize, tol: f64) -> StarMembershipReport {
        let (norm, _) = self.sup_norm_on_e(system, NORM_GRID, NORM_TOL);
        let mut worst = (None, f64::INFINITY);
        for (lo, hi) in system.gaps() {
            let (a, b) = (lo + tol, hi - tol);
            if a >= b {
                continue;
            }
            let (x, v) = maximize_on_interval(|x| norm - self.r_eval(x).abs(), a, b, grid.max(2), 1e-12);
            if -v < worst.1 {
                worst = (Some(x), -v);
            }
        }
        StarMembershipReport {
            is_member: worst.1 > 0.0,
            min_gap_margin: worst.1,
            worst_point: worst.0,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(FractionJson {
            coeffs: self.coeffs.clone(),
            poles: self.poles.poles().iter().map(|p| p.to_string()).collect(),
        })
        .expect("plain data serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: FractionJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let poles = raw
            .poles
            .iter()
            .map(|s| s.parse::<PolePoint>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(raw.coeffs, PoleConfiguration::new(poles)?)
    }
}

/// Parses `--poles`-style text into a configuration.
pub fn parse_poles(s: &str) -> Result<PoleConfiguration> {
    PoleConfiguration::new(parse_pole_list(s)?)
}

fn band_max<F: Fn(f64) -> f64>(system: &IntervalSystem, f: F, grid: usize, tol: f64) -> (f64, f64) {
    system
        .bands()
        .map(|(lo, hi)| {
            let (x, v) = maximize_on_interval(&f, lo, hi, grid, tol);
            (v, x)
        })
        .fold(
            (f64::NEG_INFINITY, f64::NAN),
            |acc, c| if c.0 > acc.0 { c } else { acc },
        )
}

/// Random star-class member near `m_n`, normalized to `‖r‖_E = 1`.
pub fn sample_star(ef: &ExtremalFraction, eps: f64, seed: u64) -> Result<RationalFraction> {
    sample_star_with_budget(ef, eps, seed, DEFAULT_SAMPLING_BUDGET)
}

pub fn sample_star_with_budget(
    ef: &ExtremalFraction,
    eps: f64,
    seed: u64,
    budget: usize,
) -> Result<RationalFraction> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidParameters(format!("epsilon {eps} outside [0, 1)")));
    }
    let base = RationalFraction::from_extremal(ef);
    if eps == 0.0 {
        return Ok(base);
    }
    let system = ef.system();
    let n = ef.degree();
    let inner: Vec<f64> = system.endpoints()[1..system.endpoints().len() - 1].to_vec();
    if inner.len() > n {
        return Err(Error::SamplingExhausted { attempts: 0 });
    }
    // q = g·s vanishes at the inner gap endpoints
    let g = inner.iter().fold(vec![1.0], |acc, &a| polymul(&acc, &[1.0, -a]));
    let free_degree = n - inner.len();
    let nodes: Vec<(f64, f64)> = ef
        .osc_nodes()
        .iter()
        .filter(|y| !inner.contains(y))
        .map(|&y| (y, ef.m_eval(y).signum()))
        .collect();
    let scale = max_abs(&base.coeffs);
    let inward: Vec<f64> = inward_direction(&g, free_degree, &nodes)?
        .iter()
        .map(|c| c * scale)
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..budget {
        let s: Vec<f64> = (0..=free_degree).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let mut q = pad(&polymul(&g, &s), n + 1);
        let q_scale = max_abs(&q);
        if q_scale == 0.0 {
            continue;
        }
        for c in q.iter_mut() {
            *c *= scale / q_scale;
        }
        // shift along the inward direction until every free node is inward
        let kappa = nodes
            .iter()
            .map(|&(y, sign)| sign * polyval(&q, y) / polyval(&inward, y).abs())
            .fold(0.0_f64, f64::max)
            + 0.25;
        let coeffs: Vec<f64> = base
            .coeffs
            .iter()
            .zip(q.iter().zip(&inward))
            .map(|(b, (q, h))| b + eps * (q + kappa * h) / (1.0 + kappa))
            .collect();
        let candidate = RationalFraction::new(coeffs, base.poles.clone())?;
        let (norm, _) = candidate.sup_norm_on_e(system, NORM_GRID, NORM_TOL);
        let r = candidate.scaled(1.0 / norm);
        if r.star_membership(system, 512, NORM_TOL).is_member {
            return Ok(r);
        }
    }
    Err(Error::SamplingExhausted { attempts: budget })
}

/// `g·s` pointing inward (`sign · value < 0`) at every free node, scaled to
/// unit coefficient norm; found by least squares against `−sign·|g|`.
fn inward_direction(g: &[f64], free_degree: usize, nodes: &[(f64, f64)]) -> Result<Vec<f64>> {
    let n = g.len() - 1 + free_degree;
    let mut a = nalgebra::DMatrix::<f64>::zeros(nodes.len(), free_degree + 1);
    let mut b = nalgebra::DVector::<f64>::zeros(nodes.len());
    for (row, &(y, sign)) in nodes.iter().enumerate() {
        let gy = polyval(g, y);
        for c in 0..=free_degree {
            a[(row, c)] = gy * y.powi((free_degree - c) as i32);
        }
        b[row] = -sign;
    }
    let s = a
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|e| Error::InvalidParameters(e.to_string()))?;
    let h = pad(&polymul(g, s.as_slice()), n + 1);
    let ok = nodes.iter().all(|&(y, sign)| sign * polyval(&h, y) < 0.0);
    let norm = max_abs(&h);
    if !ok || norm == 0.0 {
        return Err(Error::SamplingExhausted { attempts: 0 });
    }
    Ok(h.iter().map(|c| c / norm).collect())
}

fn polymul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn pad(coeffs: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len.saturating_sub(coeffs.len())];
    out.extend_from_slice(coeffs);
    out
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |acc, c| acc.max(c.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal_fraction::{build_extremal, chebyshev_t, remark_m4};

    fn sym() -> IntervalSystem {
        IntervalSystem::quadratic_inverse_image(0.5, 1.0).unwrap()
    }

    fn m4() -> ExtremalFraction {
        build_extremal(&sym(), &PoleConfiguration::at_infinity(4).unwrap()).unwrap()
    }

    fn t3(poles: PoleConfiguration) -> RationalFraction {
        RationalFraction::from_polynomial(vec![4.0, 0.0, -3.0, 0.0], poles).unwrap()
    }

    #[test]
    fn evaluation_and_derivative() {
        let r = t3(PoleConfiguration::at_infinity(3).unwrap());
        assert!((r.r_prime(0.1) + 2.88).abs() < 1e-14);
        assert_eq!(r.r_eval(0.5), chebyshev_t(3, 0.5));
        let m = RationalFraction::from_extremal(&m4());
        assert!((m.r_prime(0.5) + 32.0 / 3.0).abs() < 1e-9);
        assert!((m.r_eval(0.0) - remark_m4(0.5, 0.0)).abs() < 1e-9);
        assert!(RationalFraction::new(vec![2.0], PoleConfiguration::at_infinity(1).unwrap()).is_err());
        let flat =
            RationalFraction::from_polynomial(vec![2.0], PoleConfiguration::at_infinity(2).unwrap()).unwrap();
        assert_eq!(flat.r_prime(0.3), 0.0);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let poles: PoleConfiguration = "2,-3,1.5+0.5i,1.5-0.5i".parse().unwrap();
        let r = RationalFraction::new(vec![0.3, -1.0, 0.7], poles).unwrap();
        for i in 1..50 {
            let x = -1.0 + i as f64 / 25.0;
            let h = 1e-6;
            let fd = (r.r_eval(x + h) - r.r_eval(x - h)) / (2.0 * h);
            assert!((r.r_prime(x) - fd).abs() <= 1e-6 * fd.abs().max(1.0));
        }
    }

    #[test]
    fn sup_norms() {
        let one = IntervalSystem::new(vec![-1.0, 1.0]).unwrap();
        let t = t3(PoleConfiguration::at_infinity(3).unwrap());
        assert!((t.sup_norm_on_e(&one, NORM_GRID, NORM_TOL).0 - 1.0).abs() < 1e-12);
        assert!((t.scaled(2.0).sup_norm_on_e(&one, NORM_GRID, NORM_TOL).0 - 2.0).abs() < 1e-12);
        let m = RationalFraction::from_extremal(&m4());
        assert!((m.sup_norm_on_e(&sym(), NORM_GRID, NORM_TOL).0 - 1.0).abs() < 1e-10);
        assert!((m.derivative_sup_norm(&sym(), NORM_GRID, NORM_TOL).0 - 64.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn star_membership_cases() {
        let m = RationalFraction::from_extremal(&m4());
        let report = m.star_membership(&sym(), 512, NORM_TOL);
        assert!(report.is_member, "{report:?}");
        let t = t3(PoleConfiguration::at_infinity(4).unwrap());
        let report = t.star_membership(&sym(), 512, NORM_TOL);
        assert!(!report.is_member);
        assert!(report.worst_point.unwrap().abs() < 1e-6);
        let one = IntervalSystem::new(vec![-1.0, 1.0]).unwrap();
        let report = t.star_membership(&one, 512, NORM_TOL);
        assert!(report.is_member && report.worst_point.is_none());
    }

    #[test]
    fn sampling() {
        let ef = m4();
        let same = sample_star(&ef, 0.0, 7).unwrap();
        assert_eq!(same, RationalFraction::from_extremal(&ef));
        for seed in 1..=10 {
            let r = sample_star(&ef, 0.05, seed).unwrap();
            assert_eq!(r, sample_star(&ef, 0.05, seed).unwrap());
            assert!((r.sup_norm_on_e(&sym(), NORM_GRID, NORM_TOL).0 - 1.0).abs() <= 1e-10);
            assert!(r.star_membership(&sym(), 512, NORM_TOL).is_member);
            assert_ne!(r, RationalFraction::from_extremal(&ef));
        }
        assert!(matches!(
            sample_star_with_budget(&ef, 0.05, 1, 0),
            Err(Error::SamplingExhausted { .. })
        ));
        assert!(sample_star(&ef, 1.5, 1).is_err());
    }

    #[test]
    fn json_round_trip() {
        let poles: PoleConfiguration = "inf,2.0,1.5+0.5i,1.5-0.5i".parse().unwrap();
        let r = RationalFraction::new(vec![1.0, 0.5, -0.25], poles).unwrap();
        let v = r.to_json();
        assert_eq!(v["poles"][2], "1.5+0.5i");
        assert_eq!(RationalFraction::from_json(&v).unwrap(), r);
        assert!(RationalFraction::from_json(&serde_json::json!({"coeffs": [1.0]})).is_err());
    }
}
