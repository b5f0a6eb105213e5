//! Executable checks of the derivative bounds, plus batch runs over
//! fixtures and randomly sampled star-class fractions.

mod reproduce;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::extremal_fraction::{build_extremal, markov_constant, ExtremalFraction, PoleConfiguration};
use crate::interval_system::IntervalSystem;
use crate::rational_class::{
    sample_star_with_budget, RationalFraction, DEFAULT_SAMPLING_BUDGET, NORM_GRID, NORM_TOL,
};

pub use reproduce::{
    reproduce_corollary, reproduce_remark_m4, reproduce_rusak_remark, CorollaryReport, RemarkM4Report,
    RemarkM4Row, RusakRemarkReport,
};

pub const POINTWISE_TOL: f64 = 1e-7;
pub const EQUALITY_TOL: f64 = 1e-8;
pub const DEFAULT_GRID: usize = 2001;
/// Slack on `‖r‖_E = 1` before a fraction is rejected instead of rescaled.
pub const NORMALIZATION_SLACK: f64 = 1e-8;
const STAR_GRID: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct Norms {
    pub r_prime: f64,
    pub m_prime: f64,
}

/// Outcome of one inequality check; `pass ⟺ max_violation ≤ tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub claim: String,
    pub fixture: String,
    pub n_samples: usize,
    pub grid: usize,
    pub max_violation: f64,
    pub violation_point: Option<f64>,
    pub norms: Norms,
    pub pass: bool,
    pub tol: f64,
    /// Set when the inputs leave the hypotheses of the claim; reported only.
    pub exploratory: bool,
}

impl VerificationReport {
    fn new(claim: &str, grid: usize, tol: f64, worst: (f64, Option<f64>), norms: Norms) -> Self {
        Self {
            claim: claim.to_string(),
            fixture: String::new(),
            n_samples: 1,
            grid,
            max_violation: worst.0,
            violation_point: worst.1,
            norms,
            pass: worst.0 <= tol,
            tol,
            exploratory: false,
        }
    }

    /// JSON object with sorted keys; non-finite numbers become `null`.
    pub fn to_json(&self) -> Value {
        json!({
            "claim": self.claim,
            "fixture": self.fixture,
            "n_samples": self.n_samples,
            "grid": self.grid,
            "max_violation": finite(self.max_violation),
            "violation_point": self.violation_point.and_then(finite),
            "norms": {
                "r_prime": finite(self.norms.r_prime),
                "m_prime": finite(self.norms.m_prime),
            },
            "pass": self.pass,
            "tol": self.tol,
            "exploratory": self.exploratory,
        })
    }
}

pub(crate) fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Rescales `r` to unit norm on `E` when it is already within the slack,
/// and requires star-class membership.
fn admissible(r: &RationalFraction, system: &IntervalSystem) -> Result<RationalFraction> {
    let (norm, _) = r.sup_norm_on_e(system, NORM_GRID, NORM_TOL);
    if !((norm - 1.0).abs() <= NORMALIZATION_SLACK) {
        return Err(Error::NotNormalized { norm });
    }
    let r = r.scaled(1.0 / norm);
    let star = r.star_membership(system, STAR_GRID, NORM_TOL);
    if !star.is_member {
        return Err(Error::NotInStarClass {
            margin: star.min_gap_margin,
        });
    }
    Ok(r)
}

fn band_grid(lo: f64, hi: f64, grid: usize) -> impl Iterator<Item = f64> {
    let grid = grid.max(2);
    (0..grid).map(move |i| {
        if i + 1 == grid {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (grid - 1) as f64
        }
    })
}

fn worst_of(points: impl Iterator<Item = (f64, f64)>) -> (f64, Option<f64>) {
    points.fold((f64::NEG_INFINITY, None), |acc, (x, v)| {
        if v > acc.0 {
            (v, Some(x))
        } else {
            acc
        }
    })
}

fn norms(r: &RationalFraction, ef: &ExtremalFraction) -> Norms {
    Norms {
        r_prime: r.derivative_sup_norm(ef.system(), NORM_GRID, NORM_TOL).0,
        m_prime: markov_constant(ef).value,
    }
}

/// `max (|r'(x)| − bound_profile(x))` over `grid` points per band.
pub fn check_pointwise(
    r: &RationalFraction,
    ef: &ExtremalFraction,
    grid: usize,
    tol: f64,
) -> Result<VerificationReport> {
    let r = admissible(r, ef.system())?;
    let worst = worst_of(
        ef.system()
            .bands()
            .flat_map(|(lo, hi)| band_grid(lo, hi, grid))
            .map(|x| {
                let bound = ef.bound_profile(x).expect("grid point of E");
                (x, r.r_prime(x).abs() - bound)
            }),
    );
    Ok(VerificationReport::new(
        "pointwise",
        grid,
        tol,
        worst,
        norms(&r, ef),
    ))
}

/// `‖r'‖_E − ‖m_n'‖_E`. Complex poles leave the hypotheses of the norm
/// bound; the check still runs and the report is flagged exploratory.
pub fn check_markov(r: &RationalFraction, ef: &ExtremalFraction, tol: f64) -> Result<VerificationReport> {
    let r = admissible(r, ef.system())?;
    let (r_norm, argmax) = r.derivative_sup_norm(ef.system(), NORM_GRID, NORM_TOL);
    let m_norm = markov_constant(ef).value;
    let mut report = VerificationReport::new(
        "markov",
        NORM_GRID,
        tol,
        (r_norm - m_norm, Some(argmax)),
        Norms {
            r_prime: r_norm,
            m_prime: m_norm,
        },
    );
    report.exploratory = ef.poles().poles().iter().any(|p| !p.is_real());
    Ok(report)
}

/// `max (|r'(x)| − sqrt(1 − r(x)²) γ_n'(x))` over `Ẽ_n`.
pub fn check_bernstein(
    r: &RationalFraction,
    ef: &ExtremalFraction,
    grid: usize,
    tol: f64,
) -> Result<VerificationReport> {
    let r = admissible(r, ef.system())?;
    let worst = worst_of(
        ef.e_tilde()
            .iter()
            .flat_map(|&(lo, hi)| band_grid(lo, hi, grid))
            .map(|x| {
                let g = ef.gamma_prime(x).expect("zeros lie inside bands");
                let v = r.r_eval(x);
                (x, r.r_prime(x).abs() - (1.0 - v * v).max(0.0).sqrt() * g)
            }),
    );
    Ok(VerificationReport::new(
        "bernstein",
        grid,
        tol,
        worst,
        norms(&r, ef),
    ))
}

/// Equality case of the pointwise bound for `r = m_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessReport {
    pub pointwise: VerificationReport,
    /// `max_k ||m_n'(x_k)| − γ_n'(x_k)|`
    pub zero_gap: f64,
    /// `max ||m_n'(x)| − bound_profile(x)|` over grids on `E \ Ẽ_n`
    pub outside_gap: f64,
}

/// Compares the numerator form of `m_n'` with the bound profile at the
/// zeros, on `E \ Ẽ_n` and across a full band grid.
pub fn check_sharpness(ef: &ExtremalFraction, grid: usize) -> Result<SharpnessReport> {
    let m = RationalFraction::from_extremal(ef);
    let mut pointwise = check_pointwise(&m, ef, grid, EQUALITY_TOL)?;
    pointwise.claim = "sharpness".to_string();
    let zero_gap = ef
        .zeros()
        .iter()
        .map(|&z| (m.r_prime(z).abs() - ef.gamma_prime(z).expect("interior zero")).abs())
        .fold(0.0_f64, f64::max);
    let outside_gap = ef
        .outside_e_tilde()
        .into_iter()
        .flat_map(|(lo, hi)| band_grid(lo, hi, grid))
        .map(|x| (m.r_prime(x).abs() - ef.bound_profile(x).expect("point of E")).abs())
        .fold(0.0_f64, f64::max);
    pointwise.pass = pointwise.max_violation.abs() <= EQUALITY_TOL
        && zero_gap <= EQUALITY_TOL
        && outside_gap <= EQUALITY_TOL;
    Ok(SharpnessReport {
        pointwise,
        zero_gap,
        outside_gap,
    })
}

/// A named pair `(E, poles)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub name: String,
    pub system: IntervalSystem,
    pub poles: PoleConfiguration,
}

impl Fixture {
    pub fn new(name: &str, endpoints: &[f64], poles: &str) -> Result<Self> {
        Ok(Self {
            name: name.to_string(),
            system: IntervalSystem::new(endpoints.to_vec())?,
            poles: poles.parse()?,
        })
    }
}

/// Single interval with real poles; the symmetric two-band polynomial case;
/// the symmetric two-band case with real pole pairs.
pub fn default_fixtures() -> Vec<Fixture> {
    vec![
        Fixture::new("single-real-poles", &[-1.0, 1.0], "2,-3,5,-1.5,inf,inf"),
        Fixture::new(
            "symmetric-polynomial",
            &[-1.0, -0.5, 0.5, 1.0],
            "inf,inf,inf,inf,inf,inf,inf,inf",
        ),
        Fixture::new(
            "symmetric-real-pairs",
            &[-1.0, -0.5, 0.5, 1.0],
            "2,-2,4,-4,inf,inf,inf,inf",
        ),
    ]
    .into_iter()
    .map(|f| f.expect("built-in fixture"))
    .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchConfig {
    pub fixtures: Vec<Fixture>,
    pub samples: usize,
    /// Samples use seeds `seed, seed + 1, …`.
    pub seed: u64,
    pub epsilon: f64,
    pub grid: usize,
    pub tol: f64,
    pub budget: usize,
}

impl Default for BatchConfig {
    fn default() -> Self {
        Self {
            fixtures: default_fixtures(),
            samples: 200,
            seed: 1,
            epsilon: 0.05,
            grid: DEFAULT_GRID,
            tol: POINTWISE_TOL,
            budget: DEFAULT_SAMPLING_BUDGET,
        }
    }
}

/// Per fixture: the equality case for `m_n`, then the pointwise, norm and
/// Bernstein checks aggregated over the sampled fractions. Reports follow
/// the fixture order of the config.
pub fn batch_verify(config: &BatchConfig) -> Result<Vec<VerificationReport>> {
    let per_fixture: Vec<Result<Vec<VerificationReport>>> = config
        .fixtures
        .par_iter()
        .map(|f| verify_fixture(f, config))
        .collect();
    let mut out = Vec::new();
    for reports in per_fixture {
        out.extend(reports?);
    }
    Ok(out)
}

fn verify_fixture(fixture: &Fixture, config: &BatchConfig) -> Result<Vec<VerificationReport>> {
    let ef = build_extremal(&fixture.system, &fixture.poles)?;
    let mut sharp = check_sharpness(&ef, config.grid)?.pointwise;
    sharp.fixture = fixture.name.clone();

    let per_sample: Vec<Result<[VerificationReport; 3]>> = (0..config.samples as u64)
        .into_par_iter()
        .map(|i| {
            let r = sample_star_with_budget(&ef, config.epsilon, config.seed + i, config.budget)?;
            Ok([
                check_pointwise(&r, &ef, config.grid, config.tol)?,
                check_markov(&r, &ef, config.tol)?,
                check_bernstein(&r, &ef, config.grid, config.tol)?,
            ])
        })
        .collect();

    let mut merged: Vec<Option<VerificationReport>> = vec![None, None, None];
    for sample in per_sample {
        for (slot, report) in merged.iter_mut().zip(sample?) {
            *slot = Some(match slot.take() {
                None => report,
                Some(acc) => merge(acc, report),
            });
        }
    }
    let mut out = vec![sharp];
    for (slot, claim) in merged.into_iter().zip(["pointwise", "markov", "bernstein"]) {
        let mut report = slot.unwrap_or_else(|| VerificationReport {
            claim: claim.to_string(),
            fixture: String::new(),
            n_samples: 0,
            grid: config.grid,
            max_violation: f64::NEG_INFINITY,
            violation_point: None,
            norms: Norms {
                r_prime: f64::NAN,
                m_prime: markov_constant(&ef).value,
            },
            pass: true,
            tol: config.tol,
            exploratory: false,
        });
        report.fixture = fixture.name.clone();
        out.push(report);
    }
    Ok(out)
}

/// Keeps the worst sample's location and norms.
fn merge(acc: VerificationReport, next: VerificationReport) -> VerificationReport {
    let n = acc.n_samples + next.n_samples;
    let pass = acc.pass && next.pass;
    let exploratory = acc.exploratory || next.exploratory;
    let mut worst = if next.max_violation > acc.max_violation {
        next
    } else {
        acc
    };
    worst.n_samples = n;
    worst.pass = pass;
    worst.exploratory = exploratory;
    worst
}

#[cfg(test)]
mod tests;
