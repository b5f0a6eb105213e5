//! Closed-form reproductions: the two counterexamples and the symmetric
//! two-band Markov constant.

use serde_json::{json, Value};

use super::{finite, EQUALITY_TOL};
use crate::error::{Error, Result};
use crate::extremal_fraction::{
    build_extremal, chebyshev_t_prime, corollary_markov_constant, corollary_s, markov_constant,
    PoleConfiguration,
};
use crate::harmonic_measure::equilibrium_density;
use crate::interval_system::IntervalSystem;
use crate::numerics::{find_root_bracketed, maximize_on_interval};

#[derive(Debug, Clone, PartialEq)]
pub struct RemarkM4Row {
    pub a: f64,
    /// `|T_3'(a)| = |12a² − 3|`
    pub t3_prime: f64,
    /// `|m_4'(a)| = 16a / (1 − a²)`
    pub m4_prime: f64,
    /// `|m_4'(a)|` from the constructed fraction on `[−1, −a] ∪ [a, 1]`
    pub m4_prime_numeric: f64,
    pub margin: f64,
    pub t3_exceeds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RemarkM4Report {
    pub rows: Vec<RemarkM4Row>,
    /// Bracket of the root of `3 − 12a² − 16a/(1 − a²)` on `(0, 1/2)`.
    pub crossover: (f64, f64),
    pub pass: bool,
}

impl RemarkM4Report {
    pub fn to_json(&self) -> Value {
        json!({
            "claim": "remark-m4",
            "rows": self.rows.iter().map(|r| json!({
                "a": r.a,
                "t3_prime": r.t3_prime,
                "m4_prime": r.m4_prime,
                "m4_prime_numeric": finite(r.m4_prime_numeric),
                "margin": r.margin,
                "t3_exceeds": r.t3_exceeds,
            })).collect::<Vec<_>>(),
            "crossover": [self.crossover.0, self.crossover.1],
            "pass": self.pass,
        })
    }
}

fn m4_margin(a: f64) -> f64 {
    3.0 - 12.0 * a * a - 16.0 * a / (1.0 - a * a)
}

/// Compares `|T_3'(a)|` with `|m_4'(a)|` on `[−1, −a] ∪ [a, 1]` and brackets
/// the value of `a` where the two meet. `pass` means the closed form agrees
/// with the constructed fraction at every `a`.
pub fn reproduce_remark_m4(a_values: &[f64]) -> Result<RemarkM4Report> {
    let mut rows = Vec::with_capacity(a_values.len());
    let mut agree = true;
    for &a in a_values {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::ParameterOutOfRange(format!("a = {a} outside (0, 1)")));
        }
        let t3_prime = chebyshev_t_prime(3, a).abs();
        let m4_prime = 16.0 * a / (1.0 - a * a);
        let system = IntervalSystem::quadratic_inverse_image(a, 1.0)?;
        let m4_prime_numeric = build_extremal(&system, &PoleConfiguration::at_infinity(4)?)
            .map(|ef| ef.m_prime(a).abs())
            .unwrap_or(f64::NAN);
        agree &= (m4_prime_numeric - m4_prime).abs() <= 1e-6 * m4_prime.max(1.0);
        rows.push(RemarkM4Row {
            a,
            t3_prime,
            m4_prime,
            m4_prime_numeric,
            margin: t3_prime - m4_prime,
            t3_exceeds: t3_prime > m4_prime,
        });
    }
    let root = find_root_bracketed(m4_margin, 1e-9, 0.5, 1e-14)?;
    let h = 1e-12;
    Ok(RemarkM4Report {
        rows,
        crossover: (root - h, root + h),
        pass: agree,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RusakRemarkReport {
    pub r_prime_at_1: f64,
    pub m2_prime_at_1: f64,
    pub r_norm: f64,
    pub r_norm_argmax: f64,
    pub r_prime_norm: f64,
    pub m2_prime_norm: f64,
    pub m2_prime_norm_argmax: f64,
    /// `r'(1) > |m_2'(1)|`
    pub endpoint_bound_fails: bool,
    pub pass: bool,
}

impl RusakRemarkReport {
    pub fn to_json(&self) -> Value {
        json!({
            "claim": "rusak-remark",
            "r_prime_at_1": self.r_prime_at_1,
            "m2_prime_at_1": self.m2_prime_at_1,
            "r_norm": self.r_norm,
            "r_norm_argmax": self.r_norm_argmax,
            "r_prime_norm": self.r_prime_norm,
            "m2_prime_norm": self.m2_prime_norm,
            "m2_prime_norm_argmax": self.m2_prime_norm_argmax,
            "endpoint_bound_fails": self.endpoint_bound_fails,
            "pass": self.pass,
        })
    }
}

/// `r = (72x² − 5x)/(100x² + 1)` against `m_2 = (102x² − 1)/(100x² + 1)`,
/// whose poles `±i/10` sit inside the unit disk.
pub fn reproduce_rusak_remark() -> RusakRemarkReport {
    let r = |x: f64| (72.0 * x * x - 5.0 * x) / (100.0 * x * x + 1.0);
    let r_prime = |x: f64| {
        let d = 100.0 * x * x + 1.0;
        ((144.0 * x - 5.0) * d - 200.0 * x * (72.0 * x * x - 5.0 * x)) / (d * d)
    };
    let m2_prime = |x: f64| 404.0 * x / (100.0 * x * x + 1.0).powi(2);
    let (r_norm_argmax, r_norm) = maximize_on_interval(|x| r(x).abs(), -1.0, 1.0, 4001, 1e-13);
    let (_, r_prime_norm) = maximize_on_interval(|x| r_prime(x).abs(), -1.0, 1.0, 4001, 1e-13);
    let (m2_prime_norm_argmax, m2_prime_norm) =
        maximize_on_interval(|x| m2_prime(x).abs(), 0.0, 1.0, 4001, 1e-13);
    let r_prime_at_1 = r_prime(1.0);
    let m2_prime_at_1 = m2_prime(1.0);
    let endpoint_bound_fails = r_prime_at_1 > m2_prime_at_1.abs();
    RusakRemarkReport {
        r_prime_at_1,
        m2_prime_at_1,
        r_norm,
        r_norm_argmax,
        r_prime_norm,
        m2_prime_norm,
        m2_prime_norm_argmax,
        endpoint_bound_fails,
        pass: endpoint_bound_fails && r_norm <= 1.0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorollaryReport {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub markov_constant: f64,
    pub closed_form: f64,
    pub relative_error: f64,
    /// `max |density − |x| / (π sqrt((b² − x²)(x² − a²)))|` on band grids
    pub density_error: f64,
    /// `max |m_n − S_n|` on band grids
    pub s_n_error: f64,
    pub constant_matches: bool,
    pub density_matches: bool,
    pub s_n_matches: bool,
    pub pass: bool,
}

impl CorollaryReport {
    pub fn to_json(&self) -> Value {
        json!({
            "claim": "corollary",
            "a": self.a,
            "b": self.b,
            "n": self.n,
            "markov_constant": self.markov_constant,
            "closed_form": self.closed_form,
            "relative_error": self.relative_error,
            "density_error": self.density_error,
            "s_n_error": self.s_n_error,
            "constant_matches": self.constant_matches,
            "density_matches": self.density_matches,
            "s_n_matches": self.s_n_matches,
            "pass": self.pass,
        })
    }
}

/// Markov constant, equilibrium density and extremal polynomial on
/// `[−b, −a] ∪ [a, b]` against their closed forms, `n` even.
pub fn reproduce_corollary(a: f64, b: f64, n: usize) -> Result<CorollaryReport> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidParameters(format!(
            "n = {n} must be even and positive"
        )));
    }
    let system = IntervalSystem::quadratic_inverse_image(a, b)?;
    let ef = build_extremal(&system, &PoleConfiguration::at_infinity(n)?)?;
    let value = markov_constant(&ef).value;
    let closed_form = corollary_markov_constant(n, a, b);
    let relative_error = (value - closed_form).abs() / closed_form;

    let density = equilibrium_density(&system)?;
    let mut density_error = 0.0_f64;
    let mut s_n_error = 0.0_f64;
    for (lo, hi) in system.bands() {
        for i in 0..=1000 {
            let x = lo + (hi - lo) * i as f64 / 1000.0;
            s_n_error = s_n_error.max((ef.m_eval(x) - corollary_s(n, a, b, x)).abs());
            if 0 < i && i < 1000 {
                let exact = x.abs() / (std::f64::consts::PI * ((b * b - x * x) * (x * x - a * a)).sqrt());
                density_error = density_error.max((density.density(x) - exact).abs());
            }
        }
    }
    let constant_matches = relative_error <= EQUALITY_TOL;
    let density_matches = density_error <= EQUALITY_TOL;
    let s_n_matches = s_n_error <= EQUALITY_TOL;
    Ok(CorollaryReport {
        a,
        b,
        n,
        markov_constant: value,
        closed_form,
        relative_error,
        density_error,
        s_n_error,
        constant_matches,
        density_matches,
        s_n_matches,
        pass: constant_matches && density_matches && s_n_matches,
    })
}
