//! The cosine fraction `m_n = cos(γ_n)` built from a quantized pole set.
//!
//! `γ_n(x) = (π/2) ∫_{a_1}^x Σ_j ϖ(t, ξ_j) dt` rises by `q_k π` across band
//! `k` and stays constant across gaps. On `E` the fraction is evaluated in
//! trigonometric form; elsewhere through the recovered numerator
//! `p_n(x) / sqrt(ρ(x))`.

mod closed_form;

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::harmonic_measure::{combined_density, parse_pole_list, DensityEvaluator, PolePoint, POLE_GUARD};
use crate::interval_system::IntervalSystem;
use crate::numerics::{find_root_bracketed, maximize_on_interval, ArcsineSeries};

pub use closed_form::{
    chebyshev_t, chebyshev_t_prime, corollary_gamma_prime, corollary_markov_constant, corollary_s,
    corollary_s_prime, remark_m4, remark_m4_prime, RusakFraction,
};

pub const DEFAULT_QUANTIZATION_TOL: f64 = 1e-6;
pub const NUMERATOR_TOL: f64 = 1e-8;
pub const CONVEXITY_TOL: f64 = 1e-8;

/// `2n` poles, closed under conjugation, all outside the closed unit disk.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleConfiguration {
    poles: Vec<PolePoint>,
}

impl PoleConfiguration {
    pub fn new(poles: Vec<PolePoint>) -> Result<Self> {
        if poles.is_empty() || !poles.len().is_multiple_of(2) {
            return Err(Error::InvalidParameters(format!(
                "need an even, nonzero number of poles (got {})",
                poles.len()
            )));
        }
        for p in &poles {
            if p.is_finite() && !(p.modulus() > 1.0 + POLE_GUARD && p.modulus().is_finite()) {
                return Err(Error::PoleTooClose { pole: p.to_string() });
            }
        }
        let mut used = vec![false; poles.len()];
        for (i, p) in poles.iter().enumerate() {
            if used[i] {
                continue;
            }
            used[i] = true;
            if let PolePoint::Complex(z) = p {
                let partner = (0..poles.len()).find(|&j| {
                    !used[j]
                        && matches!(poles[j], PolePoint::Complex(w)
                            if (w - z.conj()).norm() <= 1e-12 * z.norm())
                });
                match partner {
                    Some(j) => used[j] = true,
                    None => return Err(Error::ConjugatePairMissing { pole: p.to_string() }),
                }
            }
        }
        Ok(Self { poles })
    }

    /// `2n` poles at infinity (the polynomial case).
    pub fn at_infinity(n: usize) -> Result<Self> {
        Self::new(vec![PolePoint::Infinity; 2 * n])
    }

    pub fn poles(&self) -> &[PolePoint] {
        &self.poles
    }

    /// The degree parameter `n`.
    pub fn degree(&self) -> usize {
        self.poles.len() / 2
    }

    /// `ρ(x) = ∏ |x − ξ_j|` over finite poles.
    pub fn rho(&self, x: f64) -> f64 {
        self.poles
            .iter()
            .filter_map(|p| p.as_complex())
            .map(|z| (x - z).norm())
            .product()
    }

    /// `ρ'(x) / ρ(x) = Σ Re 1/(x − ξ_j)`.
    pub fn log_derivative(&self, x: f64) -> f64 {
        self.poles
            .iter()
            .filter_map(|p| p.as_complex())
            .map(|z| (1.0 / (x - z)).re)
            .sum()
    }

    /// Fails when a real pole lies in (or within the guard of) `conv(E)`.
    pub fn check_against(&self, system: &IntervalSystem) -> Result<()> {
        let (lo, hi) = system.hull();
        for p in &self.poles {
            if let PolePoint::Real(x) = p {
                if *x >= lo - POLE_GUARD && *x <= hi + POLE_GUARD {
                    return Err(Error::PoleTooClose { pole: p.to_string() });
                }
            }
        }
        Ok(())
    }
}

impl FromStr for PoleConfiguration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(parse_pole_list(s)?)
    }
}

impl fmt::Display for PoleConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.poles.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Band counts `q_k` with `Σ_j ω_k(ξ_j) ≈ 2 q_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizationSignature {
    pub q: Vec<usize>,
    /// `Σ_j ω_k(ξ_j) − 2 q_k` per band.
    pub residuals: Vec<f64>,
    /// `Σ_j ω_k(ξ_j)` per band.
    pub sums: Vec<f64>,
}

impl QuantizationSignature {
    fn from_sums(sums: Vec<f64>, tol: f64) -> Result<Self> {
        let q: Vec<usize> = sums.iter().map(|s| (s / 2.0).round().max(0.0) as usize).collect();
        let residuals: Vec<f64> = sums.iter().zip(&q).map(|(s, &q)| s - 2.0 * q as f64).collect();
        let worst = residuals.iter().enumerate().fold((0, 0.0_f64), |acc, (k, r)| {
            if r.abs() > acc.1.abs() {
                (k, *r)
            } else {
                acc
            }
        });
        if !(worst.1.abs() <= tol) {
            return Err(Error::QuantizationViolated {
                band: worst.0,
                residual: worst.1,
            });
        }
        if let Some(k) = q.iter().position(|&q| q == 0) {
            return Err(Error::QuantizationViolated {
                band: k,
                residual: sums[k],
            });
        }
        Ok(Self { q, residuals, sums })
    }
}

/// Rounds the band sums of harmonic measure to even integers.
pub fn quantization_check(
    system: &IntervalSystem,
    poles: &PoleConfiguration,
    tol: f64,
) -> Result<QuantizationSignature> {
    poles.check_against(system)?;
    let density = combined_density(system, poles.poles())?;
    QuantizationSignature::from_sums(density.band_masses().to_vec(), tol)
}

#[derive(Debug, Clone)]
struct BandPhase {
    lo: f64,
    hi: f64,
    series: ArcsineSeries,
    start: f64,
    end: f64,
    start_level: usize,
    end_level: usize,
    increment: f64,
}

fn parity(j: usize) -> f64 {
    if j.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl BandPhase {
    /// `(cos γ, sin γ)` from the nearer band end, where `γ` is a multiple of `π`.
    fn cos_sin(&self, x: f64) -> (f64, f64) {
        let (left, right) = self.series.split_integral(x);
        if x - self.lo <= self.hi - x {
            let u = FRAC_PI_2 * left;
            let s = parity(self.start_level);
            (s * u.cos(), s * u.sin())
        } else {
            let u = FRAC_PI_2 * right;
            let s = parity(self.end_level);
            (s * u.cos(), -s * u.sin())
        }
    }

    fn gamma(&self, x: f64) -> f64 {
        let (left, right) = self.series.split_integral(x);
        if x - self.lo <= self.hi - x {
            self.start + FRAC_PI_2 * left
        } else {
            self.end - FRAC_PI_2 * right
        }
    }
}

/// `m_n` with its phase, zeros, Chebyshev blocks and recovered numerator.
#[derive(Debug, Clone)]
pub struct ExtremalFraction {
    system: IntervalSystem,
    poles: PoleConfiguration,
    signature: QuantizationSignature,
    density: DensityEvaluator,
    bands: Vec<BandPhase>,
    zeros: Vec<f64>,
    e_tilde: Vec<(f64, f64)>,
    osc_nodes: Vec<f64>,
    /// `b_0, …, b_n`, leading coefficient first.
    numerator: Vec<f64>,
    numerator_cheb: ChebSeries,
    numerator_residual: f64,
}

/// Builds `m_n` after checking quantization at the default tolerance.
pub fn build_extremal(system: &IntervalSystem, poles: &PoleConfiguration) -> Result<ExtremalFraction> {
    build_extremal_with_tol(system, poles, DEFAULT_QUANTIZATION_TOL)
}

pub fn build_extremal_with_tol(
    system: &IntervalSystem,
    poles: &PoleConfiguration,
    tol: f64,
) -> Result<ExtremalFraction> {
    poles.check_against(system)?;
    let density = combined_density(system, poles.poles())?;
    let signature = QuantizationSignature::from_sums(density.band_masses().to_vec(), tol)?;

    let mut bands = Vec::with_capacity(system.band_count());
    let mut passed = 0usize;
    for (k, (lo, hi)) in system.bands().enumerate() {
        let series = ArcsineSeries::fit(|t| density.regular_part(k, t), lo, hi, 1e-14, 1 << 15)?;
        let start_level = passed;
        passed += signature.q[k];
        bands.push(BandPhase {
            lo,
            hi,
            increment: FRAC_PI_2 * series.integral(),
            series,
            start: PI * start_level as f64,
            end: PI * passed as f64,
            start_level,
            end_level: passed,
        });
    }

    let mut ef = ExtremalFraction {
        system: system.clone(),
        poles: poles.clone(),
        signature,
        density,
        bands,
        zeros: Vec::new(),
        e_tilde: Vec::new(),
        osc_nodes: Vec::new(),
        numerator: Vec::new(),
        numerator_cheb: ChebSeries::default(),
        numerator_residual: 0.0,
    };
    ef.locate_levels()?;
    ef.fit_numerator()?;
    Ok(ef)
}

impl ExtremalFraction {
    fn level_crossing(&self, k: usize, level: f64) -> Result<f64> {
        let band = &self.bands[k];
        find_root_bracketed(|x| band.gamma(x) - level, band.lo, band.hi, 1e-15)
    }

    fn locate_levels(&mut self) -> Result<()> {
        let mut passed = 0usize;
        for k in 0..self.bands.len() {
            let q = self.signature.q[k];
            let (lo, hi) = (self.bands[k].lo, self.bands[k].hi);
            let mut zeros = Vec::with_capacity(q);
            for i in 0..q {
                let level = PI * (passed + i) as f64 + FRAC_PI_2;
                zeros.push(self.level_crossing(k, level)?);
            }
            let found = self.sign_changes(k);
            if found != q || zeros.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::ZeroCountMismatch {
                    band: k,
                    expected: q,
                    found,
                });
            }
            self.osc_nodes.push(lo);
            for j in 1..q {
                let level = PI * (passed + j) as f64;
                self.osc_nodes.push(self.level_crossing(k, level)?);
            }
            self.osc_nodes.push(hi);
            self.e_tilde.push((zeros[0], zeros[q - 1]));
            self.zeros.extend(zeros);
            passed += q;
        }
        Ok(())
    }

    /// Sign changes of `cos γ` on an arcsine-spaced grid over band `k`.
    fn sign_changes(&self, k: usize) -> usize {
        let band = &self.bands[k];
        let m = 64 * (self.signature.q[k] + 1);
        let (mid, half) = (0.5 * (band.lo + band.hi), 0.5 * (band.hi - band.lo));
        let mut count = 0;
        let mut prev = band.cos_sin(band.lo).0;
        for j in 1..=m {
            let x = (mid - half * (PI * j as f64 / m as f64).cos()).clamp(band.lo, band.hi);
            let c = band.cos_sin(x).0;
            if c != 0.0 && prev != 0.0 && c.signum() != prev.signum() {
                count += 1;
            }
            if c != 0.0 {
                prev = c;
            }
        }
        count
    }

    fn fit_numerator(&mut self) -> Result<()> {
        let n = self.poles.degree();
        let (lo, hi) = self.system.hull();
        let (center, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let per_band = 2 * n + 10;

        let mut xs = Vec::new();
        for band in &self.bands {
            let (mid, h) = (0.5 * (band.lo + band.hi), 0.5 * (band.hi - band.lo));
            for j in 0..per_band {
                xs.push(mid - h * ((j as f64 + 0.5) * PI / per_band as f64).cos());
            }
        }
        let mut a = DMatrix::<f64>::zeros(xs.len(), n + 1);
        let mut y = DVector::<f64>::zeros(xs.len());
        for (r, &x) in xs.iter().enumerate() {
            let s = (x - center) / half;
            let (mut t0, mut t1) = (1.0, s);
            for c in 0..=n {
                a[(r, c)] = t0;
                let t2 = 2.0 * s * t1 - t0;
                t0 = t1;
                t1 = t2;
            }
            y[r] = self.trig_value(x) * self.poles.rho(x).sqrt();
        }
        let cheb = a
            .svd(true, true)
            .solve(&y, 1e-14)
            .map_err(|e| Error::InvalidParameters(e.to_string()))?;
        self.numerator = chebyshev_to_monomial(cheb.as_slice(), center, half);
        self.numerator_cheb = ChebSeries::new(cheb.as_slice().to_vec(), center, half);

        let mut residual = 0.0_f64;
        for band in &self.bands {
            let (mid, h) = (0.5 * (band.lo + band.hi), 0.5 * (band.hi - band.lo));
            for j in 0..=per_band {
                let x = (mid - h * (j as f64 * PI / per_band as f64).cos()).clamp(band.lo, band.hi);
                residual = residual.max((self.numerator_form(x) - self.trig_value(x)).abs());
            }
        }
        self.numerator_residual = residual;
        if !(residual <= NUMERATOR_TOL) {
            return Err(Error::NumeratorResidualTooLarge(residual));
        }
        Ok(())
    }

    fn trig_value(&self, x: f64) -> f64 {
        let k = self.system.band_of(x).expect("point of E");
        self.bands[k].cos_sin(x).0
    }

    pub fn system(&self) -> &IntervalSystem {
        &self.system
    }

    pub fn poles(&self) -> &PoleConfiguration {
        &self.poles
    }

    pub fn degree(&self) -> usize {
        self.poles.degree()
    }

    pub fn signature(&self) -> &QuantizationSignature {
        &self.signature
    }

    pub fn density(&self) -> &DensityEvaluator {
        &self.density
    }

    /// `γ_n(x)`, extended as a constant outside `conv(E)`.
    pub fn gamma(&self, x: f64) -> f64 {
        match self.system.band_of(x) {
            Some(k) => self.bands[k].gamma(x),
            None => match self.bands.iter().rposition(|b| b.hi < x) {
                Some(k) => self.bands[k].end,
                None => 0.0,
            },
        }
    }

    /// Computed phase increment across each band (nominally `q_k π`).
    pub fn band_increments(&self) -> Vec<f64> {
        self.bands.iter().map(|b| b.increment).collect()
    }

    /// `γ_n'(x) = (π/2) Σ_j ϖ(x, ξ_j)` on band interiors.
    pub fn gamma_prime(&self, x: f64) -> Result<f64> {
        match self.system.band_of(x) {
            Some(k) if self.bands[k].lo < x && x < self.bands[k].hi => {
                Ok(FRAC_PI_2 * self.density.density(x))
            }
            _ => Err(Error::OutsideBands(x)),
        }
    }

    /// `m_n(x)`: `cos γ_n` on `E`, `p_n / sqrt(ρ)` elsewhere.
    pub fn m_eval(&self, x: f64) -> f64 {
        match self.system.band_of(x) {
            Some(k) => self.bands[k].cos_sin(x).0,
            None => self.numerator_form(x),
        }
    }

    /// `m_n'(x)`: `−sin γ_n · γ_n'` on band interiors, the derivative of the
    /// numerator form elsewhere (band endpoints included).
    pub fn m_prime(&self, x: f64) -> f64 {
        match self.system.band_of(x) {
            Some(k) if self.bands[k].lo < x && x < self.bands[k].hi => {
                -self.bands[k].cos_sin(x).1 * FRAC_PI_2 * self.density.density(x)
            }
            _ => self.numerator_form_prime(x),
        }
    }

    /// `p_n(x) / sqrt(ρ(x))`.
    pub fn numerator_form(&self, x: f64) -> f64 {
        self.numerator_cheb.value(x) / self.poles.rho(x).sqrt()
    }

    pub fn numerator_form_prime(&self, x: f64) -> f64 {
        let p = self.numerator_cheb.value(x);
        let dp = self.numerator_cheb.derivative(x);
        (dp - 0.5 * p * self.poles.log_derivative(x)) / self.poles.rho(x).sqrt()
    }

    /// `b_0, …, b_n` of `p_n`, leading coefficient first.
    pub fn numerator(&self) -> &[f64] {
        &self.numerator
    }

    /// Largest held-out deviation between the two forms of `m_n` on `E`.
    pub fn numerator_residual(&self) -> f64 {
        self.numerator_residual
    }

    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    /// Per-band hulls of the zeros.
    pub fn e_tilde(&self) -> &[(f64, f64)] {
        &self.e_tilde
    }

    pub fn in_e_tilde(&self, x: f64) -> bool {
        self.e_tilde.iter().any(|&(lo, hi)| lo <= x && x <= hi)
    }

    /// Closed pieces of `E \ Ẽ_n` (shared endpoints with `Ẽ_n` included).
    pub fn outside_e_tilde(&self) -> Vec<(f64, f64)> {
        self.bands
            .iter()
            .zip(&self.e_tilde)
            .flat_map(|(b, &(z0, z1))| [(b.lo, z0), (z1, b.hi)])
            .collect()
    }

    /// Points where `|m_n| = 1`: band endpoints and interior levels `jπ`.
    pub fn osc_nodes(&self) -> &[f64] {
        &self.osc_nodes
    }

    /// `γ_n'(x)` on `Ẽ_n`, `|m_n'(x)|` on the rest of `E`.
    pub fn bound_profile(&self, x: f64) -> Result<f64> {
        if !self.system.contains(x) {
            return Err(Error::OutsideE(x));
        }
        if self.in_e_tilde(x) {
            self.gamma_prime(x)
        } else {
            Ok(self.m_prime(x).abs())
        }
    }
}

/// `‖m_n'‖_{C(E)}` with its location and the convexity diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovConstant {
    pub value: f64,
    pub argmax: f64,
    /// Smallest second difference of `γ_n'` over interior band grids.
    pub min_second_difference: f64,
    pub convexity_warning: Option<Error>,
}

/// Maximum of `γ_n'` at the zeros and of `|m_n'|` on `E \ Ẽ_n`.
pub fn markov_constant(ef: &ExtremalFraction) -> MarkovConstant {
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for &z in ef.zeros() {
        let v = ef.gamma_prime(z).unwrap_or(f64::NEG_INFINITY);
        if v > best.1 {
            best = (z, v);
        }
    }
    for (lo, hi) in ef.outside_e_tilde() {
        let (x, v) = maximize_on_interval(|x| ef.m_prime(x).abs(), lo, hi, 513, 1e-13);
        if v > best.1 {
            best = (x, v);
        }
    }

    let mut min_second = f64::INFINITY;
    let mut warning = None;
    for (k, (lo, hi)) in ef.system().bands().enumerate() {
        let m = 1000;
        let g: Vec<f64> = (1..m)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / m as f64;
                ef.gamma_prime(x).unwrap_or(f64::NAN)
            })
            .collect();
        for w in g.windows(3) {
            let d = w[0] - 2.0 * w[1] + w[2];
            if d < min_second {
                min_second = d;
            }
            if d < -CONVEXITY_TOL && warning.is_none() {
                warning = Some(Error::ConvexityCheckFailed {
                    band: k,
                    second_difference: d,
                });
            }
        }
    }
    MarkovConstant {
        value: best.1,
        argmax: best.0,
        min_second_difference: min_second,
        convexity_warning: warning,
    }
}

/// Horner evaluation, leading coefficient first.
pub fn polyval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
}

pub fn polyval_prime(coeffs: &[f64], x: f64) -> f64 {
    let n = coeffs.len().saturating_sub(1);
    coeffs[..n]
        .iter()
        .enumerate()
        .fold(0.0, |acc, (i, &c)| acc * x + c * (n - i) as f64)
}

/// `Σ c_j T_j((x − center)/half)`, evaluated by Clenshaw's recurrence.
#[derive(Debug, Clone, Default)]
struct ChebSeries {
    coeffs: Vec<f64>,
    /// coefficients of the derivative in `s`
    slope: Vec<f64>,
    center: f64,
    half: f64,
}

impl ChebSeries {
    fn new(coeffs: Vec<f64>, center: f64, half: f64) -> Self {
        let n = coeffs.len();
        // d_{k-1} = d_{k+1} + 2k c_k, then d_0 is halved
        let mut slope = vec![0.0; n + 1];
        for k in (1..n).rev() {
            slope[k - 1] = slope[k + 1] + 2.0 * k as f64 * coeffs[k];
        }
        slope.truncate(n.saturating_sub(1));
        if let Some(first) = slope.first_mut() {
            *first *= 0.5;
        }
        Self {
            coeffs,
            slope,
            center,
            half,
        }
    }

    fn clenshaw(c: &[f64], s: f64) -> f64 {
        let (mut b1, mut b2) = (0.0, 0.0);
        for &ck in c.iter().skip(1).rev() {
            let b0 = 2.0 * s * b1 - b2 + ck;
            b2 = b1;
            b1 = b0;
        }
        c.first().map_or(0.0, |&c0| s * b1 - b2 + c0)
    }

    fn value(&self, x: f64) -> f64 {
        Self::clenshaw(&self.coeffs, (x - self.center) / self.half)
    }

    fn derivative(&self, x: f64) -> f64 {
        Self::clenshaw(&self.slope, (x - self.center) / self.half) / self.half
    }
}

/// `Σ c_j T_j((x − center)/half)` as monomials in `x`, leading first.
fn chebyshev_to_monomial(cheb: &[f64], center: f64, half: f64) -> Vec<f64> {
    let n = cheb.len();
    // ascending powers of s
    let mut in_s = vec![0.0; n];
    let mut t_prev = vec![1.0];
    let mut t_cur = vec![0.0, 1.0];
    for (j, &c) in cheb.iter().enumerate() {
        let t = if j == 0 { &t_prev } else { &t_cur };
        for (i, &v) in t.iter().enumerate() {
            in_s[i] += c * v;
        }
        if j >= 1 {
            let mut next = vec![0.0; t_cur.len() + 1];
            for (i, &v) in t_cur.iter().enumerate() {
                next[i + 1] += 2.0 * v;
            }
            for (i, &v) in t_prev.iter().enumerate() {
                next[i] -= v;
            }
            t_prev = std::mem::replace(&mut t_cur, next);
        }
    }
    // s = x / half − center / half
    let (alpha, beta) = (1.0 / half, -center / half);
    let mut in_x = vec![0.0; n];
    let mut power = vec![1.0];
    for &c in &in_s {
        for (i, &v) in power.iter().enumerate() {
            in_x[i] += c * v;
        }
        let mut next = vec![0.0; power.len() + 1];
        for (i, &v) in power.iter().enumerate() {
            next[i] += beta * v;
            next[i + 1] += alpha * v;
        }
        power = next;
    }
    in_x.reverse();
    in_x
}
