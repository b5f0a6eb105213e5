//! The compact set `E = [a_1, a_2] ∪ … ∪ [a_{2l-1}, a_{2l}]`.
//!
//! Bands are closed, gaps are open. Band and gap indices are zero-based in
//! the Rust API: band `k` is `[a_{2k+1}, a_{2k+2}]` in one-based endpoint
//! notation, gap `k` sits between band `k` and band `k + 1`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Ordered union of `l ≥ 1` disjoint closed bands.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSystem {
    endpoints: Vec<f64>,
}

/// Affine change of variable `x ↦ scale * x + shift`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub scale: f64,
    pub shift: f64,
}

impl AffineMap {
    pub fn apply(&self, x: f64) -> f64 {
        self.scale * x + self.shift
    }

    pub fn invert(&self, y: f64) -> f64 {
        (y - self.shift) / self.scale
    }
}

impl IntervalSystem {
    pub fn new(endpoints: Vec<f64>) -> Result<Self> {
        if endpoints.is_empty() || !endpoints.len().is_multiple_of(2) {
            return Err(Error::OddEndpointCount {
                count: endpoints.len(),
            });
        }
        if let Some(i) = endpoints.iter().position(|a| !a.is_finite()) {
            return Err(Error::NonMonotoneEndpoints { index: i });
        }
        for i in 1..endpoints.len() {
            if endpoints[i] <= endpoints[i - 1] {
                return Err(Error::NonMonotoneEndpoints { index: i });
            }
        }
        Ok(Self { endpoints })
    }

    /// `[−b, −a] ∪ [a, b]`, the preimage of `[−1, 1]` under
    /// `u(x) = (2x² − b² − a²) / (b² − a²)`.
    pub fn quadratic_inverse_image(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > a && b.is_finite()) {
            return Err(Error::InvalidParameters(format!(
                "quadratic inverse image needs 0 < a < b (got a = {a}, b = {b})"
            )));
        }
        let system = Self::new(vec![-b, -a, a, b])?;
        let u = |x: f64| quadratic_map(a, b, x);
        for (lo, hi) in system.bands() {
            for i in 0..=256 {
                let x = lo + (hi - lo) * i as f64 / 256.0;
                if u(x).abs() > 1.0 + 1e-12 {
                    return Err(Error::InvalidParameters(format!(
                        "u({x}) = {} leaves [-1, 1]",
                        u(x)
                    )));
                }
            }
        }
        Ok(system)
    }

    pub fn endpoints(&self) -> &[f64] {
        &self.endpoints
    }

    pub fn band_count(&self) -> usize {
        self.endpoints.len() / 2
    }

    pub fn band(&self, k: usize) -> (f64, f64) {
        (self.endpoints[2 * k], self.endpoints[2 * k + 1])
    }

    pub fn bands(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.endpoints.chunks_exact(2).map(|c| (c[0], c[1]))
    }

    pub fn gap(&self, k: usize) -> Result<(f64, f64)> {
        let gaps = self.band_count() - 1;
        if k >= gaps {
            return Err(Error::GapIndexOutOfRange { index: k, gaps });
        }
        Ok((self.endpoints[2 * k + 1], self.endpoints[2 * k + 2]))
    }

    pub fn gaps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.endpoints[1..self.endpoints.len() - 1]
            .chunks_exact(2)
            .map(|c| (c[0], c[1]))
    }

    /// Convex hull `[a_1, a_{2l}]`.
    pub fn hull(&self) -> (f64, f64) {
        (self.endpoints[0], self.endpoints[self.endpoints.len() - 1])
    }

    pub fn contains(&self, x: f64) -> bool {
        self.band_of(x).is_some()
    }

    /// Index of the closed band containing `x`.
    pub fn band_of(&self, x: f64) -> Option<usize> {
        self.bands().position(|(lo, hi)| lo <= x && x <= hi)
    }

    /// Index of the open gap containing `x`.
    pub fn gap_of(&self, x: f64) -> Option<usize> {
        self.gaps().position(|(lo, hi)| lo < x && x < hi)
    }

    /// `H(x) = ∏ (x − a_j)`.
    pub fn h_eval(&self, x: f64) -> f64 {
        self.endpoints.iter().map(|a| x - a).product()
    }

    /// `|H(x)| / ((x − lo)(hi − x))` for the band or gap `[lo, hi]` whose
    /// endpoints are `a_i, a_{i+1}` (zero-based `i`). Smooth and positive on
    /// the closed interval.
    pub fn h_reduced(&self, i: usize, x: f64) -> f64 {
        self.endpoints
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i && j != i + 1)
            .map(|(_, a)| x - a)
            .product::<f64>()
            .abs()
    }

    /// Sign of the upper boundary value of `sqrt(H)/i` on band `k`, i.e.
    /// `(−1)^(l − 1 − k)` with zero-based `k`.
    pub fn band_sign(&self, k: usize) -> f64 {
        if (self.band_count() - 1 - k).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Affine image with hull `[−1, 1]` and the map that produced it.
    pub fn normalized(&self) -> (Self, AffineMap) {
        let (lo, hi) = self.hull();
        let scale = 2.0 / (hi - lo);
        let map = AffineMap {
            scale,
            shift: -(hi + lo) / (hi - lo),
        };
        let mut endpoints: Vec<f64> = self.endpoints.iter().map(|&a| map.apply(a)).collect();
        let last = endpoints.len() - 1;
        endpoints[0] = -1.0;
        endpoints[last] = 1.0;
        (Self { endpoints }, map)
    }

    /// Distance from `x` to the nearest point of `E`.
    pub fn distance_to(&self, x: f64) -> f64 {
        self.bands()
            .map(|(lo, hi)| {
                if x < lo {
                    lo - x
                } else if x > hi {
                    x - hi
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// `u(x) = (2x² − b² − a²) / (b² − a²)`.
pub fn quadratic_map(a: f64, b: f64, x: f64) -> f64 {
    (2.0 * x * x - b * b - a * a) / (b * b - a * a)
}

impl FromStr for IntervalSystem {
    type Err = Error;

    /// Comma-separated decimal endpoints, e.g. `"-1,-0.5,0.5,1"`.
    fn from_str(s: &str) -> Result<Self> {
        let endpoints = s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad endpoint {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(endpoints)
    }
}

impl fmt::Display for IntervalSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (lo, hi)) in self.bands().enumerate() {
            if k > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "[{lo}, {hi}]")?;
        }
        Ok(())
    }
}
