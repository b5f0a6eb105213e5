//! Finite-difference oracle for band measures.
//!
//! Solves the Dirichlet problem for `u` harmonic in `C \ E`, `u = 1` on one
//! band and `0` on the others, on the upper half of the box `[−R, R]²`
//! (the problem is symmetric about the real axis). The far field is the
//! exterior multipole expansion `u = c_0 + Σ c_m (ρ/r)^m cos(mθ)`, whose
//! coefficients are fixed self-consistently: they must reproduce the cosine
//! coefficients of the discrete solution on the circle `r = ρ`.

use crate::error::{Error, Result};
use crate::harmonic_measure::PolePoint;
use crate::interval_system::IntervalSystem;

pub const BOX_HALF_WIDTH: f64 = 8.0;
const MULTIPOLES: usize = 4;
const CIRCLE_SAMPLES: usize = 256;
const MAX_STEP: f64 = 0.25;

struct Grid {
    nx: usize,
    ny: usize,
    step: f64,
    /// true for Dirichlet nodes
    fixed: Vec<bool>,
    /// band index of each slit node
    slit_band: Vec<Option<usize>>,
}

impl Grid {
    fn idx(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    fn x(&self, i: usize) -> f64 {
        -BOX_HALF_WIDTH + self.step * i as f64
    }

    fn y(&self, j: usize) -> f64 {
        self.step * j as f64
    }

    fn is_box(&self, i: usize, j: usize) -> bool {
        i == 0 || i == self.nx || j == self.ny
    }

    /// Bilinear interpolation at `(x, y)` with `y ≥ 0`.
    fn interpolate(&self, values: &[f64], x: f64, y: f64) -> f64 {
        let fx = ((x + BOX_HALF_WIDTH) / self.step).clamp(0.0, self.nx as f64);
        let fy = (y / self.step).clamp(0.0, self.ny as f64);
        let i = (fx.floor() as usize).min(self.nx - 1);
        let j = (fy.floor() as usize).min(self.ny - 1);
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let v = |a, b| values[self.idx(a, b)];
        (1.0 - tx) * (1.0 - ty) * v(i, j)
            + tx * (1.0 - ty) * v(i + 1, j)
            + (1.0 - tx) * ty * v(i, j + 1)
            + tx * ty * v(i + 1, j + 1)
    }
}

/// Five-point operator restricted to the unknown nodes. The bottom row is
/// scaled by ½ so that the reflected operator stays symmetric.
struct Operator {
    nodes: Vec<usize>,
    diag: Vec<f64>,
    /// `(local unknown, weight)` couplings, four slots per node
    inner: Vec<(usize, f64)>,
    /// `(global fixed node, weight)` couplings, four slots per node
    outer: Vec<(usize, f64)>,
}

impl Operator {
    fn new(grid: &Grid) -> Self {
        let n = grid.fixed.len();
        let mut local = vec![usize::MAX; n];
        let nodes: Vec<usize> = (0..n).filter(|&p| !grid.fixed[p]).collect();
        for (k, &p) in nodes.iter().enumerate() {
            local[p] = k;
        }
        let mut op = Self {
            diag: Vec::with_capacity(nodes.len()),
            inner: Vec::with_capacity(4 * nodes.len()),
            outer: Vec::with_capacity(4 * nodes.len()),
            nodes: Vec::new(),
        };
        for &p in &nodes {
            let (i, j) = (p % (grid.nx + 1), p / (grid.nx + 1));
            let (diag, nbrs): (f64, Vec<(usize, f64)>) = if j == 0 {
                (
                    2.0,
                    vec![
                        (grid.idx(i - 1, 0), 0.5),
                        (grid.idx(i + 1, 0), 0.5),
                        (grid.idx(i, 1), 1.0),
                    ],
                )
            } else {
                (
                    4.0,
                    vec![
                        (grid.idx(i - 1, j), 1.0),
                        (grid.idx(i + 1, j), 1.0),
                        (grid.idx(i, j - 1), 1.0),
                        (grid.idx(i, j + 1), 1.0),
                    ],
                )
            };
            op.diag.push(diag);
            for slot in 0..4 {
                let (q, w) = nbrs.get(slot).copied().unwrap_or((0, 0.0));
                if w != 0.0 && !grid.fixed[q] {
                    op.inner.push((local[q], w));
                    op.outer.push((0, 0.0));
                } else {
                    op.inner.push((0, 0.0));
                    op.outer.push((q, w));
                }
            }
        }
        op.nodes = nodes;
        op
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            let mut acc = self.diag[k] * v[k];
            for &(q, w) in &self.inner[4 * k..4 * k + 4] {
                acc -= w * v[q];
            }
            *o = acc;
        }
    }

    /// Preconditioned conjugate gradients; `values` holds the Dirichlet data
    /// on entry and the full solution on exit.
    fn solve(&self, values: &mut [f64]) {
        let m = self.nodes.len();
        let rhs: Vec<f64> = (0..m)
            .map(|k| {
                self.outer[4 * k..4 * k + 4]
                    .iter()
                    .map(|&(q, w)| w * values[q])
                    .sum()
            })
            .collect();
        let rhs_norm = rhs.iter().map(|r| r * r).sum::<f64>().sqrt();
        let mut x = vec![0.0; m];
        if rhs_norm > 0.0 {
            let mut r = rhs;
            let mut z: Vec<f64> = r.iter().zip(&self.diag).map(|(r, d)| r / d).collect();
            let mut d = z.clone();
            let mut ad = vec![0.0; m];
            let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            for _ in 0..20 * m {
                let r_norm = r.iter().map(|r| r * r).sum::<f64>().sqrt();
                if r_norm <= 1e-10 * rhs_norm {
                    break;
                }
                self.apply(&d, &mut ad);
                let alpha = rz / d.iter().zip(&ad).map(|(a, b)| a * b).sum::<f64>();
                for k in 0..m {
                    x[k] += alpha * d[k];
                    r[k] -= alpha * ad[k];
                    z[k] = r[k] / self.diag[k];
                }
                let rz_next: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
                let beta = rz_next / rz;
                rz = rz_next;
                for k in 0..m {
                    d[k] = z[k] + beta * d[k];
                }
            }
        }
        for (k, &p) in self.nodes.iter().enumerate() {
            values[p] = x[k];
        }
    }
}

/// Finite-difference estimate of `ω(ξ, band_k, C \ E)` (zero-based `band`).
pub fn laplace_fd_oracle(
    system: &IntervalSystem,
    pole: &PolePoint,
    band: usize,
    grid_step: f64,
) -> Result<f64> {
    if band >= system.band_count() {
        return Err(Error::InvalidParameters(format!(
            "band {band} out of range for {} band(s)",
            system.band_count()
        )));
    }
    Ok(laplace_fd_measures(system, pole, grid_step, Some(band))?[0])
}

/// Finite-difference estimates of `ω_k(ξ)` for every band, sharing the
/// far-field solves.
pub fn laplace_fd_band_measures(
    system: &IntervalSystem,
    pole: &PolePoint,
    grid_step: f64,
) -> Result<Vec<f64>> {
    laplace_fd_measures(system, pole, grid_step, None)
}

fn laplace_fd_measures(
    system: &IntervalSystem,
    pole: &PolePoint,
    grid_step: f64,
    only: Option<usize>,
) -> Result<Vec<f64>> {
    let z = match pole.as_complex() {
        Some(z) => z,
        None => {
            return Err(Error::OutOfBox {
                pole: pole.to_string(),
            })
        }
    };
    if z.re.abs() >= BOX_HALF_WIDTH - 1.0 || z.im.abs() >= BOX_HALF_WIDTH - 1.0 {
        return Err(Error::OutOfBox {
            pole: pole.to_string(),
        });
    }
    let radius = system.endpoints().iter().fold(0.0_f64, |acc, a| acc.max(a.abs()));
    if radius > 0.5 * BOX_HALF_WIDTH {
        return Err(Error::InvalidParameters(format!(
            "E must lie inside [-{0}, {0}] for the oracle box",
            0.5 * BOX_HALF_WIDTH
        )));
    }
    if !(grid_step > 0.0 && grid_step <= MAX_STEP) {
        return Err(Error::GridTooCoarse { step: grid_step });
    }
    let cells = 2.0 * BOX_HALF_WIDTH / grid_step;
    if (cells - cells.round()).abs() > 1e-9 * cells || !(cells.round() as usize).is_multiple_of(2) {
        return Err(Error::InvalidParameters(format!(
            "grid step {grid_step} must divide the box width into an even number of cells"
        )));
    }
    let narrowest = system
        .bands()
        .chain(system.gaps())
        .map(|(lo, hi)| hi - lo)
        .fold(f64::INFINITY, f64::min);
    if narrowest < 2.0 * grid_step {
        return Err(Error::GridTooCoarse { step: grid_step });
    }

    let nx = cells.round() as usize;
    let ny = nx / 2;
    let n = (nx + 1) * (ny + 1);
    let mut grid = Grid {
        nx,
        ny,
        step: grid_step,
        fixed: vec![false; n],
        slit_band: vec![None; n],
    };
    for j in 0..=ny {
        for i in 0..=nx {
            let p = grid.idx(i, j);
            if grid.is_box(i, j) {
                grid.fixed[p] = true;
            } else if j == 0 {
                let x = grid.x(i);
                let slack = 1e-9 * grid_step;
                if let Some(k) = system
                    .bands()
                    .position(|(lo, hi)| lo - slack <= x && x <= hi + slack)
                {
                    grid.fixed[p] = true;
                    grid.slit_band[p] = Some(k);
                }
            }
        }
    }
    let op = Operator::new(&grid);

    let rho = 0.5 * (radius + BOX_HALF_WIDTH);
    let angles: Vec<f64> = (0..CIRCLE_SAMPLES)
        .map(|q| (q as f64 + 0.5) * std::f64::consts::PI / CIRCLE_SAMPLES as f64)
        .collect();
    let cosine_coeffs = |values: &[f64]| -> Vec<f64> {
        let samples: Vec<f64> = angles
            .iter()
            .map(|&t| grid.interpolate(values, rho * t.cos(), rho * t.sin()))
            .collect();
        (0..=MULTIPOLES)
            .map(|m| {
                let s: f64 = samples
                    .iter()
                    .zip(&angles)
                    .map(|(v, t)| v * (m as f64 * t).cos())
                    .sum();
                if m == 0 {
                    s / CIRCLE_SAMPLES as f64
                } else {
                    2.0 * s / CIRCLE_SAMPLES as f64
                }
            })
            .collect()
    };

    // One solve per multipole with zero slit data.
    let mut modes = Vec::with_capacity(MULTIPOLES + 1);
    for m in 0..=MULTIPOLES {
        let mut values = vec![0.0; n];
        for j in 0..=ny {
            for i in 0..=nx {
                if grid.is_box(i, j) {
                    let (x, y) = (grid.x(i), grid.y(j));
                    let r = x.hypot(y);
                    let theta = y.atan2(x);
                    values[grid.idx(i, j)] = (rho / r).powi(m as i32) * (m as f64 * theta).cos();
                }
            }
        }
        op.solve(&mut values);
        modes.push(values);
    }
    let size = MULTIPOLES + 1;
    let mut matrix = nalgebra::DMatrix::<f64>::identity(size, size);
    for (m, values) in modes.iter().enumerate() {
        for (row, c) in cosine_coeffs(values).into_iter().enumerate() {
            matrix[(row, m)] -= c;
        }
    }
    let lu = matrix.lu();
    let (x, y) = (z.re, z.im.abs());

    let bands: Vec<usize> = match only {
        Some(k) => vec![k],
        None => (0..system.band_count()).collect(),
    };
    let mut out = Vec::with_capacity(bands.len());
    for band in bands {
        // slit problem with zero far field
        let mut base: Vec<f64> = grid
            .slit_band
            .iter()
            .map(|&b| if b == Some(band) { 1.0 } else { 0.0 })
            .collect();
        op.solve(&mut base);
        let coeffs = lu
            .solve(&nalgebra::DVector::from_vec(cosine_coeffs(&base)))
            .ok_or(Error::SingularPeriodSystem)?;
        let mut value = grid.interpolate(&base, x, y);
        for (m, values) in modes.iter().enumerate() {
            value += coeffs[m] * grid.interpolate(values, x, y);
        }
        out.push(value);
    }
    Ok(out)
}
