//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! cargo test --test acceptance

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use chebmark::extremal_fraction::{chebyshev_t, corollary_markov_constant, remark_m4};
use chebmark::harmonic_measure::parse_pole_list;
use chebmark::verify::{check_pointwise, check_sharpness, reproduce_remark_m4, reproduce_rusak_remark};
use chebmark::{
    band_measures, batch_verify, build_extremal, equilibrium_density, laplace_fd_band_measures,
    markov_constant, pole_density, BatchConfig, ExtremalFraction, IntervalSystem, PoleConfiguration,
    PolePoint, RationalFraction,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lib<T>(r: chebmark::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

/// `n` points strictly inside `[lo, hi]`.
fn interior(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64)
}

fn system(s: &str) -> IntervalSystem {
    s.parse().expect("fixture endpoints")
}

fn poles(s: &str) -> PoleConfiguration {
    s.parse().expect("fixture poles")
}

fn single_interval_density() -> Outcome {
    let e = system("-1,1");
    let mut worst = 0.0_f64;
    for xi in [2.0, -2.0, 5.0, -5.0] {
        let d = lib(pole_density(&e, &PolePoint::Real(xi)))?;
        for x in grid(-0.99, 0.99, 1001) {
            let exact = (xi * xi - 1.0_f64).sqrt() / (PI * (xi - x).abs() * (1.0 - x * x).sqrt());
            worst = worst.max((d.density(x) - exact).abs());
        }
    }
    ensure(worst <= 1e-8, format!("max error {worst:.2e}"))
}

fn symmetric_equilibrium_density() -> Outcome {
    let (a, b) = (0.5, 1.0);
    let e = lib(IntervalSystem::quadratic_inverse_image(a, b))?;
    let d = lib(equilibrium_density(&e))?;
    let mut worst = 0.0_f64;
    for (lo, hi) in e.bands() {
        for x in interior(lo, hi, 1001) {
            let exact = x.abs() / (PI * ((b * b - x * x) * (x * x - a * a)).sqrt());
            worst = worst.max((d.density(x) - exact).abs());
        }
    }
    ensure(worst <= 1e-8, format!("max error {worst:.2e}"))
}

fn random_system(rng: &mut ChaCha8Rng) -> IntervalSystem {
    loop {
        let l = rng.gen_range(1..=4);
        let mut pts: Vec<f64> = (0..2 * l - 2).map(|_| rng.gen_range(-0.98..0.98)).collect();
        pts.push(-1.0);
        pts.push(1.0);
        pts.sort_by(f64::total_cmp);
        if pts.windows(2).all(|w| w[1] - w[0] > 0.02) {
            return IntervalSystem::new(pts).expect("sorted endpoints");
        }
    }
}

fn normalization_and_positivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let (mut mass_err, mut min_density) = (0.0_f64, f64::INFINITY);
    for _ in 0..20 {
        let e = random_system(&mut rng);
        for _ in 0..3 {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let pole = PolePoint::Real(sign * rng.gen_range(1.1..10.0));
            let omega = lib(band_measures(&e, &pole))?;
            mass_err = mass_err.max((omega.sum() - 1.0).abs());
            let d = lib(pole_density(&e, &pole))?;
            for (lo, hi) in e.bands() {
                for x in interior(lo, hi, 201) {
                    min_density = min_density.min(d.density(x));
                }
            }
        }
    }
    ensure(
        mass_err <= 1e-8 && min_density >= -1e-10,
        format!("|sum - 1| ≤ {mass_err:.2e}, min density {min_density:.3e}"),
    )
}

fn laplace_oracle() -> Outcome {
    let cases = [
        ("-1,1", "2"),
        ("-1,-0.5,0.5,1", "3"),
        ("-1,-0.5,0.5,1", "1.5"),
        ("-1,-0.5,0.5,1", "2i"),
        ("-1,-0.25,0.25,1", "1+1i"),
        ("-1,-0.5,0,0.25,0.75,1", "-1.5"),
    ];
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for (e, p) in cases {
        let e = system(e);
        let pole = lib(parse_pole_list(p))?.remove(0);
        let exact = lib(band_measures(&e, &pole))?.values;
        let fd = lib(laplace_fd_band_measures(&e, &pole, 1.0 / 16.0))?;
        for (u, v) in exact.iter().zip(&fd) {
            worst = worst.max((u - v).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(
        worst <= 2e-2 && secs <= 30.0,
        format!("max deviation {worst:.2e} over 6 cases in {secs:.1} s"),
    )
}

fn structure_fixtures() -> Vec<(&'static str, ExtremalFraction)> {
    let sym = "-1,-0.5,0.5,1";
    let mut out = vec![];
    let mut push = |name, e: &str, p: PoleConfiguration| {
        out.push((name, build_extremal(&system(e), &p).expect("fixture builds")));
    };
    push(
        "single interval, n = 5",
        "-1,1",
        PoleConfiguration::at_infinity(5).unwrap(),
    );
    for n in [2, 4, 6] {
        let name = match n {
            2 => "two bands, n = 2",
            4 => "two bands, n = 4",
            _ => "two bands, n = 6",
        };
        push(name, sym, PoleConfiguration::at_infinity(n).unwrap());
    }
    push("two bands, real pairs", sym, poles("2,-2,4,-4,inf,inf,inf,inf"));
    out
}

fn phase_structure() -> Outcome {
    let mut worst_end = 0.0_f64;
    let mut worst_inc = 0.0_f64;
    for (name, ef) in structure_fixtures() {
        let n = ef.degree() as f64;
        let (a1, end) = ef.system().hull();
        worst_end = worst_end
            .max((ef.gamma(end) - n * PI).abs())
            .max(ef.gamma(a1).abs());
        let q = &ef.signature().q;
        for (k, inc) in ef.band_increments().iter().enumerate() {
            worst_inc = worst_inc.max((inc - q[k] as f64 * PI).abs());
        }
        for (k, (lo, hi)) in ef.system().bands().enumerate() {
            let count = ef.zeros().iter().filter(|&&z| lo <= z && z <= hi).count();
            if count != q[k] {
                return Err(format!("{name}: band {k} holds {count} zeros, expected {}", q[k]));
            }
        }
    }
    ensure(
        worst_end <= 1e-8 && worst_inc <= 1e-8,
        format!("end phase error {worst_end:.2e}, increment error {worst_inc:.2e}, zero counts exact"),
    )
}

fn closed_form_extremal() -> Outcome {
    let a = 0.5;
    let e = lib(IntervalSystem::quadratic_inverse_image(a, 1.0))?;
    let ef = lib(build_extremal(&e, &lib(PoleConfiguration::at_infinity(4))?))?;
    let (mut t2_err, mut poly_err) = (0.0_f64, 0.0_f64);
    for (lo, hi) in e.bands() {
        for x in grid(lo, hi, 1001) {
            let m = ef.m_eval(x);
            t2_err = t2_err.max((m - chebyshev_t(2, (2.0 * x * x - 1.0 - a * a) / (1.0 - a * a))).abs());
            let a2 = a * a;
            let poly =
                (8.0 * x.powi(4) - 8.0 * x * x * (1.0 + a2) + 1.0 + 6.0 * a2 + a2 * a2) / (1.0 - a2).powi(2);
            poly_err = poly_err.max((m - poly).abs()).max((m - remark_m4(a, x)).abs());
        }
    }
    let slope_err = (ef.m_prime(0.5) + 16.0 * a / (1.0 - a * a)).abs();
    ensure(
        t2_err <= 1e-8 && poly_err <= 1e-8 && slope_err <= 1e-8,
        format!("T_2 form {t2_err:.2e}, quartic form {poly_err:.2e}, m_4'(0.5) error {slope_err:.2e}"),
    )
}

fn markov_constants() -> Outcome {
    let e = lib(IntervalSystem::quadratic_inverse_image(0.5, 1.0))?;
    let ef = lib(build_extremal(&e, &lib(PoleConfiguration::at_infinity(4))?))?;
    let target = corollary_markov_constant(4, 0.5, 1.0);
    let rel = (markov_constant(&ef).value - target).abs() / target;
    let mut classical = 0.0_f64;
    for n in 1..=8 {
        let ef = lib(build_extremal(
            &system("-1,1"),
            &lib(PoleConfiguration::at_infinity(n))?,
        ))?;
        let nn = (n * n) as f64;
        classical = classical.max((markov_constant(&ef).value - nn).abs() / nn);
    }
    ensure(
        rel <= 1e-8 && classical <= 1e-8,
        format!("two bands rel error {rel:.2e} (target {target:.6}), single interval n = 1..8 rel error {classical:.2e}"),
    )
}

fn sharpness() -> Outcome {
    let mut worst = (0.0_f64, 0.0_f64, 0.0_f64);
    for f in chebmark::verify::default_fixtures() {
        let ef = lib(build_extremal(&f.system, &f.poles))?;
        let s = lib(check_sharpness(&ef, 2001))?;
        let direct = lib(check_pointwise(
            &RationalFraction::from_extremal(&ef),
            &ef,
            2001,
            1e-8,
        ))?;
        worst.0 = worst
            .0
            .max(s.pointwise.max_violation.abs())
            .max(direct.max_violation.abs());
        worst.1 = worst.1.max(s.zero_gap);
        worst.2 = worst.2.max(s.outside_gap);
    }
    ensure(
        worst.0 <= 1e-8 && worst.1 <= 1e-8 && worst.2 <= 1e-8,
        format!(
            "|max_violation| {:.2e}, gap at zeros {:.2e}, gap off E~ {:.2e}",
            worst.0, worst.1, worst.2
        ),
    )
}

fn fuzzing() -> Outcome {
    let config = BatchConfig::default();
    let reports = lib(batch_verify(&config))?;
    let failing: Vec<String> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{}/{} {:.2e}", r.fixture, r.claim, r.max_violation))
        .collect();
    let worst = reports
        .iter()
        .filter(|r| r.claim != "sharpness")
        .map(|r| r.max_violation)
        .fold(f64::NEG_INFINITY, f64::max);
    let samples: usize = reports
        .iter()
        .filter(|r| r.claim == "pointwise")
        .map(|r| r.n_samples)
        .sum();
    ensure(
        failing.is_empty() && samples == 200 * config.fixtures.len(),
        format!("{samples} samples, worst margin {worst:.2e}, failing {failing:?}"),
    )
}

fn remark_m4_counterexample() -> Outcome {
    let report = lib(reproduce_remark_m4(&[0.1]))?;
    let row = &report.rows[0];
    let (lo, hi) = report.crossover;
    ensure(
        (row.t3_prime - 2.88).abs() <= 1e-12
            && (row.m4_prime - 16.0 * 0.1 / 0.99).abs() <= 1e-12
            && row.t3_exceeds
            && 0.16 < lo
            && hi < 0.17,
        format!(
            "|T_3'(0.1)| = {}, |m_4'(0.1)| = {}, crossover in [{lo:.9}, {hi:.9}]",
            row.t3_prime, row.m4_prime
        ),
    )
}

fn rusak_remark() -> Outcome {
    let r = reproduce_rusak_remark();
    let e1 = (r.r_prime_at_1 - 639.0 / 10201.0).abs();
    let e2 = (r.m2_prime_at_1 - 404.0 / 10201.0).abs();
    ensure(
        e1 <= 1e-12 && e2 <= 1e-12 && r.endpoint_bound_fails && r.r_norm <= 1.0,
        format!(
            "r'(1) = {:.9}, m_2'(1) = {:.9}, |r| = {:.6}, |m_2'| = {:.4}",
            r.r_prime_at_1, r.m2_prime_at_1, r.r_norm, r.m2_prime_norm
        ),
    )
}

fn identities() -> Outcome {
    let (mut pell, mut min_second) = (0.0_f64, f64::INFINITY);
    let mut fixtures = structure_fixtures();
    fixtures.push((
        "two bands, complex pair",
        lib(build_extremal(&system("-1,-0.5,0.5,1"), &poles("2i,-2i,inf,inf")))?,
    ));
    fixtures.push((
        "single interval, real poles",
        lib(build_extremal(&system("-1,1"), &poles("2,-3,5,-1.5,inf,inf")))?,
    ));
    for (name, ef) in &fixtures {
        for (lo, hi) in ef.system().bands() {
            let xs: Vec<f64> = interior(lo, hi, 1001).collect();
            let mut g = Vec::with_capacity(xs.len());
            for &x in &xs {
                let gp = ef.gamma_prime(x).map_err(|e| format!("{name}: {e}"))?;
                let m = ef.m_eval(x);
                pell = pell.max(((ef.m_prime(x) / gp).powi(2) + m * m - 1.0).abs());
                g.push(gp);
            }
            for w in g.windows(3) {
                min_second = min_second.min(w[0] - 2.0 * w[1] + w[2]);
            }
        }
    }
    ensure(
        pell <= 1e-8 && min_second >= -1e-8,
        format!("identity error {pell:.2e}, min second difference {min_second:.2e}"),
    )
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_chebmark"))
            .args(["verify", "--samples", "200", "--seed", "11", "--epsilon", "0.05"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(
        a.status.success() && b.status.success() && !a.stdout.is_empty() && a.stdout == b.stdout,
        format!(
            "{} bytes, exit codes {:?} / {:?}",
            a.stdout.len(),
            a.status.code(),
            b.status.code()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("single-interval pole density", single_interval_density),
        ("two-band equilibrium density", symmetric_equilibrium_density),
        ("normalization and positivity", normalization_and_positivity),
        ("finite-difference Laplace oracle", laplace_oracle),
        ("phase increments and zero counts", phase_structure),
        ("closed-form m_4", closed_form_extremal),
        ("Markov constants", markov_constants),
        ("equality case of the pointwise bound", sharpness),
        ("sampled star-class fractions", fuzzing),
        ("T_3 against m_4 counterexample", remark_m4_counterexample),
        ("poles inside the unit disk counterexample", rusak_remark),
        ("Pell identity and phase convexity", identities),
        ("byte-identical verify output", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} {name} ({secs:.1} s): {detail}", i + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
