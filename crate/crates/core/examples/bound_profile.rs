//! The sharp pointwise bound for `|r'|` next to `|r'|` of one sampled
//! star-class fraction.
//!
//! cargo run --example bound_profile

use chebmark::{build_extremal, sample_star, IntervalSystem, PoleConfiguration};

fn main() -> chebmark::Result<()> {
    let system: IntervalSystem = "-1,-0.5,0.5,1".parse()?;
    let poles: PoleConfiguration = "2,-2,4,-4,inf,inf,inf,inf".parse()?;
    let ef = build_extremal(&system, &poles)?;
    let r = sample_star(&ef, 0.05, 3)?;

    println!("{:>8} {:>14} {:>14} {:>6}", "x", "bound", "|r'(x)|", "in E~");
    for (lo, hi) in system.bands() {
        for i in 0..=8 {
            let x = lo + (hi - lo) * i as f64 / 8.0;
            let bound = ef.bound_profile(x)?;
            println!(
                "{x:>8.4} {bound:>14.6} {:>14.6} {:>6}",
                r.r_prime(x).abs(),
                ef.in_e_tilde(x)
            );
        }
    }
    Ok(())
}
