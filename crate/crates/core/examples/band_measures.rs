//! Harmonic measure of each band seen from a few poles, with the
//! finite-difference Laplace solver as an independent check.
//!
//! cargo run --release --example band_measures

use chebmark::harmonic_measure::parse_pole_list;
use chebmark::{band_measures, laplace_fd_band_measures, IntervalSystem};

fn main() -> chebmark::Result<()> {
    let system: IntervalSystem = "-1,-0.5,0,0.25,0.75,1".parse()?;
    println!("E = {system}");
    for pole in parse_pole_list("inf,-1.5,2+1i")? {
        let omega = band_measures(&system, &pole)?;
        print!(
            "pole {pole:>6}: omega = {:.6?} (sum {:.12})",
            omega.values,
            omega.sum()
        );
        if pole.is_finite() {
            let fd = laplace_fd_band_measures(&system, &pole, 1.0 / 16.0)?;
            print!("  finite differences {fd:.4?}");
        }
        println!();
    }
    Ok(())
}
