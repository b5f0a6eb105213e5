//! Equilibrium density of `[-1, -0.5] ∪ [0.5, 1]` against its closed form.
//!
//! cargo run --example equilibrium_density

use std::f64::consts::PI;

use chebmark::{equilibrium_density, IntervalSystem};

fn main() -> chebmark::Result<()> {
    let (a, b) = (0.5, 1.0);
    let system = IntervalSystem::quadratic_inverse_image(a, b)?;
    let density = equilibrium_density(&system)?;

    println!("E = {system}");
    println!("band masses = {:?}", density.band_masses());
    println!("{:>8} {:>20} {:>20}", "x", "density", "closed form");
    for x in [0.55, 0.6, 0.7, 0.8, 0.9, 0.95] {
        let exact = x / (PI * ((b * b - x * x) * (x * x - a * a)).sqrt());
        println!("{x:>8} {:>20.15} {exact:>20.15}", density.density(x));
    }
    Ok(())
}
