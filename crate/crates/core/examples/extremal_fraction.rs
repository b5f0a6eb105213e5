//! Build `m_4` on `[-1, -0.5] ∪ [0.5, 1]` and print its structure.
//!
//! cargo run --example extremal_fraction

use chebmark::extremal_fraction::remark_m4;
use chebmark::{build_extremal, markov_constant, IntervalSystem, PoleConfiguration};

fn main() -> chebmark::Result<()> {
    let system = IntervalSystem::quadratic_inverse_image(0.5, 1.0)?;
    let ef = build_extremal(&system, &PoleConfiguration::at_infinity(4)?)?;

    println!("q            = {:?}", ef.signature().q);
    println!("zeros        = {:?}", ef.zeros());
    println!("E~           = {:?}", ef.e_tilde());
    println!("oscillation  = {:?}", ef.osc_nodes());
    println!(
        "numerator    = {:?} (residual {:.1e})",
        ef.numerator(),
        ef.numerator_residual()
    );

    let markov = markov_constant(&ef);
    println!("Markov const = {} at x = {}", markov.value, markov.argmax);
    println!("m_4'(0.5)    = {}", ef.m_prime(0.5));
    for x in [0.5, 0.7, 0.9] {
        println!(
            "m_4({x}) = {:+.15}  closed form {:+.15}",
            ef.m_eval(x),
            remark_m4(0.5, x)
        );
    }
    Ok(())
}
