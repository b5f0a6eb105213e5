//! Membership in the star class and seeded sampling around `m_n`.
//!
//! cargo run --example star_class

use chebmark::rational_class::{NORM_GRID, NORM_TOL};
use chebmark::{build_extremal, sample_star, IntervalSystem, PoleConfiguration, RationalFraction};

fn main() -> chebmark::Result<()> {
    let system: IntervalSystem = "-1,-0.1,0.1,1".parse()?;
    let ef = build_extremal(&system, &PoleConfiguration::at_infinity(4)?)?;

    let t3 = RationalFraction::from_polynomial(vec![4.0, 0.0, -3.0, 0.0], ef.poles().clone())?;
    let m4 = RationalFraction::from_extremal(&ef);
    for (name, r) in [("T_3", &t3), ("m_4", &m4)] {
        let star = r.star_membership(&system, 512, NORM_TOL);
        println!(
            "{name}: member = {}, gap margin = {:.3e}",
            star.is_member, star.min_gap_margin
        );
    }

    for seed in 1..=3 {
        let r = sample_star(&ef, 0.05, seed)?;
        let (norm, _) = r.sup_norm_on_e(&system, NORM_GRID, NORM_TOL);
        println!("seed {seed}: |r|_E = {norm:.12}  {}", r.to_json());
    }
    Ok(())
}
