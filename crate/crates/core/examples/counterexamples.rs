//! The two counterexamples and the two-band Markov constant.
//!
//! cargo run --example counterexamples

use chebmark::verify::{reproduce_corollary, reproduce_remark_m4, reproduce_rusak_remark};

fn main() -> chebmark::Result<()> {
    let m4 = reproduce_remark_m4(&[0.05, 0.1, 0.15, 0.2])?;
    for row in &m4.rows {
        println!(
            "a = {:<5} |T_3'| = {:.6}  |m_4'| = {:.6}  T_3 larger: {}",
            row.a, row.t3_prime, row.m4_prime, row.t3_exceeds
        );
    }
    println!("crossover in [{:.9}, {:.9}]", m4.crossover.0, m4.crossover.1);

    let rusak = reproduce_rusak_remark();
    println!(
        "r'(1) = {:.6} > |m_2'(1)| = {:.6}; |r| = {:.4}",
        rusak.r_prime_at_1, rusak.m2_prime_at_1, rusak.r_norm
    );

    for n in [2, 4, 6] {
        let c = reproduce_corollary(0.5, 1.0, n)?;
        println!(
            "n = {n}: Markov constant {:.12} vs {:.12}",
            c.markov_constant, c.closed_form
        );
    }
    Ok(())
}
