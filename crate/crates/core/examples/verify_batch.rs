//! Run the inequality checks over the built-in fixtures.
//!
//! cargo run --release --example verify_batch

use chebmark::{batch_verify, BatchConfig};

fn main() -> chebmark::Result<()> {
    let config = BatchConfig {
        samples: 50,
        ..BatchConfig::default()
    };
    for r in batch_verify(&config)? {
        println!(
            "{:<22} {:<10} n={:<4} max_violation={:+.3e} pass={}",
            r.fixture, r.claim, r.n_samples, r.max_violation, r.pass
        );
    }
    Ok(())
}
