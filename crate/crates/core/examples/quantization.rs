//! Which pole sets admit an extremal fraction: the band sums of harmonic
//! measure must be even integers.
//!
//! cargo run --example quantization

use chebmark::extremal_fraction::DEFAULT_QUANTIZATION_TOL;
use chebmark::{quantization_check, IntervalSystem, PoleConfiguration};

fn main() -> chebmark::Result<()> {
    let system: IntervalSystem = "-1,-0.5,0.5,1".parse()?;
    for poles in [
        "inf,inf,inf,inf",
        "2,-2,4,-4,inf,inf,inf,inf",
        "3,inf",
        "2i,-2i,inf,inf",
        "inf,inf,inf,inf,inf,inf",
    ] {
        let poles: PoleConfiguration = poles.parse()?;
        match quantization_check(&system, &poles, DEFAULT_QUANTIZATION_TOL) {
            Ok(sig) => println!("{:<34} q = {:?}, sums {:.9?}", poles.to_string(), sig.q, sig.sums),
            Err(e) => println!("{:<34} rejected: {e}", poles.to_string()),
        }
    }
    Ok(())
}
