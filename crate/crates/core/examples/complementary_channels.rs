//! Stinespring dilations and complementary channels: on pure inputs the
//! output and the environment carry the same entropy.

use chancap::channels::KrausChannel;
use chancap::random::rng_from_seed;
use chancap::states::{random_pure_with, von_neumann_entropy};

fn main() -> chancap::Result<()> {
    let mut rng = rng_from_seed(42);
    let channels = [
        ("erasure 0.25", KrausChannel::erasure(2, 0.25)?),
        ("depolarizing 0.2", KrausChannel::depolarizing(2, 0.2)?),
        ("random 2->3", KrausChannel::random(&mut rng, 2, 3, 2)),
    ];
    for (name, ch) in &channels {
        let v = ch.stinespring();
        let comp = ch.complementary();
        let psi = random_pure_with(&mut rng, ch.din()).to_density();
        let out = von_neumann_entropy(&ch.apply(&psi)?);
        let env = von_neumann_entropy(&comp.apply(&psi)?);
        println!(
            "{name:<17} dout={} denv={}  S(out)={out:.6}  S(env)={env:.6}",
            v.dout(),
            v.denv()
        );
    }
    Ok(())
}
