//! Largest F an eavesdropper-held witness allows when I(S:W) is pinned and
//! the witness marginal is fixed.

use chancap::capacity::{eve_bound, Clause, ConstraintSpec, EncodingEnsemble, StateFamily};
use chancap::channels::KrausChannel;
use chancap::states::DensityMatrix;

fn main() -> chancap::Result<()> {
    let ch = KrausChannel::depolarizing(2, 0.3)?;
    let enc = EncodingEnsemble::weyl(2);
    let rho_w = DensityMatrix::maximally_mixed(2);
    for y in [0.0, 0.5, 1.0, 1.5] {
        let cons = ConstraintSpec::none()
            .with_clause(Clause::equal(y))
            .with_fixed_marginal(rho_w.clone());
        let r = eve_bound(&ch, &enc, StateFamily::BellDiagonal, &cons, 1000, 5)?;
        println!("y={y:.1}  F={:.4}  params={:.3?}", r.value, r.argmax_params);
    }
    Ok(())
}
