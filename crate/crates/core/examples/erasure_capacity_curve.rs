//! Unitary-encoding capacity of a qubit erasure channel as the entanglement
//! shared with the witness shrinks, next to the closed-form line.

use chancap::capacity::{
    optimize_constrained, qec_chi_integrand, qec_closed_forms, Clause, ConstraintSpec, StateFamily,
};
use chancap::channels::KrausChannel;

fn main() -> chancap::Result<()> {
    let eps = 0.25;
    let encode = KrausChannel::identity(2);
    println!("{:>5} {:>10} {:>10} {:>8}", "y", "closed", "optimized", "C_E");
    for k in 0..=4 {
        let y = 0.5 * k as f64;
        let closed = qec_closed_forms(eps, 2, y)?;
        let cons = ConstraintSpec::none().with_clause(Clause::at_least(y));
        let best = optimize_constrained(
            |rho| qec_chi_integrand(eps, 2, &encode, rho),
            StateFamily::BellDiagonal,
            &cons,
            2000,
            k,
        )?;
        println!("{y:>5.2} {:>10.4} {:>10.4} {:>8.4}", closed.chi_l_i, best.value, closed.c_e);
    }
    Ok(())
}
