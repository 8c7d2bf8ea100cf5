//! Bound on an eavesdropper's information gain with a fixed witness
//! marginal.

use crate::capacity::functionals::{f_functional, EncodingEnsemble};
use crate::capacity::optimize::{
    optimize_constrained, CapacityResult, Comparator, ConstraintSpec, StateFamily,
};
use crate::channels::KrausChannel;
use crate::error::{Error, Result};

/// Maximum of F over ρ_SW in `family` with the equality clauses of `cons`
/// met within their bands and ρ_W matching the fixed marginal within 1e-3.
pub fn eve_bound(
    ch: &KrausChannel,
    enc: &EncodingEnsemble,
    family: StateFamily,
    cons: &ConstraintSpec,
    budget: usize,
    seed: u64,
) -> Result<CapacityResult> {
    if !cons.clauses.iter().any(|c| c.comparator == Comparator::Equal) {
        return Err(Error::Validation(
            "eavesdropper bound needs at least one equality clause".into(),
        ));
    }
    if cons.fixed_marginal_w.is_none() {
        return Err(Error::Validation(
            "eavesdropper bound needs a fixed witness marginal".into(),
        ));
    }
    optimize_constrained(|s| f_functional(ch, s, enc), family, cons, budget, seed)
}
