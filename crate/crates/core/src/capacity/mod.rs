//! Capacity functionals, closed forms, and the constrained optimizer.

mod closed_forms;
mod eve;
mod functionals;
mod optimize;
mod scan;

pub use closed_forms::{depolarizing_closed_forms, qec_closed_forms, DepolarizingClosedForms, QecClosedForms};
pub use eve::eve_bound;
pub use functionals::{
    chi_covariant_inner, entropy_gain, extended_entropy_gain, f_functional, holevo,
    qec_chi_integrand, EncodingEnsemble,
};
pub use optimize::{
    optimize_constrained, CapacityResult, Clause, Comparator, ConstraintSpec, Functional,
    StateFamily, DEFAULT_TOLERANCE, MARGINAL_TOL, PENALTY, REFINE_ITERATIONS,
};
pub use scan::{bin_maxima, mc_scan, BinMax, ScanRecord};
