//! Constrained Monte Carlo search over two-qubit state families, followed by
//! a bounded Nelder–Mead refinement.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::densemath::{self, embed_operator, ComplexMatrix};
use crate::error::{Error, Result};
use crate::random::{rng_for_index, SampleRng};
use crate::states::{
    bell_diagonal, mutual_information, ten_param_state, BipartiteState, DensityMatrix,
    TenParamSpec,
};

/// Default half-width of an equality band, in bits.
pub const DEFAULT_TOLERANCE: f64 = 0.02;
/// Max-entry distance allowed between ρ_W and a fixed target.
pub const MARGINAL_TOL: f64 = 1e-3;
/// Nelder–Mead iterations after sampling.
pub const REFINE_ITERATIONS: usize = 200;
/// Weight of constraint violation in the refinement objective.
pub const PENALTY: f64 = 1e3;
/// Score assigned to parameter points that do not yield a state.
const INVALID_SCORE: f64 = -1e9;
/// Draws per sample index before giving up on finding a valid state.
const MAX_DRAWS: usize = 1_000_000;
const SIMPLEX_STEP: f64 = 0.05;

/// Parametrized two-qubit state families; parameters live in [0, 1]^k.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateFamily {
    /// Bell-diagonal states with weights x_k / Σx.
    BellDiagonal,
    /// The ten-parameter family of [`TenParamSpec`].
    TenParam,
}

impl StateFamily {
    pub fn num_params(self) -> usize {
        match self {
            Self::BellDiagonal => 4,
            Self::TenParam => 10,
        }
    }

    /// (dim S, dim W)
    pub fn dims(self) -> (usize, usize) {
        (2, 2)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::BellDiagonal => "bell-diagonal",
            Self::TenParam => "ten-param",
        }
    }

    pub fn build(self, params: &[f64]) -> Result<BipartiteState> {
        if params.len() != self.num_params() {
            return Err(Error::Dimension(format!(
                "{} takes {} parameters, got {}",
                self.name(),
                self.num_params(),
                params.len()
            )));
        }
        match self {
            Self::BellDiagonal => {
                let total: f64 = params.iter().sum();
                if !(total > 0.0) {
                    return Err(Error::Validation("all Bell weights are zero".into()));
                }
                bell_diagonal([0, 1, 2, 3].map(|k| params[k] / total))
            }
            Self::TenParam => ten_param_state(&TenParamSpec::from_unit_cube(params)),
        }
    }
}

impl fmt::Display for StateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StateFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bell-diagonal" | "bell" => Ok(Self::BellDiagonal),
            "ten-param" | "ten" => Ok(Self::TenParam),
            other => Err(Error::Parse(format!(
                "unknown state family '{other}' (expected bell-diagonal or ten-param)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    MutualInformation,
}

impl Functional {
    pub fn evaluate(self, rho: &BipartiteState) -> f64 {
        match self {
            Self::MutualInformation => mutual_information(rho),
        }
    }

    /// Largest attainable value for the given dimensions.
    pub fn upper_limit(self, dims: (usize, usize)) -> f64 {
        match self {
            Self::MutualInformation => 2.0 * (dims.0.min(dims.1) as f64).log2(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "=")]
    Equal,
}

/// Q(ρ_SW) ≥ y or Q(ρ_SW) = y, the latter as the band |Q − y| ≤ tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub functional: Functional,
    pub comparator: Comparator,
    pub threshold: f64,
    pub tolerance: f64,
}

impl Clause {
    pub fn at_least(threshold: f64) -> Self {
        Self {
            functional: Functional::MutualInformation,
            comparator: Comparator::AtLeast,
            threshold,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn equal(threshold: f64) -> Self {
        Self {
            functional: Functional::MutualInformation,
            comparator: Comparator::Equal,
            threshold,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// Non-negative when satisfied exactly; feasible while ≥ −tolerance.
    pub fn slack(&self, rho: &BipartiteState) -> f64 {
        let q = self.functional.evaluate(rho);
        match self.comparator {
            Comparator::AtLeast => q - self.threshold,
            Comparator::Equal => -(q - self.threshold).abs(),
        }
    }
}

/// Constraints on ρ_SW: functional clauses plus an optional fixed ρ_W.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConstraintSpec {
    pub clauses: Vec<Clause>,
    pub fixed_marginal_w: Option<DensityMatrix>,
}

impl ConstraintSpec {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn with_clause(mut self, clause: Clause) -> Self {
        self.clauses.push(clause);
        self
    }

    pub fn with_fixed_marginal(mut self, rho_w: DensityMatrix) -> Self {
        self.fixed_marginal_w = Some(rho_w);
        self
    }

    pub fn validate(&self, dims: (usize, usize)) -> Result<()> {
        for c in &self.clauses {
            let hi = c.functional.upper_limit(dims);
            if !(c.threshold >= 0.0 && c.threshold <= hi) {
                return Err(Error::Range {
                    name: "threshold",
                    value: c.threshold,
                    lo: 0.0,
                    hi,
                });
            }
            if !(c.tolerance >= 0.0 && c.tolerance.is_finite()) {
                return Err(Error::Validation(format!("invalid tolerance {}", c.tolerance)));
            }
        }
        if let Some(w) = &self.fixed_marginal_w {
            if w.dim() != dims.1 {
                return Err(Error::Dimension(format!(
                    "fixed marginal has dimension {}, witness has {}",
                    w.dim(),
                    dims.1
                )));
            }
        }
        Ok(())
    }

    /// Slacks of every clause, then of the marginal match if present.
    pub fn slacks(&self, rho: &BipartiteState) -> Vec<f64> {
        let mut out: Vec<f64> = self.clauses.iter().map(|c| c.slack(rho)).collect();
        if let Some(w) = &self.fixed_marginal_w {
            out.push(-rho.reduced_b().matrix().max_abs_diff(w.matrix()));
        }
        out
    }

    fn tolerances(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.clauses.iter().map(|c| c.tolerance).collect();
        if self.fixed_marginal_w.is_some() {
            out.push(MARGINAL_TOL);
        }
        out
    }
}

/// Best value found by [`optimize_constrained`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    pub value: f64,
    pub argmax_params: Vec<f64>,
    /// Valid states drawn during the sampling phase.
    pub samples_evaluated: usize,
    pub constraint_slacks: Vec<f64>,
    pub seed: u64,
}

/// Local filter (I ⊗ M) that maps a state onto one with the target
/// witness marginal: M = ρ_W^{1/2} ρ'_W^{-1/2}.
#[derive(Clone, Debug)]
pub(crate) struct MarginalFilter {
    sqrt_target: ComplexMatrix,
}

impl MarginalFilter {
    pub(crate) fn new(target: &DensityMatrix) -> Result<Self> {
        Ok(Self {
            sqrt_target: densemath::psd_power(target.matrix(), 0.5, 0.0)?,
        })
    }

    pub(crate) fn project(&self, rho: &BipartiteState) -> Result<BipartiteState> {
        let (da, db) = rho.dims();
        let current = rho.reduced_b();
        let min = current.eigenvalues()[0];
        if min < 1e-12 {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        let inv_sqrt = densemath::psd_power(current.matrix(), -0.5, 0.0)?;
        let m = self.sqrt_target.matmul(&inv_sqrt);
        let big = embed_operator(&m, &[da, db], 1)?;
        let out = big.conjugate(rho.matrix()).hermitize();
        let tr = out.trace().re;
        BipartiteState::new(DensityMatrix::from_trusted(out.scale_real(1.0 / tr)), da, db)
    }
}

/// State for a parameter point, projected onto the fixed marginal if any.
pub(crate) fn realize(
    family: StateFamily,
    params: &[f64],
    filter: Option<&MarginalFilter>,
) -> Result<BipartiteState> {
    let state = family.build(params)?;
    match filter {
        Some(f) => f.project(&state),
        None => Ok(state),
    }
}

/// Draws uniform parameter points until one yields a valid state.
pub(crate) fn draw_valid(
    rng: &mut SampleRng,
    family: StateFamily,
    filter: Option<&MarginalFilter>,
) -> Option<(Vec<f64>, BipartiteState)> {
    let k = family.num_params();
    for _ in 0..MAX_DRAWS {
        let params: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
        if let Ok(state) = realize(family, &params, filter) {
            return Some((params, state));
        }
    }
    None
}

struct Sample {
    params: Vec<f64>,
    value: f64,
    slacks: Vec<f64>,
}

fn violation(slacks: &[f64], tolerances: &[f64]) -> f64 {
    slacks
        .iter()
        .zip(tolerances)
        .map(|(s, t)| (-(s + t)).max(0.0))
        .sum()
}

fn worst(slacks: &[f64]) -> f64 {
    slacks.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Maximizes `objective` over `family` subject to `cons`.
///
/// `budget` uniform samples are drawn (sample `i` uses its own seeded
/// stream), the best feasible one is kept, and a Nelder–Mead pass on the
/// parameter box refines it with a penalized objective. When no sample is
/// feasible the refinement starts from the sample with the smallest
/// violation; if it still ends infeasible the call fails with
/// [`Error::Infeasible`].
pub fn optimize_constrained<F>(
    objective: F,
    family: StateFamily,
    cons: &ConstraintSpec,
    budget: usize,
    seed: u64,
) -> Result<CapacityResult>
where
    F: Fn(&BipartiteState) -> Result<f64> + Sync,
{
    cons.validate(family.dims())?;
    let filter = cons
        .fixed_marginal_w
        .as_ref()
        .map(MarginalFilter::new)
        .transpose()?;
    let tolerances = cons.tolerances();

    let drawn: Vec<Result<Option<Sample>>> = (0..budget as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for_index(seed, i);
            match draw_valid(&mut rng, family, filter.as_ref()) {
                None => Ok(None),
                Some((params, state)) => Ok(Some(Sample {
                    value: objective(&state)?,
                    slacks: cons.slacks(&state),
                    params,
                })),
            }
        })
        .collect();
    let mut samples = Vec::with_capacity(drawn.len());
    for s in drawn {
        if let Some(s) = s? {
            samples.push(s);
        }
    }

    let feasible = |s: &Sample| violation(&s.slacks, &tolerances) == 0.0;
    let mut best: Option<&Sample> = None;
    for s in samples.iter().filter(|s| feasible(s)) {
        if best.is_none_or(|b| s.value > b.value) {
            best = Some(s);
        }
    }
    let start = match best {
        Some(b) => Some(b),
        None => {
            let mut miss: Option<&Sample> = None;
            for s in &samples {
                let v = violation(&s.slacks, &tolerances);
                if miss.is_none_or(|m| v < violation(&m.slacks, &tolerances)) {
                    miss = Some(s);
                }
            }
            miss
        }
    };
    let Some(start) = start else {
        return Err(Error::Infeasible {
            samples: 0,
            nearest_miss: f64::NEG_INFINITY,
        });
    };

    let evaluate = |p: &[f64]| -> Option<Sample> {
        let state = realize(family, p, filter.as_ref()).ok()?;
        let value = objective(&state).ok()?;
        Some(Sample {
            params: p.to_vec(),
            value,
            slacks: cons.slacks(&state),
        })
    };
    let score = |p: &[f64]| match evaluate(p) {
        Some(s) if s.value.is_finite() => s.value - PENALTY * violation(&s.slacks, &tolerances),
        _ => INVALID_SCORE,
    };
    let refined = nelder_mead_max(&score, &start.params, REFINE_ITERATIONS);
    let refined = evaluate(&refined).filter(|s| feasible(s));

    let chosen = match (best, refined) {
        (Some(b), Some(r)) if r.value > b.value => r,
        (Some(b), _) => Sample {
            params: b.params.clone(),
            value: b.value,
            slacks: b.slacks.clone(),
        },
        (None, Some(r)) => r,
        (None, None) => {
            let nearest_miss = samples
                .iter()
                .map(|s| worst(&s.slacks))
                .fold(f64::NEG_INFINITY, f64::max);
            return Err(Error::Infeasible {
                samples: samples.len(),
                nearest_miss,
            });
        }
    };
    Ok(CapacityResult {
        value: chosen.value,
        argmax_params: chosen.params,
        samples_evaluated: samples.len(),
        constraint_slacks: chosen.slacks,
        seed,
    })
}

fn clamp_unit(x: &mut [f64]) {
    for v in x.iter_mut() {
        *v = v.clamp(0.0, 1.0);
    }
}

/// Nelder–Mead maximization on [0, 1]^n with reflection 1, expansion 2,
/// contraction 0.5 and shrink 0.5; trial points are clamped to the box.
fn nelder_mead_max(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], iterations: usize) -> Vec<f64> {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] = if x[i] + SIMPLEX_STEP <= 1.0 {
            x[i] + SIMPLEX_STEP
        } else {
            x[i] - SIMPLEX_STEP
        };
        let fx = f(&x);
        simplex.push((x, fx));
    }
    let point = |c: &[f64], toward: &[f64], coef: f64| -> Vec<f64> {
        let mut x: Vec<f64> = c.iter().zip(toward).map(|(ci, ti)| ci + coef * (ti - ci)).collect();
        clamp_unit(&mut x);
        x
    };
    for _ in 0..iterations {
        // Best first; the sort is stable so ties keep their order.
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let (worst_x, worst_f) = simplex[n].clone();
        let reflected = point(&centroid, &worst_x, -1.0);
        let fr = f(&reflected);
        if fr > simplex[0].1 {
            let expanded = point(&centroid, &worst_x, -2.0);
            let fe = f(&expanded);
            simplex[n] = if fe > fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr > simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let (contracted, fc) = if fr > worst_f {
                let x = point(&centroid, &reflected, 0.5);
                let fx = f(&x);
                (x, fx)
            } else {
                let x = point(&centroid, &worst_x, 0.5);
                let fx = f(&x);
                (x, fx)
            };
            if fc > fr.max(worst_f) {
                simplex[n] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x = point(&best, &entry.0, 0.5);
                    let fx = f(&x);
                    *entry = (x, fx);
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    simplex.swap_remove(0).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::functionals::qec_chi_integrand;
    use crate::channels::KrausChannel;

    #[test]
    fn families_build() {
        let s = StateFamily::BellDiagonal.build(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((mutual_information(&s) - 2.0).abs() < 1e-10);
        assert!(StateFamily::BellDiagonal.build(&[0.0; 4]).is_err());
        assert!(StateFamily::BellDiagonal.build(&[0.5; 3]).is_err());
        assert_eq!("ten-param".parse::<StateFamily>().unwrap(), StateFamily::TenParam);
        assert!("ghz".parse::<StateFamily>().is_err());
        let mut rng = crate::random::rng_from_seed(1);
        let (p, s) = draw_valid(&mut rng, StateFamily::TenParam, None).unwrap();
        assert_eq!(p.len(), 10);
        assert_eq!(s.dims(), (2, 2));
    }

    #[test]
    fn nelder_mead_finds_interior_maximum() {
        let f = |x: &[f64]| -((x[0] - 0.3).powi(2) + (x[1] - 0.7).powi(2));
        let x = nelder_mead_max(&f, &[0.9, 0.1], 200);
        assert!((x[0] - 0.3).abs() < 1e-6 && (x[1] - 0.7).abs() < 1e-6);
        // Maximum on the boundary is reached through clamping.
        let g = |x: &[f64]| x[0] + x[1];
        let x = nelder_mead_max(&g, &[0.5, 0.5], 200);
        assert!(x[0] > 1.0 - 1e-9 && x[1] > 1.0 - 1e-9);
    }

    #[test]
    fn unconstrained_mutual_information_maximum() {
        let r = optimize_constrained(
            |s| Ok(mutual_information(s)),
            StateFamily::BellDiagonal,
            &ConstraintSpec::none(),
            500,
            3,
        )
        .unwrap();
        assert!((r.value - 2.0).abs() < 1e-6, "{r:?}");
        assert!(r.constraint_slacks.is_empty());
    }

    #[test]
    fn qec_band_optimum() {
        let id = KrausChannel::identity(2);
        let cons = ConstraintSpec::none().with_clause(Clause::equal(1.0));
        let r = optimize_constrained(
            |s| qec_chi_integrand(0.25, 2, &id, s),
            StateFamily::BellDiagonal,
            &cons,
            2000,
            7,
        )
        .unwrap();
        assert!((r.value - 0.75).abs() < 0.02, "{r:?}");
        assert!(r.constraint_slacks[0] >= -DEFAULT_TOLERANCE);
    }

    #[test]
    fn reproducible_and_thread_independent() {
        let cons = ConstraintSpec::none().with_clause(Clause::at_least(0.5));
        let run = || {
            optimize_constrained(
                |s| Ok(-mutual_information(s)),
                StateFamily::TenParam,
                &cons,
                60,
                11,
            )
            .unwrap()
        };
        let a = run();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(run);
        assert_eq!(a, b);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn infeasible_and_empty() {
        let r = optimize_constrained(
            |s| Ok(mutual_information(s)),
            StateFamily::BellDiagonal,
            &ConstraintSpec::none(),
            0,
            1,
        );
        assert!(matches!(r, Err(Error::Infeasible { samples: 0, .. })));

        // A pure witness marginal forces product states, so I = 2 is out
        // of reach.
        let cons = ConstraintSpec::none()
            .with_clause(Clause::equal(2.0).with_tolerance(0.01))
            .with_fixed_marginal(DensityMatrix::basis(2, 0));
        let r = optimize_constrained(
            |s| Ok(mutual_information(s)),
            StateFamily::TenParam,
            &cons,
            20,
            1,
        );
        match r {
            Err(Error::Infeasible { samples, nearest_miss }) => {
                assert!(samples > 0);
                assert!(nearest_miss < -0.01);
            }
            other => panic!("{other:?}"),
        }

        let bad = ConstraintSpec::none().with_clause(Clause::at_least(3.0));
        assert!(matches!(
            optimize_constrained(|_| Ok(0.0), StateFamily::BellDiagonal, &bad, 10, 1),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn marginal_filter_hits_target() {
        let target = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let filter = MarginalFilter::new(&target).unwrap();
        let mut rng = crate::random::rng_from_seed(5);
        for _ in 0..20 {
            let (_, s) = draw_valid(&mut rng, StateFamily::TenParam, Some(&filter)).unwrap();
            assert!(s.reduced_b().matrix().max_abs_diff(target.matrix()) < 1e-10);
            assert!(s.state().eigenvalues()[0] > -1e-10);
        }
        let pure = MarginalFilter::new(&DensityMatrix::basis(2, 1)).unwrap();
        let (_, s) = draw_valid(&mut rng, StateFamily::BellDiagonal, Some(&pure)).unwrap();
        assert!(mutual_information(&s).abs() < 1e-9);
    }
}
