//! Entropy inequalities checked on seeded random instances.
//!
//! Each check draws instance `i` from its own stream (see
//! [`crate::random::derive_seed`]), computes a slack that is non-negative
//! when the inequality holds, and reports the minimum together with the
//! number of slacks below −[`PROPERTY_TOL`].

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::{entropy_gain, extended_entropy_gain};
use crate::channels::{check_generalized_covariance, CovariantGroup, KrausChannel};
use crate::error::{Error, Result};
use crate::random::{rng_for_index, SampleRng};
use crate::states::{
    conditional_mutual_information, mutual_information, random_state_with, von_neumann_entropy,
    BipartiteState, DensityMatrix, Side,
};

pub const PROPERTY_TOL: f64 = 1e-9;
/// Environment dimension of the random channels.
const CHANNEL_ENV: usize = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub name: String,
    pub instances: usize,
    pub min_slack: f64,
    pub failures: usize,
    pub seed: u64,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn run(name: &str, n: usize, seed: u64, slack: impl Fn(&mut SampleRng) -> f64 + Sync) -> PropertyReport {
    let slacks: Vec<f64> = (0..n as u64)
        .into_par_iter()
        .map(|i| slack(&mut rng_for_index(seed, i)))
        .collect();
    PropertyReport {
        name: name.to_string(),
        instances: n,
        min_slack: slacks.iter().copied().fold(f64::INFINITY, f64::min),
        failures: slacks.iter().filter(|&&s| !(s >= -PROPERTY_TOL)).count(),
        seed,
    }
}

/// Random state of full or reduced rank.
fn random_mixed(rng: &mut SampleRng, dim: usize) -> DensityMatrix {
    let env = rng.random_range(1..=dim);
    random_state_with(rng, dim, env)
}

fn random_channel(rng: &mut SampleRng, dim: usize) -> KrausChannel {
    KrausChannel::random(rng, dim, dim, CHANNEL_ENV)
}

const CONSISTENT: &str = "instance dimensions are consistent";

/// min of I(A:B) − I(A':B') and I(A:B|C) − I(A':B'|C) after local channels
/// on A and B of a tripartite state with factor dimensions `dims`.
pub fn dpi_slack(
    rho: &DensityMatrix,
    dims: (usize, usize, usize),
    phi_a: &KrausChannel,
    phi_b: &KrausChannel,
) -> Result<f64> {
    let d = [dims.0, dims.1, dims.2];
    let after_a = phi_a.apply_on_subsystem(rho.matrix(), &d, 0)?;
    let d_mid = [phi_a.dout(), dims.1, dims.2];
    let after = phi_b.apply_on_subsystem(&after_a, &d_mid, 1)?;
    let d_out = [phi_a.dout(), phi_b.dout(), dims.2];
    let out = DensityMatrix::new(after.hermitize())?;

    let ab = BipartiteState::new(rho.reduce(&d, &[0, 1])?, d[0], d[1])?;
    let ab_out = BipartiteState::new(out.reduce(&d_out, &[0, 1])?, d_out[0], d_out[1])?;
    let unconditional = mutual_information(&ab) - mutual_information(&ab_out);
    let conditional = conditional_mutual_information(rho, dims)?
        - conditional_mutual_information(&out, (d_out[0], d_out[1], d_out[2]))?;
    Ok(unconditional.min(conditional))
}

/// Data processing for mutual information and conditional mutual
/// information on three-qubit states with random local channels on A, B.
pub fn check_dpi(n: usize, seed: u64) -> PropertyReport {
    run("dpi", n, seed, |rng| {
        let rho = random_mixed(rng, 8);
        let phi_a = random_channel(rng, 2);
        let phi_b = random_channel(rng, 2);
        dpi_slack(&rho, (2, 2, 2), &phi_a, &phi_b).expect(CONSISTENT)
    })
}

/// E_{φ₁⊗φ₂}[ρ₁₂] − E_{φ₁}[ρ₁] − E_{φ₂}[ρ₂] for blocks of dimensions
/// (φ₁.din, φ₂.din).
pub fn superadditivity_i_slack(rho: &DensityMatrix, phi1: &KrausChannel, phi2: &KrausChannel) -> Result<f64> {
    let d = [phi1.din(), phi2.din()];
    let joint = KrausChannel::tensor(phi1, phi2);
    let whole = entropy_gain(&joint, rho)?;
    let first = entropy_gain(phi1, &rho.reduce(&d, &[0])?)?;
    let second = entropy_gain(phi2, &rho.reduce(&d, &[1])?)?;
    Ok(whole - first - second)
}

/// Superadditivity of the entropy gain over two blocks of two qubits each.
/// Every instance also checks the product of its marginals, where equality
/// must hold; an instance's slack is the smaller of the correlated slack
/// and −|product slack|.
pub fn check_superadditivity_i(n: usize, seed: u64) -> PropertyReport {
    run("superadditivity_i", n, seed, |rng| {
        let rho = random_mixed(rng, 16);
        let phi1 = random_channel(rng, 4);
        let phi2 = random_channel(rng, 4);
        let correlated = superadditivity_i_slack(&rho, &phi1, &phi2).expect(CONSISTENT);
        let product = rho
            .reduce(&[4, 4], &[0])
            .and_then(|a| Ok(a.tensor(&rho.reduce(&[4, 4], &[1])?)))
            .and_then(|p| superadditivity_i_slack(&p, &phi1, &phi2))
            .expect(CONSISTENT);
        correlated.min(-product.abs())
    })
}

/// E_{(φ₁⊗φ₂)⊗I}[ρ_{A₁A₂R}] − E_{φ₁⊗I}[ρ_{A₁R}] − E_{φ₂⊗I}[ρ_{A₂R}] with
/// factor dimensions (φ₁.din, φ₂.din, dim_r).
pub fn superadditivity_ii_slack(
    rho: &DensityMatrix,
    dim_r: usize,
    phi1: &KrausChannel,
    phi2: &KrausChannel,
) -> Result<f64> {
    let d = [phi1.din(), phi2.din(), dim_r];
    let step = phi1.apply_on_subsystem(rho.matrix(), &d, 0)?;
    let out = phi2.apply_on_subsystem(&step, &[phi1.dout(), d[1], d[2]], 1)?;
    let whole = von_neumann_entropy(&DensityMatrix::new(out.hermitize())?) - von_neumann_entropy(rho);
    let a1r = BipartiteState::new(rho.reduce(&d, &[0, 2])?, d[0], dim_r)?;
    let a2r = BipartiteState::new(rho.reduce(&d, &[1, 2])?, d[1], dim_r)?;
    Ok(whole
        - extended_entropy_gain(phi1, &a1r, Side::A)?
        - extended_entropy_gain(phi2, &a2r, Side::A)?)
}

/// Superadditivity of the extended entropy gain on qubits A₁A₂ with a
/// qubit reference R.
pub fn check_superadditivity_ii(n: usize, seed: u64) -> PropertyReport {
    run("superadditivity_ii", n, seed, |rng| {
        let rho = random_mixed(rng, 8);
        let phi1 = random_channel(rng, 2);
        let phi2 = random_channel(rng, 2);
        superadditivity_ii_slack(&rho, 2, &phi1, &phi2).expect(CONSISTENT)
    })
}

/// S(Ψ(I/d)) − S(Ψ(ρ)) on random ρ. Refuses channels that fail the
/// covariance check against `group`.
pub fn check_lemma1(ch: &KrausChannel, group: &CovariantGroup, n: usize, seed: u64) -> Result<PropertyReport> {
    let report = check_generalized_covariance(ch, group);
    if !report.covariant {
        return Err(Error::NotCovariant {
            residual: report.worst_residual,
        });
    }
    let top = von_neumann_entropy(&ch.apply(&DensityMatrix::maximally_mixed(ch.din()))?);
    Ok(run("lemma1", n, seed, |rng| {
        let rho = random_mixed(rng, ch.din());
        top - von_neumann_entropy(&ch.apply(&rho).expect(CONSISTENT))
    }))
}

/// S(ρ_A) + S(ρ_B) − S(ρ_AB) on random qubit-qubit and qubit-qutrit states.
pub fn check_subadditivity(n: usize, seed: u64) -> PropertyReport {
    run("subadditivity", n, seed, |rng| {
        let db = rng.random_range(2..=3);
        let rho = BipartiteState::new(random_mixed(rng, 2 * db), 2, db).expect(CONSISTENT);
        mutual_information(&rho)
    })
}
