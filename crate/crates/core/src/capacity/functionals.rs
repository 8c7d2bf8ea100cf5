//! Entropy gains, the Holevo quantity and the F functional.

use crate::channels::{weyl_group, KrausChannel};
use crate::error::{check_range, Error, Result};
use crate::states::{von_neumann_entropy, BipartiteState, DensityMatrix, Side};

/// Sender's operations ε_x applied with probabilities p_x.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodingEnsemble {
    entries: Vec<(f64, KrausChannel)>,
}

impl EncodingEnsemble {
    pub fn new(entries: Vec<(f64, KrausChannel)>) -> Result<Self> {
        let (_, first) = entries
            .first()
            .ok_or_else(|| Error::Validation("empty encoding ensemble".into()))?;
        let (din, dout) = (first.din(), first.dout());
        if entries.iter().any(|(p, _)| !(*p >= 0.0)) {
            return Err(Error::Validation("negative encoding probability".into()));
        }
        let total: f64 = entries.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Validation(format!(
                "encoding probabilities sum to {total}, not 1"
            )));
        }
        if entries.iter().any(|(_, op)| op.din() != din || op.dout() != dout) {
            return Err(Error::Dimension(
                "encoding operations have differing dimensions".into(),
            ));
        }
        Ok(Self { entries })
    }

    pub fn single(op: KrausChannel) -> Self {
        Self {
            entries: vec![(1.0, op)],
        }
    }

    pub fn identity(d: usize) -> Self {
        Self::single(KrausChannel::identity(d))
    }

    pub fn reset(d: usize) -> Self {
        Self::single(KrausChannel::reset(d))
    }

    /// Uniform mixture of the d² Weyl unitaries.
    pub fn weyl(d: usize) -> Self {
        let group = weyl_group(d);
        let p = 1.0 / group.len() as f64;
        Self {
            entries: group
                .unitaries()
                .iter()
                .map(|u| (p, KrausChannel::unitary(u.clone()).expect("Weyl operators are unitary")))
                .collect(),
        }
    }

    pub fn entries(&self) -> &[(f64, KrausChannel)] {
        &self.entries
    }

    pub fn din(&self) -> usize {
        self.entries[0].1.din()
    }

    pub fn dout(&self) -> usize {
        self.entries[0].1.dout()
    }
}

/// E_φ[ρ] = S(φ[ρ]) − S(ρ).
pub fn entropy_gain(ch: &KrausChannel, rho: &DensityMatrix) -> Result<f64> {
    let out = ch.apply(rho)?;
    Ok(von_neumann_entropy(&out) - von_neumann_entropy(rho))
}

/// S((φ⊗I)[ρ]) − S(ρ), with φ on the given side.
pub fn extended_entropy_gain(ch: &KrausChannel, rho: &BipartiteState, side: Side) -> Result<f64> {
    let out = ch.apply_extended(rho, side)?;
    Ok(von_neumann_entropy(out.state()) - von_neumann_entropy(rho.state()))
}

/// χ = S(Σ p_x ρ_x) − Σ p_x S(ρ_x).
pub fn holevo(states: &[(f64, DensityMatrix)]) -> Result<f64> {
    let parts: Vec<(f64, &DensityMatrix)> = states.iter().map(|(p, r)| (*p, r)).collect();
    let avg = DensityMatrix::mixture(&parts)?;
    let mean: f64 = states.iter().map(|(p, r)| p * von_neumann_entropy(r)).sum();
    Ok(von_neumann_entropy(&avg) - mean)
}

fn check_encoding(ch: &KrausChannel, rho_sw: &BipartiteState, enc: &EncodingEnsemble) -> Result<()> {
    if enc.dout() != ch.din() {
        return Err(Error::Dimension(format!(
            "encoding outputs dimension {}, channel takes {}",
            enc.dout(),
            ch.din()
        )));
    }
    if enc.din() != rho_sw.dim_a() {
        return Err(Error::Dimension(format!(
            "encoding takes dimension {}, signal system has {}",
            enc.din(),
            rho_sw.dim_a()
        )));
    }
    Ok(())
}

/// F = S(ρ_B) − Σ_x p_x E_{Φ_x⊗I}[ρ_SW] with ρ_B = Σ_x p_x (Ψ∘ε_x)[ρ_S] and
/// Φ_x the complement of Ψ∘ε_x. The signal S is side A of `rho_sw`.
pub fn f_functional(ch: &KrausChannel, rho_sw: &BipartiteState, enc: &EncodingEnsemble) -> Result<f64> {
    check_encoding(ch, rho_sw, enc)?;
    let rho_s = rho_sw.reduced_a();
    let mut outputs = Vec::with_capacity(enc.entries().len());
    let mut gain = 0.0;
    for (p, op) in enc.entries() {
        let composed = KrausChannel::compose(ch, op)?;
        outputs.push((*p, composed.apply(&rho_s)?));
        if *p > 0.0 {
            gain += p * extended_entropy_gain(&composed.complementary(), rho_sw, Side::A)?;
        }
    }
    let parts: Vec<(f64, &DensityMatrix)> = outputs.iter().map(|(p, r)| (*p, r)).collect();
    let rho_b = DensityMatrix::mixture(&parts)?;
    Ok(von_neumann_entropy(&rho_b) - gain)
}

/// S(Ψ(I/d)) − E_{Φ⊗I}[ρ_SW] with Φ the complement of Ψ∘ε; the inner
/// objective for generalized covariant channels.
pub fn chi_covariant_inner(
    ch: &KrausChannel,
    eps_op: &KrausChannel,
    rho_sw: &BipartiteState,
) -> Result<f64> {
    check_encoding(ch, rho_sw, &EncodingEnsemble::single(eps_op.clone()))?;
    let mixed = DensityMatrix::maximally_mixed(ch.din());
    let first = von_neumann_entropy(&ch.apply(&mixed)?);
    let composed = KrausChannel::compose(ch, eps_op)?;
    Ok(first - extended_entropy_gain(&composed.complementary(), rho_sw, Side::A)?)
}

/// (1−ε)(log₂d − E_{ε^c⊗I}[ρ_SW]) for the erasure channel with erasure
/// probability `eps`.
pub fn qec_chi_integrand(
    eps: f64,
    d: usize,
    eps_op: &KrausChannel,
    rho_sw: &BipartiteState,
) -> Result<f64> {
    check_range("eps", eps, 0.0, 1.0)?;
    if eps_op.din() != d || eps_op.dout() != d || rho_sw.dim_a() != d {
        return Err(Error::Dimension(format!(
            "encoding {}->{} and signal dimension {} must all equal d = {d}",
            eps_op.din(),
            eps_op.dout(),
            rho_sw.dim_a()
        )));
    }
    let gain = extended_entropy_gain(&eps_op.complementary(), rho_sw, Side::A)?;
    Ok((1.0 - eps) * ((d as f64).log2() - gain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_unitary, rng_from_seed};
    use crate::states::{
        binary_entropy, bell_diagonal, mutual_information, random_pure_with, random_state_with,
    };

    fn bell() -> BipartiteState {
        bell_diagonal([1.0, 0.0, 0.0, 0.0]).unwrap()
    }

    fn random_bipartite(seed: u64, da: usize, db: usize) -> BipartiteState {
        let mut rng = rng_from_seed(seed);
        BipartiteState::new(random_state_with(&mut rng, da * db, 3), da, db).unwrap()
    }

    #[test]
    fn ensemble_validation() {
        assert!(EncodingEnsemble::new(vec![]).is_err());
        let id = KrausChannel::identity(2);
        assert!(EncodingEnsemble::new(vec![(0.5, id.clone()), (0.4, id.clone())]).is_err());
        assert!(EncodingEnsemble::new(vec![(1.5, id.clone()), (-0.5, id.clone())]).is_err());
        assert!(EncodingEnsemble::new(vec![(0.5, id.clone()), (0.5, KrausChannel::identity(3))]).is_err());
        assert!(EncodingEnsemble::new(vec![(0.5, id.clone()), (0.5, id)]).is_ok());
        assert_eq!(EncodingEnsemble::weyl(3).entries().len(), 9);
    }

    #[test]
    fn entropy_gain_examples() {
        let mut rng = rng_from_seed(1);
        let rho = random_state_with(&mut rng, 2, 2);
        assert!(entropy_gain(&KrausChannel::identity(2), &rho).unwrap().abs() < 1e-12);

        let mixed = DensityMatrix::maximally_mixed(2);
        let g = entropy_gain(&KrausChannel::erasure(2, 0.5).unwrap(), &mixed).unwrap();
        assert!((g - (binary_entropy(0.5).unwrap() + 0.5 - 1.0)).abs() < 1e-12);

        let dep = KrausChannel::depolarizing(2, 0.4).unwrap();
        assert!(entropy_gain(&dep, &mixed).unwrap().abs() < 1e-12);

        // Non-unital maps can lower entropy.
        assert!(entropy_gain(&KrausChannel::reset(2), &mixed).unwrap() < -0.99);
        assert!(entropy_gain(&dep, &DensityMatrix::maximally_mixed(3)).is_err());
    }

    #[test]
    fn extended_entropy_gain_examples() {
        let mut rng = rng_from_seed(2);
        let a = random_state_with(&mut rng, 2, 2);
        let b = random_state_with(&mut rng, 2, 2);
        let prod = BipartiteState::product(&a, &b);
        let ch = KrausChannel::depolarizing(2, 0.3).unwrap();
        let ext = extended_entropy_gain(&ch, &prod, Side::A).unwrap();
        assert!((ext - entropy_gain(&ch, &a).unwrap()).abs() < 1e-10);
        assert!(extended_entropy_gain(&KrausChannel::identity(2), &prod, Side::A).unwrap().abs() < 1e-10);

        let comp = KrausChannel::erasure(2, 0.5).unwrap().complementary();
        let g = extended_entropy_gain(&comp, &bell(), Side::A).unwrap();
        assert!((g - 1.5).abs() < 1e-10, "{g}");
    }

    #[test]
    fn holevo_examples() {
        let mut rng = rng_from_seed(3);
        let r = random_state_with(&mut rng, 2, 2);
        assert!(holevo(&[(0.3, r.clone()), (0.7, r.clone())]).unwrap().abs() < 1e-12);
        let h = holevo(&[(0.5, DensityMatrix::basis(2, 0)), (0.5, DensityMatrix::basis(2, 1))]).unwrap();
        assert!((h - 1.0).abs() < 1e-12);

        let s = random_state_with(&mut rng, 3, 2);
        let t = random_state_with(&mut rng, 3, 2);
        let chi = holevo(&[(0.25, s.clone()), (0.75, t.clone())]).unwrap();
        let avg = &s.matrix().scale_real(0.25) + &t.matrix().scale_real(0.75);
        let avg = DensityMatrix::new(avg).unwrap();
        let expect = von_neumann_entropy(&avg)
            - 0.25 * von_neumann_entropy(&s)
            - 0.75 * von_neumann_entropy(&t);
        assert!((chi - expect).abs() < 1e-12);
        assert!(chi >= 0.0 && chi <= 3f64.log2() + 1e-9);
        assert!(holevo(&[(0.5, s), (0.5, DensityMatrix::maximally_mixed(2))]).is_err());
    }

    #[test]
    fn f_functional_term_by_term() {
        let id = KrausChannel::identity(2);
        let enc = EncodingEnsemble::identity(2);
        // Bell input: ρ_B = I/2 and the trace map's gain is S(ρ_W) − S(ρ_SW) = 1.
        assert!(f_functional(&id, &bell(), &enc).unwrap().abs() < 1e-10);
        // Maximally mixed ρ_SW: 1 − (1 − 2) = 2.
        let mixed = BipartiteState::new(DensityMatrix::maximally_mixed(4), 2, 2).unwrap();
        assert!((f_functional(&id, &mixed, &enc).unwrap() - 2.0).abs() < 1e-10);

        let mut rng = rng_from_seed(4);
        let rho_s = random_state_with(&mut rng, 2, 2);
        let rho_w = random_state_with(&mut rng, 3, 2);
        let prod = BipartiteState::product(&rho_s, &rho_w);
        let ch = KrausChannel::erasure(2, 0.3).unwrap();
        let f = f_functional(&ch, &prod, &enc).unwrap();
        let expect = von_neumann_entropy(&ch.apply(&rho_s).unwrap())
            - entropy_gain(&ch.complementary(), &rho_s).unwrap();
        assert!((f - expect).abs() < 1e-10);

        let dep = KrausChannel::depolarizing(2, 0.2).unwrap();
        let weyl = EncodingEnsemble::weyl(2);
        let state = random_bipartite(5, 2, 2);
        let rho_b = {
            let outs: Vec<DensityMatrix> = weyl
                .entries()
                .iter()
                .map(|(_, op)| KrausChannel::compose(&dep, op).unwrap().apply(&state.reduced_a()).unwrap())
                .collect();
            let parts: Vec<(f64, &DensityMatrix)> = outs.iter().map(|r| (0.25, r)).collect();
            DensityMatrix::mixture(&parts).unwrap()
        };
        assert!((von_neumann_entropy(&rho_b) - 1.0).abs() < 1e-10);
        let f = f_functional(&dep, &state, &weyl).unwrap();
        let inner = chi_covariant_inner(&dep, &KrausChannel::identity(2), &state).unwrap();
        // Unitary encodings leave the complement's entropy gain unchanged.
        assert!((f - inner).abs() < 1e-9);

        assert!(f_functional(&KrausChannel::identity(3), &state, &enc).is_err());
    }

    #[test]
    fn chi_covariant_inner_cases() {
        let erasure = KrausChannel::erasure(2, 0.25).unwrap();
        let id = KrausChannel::identity(2);
        let v = chi_covariant_inner(&erasure, &id, &bell()).unwrap();
        assert!(v.abs() < 1e-10);

        // For the erasure channel with ρ_S = I/2 the covariant form and the
        // erasure integrand coincide.
        for seed in 0..10 {
            let mut rng = rng_from_seed(100 + seed);
            let w = [rng_f(&mut rng), rng_f(&mut rng), rng_f(&mut rng), rng_f(&mut rng)];
            let total: f64 = w.iter().sum();
            let state = bell_diagonal(w.map(|x| x / total)).unwrap();
            let a = chi_covariant_inner(&erasure, &id, &state).unwrap();
            let b = qec_chi_integrand(0.25, 2, &id, &state).unwrap();
            assert!((a - b).abs() < 1e-9);
            assert!((b - 0.75 * (2.0 - mutual_information(&state))).abs() < 1e-9);
        }

        // Reset encoding goes through the same complement construction.
        let dep = KrausChannel::depolarizing(2, 0.2).unwrap();
        let state = random_bipartite(6, 2, 2);
        let reset = chi_covariant_inner(&dep, &KrausChannel::reset(2), &state).unwrap();
        let comp = KrausChannel::compose(&dep, &KrausChannel::reset(2)).unwrap().complementary();
        let expect = 1.0 - extended_entropy_gain(&comp, &state, Side::A).unwrap();
        assert!((reset - expect).abs() < 1e-12);
    }

    fn rng_f(rng: &mut crate::random::SampleRng) -> f64 {
        use rand::Rng;
        rng.random::<f64>()
    }

    #[test]
    fn chi_covariant_inner_local_unitary_invariance() {
        let dep = KrausChannel::depolarizing(2, 0.35).unwrap();
        let id = KrausChannel::identity(2);
        let mut rng = rng_from_seed(7);
        for seed in 0..10 {
            let state = random_bipartite(200 + seed, 2, 2);
            let us = random_unitary(&mut rng, 2);
            let uw = random_unitary(&mut rng, 2);
            let rotated = state.local_rotate(&us, &uw).unwrap();
            let a = chi_covariant_inner(&dep, &id, &state).unwrap();
            let b = chi_covariant_inner(&dep, &id, &rotated).unwrap();
            assert!((a - b).abs() < 1e-8);
            assert!(a <= 2.0 + 1e-9);
        }
    }

    #[test]
    fn qec_integrand_cases() {
        let id = KrausChannel::identity(2);
        let state = random_bipartite(8, 2, 2);
        assert_eq!(qec_chi_integrand(1.0, 2, &id, &state).unwrap(), 0.0);

        let mut rng = rng_from_seed(9);
        let a = random_pure_with(&mut rng, 2).to_density();
        let b = random_pure_with(&mut rng, 2).to_density();
        let prod = BipartiteState::product(&a, &b);
        // Product of pure states: the trace map's gain is 0.
        let v = qec_chi_integrand(0.25, 2, &id, &prod).unwrap();
        assert!((v - 0.75).abs() < 1e-10);
        assert!(qec_chi_integrand(1.5, 2, &id, &prod).is_err());
        assert!(qec_chi_integrand(0.5, 3, &id, &prod).is_err());
    }
}
