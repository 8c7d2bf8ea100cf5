use chancap::capacity::{depolarizing_closed_forms, entropy_gain, holevo};
use chancap::channels::KrausChannel;
use chancap::cli::{format_number, parse_grid};
use chancap::densemath::eigvalsh;
use chancap::random::{random_unitary, rng_from_seed};
use chancap::states::{
    mutual_information, random_pure_with, random_state_with, von_neumann_entropy, BipartiteState,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_within_dimension_bounds(seed in any::<u64>(), dim in 2usize..6, env in 1usize..6) {
        let rho = random_state_with(&mut rng_from_seed(seed), dim, env);
        let s = von_neumann_entropy(&rho);
        prop_assert!(s >= -1e-12);
        prop_assert!(s <= (dim as f64).log2() + 1e-12);
        // Rank bounds the entropy as well.
        prop_assert!(s <= (env.min(dim) as f64).log2() + 1e-9);
    }

    #[test]
    fn channel_outputs_are_states(seed in any::<u64>(), din in 2usize..4, dout in 2usize..4, denv in 1usize..4) {
        prop_assume!(dout * denv >= din);
        let mut rng = rng_from_seed(seed);
        let ch = KrausChannel::random(&mut rng, din, dout, denv);
        prop_assert!(ch.completeness_residual() < 1e-10);
        let out = ch.apply(&random_state_with(&mut rng, din, din)).unwrap();
        let tr = out.matrix().trace();
        prop_assert!((tr.re - 1.0).abs() < 1e-10 && tr.im.abs() < 1e-12);
        prop_assert!(eigvalsh(out.matrix()).unwrap().iter().all(|&l| l > -1e-10));
    }

    #[test]
    fn complement_matches_on_pure_inputs(seed in any::<u64>(), din in 2usize..4, dout in 2usize..4, denv in 1usize..5) {
        prop_assume!(dout * denv >= din);
        let mut rng = rng_from_seed(seed);
        let ch = KrausChannel::random(&mut rng, din, dout, denv);
        let psi = random_pure_with(&mut rng, din).to_density();
        let a = von_neumann_entropy(&ch.apply(&psi).unwrap());
        let b = von_neumann_entropy(&ch.complementary().apply(&psi).unwrap());
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn unitary_channels_gain_nothing(seed in any::<u64>(), dim in 2usize..5) {
        let mut rng = rng_from_seed(seed);
        let u = KrausChannel::unitary(random_unitary(&mut rng, dim)).unwrap();
        let rho = random_state_with(&mut rng, dim, 2);
        prop_assert!(entropy_gain(&u, &rho).unwrap().abs() < 1e-9);
    }

    #[test]
    fn mutual_information_bounds(seed in any::<u64>(), da in 2usize..4, db in 2usize..4) {
        let rho = random_state_with(&mut rng_from_seed(seed), da * db, da * db);
        let i = mutual_information(&BipartiteState::new(rho, da, db).unwrap());
        prop_assert!(i >= -1e-10);
        prop_assert!(i <= 2.0 * (da.min(db) as f64).log2() + 1e-10);
    }

    #[test]
    fn holevo_of_orthogonal_pair_is_binary_entropy(p in 0.01f64..0.99) {
        let zero = chancap::states::DensityMatrix::basis(2, 0);
        let one = chancap::states::DensityMatrix::basis(2, 1);
        let chi = holevo(&[(p, zero), (1.0 - p, one)]).unwrap();
        let h = -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
        prop_assert!((chi - h).abs() < 1e-12);
    }

    #[test]
    fn depolarizing_capacities_decrease_with_noise(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (x, y) = (depolarizing_closed_forms(lo).unwrap(), depolarizing_closed_forms(hi).unwrap());
        prop_assert!(y.c_e <= x.c_e + 1e-12 && y.c <= x.c + 1e-12);
        prop_assert!(y.c <= y.c_e + 1e-12);
    }

    #[test]
    fn formatted_numbers_parse_back(x in prop::num::f64::NORMAL) {
        let back: f64 = format_number(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 1e-11 * x.abs());
    }

    #[test]
    fn grids_cover_both_ends(start in -5.0f64..5.0, steps in 1usize..40, step in 0.01f64..1.0) {
        let stop = start + steps as f64 * step;
        let spec = format!("{start}:{stop}:{step}");
        let grid = parse_grid(&spec).unwrap();
        prop_assert_eq!(grid.len(), steps + 1);
        prop_assert_eq!(grid[0], start);
        prop_assert!((grid[steps] - stop).abs() < 1e-9 * step.max(1.0));
    }
}
