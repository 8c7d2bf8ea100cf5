//! Seeded random generation: per-index seed derivation, Ginibre matrices,
//! Haar unitaries and isometries.
//!
//! Parallel work never shares a generator. Each sample index gets its own
//! ChaCha stream seeded by [`derive_seed`], so results do not depend on the
//! number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::densemath::{ComplexMatrix, C64};

pub type SampleRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for sample `index` of a run seeded with `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

pub fn rng_from_seed(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rng_for_index(seed: u64, index: u64) -> SampleRng {
    rng_from_seed(derive_seed(seed, index))
}

/// Standard complex Gaussian entry (real and imaginary parts N(0, 1/2)).
pub fn complex_gaussian<R: rand::Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: rand::Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-random unit vector.
pub fn random_unit_vector<R: rand::Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Orthonormalizes the columns of a Ginibre matrix (modified Gram-Schmidt),
/// which yields Haar-distributed orthonormal columns.
fn orthonormal_columns<R: rand::Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(cols <= rows, "cannot fit {cols} orthonormal columns in dimension {rows}");
    let g = ginibre(rng, rows, cols);
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v: Vec<C64> = (0..rows).map(|i| g[(i, j)]).collect();
        // Two passes keep the columns orthogonal to machine precision.
        for _ in 0..2 {
            for u in &q {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        q.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_fn(rows, cols, |i, j| q[j][i])
}

pub fn random_unitary<R: rand::Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    orthonormal_columns(rng, dim, dim)
}

/// Haar-random isometry `rows x cols` (V†V = I).
pub fn random_isometry<R: rand::Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    orthonormal_columns(rng, rows, cols)
}
