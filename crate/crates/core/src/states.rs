//! Density matrices, bipartite splits, purifications and entropy functionals.
//!
//! All entropies are in bits. Eigenvalues below [`ENTROPY_ZERO`] are treated
//! as exact zeros in entropy sums.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::densemath::{self, eigh, eigvalsh, partial_trace, tensor, ComplexMatrix, C64, ZERO};
use crate::error::{check_range, Error, Result};
use crate::random::{self, SampleRng};

/// Tolerance for validating caller-supplied states.
pub const STATE_TOL: f64 = 1e-8;
pub const ENTROPY_ZERO: f64 = 1e-12;

/// Positive unit-trace Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (all within 1e-8).
    /// The stored matrix is the Hermitian part of `mat`.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::Dimension(format!(
                "density matrix must be square, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        let herm = mat.hermitian_residual();
        if herm > STATE_TOL {
            return Err(Error::Validation(format!(
                "density matrix not Hermitian (residual {herm:e})"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::Validation(format!(
                "density matrix trace {tr} differs from 1"
            )));
        }
        let mat = mat.hermitize();
        let min = eigvalsh(&mat)?[0];
        if min < -STATE_TOL {
            return Err(Error::Validation(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(Self { mat })
    }

    /// Wraps a matrix known to be a state up to rounding (outputs of CPTP
    /// maps, partial traces of valid states).
    pub(crate) fn from_trusted(mat: ComplexMatrix) -> Self {
        debug_assert!(mat.is_square());
        Self { mat: mat.hermitize() }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diag(probs))
    }

    /// |k⟩⟨k| in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut diag = vec![0.0; dim];
        diag[k] = 1.0;
        Self {
            mat: ComplexMatrix::from_real_diag(&diag),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh(&self.mat).expect("density matrix is Hermitian")
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            mat: tensor(&self.mat, &other.mat),
        }
    }

    /// Reduced state on the factors in `keep`.
    pub fn reduce(&self, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
        Ok(Self::from_trusted(partial_trace(&self.mat, dims, keep)?))
    }

    /// U ρ U†
    pub fn rotate(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        if u.rows() != self.dim() || u.cols() != self.dim() {
            return Err(Error::Dimension(format!(
                "{}x{} unitary on a {}-dim state",
                u.rows(),
                u.cols(),
                self.dim()
            )));
        }
        Ok(Self::from_trusted(u.conjugate(&self.mat)))
    }

    /// Convex combination Σ p_k ρ_k of states of a common dimension.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<DensityMatrix> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Validation("empty mixture".into()))?;
        let dim = first.1.dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (p, rho) in parts {
            if rho.dim() != dim {
                return Err(Error::Dimension(format!(
                    "mixture of {dim}-dim and {}-dim states",
                    rho.dim()
                )));
            }
            acc += &rho.mat.scale_real(*p);
        }
        DensityMatrix::new(acc)
    }
}

/// Entropy in bits of a spectrum; values are clipped to [0, 1] and those at
/// or below [`ENTROPY_ZERO`] contribute nothing.
pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .map(|&l| l.clamp(0.0, 1.0))
        .filter(|&l| l > ENTROPY_ZERO)
        .map(|l| -l * l.log2())
        .sum()
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues())
}

/// H₂(p) = −p log₂ p − (1−p) log₂(1−p).
pub fn binary_entropy(p: f64) -> Result<f64> {
    check_range("p", p, 0.0, 1.0)?;
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    Ok(term(p) + term(1.0 - p))
}

/// Density matrix with a split into factors A ⊗ B.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState {
    state: DensityMatrix,
    dim_a: usize,
    dim_b: usize,
}

/// Which factor of a bipartite state an operation targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl BipartiteState {
    pub fn new(state: DensityMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 || dim_a * dim_b != state.dim() {
            return Err(Error::Dimension(format!(
                "split {dim_a}x{dim_b} does not match a {}-dim state",
                state.dim()
            )));
        }
        Ok(Self {
            state,
            dim_a,
            dim_b,
        })
    }

    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Self {
        Self {
            state: a.tensor(b),
            dim_a: a.dim(),
            dim_b: b.dim(),
        }
    }

    pub fn from_pure(psi: &PureState, dim_a: usize, dim_b: usize) -> Result<Self> {
        Self::new(psi.to_density(), dim_a, dim_b)
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.state.matrix()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn reduced_a(&self) -> DensityMatrix {
        self.reduced(Side::A)
    }

    pub fn reduced_b(&self) -> DensityMatrix {
        self.reduced(Side::B)
    }

    pub fn reduced(&self, side: Side) -> DensityMatrix {
        let keep = match side {
            Side::A => 0,
            Side::B => 1,
        };
        self.state
            .reduce(&[self.dim_a, self.dim_b], &[keep])
            .expect("split dimensions validated at construction")
    }

    /// (U_A ⊗ U_B) ρ (U_A ⊗ U_B)†
    pub fn local_rotate(&self, ua: &ComplexMatrix, ub: &ComplexMatrix) -> Result<Self> {
        let u = tensor(ua, ub);
        Self::new(self.state.rotate(&u)?, self.dim_a, self.dim_b)
    }
}

/// I(A:B) = S(A) + S(B) − S(AB).
pub fn mutual_information(rho: &BipartiteState) -> f64 {
    von_neumann_entropy(&rho.reduced_a()) + von_neumann_entropy(&rho.reduced_b())
        - von_neumann_entropy(rho.state())
}

/// I(A:B|C) = S(AC) + S(BC) − S(ABC) − S(C).
pub fn conditional_mutual_information(
    rho: &DensityMatrix,
    dims: (usize, usize, usize),
) -> Result<f64> {
    let d = [dims.0, dims.1, dims.2];
    if d.iter().product::<usize>() != rho.dim() {
        return Err(Error::Dimension(format!(
            "tripartite dims {d:?} do not match a {}-dim state",
            rho.dim()
        )));
    }
    let s_ac = von_neumann_entropy(&rho.reduce(&d, &[0, 2])?);
    let s_bc = von_neumann_entropy(&rho.reduce(&d, &[1, 2])?);
    let s_c = von_neumann_entropy(&rho.reduce(&d, &[2])?);
    Ok(s_ac + s_bc - von_neumann_entropy(rho) - s_c)
}

/// Unit vector in C^dim.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Dimension("empty state vector".into()));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Validation(format!("state vector norm {norm} is not 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes `amplitudes` first.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::Validation("zero vector cannot be normalized".into()));
        }
        Self::new(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[k] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_trusted(ComplexMatrix::outer(&self.amplitudes, &self.amplitudes))
    }
}

/// Purification |ψ⟩ = Σ_k √λ_k |v_k⟩ ⊗ |k⟩ on dim² amplitudes; the
/// purifying factor is the second one.
pub fn purify(rho: &DensityMatrix) -> PureState {
    let d = rho.dim();
    let eig = eigh(rho.matrix()).expect("density matrix is Hermitian");
    let mut amps = vec![ZERO; d * d];
    for k in 0..d {
        let w = eig.eigenvalues[k].max(0.0).sqrt();
        if w == 0.0 {
            continue;
        }
        for i in 0..d {
            amps[i * d + k] = eig.eigenvectors[(i, k)] * w;
        }
    }
    PureState::normalized(amps).expect("unit-trace state has a nonzero purification")
}

/// Parameters of the two-qubit family with diagonal marginals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TenParamSpec {
    pub a: f64,
    pub p1: f64,
    pub p2: f64,
    pub r1: f64,
    pub r2: f64,
    pub c1: f64,
    pub c3: f64,
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl TenParamSpec {
    pub fn validate(&self) -> Result<()> {
        check_range("p1", self.p1, 0.0, 1.0)?;
        check_range("p2", self.p2, 0.0, 1.0)?;
        let lo = (self.p1 + self.p2 - 1.0).max(0.0);
        let hi = self.p1.min(self.p2);
        check_range("a", self.a, lo, hi)?;
        for (name, v) in [("r1", self.r1), ("r2", self.r2), ("c1", self.c1), ("c3", self.c3)] {
            check_range(name, v, 0.0, 0.5)?;
        }
        let tau = std::f64::consts::TAU;
        for (name, v) in [("theta", self.theta), ("alpha", self.alpha), ("beta", self.beta)] {
            check_range(name, v, 0.0, tau)?;
        }
        Ok(())
    }

    /// Maps a point of the unit cube to a spec. Coordinates, in order:
    /// p1, p2, position of `a` inside its admissible interval, r1, r2, c1,
    /// c3, θ, α, β.
    pub fn from_unit_cube(u: &[f64]) -> Self {
        assert_eq!(u.len(), 10, "ten-parameter family takes 10 coordinates");
        let tau = std::f64::consts::TAU;
        let (p1, p2) = (u[0], u[1]);
        let lo = (p1 + p2 - 1.0).max(0.0);
        let hi = p1.min(p2);
        Self {
            p1,
            p2,
            a: lo + u[2] * (hi - lo).max(0.0),
            r1: 0.5 * u[3],
            r2: 0.5 * u[4],
            c1: 0.5 * u[5],
            c3: 0.5 * u[6],
            theta: tau * u[7],
            alpha: tau * u[8],
            beta: tau * u[9],
        }
    }

    /// Uniform draw over each parameter box, `a` conditional on (p1, p2).
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut u = [0.0; 10];
        for x in &mut u {
            *x = rng.random::<f64>();
        }
        Self::from_unit_cube(&u)
    }

    /// The 4x4 matrix in the |SW⟩ basis 00, 01, 10, 11 (not checked for
    /// positivity).
    pub fn matrix(&self) -> ComplexMatrix {
        let e = |phi: f64| C64::from_polar(1.0, phi);
        let re = |x: f64| C64::new(x, 0.0);
        let Self {
            a,
            p1,
            p2,
            r1,
            r2,
            c1,
            c3,
            theta,
            alpha,
            beta,
        } = *self;
        let data = vec![
            re(a),
            e(-alpha) * c3,
            e(-beta) * c1,
            re(r1),
            e(alpha) * c3,
            re(p2 - a),
            e(theta) * r2,
            -e(-beta) * c1,
            e(beta) * c1,
            e(-theta) * r2,
            re(p1 - a),
            -e(-alpha) * c3,
            re(r1),
            -e(beta) * c1,
            -e(alpha) * c3,
            re(1.0 + a - p1 - p2),
        ];
        ComplexMatrix::new(4, 4, data).expect("finite parameters give a finite matrix")
    }
}

/// Positivity threshold for the ten-parameter assembly.
pub const TEN_PARAM_PSD_TOL: f64 = 1e-10;

/// Assembles the ten-parameter two-qubit state; rejects assemblies whose
/// smallest eigenvalue is below −1e-10.
pub fn ten_param_state(spec: &TenParamSpec) -> Result<BipartiteState> {
    spec.validate()?;
    let m = spec.matrix();
    if !densemath::is_psd_within(&m, TEN_PARAM_PSD_TOL) {
        return Err(Error::NotPositive {
            min_eigenvalue: eigvalsh(&m)?[0],
        });
    }
    BipartiteState::new(DensityMatrix::from_trusted(m), 2, 2)
}

/// Draws ten-parameter states until one is positive semidefinite.
pub fn sample_ten_param<R: Rng + ?Sized>(rng: &mut R) -> (TenParamSpec, BipartiteState) {
    loop {
        let spec = TenParamSpec::sample(rng);
        if let Ok(state) = ten_param_state(&spec) {
            return (spec, state);
        }
    }
}

/// Σ_k p_k |B_k⟩⟨B_k| over the Bell basis Φ+, Φ−, Ψ+, Ψ−.
pub fn bell_diagonal(p: [f64; 4]) -> Result<BipartiteState> {
    if p.iter().any(|&x| !(x >= 0.0)) {
        return Err(Error::Validation(format!("negative Bell weight in {p:?}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::Validation(format!("Bell weights sum to {total}, not 1")));
    }
    let re = |x: f64| C64::new(x, 0.0);
    let phi = 0.5 * (p[0] + p[1]);
    let psi = 0.5 * (p[2] + p[3]);
    let mut m = ComplexMatrix::from_real_diag(&[phi, psi, psi, phi]);
    m[(0, 3)] = re(0.5 * (p[0] - p[1]));
    m[(3, 0)] = re(0.5 * (p[0] - p[1]));
    m[(1, 2)] = re(0.5 * (p[2] - p[3]));
    m[(2, 1)] = re(0.5 * (p[2] - p[3]));
    BipartiteState::new(DensityMatrix::from_trusted(m), 2, 2)
}

/// Reduced state of a Haar-random pure state on dim ⊗ env (a normalized
/// Wishart matrix); deterministic for a fixed seed.
pub fn random_state(dim: usize, env: usize, seed: u64) -> Result<DensityMatrix> {
    if dim == 0 || env == 0 {
        return Err(Error::Dimension(format!("random_state({dim}, {env})")));
    }
    Ok(random_state_with(&mut random::rng_from_seed(seed), dim, env))
}

pub fn random_state_with(rng: &mut SampleRng, dim: usize, env: usize) -> DensityMatrix {
    let g = random::ginibre(rng, dim, env);
    let w = g.matmul(&g.adjoint());
    let tr = w.trace().re;
    DensityMatrix::from_trusted(w.scale_real(1.0 / tr))
}

pub fn random_pure_with(rng: &mut SampleRng, dim: usize) -> PureState {
    PureState {
        amplitudes: random::random_unit_vector(rng, dim),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::rng_from_seed;

    fn bell_phi_plus() -> BipartiteState {
        bell_diagonal([1.0, 0.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn validation_rejects_bad_states() {
        assert!(DensityMatrix::diagonal(&[0.5, 0.6]).is_err());
        assert!(DensityMatrix::diagonal(&[1.5, -0.5]).is_err());
        let nonherm = ComplexMatrix::from_real(2, 2, &[0.5, 0.1, 0.0, 0.5]).unwrap();
        assert!(DensityMatrix::new(nonherm).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert!((von_neumann_entropy(&DensityMatrix::maximally_mixed(2)) - 1.0).abs() < 1e-12);
        assert!(von_neumann_entropy(&DensityMatrix::basis(3, 1)).abs() < 1e-12);
        let rho = DensityMatrix::diagonal(&[0.25, 0.75]).unwrap();
        let expect = -0.25 * 0.25f64.log2() - 0.75 * 0.75f64.log2();
        assert!((von_neumann_entropy(&rho) - expect).abs() < 1e-12);
        assert!((binary_entropy(0.25).unwrap() - von_neumann_entropy(&rho)).abs() < 1e-12);
    }

    #[test]
    fn binary_entropy_edges() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(binary_entropy(1.2), Err(Error::Range { .. })));
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn mutual_information_examples() {
        let a = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let b = random_state(3, 2, 4).unwrap();
        assert!(mutual_information(&BipartiteState::product(&a, &b)).abs() < 1e-10);
        assert!((mutual_information(&bell_phi_plus()) - 2.0).abs() < 1e-10);

        // Bell-diagonal: marginals I/2, so I = 2 − H(p).
        let p = [0.7, 0.1, 0.1, 0.1];
        let h: f64 = p.iter().map(|&x: &f64| -x * x.log2()).sum();
        let got = mutual_information(&bell_diagonal(p).unwrap());
        assert!((got - (2.0 - h)).abs() < 1e-10);
    }

    #[test]
    fn bell_diagonal_examples() {
        let mixed = bell_diagonal([0.25; 4]).unwrap();
        assert!(mixed.matrix().max_abs_diff(&ComplexMatrix::identity(4).scale_real(0.25)) < 1e-15);
        assert!(mutual_information(&mixed).abs() < 1e-10);
        assert!((mutual_information(&bell_diagonal([0.5, 0.5, 0.0, 0.0]).unwrap()) - 1.0).abs() < 1e-10);
        let half = DensityMatrix::maximally_mixed(2);
        let s = bell_diagonal([0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(s.reduced_a().matrix().max_abs_diff(half.matrix()) < 1e-15);
        assert!(s.reduced_b().matrix().max_abs_diff(half.matrix()) < 1e-15);
        assert!(bell_diagonal([0.5, 0.6, 0.0, 0.0]).is_err());
        assert!(bell_diagonal([1.5, -0.5, 0.0, 0.0]).is_err());
    }

    #[test]
    fn bell_diagonal_mutual_information_monotone() {
        let mut last = f64::INFINITY;
        for k in 0..=50 {
            let t = 0.25 * k as f64 / 50.0;
            let i = mutual_information(&bell_diagonal([1.0 - 3.0 * t, t, t, t]).unwrap());
            assert!(i <= last + 1e-12);
            last = i;
        }
        assert!(last.abs() < 1e-10);
    }

    #[test]
    fn conditional_mutual_information_examples() {
        let bell = bell_phi_plus();
        let c = DensityMatrix::diagonal(&[0.4, 0.6]).unwrap();
        let abc = bell.state().tensor(&c);
        let got = conditional_mutual_information(&abc, (2, 2, 2)).unwrap();
        assert!((got - mutual_information(&bell)).abs() < 1e-10);

        let prod = DensityMatrix::diagonal(&[0.3, 0.7])
            .unwrap()
            .tensor(&c)
            .tensor(&DensityMatrix::maximally_mixed(2));
        assert!(conditional_mutual_information(&prod, (2, 2, 2)).unwrap().abs() < 1e-10);

        // GHZ: S(AC) = S(BC) = S(C) = 1, S(ABC) = 0, so I(A:B|C) = 1.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![ZERO; 8];
        amps[0] = C64::new(s, 0.0);
        amps[7] = C64::new(s, 0.0);
        let ghz = PureState::new(amps).unwrap().to_density();
        let got = conditional_mutual_information(&ghz, (2, 2, 2)).unwrap();
        assert!((got - (1.0 + 1.0 - 0.0 - 1.0)).abs() < 1e-10);

        assert!(conditional_mutual_information(&ghz, (2, 2, 3)).is_err());
    }

    #[test]
    fn purify_round_trips() {
        let pure = DensityMatrix::basis(2, 0);
        let p = purify(&pure);
        let back = p.to_density().reduce(&[2, 2], &[0]).unwrap();
        assert!(back.matrix().max_abs_diff(pure.matrix()) < 1e-12);

        let p = purify(&DensityMatrix::maximally_mixed(2));
        let joint = BipartiteState::from_pure(&p, 2, 2).unwrap();
        assert!((mutual_information(&joint) - 2.0).abs() < 1e-10);

        let rho = random_state(3, 3, 17).unwrap();
        let p = purify(&rho);
        let back = p.to_density().reduce(&[3, 3], &[0]).unwrap();
        assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-9);
    }

    #[test]
    fn ten_param_examples() {
        let mixed = TenParamSpec {
            a: 0.25,
            p1: 0.5,
            p2: 0.5,
            r1: 0.0,
            r2: 0.0,
            c1: 0.0,
            c3: 0.0,
            theta: 0.0,
            alpha: 0.0,
            beta: 0.0,
        };
        let s = ten_param_state(&mixed).unwrap();
        assert!(s.matrix().max_abs_diff(&ComplexMatrix::identity(4).scale_real(0.25)) < 1e-15);

        let bell = TenParamSpec {
            a: 0.5,
            r1: 0.5,
            ..mixed
        };
        let s = ten_param_state(&bell).unwrap();
        let eig = s.state().eigenvalues();
        assert!((eig[3] - 1.0).abs() < 1e-12 && eig[0].abs() < 1e-12);
        assert!(s.matrix().max_abs_diff(bell_phi_plus().matrix()) < 1e-15);

        let bad = TenParamSpec { r1: 0.5, ..mixed };
        assert!(matches!(ten_param_state(&bad), Err(Error::NotPositive { .. })));
        let out_of_box = TenParamSpec { a: 0.6, ..mixed };
        assert!(matches!(ten_param_state(&out_of_box), Err(Error::Range { .. })));
    }

    #[test]
    fn ten_param_marginals_are_diagonal() {
        let mut rng = rng_from_seed(99);
        for _ in 0..20 {
            let (spec, s) = sample_ten_param(&mut rng);
            assert!(s.matrix().hermitian_residual() < 1e-15);
            assert!((s.matrix().trace().re - 1.0).abs() < 1e-12);
            // Signal marginal carries p2, witness marginal carries p1.
            let rs = DensityMatrix::diagonal(&[spec.p2, 1.0 - spec.p2]).unwrap();
            let rw = DensityMatrix::diagonal(&[spec.p1, 1.0 - spec.p1]).unwrap();
            assert!(s.reduced_a().matrix().max_abs_diff(rs.matrix()) < 1e-12);
            assert!(s.reduced_b().matrix().max_abs_diff(rw.matrix()) < 1e-12);
        }
    }

    #[test]
    fn random_state_properties() {
        let pure = random_state(3, 1, 5).unwrap();
        assert!(von_neumann_entropy(&pure) < 1e-9);
        assert_eq!(random_state(4, 2, 7).unwrap(), random_state(4, 2, 7).unwrap());
        assert!(DensityMatrix::new(random_state(4, 3, 1).unwrap().into_matrix()).is_ok());

        let dim = 3;
        let mut mean = ComplexMatrix::zeros(dim, dim);
        for seed in 0..1000 {
            mean += random_state(dim, 64, seed).unwrap().matrix();
        }
        let mean = mean.scale_real(1.0 / 1000.0);
        let target = ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64);
        assert!(mean.max_abs_diff(&target) < 0.05);
    }

    #[test]
    fn pure_bipartite_marginal_entropies_match() {
        let mut rng = rng_from_seed(3);
        for _ in 0..20 {
            let psi = random_pure_with(&mut rng, 6);
            let s = BipartiteState::from_pure(&psi, 2, 3).unwrap();
            let sa = von_neumann_entropy(&s.reduced_a());
            let sb = von_neumann_entropy(&s.reduced_b());
            assert!((sa - sb).abs() < 1e-9);
        }
    }
}
