//! CPTP maps as Kraus families, Stinespring dilations and complementary
//! channels, the built-in erasure/depolarizing/dephasing channels, and
//! generalized-covariance machinery (Weyl sets, twirling).

use serde::{Deserialize, Serialize};

use crate::densemath::{
    self, embed_operator, partial_trace, tensor, ComplexMatrix, C64, ONE, ZERO,
};
use crate::error::{check_range, Error, Result};
use crate::random::{self, SampleRng};
use crate::states::{BipartiteState, DensityMatrix, Side};

/// Tolerance on Σ K†K = I.
pub const COMPLETENESS_TOL: f64 = 1e-8;
/// Residual below which a covariance witness V is accepted.
pub const COVARIANCE_TOL: f64 = 1e-6;

/// Completely positive trace-preserving map ρ ↦ Σ K ρ K†.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    din: usize,
    dout: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Checks shapes and completeness within 1e-8.
    pub fn new(din: usize, dout: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if din == 0 || dout == 0 || kraus.is_empty() {
            return Err(Error::Dimension(format!(
                "channel {din} -> {dout} with {} Kraus operators",
                kraus.len()
            )));
        }
        if let Some((k, m)) = kraus
            .iter()
            .enumerate()
            .find(|(_, m)| m.rows() != dout || m.cols() != din)
        {
            return Err(Error::Dimension(format!(
                "Kraus operator {k} is {}x{}, expected {dout}x{din}",
                m.rows(),
                m.cols()
            )));
        }
        let ch = Self { din, dout, kraus };
        let residual = ch.completeness_residual();
        if residual > COMPLETENESS_TOL {
            return Err(Error::Validation(format!(
                "Kraus family is not complete: max |Σ K†K − I| = {residual:e}"
            )));
        }
        Ok(ch)
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn num_kraus(&self) -> usize {
        self.kraus.len()
    }

    pub fn completeness_residual(&self) -> f64 {
        let mut acc = ComplexMatrix::zeros(self.din, self.din);
        for k in &self.kraus {
            acc += &k.adjoint().matmul(k);
        }
        acc.max_abs_diff(&ComplexMatrix::identity(self.din))
    }

    pub fn identity(d: usize) -> Self {
        Self {
            din: d,
            dout: d,
            kraus: vec![ComplexMatrix::identity(d)],
        }
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        let d = u.rows();
        Self::new(d, d, vec![u])
    }

    /// Replaces every input by |0⟩⟨0|.
    pub fn reset(d: usize) -> Self {
        let kraus = (0..d)
            .map(|i| {
                let mut k = ComplexMatrix::zeros(d, d);
                k[(0, i)] = ONE;
                k
            })
            .collect();
        Self { din: d, dout: d, kraus }
    }

    /// Applies the map to a raw square matrix (linear extension).
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.rows() != self.din || m.cols() != self.din {
            return Err(Error::Dimension(format!(
                "channel input dimension {} does not match a {}x{} operand",
                self.din,
                m.rows(),
                m.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dout, self.dout);
        for k in &self.kraus {
            out += &k.conjugate(m);
        }
        Ok(out)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_trusted(self.apply_matrix(rho.matrix())?))
    }

    /// Acts on factor `target` of a multipartite operator with factor
    /// dimensions `dims`; the other factors are untouched.
    pub fn apply_on_subsystem(
        &self,
        m: &ComplexMatrix,
        dims: &[usize],
        target: usize,
    ) -> Result<ComplexMatrix> {
        if target >= dims.len() || dims[target] != self.din {
            return Err(Error::Dimension(format!(
                "channel with input dimension {} cannot act on factor {target} of {dims:?}",
                self.din
            )));
        }
        let total: usize = dims.iter().product();
        if m.rows() != total || m.cols() != total {
            return Err(Error::Dimension(format!(
                "factor dims {dims:?} do not match a {}x{} operand",
                m.rows(),
                m.cols()
            )));
        }
        let out_dim = total / self.din * self.dout;
        let mut out = ComplexMatrix::zeros(out_dim, out_dim);
        for k in &self.kraus {
            let big = embed_operator(k, dims, target)?;
            out += &big.conjugate(m);
        }
        Ok(out)
    }

    /// (Ψ ⊗ I) or (I ⊗ Ψ) on a bipartite state.
    pub fn apply_extended(&self, rho: &BipartiteState, side: Side) -> Result<BipartiteState> {
        let (da, db) = rho.dims();
        let (target, new_dims) = match side {
            Side::A => (0, (self.dout, db)),
            Side::B => (1, (da, self.dout)),
        };
        let out = self.apply_on_subsystem(rho.matrix(), &[da, db], target)?;
        BipartiteState::new(DensityMatrix::from_trusted(out), new_dims.0, new_dims.1)
    }

    /// Canonical dilation V = Σ_i K_i ⊗ |i⟩_env.
    pub fn stinespring(&self) -> StinespringIsometry {
        let denv = self.kraus.len();
        let mut v = ComplexMatrix::zeros(self.dout * denv, self.din);
        for (e, k) in self.kraus.iter().enumerate() {
            for o in 0..self.dout {
                for i in 0..self.din {
                    v[(o * denv + e, i)] = k[(o, i)];
                }
            }
        }
        StinespringIsometry {
            v,
            dout: self.dout,
            denv,
        }
    }

    /// Channel to the environment of the canonical dilation. Its Kraus
    /// operators are indexed by the output basis: row `e` of `L_j` is row
    /// `j` of `K_e`.
    pub fn complementary(&self) -> KrausChannel {
        let denv = self.kraus.len();
        let kraus = (0..self.dout)
            .map(|j| ComplexMatrix::from_fn(denv, self.din, |e, i| self.kraus[e][(j, i)]))
            .collect();
        KrausChannel {
            din: self.din,
            dout: denv,
            kraus,
        }
    }

    /// `second ∘ first`, Kraus family {K_j L_i}.
    pub fn compose(second: &KrausChannel, first: &KrausChannel) -> Result<KrausChannel> {
        if first.dout != second.din {
            return Err(Error::Dimension(format!(
                "cannot compose: first outputs {}, second takes {}",
                first.dout, second.din
            )));
        }
        let mut kraus = Vec::with_capacity(first.kraus.len() * second.kraus.len());
        for k in &second.kraus {
            for l in &first.kraus {
                kraus.push(k.matmul(l));
            }
        }
        Ok(KrausChannel {
            din: first.din,
            dout: second.dout,
            kraus,
        })
    }

    /// Ψ₁ ⊗ Ψ₂ with Kraus family {K_i ⊗ L_j}.
    pub fn tensor(a: &KrausChannel, b: &KrausChannel) -> KrausChannel {
        let mut kraus = Vec::with_capacity(a.kraus.len() * b.kraus.len());
        for k in &a.kraus {
            for l in &b.kraus {
                kraus.push(tensor(k, l));
            }
        }
        KrausChannel {
            din: a.din * b.din,
            dout: a.dout * b.dout,
            kraus,
        }
    }

    /// Erasure channel ρ ↦ (1−ε)ρ ⊕ ε|e⟩⟨e| with the flag |e⟩ as basis
    /// vector `d` of the (d+1)-dimensional output.
    pub fn erasure(d: usize, eps: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Dimension(format!("erasure channel needs d >= 2, got {d}")));
        }
        check_range("eps", eps, 0.0, 1.0)?;
        let keep = (1.0 - eps).sqrt();
        let flag = eps.sqrt();
        let mut kraus = vec![ComplexMatrix::from_fn(d + 1, d, |o, i| {
            if o == i {
                C64::new(keep, 0.0)
            } else {
                ZERO
            }
        })];
        for i in 0..d {
            let mut k = ComplexMatrix::zeros(d + 1, d);
            k[(d, i)] = C64::new(flag, 0.0);
            kraus.push(k);
        }
        Self::new(d, d + 1, kraus)
    }

    /// Depolarizing channel ρ ↦ λI/d + (1−λ)ρ as a Weyl-operator mixture
    /// (Pauli mixture for d = 2). Complete positivity holds for
    /// λ ∈ [0, d²/(d²−1)].
    pub fn depolarizing(d: usize, lam: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Dimension(format!("depolarizing channel needs d >= 2, got {d}")));
        }
        let d2 = (d * d) as f64;
        check_range("lam", lam, 0.0, d2 / (d2 - 1.0))?;
        let w0 = (1.0 - lam + lam / d2).max(0.0).sqrt();
        let wx = (lam / d2).sqrt();
        let group = weyl_group(d);
        let kraus = group
            .unitaries()
            .iter()
            .enumerate()
            .map(|(x, u)| u.scale_real(if x == 0 { w0 } else { wx }))
            .collect();
        Self::new(d, d, kraus)
    }

    /// Qubit phase damping: off-diagonals scaled by √(1−γ).
    pub fn dephasing(gamma: f64) -> Result<Self> {
        check_range("gamma", gamma, 0.0, 1.0)?;
        let z = ComplexMatrix::from_real_diag(&[1.0, -1.0]);
        // (1−p)ρ + pZρZ with 1 − 2p = √(1−γ)
        let p = 0.5 * (1.0 - (1.0 - gamma).sqrt());
        Self::new(
            2,
            2,
            vec![
                ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt()),
                z.scale_real(p.sqrt()),
            ],
        )
    }

    /// Haar-random channel from a random isometry into dout ⊗ denv.
    ///
    /// Panics if `dout * denv < din`.
    pub fn random(rng: &mut SampleRng, din: usize, dout: usize, denv: usize) -> Self {
        let v = random::random_isometry(rng, dout * denv, din);
        StinespringIsometry { v, dout, denv }.to_channel()
    }
}

/// Isometry V: C^din → C^dout ⊗ C^denv (output factor first).
#[derive(Clone, Debug, PartialEq)]
pub struct StinespringIsometry {
    v: ComplexMatrix,
    dout: usize,
    denv: usize,
}

impl StinespringIsometry {
    pub fn new(v: ComplexMatrix, dout: usize, denv: usize) -> Result<Self> {
        if v.rows() != dout * denv {
            return Err(Error::Dimension(format!(
                "isometry has {} rows, expected {dout}·{denv}",
                v.rows()
            )));
        }
        let r = v.adjoint().matmul(&v).max_abs_diff(&ComplexMatrix::identity(v.cols()));
        if r > COMPLETENESS_TOL {
            return Err(Error::Validation(format!("V†V deviates from identity by {r:e}")));
        }
        Ok(Self { v, dout, denv })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.v
    }

    pub fn din(&self) -> usize {
        self.v.cols()
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn denv(&self) -> usize {
        self.denv
    }

    fn dilate(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.din() {
            return Err(Error::Dimension(format!(
                "isometry input dimension {} does not match a {}-dim state",
                self.din(),
                rho.rows()
            )));
        }
        Ok(self.v.conjugate(rho))
    }

    /// Tr_env(VρV†)
    pub fn output(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let joint = self.dilate(rho.matrix())?;
        Ok(DensityMatrix::from_trusted(partial_trace(&joint, &[self.dout, self.denv], &[0])?))
    }

    /// Tr_out(VρV†)
    pub fn environment(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let joint = self.dilate(rho.matrix())?;
        Ok(DensityMatrix::from_trusted(partial_trace(&joint, &[self.dout, self.denv], &[1])?))
    }

    /// Kraus operators K_e = (I ⊗ ⟨e|) V.
    pub fn to_channel(&self) -> KrausChannel {
        let din = self.din();
        let kraus = (0..self.denv)
            .map(|e| ComplexMatrix::from_fn(self.dout, din, |o, i| self.v[(o * self.denv + e, i)]))
            .collect();
        KrausChannel {
            din,
            dout: self.dout,
            kraus,
        }
    }
}

/// Unitary set whose conjugation average annihilates traceless matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct CovariantGroup {
    unitaries: Vec<ComplexMatrix>,
}

impl CovariantGroup {
    /// Checks unitarity of each member and Σ U M U† = 0 on a traceless
    /// basis, both within 1e-8.
    pub fn new(unitaries: Vec<ComplexMatrix>) -> Result<Self> {
        let d = unitaries
            .first()
            .ok_or_else(|| Error::Validation("empty unitary set".into()))?
            .rows();
        for (k, u) in unitaries.iter().enumerate() {
            if u.rows() != d || u.cols() != d {
                return Err(Error::Dimension(format!("member {k} is not {d}x{d}")));
            }
            let r = u.unitarity_residual();
            if r > COMPLETENESS_TOL {
                return Err(Error::Validation(format!("member {k} is not unitary ({r:e})")));
            }
        }
        let group = Self { unitaries };
        let r = group.annihilation_residual();
        if r > COMPLETENESS_TOL {
            return Err(Error::Validation(format!(
                "set does not annihilate traceless matrices (residual {r:e})"
            )));
        }
        Ok(group)
    }

    pub fn dim(&self) -> usize {
        self.unitaries[0].rows()
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }

    pub fn len(&self) -> usize {
        self.unitaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unitaries.is_empty()
    }

    /// Worst max-abs entry of Σ_x U_x M U_x† over the generalized Gell-Mann
    /// basis M of traceless matrices.
    pub fn annihilation_residual(&self) -> f64 {
        traceless_basis(self.dim())
            .iter()
            .map(|m| {
                let mut acc = ComplexMatrix::zeros(m.rows(), m.cols());
                for u in &self.unitaries {
                    acc += &u.conjugate(m);
                }
                acc.max_abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn twirl(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        twirl(&self.unitaries, rho)
    }
}

/// Generalized Gell-Mann basis of the d²−1 traceless Hermitian matrices.
pub fn traceless_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in j + 1..d {
            let mut sym = ComplexMatrix::zeros(d, d);
            sym[(j, k)] = ONE;
            sym[(k, j)] = ONE;
            out.push(sym);
            let mut anti = ComplexMatrix::zeros(d, d);
            anti[(j, k)] = C64::new(0.0, -1.0);
            anti[(k, j)] = C64::new(0.0, 1.0);
            out.push(anti);
        }
    }
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; d];
        for x in diag.iter_mut().take(l) {
            *x = norm;
        }
        diag[l] = -(l as f64) * norm;
        out.push(ComplexMatrix::from_real_diag(&diag));
    }
    out
}

/// The d² shift-and-phase operators X^a Z^b, with X|j⟩ = |j+1 mod d⟩ and
/// Z|j⟩ = ω^j|j⟩. Member order is (a, b) row-major, so index 0 is I.
pub fn weyl_group(d: usize) -> CovariantGroup {
    assert!(d >= 2, "Weyl set needs d >= 2");
    let omega = |k: usize| C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / d as f64);
    let mut unitaries = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            // (X^a Z^b)|j⟩ = ω^{bj} |j+a⟩
            let mut u = ComplexMatrix::zeros(d, d);
            for j in 0..d {
                u[((j + a) % d, j)] = omega((b * j) % d);
            }
            unitaries.push(u);
        }
    }
    CovariantGroup { unitaries }
}

/// Average of U ρ U† over the given unitaries.
pub fn twirl(unitaries: &[ComplexMatrix], rho: &DensityMatrix) -> Result<DensityMatrix> {
    if unitaries.is_empty() {
        return Err(Error::Validation("twirl over an empty set".into()));
    }
    let d = rho.dim();
    let mut acc = ComplexMatrix::zeros(d, d);
    for u in unitaries {
        if u.rows() != d || u.cols() != d {
            return Err(Error::Dimension(format!(
                "{}x{} unitary cannot act on a {d}-dim state",
                u.rows(),
                u.cols()
            )));
        }
        acc += &u.conjugate(rho.matrix());
    }
    Ok(DensityMatrix::from_trusted(acc.scale_real(1.0 / unitaries.len() as f64)))
}

/// Outcome of [`check_generalized_covariance`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    pub covariant: bool,
    /// Worst max-abs mismatch |Ψ(UρU†) − VΨ(ρ)V†| over group members and
    /// probe states.
    pub worst_residual: f64,
}

/// Density matrices spanning the Hermitian operators on C^d.
fn spanning_states(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        out.push(DensityMatrix::basis(d, j).into_matrix());
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in j + 1..d {
            for phase in [ONE, C64::new(0.0, 1.0)] {
                let mut v = vec![ZERO; d];
                v[j] = C64::new(h, 0.0);
                v[k] = phase * h;
                out.push(ComplexMatrix::outer(&v, &v));
            }
        }
    }
    out
}

/// Finds, for each group member U, a unitary V on the output space with
/// Ψ(UρU†) = VΨ(ρ)V† on a spanning set of inputs.
///
/// V solves the linear system V·A_k = B_k·V with A_k = Ψ(ρ_k),
/// B_k = Ψ(Uρ_kU†). A generic element of its solution space is projected to
/// a unitary by polar decomposition; for an invertible solution the polar
/// factor is again a solution. The output space may differ from the input
/// space, which covers the erasure channel's (d+1)-dimensional output.
pub fn check_generalized_covariance(ch: &KrausChannel, group: &CovariantGroup) -> CovarianceReport {
    if group.dim() != ch.din() {
        return CovarianceReport {
            covariant: false,
            worst_residual: f64::INFINITY,
        };
    }
    let probes = spanning_states(ch.din());
    let outputs: Vec<ComplexMatrix> = probes
        .iter()
        .map(|p| ch.apply_matrix(p).expect("probe matches channel input"))
        .collect();
    let mut worst = 0.0f64;
    for u in group.unitaries() {
        let rotated: Vec<ComplexMatrix> = probes
            .iter()
            .map(|p| ch.apply_matrix(&u.conjugate(p)).expect("probe matches channel input"))
            .collect();
        let residual = match covariance_witness(&outputs, &rotated) {
            Some(v) => outputs
                .iter()
                .zip(&rotated)
                .map(|(a, b)| v.conjugate(a).max_abs_diff(b))
                .fold(0.0, f64::max),
            None => f64::INFINITY,
        };
        worst = worst.max(residual);
    }
    CovarianceReport {
        covariant: worst <= COVARIANCE_TOL,
        worst_residual: worst,
    }
}

/// Unitary V with V A_k ≈ B_k V for all k, if the solution space is
/// non-trivial.
fn covariance_witness(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> Option<ComplexMatrix> {
    let n = a[0].rows();
    let nn = n * n;
    // Normal matrix G = Σ_k L_k† L_k of the vectorized map v ↦ vec(V A − B V),
    // accumulated directly from its action on the basis matrices E_pq.
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(nn);
    for p in 0..n {
        for q in 0..n {
            let mut e = ComplexMatrix::zeros(n, n);
            e[(p, q)] = ONE;
            let mut stacked = Vec::with_capacity(a.len() * nn);
            for (ak, bk) in a.iter().zip(b) {
                let r = &e.matmul(ak) - &bk.matmul(&e);
                stacked.extend_from_slice(r.as_slice());
            }
            cols.push(stacked);
        }
    }
    let gram = ComplexMatrix::from_fn(nn, nn, |i, j| {
        cols[i].iter().zip(&cols[j]).map(|(x, y)| x.conj() * y).sum()
    });
    let eig = densemath::eigh(&gram.hermitize()).ok()?;
    let scale = eig.eigenvalues.last().copied().unwrap_or(0.0).max(1.0);
    let null: Vec<usize> = (0..nn)
        .filter(|&k| eig.eigenvalues[k] <= 1e-10 * scale)
        .collect();
    if null.is_empty() {
        return None;
    }
    // Fixed irrational-ish weights give a generic (invertible) combination.
    let mut v = ComplexMatrix::zeros(n, n);
    for (t, &k) in null.iter().enumerate() {
        let w = C64::new(1.0 + 0.618_033_988_7 * t as f64, 0.414_213_562_4 * (t as f64 + 1.0));
        let vec = eig.eigenvector(k);
        for i in 0..n {
            for j in 0..n {
                v[(i, j)] += w * vec[i * n + j];
            }
        }
    }
    densemath::polar_unitary(&v).ok()
}

/// Serialized channel: either an explicit Kraus family or a built-in by
/// name. Each Kraus operator is a row-major list of `[re, im]` pairs, either
/// flat or nested by rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Kraus {
        din: usize,
        dout: usize,
        kraus: Vec<KrausEntries>,
    },
    Builtin(BuiltinChannel),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KrausEntries {
    Flat(Vec<[f64; 2]>),
    Rows(Vec<Vec<[f64; 2]>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase", deny_unknown_fields)]
pub enum BuiltinChannel {
    Erasure {
        #[serde(default = "qubit")]
        d: usize,
        eps: f64,
    },
    Depolarizing {
        #[serde(default = "qubit")]
        d: usize,
        lam: f64,
    },
    Dephasing {
        gamma: f64,
    },
    Identity {
        #[serde(default = "qubit")]
        d: usize,
    },
    Reset {
        #[serde(default = "qubit")]
        d: usize,
    },
}

fn qubit() -> usize {
    2
}

impl BuiltinChannel {
    pub fn build(&self) -> Result<KrausChannel> {
        match *self {
            Self::Erasure { d, eps } => KrausChannel::erasure(d, eps),
            Self::Depolarizing { d, lam } => KrausChannel::depolarizing(d, lam),
            Self::Dephasing { gamma } => KrausChannel::dephasing(gamma),
            Self::Identity { d } => Ok(KrausChannel::identity(d)),
            Self::Reset { d } => Ok(KrausChannel::reset(d)),
        }
    }
}

impl ChannelSpec {
    pub fn build(&self) -> Result<KrausChannel> {
        match self {
            Self::Builtin(b) => b.build(),
            Self::Kraus { din, dout, kraus } => {
                let ops = kraus
                    .iter()
                    .enumerate()
                    .map(|(k, entries)| {
                        let flat: Vec<C64> = match entries {
                            KrausEntries::Flat(v) => v.iter().map(|&[re, im]| C64::new(re, im)).collect(),
                            KrausEntries::Rows(rows) => {
                                if rows.iter().any(|r| r.len() != *din) {
                                    return Err(Error::Parse(format!(
                                        "Kraus operator {k}: every row needs {din} entries"
                                    )));
                                }
                                rows.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect()
                            }
                        };
                        if flat.len() != din * dout {
                            return Err(Error::Parse(format!(
                                "Kraus operator {k} has {} entries, expected {dout}x{din}",
                                flat.len()
                            )));
                        }
                        ComplexMatrix::new(*dout, *din, flat)
                    })
                    .collect::<Result<Vec<_>>>()?;
                KrausChannel::new(*din, *dout, ops)
            }
        }
    }

    /// Explicit Kraus form of a channel (flat row-major entries).
    pub fn from_channel(ch: &KrausChannel) -> Self {
        Self::Kraus {
            din: ch.din(),
            dout: ch.dout(),
            kraus: ch
                .kraus()
                .iter()
                .map(|k| KrausEntries::Flat(k.as_slice().iter().map(|z| [z.re, z.im]).collect()))
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<KrausChannel> {
        let spec: ChannelSpec =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("channel JSON: {e}")))?;
        spec.build()
    }
}
