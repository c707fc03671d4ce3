//! Truncated-Fock-basis operators for the quantized chiral oscillator, its
//! Chern-Simons partner, and the two-mode Landau composite.
//!
//! The chiral-oscillator coordinates close on `[x1, x2] = -i hbar / g`
//! (with `eps_12 = +1`), so they are realized on a single oscillator mode.
//! Setting `a = sqrt(g / 2 hbar) (x1 - i x2)` gives
//!
//! ```text
//! [a, a^dag] = (g / 2 hbar) (2 i [x1, x2]) = (g / 2 hbar)(2 hbar / g) = +1,
//! ```
//!
//! so inverting,
//!
//! ```text
//! x1 = sqrt(hbar / 2g) (a + a^dag)        x2 = i sqrt(hbar / 2g) (a - a^dag).
//! ```
//!
//! The Chern-Simons sector has the opposite commutator sign,
//! `[x1, x2] = +i hbar / g`, realized the same way with `b = sqrt(g / 2
//! hbar) (x1 + i x2)`. Hamiltonians and angular momenta are built from these
//! coordinate matrices and diagonalized numerically; their diagonality is a
//! test result, never an input.
//!
//! # Truncation edge
//!
//! In a basis truncated at `dim`, `a a^dag` is wrong in its last diagonal
//! entry (0 instead of `dim`), so `H+` picks up a spurious eigenvalue
//! `hbar omega (dim-1)/2` that can collide with genuine low-lying levels
//! (at `dim = 8` it equals the `n = 3` eigenvalue exactly). Sorting alone
//! therefore cannot separate good eigenvalues from artifacts; the trusted
//! spectrum is instead extracted by discarding every eigenvector with
//! majority support on the top two Fock states of any mode, which leaves
//! exactly `dim - 2` trusted single-mode states.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::csvfmt::{build_csv, fmt_f64};
use crate::error::{CoreError, Result};
use crate::params::ModelParams;
use crate::C64;

const I: C64 = C64::new(0.0, 1.0);

/// Which Hilbert space a matrix lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisTag {
    /// One oscillator mode, Fock states `|0>..|dim-1>`.
    SingleMode { dim: usize },
    /// Plus-sector (x) minus-sector, plus-major index
    /// `n = n_plus * dim_minus + n_minus`.
    TwoMode { dim_plus: usize, dim_minus: usize },
}

impl BasisTag {
    pub fn dim(&self) -> usize {
        match *self {
            BasisTag::SingleMode { dim } => dim,
            BasisTag::TwoMode { dim_plus, dim_minus } => dim_plus * dim_minus,
        }
    }

    /// True when a basis index touches the top two Fock states of any mode.
    fn is_edge_index(&self, idx: usize) -> bool {
        match *self {
            BasisTag::SingleMode { dim } => idx + 2 >= dim,
            BasisTag::TwoMode { dim_plus, dim_minus } => {
                let (np, nm) = (idx / dim_minus, idx % dim_minus);
                np + 2 >= dim_plus || nm + 2 >= dim_minus
            }
        }
    }
}

/// Dense complex operator in a truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    basis: BasisTag,
    entries: DMatrix<C64>,
}

impl OperatorMatrix {
    pub fn from_matrix(entries: DMatrix<C64>, basis: BasisTag) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(CoreError::DimensionMismatch(format!(
                "operator must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.nrows() != basis.dim() {
            return Err(CoreError::DimensionMismatch(format!(
                "matrix dimension {} does not match basis dimension {}",
                entries.nrows(),
                basis.dim()
            )));
        }
        Ok(OperatorMatrix { basis, entries })
    }

    pub fn identity(basis: BasisTag) -> Self {
        let d = basis.dim();
        OperatorMatrix { basis, entries: DMatrix::identity(d, d) }
    }

    pub fn zeros(basis: BasisTag) -> Self {
        let d = basis.dim();
        OperatorMatrix { basis, entries: DMatrix::zeros(d, d) }
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &BasisTag {
        &self.basis
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn matrix_element(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        OperatorMatrix { basis: self.basis, entries: self.entries.adjoint() }
    }

    pub fn scale(&self, c: C64) -> Self {
        OperatorMatrix { basis: self.basis, entries: &self.entries * c }
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    fn check_basis(&self, other: &Self) -> Result<()> {
        if self.basis != other.basis {
            return Err(CoreError::DimensionMismatch(format!(
                "basis mismatch: {:?} vs {:?}",
                self.basis, other.basis
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_basis(other)?;
        Ok(OperatorMatrix { basis: self.basis, entries: &self.entries + &other.entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_basis(other)?;
        Ok(OperatorMatrix { basis: self.basis, entries: &self.entries - &other.entries })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_basis(other)?;
        Ok(OperatorMatrix { basis: self.basis, entries: &self.entries * &other.entries })
    }

    /// `[self, other] = self other - other self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check_basis(other)?;
        Ok(OperatorMatrix {
            basis: self.basis,
            entries: &self.entries * &other.entries - &other.entries * &self.entries,
        })
    }

    /// Tensor product of two single-mode operators, plus-major ordering
    /// (`self` is the plus factor).
    pub fn kron(&self, other: &Self) -> Result<Self> {
        let (BasisTag::SingleMode { dim: dp }, BasisTag::SingleMode { dim: dm }) =
            (self.basis, other.basis)
        else {
            return Err(CoreError::DimensionMismatch(
                "kron expects two single-mode operators".into(),
            ));
        };
        Ok(OperatorMatrix {
            basis: BasisTag::TwoMode { dim_plus: dp, dim_minus: dm },
            entries: self.entries.kronecker(&other.entries),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A - A^dag|` over all entries.
    pub fn hermiticity_error(&self) -> f64 {
        let adj = self.entries.adjoint();
        (&self.entries - adj).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |U U^dag - 1|` over all entries.
    pub fn unitarity_error(&self) -> f64 {
        let d = self.dim();
        let prod = &self.entries * self.entries.adjoint();
        (prod - DMatrix::<C64>::identity(d, d))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest off-diagonal magnitude; the diagonality witness for the
    /// constructed Hamiltonians.
    pub fn max_offdiag(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if i != j {
                    worst = worst.max(self.entries[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// Hermitian eigendecomposition `(eigenvalues, eigenvectors)`, columns
    /// matching eigenvalue order. Rejects operators that are not Hermitian
    /// to `1e-10 * (1 + max |A|)`.
    pub fn hermitian_eigen(&self) -> Result<(DVector<f64>, DMatrix<C64>)> {
        let herm = self.hermiticity_error();
        if herm > 1e-10 * (1.0 + self.max_abs()) {
            return Err(CoreError::NonHermitian(herm));
        }
        let se = self.entries.clone().symmetric_eigen();
        Ok((se.eigenvalues, se.eigenvectors))
    }

    /// `V f(Lambda) V^dag` through the Hermitian eigendecomposition. All
    /// operator functions in this crate (rotations, Gibbs weights) go
    /// through here; no power series anywhere.
    pub fn apply_spectral_fn(&self, f: impl Fn(f64) -> C64) -> Result<OperatorMatrix> {
        let (vals, vecs) = self.hermitian_eigen()?;
        let diag = DMatrix::from_diagonal(&vals.map(f));
        Ok(OperatorMatrix { basis: self.basis, entries: &vecs * diag * vecs.adjoint() })
    }

    /// Sorted spectrum with the truncation-edge bookkeeping.
    ///
    /// An eigenvalue is trusted when its eigenvector has minority support
    /// on the edge subspace; the count is additionally capped by the
    /// number of non-edge basis states, so `trusted_count < dim` for any
    /// Hermitian input however scrambled its eigenvectors are.
    pub fn spectrum(&self) -> Result<SpectrumReport> {
        let (vals, vecs) = self.hermitian_eigen()?;
        let dim = self.dim();
        let mut all: Vec<f64> = vals.iter().copied().collect();

        let edge: Vec<usize> = (0..dim).filter(|&i| self.basis.is_edge_index(i)).collect();
        let interior_dim = dim - edge.len();
        let mut candidates: Vec<(f64, f64)> = vals
            .iter()
            .enumerate()
            .map(|(j, &lambda)| {
                let weight: f64 = edge.iter().map(|&i| vecs[(i, j)].norm_sqr()).sum();
                (weight, lambda)
            })
            .filter(|(weight, _)| *weight < 0.5)
            .collect();
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
        candidates.truncate(interior_dim);
        let mut trusted: Vec<f64> = candidates.into_iter().map(|(_, l)| l).collect();

        all.sort_by(f64::total_cmp);
        trusted.sort_by(f64::total_cmp);
        Ok(SpectrumReport {
            trusted_count: trusted.len(),
            truncation_dim: dim,
            eigenvalues: all,
            trusted,
        })
    }

    /// Debug dump: dimension, basis tag and row-major `[re, im]` entries.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Dump<'a> {
            dim: usize,
            basis: &'a BasisTag,
            entries: Vec<[f64; 2]>,
        }
        let entries = (0..self.dim())
            .flat_map(|i| (0..self.dim()).map(move |j| (i, j)))
            .map(|(i, j)| {
                let z = self.entries[(i, j)];
                [z.re, z.im]
            })
            .collect();
        serde_json::to_string_pretty(&Dump { dim: self.dim(), basis: &self.basis, entries })
            .expect("serializable")
    }
}

/// Sorted eigenvalues plus the subset untouched by the truncation edge.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    /// Every eigenvalue, ascending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvalues whose eigenvectors avoid the truncation edge, ascending.
    pub trusted: Vec<f64>,
    pub trusted_count: usize,
    pub truncation_dim: usize,
}

impl SpectrumReport {
    /// CSV export: `index,eigenvalue` over the full sorted spectrum.
    pub fn to_csv(&self) -> String {
        build_csv(
            "index,eigenvalue",
            self.eigenvalues
                .iter()
                .enumerate()
                .map(|(i, ev)| vec![i.to_string(), fmt_f64(*ev)]),
        )
    }
}

/// Annihilation / creation pair on a `dim`-dimensional Fock space:
/// `a|n> = sqrt(n)|n-1>`.
pub fn ladder(dim: usize) -> Result<(OperatorMatrix, OperatorMatrix)> {
    if dim < 2 {
        return Err(CoreError::InvalidParams(format!("need dim >= 2, got {dim}")));
    }
    let mut a = DMatrix::<C64>::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    let basis = BasisTag::SingleMode { dim };
    let adag = a.adjoint();
    Ok((
        OperatorMatrix { basis, entries: a },
        OperatorMatrix { basis, entries: adag },
    ))
}

/// Chiral-oscillator coordinate pair with `[x1, x2] = -i hbar / g` away
/// from the truncation edge (see the module docs for the derivation).
pub fn co_coordinates(params: &ModelParams, dim: usize) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let (a, adag) = ladder(dim)?;
    let scale = C64::from((params.hbar / (2.0 * params.g)).sqrt());
    let x1 = a.add(&adag)?.scale(scale);
    let x2 = a.sub(&adag)?.scale(I * scale);
    Ok((x1, x2))
}

/// Chern-Simons-sector coordinate pair with the opposite commutator,
/// `[x1, x2] = +i hbar / g`.
pub fn cs_coordinates(params: &ModelParams, dim: usize) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let (b, bdag) = ladder(dim)?;
    let scale = C64::from((params.hbar / (2.0 * params.g)).sqrt());
    let x1 = b.add(&bdag)?.scale(scale);
    let x2 = b.sub(&bdag)?.scale(-I * scale);
    Ok((x1, x2))
}

/// `H+ = (k/2)(x1^2 + x2^2)`, assembled from the coordinate matrices.
pub fn co_hamiltonian(params: &ModelParams, dim: usize) -> Result<OperatorMatrix> {
    let (x1, x2) = co_coordinates(params, dim)?;
    Ok(x1.mul(&x1)?.add(&x2.mul(&x2)?)?.scale(C64::from(params.k / 2.0)))
}

/// `M+ = H+ / omega`, the plus-sector angular momentum.
pub fn co_angular_momentum(params: &ModelParams, dim: usize) -> Result<OperatorMatrix> {
    Ok(co_hamiltonian(params, dim)?.scale(C64::from(1.0 / params.omega_co())))
}

/// The Chern-Simons sector carries no energy at all.
pub fn cs_hamiltonian(dim: usize) -> Result<OperatorMatrix> {
    if dim < 2 {
        return Err(CoreError::InvalidParams(format!("need dim >= 2, got {dim}")));
    }
    Ok(OperatorMatrix::zeros(BasisTag::SingleMode { dim }))
}

/// `M- = -(g/2)(x1^2 + x2^2)` on the minus-sector coordinates; spectrum
/// `-hbar (n + 1/2)` away from the edge.
pub fn cs_angular_momentum(params: &ModelParams, dim: usize) -> Result<OperatorMatrix> {
    let (x1, x2) = cs_coordinates(params, dim)?;
    Ok(x1.mul(&x1)?.add(&x2.mul(&x2)?)?.scale(C64::from(-params.g / 2.0)))
}

/// Landau-model operators on the plus (x) minus product space:
/// `H_LM = H+ (x) 1` and `M_LM = M+ (x) 1 + 1 (x) M-`.
pub fn lm_operators(
    params: &ModelParams,
    dim_plus: usize,
    dim_minus: usize,
) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let h_plus = co_hamiltonian(params, dim_plus)?;
    let m_plus = co_angular_momentum(params, dim_plus)?;
    let m_minus = cs_angular_momentum(params, dim_minus)?;
    let id_plus = OperatorMatrix::identity(BasisTag::SingleMode { dim: dim_plus });
    let id_minus = OperatorMatrix::identity(BasisTag::SingleMode { dim: dim_minus });

    let h_lm = h_plus.kron(&id_minus)?;
    let m_lm = m_plus.kron(&id_minus)?.add(&id_plus.kron(&m_minus)?)?;
    Ok((h_lm, m_lm))
}

/// Rotation operator `U = exp(i alpha M / hbar)`, computed by
/// eigendecomposition of the Hermitian generator.
pub fn rotation_operator(m: &OperatorMatrix, alpha: f64, hbar: f64) -> Result<OperatorMatrix> {
    m.apply_spectral_fn(|lambda| (I * C64::from(alpha * lambda / hbar)).exp())
}

/// Gibbs state `rho = exp(-beta H) / Tr exp(-beta H)`.
///
/// Errors out when the truncated basis is too small to hold the thermal
/// population: the neglected tail beyond the top level is bounded by the
/// top Boltzmann weight times the geometric factor of the top level gap,
/// and must stay below `1e-12` of the partition sum.
pub fn thermal_state(h: &OperatorMatrix, beta: f64) -> Result<QuantumState> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(CoreError::InvalidParams(format!("need beta > 0, got {beta}")));
    }
    let (vals, vecs) = h.hermitian_eigen()?;
    let mut sorted: Vec<f64> = vals.iter().copied().collect();
    sorted.sort_by(f64::total_cmp);
    let lam0 = sorted[0];
    let lam_top = sorted[sorted.len() - 1];
    // Smallest level spacing that is not a rounding-scale degeneracy (the
    // truncation artifact can collide with a genuine level to ~1e-13).
    let scale = 1.0 + lam_top.abs().max(lam0.abs());
    let gap = sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&d| d > 1e-9 * scale)
        .fold(f64::INFINITY, f64::min);
    if !gap.is_finite() {
        return Err(CoreError::InvalidParams(
            "thermal state needs a non-degenerate spectrum span".into(),
        ));
    }
    let z: f64 = vals.iter().map(|&l| (-beta * (l - lam0)).exp()).sum();
    let r = (-beta * gap).exp();
    let tail = (-beta * (lam_top - lam0)).exp() * r / (1.0 - r);
    if tail > 1e-12 * z {
        return Err(CoreError::TruncationTail { tail: tail / z, limit: 1e-12 });
    }

    let weights = vals.map(|l| C64::from((-beta * (l - lam0)).exp() / z));
    let rho = &vecs * DMatrix::from_diagonal(&weights) * vecs.adjoint();
    QuantumState::from_density(rho, *h.basis())
}

/// Density operator over a tagged basis: Hermitian, unit trace, positive
/// semidefinite.
#[derive(Debug, Clone)]
pub struct QuantumState {
    density: DMatrix<C64>,
    basis: BasisTag,
}

impl QuantumState {
    pub fn from_density(density: DMatrix<C64>, basis: BasisTag) -> Result<Self> {
        if density.nrows() != density.ncols() || density.nrows() != basis.dim() {
            return Err(CoreError::DimensionMismatch(format!(
                "density {}x{} does not fit basis dimension {}",
                density.nrows(),
                density.ncols(),
                basis.dim()
            )));
        }
        let state = QuantumState { density, basis };
        state.validate()?;
        Ok(state)
    }

    fn validate(&self) -> Result<()> {
        let tr = self.density.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(CoreError::InvalidState(format!("trace {tr} != 1")));
        }
        let herm = (&self.density - self.density.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm > 1e-14 {
            return Err(CoreError::NonHermitian(herm));
        }
        let eigen = self.density.clone().symmetric_eigen();
        if let Some(min) = eigen.eigenvalues.iter().copied().reduce(f64::min) {
            if min < -1e-12 {
                return Err(CoreError::InvalidState(format!(
                    "density has negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(())
    }

    /// Fock ground-state projector `|0><0|`.
    pub fn pure_ground(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(CoreError::InvalidParams(format!("need dim >= 2, got {dim}")));
        }
        let mut rho = DMatrix::<C64>::zeros(dim, dim);
        rho[(0, 0)] = C64::from(1.0);
        Ok(QuantumState { density: rho, basis: BasisTag::SingleMode { dim } })
    }

    /// Classical mixture of basis states with the given populations
    /// (normalized here), e.g. a fully dephased two-level pair.
    pub fn diagonal_mixture(populations: &[f64], basis: BasisTag) -> Result<Self> {
        let d = basis.dim();
        if populations.len() > d {
            return Err(CoreError::DimensionMismatch(format!(
                "{} populations exceed basis dimension {}",
                populations.len(),
                d
            )));
        }
        if populations.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(CoreError::InvalidState("populations must be >= 0".into()));
        }
        let total: f64 = populations.iter().sum();
        if total <= 0.0 {
            return Err(CoreError::InvalidState("populations must not all vanish".into()));
        }
        let mut rho = DMatrix::<C64>::zeros(d, d);
        for (n, p) in populations.iter().enumerate() {
            rho[(n, n)] = C64::from(p / total);
        }
        Ok(QuantumState { density: rho, basis })
    }

    /// Joint ground state `|0+, 0->` of the two-mode Landau space.
    pub fn lm_joint_ground(dim_plus: usize, dim_minus: usize) -> Result<Self> {
        if dim_plus < 2 || dim_minus < 2 {
            return Err(CoreError::InvalidParams("need both dims >= 2".into()));
        }
        let d = dim_plus * dim_minus;
        let mut rho = DMatrix::<C64>::zeros(d, d);
        rho[(0, 0)] = C64::from(1.0); // plus-major index (0,0) -> 0
        Ok(QuantumState { density: rho, basis: BasisTag::TwoMode { dim_plus, dim_minus } })
    }

    pub fn density(&self) -> &DMatrix<C64> {
        &self.density
    }

    pub fn basis(&self) -> &BasisTag {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Population of the basis state `n`.
    pub fn population(&self, n: usize) -> f64 {
        self.density[(n, n)].re
    }

    /// Expectation value `Tr(A rho)`.
    pub fn expectation(&self, op: &OperatorMatrix) -> Result<C64> {
        if op.basis() != &self.basis {
            return Err(CoreError::DimensionMismatch(format!(
                "operator basis {:?} does not match state basis {:?}",
                op.basis(),
                self.basis
            )));
        }
        let d = self.dim();
        let mut sum = C64::from(0.0);
        for i in 0..d {
            for j in 0..d {
                sum += op.entries()[(i, j)] * self.density[(j, i)];
            }
        }
        Ok(sum)
    }
}

/// Random density matrix `G G^dag / Tr(G G^dag)` with Gaussian-free uniform
/// complex entries; deterministic given the generator state.
pub fn random_density_matrix(dim: usize, rng: &mut impl Rng) -> Result<QuantumState> {
    if dim < 2 {
        return Err(CoreError::InvalidParams(format!("need dim >= 2, got {dim}")));
    }
    let g = DMatrix::<C64>::from_fn(dim, dim, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let mut rho = &g * g.adjoint();
    // Exact Hermitian symmetrization so validation tolerances hold no
    // matter how the products round.
    let adj = rho.adjoint();
    rho = (rho + adj) * C64::from(0.5);
    let tr = rho.trace().re;
    QuantumState::from_density(rho / C64::from(tr), BasisTag::SingleMode { dim })
}

/// Random unitary `exp(i H)` with `H` a random Hermitian matrix.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> Result<OperatorMatrix> {
    if dim < 2 {
        return Err(CoreError::InvalidParams(format!("need dim >= 2, got {dim}")));
    }
    let g = DMatrix::<C64>::from_fn(dim, dim, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let h = (&g + g.adjoint()) * C64::from(0.5);
    let herm = OperatorMatrix::from_matrix(h, BasisTag::SingleMode { dim })?;
    herm.apply_spectral_fn(|lambda| (I * C64::from(lambda)).exp())
}
