//! Quantum Markov chain machinery: Schur-multiplier channels, the entangled
//! transition expectation, the unitary dilation of a probability vector and
//! the Szegedy walk operator.
//!
//! Stochasticity conventions: transition expectations take row-stochastic
//! matrices; hypergroup chains and the default Szegedy input are
//! column-stochastic. Every entry point validates the convention it declares.

use nalgebra::{DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::hypergroup::{Coin, Hypergroup};
use crate::parameters::trace_of_product;
use crate::scalar::{check_distribution, creal, max_abs, max_abs_real, CMatrix, RMatrix, Real};
use crate::spectral::{schur, BoseMesnerDecomposition};

/// Eigenvalues at or above `-CP_TOLERANCE` count as nonnegative.
pub const CP_TOLERANCE: f64 = 1e-10;

fn check_square<T: Real>(m: &CMatrix<T>, n: usize, what: &str) -> Result<()> {
    if m.shape() != (n, n) {
        return Err(Error::ShapeMismatch {
            expected: format!("{what} of shape ({n}, {n})"),
            found: format!("{:?}", m.shape()),
        });
    }
    Ok(())
}

fn min_hermitian_eigenvalue<T: Real>(m: CMatrix<T>) -> T {
    let eig = SymmetricEigen::new(m);
    eig.eigenvalues.iter().fold(T::max_value().unwrap_or(T::one()), |a, &b| a.min(b))
}

fn hermitian_defect<T: Real>(m: &CMatrix<T>) -> T {
    max_abs(&(m - m.adjoint()))
}

/// The channel `M ↦ e ∘ M` for a Hermitian multiplier `e`.
#[derive(Debug, Clone)]
pub struct SchurChannel<T: Real> {
    multiplier: CMatrix<T>,
}

/// How a hypergroup coin is turned into a Schur multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoinScaling {
    /// `Σ_i c_i e_i` with `e_i = E_i / m_i`. Restricted to the idempotent span
    /// this is the hypergroup chain divided by `n`.
    Idempotent,
    /// `Σ_i c_i ê_i` with `ê_i = (n / m_i) E_i`. Unit diagonal, so the channel
    /// is trace preserving and its restriction is exactly the hypergroup chain.
    UnitDiagonal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CpReport<T> {
    pub choi_min_eigenvalue: T,
    pub multiplier_min_eigenvalue: T,
    /// Choi matrix PSD within tolerance.
    pub completely_positive: bool,
    pub multiplier_psd: bool,
}

impl<T> CpReport<T> {
    /// The Choi verdict and the multiplier verdict coincide.
    pub fn verdicts_agree(&self) -> bool {
        self.completely_positive == self.multiplier_psd
    }
}

impl<T: Real> SchurChannel<T> {
    pub fn new(multiplier: CMatrix<T>) -> Result<Self> {
        let n = multiplier.nrows();
        check_square(&multiplier, n, "Schur multiplier")?;
        let scale = max_abs(&multiplier).max(T::one());
        let defect = hermitian_defect(&multiplier);
        if defect > T::tol(1e-12) * scale {
            return Err(Error::Validation(format!(
                "Schur multiplier is not Hermitian (defect {:e})",
                defect.as_f64()
            )));
        }
        Ok(Self { multiplier })
    }

    /// Multiplier built from a hypergroup coin.
    pub fn from_coin(h: &Hypergroup<T>, coin: &Coin<T>, scaling: CoinScaling) -> Result<Self> {
        let weights = coin.measure(h.size())?;
        let basis = match scaling {
            CoinScaling::Idempotent => h.normalized_idempotents().to_vec(),
            CoinScaling::UnitDiagonal => h.unit_diagonal_idempotents(),
        };
        let n = basis[0].nrows();
        let mut e = CMatrix::<T>::zeros(n, n);
        for (w, b) in weights.iter().zip(&basis) {
            e += b * creal(*w);
        }
        Self::new(e)
    }

    pub fn dim(&self) -> usize {
        self.multiplier.nrows()
    }

    pub fn multiplier(&self) -> &CMatrix<T> {
        &self.multiplier
    }

    pub fn apply(&self, m: &CMatrix<T>) -> Result<CMatrix<T>> {
        schur(&self.multiplier, m)
    }

    /// Builds the n²×n² Choi matrix `Σ_{ab} |a⟩⟨b| ⊗ T(|a⟩⟨b|)`.
    pub fn choi_matrix(&self) -> CMatrix<T> {
        let n = self.dim();
        let mut choi = CMatrix::<T>::zeros(n * n, n * n);
        for a in 0..n {
            for b in 0..n {
                let unit = CMatrix::<T>::from_fn(n, n, |r, c| {
                    if r == a && c == b {
                        creal(T::one())
                    } else {
                        creal(T::zero())
                    }
                });
                let image = self.multiplier.component_mul(&unit);
                choi.view_mut((a * n, b * n), (n, n)).copy_from(&image);
            }
        }
        choi
    }

    /// Complete positivity from the Choi matrix, cross-checked against
    /// positivity of the multiplier.
    pub fn certify_cp(&self) -> CpReport<T> {
        let tol = T::tol(CP_TOLERANCE);
        let choi_min = min_hermitian_eigenvalue(self.choi_matrix());
        let mult_min = min_hermitian_eigenvalue(self.multiplier.clone());
        CpReport {
            choi_min_eigenvalue: choi_min,
            multiplier_min_eigenvalue: mult_min,
            completely_positive: choi_min >= -tol,
            multiplier_psd: mult_min >= -tol,
        }
    }

    /// Matrix of the channel restricted to the span of `e_k = E_k / m_k`:
    /// `T(e_j) = Σ_k C[k][j] e_k`, with `C[k][j] = tr(T(e_j) E_k)`.
    ///
    /// Also returns how far `T(e_j)` falls outside the span (max-norm).
    pub fn restricted_chain(&self, dec: &BoseMesnerDecomposition<T>) -> Result<(RMatrix<T>, T)> {
        let size = dec.d() + 1;
        let n = dec.n();
        check_square(&self.multiplier, n, "Schur multiplier")?;
        let e: Vec<CMatrix<T>> = dec
            .idempotents()
            .iter()
            .zip(dec.multiplicities())
            .map(|(ek, &m)| ek * creal(T::one() / T::from_usize_lossy(m)))
            .collect();
        let mut chain = RMatrix::<T>::zeros(size, size);
        let mut leak = T::zero();
        for j in 0..size {
            let image = self.apply(&e[j])?;
            let mut recon = CMatrix::<T>::zeros(n, n);
            for k in 0..size {
                let coef = trace_of_product(&image, dec.idempotent(k));
                chain[(k, j)] = coef.re;
                recon += &e[k] * coef;
            }
            leak = leak.max(max_abs(&(image - recon)));
        }
        Ok((chain, leak))
    }
}

/// Unitary (real orthogonal) matrix whose first row is `√p`.
///
/// `U[0][j] = √p_j`, `U[i][0] = −√p_i` for `i ≥ 1`, and
/// `U[i][j] = δ_ij − √(p_i p_j) / (1 + √p_0)` for `i, j ≥ 1`.
pub fn dilation_unitary<T: Real>(p: &[T]) -> Result<RMatrix<T>> {
    check_distribution(p, 1e-12)?;
    let d = p.len();
    let roots: Vec<T> = p.iter().map(|x| x.sqrt()).collect();
    let denom = T::one() + roots[0];
    Ok(RMatrix::from_fn(d, d, |i, j| match (i, j) {
        (0, _) => roots[j],
        (_, 0) => -roots[i],
        _ => {
            let delta = if i == j { T::one() } else { T::zero() };
            delta - roots[i] * roots[j] / denom
        }
    }))
}

fn check_row_stochastic<T: Real>(p: &RMatrix<T>, tol: f64) -> Result<()> {
    if !p.is_square() || p.nrows() == 0 {
        return Err(Error::NotStochastic(format!("matrix of shape {:?} is not square", p.shape())));
    }
    for (i, row) in p.row_iter().enumerate() {
        if let Some(x) = row.iter().find(|x| (**x).partial_cmp(&T::zero()).is_none_or(|o| o.is_lt())) {
            return Err(Error::NotStochastic(format!("row {i} has negative entry {}", x.as_f64())));
        }
        let s = row.sum();
        if (s - T::one()).abs() > T::tol(tol) {
            return Err(Error::NotStochastic(format!("row {i} sums to {}", s.as_f64())));
        }
    }
    Ok(())
}

/// The entangled transition expectation `Ê(X) = V†XV` with
/// `V|e_i⟩ = Σ_j √P[i][j] |e_i⟩ ⊗ |e_j⟩`.
#[derive(Debug, Clone)]
pub struct TransitionExpectation<T: Real> {
    dim: usize,
    transition: RMatrix<T>,
    isometry: CMatrix<T>,
    sqrt_transition: RMatrix<T>,
}

impl<T: Real> TransitionExpectation<T> {
    /// `P` must be row-stochastic within 1e-12.
    pub fn new(transition: RMatrix<T>) -> Result<Self> {
        check_row_stochastic(&transition, 1e-12)?;
        let dim = transition.nrows();
        let sqrt_transition = transition.map(|x| x.sqrt());
        let mut isometry = CMatrix::<T>::zeros(dim * dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                isometry[(i * dim + j, i)] = creal(sqrt_transition[(i, j)]);
            }
        }
        Ok(Self { dim, transition, isometry, sqrt_transition })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn transition(&self) -> &RMatrix<T> {
        &self.transition
    }

    /// The d²×d isometry `V`.
    pub fn isometry(&self) -> &CMatrix<T> {
        &self.isometry
    }

    /// `‖V†V − I‖_max`.
    pub fn isometry_defect(&self) -> T {
        max_abs(&(self.isometry.adjoint() * &self.isometry - CMatrix::<T>::identity(self.dim, self.dim)))
    }

    fn check_pair(&self, m: &CMatrix<T>, n: &CMatrix<T>) -> Result<()> {
        check_square(m, self.dim, "M")?;
        check_square(n, self.dim, "N")
    }

    /// `V†(M ⊗ N)V`.
    pub fn apply(&self, m: &CMatrix<T>, n: &CMatrix<T>) -> Result<CMatrix<T>> {
        self.check_pair(m, n)?;
        Ok(self.isometry.adjoint() * m.kronecker(n) * &self.isometry)
    }

    /// Schur-product form `M ∘ G(N)` with
    /// `G(N)[i][k] = Σ_{j,l} √(P[i][j] P[k][l]) N[j][l]`.
    pub fn apply_closed_form(&self, m: &CMatrix<T>, n: &CMatrix<T>) -> Result<CMatrix<T>> {
        self.check_pair(m, n)?;
        let s = self.sqrt_transition.map(creal);
        let g = &s * n * s.transpose();
        Ok(m.component_mul(&g))
    }

    /// The predual acting on states: `ρ ↦ Tr_1[V ρ V†]`, i.e.
    /// `Tr(Φ(ρ) N) = Tr(ρ Ê(I ⊗ N))`. Its diagonal evolves as `diag(ρ)·P`.
    pub fn dual_state(&self, rho: &CMatrix<T>) -> Result<CMatrix<T>> {
        check_square(rho, self.dim, "state")?;
        let d = self.dim;
        let s = &self.sqrt_transition;
        Ok(CMatrix::from_fn(d, d, |j, l| {
            (0..d).fold(creal(T::zero()), |acc, i| acc + rho[(i, i)] * creal(s[(i, j)] * s[(i, l)]))
        }))
    }
}

/// A completely positive map acting on density matrices.
pub trait QuantumChannel<T: Real> {
    fn dim(&self) -> usize;
    fn apply_state(&self, rho: &CMatrix<T>) -> Result<CMatrix<T>>;
    /// `Err(NotCompletelyPositive)` when the map is not CP.
    fn check_completely_positive(&self) -> Result<()>;
}

impl<T: Real> QuantumChannel<T> for SchurChannel<T> {
    fn dim(&self) -> usize {
        SchurChannel::dim(self)
    }

    fn apply_state(&self, rho: &CMatrix<T>) -> Result<CMatrix<T>> {
        self.apply(rho)
    }

    fn check_completely_positive(&self) -> Result<()> {
        let report = self.certify_cp();
        if report.completely_positive {
            Ok(())
        } else {
            Err(Error::NotCompletelyPositive { min_eigenvalue: report.choi_min_eigenvalue.as_f64() })
        }
    }
}

impl<T: Real> QuantumChannel<T> for TransitionExpectation<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_state(&self, rho: &CMatrix<T>) -> Result<CMatrix<T>> {
        self.dual_state(rho)
    }

    fn check_completely_positive(&self) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ChannelTrajectory<T: Real> {
    /// `steps + 1` density matrices, starting with `rho0`.
    pub states: Vec<CMatrix<T>>,
    /// Trace of the raw channel output at each step, before renormalizing.
    pub normalization: Vec<T>,
}

/// Validates a density matrix: Hermitian, unit trace, PSD.
pub fn check_density_matrix<T: Real>(rho: &CMatrix<T>) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::InvalidState(format!("state of shape {:?} is not square", rho.shape())));
    }
    if hermitian_defect(rho) > T::tol(1e-10) {
        return Err(Error::InvalidState("state is not Hermitian".into()));
    }
    let tr = rho.trace();
    if (tr.re - T::one()).abs() > T::tol(1e-10) || tr.im.abs() > T::tol(1e-10) {
        return Err(Error::InvalidState(format!("state has trace {}", tr.re.as_f64())));
    }
    let min = min_hermitian_eigenvalue(rho.clone());
    if min < -T::tol(1e-10) {
        return Err(Error::InvalidState(format!(
            "state is not positive semidefinite (min eigenvalue {:e})",
            min.as_f64()
        )));
    }
    Ok(())
}

/// Iterates a channel from `rho0`, renormalizing to unit trace each step.
pub fn iterate_channel<T: Real, C: QuantumChannel<T> + ?Sized>(
    channel: &C,
    rho0: &CMatrix<T>,
    steps: usize,
) -> Result<ChannelTrajectory<T>> {
    check_square(rho0, channel.dim(), "initial state")?;
    check_density_matrix(rho0)?;
    channel.check_completely_positive()?;
    let mut states = Vec::with_capacity(steps + 1);
    let mut normalization = Vec::with_capacity(steps);
    states.push(rho0.clone());
    for step in 1..=steps {
        let raw = channel.apply_state(states.last().expect("non-empty"))?;
        let tr = raw.trace().re;
        if tr.abs() < T::tol(1e-14) {
            return Err(Error::AbsorbedState { step, trace: tr.as_f64() });
        }
        states.push(raw * creal(T::one() / tr));
        normalization.push(tr);
    }
    Ok(ChannelTrajectory { states, normalization })
}

/// Which index of a stochastic matrix sums to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stochastic {
    /// `D[w][v]` is the probability of `v → w`; columns sum to one.
    #[default]
    Column,
    /// `D[v][w]` is the probability of `v → w`; rows sum to one.
    Row,
}

/// Szegedy walk `U = S(2Π − I)` on the pair space of a Markov chain.
#[derive(Debug, Clone)]
pub struct WalkOperator<T: Real> {
    dim_v: usize,
    transition: RMatrix<T>,
    a_op: RMatrix<T>,
    projector: RMatrix<T>,
    swap: RMatrix<T>,
    unitary: RMatrix<T>,
}

impl<T: Real> WalkOperator<T> {
    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    /// Column-stochastic form of the input chain.
    pub fn transition(&self) -> &RMatrix<T> {
        &self.transition
    }

    /// `A|v⟩ = Σ_w √D[w][v] |v, w⟩`, an n²×n isometry; pair `(v, w)` sits at
    /// row `v·n + w`.
    pub fn a_op(&self) -> &RMatrix<T> {
        &self.a_op
    }

    pub fn projector(&self) -> &RMatrix<T> {
        &self.projector
    }

    pub fn swap(&self) -> &RMatrix<T> {
        &self.swap
    }

    pub fn unitary(&self) -> &RMatrix<T> {
        &self.unitary
    }

    /// `‖A†A − I‖_max`.
    pub fn isometry_defect(&self) -> T {
        max_abs_real(&(self.a_op.transpose() * &self.a_op - RMatrix::identity(self.dim_v, self.dim_v)))
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_defect(&self) -> T {
        let m = self.unitary.nrows();
        max_abs_real(&(self.unitary.transpose() * &self.unitary - RMatrix::identity(m, m)))
    }

    /// `‖Π² − Π‖_max`.
    pub fn projector_defect(&self) -> T {
        max_abs_real(&(&self.projector * &self.projector - &self.projector))
    }

    /// `A·√π` for a distribution `π` on the vertices.
    pub fn lift(&self, pi: &[T]) -> DVector<T> {
        let roots = DVector::from_iterator(pi.len(), pi.iter().map(|x| x.max(T::zero()).sqrt()));
        &self.a_op * roots
    }

    /// How far `span{A|v⟩, S A|v⟩}` is from being invariant under `U`.
    pub fn invariant_subspace_residual(&self) -> T {
        let sa = &self.swap * &self.a_op;
        let cols: Vec<_> = self.a_op.column_iter().chain(sa.column_iter()).collect();
        let basis = RMatrix::from_columns(&cols);
        // orthonormal basis of the span via SVD
        let svd = basis.clone().svd(true, false);
        let u = svd.u.expect("left singular vectors");
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > T::tol(1e-10))
            .count();
        let q = u.columns(0, rank).into_owned();
        let image = &self.unitary * basis;
        let proj = &q * (q.transpose() * &image);
        max_abs_real(&(image - proj))
    }
}

/// Builds the Szegedy walk for a stochastic matrix under the declared
/// convention (validated within 1e-12).
pub fn szegedy_walk<T: Real>(d: &RMatrix<T>, convention: Stochastic) -> Result<WalkOperator<T>> {
    let col = match convention {
        Stochastic::Column => d.clone(),
        Stochastic::Row => d.transpose(),
    };
    check_row_stochastic(&col.transpose(), 1e-12).map_err(|e| match e {
        Error::NotStochastic(msg) => Error::NotStochastic(format!(
            "{} convention: {}",
            if convention == Stochastic::Column { "column" } else { "row" },
            msg.replace("row", "line")
        )),
        other => other,
    })?;
    let n = col.nrows();
    let mut a_op = RMatrix::<T>::zeros(n * n, n);
    for v in 0..n {
        for w in 0..n {
            a_op[(v * n + w, v)] = col[(w, v)].sqrt();
        }
    }
    let projector = &a_op * a_op.transpose();
    let mut swap = RMatrix::<T>::zeros(n * n, n * n);
    for v in 0..n {
        for w in 0..n {
            swap[(w * n + v, v * n + w)] = T::one();
        }
    }
    let reflection = &projector * T::lit(2.0) - RMatrix::identity(n * n, n * n);
    let unitary = &swap * reflection;
    Ok(WalkOperator { dim_v: n, transition: col, a_op, projector, swap, unitary })
}

/// Stationary distribution of a column-stochastic matrix, by solving
/// `(D − I)π = 0` with `Σπ = 1`. Fails if the fixed point is not unique.
pub fn stationary_distribution<T: Real>(d: &RMatrix<T>) -> Result<Vec<T>> {
    let n = d.nrows();
    let mut a = d - RMatrix::<T>::identity(n, n);
    a.row_mut(n - 1).fill(T::one());
    let mut rhs = DVector::<T>::zeros(n);
    rhs[n - 1] = T::one();
    let pi = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical { what: "stationary distribution is not unique".into(), residual: f64::NAN })?;
    Ok(pi.iter().copied().collect())
}
