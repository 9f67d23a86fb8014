//! The commutative hypergroup carried by the normalized idempotents
//! `e_j = E_j / m_j`, and the classical Markov chain it induces.
//!
//! Convolution weights are `(e_i * e_j)(k) = (m_k / (m_i m_j)) · q_{ij}^k`.
//! Under the convention `E_i ∘ E_j = (1/n) Σ_k q_{ij}^k E_k` the trace identity
//! `Σ_k m_k q_{ij}^k = m_i m_j` makes these weights sum to one. Note that no
//! extra factor `1/n` appears in the weights.
//!
//! With `e_j = E_j / m_j` the Schur product expands as
//! `e_i ∘ e_j = (1/n) Σ_k (e_i * e_j)(k) e_k`. The rescaled basis
//! `ê_j = (n / m_j) E_j` has unit diagonal (`ê_0 = J`, the Schur unit) and
//! satisfies `ê_i ∘ ê_j = Σ_k (e_i * e_j)(k) ê_k` exactly.

use crate::error::{Error, Result};
use crate::parameters::KreinTensor;
use crate::scalar::{check_distribution, creal, max_abs, CMatrix, RMatrix, Real};
use crate::spectral::BoseMesnerDecomposition;

/// Negative weights down to this magnitude are float noise and clamp to zero;
/// anything more negative is an error.
pub const NEGATIVE_ERROR: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct Hypergroup<T: Real> {
    size: usize,
    convolution: Vec<Vec<Vec<T>>>,
    multiplicities: Vec<usize>,
    normalized_idempotents: Vec<CMatrix<T>>,
}

/// The measure a hypergroup walk convolves with at each step.
#[derive(Debug, Clone, PartialEq)]
pub enum Coin<T> {
    /// A single basis element `e_i`.
    Index(usize),
    /// A convex combination of the basis elements.
    Weights(Vec<T>),
}

impl<T: Real> Coin<T> {
    /// The coin as a probability vector over `0..size`.
    pub fn measure(&self, size: usize) -> Result<Vec<T>> {
        match self {
            Coin::Index(i) if *i < size => {
                let mut v = vec![T::zero(); size];
                v[*i] = T::one();
                Ok(v)
            }
            Coin::Index(i) => Err(Error::InvalidDistribution(format!(
                "coin index {i} out of range 0..{size}"
            ))),
            Coin::Weights(w) => {
                if w.len() != size {
                    return Err(Error::InvalidDistribution(format!(
                        "coin has {} weights, expected {size}",
                        w.len()
                    )));
                }
                check_distribution(w, 1e-10)?;
                Ok(w.clone())
            }
        }
    }
}

impl<T: Real> Hypergroup<T> {
    pub fn size(&self) -> usize {
        self.size
    }

    /// `(e_i * e_j)(k)`.
    pub fn weight(&self, i: usize, j: usize, k: usize) -> T {
        self.convolution[i][j][k]
    }

    pub fn convolution(&self) -> &[Vec<Vec<T>>] {
        &self.convolution
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn normalized_idempotents(&self) -> &[CMatrix<T>] {
        &self.normalized_idempotents
    }

    /// The Plancherel measure `k ↦ m_k / n`.
    pub fn plancherel(&self) -> Vec<T> {
        let n: usize = self.multiplicities.iter().sum();
        let nn = T::from_usize_lossy(n);
        self.multiplicities.iter().map(|&m| T::from_usize_lossy(m) / nn).collect()
    }

    /// `ê_j = (n / m_j) E_j`, the unit-diagonal scaling of the idempotents.
    pub fn unit_diagonal_idempotents(&self) -> Vec<CMatrix<T>> {
        let n = T::from_usize_lossy(self.normalized_idempotents[0].nrows());
        self.normalized_idempotents.iter().map(|e| e * creal(n)).collect()
    }

    /// `max_{i,j} ‖ê_i ∘ ê_j − Σ_k (e_i * e_j)(k) ê_k‖_max`, equivalently
    /// `n · max_{i,j} ‖e_i ∘ e_j − (1/n) Σ_k (e_i * e_j)(k) e_k‖_max`.
    pub fn consistency_residual(&self) -> T {
        let e = self.unit_diagonal_idempotents();
        let n = e[0].nrows();
        let mut worst = T::zero();
        for i in 0..self.size {
            for j in 0..self.size {
                let mut rhs = CMatrix::<T>::zeros(n, n);
                for (k, ek) in e.iter().enumerate() {
                    rhs += ek * creal(self.convolution[i][j][k]);
                }
                worst = worst.max(max_abs(&(e[i].component_mul(&e[j]) - rhs)));
            }
        }
        worst
    }
}

/// Builds the hypergroup from a decomposition and its Krein tensor.
pub fn hypergroup_from<T: Real>(
    dec: &BoseMesnerDecomposition<T>,
    q: &KreinTensor<T>,
) -> Result<Hypergroup<T>> {
    let size = dec.d() + 1;
    if q.d() + 1 != size {
        return Err(Error::ShapeMismatch {
            expected: format!("Krein tensor with {size} classes"),
            found: format!("{} classes", q.d() + 1),
        });
    }
    let m: Vec<T> = dec.multiplicities().iter().map(|&x| T::from_usize_lossy(x)).collect();
    let hard = T::tol(NEGATIVE_ERROR);
    let mut convolution = vec![vec![vec![T::zero(); size]; size]; size];
    for i in 0..size {
        for j in 0..size {
            let mut total = T::zero();
            for k in 0..size {
                let mut w = m[k] / (m[i] * m[j]) * q.get(i, j, k);
                if w < -hard {
                    return Err(Error::Inconsistent(format!(
                        "(e_{i} * e_{j})({k}) = {:e} is negative",
                        w.as_f64()
                    )));
                }
                if w < T::zero() {
                    w = T::zero();
                }
                convolution[i][j][k] = w;
                total += w;
            }
            let dev = (total - T::one()).abs();
            if dev > T::tol(1e-8) {
                return Err(Error::Inconsistent(format!(
                    "slice (e_{i} * e_{j}) sums to {} instead of 1",
                    total.as_f64()
                )));
            }
            if i == 0 || j == 0 {
                // e_0 is the identity; snap the computed slice once it agrees
                let other = i + j;
                for k in 0..size {
                    let exact = if k == other { T::one() } else { T::zero() };
                    if (convolution[i][j][k] - exact).abs() > T::tol(1e-8) {
                        return Err(Error::Inconsistent(format!(
                            "e_0 is not an identity: (e_{i} * e_{j})({k}) = {:e}",
                            convolution[i][j][k].as_f64()
                        )));
                    }
                    convolution[i][j][k] = exact;
                }
            }
        }
    }
    let normalized_idempotents = dec
        .idempotents()
        .iter()
        .zip(&m)
        .map(|(e, &mj)| e * creal(T::one() / mj))
        .collect();
    Ok(Hypergroup {
        size,
        convolution,
        multiplicities: dec.multiplicities().to_vec(),
        normalized_idempotents,
    })
}

/// `(μ * ν)(k) = Σ_{i,j} μ(i) ν(j) (e_i * e_j)(k)`.
pub fn convolve<T: Real>(h: &Hypergroup<T>, mu: &[T], nu: &[T]) -> Result<Vec<T>> {
    for (name, v) in [("mu", mu), ("nu", nu)] {
        if v.len() != h.size {
            return Err(Error::InvalidDistribution(format!(
                "{name} has length {}, expected {}",
                v.len(),
                h.size
            )));
        }
        check_distribution(v, 1e-10)?;
    }
    let mut out = vec![T::zero(); h.size];
    for (i, &a) in mu.iter().enumerate() {
        for (j, &b) in nu.iter().enumerate() {
            let ab = a * b;
            if ab == T::zero() {
                continue;
            }
            for (k, slot) in out.iter_mut().enumerate() {
                *slot += ab * h.convolution[i][j][k];
            }
        }
    }
    Ok(out)
}

/// Column-stochastic transition matrix of convolution by the coin:
/// `T[k][j] = Σ_i coin(i) (e_i * e_j)(k)`.
pub fn classical_chain<T: Real>(h: &Hypergroup<T>, coin: &Coin<T>) -> Result<RMatrix<T>> {
    let c = coin.measure(h.size)?;
    Ok(RMatrix::from_fn(h.size, h.size, |k, j| {
        c.iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, &ci)| acc + ci * h.convolution[i][j][k])
    }))
}

/// Distributions `start, T·start, T²·start, …` (`steps + 1` entries).
pub fn walk<T: Real>(h: &Hypergroup<T>, coin: &Coin<T>, start: &[T], steps: usize) -> Result<Vec<Vec<T>>> {
    if start.len() != h.size {
        return Err(Error::InvalidDistribution(format!(
            "start has length {}, expected {}",
            start.len(),
            h.size
        )));
    }
    check_distribution(start, 1e-10)?;
    let t = classical_chain(h, coin)?;
    let mut current = nalgebra::DVector::from_column_slice(start);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(start.to_vec());
    for _ in 0..steps {
        current = &t * current;
        out.push(current.iter().copied().collect());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use crate::parameters::krein_parameters;
    use crate::scheme::{build_group_scheme, build_johnson, AssociationScheme};
    use crate::spectral::decompose;

    fn hg(s: &AssociationScheme) -> Hypergroup<f64> {
        let dec = decompose::<f64>(s).unwrap();
        let q = krein_parameters(&dec).unwrap();
        hypergroup_from(&dec, &q).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn z2_hypergroup_is_the_group() {
        let h = hg(&build_group_scheme(&FiniteGroup::cyclic(2).unwrap()));
        assert!(close(&h.convolution()[1][1], &[1.0, 0.0], 1e-12));
        assert!(close(&convolve(&h, &[0.0, 1.0], &[0.0, 1.0]).unwrap(), &[1.0, 0.0], 1e-12));
        let t = classical_chain(&h, &Coin::Index(1)).unwrap();
        assert!((t - RMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).abs().max() < 1e-12);
    }

    #[test]
    fn z3_hypergroup_is_group_like() {
        let h = hg(&build_group_scheme(&FiniteGroup::cyclic(3).unwrap()));
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let expected = if k == (i + j) % 3 { 1.0 } else { 0.0 };
                    assert!((h.weight(i, j, k) - expected).abs() < 1e-10);
                }
            }
        }
        let u = [1.0 / 3.0; 3];
        assert!(close(&convolve(&h, &u, &u).unwrap(), &u, 1e-12));
    }

    #[test]
    fn identity_laws() {
        let h = hg(&build_johnson(5, 2).unwrap());
        for j in 0..3 {
            for k in 0..3 {
                assert!((h.weight(0, j, k) - f64::from(u8::from(j == k))).abs() < 1e-10);
            }
        }
        let nu = [0.2, 0.5, 0.3];
        assert!(close(&convolve(&h, &[1.0, 0.0, 0.0], &nu).unwrap(), &nu, 1e-10));
        let t = classical_chain(&h, &Coin::Index(0)).unwrap();
        assert!((t - RMatrix::identity(3, 3)).abs().max() < 1e-10);
        assert!(h.consistency_residual() < 1e-9);
    }

    #[test]
    fn johnson_chain_fixes_plancherel() {
        let h = hg(&build_johnson(4, 2).unwrap());
        let t = classical_chain(&h, &Coin::Index(1)).unwrap();
        for j in 0..3 {
            assert!((t.column(j).sum() - 1.0).abs() < 1e-10);
        }
        // independent fixed-point solve: null vector of (T - I) with the last
        // equation replaced by normalization
        let mut a = &t - RMatrix::identity(3, 3);
        a.row_mut(2).fill(1.0);
        let pi = a.lu().solve(&nalgebra::DVector::from_vec(vec![0.0, 0.0, 1.0])).unwrap();
        assert!(close(pi.as_slice(), &[1.0 / 6.0, 0.5, 1.0 / 3.0], 1e-10));
        assert!(close(&h.plancherel(), &[1.0 / 6.0, 0.5, 1.0 / 3.0], 1e-15));
        let fixed = &t * nalgebra::DVector::from_vec(h.plancherel());
        assert!(close(fixed.as_slice(), &h.plancherel(), 1e-12));
    }

    #[test]
    fn johnson_coin_one_walk_is_periodic() {
        // q_{11}^1 = 0 for J(4,2), so convolution by e_1 has eigenvalue -1 and
        // the walk from δ_0 alternates; its Cesàro averages reach Plancherel.
        let h = hg(&build_johnson(4, 2).unwrap());
        assert!(h.weight(1, 1, 1).abs() < 1e-12);
        let traj = walk(&h, &Coin::Index(1), &[1.0, 0.0, 0.0], 50).unwrap();
        assert_eq!(traj.len(), 51);
        assert!(close(&traj[49], &[0.0, 1.0, 0.0], 1e-10));
        assert!(close(&traj[50], &[1.0 / 3.0, 0.0, 2.0 / 3.0], 1e-10));
        let avg: Vec<f64> = (0..3).map(|k| (traj[49][k] + traj[50][k]) / 2.0).collect();
        assert!(close(&avg, &[1.0 / 6.0, 0.5, 1.0 / 3.0], 1e-10));
        // a lazy coin is aperiodic and converges
        let lazy = Coin::Weights(vec![0.5, 0.5, 0.0]);
        let traj = walk(&h, &lazy, &[1.0, 0.0, 0.0], 200).unwrap();
        assert!(close(traj.last().unwrap(), &[1.0 / 6.0, 0.5, 1.0 / 3.0], 1e-6));
    }

    #[test]
    fn walk_edge_cases() {
        let h = hg(&build_group_scheme(&FiniteGroup::cyclic(2).unwrap()));
        let traj = walk(&h, &Coin::Index(1), &[1.0, 0.0], 0).unwrap();
        assert_eq!(traj, vec![vec![1.0, 0.0]]);
        let traj = walk(&h, &Coin::Index(1), &[1.0, 0.0], 3).unwrap();
        let expected = [[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        for (a, b) in traj.iter().zip(expected) {
            assert!(close(a, &b, 1e-12));
        }
    }

    #[test]
    fn invalid_inputs() {
        let h = hg(&build_group_scheme(&FiniteGroup::cyclic(2).unwrap()));
        assert!(classical_chain(&h, &Coin::Index(2)).is_err());
        assert!(classical_chain(&h, &Coin::Weights(vec![0.7, 0.7])).is_err());
        assert!(convolve(&h, &[1.5, -0.5], &[1.0, 0.0]).is_err());
        assert!(walk(&h, &Coin::Index(1), &[0.5, 0.6], 2).is_err());
    }

    #[test]
    fn convex_coin() {
        let h = hg(&build_johnson(4, 2).unwrap());
        let coin = Coin::Weights(vec![0.25, 0.5, 0.25]);
        let t = classical_chain(&h, &coin).unwrap();
        let t1 = classical_chain(&h, &Coin::Index(1)).unwrap();
        let t2 = classical_chain(&h, &Coin::Index(2)).unwrap();
        let mix = RMatrix::identity(3, 3) * 0.25 + t1 * 0.5 + t2 * 0.25;
        assert!((t - mix).abs().max() < 1e-12);
    }
}
