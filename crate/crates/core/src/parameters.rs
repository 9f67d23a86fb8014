//! Intersection numbers (structure constants under matrix multiplication) and
//! Krein parameters (structure constants of the idempotents under the Schur
//! product).
//!
//! Krein convention: `E_i ∘ E_j = (1/n) Σ_k q_{ij}^k E_k`.

use crate::error::{Error, Result};
use crate::scalar::{creal, max_abs, CMatrix, Real};
use crate::scheme::AssociationScheme;
use crate::spectral::{schur, BoseMesnerDecomposition};

/// Absolute tolerance of the Krein nonnegativity condition.
pub const KREIN_TOLERANCE: f64 = 1e-9;

/// Representative independence is checked on every pair up to this size;
/// larger schemes are checked on a fixed sample of rows.
pub const FULL_CHECK_LIMIT: usize = 64;

/// `p[i][j][k] = p_{ij}^k`, with `A_i A_j = Σ_k p_{ij}^k A_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionTensor {
    d: usize,
    p: Vec<Vec<Vec<u64>>>,
}

impl IntersectionTensor {
    pub fn from_entries(p: Vec<Vec<Vec<u64>>>) -> Result<Self> {
        let c = p.len();
        if c == 0 || p.iter().any(|m| m.len() != c || m.iter().any(|r| r.len() != c)) {
            return Err(Error::Validation("intersection tensor must be cubic and non-empty".into()));
        }
        Ok(Self { d: c - 1, p })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> u64 {
        self.p[i][j][k]
    }

    pub fn entries(&self) -> &[Vec<Vec<u64>>] {
        &self.p
    }

    /// Exact check of `A_i A_j = Σ_k p_{ij}^k A_k` for all `i, j`; returns the
    /// first failing `(i, j)`.
    pub fn check_matrix_identity(&self, s: &AssociationScheme) -> std::result::Result<(), (usize, usize)> {
        let a = s.adjacency_matrices();
        for i in 0..=self.d {
            for j in 0..=self.d {
                let lhs = &a[i] * &a[j];
                let mut rhs = nalgebra::DMatrix::<i64>::zeros(s.n(), s.n());
                for (k, ak) in a.iter().enumerate() {
                    rhs += ak * self.p[i][j][k] as i64;
                }
                if lhs != rhs {
                    return Err((i, j));
                }
            }
        }
        Ok(())
    }
}

/// Path-counting intersection numbers.
///
/// `p_{ij}^k` is read off the first pair of `R_k` and then confirmed on every
/// other pair (all pairs when `n ≤ 64`, a fixed sample of rows otherwise).
pub fn intersection_numbers(s: &AssociationScheme) -> Result<IntersectionTensor> {
    let c = s.classes();
    let n = s.n();
    let mut reps: Vec<Option<Vec<u64>>> = vec![None; c];
    for x in 0..n {
        for y in 0..n {
            let k = s.class_of(x, y);
            if reps[k].is_none() {
                reps[k] = Some(s.path_counts(x, y));
            }
        }
    }
    let reps: Vec<Vec<u64>> = reps
        .into_iter()
        .enumerate()
        .map(|(k, r)| r.ok_or_else(|| Error::Axiom(format!("class {k} is empty"))))
        .collect::<Result<_>>()?;

    let rows: Vec<usize> = if n <= FULL_CHECK_LIMIT {
        (0..n).collect()
    } else {
        (0..FULL_CHECK_LIMIT).map(|r| r * n / FULL_CHECK_LIMIT).collect()
    };
    for &x in &rows {
        for y in 0..n {
            let k = s.class_of(x, y);
            if s.path_counts(x, y) != reps[k] {
                return Err(Error::Axiom(format!(
                    "intersection numbers depend on the representative: pair ({x}, {y}) of class {k}"
                )));
            }
        }
    }

    let p = (0..c)
        .map(|i| (0..c).map(|j| (0..c).map(|k| reps[k][i * c + j]).collect()).collect())
        .collect();
    Ok(IntersectionTensor { d: c - 1, p })
}

/// `q[i][j][k] = q_{ij}^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct KreinTensor<T: Real> {
    d: usize,
    q: Vec<Vec<Vec<T>>>,
    tolerance_used: T,
}

impl<T: Real> KreinTensor<T> {
    pub fn from_entries(q: Vec<Vec<Vec<T>>>) -> Result<Self> {
        let c = q.len();
        if c == 0 || q.iter().any(|m| m.len() != c || m.iter().any(|r| r.len() != c)) {
            return Err(Error::Validation("Krein tensor must be cubic and non-empty".into()));
        }
        Ok(Self { d: c - 1, q, tolerance_used: T::tol(KREIN_TOLERANCE) })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> T {
        self.q[i][j][k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, value: T) {
        self.q[i][j][k] = value;
    }

    pub fn entries(&self) -> &[Vec<Vec<T>>] {
        &self.q
    }

    pub fn tolerance_used(&self) -> T {
        self.tolerance_used
    }
}

/// Krein parameters via the trace pairing
/// `q_{ij}^k = (n / m_k) · tr((E_i ∘ E_j) E_k)`.
pub fn krein_parameters<T: Real>(dec: &BoseMesnerDecomposition<T>) -> Result<KreinTensor<T>> {
    let c = dec.d() + 1;
    let nn = T::from_usize_lossy(dec.n());
    let e = dec.idempotents();
    let mut q = vec![vec![vec![T::zero(); c]; c]; c];
    for i in 0..c {
        for j in i..c {
            let prod = schur(&e[i], &e[j])?;
            for k in 0..c {
                let m = T::from_usize_lossy(dec.multiplicities()[k]);
                let value = nn / m * trace_of_product(&prod, &e[k]).re;
                q[i][j][k] = value;
                q[j][i][k] = value;
            }
        }
    }
    let tensor = KreinTensor { d: c - 1, q, tolerance_used: T::tol(KREIN_TOLERANCE) };
    if let Some(&(i, j, k, value)) = check_krein_condition(&tensor).violations.first() {
        return Err(Error::KreinViolation { i, j, k, value: value.as_f64() });
    }
    Ok(tensor)
}

/// `tr(XY)` without forming the product.
pub(crate) fn trace_of_product<T: Real>(x: &CMatrix<T>, y: &CMatrix<T>) -> nalgebra::Complex<T> {
    let n = x.nrows();
    let mut acc = creal(T::zero());
    for a in 0..n {
        for b in 0..n {
            acc += x[(a, b)] * y[(b, a)];
        }
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct KreinReport<T: Real> {
    pub tolerance: T,
    /// Every `(i, j, k, q_{ij}^k)` below `-tolerance`.
    pub violations: Vec<(usize, usize, usize, T)>,
}

impl<T: Real> KreinReport<T> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_krein_condition<T: Real>(q: &KreinTensor<T>) -> KreinReport<T> {
    let tol = q.tolerance_used;
    let mut violations = Vec::new();
    for (i, plane) in q.q.iter().enumerate() {
        for (j, row) in plane.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                if v < -tol {
                    violations.push((i, j, k, v));
                }
            }
        }
    }
    KreinReport { tolerance: tol, violations }
}

/// `max_{i,j} ‖E_i ∘ E_j − (1/n) Σ_k q_{ij}^k E_k‖_max`.
pub fn krein_expansion_residual<T: Real>(dec: &BoseMesnerDecomposition<T>, q: &KreinTensor<T>) -> T {
    let c = dec.d() + 1;
    let n = dec.n();
    let nn = T::from_usize_lossy(n);
    let e = dec.idempotents();
    let mut worst = T::zero();
    for i in 0..c {
        for j in 0..c {
            let mut rhs = CMatrix::<T>::zeros(n, n);
            for (k, ek) in e.iter().enumerate() {
                rhs += ek * creal(q.get(i, j, k) / nn);
            }
            let lhs = e[i].component_mul(&e[j]);
            worst = worst.max(max_abs(&(lhs - rhs)));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use crate::scheme::{build_group_scheme, build_johnson};
    use crate::spectral::decompose;

    #[test]
    fn z2_intersection_numbers() {
        let s = build_group_scheme(&FiniteGroup::cyclic(2).unwrap());
        let p = intersection_numbers(&s).unwrap();
        assert_eq!(p.get(1, 1, 0), 1);
        assert_eq!(p.get(1, 1, 1), 0);
    }

    #[test]
    fn johnson_4_2_intersection_numbers_match_path_counts() {
        let s = build_johnson(4, 2).unwrap();
        let p = intersection_numbers(&s).unwrap();
        // brute force: common neighbours at distance 1 of an adjacent pair
        let a1 = s.adjacency(1);
        let (x, y) = (0..6)
            .flat_map(|x| (0..6).map(move |y| (x, y)))
            .find(|&(x, y)| s.class_of(x, y) == 1)
            .unwrap();
        let brute = (0..6).filter(|&z| a1[(x, z)] == 1 && a1[(z, y)] == 1).count() as u64;
        assert_eq!(p.get(1, 1, 1), brute);
        assert_eq!(brute, 2);
        assert_eq!(p.get(1, 1, 0), 4);
        let sq = &a1 * &a1;
        let expected =
            s.adjacency(0) * 4 + &a1 * p.get(1, 1, 1) as i64 + s.adjacency(2) * p.get(1, 1, 2) as i64;
        assert_eq!(sq, expected);
        assert!(p.check_matrix_identity(&s).is_ok());
    }

    #[test]
    fn group_scheme_intersection_numbers_are_group_law() {
        let g = FiniteGroup::symmetric(3).unwrap();
        let p = intersection_numbers(&build_group_scheme(&g)).unwrap();
        for x in 0..6 {
            for y in 0..6 {
                for z in 0..6 {
                    assert_eq!(p.get(x, y, z), u64::from(g.mul(x, y) == z));
                }
            }
        }
    }

    #[test]
    fn representative_dependence_is_detected() {
        let rel: Vec<Vec<usize>> =
            (0..4).map(|x: usize| (0..4).map(|y: usize| x.abs_diff(y)).collect()).collect();
        let s = AssociationScheme::from_relation(rel, None).unwrap();
        assert!(matches!(intersection_numbers(&s), Err(Error::Axiom(_))));
    }

    #[test]
    fn z2_krein_parameters() {
        let dec = decompose::<f64>(&build_group_scheme(&FiniteGroup::cyclic(2).unwrap())).unwrap();
        let q = krein_parameters(&dec).unwrap();
        assert!((q.get(1, 1, 0) - 1.0).abs() < 1e-12);
        assert!(q.get(1, 1, 1).abs() < 1e-12);
    }

    #[test]
    fn z3_krein_parameters_are_cyclic() {
        let dec = decompose::<f64>(&build_group_scheme(&FiniteGroup::cyclic(3).unwrap())).unwrap();
        let q = krein_parameters(&dec).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let expected = if k == (i + j) % 3 { 1.0 } else { 0.0 };
                    assert!((q.get(i, j, k) - expected).abs() < 1e-10, "({i},{j},{k})");
                }
            }
        }
    }

    #[test]
    fn krein_identity_row() {
        let dec = decompose::<f64>(&build_johnson(5, 2).unwrap()).unwrap();
        let q = krein_parameters(&dec).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                let expected = if j == k { 1.0 } else { 0.0 };
                assert!((q.get(0, j, k) - expected).abs() < 1e-10);
            }
        }
        assert!(krein_expansion_residual(&dec, &q) < 1e-9);
    }

    #[test]
    fn krein_condition_reports() {
        let z2 = decompose::<f64>(&build_group_scheme(&FiniteGroup::cyclic(2).unwrap())).unwrap();
        assert!(check_krein_condition(&krein_parameters(&z2).unwrap()).passed());

        let j42 = decompose::<f64>(&build_johnson(4, 2).unwrap()).unwrap();
        let mut q = krein_parameters(&j42).unwrap();
        assert!(check_krein_condition(&q).passed());
        q.set(1, 1, 1, -0.01);
        let report = check_krein_condition(&q);
        assert_eq!(report.violations.len(), 1);
        let (i, j, k, _) = report.violations[0];
        assert_eq!((i, j, k), (1, 1, 1));
    }
}
