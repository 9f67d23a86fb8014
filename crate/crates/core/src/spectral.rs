//! Simultaneous diagonalization of a commutative Bose-Mesner algebra into its
//! primitive idempotents.

use std::cmp::Ordering;
use std::ops::Mul;

use nalgebra::{Complex, ComplexField, DMatrix, Scalar, SymmetricEigen};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::{c, creal, max_abs, CMatrix, Real};
use crate::scheme::{verify_axioms, AssociationScheme};

/// Seed of the generator that draws the coefficients of the Hermitian
/// combination used to separate eigenspaces.
pub const COMBINATION_SEED: u64 = 0x00b0_5e3e_5ee0;

/// Spectral data of a commutative association scheme.
///
/// `A_j = Σ_i P[i][j] E_i` and `E_j = (1/n) Σ_i Q[i][j] A_i`. Index 0 is always
/// the trivial idempotent `J/n`.
#[derive(Debug, Clone)]
pub struct BoseMesnerDecomposition<T: Real> {
    scheme: AssociationScheme,
    idempotents: Vec<CMatrix<T>>,
    multiplicities: Vec<usize>,
    eigenmatrix_p: CMatrix<T>,
    eigenmatrix_q: CMatrix<T>,
}

impl<T: Real> BoseMesnerDecomposition<T> {
    pub fn scheme(&self) -> &AssociationScheme {
        &self.scheme
    }

    pub fn n(&self) -> usize {
        self.scheme.n()
    }

    pub fn d(&self) -> usize {
        self.scheme.d()
    }

    pub fn idempotents(&self) -> &[CMatrix<T>] {
        &self.idempotents
    }

    pub fn idempotent(&self, j: usize) -> &CMatrix<T> {
        &self.idempotents[j]
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// First eigenmatrix: `P[i][j]` is the eigenvalue of `A_j` on `E_i`.
    pub fn eigenmatrix_p(&self) -> &CMatrix<T> {
        &self.eigenmatrix_p
    }

    /// Second eigenmatrix: `Q[i][j] = n · (E_j)_{xy}` for `(x, y) ∈ R_i`.
    pub fn eigenmatrix_q(&self) -> &CMatrix<T> {
        &self.eigenmatrix_q
    }

    /// Adjacency matrices of the source scheme, as complex matrices.
    pub fn adjacency(&self) -> Vec<CMatrix<T>> {
        complex_adjacency(&self.scheme)
    }

    /// Assembles a decomposition from stored parts (used when loading).
    pub fn from_parts(
        scheme: AssociationScheme,
        idempotents: Vec<CMatrix<T>>,
        multiplicities: Vec<usize>,
        eigenmatrix_p: CMatrix<T>,
        eigenmatrix_q: CMatrix<T>,
    ) -> Result<Self> {
        let c = scheme.classes();
        let n = scheme.n();
        if idempotents.len() != c
            || multiplicities.len() != c
            || eigenmatrix_p.shape() != (c, c)
            || eigenmatrix_q.shape() != (c, c)
            || idempotents.iter().any(|e| e.shape() != (n, n))
        {
            return Err(Error::Validation("decomposition parts do not match the scheme".into()));
        }
        Ok(Self { scheme, idempotents, multiplicities, eigenmatrix_p, eigenmatrix_q })
    }
}

pub(crate) fn complex_adjacency<T: Real>(s: &AssociationScheme) -> Vec<CMatrix<T>> {
    (0..s.classes())
        .map(|j| {
            DMatrix::from_fn(s.n(), s.n(), |x, y| {
                if s.class_of(x, y) == j {
                    Complex::one()
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            })
        })
        .collect()
}

/// Eigenvalues ascending, with eigenvectors as matching columns.
fn hermitian_eigen<T: Real>(m: CMatrix<T>) -> (Vec<T>, CMatrix<T>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap_or(Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, k| {
        eig.eigenvectors[(r, order[k])]
    });
    (values, vectors)
}

/// Groups sorted eigenvalues whose consecutive gaps are below `tol`.
fn clusters<T: Real>(values: &[T], tol: T) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] >= tol {
            out.push((start, i));
            start = i;
        }
    }
    out
}

fn split_hermitian<T: Real>(h: CMatrix<T>, tol: T) -> Vec<CMatrix<T>> {
    let (values, vectors) = hermitian_eigen(h);
    clusters(&values, tol)
        .into_iter()
        .map(|(a, b)| vectors.columns(a, b - a).into_owned())
        .collect()
}

/// Splits an invariant subspace until every adjacency matrix acts on each
/// piece as a scalar.
fn refine<T: Real>(basis: CMatrix<T>, adj: &[CMatrix<T>], tol: T) -> Result<Vec<CMatrix<T>>> {
    let r = basis.ncols();
    let rr = T::from_usize_lossy(r);
    for a in adj.iter().skip(1) {
        let b = basis.adjoint() * a * &basis;
        let mean = b.trace() / creal(rr);
        let dev = max_abs(&(&b - CMatrix::<T>::identity(r, r) * mean));
        if dev <= tol {
            continue;
        }
        let half = creal(T::lit(0.5));
        let herm = (&b + b.adjoint()) * half;
        let mut parts = split_hermitian(herm, tol);
        if parts.len() == 1 {
            let anti = (&b - b.adjoint()) * c(T::zero(), -T::lit(0.5));
            parts = split_hermitian(anti, tol);
        }
        if parts.len() == 1 {
            return Err(Error::Numerical {
                what: "eigenspace refinement could not split a non-scalar block".into(),
                residual: dev.as_f64(),
            });
        }
        let mut out = Vec::new();
        for w in parts {
            out.extend(refine(&basis * w, adj, tol)?);
        }
        return Ok(out);
    }
    Ok(vec![basis])
}

fn eigen_tuple<T: Real>(basis: &CMatrix<T>, adj: &[CMatrix<T>]) -> Vec<Complex<T>> {
    let rr = creal(T::from_usize_lossy(basis.ncols()));
    adj.iter().map(|a| (basis.adjoint() * a * basis).trace() / rr).collect()
}

fn cmp_with_tol<T: Real>(a: T, b: T, tol: T) -> Ordering {
    if (a - b).abs() < tol {
        Ordering::Equal
    } else {
        a.partial_cmp(&b).unwrap_or(Ordering::Equal)
    }
}

/// Primitive idempotents, multiplicities and eigenmatrices of a commutative
/// scheme.
///
/// Ordering: `E_0 = J/n`; the rest by descending real part, then descending
/// imaginary part, of the `A_1` eigenvalue, with ties broken by `A_2`, `A_3`, ….
pub fn decompose<T: Real>(s: &AssociationScheme) -> Result<BoseMesnerDecomposition<T>> {
    let report = verify_axioms(s);
    if let Some(v) = report.violations.first() {
        return Err(Error::Axiom(v.to_string()));
    }
    if !report.commutative {
        return Err(Error::Unsupported(
            "spectral decomposition requires a commutative scheme".into(),
        ));
    }
    let n = s.n();
    let classes = s.classes();
    let adj = complex_adjacency::<T>(s);

    let mut rng = ChaCha8Rng::seed_from_u64(COMBINATION_SEED);
    let mut h = CMatrix::<T>::zeros(n, n);
    for a in adj.iter().skip(1) {
        let sym = T::lit(rng.random_range(0.5..1.5));
        let skew = T::lit(rng.random_range(0.5..1.5));
        let at = a.transpose();
        h += (a + &at) * creal(sym) + (a - &at) * c(T::zero(), skew);
    }

    let valency_scale = s.valencies().into_iter().max().unwrap_or(1).max(1);
    let tol = T::tol(1e-8) * T::from_usize_lossy(valency_scale);

    let (values, vectors) = hermitian_eigen(h);
    let h_scale = values.iter().fold(T::one(), |m, v| m.max(v.abs()));
    let h_tol = T::tol(1e-8) * h_scale;
    let mut bases = Vec::new();
    for (a, b) in clusters(&values, h_tol) {
        bases.extend(refine(vectors.columns(a, b - a).into_owned(), &adj, tol)?);
    }

    // merge pieces carrying the same eigenvalue tuple
    let mut spaces: Vec<(Vec<Complex<T>>, CMatrix<T>)> = Vec::new();
    for basis in bases {
        let tuple = eigen_tuple(&basis, &adj);
        let same = |t: &[Complex<T>]| {
            t.iter().zip(&tuple).all(|(x, y)| ComplexField::modulus(*x - *y) < tol)
        };
        match spaces.iter_mut().find(|(t, _)| same(t)) {
            Some((_, b)) => {
                let merged = CMatrix::<T>::from_columns(
                    &b.column_iter().chain(basis.column_iter()).collect::<Vec<_>>(),
                );
                *b = merged;
            }
            None => spaces.push((tuple, basis)),
        }
    }
    if spaces.len() != classes {
        return Err(Error::Numerical {
            what: format!(
                "found {} maximal common eigenspaces, expected {classes}",
                spaces.len()
            ),
            residual: f64::NAN,
        });
    }

    // trivial eigenspace: the one containing the all-ones vector
    let ones = CMatrix::<T>::from_element(n, 1, creal(T::one() / T::from_usize_lossy(n).sqrt()));
    let weight = |b: &CMatrix<T>| (b.adjoint() * &ones).norm_squared();
    let trivial = (0..spaces.len())
        .max_by(|&a, &b| {
            weight(&spaces[a].1).partial_cmp(&weight(&spaces[b].1)).unwrap_or(Ordering::Equal)
        })
        .expect("at least one eigenspace");
    let first = spaces.remove(trivial);
    spaces.sort_by(|(ta, _), (tb, _)| {
        for (x, y) in ta.iter().zip(tb).skip(1) {
            let ord = cmp_with_tol(y.re, x.re, tol).then(cmp_with_tol(y.im, x.im, tol));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        Ordering::Equal
    });
    spaces.insert(0, first);

    let idempotents: Vec<CMatrix<T>> = spaces
        .iter()
        .map(|(_, b)| {
            let e = b * b.adjoint();
            (&e + e.adjoint()) * creal(T::lit(0.5))
        })
        .collect();

    let mut multiplicities = Vec::with_capacity(classes);
    for (j, e) in idempotents.iter().enumerate() {
        let tr = e.trace().re;
        let m = tr.round();
        if (tr - m).abs() > T::tol(1e-6) || m < T::one() {
            return Err(Error::Numerical {
                what: format!("trace of E_{j} is not a positive integer"),
                residual: (tr - m).abs().as_f64(),
            });
        }
        multiplicities.push(m.to_usize().unwrap_or(0));
    }

    let p = CMatrix::<T>::from_fn(classes, classes, |i, j| {
        let m = creal(T::from_usize_lossy(multiplicities[i]));
        (&adj[j] * &idempotents[i]).trace() / m
    });

    // Q[i][j] = n · mean of (E_j) over the pairs of R_i
    let mut sums = CMatrix::<T>::zeros(classes, classes);
    let mut sizes = vec![0usize; classes];
    for x in 0..n {
        for y in 0..n {
            let i = s.class_of(x, y);
            sizes[i] += 1;
            for (j, e) in idempotents.iter().enumerate() {
                sums[(i, j)] += e[(x, y)];
            }
        }
    }
    let nn = T::from_usize_lossy(n);
    let q = CMatrix::<T>::from_fn(classes, classes, |i, j| {
        sums[(i, j)] * creal(nn / T::from_usize_lossy(sizes[i]))
    });

    let check_tol = T::tol(1e-8);
    for (j, a) in adj.iter().enumerate() {
        let mut recon = CMatrix::<T>::zeros(n, n);
        for (i, e) in idempotents.iter().enumerate() {
            recon += e * p[(i, j)];
        }
        let r = max_abs(&(a - recon));
        if r > check_tol * T::from_usize_lossy(valency_scale) {
            return Err(Error::Numerical {
                what: format!("A_{j} is not reproduced by Σ P[i][{j}] E_i"),
                residual: r.as_f64(),
            });
        }
    }
    let pq = &p * &q - CMatrix::<T>::identity(classes, classes) * creal(nn);
    let r = max_abs(&pq);
    if r > check_tol * nn {
        return Err(Error::Numerical { what: "PQ differs from nI".into(), residual: r.as_f64() });
    }

    Ok(BoseMesnerDecomposition {
        scheme: s.clone(),
        idempotents,
        multiplicities,
        eigenmatrix_p: p,
        eigenmatrix_q: q,
    })
}

/// Entrywise (Schur/Hadamard) product.
pub fn schur<N>(a: &DMatrix<N>, b: &DMatrix<N>) -> Result<DMatrix<N>>
where
    N: Scalar + Copy + Mul<Output = N>,
{
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            expected: format!("{:?}", a.shape()),
            found: format!("{:?}", b.shape()),
        });
    }
    Ok(a.zip_map(b, |x, y| x * y))
}

/// Unit of the Schur product: the all-ones matrix `J`.
pub fn schur_identity<N: Scalar + One>(n: usize) -> DMatrix<N> {
    DMatrix::from_element(n, n, N::one())
}
