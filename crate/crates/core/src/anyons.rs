//! Fusion systems: fusion rules, quantum dimensions, F/R data, braid
//! generators and consistency checks, plus a comparison of Krein tensors
//! with fusion rules.
//!
//! F-matrix convention: `F(a, b, c, d)[x][y]` has rows `x ∈ a⊗b` with
//! `d ∈ x⊗c`, and columns `y ∈ b⊗c` with `d ∈ a⊗y`.

use std::collections::BTreeMap;

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::parameters::KreinTensor;
use crate::scalar::{c, cabs, creal, max_abs, CMatrix, Cplx, Real};
use crate::spectral::BoseMesnerDecomposition;

/// Deviation below which the bridge reports a match.
pub const BRIDGE_MATCH_TOLERANCE: f64 = 1e-6;
/// Pentagon and hexagon residuals below this pass.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-10;

/// One F-matrix with the fusion channels labelling its rows and columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FMatrix<T: Real> {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub matrix: CMatrix<T>,
}

impl<T: Real> FMatrix<T> {
    pub fn scalar(x: usize, y: usize, value: Cplx<T>) -> Self {
        Self { rows: vec![x], cols: vec![y], matrix: CMatrix::from_element(1, 1, value) }
    }

    pub fn entry(&self, x: usize, y: usize) -> Option<Cplx<T>> {
        let i = self.rows.iter().position(|&r| r == x)?;
        let j = self.cols.iter().position(|&r| r == y)?;
        Some(self.matrix[(i, j)])
    }
}

pub type FTable<T> = BTreeMap<(usize, usize, usize, usize), FMatrix<T>>;
pub type RTable<T> = BTreeMap<(usize, usize, usize), Cplx<T>>;

#[derive(Debug, Clone)]
pub struct FusionSystem<T: Real> {
    labels: Vec<String>,
    n: Vec<Vec<Vec<u32>>>,
    dual: Vec<usize>,
    dims: Vec<T>,
    f: Option<FTable<T>>,
    r: Option<RTable<T>>,
    twist: Option<Vec<Cplx<T>>>,
}

impl<T: Real> FusionSystem<T> {
    /// Validates fusion rules and any F/R data and computes quantum dimensions.
    pub fn new(
        labels: Vec<String>,
        n: Vec<Vec<Vec<u32>>>,
        f: Option<FTable<T>>,
        r: Option<RTable<T>>,
        twist: Option<Vec<Cplx<T>>>,
    ) -> Result<Self> {
        let rank = labels.len();
        if rank == 0 {
            return Err(Error::Validation("fusion system has no labels".into()));
        }
        if labels.iter().unique().count() != rank {
            return Err(Error::Validation("fusion labels are not distinct".into()));
        }
        let shape_ok = n.len() == rank
            && n.iter().all(|row| row.len() == rank && row.iter().all(|v| v.len() == rank));
        if !shape_ok {
            return Err(Error::ShapeMismatch {
                expected: format!("{rank}×{rank}×{rank} fusion tensor"),
                found: format!("outer length {}", n.len()),
            });
        }
        for b in 0..rank {
            for cc in 0..rank {
                let want = u32::from(b == cc);
                if n[0][b][cc] != want || n[b][0][cc] != want {
                    return Err(Error::Validation(format!(
                        "vacuum is not a unit: N[{}][{}][{}] != {want}",
                        labels[0], labels[b], labels[cc]
                    )));
                }
            }
        }
        for (a, b, cc) in (0..rank).cartesian_product(0..rank).cartesian_product(0..rank).map(|((a, b), c)| (a, b, c)) {
            if n[a][b][cc] != n[b][a][cc] {
                return Err(Error::Validation(format!(
                    "fusion is not commutative at ({}, {}; {})",
                    labels[a], labels[b], labels[cc]
                )));
            }
        }
        for a in 0..rank {
            for b in 0..rank {
                for cc in 0..rank {
                    for x in 0..rank {
                        let left: u64 = (0..rank).map(|e| u64::from(n[a][b][e]) * u64::from(n[e][cc][x])).sum();
                        let right: u64 = (0..rank).map(|e| u64::from(n[b][cc][e]) * u64::from(n[a][e][x])).sum();
                        if left != right {
                            return Err(Error::Validation(format!(
                                "fusion is not associative at ({}, {}, {}; {})",
                                labels[a], labels[b], labels[cc], labels[x]
                            )));
                        }
                    }
                }
            }
        }
        let mut dual = Vec::with_capacity(rank);
        for a in 0..rank {
            let duals: Vec<usize> = (0..rank).filter(|&b| n[a][b][0] > 0).collect();
            if duals.len() != 1 || n[a][duals[0]][0] != 1 {
                return Err(Error::Validation(format!("label {} has no unique dual", labels[a])));
            }
            dual.push(duals[0]);
        }
        let mut fs = Self { labels, n, dual, dims: Vec::new(), f, r, twist };
        fs.dims = quantum_dimensions(&fs)?;
        fs.validate_braiding_data()?;
        Ok(fs)
    }

    fn validate_braiding_data(&self) -> Result<()> {
        let rank = self.rank();
        if (self.f.is_some() || self.r.is_some()) && !self.is_multiplicity_free() {
            return Err(Error::Unsupported("F/R data is only supported for multiplicity-free fusion".into()));
        }
        if let Some(f) = &self.f {
            for (&(a, b, cc, d), fm) in f {
                let key = format!("F[{}, {}, {}; {}]", self.labels[a], self.labels[b], self.labels[cc], self.labels[d]);
                if a.max(b).max(cc).max(d) >= rank {
                    return Err(Error::Validation(format!("{key} uses an unknown label")));
                }
                let rows: Vec<usize> = (0..rank).filter(|&x| self.n[a][b][x] > 0 && self.n[x][cc][d] > 0).collect();
                let cols: Vec<usize> = (0..rank).filter(|&y| self.n[b][cc][y] > 0 && self.n[a][y][d] > 0).collect();
                let mut got_rows = fm.rows.clone();
                let mut got_cols = fm.cols.clone();
                got_rows.sort_unstable();
                got_cols.sort_unstable();
                if got_rows != rows || got_cols != cols || fm.matrix.shape() != (rows.len(), cols.len()) {
                    return Err(Error::Validation(format!("{key} does not match the admissible fusion channels")));
                }
                let k = rows.len();
                let defect = max_abs(&(fm.matrix.adjoint() * &fm.matrix - CMatrix::<T>::identity(k, k)));
                if defect > T::tol(1e-12) {
                    return Err(Error::Validation(format!("{key} is not unitary (defect {:e})", defect.as_f64())));
                }
            }
        }
        if let Some(r) = &self.r {
            for (&(a, b, cc), z) in r {
                if a.max(b).max(cc) >= rank || self.n[a][b][cc] == 0 {
                    return Err(Error::Validation(format!("R entry ({a}, {b}; {cc}) is not an admissible channel")));
                }
                if (cabs(*z) - T::one()).abs() > T::tol(1e-12) {
                    return Err(Error::Validation(format!(
                        "R[{}, {}; {}] does not have unit modulus",
                        self.labels[a], self.labels[b], self.labels[cc]
                    )));
                }
            }
        }
        if let Some(tw) = &self.twist {
            if tw.len() != rank {
                return Err(Error::ShapeMismatch { expected: format!("{rank} twists"), found: tw.len().to_string() });
            }
        }
        Ok(())
    }

    /// Only the vacuum.
    pub fn vacuum() -> Self {
        Self::new(vec!["1".into()], vec![vec![vec![1]]], Some(trivial_f(&[vec![vec![1]]])), None, None)
            .expect("vacuum system is valid")
    }

    /// Ising anyons `(1, σ, ψ)` with the `+` sign choice on `F[σ,σ,σ;σ]`.
    pub fn ising() -> Self {
        let (one, s, p) = (0, 1, 2);
        let mut n = vec![vec![vec![0u32; 3]; 3]; 3];
        for x in 0..3 {
            n[one][x][x] = 1;
            n[x][one][x] = 1;
        }
        n[s][s][one] = 1;
        n[s][s][p] = 1;
        n[s][p][s] = 1;
        n[p][s][s] = 1;
        n[p][p][one] = 1;
        let mut f = trivial_f(&n);
        let h = T::lit(std::f64::consts::FRAC_1_SQRT_2);
        f.insert(
            (s, s, s, s),
            FMatrix {
                rows: vec![one, p],
                cols: vec![one, p],
                matrix: CMatrix::from_row_slice(2, 2, &[creal(h), creal(h), creal(h), creal(-h)]),
            },
        );
        f.insert((s, p, s, p), FMatrix::scalar(s, s, creal(-T::one())));
        f.insert((p, s, p, s), FMatrix::scalar(s, s, creal(-T::one())));
        let pi = std::f64::consts::PI;
        let phase = |x: f64| c(T::lit(x.cos()), T::lit(x.sin()));
        let mut r = RTable::new();
        for x in 0..3 {
            r.insert((one, x, x), creal(T::one()));
            r.insert((x, one, x), creal(T::one()));
        }
        // e^{iπ/8} diag(1, i) on the σσ channels
        r.insert((s, s, one), phase(pi / 8.0));
        r.insert((s, s, p), phase(5.0 * pi / 8.0));
        r.insert((s, p, s), c(T::zero(), -T::one()));
        r.insert((p, s, s), c(T::zero(), -T::one()));
        r.insert((p, p, one), creal(-T::one()));
        let twist = vec![creal(T::one()), phase(pi / 8.0), creal(-T::one())];
        Self::new(vec!["1".into(), "σ".into(), "ψ".into()], n, Some(f), Some(r), Some(twist))
            .expect("Ising data is valid")
    }

    /// Fibonacci anyons `(1, f)` with `f × f = 1 + f`.
    pub fn fibonacci() -> Self {
        let n = vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![1, 1]]];
        let mut f = trivial_f(&n);
        let phi = T::lit((1.0 + 5f64.sqrt()) / 2.0);
        let a = T::one() / phi;
        let b = a.sqrt();
        f.insert(
            (1, 1, 1, 1),
            FMatrix {
                rows: vec![0, 1],
                cols: vec![0, 1],
                matrix: CMatrix::from_row_slice(2, 2, &[creal(a), creal(b), creal(b), creal(-a)]),
            },
        );
        let pi = std::f64::consts::PI;
        let phase = |x: f64| c(T::lit(x.cos()), T::lit(x.sin()));
        let mut r = RTable::new();
        r.insert((0, 0, 0), creal(T::one()));
        r.insert((0, 1, 1), creal(T::one()));
        r.insert((1, 0, 1), creal(T::one()));
        r.insert((1, 1, 0), phase(4.0 * pi / 5.0));
        r.insert((1, 1, 1), phase(-3.0 * pi / 5.0));
        Self::new(vec!["1".into(), "f".into()], n, Some(f), Some(r), None).expect("Fibonacci data is valid")
    }

    /// Fusion ring of an abelian group, with trivial F-symbols. `Z2` is
    /// labelled `(1, ψ)`.
    pub fn group_ring(g: &FiniteGroup) -> Result<Self> {
        if !g.is_abelian() {
            return Err(Error::Unsupported("group rings are only built for abelian groups".into()));
        }
        let k = g.order();
        let mut n = vec![vec![vec![0u32; k]; k]; k];
        for a in 0..k {
            for b in 0..k {
                n[a][b][g.mul(a, b)] = 1;
            }
        }
        let labels = if k == 2 {
            vec!["1".into(), "ψ".into()]
        } else {
            std::iter::once("1".to_string()).chain((1..k).map(|x| format!("g{x}"))).collect()
        };
        let f = trivial_f(&n);
        Self::new(labels, n, Some(f), None, None)
    }

    /// `"ising"` or `"fibonacci"`, plus `"vacuum"` and group rings such as `"Z3"`.
    pub fn builtin(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "ising" => Ok(Self::ising()),
            "fibonacci" | "fib" => Ok(Self::fibonacci()),
            "vacuum" | "trivial" => Ok(Self::vacuum()),
            _ => match FiniteGroup::builtin(name) {
                Ok(g) => Self::group_ring(&g),
                Err(_) => Err(Error::UnknownLabel(format!("unknown fusion system {name:?}"))),
            },
        }
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn fusion_tensor(&self) -> &[Vec<Vec<u32>>] {
        &self.n
    }

    pub fn multiplicity(&self, a: usize, b: usize, cc: usize) -> u32 {
        self.n[a][b][cc]
    }

    pub fn dual(&self) -> &[usize] {
        &self.dual
    }

    pub fn dims(&self) -> &[T] {
        &self.dims
    }

    pub fn f_table(&self) -> Option<&FTable<T>> {
        self.f.as_ref()
    }

    pub fn r_table(&self) -> Option<&RTable<T>> {
        self.r.as_ref()
    }

    pub fn twist(&self) -> Option<&[Cplx<T>]> {
        self.twist.as_deref()
    }

    pub fn is_multiplicity_free(&self) -> bool {
        self.n.iter().flatten().flatten().all(|&v| v <= 1)
    }

    /// Resolves a label by name; accepts ASCII aliases for Greek labels.
    pub fn label_index(&self, name: &str) -> Result<usize> {
        let canonical = match name.to_ascii_lowercase().as_str() {
            "sigma" => "σ".to_string(),
            "psi" => "ψ".to_string(),
            "vacuum" | "one" | "i" => "1".to_string(),
            _ => name.to_string(),
        };
        self.labels
            .iter()
            .position(|l| *l == canonical || *l == name)
            .ok_or_else(|| Error::UnknownLabel(format!("unknown anyon label {name:?}; known: {}", self.labels.join(", "))))
    }

    /// Copy with one F-matrix replaced; the result is revalidated.
    pub fn with_f_matrix(&self, key: (usize, usize, usize, usize), fm: FMatrix<T>) -> Result<Self> {
        let mut f = self.f.clone().unwrap_or_default();
        f.insert(key, fm);
        Self::new(self.labels.clone(), self.n.clone(), Some(f), self.r.clone(), self.twist.clone())
    }

    fn f_entry(&self, a: usize, b: usize, cc: usize, d: usize, x: usize, y: usize) -> Option<Cplx<T>> {
        self.f.as_ref()?.get(&(a, b, cc, d))?.entry(x, y)
    }
}

/// F-symbols equal to 1 on every admissible one-dimensional vertex, and the
/// identity on higher-dimensional ones.
fn trivial_f<T: Real>(n: &[Vec<Vec<u32>>]) -> FTable<T> {
    let rank = n.len();
    let mut table = FTable::new();
    for (a, b, cc, d) in (0..rank).flat_map(|a| (0..rank).flat_map(move |b| (0..rank).flat_map(move |cc| (0..rank).map(move |d| (a, b, cc, d))))) {
        let rows: Vec<usize> = (0..rank).filter(|&x| n[a][b][x] > 0 && n[x][cc][d] > 0).collect();
        let cols: Vec<usize> = (0..rank).filter(|&y| n[b][cc][y] > 0 && n[a][y][d] > 0).collect();
        if rows.is_empty() {
            continue;
        }
        let k = rows.len();
        table.insert((a, b, cc, d), FMatrix { rows, cols, matrix: CMatrix::identity(k, k) });
    }
    table
}

/// Perron–Frobenius dimensions, normalized so the vacuum has dimension 1.
///
/// Uses power iteration on `M + I` with `M = Σ_a N_a`; the common positive
/// eigenvector of all `N_a` is the dimension vector.
pub fn quantum_dimensions<T: Real>(fs: &FusionSystem<T>) -> Result<Vec<T>> {
    let rank = fs.rank();
    let mut m = DMatrix::<T>::identity(rank, rank);
    for a in 0..rank {
        for b in 0..rank {
            for cc in 0..rank {
                m[(cc, b)] += T::from_usize_lossy(fs.n[a][b][cc] as usize);
            }
        }
    }
    // every label must be reachable from the vacuum
    let mut seen = vec![false; rank];
    seen[0] = true;
    let mut stack = vec![0];
    while let Some(x) = stack.pop() {
        for y in 0..rank {
            if !seen[y] && (0..rank).any(|a| fs.n[a][x][y] > 0) {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    if let Some(bad) = seen.iter().position(|s| !s) {
        return Err(Error::Validation(format!(
            "fusion tensor is reducible: label {} is disconnected from the vacuum",
            fs.labels[bad]
        )));
    }
    let mut v = DVector::<T>::from_element(rank, T::one());
    let eps = T::default_epsilon() * T::lit(4.0);
    for _ in 0..100_000 {
        let mut next = &m * &v;
        let norm = next.amax();
        next /= norm;
        let delta = (&next - &v).amax();
        v = next;
        if delta <= eps {
            break;
        }
    }
    let dims: Vec<T> = v.iter().map(|&x| x / v[0]).collect();
    let mut worst = T::zero();
    for a in 0..rank {
        for b in 0..rank {
            let rhs = (0..rank).fold(T::zero(), |acc, cc| acc + T::from_usize_lossy(fs.n[a][b][cc] as usize) * dims[cc]);
            worst = worst.max((dims[a] * dims[b] - rhs).abs());
        }
    }
    if worst > T::tol(1e-10) * dims.iter().fold(T::one(), |a, &b| a.max(b)) {
        return Err(Error::Numerical { what: "quantum dimension consistency".into(), residual: worst.as_f64() });
    }
    Ok(dims)
}

/// `c ↦ N_{ab}^c` for two labels given by name.
pub fn fuse<T: Real>(fs: &FusionSystem<T>, a: &str, b: &str) -> Result<Vec<(String, u32)>> {
    let (ia, ib) = (fs.label_index(a)?, fs.label_index(b)?);
    Ok((0..fs.rank())
        .filter(|&cc| fs.n[ia][ib][cc] > 0)
        .map(|cc| (fs.labels[cc].clone(), fs.n[ia][ib][cc]))
        .collect())
}

#[derive(Debug, Clone)]
pub struct BraidGenerators<T: Real> {
    /// The anyon whose three-fold fusion space carries the representation.
    pub anyon: usize,
    /// Fusion channels of the first pair, in basis order.
    pub basis: Vec<usize>,
    pub sigma1: CMatrix<T>,
    pub sigma2: CMatrix<T>,
    /// `F R² F⁻¹`.
    pub exchange: CMatrix<T>,
    pub unitarity_defect: T,
    /// `min_φ ‖σ1σ2σ1 − e^{iφ} σ2σ1σ2‖_max`.
    pub braid_residual: T,
}

/// `σ1 = R`, `σ2 = F R F⁻¹` on the two-dimensional space of `a⊗a⊗a → a`
/// for the first anyon where that space is two-dimensional.
pub fn braid_generators<T: Real>(fs: &FusionSystem<T>) -> Result<BraidGenerators<T>> {
    let f = fs.f.as_ref().ok_or_else(|| Error::MissingData("fusion system has no F data".into()))?;
    let r = fs.r.as_ref().ok_or_else(|| Error::MissingData("fusion system has no R data".into()))?;
    let (anyon, fm) = (1..fs.rank())
        .find_map(|a| f.get(&(a, a, a, a)).filter(|fm| fm.rows.len() == 2).map(|fm| (a, fm)))
        .ok_or_else(|| Error::MissingData("no two-dimensional three-anyon fusion space with F data".into()))?;
    let mut diag = Vec::with_capacity(2);
    for &x in &fm.rows {
        let z = r.get(&(anyon, anyon, x)).ok_or_else(|| {
            Error::MissingData(format!("missing R[{0}, {0}; {1}]", fs.labels[anyon], fs.labels[x]))
        })?;
        diag.push(*z);
    }
    if fm.cols != fm.rows {
        return Err(Error::Validation("F matrix rows and columns are ordered differently".into()));
    }
    let sigma1 = CMatrix::from_diagonal(&DVector::from_vec(diag));
    let finv = fm
        .matrix
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Numerical { what: "F matrix is singular".into(), residual: f64::NAN })?;
    let sigma2 = &fm.matrix * &sigma1 * &finv;
    let exchange = &fm.matrix * &sigma1 * &sigma1 * &finv;
    let id = CMatrix::<T>::identity(2, 2);
    let unitarity_defect = max_abs(&(sigma1.adjoint() * &sigma1 - &id)).max(max_abs(&(sigma2.adjoint() * &sigma2 - &id)));
    let lhs = &sigma1 * &sigma2 * &sigma1;
    let rhs = &sigma2 * &sigma1 * &sigma2;
    let overlap = (rhs.adjoint() * &lhs).trace();
    let phase = if cabs(overlap) > T::zero() { overlap / creal(cabs(overlap)) } else { creal(T::one()) };
    let braid_residual = max_abs(&(lhs - rhs * phase));
    Ok(BraidGenerators { anyon, basis: fm.rows.clone(), sigma1, sigma2, exchange, unitarity_defect, braid_residual })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport<T> {
    pub max_residual: T,
    pub equations: usize,
    pub passed: bool,
}

/// Checks the pentagon identity on every admissible labelling:
/// `F(f,c,d,e)[g][l] F(a,b,l,e)[f][k] = Σ_h F(a,b,c,g)[f][h] F(a,h,d,e)[g][k] F(b,c,d,k)[h][l]`.
pub fn verify_pentagon<T: Real>(fs: &FusionSystem<T>) -> Result<ConsistencyReport<T>> {
    if fs.f.is_none() {
        return Err(Error::MissingData("fusion system has no F data".into()));
    }
    if !fs.is_multiplicity_free() {
        return Err(Error::Unsupported("pentagon check needs multiplicity-free fusion".into()));
    }
    let rank = fs.rank();
    let adm = |a: usize, b: usize, x: usize| fs.n[a][b][x] > 0;
    let mut missing = std::collections::BTreeSet::new();
    let mut get = |a, b, cc, d, x, y| match fs.f_entry(a, b, cc, d, x, y) {
        Some(z) => z,
        None => {
            missing.insert(format!(
                "F[{}, {}, {}; {}]",
                fs.labels[a], fs.labels[b], fs.labels[cc], fs.labels[d]
            ));
            creal(T::zero())
        }
    };
    let mut worst = T::zero();
    let mut equations = 0;
    let idx = || 0..rank;
    for (a, b, cc, d) in idx().cartesian_product(idx()).cartesian_product(idx()).cartesian_product(idx()).map(|(((a, b), c), d)| (a, b, c, d)) {
        for e in idx() {
            for f in idx().filter(|&f| adm(a, b, f)) {
                for g in idx().filter(|&g| adm(f, cc, g) && adm(g, d, e)) {
                    for l in idx().filter(|&l| adm(cc, d, l) && adm(f, l, e)) {
                        for k in idx().filter(|&k| adm(b, l, k) && adm(a, k, e)) {
                            let lhs = get(f, cc, d, e, g, l) * get(a, b, l, e, f, k);
                            let mut rhs = creal(T::zero());
                            for h in idx().filter(|&h| adm(b, cc, h) && adm(a, h, g) && adm(h, d, k)) {
                                rhs += get(a, b, cc, g, f, h) * get(a, h, d, e, g, k) * get(b, cc, d, k, h, l);
                            }
                            worst = worst.max(cabs(lhs - rhs));
                            equations += 1;
                        }
                    }
                }
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingData(format!(
            "incomplete F data; missing {}",
            missing.into_iter().join(", ")
        )));
    }
    Ok(ConsistencyReport { max_residual: worst, equations, passed: worst < T::tol(CONSISTENCY_TOLERANCE) })
}

/// Both hexagon identities, for rank ≤ 2 multiplicity-free systems:
/// `R(c,a;e) F(a,c,b,d)[e][g] R(c,b;g) = Σ_f F(c,a,b,d)[e][f] R(c,f;d) F(a,b,c,d)[f][g]`,
/// and the same with every `R` inverted.
pub fn verify_hexagon<T: Real>(fs: &FusionSystem<T>) -> Result<ConsistencyReport<T>> {
    if fs.rank() > 2 || !fs.is_multiplicity_free() {
        return Err(Error::Unsupported(format!(
            "hexagon check is implemented for multiplicity-free systems of rank ≤ 2 (got rank {})",
            fs.rank()
        )));
    }
    let f = fs.f.as_ref().ok_or_else(|| Error::MissingData("fusion system has no F data".into()))?;
    let r = fs.r.as_ref().ok_or_else(|| Error::MissingData("fusion system has no R data".into()))?;
    let rank = fs.rank();
    let adm = |a: usize, b: usize, x: usize| fs.n[a][b][x] > 0;
    let fget = |a, b, cc, d, x, y| {
        f.get(&(a, b, cc, d))
            .and_then(|fm| fm.entry(x, y))
            .ok_or_else(|| Error::MissingData(format!("missing F[{a}, {b}, {cc}; {d}] entry ({x}, {y})")))
    };
    let rget = |a: usize, b: usize, x: usize| {
        r.get(&(a, b, x)).copied().ok_or_else(|| Error::MissingData(format!("missing R[{a}, {b}; {x}]")))
    };
    let mut worst = T::zero();
    let mut equations = 0;
    for inverse in [false, true] {
        let rr = |a, b, x| rget(a, b, x).map(|z: Cplx<T>| if inverse { z.conj() } else { z });
        for (a, b, cc, d) in (0..rank).flat_map(|a| (0..rank).flat_map(move |b| (0..rank).flat_map(move |cc| (0..rank).map(move |d| (a, b, cc, d))))) {
            for e in (0..rank).filter(|&e| adm(a, cc, e) && adm(e, b, d)) {
                for g in (0..rank).filter(|&g| adm(cc, b, g) && adm(a, g, d)) {
                    let lhs = rr(cc, a, e)? * fget(a, cc, b, d, e, g)? * rr(cc, b, g)?;
                    let mut rhs = creal(T::zero());
                    for fl in (0..rank).filter(|&x| adm(a, b, x) && adm(cc, x, d)) {
                        rhs += fget(cc, a, b, d, e, fl)? * rr(cc, fl, d)? * fget(a, b, cc, d, fl, g)?;
                    }
                    worst = worst.max(cabs(lhs - rhs));
                    equations += 1;
                }
            }
        }
    }
    Ok(ConsistencyReport { max_residual: worst, equations, passed: worst < T::tol(CONSISTENCY_TOLERANCE) })
}

#[derive(Debug, Clone)]
pub struct BridgeCandidate<T> {
    /// `mapping[label] = idempotent index`.
    pub mapping: Vec<usize>,
    /// Fitted positive scalars, `scalars[0] = 1`.
    pub scalars: Vec<T>,
    /// `max |q'_{π(a)π(b)}^{π(c)} − N_{ab}^c|` for the rescaled tensor `q'`.
    pub deviation: T,
    /// Distance of the rescaled tensor from the nearest nonnegative integer tensor.
    pub integrality_deviation: T,
}

#[derive(Debug, Clone)]
pub struct BridgeReport<T> {
    pub best: BridgeCandidate<T>,
    pub candidates: usize,
    pub matched: bool,
}

/// Compares a Krein tensor with a fusion tensor up to a vacuum-fixing label
/// bijection and a rescaling `q'_{ij}^k = q_{ij}^k s_i s_j / s_k`, with the
/// `s` fitted by least squares in log space on the common support.
pub fn scheme_fusion_bridge<T: Real>(
    dec: &BoseMesnerDecomposition<T>,
    q: &KreinTensor<T>,
    fs: &FusionSystem<T>,
) -> Result<BridgeReport<T>> {
    let size = dec.d() + 1;
    if q.d() + 1 != size || fs.rank() != size {
        return Err(Error::ShapeMismatch {
            expected: format!("fusion system of rank {size}"),
            found: format!("rank {}", fs.rank()),
        });
    }
    let zero = T::tol(1e-12);
    let mut best: Option<BridgeCandidate<T>> = None;
    let mut candidates = 0;
    for rest in (1..size).permutations(size - 1) {
        candidates += 1;
        let mapping: Vec<usize> = std::iter::once(0).chain(rest).collect();
        let qv = |a: usize, b: usize, cc: usize| q.get(mapping[a], mapping[b], mapping[cc]);
        let triples: Vec<(usize, usize, usize)> = (0..size)
            .flat_map(|a| (0..size).flat_map(move |b| (0..size).map(move |cc| (a, b, cc))))
            .collect();
        let support: Vec<_> = triples
            .iter()
            .copied()
            .filter(|&(a, b, cc)| fs.n[a][b][cc] > 0 && qv(a, b, cc) > zero)
            .collect();
        let unknowns = size - 1;
        let mut logs = vec![T::zero(); size];
        if unknowns > 0 && !support.is_empty() {
            let mut design = DMatrix::<T>::zeros(support.len(), unknowns);
            let mut rhs = DVector::<T>::zeros(support.len());
            for (row, &(a, b, cc)) in support.iter().enumerate() {
                for (x, sign) in [(a, T::one()), (b, T::one()), (cc, -T::one())] {
                    if x > 0 {
                        design[(row, x - 1)] += sign;
                    }
                }
                rhs[row] = T::from_usize_lossy(fs.n[a][b][cc] as usize).ln() - qv(a, b, cc).ln();
            }
            let svd = design.svd(true, true);
            if let Ok(sol) = svd.solve(&rhs, T::tol(1e-12)) {
                for x in 0..unknowns {
                    logs[x + 1] = sol[x];
                }
            }
        }
        let scalars: Vec<T> = logs.iter().map(|l| l.exp()).collect();
        let mut deviation = T::zero();
        let mut integrality = T::zero();
        for &(a, b, cc) in &triples {
            let scaled = qv(a, b, cc) * scalars[a] * scalars[b] / scalars[cc];
            deviation = deviation.max((scaled - T::from_usize_lossy(fs.n[a][b][cc] as usize)).abs());
            let nearest = scaled.round().max(T::zero());
            integrality = integrality.max((scaled - nearest).abs());
        }
        let cand = BridgeCandidate { mapping, scalars, deviation, integrality_deviation: integrality };
        if best.as_ref().is_none_or(|b| cand.deviation < b.deviation) {
            best = Some(cand);
        }
    }
    let best = best.expect("at least one bijection");
    let matched = best.deviation < T::lit(BRIDGE_MATCH_TOLERANCE);
    Ok(BridgeReport { best, candidates, matched })
}
