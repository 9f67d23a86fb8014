//! Association schemes: constructors from groups, group actions and
//! combinatorial families, plus exact axiom verification.
//!
//! A scheme is stored canonically as its relation matrix: `relation[x][y] = j`
//! iff `(x, y) ∈ R_j`. The 0/1 adjacency matrices are derived on demand.

use std::collections::VecDeque;
use std::fmt;

use itertools::Itertools;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::field::GaloisField;
use crate::group::{check_permutations, FiniteGroup};

/// Default cap on the number of vertices a family constructor may produce.
pub const DEFAULT_VERTEX_CAP: usize = 5000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociationScheme {
    n: usize,
    d: usize,
    relation: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
}

impl AssociationScheme {
    /// Wraps a relation matrix after structural checks (square, non-empty,
    /// label count). The scheme axioms are *not* enforced here; use
    /// [`verify_axioms`] or [`AssociationScheme::validated`].
    pub fn from_relation(relation: Vec<Vec<usize>>, labels: Option<Vec<String>>) -> Result<Self> {
        let n = relation.len();
        if n == 0 {
            return Err(Error::Validation("relation matrix is empty".into()));
        }
        if let Some((x, row)) = relation.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Validation(format!(
                "relation row {x} has length {} (expected {n})",
                row.len()
            )));
        }
        let d = relation.iter().flatten().copied().max().unwrap_or(0);
        if let Some(l) = &labels {
            if l.len() != d + 1 {
                return Err(Error::Validation(format!(
                    "{} labels given for {} classes",
                    l.len(),
                    d + 1
                )));
            }
        }
        Ok(Self { n, d, relation, labels })
    }

    /// Like [`from_relation`](Self::from_relation) but also requires every
    /// scheme axiom to hold.
    pub fn validated(relation: Vec<Vec<usize>>, labels: Option<Vec<String>>) -> Result<Self> {
        let s = Self::from_relation(relation, labels)?;
        let report = verify_axioms(&s);
        match report.violations.first() {
            None => Ok(s),
            Some(v) => Err(Error::Validation(v.to_string())),
        }
    }

    /// Vertex count |X|.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of non-identity classes.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn classes(&self) -> usize {
        self.d + 1
    }

    pub fn relation(&self) -> &[Vec<usize>] {
        &self.relation
    }

    pub fn class_of(&self, x: usize, y: usize) -> usize {
        self.relation[x][y]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// The 0/1 matrix of class `j`.
    pub fn adjacency(&self, j: usize) -> DMatrix<i64> {
        DMatrix::from_fn(self.n, self.n, |x, y| i64::from(self.relation[x][y] == j))
    }

    pub fn adjacency_matrices(&self) -> Vec<DMatrix<i64>> {
        (0..=self.d).map(|j| self.adjacency(j)).collect()
    }

    /// Row sums of each adjacency matrix, read off vertex 0.
    pub fn valencies(&self) -> Vec<usize> {
        let mut k = vec![0; self.d + 1];
        for &j in &self.relation[0] {
            k[j] += 1;
        }
        k
    }

    /// The class `j'` with `R_j' = R_jᵀ`, if one exists.
    pub fn transpose_class(&self, j: usize) -> Option<usize> {
        let mut target = None;
        for x in 0..self.n {
            for y in 0..self.n {
                if self.relation[x][y] == j {
                    let t = self.relation[y][x];
                    match target {
                        None => target = Some(t),
                        Some(prev) if prev != t => return None,
                        _ => {}
                    }
                }
            }
        }
        target
    }

    /// `#{z : (x,z) ∈ R_i, (z,y) ∈ R_j}` for every `(i, j)`, flattened as
    /// `i * (d+1) + j`.
    pub(crate) fn path_counts(&self, x: usize, y: usize) -> Vec<u64> {
        let c = self.d + 1;
        let mut counts = vec![0u64; c * c];
        for z in 0..self.n {
            counts[self.relation[x][z] * c + self.relation[z][y]] += 1;
        }
        counts
    }
}

/// Which scheme axiom a violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axiom {
    /// (1) `A_0 = I`.
    Identity,
    /// (2) every class is non-empty and the classes partition X×X.
    Partition,
    /// (3) closure under transpose.
    Transpose,
    /// (4) closure under matrix multiplication.
    Closure,
}

impl Axiom {
    pub fn number(self) -> u8 {
        match self {
            Axiom::Identity => 1,
            Axiom::Partition => 2,
            Axiom::Transpose => 3,
            Axiom::Closure => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    /// Indices exhibiting the failure; their meaning depends on the axiom
    /// (see the `Display` impl).
    pub witness: Vec<usize>,
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = &self.witness;
        match self.axiom {
            Axiom::Identity => write!(
                f,
                "axiom (1) A_0 = I fails at pair ({}, {}) with class {}",
                w[0], w[1], w[2]
            ),
            Axiom::Partition => write!(f, "axiom (2) partition fails: class {} is empty", w[0]),
            Axiom::Transpose => write!(
                f,
                "axiom (3) transpose closure fails for class {}: pairs ({}, {}) and ({}, {}) transpose into different classes",
                w[0], w[1], w[2], w[3], w[4]
            ),
            Axiom::Closure => write!(
                f,
                "axiom (4) closure fails for (i, j) = ({}, {}): pairs ({}, {}) and ({}, {}) lie in the same class but have different path counts",
                w[0], w[1], w[2], w[3], w[4], w[5]
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub passed: bool,
    pub violations: Vec<AxiomViolation>,
    /// Only meaningful when `passed`; false otherwise.
    pub commutative: bool,
}

/// Checks axioms (1)–(4) in exact integer arithmetic and, when they hold,
/// commutativity (5).
pub fn verify_axioms(s: &AssociationScheme) -> AxiomReport {
    let n = s.n;
    let c = s.d + 1;
    let mut violations = Vec::new();

    // (1)
    'ident: for x in 0..n {
        for y in 0..n {
            let j = s.relation[x][y];
            if (x == y) != (j == 0) {
                violations.push(AxiomViolation { axiom: Axiom::Identity, witness: vec![x, y, j] });
                break 'ident;
            }
        }
    }

    // (2)
    let mut seen = vec![false; c];
    for &j in s.relation.iter().flatten() {
        seen[j] = true;
    }
    for (j, _) in seen.iter().enumerate().filter(|(_, &b)| !b) {
        violations.push(AxiomViolation { axiom: Axiom::Partition, witness: vec![j] });
    }

    // (3)
    let mut first: Vec<Option<(usize, usize)>> = vec![None; c];
    'transpose: for x in 0..n {
        for y in 0..n {
            let j = s.relation[x][y];
            match first[j] {
                None => first[j] = Some((x, y)),
                Some((x0, y0)) => {
                    if s.relation[y0][x0] != s.relation[y][x] {
                        violations.push(AxiomViolation {
                            axiom: Axiom::Transpose,
                            witness: vec![j, x0, y0, x, y],
                        });
                        break 'transpose;
                    }
                }
            }
        }
    }

    // (4)
    let mut reps: Vec<Option<(usize, usize, Vec<u64>)>> = vec![None; c];
    'closure: for x in 0..n {
        for y in 0..n {
            let k = s.relation[x][y];
            let counts = s.path_counts(x, y);
            match &reps[k] {
                None => reps[k] = Some((x, y, counts)),
                Some((x0, y0, rc)) => {
                    if let Some(pos) = (0..c * c).find(|&t| rc[t] != counts[t]) {
                        violations.push(AxiomViolation {
                            axiom: Axiom::Closure,
                            witness: vec![pos / c, pos % c, *x0, *y0, x, y],
                        });
                        break 'closure;
                    }
                }
            }
        }
    }

    let passed = violations.is_empty();
    let commutative = passed
        && reps.iter().flatten().all(|(_, _, counts)| {
            (0..c).all(|i| (0..i).all(|j| counts[i * c + j] == counts[j * c + i]))
        });
    AxiomReport { passed, violations, commutative }
}

/// Group scheme: one class per element, `relation[y][z] = x` where `y = x·z`.
/// Class 0 is the identity; the remaining classes follow element order.
pub fn build_group_scheme(g: &FiniteGroup) -> AssociationScheme {
    let order = g.order();
    let class_index = element_class_map(g);
    let relation = (0..order)
        .map(|y| (0..order).map(|z| class_index[g.mul(y, g.inv(z))]).collect())
        .collect();
    let mut labels = vec![String::new(); order];
    for x in 0..order {
        labels[class_index[x]] = format!("g{x}");
    }
    AssociationScheme { n: order, d: order - 1, relation, labels: Some(labels) }
}

fn element_class_map(g: &FiniteGroup) -> Vec<usize> {
    let mut map = vec![0; g.order()];
    let mut next = 1;
    for x in 0..g.order() {
        if x != g.identity() {
            map[x] = next;
            next += 1;
        }
    }
    map
}

/// Subscheme of the group scheme whose classes are sums over conjugacy classes.
pub fn build_conjugacy_scheme(g: &FiniteGroup) -> AssociationScheme {
    let classes = g.conjugacy_classes();
    let mut class_of = vec![0; g.order()];
    for (j, members) in classes.iter().enumerate() {
        for &m in members {
            class_of[m] = j;
        }
    }
    let order = g.order();
    let relation = (0..order)
        .map(|y| (0..order).map(|z| class_of[g.mul(y, g.inv(z))]).collect())
        .collect();
    let labels = classes
        .iter()
        .map(|members| format!("{{{}}}", members.iter().join(",")))
        .collect();
    AssociationScheme { n: order, d: classes.len() - 1, relation, labels: Some(labels) }
}

/// Orbits of a permutation group on pairs. `R_0` is the diagonal; other
/// orbits are numbered by their first pair in row-major order.
pub fn build_orbit_scheme(generators: &[Vec<usize>], n: usize) -> Result<AssociationScheme> {
    if n == 0 {
        return Err(Error::Parameter("point count must be positive".into()));
    }
    check_permutations(generators, n)?;

    let point_orbits = orbits(n, |x, out| out.extend(generators.iter().map(|g| g[x])));
    if point_orbits.len() > 1 {
        let parts = point_orbits
            .iter()
            .map(|o| format!("{{{}}}", o.iter().join(",")))
            .join(" ");
        return Err(Error::Parameter(format!("action is not transitive; orbits: {parts}")));
    }

    let mut relation = vec![vec![usize::MAX; n]; n];
    let mut next = 0;
    for start in std::iter::once((0, 0)).chain((0..n).cartesian_product(0..n)) {
        if relation[start.0][start.1] != usize::MAX {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        relation[start.0][start.1] = next;
        while let Some((x, y)) = queue.pop_front() {
            for g in generators {
                let (gx, gy) = (g[x], g[y]);
                if relation[gx][gy] == usize::MAX {
                    relation[gx][gy] = next;
                    queue.push_back((gx, gy));
                }
            }
        }
        next += 1;
    }
    AssociationScheme::from_relation(relation, None)
}

fn orbits(n: usize, mut step: impl FnMut(usize, &mut Vec<usize>)) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut result = Vec::new();
    let mut buf = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut orbit = vec![s];
        let mut i = 0;
        while i < orbit.len() {
            buf.clear();
            step(orbit[i], &mut buf);
            for &t in &buf {
                if !seen[t] {
                    seen[t] = true;
                    orbit.push(t);
                }
            }
            i += 1;
        }
        orbit.sort_unstable();
        result.push(orbit);
    }
    result
}

fn binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

/// Johnson scheme `J(v, k)` on the k-subsets of `{0..v}`; class `i` holds the
/// pairs meeting in `k − i` points.
pub fn build_johnson(v: usize, k: usize) -> Result<AssociationScheme> {
    build_johnson_capped(v, k, DEFAULT_VERTEX_CAP)
}

pub fn build_johnson_capped(v: usize, k: usize, cap: usize) -> Result<AssociationScheme> {
    if k == 0 || 2 * k > v {
        return Err(Error::Parameter(format!("J({v},{k}) requires 0 < k ≤ v/2")));
    }
    if v > 64 {
        return Err(Error::Parameter(format!("J({v},{k}): v must be at most 64")));
    }
    let count = binomial(v as u64, k as u64);
    if count > cap as u128 {
        return Err(Error::Size { what: format!("C({v},{k})"), count, cap });
    }
    let subsets: Vec<u64> = (0..v)
        .combinations(k)
        .map(|c| c.iter().fold(0u64, |m, &i| m | (1 << i)))
        .collect();
    let relation = subsets
        .iter()
        .map(|a| subsets.iter().map(|b| k - (a & b).count_ones() as usize).collect())
        .collect();
    let labels = (0..=k).map(|i| format!("|∩|={}", k - i)).collect();
    AssociationScheme::from_relation(relation, Some(labels))
}

/// Gaussian binomial coefficient `[v choose d]_q`, or `None` on overflow.
pub fn gaussian_binomial(q: u64, v: u32, d: u32) -> Option<u128> {
    if d > v {
        return Some(0);
    }
    let q = u128::from(q);
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..d {
        num = num.checked_mul(q.checked_pow(v - i)?.checked_sub(1)?)?;
        den = den.checked_mul(q.checked_pow(i + 1)?.checked_sub(1)?)?;
    }
    Some(num / den)
}

/// Grassmann scheme `J_q(v, d)` on the d-dimensional subspaces of GF(q)^v.
///
/// Subspaces are enumerated as reduced row echelon bases. Class `j` holds the
/// pairs with `dim(α ∩ β) = d − j`, so that class 0 is the identity relation.
pub fn build_grassmann(q: usize, v: usize, d: usize) -> Result<AssociationScheme> {
    build_grassmann_capped(q, v, d, DEFAULT_VERTEX_CAP)
}

pub fn build_grassmann_capped(q: usize, v: usize, d: usize, cap: usize) -> Result<AssociationScheme> {
    let field = GaloisField::new(q)?;
    if d == 0 || 2 * d > v {
        return Err(Error::Parameter(format!("J_{q}({v},{d}) requires 0 < d ≤ v/2")));
    }
    let count = gaussian_binomial(q as u64, v as u32, d as u32).unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(Error::Size { what: format!("[{v} choose {d}]_{q}"), count, cap });
    }
    let subspaces = enumerate_rref(&field, v, d);
    debug_assert_eq!(subspaces.len() as u128, count);
    let n = subspaces.len();
    let mut relation = vec![vec![0; n]; n];
    let mut stacked: Vec<Vec<u8>> = Vec::with_capacity(2 * d);
    for a in 0..n {
        for b in (a + 1)..n {
            stacked.clear();
            stacked.extend(subspaces[a].iter().cloned());
            stacked.extend(subspaces[b].iter().cloned());
            let rank = field.rref(&mut stacked);
            let meet = 2 * d - rank;
            relation[a][b] = d - meet;
            relation[b][a] = d - meet;
        }
    }
    let labels = (0..=d).map(|j| format!("dim∩={}", d - j)).collect();
    AssociationScheme::from_relation(relation, Some(labels))
}

fn enumerate_rref(field: &GaloisField, v: usize, d: usize) -> Vec<Vec<Vec<u8>>> {
    let q = field.order() as u8;
    let mut out = Vec::new();
    for pivots in (0..v).combinations(d) {
        let free: Vec<(usize, usize)> = (0..d)
            .flat_map(|r| {
                let pivots = &pivots;
                ((pivots[r] + 1)..v).filter(move |c| !pivots.contains(c)).map(move |c| (r, c))
            })
            .collect();
        let mut values = vec![0u8; free.len()];
        loop {
            let mut m = vec![vec![0u8; v]; d];
            for (r, &p) in pivots.iter().enumerate() {
                m[r][p] = 1;
            }
            for (&(r, c), &x) in free.iter().zip(&values) {
                m[r][c] = x;
            }
            out.push(m);
            // odometer increment
            let mut pos = 0;
            loop {
                if pos == values.len() {
                    break;
                }
                values[pos] += 1;
                if values[pos] < q {
                    break;
                }
                values[pos] = 0;
                pos += 1;
            }
            if pos == values.len() {
                break;
            }
        }
    }
    out
}
