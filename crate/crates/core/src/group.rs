//! Finite groups given by explicit Cayley tables.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite group stored as its multiplication table.
///
/// `cayley[x][y]` is the index of `x·y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    cayley: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    identity: usize,
    name: Option<String>,
}

/// Associativity is checked exhaustively up to this order.
pub const ASSOCIATIVITY_CHECK_LIMIT: usize = 64;

/// On-disk form of a group: `{"order": int, "cayley": [[int]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CayleyJson {
    pub order: usize,
    pub cayley: Vec<Vec<usize>>,
}

impl FiniteGroup {
    /// Validates a Cayley table and derives the identity and inverses.
    pub fn from_cayley(cayley: Vec<Vec<usize>>) -> Result<Self> {
        let order = cayley.len();
        if order == 0 {
            return Err(Error::Construction("empty Cayley table".into()));
        }
        for (x, row) in cayley.iter().enumerate() {
            if row.len() != order {
                return Err(Error::Construction(format!(
                    "row {x} has length {} (expected {order})",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&v| v >= order) {
                return Err(Error::Construction(format!(
                    "entry {bad} in row {x} is out of range"
                )));
            }
            if !is_permutation(row) {
                return Err(Error::Construction(format!("row {x} is not a permutation")));
            }
        }
        for y in 0..order {
            let col: Vec<usize> = (0..order).map(|x| cayley[x][y]).collect();
            if !is_permutation(&col) {
                return Err(Error::Construction(format!("column {y} is not a permutation")));
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| cayley[e][x] == x && cayley[x][e] == x))
            .ok_or_else(|| Error::Construction("no two-sided identity element".into()))?;
        let mut inverse = vec![0; order];
        for x in 0..order {
            let inv = (0..order)
                .find(|&y| cayley[x][y] == identity && cayley[y][x] == identity)
                .ok_or_else(|| Error::Construction(format!("element {x} has no inverse")))?;
            inverse[x] = inv;
        }
        if order <= ASSOCIATIVITY_CHECK_LIMIT {
            for (x, y, z) in (0..order).cartesian_product(0..order).cartesian_product(0..order).map(|((a, b), c)| (a, b, c)) {
                if cayley[cayley[x][y]][z] != cayley[x][cayley[y][z]] {
                    return Err(Error::Construction(format!(
                        "associativity fails on triple ({x}, {y}, {z})"
                    )));
                }
            }
        }
        Ok(Self { order, cayley, inverse, identity, name: None })
    }

    /// Builds the group generated by a set of permutations (closure by
    /// breadth-first multiplication). Intended for small groups.
    pub fn from_permutations(generators: &[Vec<usize>]) -> Result<Self> {
        let elements = permutation_closure(generators)?;
        let index: std::collections::HashMap<&Vec<usize>, usize> =
            elements.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let cayley = elements
            .iter()
            .map(|a| elements.iter().map(|b| index[&compose(a, b)]).collect())
            .collect();
        Self::from_cayley(cayley)
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("cyclic group order must be positive".into()));
        }
        let cayley = (0..n).map(|x| (0..n).map(|y| (x + y) % n).collect()).collect();
        Ok(Self::from_cayley(cayley)?.named(format!("Z{n}")))
    }

    /// Symmetric group on `n` points (n ≤ 5).
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 || n > 5 {
            return Err(Error::Parameter(format!("symmetric group S{n} not supported (1 ≤ n ≤ 5)")));
        }
        let elements: Vec<Vec<usize>> = (0..n).permutations(n).collect();
        Ok(Self::from_element_list(&elements)?.named(format!("S{n}")))
    }

    /// Dihedral group of the regular `n`-gon, order `2n`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Parameter(format!("dihedral group D{n} needs n ≥ 3")));
        }
        // ρ^r τ^s sits at index s·n + r, so rotations come first
        let idx = |r: usize, s: usize| s * n + r;
        let mut cayley = vec![vec![0; 2 * n]; 2 * n];
        for s1 in 0..2 {
            for r1 in 0..n {
                for s2 in 0..2 {
                    for r2 in 0..n {
                        // (ρ^r1 τ^s1)(ρ^r2 τ^s2) = ρ^(r1 ± r2) τ^(s1+s2)
                        let r = if s1 == 0 { (r1 + r2) % n } else { (r1 + n - r2) % n };
                        cayley[idx(r1, s1)][idx(r2, s2)] = idx(r, (s1 + s2) % 2);
                    }
                }
            }
        }
        Ok(Self::from_cayley(cayley)?.named(format!("D{n}")))
    }

    /// Quaternion group {±1, ±i, ±j, ±k}.
    pub fn quaternion() -> Result<Self> {
        // unit u ∈ {1,i,j,k} with sign; index = 2u + (sign negative)
        const TABLE: [[(usize, bool); 4]; 4] = [
            [(0, false), (1, false), (2, false), (3, false)],
            [(1, false), (0, true), (3, false), (2, true)],
            [(2, false), (3, true), (0, true), (1, false)],
            [(3, false), (2, false), (1, true), (0, true)],
        ];
        let mut cayley = vec![vec![0; 8]; 8];
        for a in 0..8 {
            for b in 0..8 {
                let (u, neg) = TABLE[a / 2][b / 2];
                let sign = neg ^ (a % 2 == 1) ^ (b % 2 == 1);
                cayley[a][b] = 2 * u + usize::from(sign);
            }
        }
        Ok(Self::from_cayley(cayley)?.named("Q8".to_string()))
    }

    /// Resolves a built-in name: `Z<n>`, `S3`, `S4`, `D<n>`, `Q8`
    /// (case-insensitive, an optional underscore is accepted).
    pub fn builtin(name: &str) -> Result<Self> {
        let norm = name.to_ascii_uppercase().replace('_', "");
        let (head, tail) = norm.split_at(norm.len().min(1));
        let num = tail.parse::<usize>().ok();
        match (head, num) {
            ("Z", Some(n)) => Self::cyclic(n),
            ("C", Some(n)) => Self::cyclic(n),
            ("S", Some(n)) => Self::symmetric(n),
            ("D", Some(n)) => Self::dihedral(n),
            ("Q", Some(8)) => Self::quaternion(),
            _ => Err(Error::Parameter(format!("unknown built-in group '{name}'"))),
        }
    }

    fn from_element_list(elements: &[Vec<usize>]) -> Result<Self> {
        let index: std::collections::HashMap<&Vec<usize>, usize> =
            elements.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let cayley = elements
            .iter()
            .map(|a| elements.iter().map(|b| index[&compose(a, b)]).collect())
            .collect();
        Self::from_cayley(cayley)
    }

    fn named(mut self, name: String) -> Self {
        self.name = Some(name);
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.cayley[x][y]
    }

    pub fn inv(&self, x: usize) -> usize {
        self.inverse[x]
    }

    pub fn cayley(&self) -> &[Vec<usize>] {
        &self.cayley
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|x| (0..x).all(|y| self.cayley[x][y] == self.cayley[y][x]))
    }

    /// Order of each element.
    pub fn element_order(&self, x: usize) -> usize {
        let mut acc = x;
        let mut k = 1;
        while acc != self.identity {
            acc = self.cayley[acc][x];
            k += 1;
        }
        k
    }

    /// Conjugacy classes, the identity's class first and the rest ordered by
    /// their smallest member.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut class_of = vec![usize::MAX; self.order];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut seeds: Vec<usize> = vec![self.identity];
        seeds.extend((0..self.order).filter(|&x| x != self.identity));
        for x in seeds {
            if class_of[x] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut members: Vec<usize> = (0..self.order)
                .map(|g| self.mul(self.mul(g, x), self.inv(g)))
                .collect();
            members.sort_unstable();
            members.dedup();
            for &m in &members {
                class_of[m] = id;
            }
            classes.push(members);
        }
        classes
    }

    pub fn to_json(&self) -> CayleyJson {
        CayleyJson { order: self.order, cayley: self.cayley.clone() }
    }

    pub fn from_json(json: CayleyJson) -> Result<Self> {
        if json.order != json.cayley.len() {
            return Err(Error::Validation(format!(
                "order {} does not match Cayley table size {}",
                json.order,
                json.cayley.len()
            )));
        }
        Self::from_cayley(json.cayley)
    }
}

fn is_permutation(row: &[usize]) -> bool {
    let mut seen = vec![false; row.len()];
    for &v in row {
        if v >= row.len() || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

/// `(a ∘ b)(i) = a(b(i))`.
pub(crate) fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&i| a[i]).collect()
}

/// Validates a list of permutations of a common point set and returns the
/// point count.
pub(crate) fn check_permutations(generators: &[Vec<usize>], n: usize) -> Result<()> {
    for (g, p) in generators.iter().enumerate() {
        if p.len() != n || !is_permutation(p) {
            return Err(Error::Parameter(format!(
                "generator {g} is not a permutation of 0..{n}"
            )));
        }
    }
    Ok(())
}

fn permutation_closure(generators: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    let n = generators.first().map(Vec::len).ok_or_else(|| {
        Error::Parameter("at least one generator is required".into())
    })?;
    check_permutations(generators, n)?;
    let identity: Vec<usize> = (0..n).collect();
    let mut seen = std::collections::HashSet::new();
    let mut elements = vec![identity.clone()];
    seen.insert(identity);
    let mut frontier = 0;
    while frontier < elements.len() {
        let current = elements[frontier].clone();
        frontier += 1;
        for g in generators {
            let next = compose(g, &current);
            if seen.insert(next.clone()) {
                elements.push(next);
                if elements.len() > 100_000 {
                    return Err(Error::Size {
                        what: "generated group order".into(),
                        count: elements.len() as u128,
                        cap: 100_000,
                    });
                }
            }
        }
    }
    Ok(elements)
}
