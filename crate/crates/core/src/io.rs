//! JSON formats for every data kind, with validation on load.
//!
//! Matrices are nested row-major arrays; a complex entry is written as a
//! `[re, im]` pair and a real entry as a bare number. Floats use
//! shortest round-trip formatting, so `f64` values reload bit-for-bit.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::anyons::{FMatrix, FTable, FusionSystem, RTable};
use crate::error::{Error, Result};
use crate::group::{CayleyJson, FiniteGroup};
use crate::parameters::{IntersectionTensor, KreinTensor};
use crate::scalar::{check_distribution, CMatrix, Real};
use crate::scheme::AssociationScheme;
use crate::spectral::BoseMesnerDecomposition;

/// Tolerance on the sum of a loaded distribution.
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-12;

/// A data kind with a JSON representation.
pub trait JsonDocument: Sized {
    fn to_value(&self) -> Value;
    fn from_value(value: Value) -> Result<Self>;

    fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("JSON values always serialize")
    }

    fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_value(value)
    }
}

pub fn save<K: JsonDocument>(path: impl AsRef<Path>, object: &K) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, object.to_json_string() + "\n")
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn load<K: JsonDocument>(path: impl AsRef<Path>) -> Result<K> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    K::from_json_str(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn decode<D: for<'de> Deserialize<'de>>(value: Value, what: &str) -> Result<D> {
    serde_json::from_value(value).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn encode<S: Serialize>(s: &S) -> Value {
    serde_json::to_value(s).expect("plain data serializes")
}

#[derive(Serialize, Deserialize)]
struct SchemeJson {
    n: usize,
    d: usize,
    relation: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl JsonDocument for AssociationScheme {
    fn to_value(&self) -> Value {
        encode(&SchemeJson {
            n: self.n(),
            d: self.d(),
            relation: self.relation().to_vec(),
            labels: self.labels().map(<[String]>::to_vec),
        })
    }

    /// Loads and checks every scheme axiom.
    fn from_value(value: Value) -> Result<Self> {
        let raw: SchemeJson = decode(value, "scheme")?;
        if raw.relation.len() != raw.n {
            return Err(Error::Validation(format!(
                "scheme declares n = {} but the relation matrix has {} rows",
                raw.n,
                raw.relation.len()
            )));
        }
        let s = AssociationScheme::validated(raw.relation, raw.labels)?;
        if s.d() != raw.d {
            return Err(Error::Validation(format!(
                "scheme declares d = {} but the relation matrix uses {} classes",
                raw.d,
                s.d()
            )));
        }
        Ok(s)
    }
}

/// Parses a scheme with structural checks only, so that axiom violations
/// can be reported instead of rejected.
pub fn scheme_from_json_unchecked(text: &str) -> Result<AssociationScheme> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let raw: SchemeJson = decode(value, "scheme")?;
    AssociationScheme::from_relation(raw.relation, raw.labels)
}

impl JsonDocument for FiniteGroup {
    fn to_value(&self) -> Value {
        encode(&self.to_json())
    }

    fn from_value(value: Value) -> Result<Self> {
        FiniteGroup::from_json(decode::<CayleyJson>(value, "Cayley table")?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

fn complex_to_value<T: Real>(m: &CMatrix<T>) -> Value {
    let all_real = m.iter().all(|z| z.im == T::zero());
    let rows: Vec<Vec<Entry>> = m
        .row_iter()
        .map(|r| {
            r.iter()
                .map(|z| if all_real { Entry::Real(z.re.as_f64()) } else { Entry::Complex([z.re.as_f64(), z.im.as_f64()]) })
                .collect()
        })
        .collect();
    encode(&rows)
}

fn rows_to_matrix<E, X>(rows: Vec<Vec<E>>, what: &str, f: impl Fn(E) -> X) -> Result<DMatrix<X>>
where
    X: nalgebra::Scalar,
{
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != ncols) {
        return Err(Error::Validation(format!("{what}: row {i} has length {} (expected {ncols})", r.len())));
    }
    let flat: Vec<X> = rows.into_iter().flatten().map(f).collect();
    Ok(DMatrix::from_row_iterator(nrows, ncols, flat))
}

fn complex_from_value<T: Real>(value: Value, what: &str) -> Result<CMatrix<T>> {
    let rows: Vec<Vec<Entry>> = decode(value, what)?;
    rows_to_matrix(rows, what, |e| match e {
        Entry::Real(x) => Complex::new(T::lit(x), T::zero()),
        Entry::Complex([re, im]) => Complex::new(T::lit(re), T::lit(im)),
    })
}

impl<T: Real> JsonDocument for DMatrix<Complex<T>> {
    fn to_value(&self) -> Value {
        complex_to_value(self)
    }

    fn from_value(value: Value) -> Result<Self> {
        complex_from_value(value, "matrix")
    }
}

impl<T: Real> JsonDocument for DMatrix<T> {
    fn to_value(&self) -> Value {
        let rows: Vec<Vec<f64>> = self.row_iter().map(|r| r.iter().map(|x| x.as_f64()).collect()).collect();
        encode(&rows)
    }

    /// Real matrix; complex entries are accepted only with zero imaginary part.
    fn from_value(value: Value) -> Result<Self> {
        let m: CMatrix<T> = complex_from_value(value, "matrix")?;
        if m.iter().any(|z| z.im != T::zero()) {
            return Err(Error::Validation("matrix: expected real entries".into()));
        }
        Ok(m.map(|z| z.re))
    }
}

/// A probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T>(pub Vec<T>);

impl<T: Real> JsonDocument for Distribution<T> {
    fn to_value(&self) -> Value {
        encode(&self.0.iter().map(|x| x.as_f64()).collect::<Vec<_>>())
    }

    fn from_value(value: Value) -> Result<Self> {
        let raw: Vec<f64> = decode(value, "distribution")?;
        let p: Vec<T> = raw.into_iter().map(T::lit).collect();
        check_distribution(&p, DISTRIBUTION_TOLERANCE)?;
        Ok(Self(p))
    }
}

#[derive(Serialize, Deserialize)]
struct TensorJson<X> {
    d: usize,
    entries: Vec<Vec<Vec<X>>>,
}

fn check_tensor_shape<X>(t: &TensorJson<X>) -> Result<()> {
    let c = t.d + 1;
    let ok = t.entries.len() == c && t.entries.iter().all(|m| m.len() == c && m.iter().all(|r| r.len() == c));
    if ok {
        Ok(())
    } else {
        Err(Error::Validation(format!("tensor entries are not ({c})×({c})×({c}) for d = {}", t.d)))
    }
}

impl JsonDocument for IntersectionTensor {
    fn to_value(&self) -> Value {
        encode(&TensorJson { d: self.d(), entries: self.entries().to_vec() })
    }

    fn from_value(value: Value) -> Result<Self> {
        let raw: TensorJson<u64> = decode(value, "intersection tensor")?;
        check_tensor_shape(&raw)?;
        IntersectionTensor::from_entries(raw.entries)
    }
}

impl<T: Real> JsonDocument for KreinTensor<T> {
    fn to_value(&self) -> Value {
        let entries = self
            .entries()
            .iter()
            .map(|m| m.iter().map(|r| r.iter().map(|x| x.as_f64()).collect()).collect())
            .collect();
        encode(&TensorJson::<f64> { d: self.d(), entries })
    }

    fn from_value(value: Value) -> Result<Self> {
        let raw: TensorJson<f64> = decode(value, "Krein tensor")?;
        check_tensor_shape(&raw)?;
        let entries = raw
            .entries
            .into_iter()
            .map(|m| m.into_iter().map(|r| r.into_iter().map(T::lit).collect()).collect())
            .collect();
        KreinTensor::from_entries(entries)
    }
}

impl<T: Real> JsonDocument for BoseMesnerDecomposition<T> {
    fn to_value(&self) -> Value {
        serde_json::json!({
            "scheme": self.scheme().to_value(),
            "multiplicities": self.multiplicities(),
            "idempotents": self.idempotents().iter().map(complex_to_value).collect::<Vec<_>>(),
            "P": complex_to_value(self.eigenmatrix_p()),
            "Q": complex_to_value(self.eigenmatrix_q()),
        })
    }

    fn from_value(value: Value) -> Result<Self> {
        let Value::Object(mut map) = value else {
            return Err(Error::Parse("decomposition: expected an object".into()));
        };
        let mut take = |key: &str| map.remove(key).ok_or_else(|| Error::Parse(format!("decomposition: missing field {key:?}")));
        let scheme = AssociationScheme::from_value(take("scheme")?)?;
        let multiplicities: Vec<usize> = decode(take("multiplicities")?, "multiplicities")?;
        let idempotents = match take("idempotents")? {
            Value::Array(items) => items
                .into_iter()
                .map(|v| complex_from_value(v, "idempotent"))
                .collect::<Result<Vec<_>>>()?,
            _ => return Err(Error::Parse("decomposition: idempotents must be an array".into())),
        };
        let p = complex_from_value(take("P")?, "P")?;
        let q = complex_from_value(take("Q")?, "Q")?;
        BoseMesnerDecomposition::from_parts(scheme, idempotents, multiplicities, p, q)
    }
}

#[derive(Serialize, Deserialize)]
struct FMatrixJson {
    rows: Vec<String>,
    cols: Vec<String>,
    matrix: Value,
}

#[derive(Serialize, Deserialize)]
struct FusionJson {
    labels: Vec<String>,
    #[serde(rename = "N")]
    n: Vec<Vec<Vec<u32>>>,
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    f: Option<BTreeMap<String, FMatrixJson>>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    r: Option<BTreeMap<String, [f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    twist: Option<Vec<[f64; 2]>>,
}

fn parse_key(key: &str, labels: &[String], arity: usize, what: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = key.split(',').map(str::trim).collect();
    if parts.len() != arity {
        return Err(Error::Validation(format!("{what} key {key:?} must name {arity} labels")));
    }
    parts.iter().map(|p| index_of(labels, p, what)).collect()
}

fn index_of(labels: &[String], name: &str, what: &str) -> Result<usize> {
    labels
        .iter()
        .position(|l| l == name)
        .ok_or_else(|| Error::UnknownLabel(format!("{what} refers to unknown label {name:?}")))
}

impl<T: Real> JsonDocument for FusionSystem<T> {
    fn to_value(&self) -> Value {
        let labels = self.labels();
        let name = |i: usize| labels[i].clone();
        let f = self.f_table().map(|table| {
            table
                .iter()
                .map(|(&(a, b, c, d), fm)| {
                    (
                        [a, b, c, d].map(name).join(","),
                        FMatrixJson {
                            rows: fm.rows.iter().map(|&x| name(x)).collect(),
                            cols: fm.cols.iter().map(|&x| name(x)).collect(),
                            matrix: complex_to_value(&fm.matrix),
                        },
                    )
                })
                .collect()
        });
        let r = self.r_table().map(|table| {
            table
                .iter()
                .map(|(&(a, b, c), z)| ([a, b, c].map(name).join(","), [z.re.as_f64(), z.im.as_f64()]))
                .collect()
        });
        let twist = self.twist().map(|t| t.iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect());
        encode(&FusionJson { labels: labels.to_vec(), n: self.fusion_tensor().to_vec(), f, r, twist })
    }

    fn from_value(value: Value) -> Result<Self> {
        let raw: FusionJson = decode(value, "fusion system")?;
        let labels = raw.labels;
        let f = match raw.f {
            None => None,
            Some(entries) => {
                let mut table = FTable::new();
                for (key, fm) in entries {
                    let k = parse_key(&key, &labels, 4, "F")?;
                    let rows = fm.rows.iter().map(|x| index_of(&labels, x, "F")).collect::<Result<Vec<_>>>()?;
                    let cols = fm.cols.iter().map(|x| index_of(&labels, x, "F")).collect::<Result<Vec<_>>>()?;
                    let matrix = complex_from_value(fm.matrix, "F matrix")?;
                    table.insert((k[0], k[1], k[2], k[3]), FMatrix { rows, cols, matrix });
                }
                Some(table)
            }
        };
        let r = match raw.r {
            None => None,
            Some(entries) => {
                let mut table = RTable::new();
                for (key, [re, im]) in entries {
                    let k = parse_key(&key, &labels, 3, "R")?;
                    table.insert((k[0], k[1], k[2]), Complex::new(T::lit(re), T::lit(im)));
                }
                Some(table)
            }
        };
        let twist = raw.twist.map(|t| t.into_iter().map(|[re, im]| Complex::new(T::lit(re), T::lit(im))).collect());
        FusionSystem::new(labels, raw.n, f, r, twist)
    }
}
