use serde::{Deserialize, Serialize};

use super::parse::parse_scalar;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// A vector of reals.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorN(Vec<Scalar>);

impl VectorN {
    pub fn new(entries: Vec<Scalar>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Invalid("vector must have positive dimension".into()));
        }
        Ok(VectorN(entries))
    }

    pub fn zeros(dim: usize) -> Self {
        VectorN(vec![Scalar::zero(); dim.max(1)])
    }

    pub fn from_ints(v: &[i64]) -> Result<Self> {
        VectorN::new(v.iter().map(|&k| Scalar::from_int(k)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.0
    }

    pub fn get(&self, i: usize) -> &Scalar {
        &self.0[i]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_certainly_zero)
    }

    pub fn sub(&self, other: &VectorN) -> Result<VectorN> {
        check_dim(self.dim(), other.dim())?;
        Ok(VectorN(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    pub fn add(&self, other: &VectorN) -> Result<VectorN> {
        check_dim(self.dim(), other.dim())?;
        Ok(VectorN(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }

    pub fn sub_ints(&self, a: &[i64]) -> Result<VectorN> {
        check_dim(self.dim(), a.len())?;
        Ok(VectorN(
            self.0.iter().zip(a).map(|(x, &k)| x - &Scalar::from_int(k)).collect(),
        ))
    }

    /// Inner product with an integer vector.
    pub fn dot_ints(&self, y: &[i64]) -> Result<Scalar> {
        check_dim(self.dim(), y.len())?;
        Ok(self
            .0
            .iter()
            .zip(y)
            .fold(Scalar::zero(), |acc, (x, &k)| &acc + &x.mul_int(k)))
    }

    pub fn dot(&self, other: &VectorN) -> Result<Scalar> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .fold(Scalar::zero(), |acc, (a, b)| &acc + &(a * b)))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(Scalar::to_f64).collect()
    }

    /// Nearest integer vector, componentwise.
    pub fn nearest_ints(&self) -> Result<Vec<i64>> {
        self.0
            .iter()
            .map(|x| {
                use num_traits::ToPrimitive;
                x.nearest_int()
                    .to_i64()
                    .ok_or_else(|| Error::Invalid("coordinate exceeds 64-bit range".into()))
            })
            .collect()
    }

    /// Componentwise reduction into `[0, 1)` (by the nearest-lower integer
    /// of the center).
    pub fn reduce_mod_one(&self) -> VectorN {
        VectorN(
            self.0
                .iter()
                .map(|x| {
                    let fl = x.center().floor().to_integer();
                    x.add_int(&-fl)
                })
                .collect(),
        )
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// Supremum norm `max_i |v_i|`.
///
/// With enclosures the result encloses the maximum even when the arg-max is
/// ambiguous.
pub fn sup_norm(v: &VectorN) -> Scalar {
    v.0.iter()
        .map(Scalar::abs)
        .reduce(|a, b| a.max_enclosure(&b))
        .unwrap_or_else(Scalar::zero)
}

/// Distance to the nearest integer vector in the sup norm.
pub fn dist_to_int(v: &VectorN) -> Scalar {
    v.0.iter()
        .map(Scalar::dist_to_int)
        .reduce(|a, b| a.max_enclosure(&b))
        .unwrap_or_else(Scalar::zero)
}

/// `max_i |q_i|` for an integer vector.
pub fn int_sup_norm(q: &[i64]) -> u64 {
    q.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
}

/// A real `n x m` matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixNM {
    n: usize,
    m: usize,
    entries: Vec<Scalar>,
}

impl MatrixNM {
    pub fn new(n: usize, m: usize, entries: Vec<Scalar>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Invalid("matrix dimensions must be positive".into()));
        }
        check_dim(n * m, entries.len())?;
        Ok(MatrixNM { n, m, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::Invalid("ragged matrix rows".into()));
        }
        MatrixNM::new(n, m, rows.into_iter().flatten().collect())
    }

    /// `1 x 1` matrix.
    pub fn scalar(x: Scalar) -> Self {
        MatrixNM {
            n: 1,
            m: 1,
            entries: vec![x],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.m + j]
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.entries[i * self.m..(i + 1) * self.m]
    }

    pub fn transpose(&self) -> MatrixNM {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.m {
            for i in 0..self.n {
                entries.push(self.get(i, j).clone());
            }
        }
        MatrixNM {
            n: self.m,
            m: self.n,
            entries,
        }
    }

    /// Column `j` as a vector in `R^n`.
    pub fn column(&self, j: usize) -> VectorN {
        VectorN((0..self.n).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn all_exact(&self) -> bool {
        self.entries.iter().all(Scalar::is_exact)
    }

    /// `Theta q` for an integer vector `q`.
    pub fn mul_ints(&self, q: &[i64]) -> Result<VectorN> {
        check_dim(self.m, q.len())?;
        Ok(VectorN(
            (0..self.n)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(q)
                        .filter(|(_, &k)| k != 0)
                        .fold(Scalar::zero(), |acc, (x, &k)| &acc + &x.mul_int(k))
                })
                .collect(),
        ))
    }

    /// General matrix-vector product.
    pub fn mul_vec(&self, q: &VectorN) -> Result<VectorN> {
        check_dim(self.m, q.dim())?;
        Ok(VectorN(
            (0..self.n)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(q.entries())
                        .fold(Scalar::zero(), |acc, (x, y)| &acc + &(x * y))
                })
                .collect(),
        ))
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }
}

/// `Theta q` for a general vector.
pub fn mat_vec(theta: &MatrixNM, q: &VectorN) -> Result<VectorN> {
    theta.mul_vec(q)
}

/// On-disk matrix document: `{"n": .., "m": .., "entries": [[..], ..]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub n: usize,
    pub m: usize,
    pub entries: Vec<Vec<String>>,
}

impl MatrixDoc {
    pub fn parse(&self, bits: u32) -> Result<MatrixNM> {
        if self.entries.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: self.entries.len(),
            });
        }
        let mut rows = Vec::with_capacity(self.n);
        for row in &self.entries {
            if row.len() != self.m {
                return Err(Error::DimensionMismatch {
                    expected: self.m,
                    found: row.len(),
                });
            }
            rows.push(
                row.iter()
                    .map(|s| parse_scalar(s, bits))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        MatrixNM::from_rows(rows)
    }
}

pub fn parse_matrix_json(text: &str, bits: u32) -> Result<MatrixNM> {
    let doc: MatrixDoc =
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("matrix JSON: {e}")))?;
    doc.parse(bits)
}
