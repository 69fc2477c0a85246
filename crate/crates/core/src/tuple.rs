//! d-tuples of square matrices, viewed as row operators `(ℂⁿ)^d → ℂⁿ`.

use std::ops::Index;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{direct_sum, inverse, kron, spectral_norm, CMat};

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTuple {
    n: usize,
    mats: Vec<CMat>,
}

impl MatrixTuple {
    pub fn new(mats: Vec<CMat>) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::Invalid("a tuple needs at least one matrix".into()));
        }
        let n = mats[0].nrows();
        for (j, m) in mats.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "matrix {} is {}x{}, expected {n}x{n}",
                    j + 1,
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(Self { n, mats })
    }

    /// Builds a tuple from real row-major data, one slice per matrix.
    pub fn from_real_rows(n: usize, rows: &[&[f64]]) -> Result<Self> {
        let mats = rows
            .iter()
            .map(|r| {
                if r.len() != n * n {
                    return Err(Error::DimensionMismatch("wrong number of entries".into()));
                }
                Ok(CMat::from_row_iterator(n, n, r.iter().map(|&x| Complex64::new(x, 0.0))))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(mats)
    }

    pub fn zeros(d: usize, n: usize) -> Self {
        Self { n, mats: vec![CMat::zeros(n, n); d] }
    }

    /// A tuple of 1×1 matrices, i.e. a scalar point of ℂ^d.
    pub fn scalar_point(z: &[Complex64]) -> Self {
        Self { n: 1, mats: z.iter().map(|&v| CMat::from_element(1, 1, v)).collect() }
    }

    pub fn d(&self) -> usize {
        self.mats.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.mats
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CMat> {
        self.mats.iter()
    }

    pub fn map(&self, f: impl Fn(&CMat) -> CMat) -> Self {
        let mats: Vec<CMat> = self.mats.iter().map(f).collect();
        let n = mats.first().map_or(0, |m| m.nrows());
        Self { n, mats }
    }

    /// Component-wise adjoint, `row(Z*) = (Z₁*, …, Z_d*)`.
    pub fn adjoint(&self) -> Self {
        self.map(|m| m.adjoint())
    }

    /// Component-wise transpose, `row(Zᵗ)`.
    pub fn transpose(&self) -> Self {
        self.map(|m| m.transpose())
    }

    /// Entry-wise conjugate `Z̄ = row(Z*)ᵗ`.
    pub fn conj(&self) -> Self {
        self.map(|m| m.map(|z| z.conj()))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|m| m * s)
    }

    /// `(S⁻¹ Z_j S)_j`.
    pub fn similarity(&self, s: &CMat) -> Result<Self> {
        let sinv = inverse(s).ok_or_else(|| Error::Invalid("singular similarity".into()))?;
        Ok(self.map(|m| &sinv * m * s))
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.d() != other.d() {
            return Err(Error::DimensionMismatch("tuples have different d".into()));
        }
        Ok(Self {
            n: self.n + other.n,
            mats: self.mats.iter().zip(&other.mats).map(|(a, b)| direct_sum(a, b)).collect(),
        })
    }

    /// The row operator `[Z₁ ⋯ Z_d]` as an `n × nd` matrix.
    pub fn row_matrix(&self) -> CMat {
        let mut out = CMat::zeros(self.n, self.n * self.d());
        for (j, m) in self.mats.iter().enumerate() {
            out.view_mut((0, j * self.n), (self.n, self.n)).copy_from(m);
        }
        out
    }

    /// Operator norm of the row operator.
    pub fn row_norm(&self) -> f64 {
        spectral_norm(&self.row_matrix())
    }

    /// `Σ_j Z_j X Z_j*`.
    pub fn cp_apply(&self, x: &CMat) -> CMat {
        let mut acc = CMat::zeros(self.n, self.n);
        for m in &self.mats {
            acc += m * x * m.adjoint();
        }
        acc
    }

    /// `Σ_j Z_j Z_j*`.
    pub fn row_gram(&self) -> CMat {
        self.cp_apply(&CMat::identity(self.n, self.n))
    }

    /// `Σ_j Z_j ⊗ A_j` with `Z = self`.
    pub fn kron_sum(&self, a: &MatrixTuple) -> Result<CMat> {
        if self.d() != a.d() {
            return Err(Error::DimensionMismatch(format!(
                "tuples have d = {} and d = {}",
                self.d(),
                a.d()
            )));
        }
        let mut acc = CMat::zeros(self.n * a.n, self.n * a.n);
        for (z, m) in self.mats.iter().zip(&a.mats) {
            acc += kron(z, m);
        }
        Ok(acc)
    }

    pub fn max_abs(&self) -> f64 {
        self.mats
            .iter()
            .flat_map(|m| m.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for MatrixTuple {
    type Output = CMat;

    fn index(&self, j: usize) -> &CMat {
        &self.mats[j]
    }
}
