//! JSON wire formats.
//!
//! Complex numbers are `[re, im]` (a bare number is read as real), vectors
//! are arrays of complex numbers and matrices are arrays of rows. Unknown
//! fields are rejected and every matrix is checked against the size cap.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::certify::PeakCertificate;
use crate::error::{Error, Result};
use crate::inner::{CoisometryPair, InnerReport};
use crate::linalg::{CMat, CVec};
use crate::realization::{DescriptorRealization, FmRealization};
use crate::states::Convention;
use crate::tol::{check_size, Tolerances};
use crate::tuple::MatrixTuple;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WireComplex {
    Pair([f64; 2]),
    Real(f64),
}

impl From<Complex64> for WireComplex {
    fn from(v: Complex64) -> Self {
        WireComplex::Pair([v.re, v.im])
    }
}

impl From<WireComplex> for Complex64 {
    fn from(w: WireComplex) -> Self {
        match w {
            WireComplex::Pair([re, im]) => Complex64::new(re, im),
            WireComplex::Real(re) => Complex64::new(re, 0.0),
        }
    }
}

pub type WireVector = Vec<WireComplex>;
pub type WireMatrix = Vec<Vec<WireComplex>>;

pub fn vector_to_wire(v: &CVec) -> WireVector {
    v.iter().map(|&z| z.into()).collect()
}

pub fn matrix_to_wire(m: &CMat) -> WireMatrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect()).collect()
}

pub fn tuple_to_wire(t: &MatrixTuple) -> Vec<WireMatrix> {
    t.iter().map(matrix_to_wire).collect()
}

pub fn vector_from_wire(v: &[WireComplex], field: &str) -> Result<CVec> {
    check_size(v.len()).map_err(|e| field_error(field, e))?;
    Ok(CVec::from_iterator(v.len(), v.iter().map(|&z| z.into())))
}

fn field_error(field: &str, e: Error) -> Error {
    Error::Invalid(format!("{field}: {e}"))
}

/// Square matrix of side `n`; an empty array is the `0 × 0` matrix.
pub fn matrix_from_wire(m: &WireMatrix, n: usize, field: &str) -> Result<CMat> {
    check_size(n).map_err(|e| field_error(field, e))?;
    if m.len() != n || m.iter().any(|row| row.len() != n) {
        return Err(Error::Invalid(format!("{field}: expected a {n}x{n} matrix")));
    }
    Ok(CMat::from_fn(n, n, |i, j| m[i][j].into()))
}

pub fn tuple_from_wire(mats: &[WireMatrix], field: &str) -> Result<MatrixTuple> {
    let n = mats.first().map(|m| m.len()).ok_or_else(|| Error::Invalid(format!("{field}: empty tuple")))?;
    let parsed = mats
        .iter()
        .enumerate()
        .map(|(j, m)| matrix_from_wire(m, n, &format!("{field}[{j}]")))
        .collect::<Result<Vec<_>>>()?;
    MatrixTuple::new(parsed).map_err(|e| field_error(field, e))
}

fn sized_tuple(mats: &[WireMatrix], d: usize, n: usize, field: &str) -> Result<MatrixTuple> {
    if mats.len() != d {
        return Err(Error::Invalid(format!("{field}: expected {d} matrices, found {}", mats.len())));
    }
    let parsed = mats
        .iter()
        .enumerate()
        .map(|(j, m)| matrix_from_wire(m, n, &format!("{field}[{j}]")))
        .collect::<Result<Vec<_>>>()?;
    if n == 0 {
        return Ok(MatrixTuple::zeros(d, 0));
    }
    MatrixTuple::new(parsed).map_err(|e| field_error(field, e))
}

fn sized_vector(v: &[WireComplex], n: usize, field: &str) -> Result<CVec> {
    if v.len() != n {
        return Err(Error::Invalid(format!("{field}: expected length {n}, found {}", v.len())));
    }
    vector_from_wire(v, field)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum RealizationJson {
    Fm {
        d: usize,
        n: usize,
        #[serde(rename = "A")]
        a: Vec<WireMatrix>,
        #[serde(rename = "B")]
        b: Vec<WireVector>,
        #[serde(rename = "C")]
        c: WireVector,
        #[serde(rename = "D")]
        feedthrough: WireComplex,
    },
    Descriptor {
        d: usize,
        n: usize,
        #[serde(rename = "A")]
        a: Vec<WireMatrix>,
        b: WireVector,
        c: WireVector,
    },
}

/// Either realization form, as read from or written to JSON.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyRealization {
    Fm(FmRealization),
    Descriptor(DescriptorRealization),
}

impl AnyRealization {
    pub fn d(&self) -> usize {
        match self {
            AnyRealization::Fm(r) => r.d(),
            AnyRealization::Descriptor(r) => r.d(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            AnyRealization::Fm(r) => r.size(),
            AnyRealization::Descriptor(r) => r.size(),
        }
    }

    /// FM form; descriptors convert by restriction to `span{A^ω b, ω ≠ ∅}`.
    pub fn to_fm(&self, rank_factor: f64) -> FmRealization {
        match self {
            AnyRealization::Fm(r) => r.clone(),
            AnyRealization::Descriptor(r) => r.to_fm_with(rank_factor),
        }
    }

    pub fn to_descriptor(&self, rank_factor: f64) -> DescriptorRealization {
        match self {
            AnyRealization::Fm(r) => r.to_descriptor_with(rank_factor),
            AnyRealization::Descriptor(r) => r.clone(),
        }
    }
}

impl From<&FmRealization> for RealizationJson {
    fn from(r: &FmRealization) -> Self {
        RealizationJson::Fm {
            d: r.d(),
            n: r.size(),
            a: tuple_to_wire(r.a()),
            b: r.b().iter().map(vector_to_wire).collect(),
            c: vector_to_wire(r.c()),
            feedthrough: r.feedthrough().into(),
        }
    }
}

impl From<&DescriptorRealization> for RealizationJson {
    fn from(r: &DescriptorRealization) -> Self {
        RealizationJson::Descriptor {
            d: r.d(),
            n: r.size(),
            a: tuple_to_wire(r.a()),
            b: vector_to_wire(r.b()),
            c: vector_to_wire(r.c()),
        }
    }
}

impl From<&AnyRealization> for RealizationJson {
    fn from(r: &AnyRealization) -> Self {
        match r {
            AnyRealization::Fm(r) => r.into(),
            AnyRealization::Descriptor(r) => r.into(),
        }
    }
}

impl RealizationJson {
    pub fn parse(&self) -> Result<AnyRealization> {
        match self {
            RealizationJson::Fm { d, n, a, b, c, feedthrough } => {
                if *d == 0 {
                    return Err(Error::Invalid("d: must be positive".into()));
                }
                let a = sized_tuple(a, *d, *n, "A")?;
                if b.len() != *d {
                    return Err(Error::Invalid(format!("B: expected {d} vectors, found {}", b.len())));
                }
                let b = b
                    .iter()
                    .enumerate()
                    .map(|(j, v)| sized_vector(v, *n, &format!("B[{j}]")))
                    .collect::<Result<Vec<_>>>()?;
                let c = sized_vector(c, *n, "C")?;
                Ok(AnyRealization::Fm(FmRealization::new(a, b, c, (*feedthrough).into())?))
            }
            RealizationJson::Descriptor { d, n, a, b, c } => {
                if *d == 0 {
                    return Err(Error::Invalid("d: must be positive".into()));
                }
                let a = sized_tuple(a, *d, *n, "A")?;
                let b = sized_vector(b, *n, "b")?;
                let c = sized_vector(c, *n, "c")?;
                Ok(AnyRealization::Descriptor(DescriptorRealization::new(a, b, c)?))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "Z")]
    pub z: Vec<WireMatrix>,
}

impl From<&MatrixTuple> for TupleJson {
    fn from(t: &MatrixTuple) -> Self {
        TupleJson { d: Some(t.d()), n: Some(t.n()), z: tuple_to_wire(t) }
    }
}

impl TupleJson {
    pub fn parse(&self) -> Result<MatrixTuple> {
        let t = tuple_from_wire(&self.z, "Z")?;
        if self.d.is_some_and(|d| d != t.d()) {
            return Err(Error::Invalid(format!("d: declared {} but Z has {} matrices", self.d.unwrap_or(0), t.d())));
        }
        if self.n.is_some_and(|n| n != t.n()) {
            return Err(Error::Invalid(format!("n: declared {} but matrices are {}x{}", self.n.unwrap_or(0), t.n(), t.n())));
        }
        Ok(t)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairJson {
    #[serde(rename = "T")]
    pub t: Vec<WireMatrix>,
    pub x: WireVector,
    #[serde(default)]
    pub convention: Convention,
}

impl PairJson {
    pub fn new(p: &CoisometryPair, convention: Convention) -> Self {
        PairJson { t: tuple_to_wire(p.t()), x: vector_to_wire(p.x()), convention }
    }

    /// Validates every pair invariant.
    pub fn parse(&self, tol: &Tolerances) -> Result<(CoisometryPair, Convention)> {
        let t = tuple_from_wire(&self.t, "T")?;
        let x = sized_vector(&self.x, t.n(), "x")?;
        Ok((CoisometryPair::new(t, x, tol)?, self.convention))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StageJson {
    pub name: &'static str,
    pub passed: bool,
    pub residual: f64,
    pub threshold: f64,
    pub diagnostic: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GnsJson {
    pub degree: usize,
    pub rank: usize,
    pub multiplicity: usize,
    pub distance: f64,
    pub gap: f64,
    pub cuntz_defect: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateJson {
    pub passed: bool,
    pub pair: PairJson,
    pub inner: RealizationJson,
    pub inner_report: InnerReport,
    #[serde(rename = "S")]
    pub s: WireMatrix,
    #[serde(rename = "Z")]
    pub z: Vec<WireMatrix>,
    pub y: WireVector,
    pub eigenvalue: WireComplex,
    pub eigen_distance: f64,
    pub eigen_gap: f64,
    pub coisometry_residual: f64,
    pub fixed_point_residual: f64,
    pub mu_b: WireComplex,
    pub mu_b_series: WireComplex,
    pub mu_b_tail_bound: f64,
    pub mu_witness: f64,
    pub gns: Option<GnsJson>,
    pub convention: Convention,
    pub inner_degree: usize,
    pub gns_degree: usize,
    pub tolerances: Tolerances,
    pub stages: Vec<StageJson>,
}

impl From<&PeakCertificate> for CertificateJson {
    fn from(c: &PeakCertificate) -> Self {
        CertificateJson {
            passed: c.passed,
            pair: PairJson::new(&c.pair, c.convention),
            inner: (&c.inner).into(),
            inner_report: c.inner_report.clone(),
            s: matrix_to_wire(&c.coisometrization.s),
            z: tuple_to_wire(&c.coisometrization.z),
            y: vector_to_wire(&c.y),
            eigenvalue: c.eigenvalue.into(),
            eigen_distance: c.eigen_distance,
            eigen_gap: c.eigen_gap,
            coisometry_residual: c.coisometrization.coisometry_residual,
            fixed_point_residual: c.coisometrization.fixed_point_residual,
            mu_b: c.mu_b.into(),
            mu_b_series: c.mu_b_series.into(),
            mu_b_tail_bound: c.mu_b_tail_bound,
            mu_witness: c.mu_witness,
            gns: c.gns.as_ref().map(|g| GnsJson {
                degree: g.degree,
                rank: g.rank,
                multiplicity: g.multiplicity,
                distance: g.distance,
                gap: g.gap,
                cuntz_defect: g.cuntz_defect,
            }),
            convention: c.convention,
            inner_degree: c.options.inner_degree,
            gns_degree: c.options.gns_degree,
            tolerances: c.options.tol,
            stages: c
                .stages
                .iter()
                .map(|s| StageJson {
                    name: s.name,
                    passed: s.passed,
                    residual: s.residual,
                    threshold: s.threshold,
                    diagnostic: s.diagnostic,
                })
                .collect(),
        }
    }
}
