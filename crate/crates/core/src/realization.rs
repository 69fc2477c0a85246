//! Descriptor and Fornasini–Marchesini realizations of scalar NC rational
//! functions regular at 0.
//!
//! A descriptor realization `(A, b, c)` presents
//! `r(z) = c* (I − Σ z_j A_j)⁻¹ b`; an FM realization `(A, B, C, D)` presents
//! `r(z) = D + C (I − Σ z_j A_j)⁻¹ Σ z_j B_j`. Evaluation at a matrix point
//! `Z` uses the Kronecker pencil `I ⊗ I − Σ Z_j ⊗ A_j`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    identity, kron, singular_values, CMat, CVec, PencilSolve, DEFAULT_RANK_FACTOR, DEFAULT_RCOND,
    ONE, ZERO,
};
use crate::minimal::{invariant_span, minimize};
use crate::par::{self, Exec};
use crate::series::TruncatedSeries;
use crate::tuple::MatrixTuple;
use crate::words::Word;

#[derive(Clone, Debug, PartialEq)]
pub struct DescriptorRealization {
    a: MatrixTuple,
    b: CVec,
    c: CVec,
    minimal: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FmRealization {
    a: MatrixTuple,
    b: Vec<CVec>,
    /// Entries of the row covector `C`.
    c: CVec,
    d: Complex64,
}

fn check_point(a: &MatrixTuple, z: &MatrixTuple) -> Result<()> {
    if a.d() != z.d() {
        return Err(Error::DimensionMismatch(format!(
            "realization has d = {}, point has d = {}",
            a.d(),
            z.d()
        )));
    }
    Ok(())
}

/// `I ⊗ I − Σ Z_j ⊗ A_j`.
pub fn pencil(a: &MatrixTuple, z: &MatrixTuple) -> Result<CMat> {
    check_point(a, z)?;
    let k = z.n() * a.n();
    Ok(identity(k) - z.kron_sum(a)?)
}

impl DescriptorRealization {
    pub fn new(a: MatrixTuple, b: CVec, c: CVec) -> Result<Self> {
        if b.len() != a.n() || c.len() != a.n() {
            return Err(Error::DimensionMismatch(format!(
                "state size {} but |b| = {}, |c| = {}",
                a.n(),
                b.len(),
                c.len()
            )));
        }
        Ok(Self { a, b, c, minimal: false })
    }

    pub(crate) fn mark_minimal(mut self) -> Self {
        self.minimal = true;
        self
    }

    pub fn a(&self) -> &MatrixTuple {
        &self.a
    }

    pub fn b(&self) -> &CVec {
        &self.b
    }

    pub fn c(&self) -> &CVec {
        &self.c
    }

    pub fn d(&self) -> usize {
        self.a.d()
    }

    /// State dimension.
    pub fn size(&self) -> usize {
        self.a.n()
    }

    /// Set only by [`minimize`] and similar constructions that verified
    /// both cyclicity conditions.
    pub fn is_flagged_minimal(&self) -> bool {
        self.minimal
    }

    pub fn value_at_zero(&self) -> Complex64 {
        self.c.dotc(&self.b)
    }

    pub fn eval(&self, z: &MatrixTuple) -> Result<CMat> {
        self.eval_with(z, DEFAULT_RCOND)
    }

    /// `(I ⊗ c)* (I ⊗ I − Σ Z_j ⊗ A_j)⁻¹ (I ⊗ b)`.
    pub fn eval_with(&self, z: &MatrixTuple, rcond: f64) -> Result<CMat> {
        let n = z.n();
        let l = pencil(&self.a, z)?;
        let solver = PencilSolve::new(l);
        if solver.rcond < rcond {
            return Err(Error::SingularPencil { rcond: solver.rcond });
        }
        let bcol = CMat::from_column_slice(self.size(), 1, self.b.as_slice());
        let rhs = kron(&identity(n), &bcol);
        let x = solver.solve(&rhs).ok_or(Error::SingularPencil { rcond: solver.rcond })?;
        let crow = CMat::from_row_slice(1, self.size(), self.c.adjoint().as_slice());
        Ok(kron(&identity(n), &crow) * x)
    }

    pub fn eval_batch(&self, points: &[MatrixTuple], exec: Exec) -> Vec<Result<CMat>> {
        par::map(exec, points, |z| self.eval(z))
    }

    /// Coefficients `c* A^ω b` for `|ω| ≤ degree`.
    pub fn taylor(&self, degree: usize) -> TruncatedSeries {
        let mut series = TruncatedSeries::new(self.d(), degree);
        let mut level = vec![(Word::empty(), self.c.adjoint())];
        for len in 0..=degree {
            for (w, row) in &level {
                let v = (row * &self.b)[(0, 0)];
                if v != ZERO {
                    series.set(w.clone(), v).expect("letters in range");
                }
            }
            if len == degree {
                break;
            }
            let mut next = Vec::with_capacity(level.len() * self.d());
            for (w, row) in &level {
                for j in 0..self.d() {
                    next.push((w.push(j as u8 + 1), row * &self.a[j]));
                }
            }
            level = next;
        }
        series
    }

    /// FM realization on `H′ = span{A^ω b : ω ≠ ∅}` with `A′ = A|_{H′}`,
    /// `B′_j = A_j b`, `C′ = c*|_{H′}` and `D′ = c*b`.
    pub fn to_fm(&self) -> FmRealization {
        self.to_fm_with(DEFAULT_RANK_FACTOR)
    }

    pub fn to_fm_with(&self, rank_factor: f64) -> FmRealization {
        let m = self.size();
        let d = self.d();
        let mut start = CMat::zeros(m, d);
        for j in 0..d {
            start.set_column(j, &(&self.a[j] * &self.b));
        }
        let q = invariant_span(&start, &self.a, rank_factor);
        let qa = q.adjoint();
        let a = self.a.map(|aj| &qa * aj * &q);
        let b = (0..d).map(|j| &qa * (&self.a[j] * &self.b)).collect();
        let c = (self.c.adjoint() * &q).transpose();
        FmRealization { a, b, c, d: self.value_at_zero() }
    }

    /// `rᵗ` via the closed form `(Aᵗ, c̄, b̄)`.
    pub fn transpose(&self) -> Self {
        Self {
            a: self.a.transpose(),
            b: self.c.map(|z| z.conj()),
            c: self.b.map(|z| z.conj()),
            minimal: self.minimal,
        }
    }

    /// `true` iff the pencil at `Z` is numerically nonsingular:
    /// `σ_min ≥ tol · σ_max`.
    pub fn domain_contains(&self, z: &MatrixTuple, tol: f64) -> Result<bool> {
        let l = pencil(&self.a, z)?;
        if l.nrows() == 0 {
            return Ok(true);
        }
        let sv = singular_values(&l);
        let smax = sv[0];
        let smin = *sv.last().expect("nonempty");
        Ok(smin > tol * smax)
    }

    pub fn minimize(&self, rank_factor: f64) -> Self {
        minimize(self, rank_factor)
    }
}

impl FmRealization {
    pub fn new(a: MatrixTuple, b: Vec<CVec>, c: CVec, d: Complex64) -> Result<Self> {
        let m = a.n();
        if b.len() != a.d() {
            return Err(Error::DimensionMismatch(format!(
                "{} input vectors for d = {}",
                b.len(),
                a.d()
            )));
        }
        if b.iter().any(|bj| bj.len() != m) || c.len() != m {
            return Err(Error::DimensionMismatch(format!("state size {m} mismatch in B or C")));
        }
        Ok(Self { a, b, c, d })
    }

    /// Zero-state realization of a constant.
    pub fn constant(d_vars: usize, value: Complex64) -> Self {
        Self {
            a: MatrixTuple::zeros(d_vars, 0),
            b: vec![CVec::zeros(0); d_vars],
            c: CVec::zeros(0),
            d: value,
        }
    }

    /// One-state realization of the variable `z_j` (1-based).
    pub fn variable(d_vars: usize, j: usize) -> Self {
        let mut b = vec![CVec::zeros(1); d_vars];
        b[j - 1][0] = ONE;
        Self { a: MatrixTuple::zeros(d_vars, 1), b, c: CVec::from_element(1, ONE), d: ZERO }
    }

    pub fn a(&self) -> &MatrixTuple {
        &self.a
    }

    pub fn b(&self) -> &[CVec] {
        &self.b
    }

    pub fn c(&self) -> &CVec {
        &self.c
    }

    pub fn feedthrough(&self) -> Complex64 {
        self.d
    }

    pub fn d(&self) -> usize {
        self.a.d()
    }

    pub fn size(&self) -> usize {
        self.a.n()
    }

    pub fn value_at_zero(&self) -> Complex64 {
        self.d
    }

    pub(crate) fn c_row(&self) -> CMat {
        CMat::from_row_slice(1, self.size(), self.c.as_slice())
    }

    /// `Σ_j Z_j ⊗ B_j`, an `(n·m) × n` matrix.
    pub(crate) fn input_kron(&self, z: &MatrixTuple) -> CMat {
        let m = self.size();
        let mut acc = CMat::zeros(z.n() * m, z.n());
        for (zj, bj) in z.iter().zip(&self.b) {
            let col = CMat::from_column_slice(m, 1, bj.as_slice());
            acc += kron(zj, &col);
        }
        acc
    }

    pub fn eval(&self, z: &MatrixTuple) -> Result<CMat> {
        self.eval_with(z, DEFAULT_RCOND)
    }

    /// `D·I + (I ⊗ C) L_A(Z)⁻¹ (Σ Z_j ⊗ B_j)`.
    pub fn eval_with(&self, z: &MatrixTuple, rcond: f64) -> Result<CMat> {
        let n = z.n();
        let l = pencil(&self.a, z)?;
        let solver = PencilSolve::new(l);
        if solver.rcond < rcond {
            return Err(Error::SingularPencil { rcond: solver.rcond });
        }
        let x = solver
            .solve(&self.input_kron(z))
            .ok_or(Error::SingularPencil { rcond: solver.rcond })?;
        Ok(identity(n) * self.d + kron(&identity(n), &self.c_row()) * x)
    }

    pub fn eval_batch(&self, points: &[MatrixTuple], exec: Exec) -> Vec<Result<CMat>> {
        par::map(exec, points, |z| self.eval(z))
    }

    /// Coefficients: `D` at ∅ and `C A^α B_j` at `αj`.
    pub fn taylor(&self, degree: usize) -> TruncatedSeries {
        let mut series = TruncatedSeries::new(self.d(), degree);
        if self.d != ZERO {
            series.set(Word::empty(), self.d).expect("empty word");
        }
        if degree == 0 {
            return series;
        }
        let mut level = vec![(Word::empty(), self.c_row())];
        for len in 1..=degree {
            for (w, row) in &level {
                for j in 0..self.d() {
                    let v = (row * &self.b[j])[(0, 0)];
                    if v != ZERO {
                        series.set(w.push(j as u8 + 1), v).expect("letters in range");
                    }
                }
            }
            if len == degree {
                break;
            }
            let mut next = Vec::with_capacity(level.len() * self.d());
            for (w, row) in &level {
                for j in 0..self.d() {
                    next.push((w.push(j as u8 + 1), row * &self.a[j]));
                }
            }
            level = next;
        }
        series
    }

    /// Block embedding `Ã_j = [[0, 0], [B_j, A_j]]`, `b̃ = e₁`,
    /// `c̃* = [D, C]`, followed by minimization.
    pub fn to_descriptor(&self) -> DescriptorRealization {
        self.to_descriptor_with(DEFAULT_RANK_FACTOR)
    }

    pub fn to_descriptor_with(&self, rank_factor: f64) -> DescriptorRealization {
        self.embed_descriptor().minimize(rank_factor)
    }

    /// The block embedding without minimization.
    pub fn embed_descriptor(&self) -> DescriptorRealization {
        let m = self.size();
        let mats = (0..self.d())
            .map(|j| {
                let mut big = CMat::zeros(m + 1, m + 1);
                for i in 0..m {
                    big[(i + 1, 0)] = self.b[j][i];
                }
                big.view_mut((1, 1), (m, m)).copy_from(&self.a[j]);
                big
            })
            .collect();
        let a = MatrixTuple::new(mats).expect("square blocks");
        let mut b = CVec::zeros(m + 1);
        b[0] = ONE;
        let mut c = CVec::zeros(m + 1);
        c[0] = self.d.conj();
        for i in 0..m {
            c[i + 1] = self.c[i].conj();
        }
        DescriptorRealization::new(a, b, c).expect("consistent sizes")
    }

    /// Minimizes through the descriptor form and converts back.
    pub fn simplify_state(&self, rank_factor: f64) -> Self {
        self.to_descriptor_with(rank_factor).to_fm_with(rank_factor)
    }

    pub fn transpose(&self) -> Self {
        self.to_descriptor().transpose().to_fm()
    }

    pub fn is_minimal(&self, rank_factor: f64) -> bool {
        let d = self.d();
        let m = self.size();
        let mut reach = CMat::zeros(m, d);
        for j in 0..d {
            reach.set_column(j, &self.b[j]);
        }
        let r = invariant_span(&reach, &self.a, rank_factor).ncols();
        let obs = CMat::from_column_slice(m, 1, self.c.map(|z| z.conj()).as_slice());
        let o = invariant_span(&obs, &self.a.adjoint(), rank_factor).ncols();
        r == m && o == m
    }

    pub fn domain_contains(&self, z: &MatrixTuple, tol: f64) -> Result<bool> {
        let l = pencil(&self.a, z)?;
        if l.nrows() == 0 {
            return Ok(true);
        }
        let sv = singular_values(&l);
        Ok(*sv.last().expect("nonempty") > tol * sv[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn zero_point_gives_value_at_zero() {
        let a = MatrixTuple::from_real_rows(2, &[&[0.1, 0.2, 0.3, 0.4], &[0.0, 0.5, -0.5, 0.0]])
            .unwrap();
        let r = DescriptorRealization::new(
            a,
            CVec::from_vec(vec![c(1.0, 0.5), c(0.0, 1.0)]),
            CVec::from_vec(vec![c(2.0, 0.0), c(1.0, -1.0)]),
        )
        .unwrap();
        let out = r.eval(&MatrixTuple::zeros(2, 3)).unwrap();
        assert!((out - identity(3) * r.value_at_zero()).norm() < 1e-14);
    }

    #[test]
    fn constant_descriptor_series() {
        let r = DescriptorRealization::new(
            MatrixTuple::zeros(2, 1),
            CVec::from_element(1, c(2.0, 0.0)),
            CVec::from_element(1, c(0.0, 1.0)),
        )
        .unwrap();
        let s = r.taylor(4);
        assert_eq!(s.len(), 1);
        assert_eq!(s.get(&Word::empty()), c(0.0, -2.0));
    }

    #[test]
    fn variable_fm() {
        let z2 = FmRealization::variable(2, 2);
        let s = z2.taylor(3);
        assert_eq!(s.len(), 1);
        assert_eq!(s.get(&w("2")), ONE);
        let p = MatrixTuple::scalar_point(&[c(0.3, 0.0), c(-0.7, 0.1)]);
        assert!((z2.eval(&p).unwrap()[(0, 0)] - c(-0.7, 0.1)).norm() < 1e-15);
    }

    #[test]
    fn constant_fm_round_trips_through_descriptor() {
        let k = FmRealization::constant(2, c(1.5, -0.5));
        assert_eq!(k.eval(&MatrixTuple::zeros(2, 2)).unwrap(), identity(2) * c(1.5, -0.5));
        let desc = k.to_descriptor();
        assert_eq!(desc.size(), 1);
        assert!((desc.value_at_zero() - c(1.5, -0.5)).norm() < 1e-15);
        let back = desc.to_fm();
        assert_eq!(back.size(), 0);
        assert!((back.feedthrough() - c(1.5, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn zero_function_minimizes_to_empty_state() {
        let k = FmRealization::constant(2, ZERO);
        assert_eq!(k.to_descriptor().size(), 0);
        assert!(k.to_descriptor().eval(&MatrixTuple::zeros(2, 2)).unwrap().norm() == 0.0);
    }

    #[test]
    fn singular_pencil_is_reported() {
        // 1/(1 - z1) at z1 = 1
        let r = DescriptorRealization::new(
            MatrixTuple::from_real_rows(1, &[&[1.0], &[0.0]]).unwrap(),
            CVec::from_element(1, ONE),
            CVec::from_element(1, ONE),
        )
        .unwrap();
        let p = MatrixTuple::scalar_point(&[ONE, ZERO]);
        assert!(matches!(r.eval(&p), Err(Error::SingularPencil { .. })));
        assert!(!r.domain_contains(&p, 1e-12).unwrap());
        assert!(r.domain_contains(&MatrixTuple::zeros(2, 2), 1e-12).unwrap());
        let q = MatrixTuple::scalar_point(&[c(0.5, 0.0), ZERO]);
        assert!((r.eval(&q).unwrap()[(0, 0)] - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn dimension_mismatch_on_eval() {
        let r = FmRealization::variable(2, 1);
        assert!(r.eval(&MatrixTuple::zeros(3, 1)).is_err());
    }
}
