//! Dense complex linear algebra helpers on top of `nalgebra`.
//!
//! Everything here works on `DMatrix<Complex64>` and tolerates empty (0×0)
//! operands, which show up naturally for zero-state realizations.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Relative factor of the numerical-rank cutoff `factor * σ_max * max(rows, cols)`.
pub const DEFAULT_RANK_FACTOR: f64 = 1e-9;

/// Reciprocal condition number below which a pencil is declared singular.
pub const DEFAULT_RCOND: f64 = 1e-12;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    sv[0]
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    m.clone().svd(false, false).singular_values.as_slice().to_vec()
}

/// Cutoff used for numerical rank decisions.
pub fn rank_cutoff(sigma_max: f64, rows: usize, cols: usize, factor: f64) -> f64 {
    factor * sigma_max * rows.max(cols).max(1) as f64
}

pub fn numerical_rank(m: &CMat, factor: f64) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        None => 0,
        Some(0.0) => 0,
        Some(&smax) => {
            let cut = rank_cutoff(smax, m.nrows(), m.ncols(), factor);
            sv.iter().filter(|&&s| s > cut).count()
        }
    }
}

/// Orthonormal basis of the column space, via the left singular vectors.
pub fn column_space(m: &CMat, factor: f64) -> CMat {
    let rows = m.nrows();
    if m.is_empty() {
        return CMat::zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let sv = &svd.singular_values;
    if sv[0] == 0.0 {
        return CMat::zeros(rows, 0);
    }
    let cut = rank_cutoff(sv[0], m.nrows(), m.ncols(), factor);
    let r = sv.iter().filter(|&&s| s > cut).count();
    svd.u.expect("requested U").columns(0, r).into_owned()
}

/// Null space of a matrix as orthonormal columns, with the singular values
/// that were declared zero.
///
/// A singular value `s` counts as zero when `s <= abs_tol`.
pub fn null_space(m: &CMat, abs_tol: f64) -> (CMat, Vec<f64>) {
    let cols = m.ncols();
    if cols == 0 {
        return (CMat::zeros(0, 0), Vec::new());
    }
    // Pad wide matrices so V is square.
    let padded = if m.nrows() < cols {
        let mut p = CMat::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let sv = svd.singular_values;
    let mut idx = Vec::new();
    let mut vals = Vec::new();
    for (k, &s) in sv.iter().enumerate() {
        if s <= abs_tol {
            idx.push(k);
            vals.push(s);
        }
    }
    let mut basis = CMat::zeros(cols, idx.len());
    for (out, &k) in idx.iter().enumerate() {
        for i in 0..cols {
            basis[(i, out)] = v_t[(k, i)].conj();
        }
    }
    (basis, vals)
}

/// Right singular vector of the smallest singular value, plus that value.
pub fn smallest_singular_pair(m: &CMat) -> (f64, CVec) {
    let cols = m.ncols();
    let padded = if m.nrows() < cols {
        let mut p = CMat::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let k = cols - 1;
    let v = CVec::from_fn(cols, |i, _| v_t[(k, i)].conj());
    (svd.singular_values[k], v)
}

/// Eigenvalues of a general complex matrix, from the complex Schur form.
pub fn eigenvalues(m: &CMat) -> Vec<Complex64> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    let schur = nalgebra::linalg::Schur::new(m.clone());
    let (_, t) = schur.unpack();
    (0..n).map(|i| t[(i, i)]).collect()
}

pub fn spectral_radius(m: &CMat) -> f64 {
    eigenvalues(m).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigen-decomposition of a Hermitian matrix (the Hermitian part is used).
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let h = hermitian_part(m);
    let eig = h.symmetric_eigen();
    (eig.eigenvalues.as_slice().to_vec(), eig.eigenvectors)
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Applies `f` to the eigenvalues of a Hermitian matrix.
pub fn hermitian_function(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = hermitian_eigen(m);
    let n = vals.len();
    let mut d = CMat::zeros(n, n);
    for (i, &v) in vals.iter().enumerate() {
        d[(i, i)] = c(f(v), 0.0);
    }
    &vecs * d * vecs.adjoint()
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Column-stacking vectorization.
pub fn vec_of(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

/// Inverse of [`vec_of`].
pub fn unvec(v: &CVec, rows: usize, cols: usize) -> CMat {
    CMat::from_column_slice(rows, cols, v.as_slice())
}

pub fn frobenius(m: &CMat) -> f64 {
    m.norm()
}

/// Makes the entry of largest modulus real and positive, then normalizes.
pub fn fix_phase(v: &CVec) -> CVec {
    let norm = v.norm();
    if norm == 0.0 {
        return v.clone();
    }
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, z) in v.iter().enumerate() {
        // ties resolved by first index for determinism
        if z.norm() > best_abs * (1.0 + 1e-12) {
            best = i;
            best_abs = z.norm();
        }
    }
    let phase = v[best].conj() / v[best].norm();
    v.map(|z| z * phase / norm)
}

/// LU solve with one step of iterative refinement and a reciprocal
/// condition estimate in the 1-norm.
pub struct PencilSolve {
    lu: nalgebra::linalg::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    matrix: CMat,
    pub rcond: f64,
}

impl PencilSolve {
    pub fn new(matrix: CMat) -> Self {
        let n = matrix.nrows();
        if n == 0 {
            return Self { lu: matrix.clone().lu(), matrix, rcond: 1.0 };
        }
        let lu = matrix.clone().lu();
        let mut solver = Self { lu, matrix, rcond: 0.0 };
        solver.rcond = solver.estimate_rcond();
        solver
    }

    fn raw_solve(&self, rhs: &CMat) -> Option<CMat> {
        self.lu.solve(rhs)
    }

    pub fn solve(&self, rhs: &CMat) -> Option<CMat> {
        if self.matrix.nrows() == 0 {
            return Some(CMat::zeros(0, rhs.ncols()));
        }
        let mut x = self.raw_solve(rhs)?;
        let resid = rhs - &self.matrix * &x;
        if let Some(dx) = self.raw_solve(&resid) {
            x += dx;
        }
        if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return None;
        }
        Some(x)
    }

    /// Hager's estimator of `‖A⁻¹‖₁`, combined with the exact `‖A‖₁`.
    fn estimate_rcond(&self) -> f64 {
        let n = self.matrix.nrows();
        let norm1 = one_norm(&self.matrix);
        if norm1 == 0.0 {
            return 0.0;
        }
        let adj_lu = self.matrix.adjoint().lu();
        let mut x = CMat::from_element(n, 1, c(1.0 / n as f64, 0.0));
        let mut est = 0.0;
        for _ in 0..5 {
            let y = match self.lu.solve(&x) {
                Some(y) => y,
                None => return 0.0,
            };
            let y_norm: f64 = y.iter().map(|z| z.norm()).sum();
            if !y_norm.is_finite() {
                return 0.0;
            }
            if y_norm <= est {
                break;
            }
            est = y_norm;
            let xi = y.map(|z| if z.norm() == 0.0 { ONE } else { z / z.norm() });
            let zv = match adj_lu.solve(&xi) {
                Some(z) => z,
                None => return 0.0,
            };
            let (jmax, zmax) = zv
                .iter()
                .enumerate()
                .map(|(i, z)| (i, z.norm()))
                .fold((0, -1.0), |acc, it| if it.1 > acc.1 { it } else { acc });
            let ztx: Complex64 = (zv.adjoint() * &x)[(0, 0)];
            if zmax <= ztx.norm() {
                break;
            }
            x = CMat::zeros(n, 1);
            x[(jmax, 0)] = ONE;
        }
        // Higham's alternative lower bound guards against the estimator's
        // known bad cases.
        let alt = CMat::from_fn(n, 1, |i, _| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            c(sign * (1.0 + i as f64 / (n.max(2) - 1) as f64), 0.0)
        });
        if let Some(y) = self.lu.solve(&alt) {
            let alt_est = 2.0 * y.iter().map(|z| z.norm()).sum::<f64>() / (3.0 * n as f64);
            if alt_est.is_finite() && alt_est > est {
                est = alt_est;
            }
        } else {
            return 0.0;
        }
        if est == 0.0 || !est.is_finite() {
            return 0.0;
        }
        1.0 / (norm1 * est)
    }
}

pub fn one_norm(m: &CMat) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix functions evaluated on a Hermitian positive definite input.
pub fn hermitian_sqrt(m: &CMat) -> CMat {
    hermitian_function(m, |v| v.max(0.0).sqrt())
}

pub fn inverse(m: &CMat) -> Option<CMat> {
    if m.nrows() == 0 {
        return Some(CMat::zeros(0, 0));
    }
    m.clone().try_inverse()
}

/// Block diagonal matrix `a ⊕ b`.
pub fn direct_sum(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = CMat::zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vec_identity_for_sandwich() {
        // vec(AXB) = (Bᵗ ⊗ A) vec(X)
        let a = CMat::from_fn(2, 2, |i, j| c(i as f64 + 1.0, j as f64 - 0.5));
        let x = CMat::from_fn(2, 2, |i, j| c((i * 2 + j) as f64, 1.0));
        let b = CMat::from_fn(2, 2, |i, j| c(0.3 * j as f64, i as f64));
        let lhs = vec_of(&(&a * &x * &b));
        let rhs = kron(&b.transpose(), &a) * vec_of(&x);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn null_space_of_rank_deficient_matrix() {
        let m = CMat::from_row_slice(2, 3, &[ONE, ONE, ZERO, ZERO, ZERO, ONE]);
        let (basis, _) = null_space(&m, 1e-12);
        assert_eq!(basis.ncols(), 1);
        assert!((&m * &basis).norm() < 1e-12);
    }

    #[test]
    fn rcond_detects_singular() {
        let m = CMat::from_row_slice(2, 2, &[ONE, ONE, ONE, ONE]);
        let s = PencilSolve::new(m);
        assert!(s.rcond < 1e-12);
        let s = PencilSolve::new(identity(3));
        assert!((s.rcond - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_operands_are_tolerated() {
        let e = CMat::zeros(0, 0);
        assert_eq!(numerical_rank(&e, DEFAULT_RANK_FACTOR), 0);
        assert!(eigenvalues(&e).is_empty());
        let s = PencilSolve::new(e);
        assert_eq!(s.solve(&CMat::zeros(0, 2)).unwrap().shape(), (0, 2));
    }

    #[test]
    fn phase_fix_is_deterministic() {
        let v = CVec::from_vec(vec![c(0.0, 1.0), c(0.0, -2.0)]);
        let f = fix_phase(&v);
        assert!(f[1].im.abs() < 1e-15 && f[1].re > 0.0);
        assert!((f.norm() - 1.0).abs() < 1e-15);
    }
}
