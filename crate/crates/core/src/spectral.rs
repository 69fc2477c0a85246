//! Joint spectral radius, matricized CP maps, Perron fixed points, the
//! shifted-pencil eigenvalue criterion and boundary eigenvalue checks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eigenvalues, fix_phase, hermitian_eigen, hermitian_function, identity, kron, smallest_singular_pair,
    spectral_norm, spectral_radius, unvec, CMat, CVec, ONE,
};
use crate::realization::{pencil, FmRealization};
use crate::tol::{check_size, Tolerances};
use crate::tuple::MatrixTuple;

/// The map `X ↦ Σ A_j X A_j*` as the `n² × n²` matrix `Σ Ā_j ⊗ A_j`
/// acting on column-stacked `vec X`.
#[derive(Clone, Debug)]
pub struct CpMapMatrix {
    source: MatrixTuple,
    matrix: CMat,
}

impl CpMapMatrix {
    pub fn new(a: &MatrixTuple) -> Result<Self> {
        check_size(a.n())?;
        let n = a.n();
        let mut matrix = CMat::zeros(n * n, n * n);
        for aj in a.iter() {
            matrix += kron(&aj.map(|z| z.conj()), aj);
        }
        Ok(Self { source: a.clone(), matrix })
    }

    pub fn source(&self) -> &MatrixTuple {
        &self.source
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn apply(&self, x: &CMat) -> CMat {
        self.source.cp_apply(x)
    }

    pub fn spectral_radius(&self) -> f64 {
        spectral_radius(&self.matrix)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JsrMethod {
    Exact,
    Iterative,
}

/// `ρ(A)` by the chosen method; `steps` applies to the iterative one.
pub fn jsr(a: &MatrixTuple, method: JsrMethod, steps: usize) -> Result<f64> {
    match method {
        JsrMethod::Exact => jsr_exact(a),
        JsrMethod::Iterative => Ok(jsr_iterate(a, steps)),
    }
}

/// `sqrt(ρ(Σ Ā_j ⊗ A_j))`.
pub fn jsr_exact(a: &MatrixTuple) -> Result<f64> {
    if a.n() == 0 {
        return Ok(0.0);
    }
    Ok(CpMapMatrix::new(a)?.spectral_radius().sqrt())
}

/// `‖Φ_A^k(I)‖^{1/2k}`, where `Φ_A^k(I) = Σ_{|α| = k} A^α A^{α*}`.
///
/// Each iterate is renormalized and the scale is accumulated in logs, so
/// large `k` neither overflows nor underflows.
pub fn jsr_iterate(a: &MatrixTuple, k: usize) -> f64 {
    let n = a.n();
    if n == 0 || k == 0 {
        return if n == 0 { 0.0 } else { 1.0 };
    }
    let mut x = identity(n);
    let mut log_scale = 0.0;
    for _ in 0..k {
        x = a.cp_apply(&x);
        let s = spectral_norm(&x);
        if s == 0.0 {
            return 0.0;
        }
        log_scale += s.ln();
        x /= Complex64::new(s, 0.0);
    }
    (log_scale / (2.0 * k as f64)).exp()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsrReport {
    pub exact: f64,
    pub iterative: f64,
    pub steps: usize,
}

pub fn jsr_report(a: &MatrixTuple, steps: usize) -> Result<JsrReport> {
    Ok(JsrReport { exact: jsr_exact(a)?, iterative: jsr_iterate(a, steps), steps })
}

#[derive(Clone, Debug)]
pub struct PerronFixedPoint {
    /// Hermitian PSD, trace 1.
    pub p: CMat,
    /// The Perron eigenvalue `ρ(A)²` of the matricized map.
    pub eigenvalue: f64,
    /// `‖Φ_A(P) − ρ² P‖`.
    pub residual: f64,
    /// Distance from the Perron eigenvalue to the rest of the spectrum.
    pub gap: f64,
    /// Anti-Hermitian part of the raw eigenvector, relative to its norm.
    pub antihermitian: f64,
}

/// Dominant eigenvector of `Φ_A`, symmetrized and normalized to trace 1.
///
/// The Perron eigenvalue is `ρ(Φ_A)` itself; the eigenvector is the null
/// vector of `M − ρ I`, which selects it even when other eigenvalues share
/// its modulus.
pub fn perron_fixed_point(a: &MatrixTuple, tol: &Tolerances) -> Result<PerronFixedPoint> {
    let n = a.n();
    if n == 0 {
        return Err(Error::Invalid("empty tuple has no fixed point".into()));
    }
    let cp = CpMapMatrix::new(a)?;
    let m = cp.matrix();
    let eigs = eigenvalues(m);
    let rho = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let target = Complex64::new(rho, 0.0);
    let mut dists: Vec<f64> = eigs.iter().map(|z| (z - target).norm()).collect();
    dists.sort_by(f64::total_cmp);
    let gap = dists.get(1).copied().unwrap_or(f64::INFINITY);
    let shifted = m - identity(n * n) * target;
    let (_, v) = smallest_singular_pair(&shifted);
    let mut raw = unvec(&v, n, n);
    let tr = raw.trace();
    if tr.norm() == 0.0 {
        return Err(Error::NonHermitianEigenvector { residual: f64::INFINITY });
    }
    raw *= tr.conj() / tr.norm();
    let scale = raw.norm();
    let antihermitian = (&raw - raw.adjoint()).norm() * 0.5 / scale;
    if antihermitian > tol.hermitian {
        return Err(Error::NonHermitianEigenvector { residual: antihermitian });
    }
    let h = (&raw + raw.adjoint()) * Complex64::new(0.5, 0.0);
    let (vals, _) = hermitian_eigen(&h);
    let min_eig = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let max_eig = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min_eig < -tol.hermitian * max_eig.abs() {
        return Err(Error::NonHermitianEigenvector { residual: -min_eig / max_eig.abs() });
    }
    let p = &h / h.trace();
    let residual = (cp.apply(&p) - &p * target).norm();
    Ok(PerronFixedPoint { p, eigenvalue: rho, residual, gap, antihermitian })
}

#[derive(Clone, Debug)]
pub struct Coisometrization {
    /// Hermitian square root of the fixed point (trace normalized to `n`).
    pub s: CMat,
    /// `Z_j = S⁻¹ W_j S`.
    pub z: MatrixTuple,
    pub p: CMat,
    pub jsr: f64,
    pub gap: f64,
    /// `‖Σ Z_j Z_j* − I‖`.
    pub coisometry_residual: f64,
    /// `‖Σ W_j P W_j* − P‖`.
    pub fixed_point_residual: f64,
}

/// Joint similarity of `W` (with `jsr(W) = 1`) to a row coisometry.
///
/// With `P` the Perron fixed point scaled to trace `n` and `S = P^{1/2}`,
/// `Σ Z_j Z_j* = S⁻¹ (Σ W_j P W_j*) S⁻¹ = I`. Any other factor with
/// `S S* = P` yields a unitarily equivalent `Z`.
pub fn similar_to_coisometry(w: &MatrixTuple, tol: &Tolerances) -> Result<Coisometrization> {
    let n = w.n();
    let fp = perron_fixed_point(w, tol)?;
    let jsr = fp.eigenvalue.sqrt();
    if (jsr - 1.0).abs() > tol.jsr_one {
        return Err(Error::JsrNotOne { jsr });
    }
    if fp.gap <= tol.gap {
        return Err(Error::PerronDegenerate { gap: fp.gap });
    }
    let p = &fp.p * Complex64::new(n as f64, 0.0);
    let (vals, _) = hermitian_eigen(&p);
    let min_eig = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let max_eig = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min_eig <= tol.definite * max_eig {
        return Err(Error::PNotDefinite { min_eig });
    }
    let s = hermitian_function(&p, f64::sqrt);
    let z = w.similarity(&s)?;
    let coisometry_residual = spectral_norm(&(z.row_gram() - identity(n)));
    let fixed_point_residual = spectral_norm(&(w.cp_apply(&p) - &p));
    Ok(Coisometrization { s, z, p, jsr, gap: fp.gap, coisometry_residual, fixed_point_residual })
}

#[derive(Clone, Debug)]
pub struct Eigencheck {
    pub lambda: Complex64,
    pub is_eigenvalue: bool,
    /// `min |μ − 1|` over the spectrum of `Σ Z_j ⊗ A^{(λ)}_j`.
    pub distance: f64,
    /// Second-smallest `|μ − 1|`; simplicity requires it to exceed the gap
    /// tolerance.
    pub gap: f64,
    /// Eigenvalues within the eigen-tolerance of 1.
    pub multiplicity: usize,
    pub simple: bool,
    /// `(I ⊗ C) v`, unit norm with the largest entry real positive.
    pub eigenvector: Option<CVec>,
    /// `‖r(Z) u − λ u‖` for the returned eigenvector.
    pub residual: Option<f64>,
}

/// `A^{(λ)}_j = A_j + (λ − r(0))⁻¹ B_j C`.
pub fn shifted_tuple(r: &FmRealization, lambda: Complex64) -> Result<MatrixTuple> {
    let shift = lambda - r.feedthrough();
    if shift.norm() <= 1e-14 * (1.0 + r.feedthrough().norm()) {
        return Err(Error::LambdaEqualsValueAtZero);
    }
    let inv = ONE / shift;
    let c = r.c_row();
    Ok(MatrixTuple::new(
        (0..r.d())
            .map(|j| {
                let bj = CMat::from_column_slice(r.size(), 1, r.b()[j].as_slice());
                &r.a()[j] + bj * &c * inv
            })
            .collect(),
    )
    .unwrap_or_else(|_| MatrixTuple::zeros(r.d(), 0)))
}

/// Decides whether `λ ≠ r(0)` is an eigenvalue of `r(Z)` by testing whether
/// 1 is an eigenvalue of `Σ Z_j ⊗ A^{(λ)}_j`.
///
/// The criterion needs a minimal realization; non-minimal input is
/// minimized first, which leaves `r(Z)` unchanged.
pub fn shifted_pencil_eigencheck(
    r: &FmRealization,
    z: &MatrixTuple,
    lambda: Complex64,
    tol: &Tolerances,
) -> Result<Eigencheck> {
    if r.d() != z.d() {
        return Err(Error::DimensionMismatch(format!("realization d = {}, point d = {}", r.d(), z.d())));
    }
    check_size(z.n() * r.size().max(1))?;
    let minimal;
    let r = if r.is_minimal(tol.rank) {
        r
    } else {
        minimal = r.simplify_state(tol.rank);
        &minimal
    };
    let shifted = shifted_tuple(r, lambda)?;
    if !r.domain_contains(z, tol.rcond)? {
        return Err(Error::ZNotInDomain);
    }
    let n = z.n();
    let k = n * r.size();
    if k == 0 {
        return Ok(Eigencheck {
            lambda,
            is_eigenvalue: false,
            distance: f64::INFINITY,
            gap: f64::INFINITY,
            multiplicity: 0,
            simple: false,
            eigenvector: None,
            residual: None,
        });
    }
    let big = z.kron_sum(&shifted)?;
    let mut dists: Vec<f64> = eigenvalues(&big).iter().map(|mu| (mu - ONE).norm()).collect();
    dists.sort_by(f64::total_cmp);
    let distance = dists[0];
    let gap = dists.get(1).copied().unwrap_or(f64::INFINITY);
    let multiplicity = dists.iter().filter(|&&x| x < tol.eig).count();
    let is_eigenvalue = distance < tol.eig;
    let (eigenvector, residual) = if is_eigenvalue {
        let (_, v) = smallest_singular_pair(&(identity(k) - &big));
        let u = kron(&identity(n), &r.c_row()) * v;
        let u = CVec::from_column_slice(u.as_slice());
        if u.norm() == 0.0 {
            (None, None)
        } else {
            let u = fix_phase(&u);
            let rz = r.eval_with(z, tol.rcond)?;
            let res = (&rz * &u - &u * lambda).norm();
            (Some(u), Some(res))
        }
    } else {
        (None, None)
    };
    Ok(Eigencheck {
        lambda,
        is_eigenvalue,
        distance,
        gap,
        multiplicity,
        simple: is_eigenvalue && gap > tol.gap,
        eigenvector,
        residual,
    })
}

/// `T(ζ)_j = (I + (ζ − 1) x x*) T_j`: the rank-one unitary perturbation of
/// `T` whose inner function is `ζ̄ b_{T,x}`. Row-coisometric whenever `T`
/// is and `x` is a unit vector.
pub fn rotated_coisometry(t: &MatrixTuple, x: &CVec, zeta: Complex64) -> Result<MatrixTuple> {
    if x.len() != t.n() {
        return Err(Error::DimensionMismatch("vector length differs from tuple size".into()));
    }
    let xc = CMat::from_column_slice(x.len(), 1, x.as_slice());
    let u = identity(t.n()) + &xc * xc.adjoint() * (zeta - ONE);
    Ok(t.map(|tj| &u * tj))
}

#[derive(Clone, Debug)]
pub struct BoundaryCheck {
    pub zeta: Complex64,
    /// `‖Σ A_j A_j* − I_k‖` for the supplied restriction.
    pub column_isometry_residual: f64,
    /// `max_j ‖T(ζ)_j* V − V A_j*‖`.
    pub invariance_residual: f64,
    /// `‖X − Σ T(ζ)_j X Z̄_j‖` with `X = V`, `Z = Aᵗ`.
    pub intertwiner_residual: f64,
    /// Smallest singular value of `I − Σ Z_j ⊗ T(ζ)_j*`, relative to its
    /// largest.
    pub pencil_smin: f64,
    /// `min |μ − ζ|` over the spectrum of `b(Z)`.
    pub eigen_distance: f64,
    pub passed: bool,
}

/// Verifies that `ζ` is an eigenvalue of `b(Aᵗ)`, where `A*` is the
/// restriction of `T(ζ)*` to the invariant subspace spanned by the
/// orthonormal columns of `v` (`k = n` with `v = I` uses `T(ζ)` itself).
///
/// `b` must be the inner function of `(T, x)`.
pub fn boundary_eigenvalue_check(
    b: &FmRealization,
    t: &MatrixTuple,
    x: &CVec,
    zeta: Complex64,
    v: &CMat,
    tol: &Tolerances,
) -> Result<BoundaryCheck> {
    let n = t.n();
    if v.nrows() != n || v.ncols() == 0 || v.ncols() > n {
        return Err(Error::DimensionMismatch("restriction basis must be n × k with 1 ≤ k ≤ n".into()));
    }
    let k = v.ncols();
    if spectral_norm(&(v.adjoint() * v - identity(k))) > 1e-10 {
        return Err(Error::Invalid("restriction basis is not orthonormal".into()));
    }
    let tz = rotated_coisometry(t, x, zeta)?;
    let a_adj = tz.map(|tj| v.adjoint() * tj.adjoint() * v);
    let invariance_residual = tz
        .iter()
        .zip(a_adj.iter())
        .map(|(tj, aj)| (tj.adjoint() * v - v * aj).norm())
        .fold(0.0, f64::max);
    if invariance_residual > tol.coisometry {
        return Err(Error::NotInvariant { residual: invariance_residual });
    }
    let a = a_adj.adjoint();
    let column_isometry_residual = spectral_norm(&(a.row_gram() - identity(k)));
    if column_isometry_residual > tol.coisometry {
        return Err(Error::NotColumnIsometric { residual: column_isometry_residual });
    }
    let z = a.transpose();
    let zbar = z.conj();
    let mut inter = v.clone();
    for (tj, zj) in tz.iter().zip(zbar.iter()) {
        inter -= tj * v * zj;
    }
    let intertwiner_residual = inter.norm();
    let pen = pencil(&tz.adjoint(), &z)?;
    let sv = crate::linalg::singular_values(&pen);
    let pencil_smin = sv.last().copied().unwrap_or(0.0) / sv[0].max(f64::MIN_POSITIVE);
    let bz = b.eval_with(&z, tol.rcond).map_err(|e| match e {
        Error::SingularPencil { .. } => Error::ZNotInDomain,
        other => other,
    })?;
    let eigen_distance = eigenvalues(&bz).iter().map(|mu| (mu - zeta).norm()).fold(f64::INFINITY, f64::min);
    let passed = intertwiner_residual <= tol.coisometry && pencil_smin <= tol.eig && eigen_distance <= tol.eig;
    Ok(BoundaryCheck {
        zeta,
        column_isometry_residual,
        invariance_residual,
        intertwiner_residual,
        pencil_smin,
        eigen_distance,
        passed,
    })
}
