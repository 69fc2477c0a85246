//! Row coisometries, the NC rational inner functions they generate, and
//! the checks tying inners, transposes and unital channels together.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{fm_add, fm_inv, fm_scale};
use crate::linalg::{
    hermitian_eigen, hermitian_function, identity, kron, spectral_norm, vec_of, CMat, CVec, PencilSolve,
    ONE, ZERO,
};
use crate::minimal::invariant_span;
use crate::realization::FmRealization;
use crate::series::TruncatedSeries;
use crate::spectral::{jsr_exact, CpMapMatrix};
use crate::tol::{check_size, Tolerances};
use crate::tuple::MatrixTuple;
use crate::words::{word_count, words_up_to, Word};

/// `(‖Σ T_j T_j* − I‖ ≤ tol, residual)`.
pub fn is_row_coisometry(t: &MatrixTuple, tol: f64) -> (bool, f64) {
    let residual = spectral_norm(&(t.row_gram() - identity(t.n())));
    (residual <= tol, residual)
}

/// The unital algebra generated by `T_1 … T_d` is all of `ℂ^{n×n}`.
pub fn is_irreducible(t: &MatrixTuple, rank_factor: f64) -> bool {
    let n = t.n();
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    // left multiplication X ↦ T_j X acts on vec X as I ⊗ T_j
    let left = t.map(|tj| kron(&identity(n), tj));
    let start = CMat::from_column_slice(n * n, 1, vec_of(&identity(n)).as_slice());
    invariant_span(&start, &left, rank_factor).ncols() == n * n
}

fn column(v: &CVec) -> CMat {
    CMat::from_column_slice(v.len(), 1, v.as_slice())
}

/// A finite row coisometry with a unit vector cyclic for both `T` and
/// `T*`; all invariants are checked at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct CoisometryPair {
    t: MatrixTuple,
    x: CVec,
}

impl CoisometryPair {
    pub fn new(t: MatrixTuple, x: CVec, tol: &Tolerances) -> Result<Self> {
        if x.len() != t.n() {
            return Err(Error::DimensionMismatch(format!("x has length {}, T is {}x{}", x.len(), t.n(), t.n())));
        }
        check_size(t.n())?;
        let (ok, residual) = is_row_coisometry(&t, tol.coisometry);
        if !ok {
            return Err(Error::NotCoisometry { residual });
        }
        let norm = x.norm();
        if (norm - 1.0).abs() > tol.coisometry {
            return Err(Error::NotUnitVector { norm });
        }
        let n = t.n();
        let reach = invariant_span(&column(&x), &t, tol.rank).ncols();
        if reach != n {
            return Err(Error::CyclicityFailure(format!("x spans a {reach}-dimensional T-invariant subspace of C^{n}")));
        }
        let obs = invariant_span(&column(&x), &t.adjoint(), tol.rank).ncols();
        if obs != n {
            return Err(Error::CyclicityFailure(format!("x spans a {obs}-dimensional T*-invariant subspace of C^{n}")));
        }
        Ok(Self { t, x })
    }

    pub fn t(&self) -> &MatrixTuple {
        &self.t
    }

    pub fn x(&self) -> &CVec {
        &self.x
    }

    pub fn n(&self) -> usize {
        self.t.n()
    }

    pub fn d(&self) -> usize {
        self.t.d()
    }

    /// `(row(Tᵗ), x̄)`, a pair exactly when `row(Tᵗ)` is a row coisometry.
    pub fn transpose(&self, tol: &Tolerances) -> Result<Self> {
        Self::new(self.t.transpose(), self.x.map(|z| z.conj()), tol)
    }
}

/// `b_{T,x}` with `A_j = T_j*(I − xx*)|_{H₀}`, `B_j = T_j* x`, `C = x*|_{H₀}`,
/// `D = 0`, where `H₀ = span{T^{*α} x : α ≠ ∅}`.
///
/// When `H₀` is the whole space the standard basis is kept, so the pencil
/// entries are those of `T_j*(I − xx*)` themselves.
pub fn inner_from_pair(p: &CoisometryPair, rank_factor: f64) -> Result<FmRealization> {
    let t = p.t();
    let x = p.x();
    let n = t.n();
    let d = t.d();
    let tadj = t.adjoint();
    let mut start = CMat::zeros(n, d);
    for j in 0..d {
        start.set_column(j, &(&tadj[j] * x));
    }
    let q = invariant_span(&start, &tadj, rank_factor);
    let m = q.ncols();
    if m == 0 {
        return Err(Error::CyclicityFailure("T* x vanishes".into()));
    }
    let q = if m == n { identity(n) } else { q };
    let xc = column(x);
    let proj = identity(n) - &xc * xc.adjoint();
    let qa = q.adjoint();
    let a = tadj.map(|tj| &qa * tj * &proj * &q);
    let b = (0..d).map(|j| &qa * (&tadj[j] * x)).collect();
    let c = (xc.adjoint() * &q).transpose();
    FmRealization::new(a, b, CVec::from_column_slice(c.as_slice()), ZERO)
}

/// `Φ_A(X) = Σ A_j X A_j*` applied to `X`, repeated.
fn tail_masses(r: &FmRealization, degree: usize) -> Result<Vec<f64>> {
    let m = r.size();
    if m == 0 {
        return Ok(vec![0.0; degree + 1]);
    }
    let cp = CpMapMatrix::new(r.a())?;
    let mut q0 = CMat::zeros(m, m);
    for bj in r.b() {
        let col = column(bj);
        q0 += &col * col.adjoint();
    }
    let solver = PencilSolve::new(identity(m * m) - cp.matrix());
    let rhs = CMat::from_column_slice(m * m, 1, vec_of(&q0).as_slice());
    let sol = solver.solve(&rhs).ok_or(Error::TailBoundUnavailable { jsr: 1.0 })?;
    let mut x = CMat::from_column_slice(m, m, sol.as_slice());
    let c = r.c_row();
    let mut out = Vec::with_capacity(degree + 1);
    for k in 0..=degree {
        if k > 0 {
            x = cp.apply(&x);
        }
        out.push((&c * &x * c.adjoint())[(0, 0)].re.max(0.0));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct InnerReport {
    pub degree: usize,
    pub jsr: f64,
    /// `Σ_{|ω| ≤ N} |b̂_ω|²`.
    pub mass: f64,
    /// `Σ_{|ω| > N} |b̂_ω|²`, computed in closed form.
    pub tail_mass: f64,
    pub mass_defect: f64,
    /// Largest `|Σ_ω conj(b̂_ω) b̂_{ωγ}|` over `γ ≠ ∅`, truncated to the window.
    pub max_correlation_defect: f64,
    /// Largest amount by which any defect exceeds its tail bound.
    pub max_excess: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Truncated test of `b(L)* b(L) = I`: unit coefficient mass and vanishing
/// shifted correlations, each compared against its exact tail bound.
///
/// The mass tail is `C Φ_A^N((I − Φ_A)⁻¹ Σ_j B_j B_j*) C*`; a correlation
/// at shift `γ` misses at most `sqrt(τ_{N−|γ|} τ_N)`.
pub fn verify_inner_truncated(r: &FmRealization, degree: usize, tol: f64) -> Result<InnerReport> {
    let jsr = jsr_exact(r.a())?;
    if jsr >= 1.0 - 1e-12 {
        return Err(Error::TailBoundUnavailable { jsr });
    }
    let tails = tail_masses(r, degree)?;
    let series = r.taylor(degree);
    let mass = series.norm_sq();
    let tail_mass = tails[degree];
    let mass_defect = (mass - 1.0).abs();
    let mut max_excess = (mass_defect - tail_mass).max(0.0);
    let mut corr: BTreeMap<Word, Complex64> = BTreeMap::new();
    for (v, bv) in series.iter() {
        for split in 0..v.len() {
            let omega = Word::new(v.letters()[..split].to_vec(), r.d()).expect("letters in range");
            let gamma = Word::new(v.letters()[split..].to_vec(), r.d()).expect("letters in range");
            let bw = series.get(&omega);
            if bw != ZERO {
                *corr.entry(gamma).or_default() += bw.conj() * bv;
            }
        }
    }
    let mut max_correlation_defect: f64 = 0.0;
    for (gamma, value) in &corr {
        let defect = value.norm();
        max_correlation_defect = max_correlation_defect.max(defect);
        let bound = (tails[degree - gamma.len()] * tails[degree]).sqrt();
        max_excess = max_excess.max(defect - bound);
    }
    Ok(InnerReport {
        degree,
        jsr,
        mass,
        tail_mass,
        mass_defect,
        max_correlation_defect,
        max_excess,
        tolerance: tol,
        passed: max_excess <= tol,
    })
}

pub const MAX_FOCK_WORDS: usize = 4096;

/// Largest singular value of `P_N r(L) P_N` on the span of words of length
/// at most `N`; nondecreasing in `N` and bounded by `‖r(L)‖`.
pub fn multiplier_norm_lower_bound(r: &FmRealization, degree: usize) -> Result<f64> {
    let d = r.d();
    let size = word_count(d, degree);
    if size > MAX_FOCK_WORDS {
        return Err(Error::TooLarge { n: size, cap: MAX_FOCK_WORDS });
    }
    let series = r.taylor(degree);
    let words = words_up_to(d, degree);
    let mut mat = CMat::zeros(size, size);
    for (col, beta) in words.iter().enumerate() {
        for (omega, v) in series.iter() {
            if omega.len() + beta.len() <= degree {
                mat[(omega.concat(beta).canonical_index(d), col)] += v;
            }
        }
    }
    Ok(spectral_norm(&mat))
}

/// Recovers `(T, x)`, up to a joint unitary, from an inner `r` with
/// `r(0) = 0`.
///
/// `(1 − r)⁻¹` has a minimal descriptor realization `(Ã, b̃, c̃)` jointly
/// similar to `(T*, x, x)`. The similarity is pinned by the unique `Q ≻ 0`
/// with `Q = Σ Ã_j* Q Ã_j` and `Q b̃ = c̃`; then `S = Q^{-1/2}` gives
/// `T_j = (S⁻¹ Ã_j S)*` and `x = S⁻¹ b̃ = S c̃`.
pub fn recover_pair_from_inner(r: &FmRealization, degree: usize, tol: &Tolerances) -> Result<CoisometryPair> {
    if r.feedthrough().norm() > tol.moment {
        return Err(Error::NotInner { defect: r.feedthrough().norm() });
    }
    let r = r.simplify_state(tol.rank);
    let report = match verify_inner_truncated(&r, degree, tol.inner) {
        Ok(rep) => rep,
        Err(Error::TailBoundUnavailable { .. }) => return Err(Error::NotInner { defect: f64::INFINITY }),
        Err(e) => return Err(e),
    };
    if !report.passed {
        return Err(Error::NotInner { defect: report.max_excess });
    }
    let d = r.d();
    let one_minus = fm_add(&FmRealization::constant(d, ONE), &fm_scale(&r, -ONE))?;
    let g = fm_inv(&one_minus)?.to_descriptor_with(tol.rank);
    let m = g.size();
    if m == 0 {
        return Err(Error::NormalizationFailure("(1 - b)^-1 has an empty realization".into()));
    }
    check_size(m)?;
    let (a, bt, ct) = (g.a(), g.b(), g.c());
    let mut k = CMat::zeros(m * m + m, m * m);
    let mut fixed = identity(m * m);
    for aj in a.iter() {
        fixed -= kron(&aj.transpose(), &aj.adjoint());
    }
    k.view_mut((0, 0), (m * m, m * m)).copy_from(&fixed);
    k.view_mut((m * m, 0), (m, m * m)).copy_from(&kron(&column(bt).transpose(), &identity(m)));
    let mut rhs = CMat::zeros(m * m + m, 1);
    for i in 0..m {
        rhs[(m * m + i, 0)] = ct[i];
    }
    let sol = k
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-13)
        .map_err(|e| Error::NormalizationFailure(format!("least-squares solve failed: {e}")))?;
    let solve_residual = (&k * &sol - &rhs).norm();
    if solve_residual > 1e-8 * (1.0 + ct.norm()) {
        return Err(Error::NormalizationFailure(format!(
            "no Hermitian fixed point matches b and c (residual {solve_residual:e})"
        )));
    }
    let q = CMat::from_column_slice(m, m, sol.as_slice());
    let q = (&q + q.adjoint()) * Complex64::new(0.5, 0.0);
    let (vals, _) = hermitian_eigen(&q);
    let min_eig = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let max_eig = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min_eig <= tol.definite * max_eig.abs() {
        return Err(Error::NormalizationFailure(format!("recovered Q is not positive definite (min eigenvalue {min_eig:e})")));
    }
    let s = hermitian_function(&q, |v| 1.0 / v.sqrt());
    let sinv = hermitian_function(&q, f64::sqrt);
    let t = a.map(|aj| (&sinv * aj * &s).adjoint());
    let x = &sinv * bt;
    let x_alt = &s * ct;
    let mismatch = (&x - &x_alt).norm();
    if mismatch > 1e-8 {
        return Err(Error::NormalizationFailure(format!("S⁻¹b and S c differ by {mismatch:e}")));
    }
    let norm = x.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NormalizationFailure(format!("recovered x has norm {norm}")));
    }
    CoisometryPair::new(t, x.unscale(norm), tol)
}

#[derive(Clone, Debug, Serialize)]
pub struct ChannelReport {
    pub is_channel: bool,
    /// `‖Σ T_jᵗ conj(T_j) − I‖`.
    pub transpose_coisometry_residual: f64,
    pub inner: InnerReport,
    /// `None` when the transpose has no tail bound (`jsr ≥ 1`).
    pub transpose_inner: Option<InnerReport>,
    pub transpose_is_inner: bool,
    /// Inner check of `b_{row(Tᵗ), x̄}` when the pair exists.
    pub transpose_pair_inner: Option<InnerReport>,
    /// `max_ω |(bᵗ)^_ω − (b_{row(Tᵗ), x̄})^_ω|` on the window.
    pub taylor_match_residual: Option<f64>,
    /// `‖P_N bᵗ(L) P_N‖` at the largest tractable `N ≤ degree`.
    pub transpose_norm_lower_bound: f64,
    pub norm_degree: usize,
    #[serde(skip)]
    pub transpose_pair: Option<CoisometryPair>,
}

/// `row(Tᵗ)` is a row coisometry iff `bᵗ` is inner, and then
/// `bᵗ = b_{row(Tᵗ), x̄}`; all three facts are checked independently.
pub fn quantum_channel_check(p: &CoisometryPair, degree: usize, tol: &Tolerances) -> Result<ChannelReport> {
    let (is_channel, transpose_coisometry_residual) = is_row_coisometry(&p.t().transpose(), tol.coisometry);
    let b = inner_from_pair(p, tol.rank)?;
    let inner = verify_inner_truncated(&b, degree, tol.inner)?;
    let bt = b.transpose();
    let transpose_inner = match verify_inner_truncated(&bt, degree, tol.inner) {
        Ok(rep) => Some(rep),
        Err(Error::TailBoundUnavailable { .. }) => None,
        Err(e) => return Err(e),
    };
    let transpose_is_inner = transpose_inner.as_ref().is_some_and(|r| r.passed);
    let (transpose_pair, transpose_pair_inner, taylor_match_residual) = if is_channel {
        let pt = p.transpose(tol)?;
        let bp = inner_from_pair(&pt, tol.rank)?;
        let rep = verify_inner_truncated(&bp, degree, tol.inner)?;
        let resid = bt.taylor(degree).max_abs_diff(&bp.taylor(degree));
        (Some(pt), Some(rep), Some(resid))
    } else {
        (None, None, None)
    };
    let mut norm_degree = degree;
    while norm_degree > 0 && word_count(p.d(), norm_degree) > 1024 {
        norm_degree -= 1;
    }
    let transpose_norm_lower_bound = multiplier_norm_lower_bound(&bt, norm_degree)?;
    Ok(ChannelReport {
        is_channel,
        transpose_coisometry_residual,
        inner,
        transpose_inner,
        transpose_is_inner,
        transpose_pair_inner,
        taylor_match_residual,
        transpose_norm_lower_bound,
        norm_degree,
        transpose_pair,
    })
}

/// `y* (Σ_{|ω| > N} b̂_ω Z^ω) y` is bounded by
/// `‖C‖ ‖M^N (I − M)⁻¹ Σ_j Z_j ⊗ B_j‖` with `M = Σ_j Z_j ⊗ A_j`.
pub fn series_tail_bound_at(r: &FmRealization, z: &MatrixTuple, degree: usize) -> Result<f64> {
    let m = r.size();
    if m == 0 {
        return Ok(0.0);
    }
    let big = z.kron_sum(r.a())?;
    let k = big.nrows();
    let solver = PencilSolve::new(identity(k) - &big);
    let mut x = solver.solve(&r.input_kron(z)).ok_or(Error::ZNotInDomain)?;
    for _ in 0..degree {
        x = &big * x;
    }
    Ok(r.c().norm() * spectral_norm(&x))
}

/// `Σ_{|ω| ≤ N} ŝ_ω m(ω)` for a moment function `m`.
pub fn pair_series_with_moments(series: &TruncatedSeries, moment: impl Fn(&Word) -> Complex64) -> Complex64 {
    series.iter().map(|(w, v)| v * moment(w)).sum()
}
