//! Peak-state certification for a finite irreducible pair `(T, x)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::inner::{
    inner_from_pair, is_irreducible, is_row_coisometry, series_tail_bound_at, verify_inner_truncated,
    CoisometryPair, InnerReport,
};
use crate::linalg::{eigenvalues, fix_phase, identity, smallest_singular_pair, CMat, CVec, ONE};
use crate::par::Exec;
use crate::realization::FmRealization;
use crate::spectral::{similar_to_coisometry, Coisometrization};
use crate::states::{gns_build, Convention, MomentState};
use crate::tol::Tolerances;

#[derive(Clone, Debug, PartialEq)]
pub struct Stage {
    pub name: &'static str,
    pub passed: bool,
    pub residual: f64,
    pub threshold: f64,
    /// Diagnostic stages are recorded but do not gate the certificate.
    pub diagnostic: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifyOptions {
    pub inner_degree: usize,
    pub gns_degree: usize,
    pub tol: Tolerances,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { inner_degree: 8, gns_degree: 4, tol: Tolerances::default() }
    }
}

#[derive(Clone, Debug)]
pub struct GnsDiagnostic {
    pub degree: usize,
    pub rank: usize,
    /// Eigenvalues of `b(Π)` within the eigen-tolerance of 1.
    pub multiplicity: usize,
    pub distance: f64,
    pub gap: f64,
    pub cuntz_defect: f64,
}

#[derive(Clone, Debug)]
pub struct PeakCertificate {
    pub pair: CoisometryPair,
    pub inner: FmRealization,
    pub inner_report: InnerReport,
    pub coisometrization: Coisometrization,
    /// Unit eigenvector of `b(Z)` for eigenvalue 1, largest entry real positive.
    pub y: CVec,
    pub eigenvalue: Complex64,
    /// `|eig − 1|` for the eigenvalue closest to 1.
    pub eigen_distance: f64,
    /// Distance from 1 to the second-closest eigenvalue.
    pub eigen_gap: f64,
    /// `y* b(Z) y`.
    pub mu_b: Complex64,
    /// `Σ_{|ω| ≤ N} b̂_ω μ(L^ω)`.
    pub mu_b_series: Complex64,
    /// Bound on `|μ(b) − μ(b)_series|`.
    pub mu_b_tail_bound: f64,
    /// `μ(½(1 + Re b))`.
    pub mu_witness: f64,
    pub gns: Option<GnsDiagnostic>,
    pub convention: Convention,
    pub options: CertifyOptions,
    pub stages: Vec<Stage>,
    pub passed: bool,
}

fn stage(name: &'static str, residual: f64, threshold: f64) -> Stage {
    Stage { name, passed: residual <= threshold, residual, threshold, diagnostic: false }
}

/// Runs the certification pipeline. Hard failures that make later stages
/// meaningless (reducible `T`, missing or repeated eigenvalue 1) are
/// errors; other stages are recorded and gate `passed`.
pub fn peak_certify(p: &CoisometryPair, opts: &CertifyOptions) -> Result<PeakCertificate> {
    let tol = &opts.tol;
    let mut stages = Vec::new();

    let (_, cres) = is_row_coisometry(p.t(), tol.coisometry);
    stages.push(stage("pair", cres, tol.coisometry));
    if !is_irreducible(p.t(), tol.rank) {
        return Err(Error::NotIrreducible);
    }

    let inner = inner_from_pair(p, tol.rank)?;
    let inner_report = verify_inner_truncated(&inner, opts.inner_degree, tol.inner)?;
    stages.push(stage("inner", inner_report.max_excess, tol.inner));

    let co = similar_to_coisometry(&p.t().transpose(), tol)?;
    stages.push(stage("coisometrize", co.coisometry_residual.max(co.fixed_point_residual), tol.coisometry));

    let z = &co.z;
    let n = z.n();
    let bz = inner.eval_with(z, tol.rcond)?;
    let mut eigs: Vec<(f64, Complex64)> = eigenvalues(&bz).into_iter().map(|mu| ((mu - ONE).norm(), mu)).collect();
    eigs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (eigen_distance, eigenvalue) = eigs[0];
    let eigen_gap = eigs.get(1).map_or(f64::INFINITY, |e| e.0);
    if eigen_distance >= tol.eig {
        return Err(Error::EigenvalueOneMissing { distance: eigen_distance });
    }
    if eigen_gap <= tol.gap {
        return Err(Error::EigenvalueOneDegenerate { gap: eigen_gap });
    }
    let (_, v) = smallest_singular_pair(&(&bz - identity(n)));
    let y = fix_phase(&v);
    stages.push(Stage {
        name: "eigenvalue",
        passed: true,
        residual: eigen_distance,
        threshold: tol.eig,
        diagnostic: false,
    });

    let state = MomentState::new(z.clone(), y.clone(), Convention::Plain, tol.coisometry.max(co.coisometry_residual * 2.0))?;
    let mu_b = y.dotc(&(&bz * &y));
    let series = inner.taylor(opts.inner_degree);
    let moments = state.moments(opts.inner_degree);
    let mu_b_series: Complex64 = series.iter().map(|(w, v)| v * moments.get(w)).sum();
    let mu_b_tail_bound = series_tail_bound_at(&inner, z, opts.inner_degree)?;
    stages.push(stage("moment", (mu_b - ONE).norm(), tol.moment));
    stages.push(stage(
        "moment_series",
        ((mu_b - mu_b_series).norm() - mu_b_tail_bound).max(0.0),
        tol.moment,
    ));

    let mu_witness = 0.5 * (1.0 + mu_b.re);
    stages.push(stage("witness", (mu_witness - 1.0).abs(), tol.moment));

    let gns = gns_diagnostic(&inner, &state, opts);
    if let Some(g) = &gns {
        stages.push(Stage {
            name: "gns",
            passed: g.multiplicity == 1,
            residual: g.distance,
            threshold: tol.eig,
            diagnostic: true,
        });
    }

    let passed = stages.iter().filter(|s| !s.diagnostic).all(|s| s.passed);
    Ok(PeakCertificate {
        pair: p.clone(),
        inner,
        inner_report,
        coisometrization: co,
        y,
        eigenvalue,
        eigen_distance,
        eigen_gap,
        mu_b,
        mu_b_series,
        mu_b_tail_bound,
        mu_witness,
        gns,
        convention: Convention::Plain,
        options: *opts,
        stages,
        passed,
    })
}

/// Counts eigenvalues near 1 of `b(Π)` on the truncated GNS model. Boundary
/// effects of the truncation can add spurious ones, so this never gates.
fn gns_diagnostic(inner: &FmRealization, state: &MomentState, opts: &CertifyOptions) -> Option<GnsDiagnostic> {
    let tol = &opts.tol;
    let model = gns_build(state, opts.gns_degree, tol.psd.max(1e-8), tol.rank, Exec::Sequential).ok()?;
    if model.rank == 0 {
        return None;
    }
    let bp: CMat = inner.eval_with(&model.pi, tol.rcond).ok()?;
    let mut dists: Vec<f64> = eigenvalues(&bp).iter().map(|mu| (mu - ONE).norm()).collect();
    dists.sort_by(f64::total_cmp);
    let loose = tol.eig.max(1e-6);
    Some(GnsDiagnostic {
        degree: opts.gns_degree,
        rank: model.rank,
        multiplicity: dists.iter().filter(|&&x| x < loose).count(),
        distance: dists[0],
        gap: dists.get(1).copied().unwrap_or(f64::INFINITY),
        cuntz_defect: model.cuntz_defect,
    })
}
