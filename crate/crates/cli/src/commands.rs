use ncreal::certify::{peak_certify, CertifyOptions};
use ncreal::inner::{multiplier_norm_lower_bound, quantum_channel_check, verify_inner_truncated, MAX_FOCK_WORDS};
use ncreal::json::{
    matrix_to_wire, tuple_to_wire, vector_to_wire, AnyRealization, CertificateJson, RealizationJson, TupleJson,
    WireComplex,
};
use ncreal::linalg::{singular_values, CMat};
use ncreal::par::Exec;
use ncreal::realization::{pencil, FmRealization};
use ncreal::spectral::{jsr_report, shifted_pencil_eigencheck, similar_to_coisometry};
use ncreal::states::{gns_build, MomentState};
use ncreal::words::word_count;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::input::{compile_expr, load_pair, load_realization, load_tuple};
use crate::report::Outcome;
use crate::{Command, Failure, RealizationSource, RunConfig};

fn exec(cfg: &RunConfig) -> Exec {
    match cfg.jobs {
        Some(1) => Exec::Sequential,
        _ => Exec::Parallel,
    }
}

fn source(src: &RealizationSource) -> Result<AnyRealization, Failure> {
    match (&src.realization, &src.expr) {
        (_, Some(text)) => Ok(AnyRealization::Fm(compile_expr(text, src.d)?)),
        (Some(path), None) => load_realization(path),
        (None, None) => Err(Failure::input("expected a realization file or --expr")),
    }
}

fn realization_json(r: &AnyRealization) -> Value {
    serde_json::to_value(RealizationJson::from(r)).expect("wire types serialize")
}

fn fm_json(r: &FmRealization) -> Value {
    serde_json::to_value(RealizationJson::from(r)).expect("wire types serialize")
}

/// `σ_min / σ_max` of the pencil at `z`.
fn pencil_rcond(r: &FmRealization, z: &ncreal::tuple::MatrixTuple) -> Result<f64, Failure> {
    let l: CMat = pencil(r.a(), z)?;
    if l.nrows() == 0 {
        return Ok(1.0);
    }
    let sv = singular_values(&l);
    Ok(sv.last().copied().unwrap_or(0.0) / sv[0].max(f64::MIN_POSITIVE))
}

fn parse_lambda(text: &str) -> Result<Complex64, Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| Failure::input(format!("--lambda: cannot parse {s:?}")));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(Failure::input("--lambda: expected `re` or `re,im`")),
    }
}

/// Largest `N ≤ degree` whose Fock truncation fits the word cap.
fn tractable_degree(d: usize, degree: usize) -> usize {
    (0..=degree).rev().find(|&n| word_count(d, n) <= MAX_FOCK_WORDS).unwrap_or(0)
}

pub fn dispatch(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let tol = &cfg.tolerances;
    match &cfg.command {
        Command::Compile { expr, d } => {
            let r = compile_expr(expr, *d)?;
            Ok(Outcome::ok(json!({
                "expr": expr,
                "d": r.d(),
                "size": r.size(),
                "value_at_zero": WireComplex::from(r.value_at_zero()),
                "realization": fm_json(&r),
            })))
        }
        Command::Eval { source: src, point } => {
            let r = source(src)?.to_fm(tol.rank);
            let z = load_tuple(point)?;
            let rcond = pencil_rcond(&r, &z)?;
            let v = r.eval_with(&z, tol.rcond)?;
            Ok(Outcome::ok(json!({
                "n": z.n(),
                "value": matrix_to_wire(&v),
                "pencil_rcond": rcond,
            })))
        }
        Command::Taylor { source: src } => {
            let degree = cfg.degree.unwrap_or_default();
            let r = source(src)?;
            let series = match &r {
                AnyRealization::Fm(f) => f.taylor(degree),
                AnyRealization::Descriptor(dr) => dr.taylor(degree),
            };
            Ok(Outcome::ok(json!({ "degree": degree, "d": r.d(), "coefficients": series })))
        }
        Command::Minimize { source: src } => {
            let r = source(src)?;
            let before = r.size();
            let m = r.to_descriptor(tol.rank).minimize(tol.rank);
            Ok(Outcome::ok(json!({
                "input_size": before,
                "size": m.size(),
                "realization": realization_json(&AnyRealization::Descriptor(m)),
            })))
        }
        Command::Jsr { tuple, steps } => {
            let t = load_tuple(tuple)?;
            let rep = jsr_report(&t, *steps)?;
            Ok(Outcome::ok(json!({ "d": t.d(), "n": t.n(), "jsr": rep })))
        }
        Command::Transpose { source: src } => {
            let r = match source(src)? {
                AnyRealization::Fm(f) => AnyRealization::Fm(f.transpose()),
                AnyRealization::Descriptor(dr) => AnyRealization::Descriptor(dr.transpose()),
            };
            Ok(Outcome::ok(json!({ "size": r.size(), "realization": realization_json(&r) })))
        }
        Command::InnerCheck { source: src } => {
            let degree = cfg.degree.unwrap_or_default();
            let r = source(src)?.to_fm(tol.rank);
            let rep = verify_inner_truncated(&r, degree, tol.inner)?;
            let nd = tractable_degree(r.d(), degree);
            let norm = multiplier_norm_lower_bound(&r, nd)?;
            Ok(Outcome::check(
                rep.passed,
                json!({ "inner": rep, "norm_lower_bound": norm, "norm_degree": nd }),
            ))
        }
        Command::ChannelCheck { pair } => {
            let degree = cfg.degree.unwrap_or_default();
            let (p, _) = load_pair(pair, tol)?;
            let rep = quantum_channel_check(&p, degree, tol)?;
            Ok(Outcome::check(rep.is_channel, serde_json::to_value(&rep).expect("report serializes")))
        }
        Command::Coisometrize { tuple } => {
            let w = load_tuple(tuple)?;
            let co = similar_to_coisometry(&w, tol)?;
            let passed = co.coisometry_residual <= tol.coisometry;
            Ok(Outcome::check(
                passed,
                json!({
                    "S": matrix_to_wire(&co.s),
                    "P": matrix_to_wire(&co.p),
                    "tuple": TupleJson::from(&co.z),
                    "jsr": co.jsr,
                    "perron_gap": co.gap,
                    "coisometry_residual": co.coisometry_residual,
                    "fixed_point_residual": co.fixed_point_residual,
                }),
            ))
        }
        Command::Eigencheck { source: src, point, lambda } => {
            let r = source(src)?.to_fm(tol.rank);
            let z = load_tuple(point)?;
            let lambda = parse_lambda(lambda)?;
            let chk = shifted_pencil_eigencheck(&r, &z, lambda, tol)?;
            Ok(Outcome::check(
                chk.is_eigenvalue,
                json!({
                    "lambda": WireComplex::from(chk.lambda),
                    "is_eigenvalue": chk.is_eigenvalue,
                    "simple": chk.simple,
                    "multiplicity": chk.multiplicity,
                    "distance": chk.distance,
                    "gap": chk.gap,
                    "eigenvector": chk.eigenvector.as_ref().map(vector_to_wire),
                    "residual": chk.residual,
                }),
            ))
        }
        Command::PeakCertify { pair, gns_degree } => {
            let (p, _) = load_pair(pair, tol)?;
            let opts = CertifyOptions { inner_degree: cfg.degree.unwrap_or_default(), gns_degree: *gns_degree, tol: *tol };
            let cert = peak_certify(&p, &opts)?;
            let body = serde_json::to_value(CertificateJson::from(&cert)).expect("certificate serializes");
            Ok(Outcome::check(cert.passed, body))
        }
        Command::Gns { pair } => {
            let degree = cfg.degree.unwrap_or_default();
            let (p, conv) = load_pair(pair, tol)?;
            let st = MomentState::new(p.t().clone(), p.x().clone(), conv, tol.coisometry)?;
            let g = gns_build(&st, degree, tol.psd, tol.rank, exec(cfg))?;
            Ok(Outcome::ok(json!({
                "degree": g.degree,
                "convention": conv,
                "words": g.words.len(),
                "rank": g.rank,
                "gram_min_eigenvalue": g.min_eig,
                "cuntz_defect": g.cuntz_defect,
                "moment_residual": g.moment_residual,
                "Pi": tuple_to_wire(&g.pi),
            })))
        }
        Command::Selftest => crate::selftest::run(cfg),
    }
}
