//! Bundled fixtures with known answers, plus a seeded round-trip sweep.

use ncreal::certify::{peak_certify, CertifyOptions};
use ncreal::error::Result;
use ncreal::expr::compile;
use ncreal::fixtures::{basis_vector, reducible_three, rotation_pair, shift_pair};
use ncreal::inner::{
    inner_from_pair, multiplier_norm_lower_bound, quantum_channel_check, recover_pair_from_inner,
    verify_inner_truncated, CoisometryPair,
};
use ncreal::linalg::{c, ONE, ZERO};
use ncreal::par;
use ncreal::sample;
use ncreal::spectral::shifted_pencil_eigencheck;
use ncreal::tol::Tolerances;
use ncreal::tuple::MatrixTuple;
use serde_json::{json, Value};

use crate::report::Outcome;
use crate::{Failure, RunConfig};

type Fixture = fn(&Tolerances, u64) -> Result<(bool, Value)>;

fn shift_certificate(tol: &Tolerances, _: u64) -> Result<(bool, Value)> {
    pair_certificate(shift_pair(), tol)
}

fn rotation_certificate(tol: &Tolerances, _: u64) -> Result<(bool, Value)> {
    pair_certificate(rotation_pair(), tol)
}

fn pair_certificate(t: MatrixTuple, tol: &Tolerances) -> Result<(bool, Value)> {
    let p = CoisometryPair::new(t, basis_vector(2, 0), tol)?;
    let ch = quantum_channel_check(&p, 8, tol)?;
    let cert = peak_certify(&p, &CertifyOptions { tol: *tol, ..CertifyOptions::default() })?;
    let mu = (cert.mu_b - ONE).norm();
    let ok = ch.is_channel && cert.passed && mu <= tol.moment;
    Ok((ok, json!({ "is_channel": ch.is_channel, "certified": cert.passed, "mu_b_error": mu, "eigen_gap": cert.eigen_gap })))
}

fn reducible_value(tol: &Tolerances, _: u64) -> Result<(bool, Value)> {
    let p = CoisometryPair::new(reducible_three(), basis_vector(3, 0), tol)?;
    let b = inner_from_pair(&p, tol.rank)?;
    let v = b.eval(&MatrixTuple::scalar_point(&[c(-1.0, 0.0), ZERO]))?[(0, 0)];
    let chk = shifted_pencil_eigencheck(&b, &reducible_three().transpose(), ONE, tol)?;
    let u = chk.eigenvector.unwrap_or_else(|| basis_vector(3, 1));
    // e1 + e3 direction
    let off = (u[0] - u[2]).norm() + u[1].norm();
    let ok = (v - ONE).norm() < 1e-10 && chk.simple && off < 1e-8;
    Ok((ok, json!({ "value_at_minus_one_zero": [v.re, v.im], "simple": chk.simple, "eigenvector_deviation": off })))
}

fn transpose_not_inner(tol: &Tolerances, _: u64) -> Result<(bool, Value)> {
    let b = compile("0.7071067811865476 (1 + z1) z2", 2)?;
    let rep = verify_inner_truncated(&b, 8, tol.inner)?;
    let trep = verify_inner_truncated(&b.transpose(), 8, tol.inner)?;
    let lb = multiplier_norm_lower_bound(&b.transpose(), 6)?;
    let ok = rep.passed && !trep.passed && lb > 1.0 + 1e-3;
    Ok((ok, json!({ "inner": rep.passed, "transpose_inner": trep.passed, "transpose_norm_lower_bound": lb })))
}

fn random_round_trip(tol: &Tolerances, seed: u64) -> Result<(bool, Value)> {
    let mut rng = sample::rng(seed);
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        let n = 1 + k % 3;
        let p = sample::pair(&mut rng, 2, n, tol);
        let b = inner_from_pair(&p, tol.rank)?;
        let back = inner_from_pair(&recover_pair_from_inner(&b, 8, tol)?, tol.rank)?;
        worst = worst.max(back.taylor(6).max_abs_diff(&b.taylor(6)));
    }
    Ok((worst < 1e-9, json!({ "pairs": 10, "max_taylor_difference": worst })))
}

const FIXTURES: [(&str, Fixture); 5] = [
    ("shift-pair-certificate", shift_certificate),
    ("rotation-pair-certificate", rotation_certificate),
    ("reducible-3x3", reducible_value),
    ("normalized-product-transpose", transpose_not_inner),
    ("random-round-trip", random_round_trip),
];

pub fn run(cfg: &RunConfig) -> std::result::Result<Outcome, Failure> {
    let seed = cfg.seed.unwrap_or(0);
    let tol = cfg.tolerances;
    let exec = match cfg.jobs {
        Some(1) => par::Exec::Sequential,
        _ => par::Exec::Parallel,
    };
    let results = par::map(exec, &FIXTURES, |(name, f)| {
        let (passed, detail) = match f(&tol, seed) {
            Ok(r) => r,
            Err(e) => (false, json!({ "error": e.to_string() })),
        };
        json!({ "name": name, "passed": passed, "detail": detail })
    });
    let passed = results.iter().all(|r| r["passed"] == json!(true));
    Ok(Outcome::check(passed, json!({ "fixtures": results })))
}
