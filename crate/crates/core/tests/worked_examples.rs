mod common;

use common::*;
use ncreal::certify::{peak_certify, CertifyOptions};
use ncreal::expr::compile;
use ncreal::inner::{
    inner_from_pair, is_irreducible, is_row_coisometry, multiplier_norm_lower_bound, quantum_channel_check,
    verify_inner_truncated,
};
use ncreal::linalg::{c, identity, CVec, ONE, ZERO};
use ncreal::series::TruncatedSeries;
use ncreal::spectral::{boundary_eigenvalue_check, rotated_coisometry, shifted_pencil_eigencheck, similar_to_coisometry};
use ncreal::tol::Tolerances;
use ncreal::tuple::MatrixTuple;

#[test]
fn shift_pair_gives_z2_z1() {
    let b = inner_from_pair(&pair(shift_t(), e(2, 0)), 1e-9).unwrap();
    let want = TruncatedSeries::from_pairs(2, 6, &[("21", ONE)]).unwrap();
    assert!(b.taylor(6).max_abs_diff(&want) < 1e-14);
}

#[test]
fn three_by_three_pencil_matches_printed_entries() {
    let b = inner_from_pair(&pair(three_by_three(), e(3, 0)), 1e-9).unwrap();
    // I − z1 A1 − z2 A2 at (z1, z2) = (1, 0) and (0, 1)
    let p1 = identity(3) - &b.a()[0];
    let p2 = identity(3) - &b.a()[1];
    let want1 = cmat(&[&[(1., 0.), (0.5, 0.), (0.5, 0.)], &[(0., 0.), (1., 0.), (0., 0.)], &[(0., 0.), (-0.5, 0.), (1.5, 0.)]]);
    let want2 = cmat(&[&[(1., 0.), (0.5, 0.), (0.5, 0.)], &[(0., 0.), (1.5, 0.), (-0.5, 0.)], &[(0., 0.), (0., 0.), (1., 0.)]]);
    assert!((p1 - want1).norm() < 1e-14);
    assert!((p2 - want2).norm() < 1e-14);
}

/// Closed form `½(z2 − z1) + ¼(z1 + z2)[1 1] M⁻¹ [z2; z1]` at scalars.
fn printed_closed_form(z1: f64, z2: f64) -> f64 {
    let (a, b, cc, d) = (1.0 + 0.5 * z2, -0.5 * z2, -0.5 * z1, 1.0 + 0.5 * z1);
    let det = a * d - b * cc;
    let (u, v) = ((d * z2 - b * z1) / det, (-cc * z2 + a * z1) / det);
    0.5 * (z2 - z1) + 0.25 * (z1 + z2) * (u + v)
}

#[test]
fn three_by_three_value_at_minus_one_zero() {
    let b = inner_from_pair(&pair(three_by_three(), e(3, 0)), 1e-9).unwrap();
    let v = b.eval(&MatrixTuple::scalar_point(&[c(-1.0, 0.0), ZERO])).unwrap()[(0, 0)];
    assert!((v - ONE).norm() < 1e-12, "{v}");
    assert!((printed_closed_form(-1.0, 0.0) - 1.0).abs() < 1e-14);
    for (z1, z2) in [(0.3, -0.2), (-0.4, 0.1), (0.25, 0.5)] {
        let v = b.eval(&MatrixTuple::scalar_point(&[c(z1, 0.0), c(z2, 0.0)])).unwrap()[(0, 0)];
        assert!((v.re - printed_closed_form(z1, z2)).abs() < 1e-12 && v.im.abs() < 1e-14);
    }
}

#[test]
fn three_by_three_eigenvector_is_e1_plus_e3() {
    let t = three_by_three();
    assert!(!is_irreducible(&t, 1e-9));
    let b = inner_from_pair(&pair(t.clone(), e(3, 0)), 1e-9).unwrap();
    let chk = shifted_pencil_eigencheck(&b, &t.transpose(), ONE, &Tolerances::default()).unwrap();
    assert!(chk.is_eigenvalue && chk.simple);
    let want = CVec::from_vec(vec![ONE, ZERO, ONE]);
    assert!(angle(chk.eigenvector.as_ref().unwrap(), &want) < 1e-8);
    let r = b.eval(&t.transpose()).unwrap();
    let mut eigs: Vec<f64> = ncreal::linalg::eigenvalues(&r).iter().map(|z| z.re).collect();
    eigs.sort_by(f64::total_cmp);
    for (got, want) in eigs.iter().zip([0.25, 1.0 / 3.0, 1.0]) {
        assert!((got - want).abs() < 1e-10, "{eigs:?}");
    }
}

#[test]
fn two_by_two_pairs_are_channels_and_peak() {
    let tol = Tolerances::default();
    for t in [shift_t(), rotation_s()] {
        assert!(is_row_coisometry(&t, 1e-12).0);
        assert!(is_row_coisometry(&t.transpose(), 1e-12).0);
        let p = pair(t, e(2, 0));
        let rep = quantum_channel_check(&p, 8, &tol).unwrap();
        assert!(rep.is_channel && rep.inner.passed && rep.transpose_is_inner);
        assert!(rep.transpose_pair_inner.as_ref().is_some_and(|r| r.passed));
        assert!(rep.taylor_match_residual.is_some_and(|r| r < 1e-12));
        let cert = peak_certify(&p, &CertifyOptions::default()).unwrap();
        assert!(cert.passed, "{:?}", cert.stages);
        assert!((cert.mu_b - ONE).norm() < 1e-9);
        assert!(cert.eigen_gap > 1e-6);
    }
}

#[test]
fn rotation_pair_fixed_point_is_half_identity() {
    let co = similar_to_coisometry(&rotation_s().transpose(), &Tolerances::default()).unwrap();
    // P is returned with trace n; the trace-one fixed point is I/2
    assert!((&co.p * c(0.5, 0.0) - identity(2) * c(0.5, 0.0)).norm() < 1e-12);
}

#[test]
fn literal_product_is_not_inner_but_normalized_one_is() {
    let b = compile("(1 + z1) z2", 2).unwrap();
    let rep = verify_inner_truncated(&b, 8, 1e-10).unwrap();
    assert!(!rep.passed);
    assert!((rep.mass - 2.0).abs() < 1e-12);
    let bn = compile("0.7071067811865476 (1 + z1) z2", 2).unwrap();
    assert!(verify_inner_truncated(&bn, 8, 1e-10).unwrap().passed);
    let lb = multiplier_norm_lower_bound(&bn.transpose(), 4).unwrap();
    // the normalized transpose is not contractive
    assert!(lb > 1.3 && lb <= 2f64.sqrt() + 1e-9, "{lb}");
    assert!(multiplier_norm_lower_bound(&b.transpose(), 4).unwrap() >= 2f64.sqrt() - 1e-6);
}

#[test]
fn rotated_pair_has_rotated_inner() {
    let tol = Tolerances::default();
    for (t, x) in [(shift_t(), e(2, 0)), (rotation_s(), e(2, 1))] {
        let b = inner_from_pair(&pair(t.clone(), x.clone()), 1e-9).unwrap();
        for zeta in [c(0.0, 1.0), c(-1.0, 0.0), c(0.6, 0.8)] {
            let tz = rotated_coisometry(&t, &x, zeta).unwrap();
            assert!(is_row_coisometry(&tz, 1e-12).0);
            let bz = inner_from_pair(&pair(tz, x.clone()), 1e-9).unwrap();
            let want = b.taylor(6).scale(zeta.conj());
            assert!(bz.taylor(6).max_abs_diff(&want) < 1e-12);
            let chk = boundary_eigenvalue_check(&b, &t, &x, zeta, &identity(2), &tol).unwrap();
            assert!(chk.passed, "{chk:?}");
        }
    }
}
