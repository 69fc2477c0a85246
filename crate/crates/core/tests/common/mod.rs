#![allow(dead_code)]

use ncreal::inner::CoisometryPair;
use ncreal::linalg::{c, CMat, CVec, ONE, ZERO};
use ncreal::tol::Tolerances;
use ncreal::tuple::MatrixTuple;

pub fn e(n: usize, i: usize) -> CVec {
    CVec::from_fn(n, |k, _| if k == i { ONE } else { ZERO })
}

/// `(E12, E21)`.
pub fn shift_t() -> MatrixTuple {
    MatrixTuple::from_real_rows(2, &[&[0., 1., 0., 0.], &[0., 0., 1., 0.]]).unwrap()
}

/// `(diag(1, −1), [[0, −1], [1, 0]]) / √2`.
pub fn rotation_s() -> MatrixTuple {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    MatrixTuple::from_real_rows(2, &[&[h, 0., 0., -h], &[0., -h, h, 0.]]).unwrap()
}

/// The reducible 3×3 row coisometry with doubly cyclic `e1`.
pub fn three_by_three() -> MatrixTuple {
    MatrixTuple::from_real_rows(
        3,
        &[
            &[-0.5, 0., -0.5, -0.5, 0., 0.5, -0.5, 0., -0.5],
            &[0.5, -0.5, 0., -0.5, -0.5, 0., -0.5, 0.5, 0.],
        ],
    )
    .unwrap()
}

pub fn pair(t: MatrixTuple, x: CVec) -> CoisometryPair {
    CoisometryPair::new(t, x, &Tolerances::default()).unwrap()
}

pub fn angle(u: &CVec, v: &CVec) -> f64 {
    // atan2 keeps full precision near zero, where acos does not
    let (u, v) = (u.unscale(u.norm()), v.unscale(v.norm()));
    let along = u.dotc(&v);
    let perp = (&v - &u * along).norm();
    perp.atan2(along.norm())
}

pub fn cmat(rows: &[&[(f64, f64)]]) -> CMat {
    CMat::from_fn(rows.len(), rows[0].len(), |i, j| c(rows[i][j].0, rows[i][j].1))
}
pub mod oracle;
