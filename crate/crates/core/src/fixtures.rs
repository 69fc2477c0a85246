//! Small worked examples with known answers, used by self-tests.

use crate::linalg::{CVec, ONE, ZERO};
use crate::tuple::MatrixTuple;

pub fn basis_vector(n: usize, i: usize) -> CVec {
    CVec::from_fn(n, |k, _| if k == i { ONE } else { ZERO })
}

/// `(E12, E21)`; with `x = e1` its inner is `z2 z1`.
pub fn shift_pair() -> MatrixTuple {
    MatrixTuple::from_real_rows(2, &[&[0., 1., 0., 0.], &[0., 0., 1., 0.]]).expect("2x2 blocks")
}

/// `(diag(1, −1), [[0, −1], [1, 0]]) / √2`, a unital channel.
pub fn rotation_pair() -> MatrixTuple {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    MatrixTuple::from_real_rows(2, &[&[h, 0., 0., -h], &[0., -h, h, 0.]]).expect("2x2 blocks")
}

/// Reducible 3×3 row coisometry for which `e1` is doubly cyclic; its inner
/// takes the value 1 at `(−1, 0)` and `b(Tᵗ)` has eigenvalues `1, 1/3, 1/4`.
pub fn reducible_three() -> MatrixTuple {
    MatrixTuple::from_real_rows(
        3,
        &[
            &[-0.5, 0., -0.5, -0.5, 0., 0.5, -0.5, 0., -0.5],
            &[0.5, -0.5, 0., -0.5, -0.5, 0., -0.5, 0.5, 0.],
        ],
    )
    .expect("3x3 blocks")
}
