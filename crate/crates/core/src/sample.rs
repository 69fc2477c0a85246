//! Seeded random instances for property sweeps and benchmarks.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::inner::{is_irreducible, CoisometryPair};
use crate::linalg::{CMat, CVec};
use crate::realization::FmRealization;
use crate::tol::Tolerances;
use crate::tuple::MatrixTuple;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn unit_vector(rng: &mut impl Rng, n: usize) -> CVec {
    let v = CVec::from_fn(n, |_, _| gaussian(rng));
    let norm = v.norm();
    v.unscale(norm)
}

/// Tuple with entries of standard deviation `scale`.
pub fn tuple(rng: &mut impl Rng, d: usize, n: usize, scale: f64) -> MatrixTuple {
    MatrixTuple::new((0..d).map(|_| gaussian_matrix(rng, n, n) * Complex64::new(scale, 0.0)).collect())
        .expect("square matrices")
}

/// Unitary from the QR factor of a Gaussian matrix.
pub fn unitary(rng: &mut impl Rng, n: usize) -> CMat {
    gaussian_matrix(rng, n, n).qr().q()
}

/// `U diag(σ) V` with singular values drawn from `[1/κ, 1]`.
pub fn invertible(rng: &mut impl Rng, n: usize, kappa: f64) -> CMat {
    let u = unitary(rng, n);
    let v = unitary(rng, n);
    let sig = CMat::from_diagonal(&CVec::from_fn(n, |_, _| Complex64::new(rng.gen_range(1.0 / kappa..=1.0), 0.0)));
    u * sig * v
}

/// Row coisometry: the rows of `[T_1 ⋯ T_d]` are the orthonormal columns of
/// a Gaussian `nd × n` matrix's Q factor, conjugated.
pub fn row_coisometry(rng: &mut impl Rng, d: usize, n: usize) -> MatrixTuple {
    let q = gaussian_matrix(rng, n * d, n).qr().q();
    let row = q.adjoint();
    MatrixTuple::new((0..d).map(|j| row.columns(j * n, n).into_owned()).collect()).expect("square blocks")
}

/// Rejection sampling; a single unitary is never irreducible for `n > 1`.
pub fn irreducible_row_coisometry(rng: &mut impl Rng, d: usize, n: usize, rank_factor: f64) -> MatrixTuple {
    assert!(d >= 2 || n == 1, "no irreducible row coisometry with d = 1 and n = {n}");
    loop {
        let t = row_coisometry(rng, d, n);
        if is_irreducible(&t, rank_factor) {
            return t;
        }
    }
}

/// Irreducible row coisometry with a doubly cyclic unit vector.
pub fn pair(rng: &mut impl Rng, d: usize, n: usize, tol: &Tolerances) -> CoisometryPair {
    loop {
        let t = irreducible_row_coisometry(rng, d, n, tol.rank);
        let x = unit_vector(rng, n);
        if let Ok(p) = CoisometryPair::new(t, x, tol) {
            return p;
        }
    }
}

/// Random FM realization with state size `m`; `a_scale` controls `jsr(A)`.
pub fn fm_realization(rng: &mut impl Rng, d: usize, m: usize, a_scale: f64) -> Result<FmRealization> {
    let a = if m == 0 { MatrixTuple::zeros(d, 0) } else { tuple(rng, d, m, a_scale) };
    let b = (0..d).map(|_| CVec::from_fn(m, |_, _| gaussian(rng))).collect();
    let c = CVec::from_fn(m, |_, _| gaussian(rng));
    FmRealization::new(a, b, c, gaussian(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::is_row_coisometry;

    #[test]
    fn sampled_coisometries_are_coisometries() {
        let mut r = rng(7);
        for (d, n) in [(1, 1), (2, 3), (3, 4)] {
            let t = row_coisometry(&mut r, d, n);
            assert!(is_row_coisometry(&t, 1e-12).0);
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = tuple(&mut rng(3), 2, 2, 1.0);
        let b = tuple(&mut rng(3), 2, 2, 1.0);
        assert_eq!(a, b);
    }
}
