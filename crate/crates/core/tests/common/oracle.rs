//! Reference implementations that share no code with the library paths
//! they check.

use std::collections::BTreeMap;

use ncreal::expr::Expr;
use ncreal::linalg::{CMat, CVec};
use ncreal::series::TruncatedSeries;
use ncreal::tuple::MatrixTuple;
use ncreal::words::Word;
use num_complex::Complex64;
use rand::Rng;

/// Truncated power series keyed by letter strings.
pub type Series = BTreeMap<Vec<u8>, Complex64>;

fn trim(mut s: Series) -> Series {
    s.retain(|_, v| v.norm() != 0.0);
    s
}

pub fn s_const(v: Complex64) -> Series {
    trim(BTreeMap::from([(vec![], v)]))
}

pub fn s_add(a: &Series, b: &Series) -> Series {
    let mut out = a.clone();
    for (w, v) in b {
        *out.entry(w.clone()).or_default() += v;
    }
    trim(out)
}

pub fn s_scale(a: &Series, s: Complex64) -> Series {
    trim(a.iter().map(|(w, v)| (w.clone(), v * s)).collect())
}

pub fn s_mul(a: &Series, b: &Series, n: usize) -> Series {
    let mut out = Series::new();
    for (u, x) in a {
        for (v, y) in b {
            if u.len() + v.len() <= n {
                let mut w = u.clone();
                w.extend_from_slice(v);
                *out.entry(w).or_default() += x * y;
            }
        }
    }
    trim(out)
}

/// `(a₀ + s)⁻¹ = a₀⁻¹ Σ_k (−a₀⁻¹ s)^k`; terms beyond degree `n` vanish.
pub fn s_inv(a: &Series, n: usize) -> Series {
    let a0 = a.get(&vec![]).copied().unwrap_or_default();
    assert!(a0.norm() > 0.0, "guarded inverse");
    let mut rest = a.clone();
    rest.remove(&vec![]);
    let step = s_scale(&rest, -1.0 / a0);
    let mut power = s_const(Complex64::new(1.0, 0.0));
    let mut total = power.clone();
    for _ in 0..n {
        power = s_mul(&power, &step, n);
        total = s_add(&total, &power);
    }
    s_scale(&total, 1.0 / a0)
}

pub fn series_of(e: &Expr, n: usize) -> Series {
    match e {
        Expr::Const(v) => s_const(*v),
        Expr::Var(j) => BTreeMap::from([(vec![*j as u8], Complex64::new(1.0, 0.0))]),
        Expr::Add(a, b) => s_add(&series_of(a, n), &series_of(b, n)),
        Expr::Mul(a, b) => s_mul(&series_of(a, n), &series_of(b, n), n),
        Expr::Neg(a) => s_scale(&series_of(a, n), Complex64::new(-1.0, 0.0)),
        Expr::Scale(s, a) => s_scale(&series_of(a, n), *s),
        Expr::Inv(a) => s_inv(&series_of(a, n), n),
    }
}

/// Largest coefficient difference to a library series over degree `n`.
pub fn diff(oracle: &Series, got: &TruncatedSeries, n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for (w, v) in oracle {
        let word = Word::new(w.clone(), got.d()).unwrap();
        worst = worst.max((got.get(&word) - v).norm());
    }
    for (w, v) in got.iter() {
        if w.len() <= n && !oracle.contains_key(w.letters()) {
            worst = worst.max(v.norm());
        }
    }
    worst
}

fn small_complex(rng: &mut impl Rng) -> Complex64 {
    let re = (rng.gen_range(-10..=10) as f64) / 10.0;
    let im = if rng.gen_bool(0.3) { (rng.gen_range(-10..=10) as f64) / 10.0 } else { 0.0 };
    Complex64::new(re, im)
}

/// Random expression of depth at most `depth`. Every `Inv` argument is
/// shifted so its constant term has modulus at least 1.
pub fn random_expr(rng: &mut impl Rng, d: usize, depth: usize) -> Expr {
    if depth <= 1 || rng.gen_bool(0.2) {
        return if rng.gen_bool(0.6) { Expr::Var(rng.gen_range(1..=d)) } else { Expr::Const(small_complex(rng)) };
    }
    let ops = if depth >= 3 { 5 } else { 4 };
    match rng.gen_range(0..ops) {
        0 => Expr::sum(random_expr(rng, d, depth - 1), random_expr(rng, d, depth - 1)),
        1 => Expr::product(random_expr(rng, d, depth - 1), random_expr(rng, d, depth - 1)),
        2 => Expr::negation(random_expr(rng, d, depth - 1)),
        3 => Expr::scale(small_complex(rng), random_expr(rng, d, depth - 1)),
        _ => {
            // Add + Inv spend two levels
            let inner = random_expr(rng, d, depth - 2);
            let v0 = inner.value_at_zero().expect("inverses below are guarded");
            let shift = if v0.norm() >= 1.0 { Complex64::new(0.0, 0.0) } else { Complex64::new(1.0 + v0.norm(), 0.0) };
            let guarded = if shift.norm() == 0.0 { inner } else { Expr::sum(inner, Expr::Const(shift)) };
            Expr::inv(guarded)
        }
    }
}

/// `c* (Σ_k (Σ_j Z_j ⊗ A_j)^k) (b)` as an independent check of descriptor
/// evaluation, for pencils whose Kronecker sum is a strict contraction.
pub fn neumann_descriptor(a: &MatrixTuple, b: &CVec, c: &CVec, z: &MatrixTuple, terms: usize) -> CMat {
    let n = z.n();
    let m = a.n();
    // r(Z) = (I ⊗ c*) (I − Σ Z_j ⊗ A_j)⁻¹ (I ⊗ b) on ℂⁿ ⊗ ℂᵐ
    let mut big = CMat::zeros(n * m, n * m);
    for (zj, aj) in z.iter().zip(a.iter()) {
        big += zj.kronecker(aj);
    }
    let ib = CMat::identity(n, n).kronecker(&CMat::from_column_slice(m, 1, b.as_slice()));
    let ic = CMat::identity(n, n).kronecker(&CMat::from_row_slice(1, m, c.adjoint().as_slice()));
    let mut term = ib.clone();
    let mut acc = ib;
    for _ in 0..terms {
        term = &big * term;
        acc += &term;
    }
    ic * acc
}
