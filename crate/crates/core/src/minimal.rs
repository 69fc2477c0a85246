//! Reachable/observable subspaces, minimization and joint similarity of
//! descriptor realizations.

use crate::error::{Error, Result};
use crate::linalg::{column_space, inverse, rank_cutoff, singular_values, CMat, CVec};
use crate::realization::DescriptorRealization;
use crate::tuple::MatrixTuple;
use crate::words::Word;

/// Orthonormal basis of the smallest subspace containing the columns of
/// `start` and invariant under every `A_j`.
///
/// Words are explored breadth-first by length; exploration stops after the
/// first level that does not increase the numerical rank.
pub fn invariant_span(start: &CMat, a: &MatrixTuple, rank_factor: f64) -> CMat {
    let m = start.nrows();
    let mut q = column_space(start, rank_factor);
    loop {
        let r = q.ncols();
        if r == 0 || r == m {
            return q;
        }
        let mut stacked = CMat::zeros(m, r * (a.d() + 1));
        stacked.view_mut((0, 0), (m, r)).copy_from(&q);
        for (j, aj) in a.iter().enumerate() {
            stacked.view_mut((0, (j + 1) * r), (m, r)).copy_from(&(aj * &q));
        }
        let next = column_space(&stacked, rank_factor);
        if next.ncols() <= r {
            return q;
        }
        q = next;
    }
}

fn column(v: &CVec) -> CMat {
    CMat::from_column_slice(v.len(), 1, v.as_slice())
}

/// Dimension of `span{A^ω b}`.
pub fn reachable_dim(r: &DescriptorRealization, rank_factor: f64) -> usize {
    invariant_span(&column(r.b()), r.a(), rank_factor).ncols()
}

/// Dimension of `span{A^{*ω} c}`.
pub fn observable_dim(r: &DescriptorRealization, rank_factor: f64) -> usize {
    invariant_span(&column(r.c()), &r.a().adjoint(), rank_factor).ncols()
}

pub fn is_minimal(r: &DescriptorRealization, rank_factor: f64) -> bool {
    let m = r.size();
    reachable_dim(r, rank_factor) == m && observable_dim(r, rank_factor) == m
}

fn compress(r: &DescriptorRealization, q: &CMat) -> DescriptorRealization {
    let qa = q.adjoint();
    let a = r.a().map(|aj| &qa * aj * q);
    DescriptorRealization::new(a, &qa * r.b(), &qa * r.c()).expect("compression keeps sizes")
}

/// Restricts to the reachable space, then compresses to the observable space.
/// The output realizes the same series and satisfies both cyclicity
/// conditions at the given rank tolerance.
pub fn minimize(r: &DescriptorRealization, rank_factor: f64) -> DescriptorRealization {
    let reach = invariant_span(&column(r.b()), r.a(), rank_factor);
    let step = compress(r, &reach);
    let obs = invariant_span(&column(step.c()), &step.a().adjoint(), rank_factor);
    compress(&step, &obs).mark_minimal()
}

/// Words `ω` whose vectors `A^ω b` form a basis of the reachable space,
/// chosen greedily (largest new component first) level by level.
pub fn orbit_basis_words(
    a: &MatrixTuple,
    b: &CVec,
    rank_factor: f64,
) -> Vec<(Word, CVec)> {
    let m = b.len();
    let mut accepted: Vec<(Word, CVec)> = Vec::new();
    let mut ortho: Vec<CVec> = Vec::new();
    let mut candidates = vec![(Word::empty(), b.clone())];
    let scale = b.norm().max(a.max_abs());
    if scale == 0.0 {
        return accepted;
    }
    let cut = rank_cutoff(scale, m, m, rank_factor);
    while !candidates.is_empty() && accepted.len() < m {
        let mut level_accepted = Vec::new();
        let mut pool = candidates;
        loop {
            let mut best: Option<(usize, f64, CVec)> = None;
            for (i, (_, v)) in pool.iter().enumerate() {
                let mut res = v.clone();
                for _ in 0..2 {
                    for q in &ortho {
                        let proj = q.dotc(&res);
                        res -= q * proj;
                    }
                }
                let nr = res.norm();
                if best.as_ref().is_none_or(|(_, bn, _)| nr > *bn) {
                    best = Some((i, nr, res));
                }
            }
            match best {
                Some((i, nr, res)) if nr > cut && accepted.len() < m => {
                    let (word, v) = pool.swap_remove(i);
                    ortho.push(res.unscale(nr));
                    accepted.push((word.clone(), v.clone()));
                    level_accepted.push((word, v));
                }
                _ => break,
            }
        }
        candidates = level_accepted
            .iter()
            .flat_map(|(w, v)| {
                (0..a.d()).map(move |j| (w.prepend(j as u8 + 1), &a[j] * v))
            })
            .collect();
    }
    accepted
}

/// Result of [`similarity_between_minimal`].
#[derive(Clone, Debug)]
pub struct Similarity {
    /// `Ã_j = S A_j S⁻¹`, `b̃ = S b`, `c̃ = S^{-*} c`.
    pub s: CMat,
    pub residual: f64,
}

/// Recovers the invertible `S` relating two minimal realizations of the
/// same function, or reports `NotEquivalent`.
///
/// `S` is pinned by matching the orbit bases `S A^ω b = Ã^ω b̃`, which also
/// enforces `S b = b̃` exactly; all three similarity equations are verified
/// afterwards.
pub fn similarity_between_minimal(
    r1: &DescriptorRealization,
    r2: &DescriptorRealization,
    rank_factor: f64,
    tol: f64,
) -> Result<Similarity> {
    let m = r1.size();
    if m != r2.size() {
        return Err(Error::SizeMismatch(m, r2.size()));
    }
    if r1.d() != r2.d() {
        return Err(Error::DimensionMismatch("realizations over different d".into()));
    }
    if !is_minimal(r1, rank_factor) || !is_minimal(r2, rank_factor) {
        return Err(Error::NotMinimalInput);
    }
    if m == 0 {
        return Ok(Similarity { s: CMat::zeros(0, 0), residual: 0.0 });
    }
    let basis = orbit_basis_words(r1.a(), r1.b(), rank_factor);
    if basis.len() != m {
        return Err(Error::NotMinimalInput);
    }
    let mut k1 = CMat::zeros(m, m);
    let mut k2 = CMat::zeros(m, m);
    for (col, (w, v)) in basis.iter().enumerate() {
        k1.set_column(col, v);
        let mut u = r2.b().clone();
        for &l in w.letters().iter().rev() {
            u = &r2.a()[l as usize - 1] * u;
        }
        k2.set_column(col, &u);
    }
    let k1inv = inverse(&k1).ok_or(Error::NotMinimalInput)?;
    let s = &k2 * k1inv;
    let sv = singular_values(&s);
    let smin = *sv.last().expect("nonempty");
    if smin <= 1e-14 * sv[0] {
        return Err(Error::NotEquivalent { residual: f64::INFINITY });
    }
    let sinv = inverse(&s).ok_or(Error::NotEquivalent { residual: f64::INFINITY })?;
    let rel = |x: f64, scale: f64| x / scale.max(1.0);
    let mut residual: f64 = 0.0;
    for j in 0..r1.d() {
        let lhs = &s * &r1.a()[j] * &sinv;
        residual = residual.max(rel((&lhs - &r2.a()[j]).norm(), r2.a()[j].norm()));
    }
    residual = residual.max(rel((&s * r1.b() - r2.b()).norm(), r2.b().norm()));
    let c_pred = sinv.adjoint() * r1.c();
    residual = residual.max(rel((c_pred - r2.c()).norm(), r2.c().norm()));
    if residual > tol || !residual.is_finite() {
        return Err(Error::NotEquivalent { residual });
    }
    Ok(Similarity { s, residual })
}
