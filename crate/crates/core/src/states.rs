//! Finitely-correlated states given by a row coisometry and a unit vector,
//! and their truncated GNS models.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, identity, spectral_norm, CMat, CVec, ZERO};
use crate::par::{self, Exec};
use crate::series::TruncatedSeries;
use crate::tuple::MatrixTuple;
use crate::words::{word_count, words_up_to, Word};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `μ(L^ω) = y* Z^ω y`.
    #[default]
    Plain,
    /// `μ(L^ω) = y* Z_{i₁}* ⋯ Z_{i_k}* y`.
    Adjoint,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentState {
    z: MatrixTuple,
    y: CVec,
    convention: Convention,
}

impl MomentState {
    /// `Z` must be a row coisometry and `y` a unit vector, both within `tol`.
    pub fn new(z: MatrixTuple, y: CVec, convention: Convention, tol: f64) -> Result<Self> {
        if y.len() != z.n() {
            return Err(Error::DimensionMismatch("state vector length differs from tuple size".into()));
        }
        let residual = spectral_norm(&(z.row_gram() - identity(z.n())));
        if residual > tol {
            return Err(Error::NotCoisometry { residual });
        }
        let norm = y.norm();
        if (norm - 1.0).abs() > tol {
            return Err(Error::NotUnitVector { norm });
        }
        Ok(Self { z, y, convention })
    }

    pub fn z(&self) -> &MatrixTuple {
        &self.z
    }

    pub fn y(&self) -> &CVec {
        &self.y
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn moment(&self, w: &Word) -> Complex64 {
        let mut v = self.y.clone();
        match self.convention {
            Convention::Plain => {
                for &l in w.letters().iter().rev() {
                    v = &self.z[l as usize - 1] * v;
                }
            }
            Convention::Adjoint => {
                for &l in w.letters().iter().rev() {
                    v = self.z[l as usize - 1].adjoint() * v;
                }
            }
        }
        self.y.dotc(&v)
    }

    /// All moments up to `degree`, computed breadth-first by prepending
    /// letters.
    pub fn moments(&self, degree: usize) -> TruncatedSeries {
        let d = self.z.d();
        let mut out = TruncatedSeries::new(d, degree);
        let ops: Vec<CMat> = match self.convention {
            Convention::Plain => self.z.iter().cloned().collect(),
            Convention::Adjoint => self.z.iter().map(|m| m.adjoint()).collect(),
        };
        let ops = &ops;
        let mut level = vec![(Word::empty(), self.y.clone())];
        for len in 0..=degree {
            for (w, v) in &level {
                out.set(w.clone(), self.y.dotc(v)).expect("letters in range");
            }
            if len == degree {
                break;
            }
            level = level
                .iter()
                .flat_map(|(w, v)| (0..d).map(move |j| (w.prepend(j as u8 + 1), &ops[j] * v)))
                .collect();
        }
        out
    }
}

/// Truncated GNS model on words of length at most `N`. Word classes are the
/// columns of `F` with `G = F* F`.
#[derive(Clone, Debug)]
pub struct GnsModel {
    pub degree: usize,
    pub words: Vec<Word>,
    pub gram: CMat,
    pub min_eig: f64,
    pub rank: usize,
    /// `rank × |words|`.
    pub factor: CMat,
    /// Shift compressions `Π_j [α] = [jα]` on the quotient.
    pub pi: MatrixTuple,
    /// `‖Σ Π_j Π_j* − I‖`.
    pub cuntz_defect: f64,
    /// `max_ω |⟨[∅], Π^ω [∅]⟩ − μ(L^ω)|` over `|ω| ≤ N`.
    pub moment_residual: f64,
}

/// `⟨L^α 1, L^β 1⟩_μ = μ(L^{α*} L^β)`, which is `m(β′)` if `β = αβ′`,
/// `conj(m(α′))` if `α = βα′` and 0 otherwise.
pub fn gram_matrix(moments: &TruncatedSeries, words: &[Word], exec: Exec) -> CMat {
    let k = words.len();
    let cols = par::map_range(exec, k, |j| {
        let beta = &words[j];
        (0..k)
            .map(|i| {
                let alpha = &words[i];
                if let Some(rest) = beta.strip_prefix(alpha) {
                    moments.get(&rest)
                } else if let Some(rest) = alpha.strip_prefix(beta) {
                    moments.get(&rest).conj()
                } else {
                    ZERO
                }
            })
            .collect::<Vec<_>>()
    });
    CMat::from_fn(k, k, |i, j| cols[j][i])
}

/// Builds the truncated GNS model of a state.
///
/// `psd_tol` bounds the most negative Gram eigenvalue; `rank_factor` sets
/// the numerical kernel that is quotiented out.
pub fn gns_build(s: &MomentState, degree: usize, psd_tol: f64, rank_factor: f64, exec: Exec) -> Result<GnsModel> {
    if degree == 0 {
        return Err(Error::Invalid("GNS degree must be at least 1".into()));
    }
    let d = s.z().d();
    let size = word_count(d, degree);
    if size > crate::inner::MAX_FOCK_WORDS {
        return Err(Error::TooLarge { n: size, cap: crate::inner::MAX_FOCK_WORDS });
    }
    let words = words_up_to(d, degree);
    let moments = s.moments(2 * degree);
    let gram = gram_matrix(&moments, &words, exec);
    let (vals, vecs) = hermitian_eigen(&gram);
    let min_eig = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let max_eig = vals.iter().copied().fold(0.0, f64::max);
    if min_eig < -psd_tol {
        return Err(Error::GramNotPsd { min_eig });
    }
    let cut = rank_factor * max_eig * size as f64;
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > cut).collect();
    let rank = keep.len();
    let mut factor = CMat::zeros(rank, size);
    for (r, &i) in keep.iter().enumerate() {
        let sq = vals[i].sqrt();
        for col in 0..size {
            factor[(r, col)] = vecs[(col, i)].conj() * sq;
        }
    }
    let short = words_up_to(d, degree - 1);
    let short_cols = CMat::from_fn(rank, short.len(), |r, c| factor[(r, c)]);
    let pinv = short_cols
        .clone()
        .pseudo_inverse(rank_factor * crate::linalg::spectral_norm(&short_cols).max(f64::MIN_POSITIVE))
        .map_err(|e| Error::Invalid(format!("pseudo-inverse failed: {e}")))?;
    let mats: Vec<CMat> = (1..=d as u8)
        .map(|j| {
            let shifted = CMat::from_fn(rank, short.len(), |r, c| factor[(r, short[c].prepend(j).canonical_index(d))]);
            shifted * &pinv
        })
        .collect();
    let pi = if rank == 0 { MatrixTuple::zeros(d, 0) } else { MatrixTuple::new(mats)? };
    let cuntz_defect = spectral_norm(&(pi.row_gram() - identity(rank)));
    let root = CVec::from_fn(rank, |r, _| factor[(r, 0)]);
    let mut moment_residual: f64 = 0.0;
    for w in &words {
        let mut v = root.clone();
        for &l in w.letters().iter().rev() {
            v = &pi[l as usize - 1] * v;
        }
        let plain = root.dotc(&v);
        moment_residual = moment_residual.max((plain - moments.get(w)).norm());
    }
    Ok(GnsModel { degree, words, gram, min_eig, rank, factor, pi, cuntz_defect, moment_residual })
}
