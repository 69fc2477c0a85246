//! Numerical thresholds shared by every verification routine, and the
//! matrix size cap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// All thresholds are absolute unless noted; every report records the
/// values it was produced with.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative singular-value cutoff for numerical rank.
    pub rank: f64,
    /// `|eig − target|` below which an eigenvalue counts as the target.
    pub eig: f64,
    /// Second-closest eigenvalue distance required for simplicity.
    pub gap: f64,
    /// `‖Σ T_j T_j* − I‖` accepted as a row coisometry.
    pub coisometry: f64,
    /// Excess of inner-function defects over their tail bounds.
    pub inner: f64,
    /// `|jsr − 1|` accepted as joint spectral radius one.
    pub jsr_one: f64,
    /// Anti-Hermitian part of a Perron eigenvector, relative to its norm.
    pub hermitian: f64,
    /// Smallest eigenvalue of a fixed point, relative to its largest.
    pub definite: f64,
    /// Most negative Gram eigenvalue accepted as PSD.
    pub psd: f64,
    /// Moment identities such as `μ(b) = 1`.
    pub moment: f64,
    /// Reciprocal condition number below which a pencil is singular.
    pub rcond: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: 1e-9,
            eig: 1e-8,
            gap: 1e-6,
            coisometry: 1e-9,
            inner: 1e-10,
            jsr_one: 1e-8,
            hermitian: 1e-8,
            definite: 1e-10,
            psd: 1e-10,
            moment: 1e-9,
            rcond: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rank", self.rank),
            ("eig", self.eig),
            ("gap", self.gap),
            ("coisometry", self.coisometry),
            ("inner", self.inner),
            ("jsr_one", self.jsr_one),
            ("hermitian", self.hermitian),
            ("definite", self.definite),
            ("psd", self.psd),
            ("moment", self.moment),
            ("rcond", self.rcond),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Invalid(format!("tolerance `{name}` must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

pub const DEFAULT_MAX_N: usize = 64;

/// Largest accepted matrix dimension: `NCREAL_MAX_N` if set and valid,
/// else 64.
pub fn max_matrix_size() -> usize {
    std::env::var("NCREAL_MAX_N")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(DEFAULT_MAX_N)
}

pub fn check_size(n: usize) -> Result<()> {
    let cap = max_matrix_size();
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_round_trip() {
        let t = Tolerances::default();
        t.validate().unwrap();
        let txt = serde_json::to_string(&t).unwrap();
        let back: Tolerances = serde_json::from_str(&txt).unwrap();
        assert_eq!(back, t);
        let partial: Tolerances = serde_json::from_str(r#"{"eig": 1e-6}"#).unwrap();
        assert_eq!(partial.eig, 1e-6);
        assert_eq!(partial.gap, t.gap);
        assert!(serde_json::from_str::<Tolerances>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn non_positive_tolerance_rejected() {
        let t = Tolerances { gap: 0.0, ..Tolerances::default() };
        assert!(t.validate().is_err());
    }
}
