//! Finite windows of noncommutative power series.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::words::Word;

/// Coefficients `ŝ_w` for all words `|w| ≤ degree`; absent words are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    d: usize,
    degree: usize,
    prune: f64,
    coeffs: BTreeMap<Word, Complex64>,
}

impl TruncatedSeries {
    pub fn new(d: usize, degree: usize) -> Self {
        Self { d, degree, prune: 0.0, coeffs: BTreeMap::new() }
    }

    /// Coefficients with modulus at or below `prune` are dropped on insert.
    /// The default of 0 keeps every nonzero coefficient.
    pub fn with_prune(mut self, prune: f64) -> Self {
        self.prune = prune;
        self.coeffs.retain(|_, v| v.norm() > prune);
        self
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Sets a coefficient; words longer than the degree are ignored.
    pub fn set(&mut self, w: Word, value: Complex64) -> Result<()> {
        if w.max_letter() > self.d {
            return Err(Error::LetterOutOfRange { letter: w.max_letter() as u8, d: self.d });
        }
        if w.len() > self.degree {
            return Ok(());
        }
        if value.norm() > self.prune {
            self.coeffs.insert(w, value);
        } else {
            self.coeffs.remove(&w);
        }
        Ok(())
    }

    pub fn get(&self, w: &Word) -> Complex64 {
        self.coeffs.get(w).copied().unwrap_or_default()
    }

    /// Nonzero coefficients in length-lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `Σ_w conj(f̂_w) ĝ_w` over the common window.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch(format!(
                "series over d = {} and d = {}",
                self.d, other.d
            )));
        }
        let window = self.degree.min(other.degree);
        Ok(self
            .coeffs
            .iter()
            .filter(|(w, _)| w.len() <= window)
            .map(|(w, f)| f.conj() * other.get(w))
            .sum())
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.values().map(|v| v.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Mass `Σ_{|w| = k} |ŝ_w|²` of each homogeneous component.
    pub fn level_masses(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.degree + 1];
        for (w, v) in &self.coeffs {
            out[w.len()] += v.norm_sqr();
        }
        out
    }

    /// Coefficient reversal `ŝᵗ_w = ŝ_{reverse(w)}`.
    pub fn transpose(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(w, v)| (w.reverse(), *v)).collect();
        Self { coeffs, ..self.clone() }
    }

    pub fn truncate(&self, degree: usize) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(w, _)| w.len() <= degree)
            .map(|(w, v)| (w.clone(), *v))
            .collect();
        Self { d: self.d, degree: degree.min(self.degree), prune: self.prune, coeffs }
    }

    /// Largest coefficient difference over the common window.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let window = self.degree.min(other.degree);
        self.coeffs
            .keys()
            .chain(other.coeffs.keys())
            .filter(|w| w.len() <= window)
            .map(|w| (self.get(w) - other.get(w)).norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::new(self.d, self.degree).with_prune(self.prune);
        for (w, v) in &self.coeffs {
            out.set(w.clone(), v * s).expect("same alphabet");
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch("alphabet mismatch".into()));
        }
        let mut out = Self::new(self.d, self.degree.min(other.degree)).with_prune(self.prune);
        for w in self.coeffs.keys().chain(other.coeffs.keys()) {
            out.set(w.clone(), self.get(w) + other.get(w))?;
        }
        Ok(out)
    }

    /// Cauchy product `(fg)_w = Σ_{w = uv} f̂_u ĝ_v`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch("alphabet mismatch".into()));
        }
        let degree = self.degree.min(other.degree);
        let mut acc: BTreeMap<Word, Complex64> = BTreeMap::new();
        for (u, fu) in &self.coeffs {
            for (v, gv) in &other.coeffs {
                if u.len() + v.len() <= degree {
                    *acc.entry(u.concat(v)).or_default() += fu * gv;
                }
            }
        }
        let mut out = Self::new(self.d, degree).with_prune(self.prune);
        for (w, v) in acc {
            out.set(w, v)?;
        }
        Ok(out)
    }

    pub fn from_pairs(d: usize, degree: usize, pairs: &[(&str, Complex64)]) -> Result<Self> {
        let mut s = Self::new(d, degree);
        for (w, v) in pairs {
            let word: Word = w.parse()?;
            s.set(word, *v)?;
        }
        Ok(s)
    }
}

impl Serialize for TruncatedSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.coeffs.len()))?;
        for (w, v) in &self.coeffs {
            map.serialize_entry(&w.to_string(), &[v.re, v.im])?;
        }
        map.end()
    }
}

/// Raw word→coefficient map as read from JSON; `d` and the degree are
/// inferred from the keys.
impl<'de> Deserialize<'de> for TruncatedSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw: BTreeMap<String, [f64; 2]> = BTreeMap::deserialize(deserializer)?;
        let mut words = Vec::with_capacity(raw.len());
        for (k, v) in raw {
            let w: Word = k.parse().map_err(serde::de::Error::custom)?;
            words.push((w, Complex64::new(v[0], v[1])));
        }
        let d = words.iter().map(|(w, _)| w.max_letter()).max().unwrap_or(1).max(1);
        let degree = words.iter().map(|(w, _)| w.len()).max().unwrap_or(0);
        let mut s = TruncatedSeries::new(d, degree);
        for (w, v) in words {
            s.set(w, v).map_err(serde::de::Error::custom)?;
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, ONE};
    use proptest::prelude::*;

    #[test]
    fn monomials_are_orthonormal() {
        let z1 = TruncatedSeries::from_pairs(2, 3, &[("1", ONE)]).unwrap();
        let z2 = TruncatedSeries::from_pairs(2, 3, &[("2", ONE)]).unwrap();
        assert_eq!(z1.inner_product(&z1).unwrap(), ONE);
        assert_eq!(z1.inner_product(&z2).unwrap(), c(0.0, 0.0));
        let f = TruncatedSeries::from_pairs(2, 3, &[("", ONE), ("12", ONE)]).unwrap();
        assert_eq!(f.inner_product(&f).unwrap(), c(2.0, 0.0));
    }

    #[test]
    fn alphabet_mismatch_is_an_error() {
        let a = TruncatedSeries::new(2, 2);
        let b = TruncatedSeries::new(3, 2);
        assert!(a.inner_product(&b).is_err());
    }

    #[test]
    fn cauchy_product_is_ordered() {
        let a = TruncatedSeries::from_pairs(2, 4, &[("", ONE), ("1", ONE)]).unwrap();
        let b = TruncatedSeries::from_pairs(2, 4, &[("2", ONE)]).unwrap();
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.get(&"12".parse().unwrap()), ONE);
        assert_eq!(ab.get(&"21".parse().unwrap()), c(0.0, 0.0));
        let ba = b.mul(&a).unwrap();
        assert_eq!(ba.get(&"21".parse().unwrap()), ONE);
    }

    #[test]
    fn prune_threshold_drops_small_entries() {
        let mut s = TruncatedSeries::new(1, 3).with_prune(1e-3);
        s.set("1".parse().unwrap(), c(1e-4, 0.0)).unwrap();
        s.set("11".parse().unwrap(), c(1.0, 0.0)).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn json_map_in_canonical_order() {
        let s = TruncatedSeries::from_pairs(2, 3, &[("21", ONE), ("2", c(0.5, -1.0)), ("", ONE)])
            .unwrap();
        let txt = serde_json::to_string(&s).unwrap();
        assert_eq!(txt, r#"{"":[1.0,0.0],"2":[0.5,-1.0],"21":[1.0,0.0]}"#);
        let back: TruncatedSeries = serde_json::from_str(&txt).unwrap();
        assert_eq!(back.max_abs_diff(&s), 0.0);
    }

    fn arb_series() -> impl Strategy<Value = TruncatedSeries> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 7).prop_map(|v| {
            let words = crate::words::words_up_to(2, 2);
            let mut s = TruncatedSeries::new(2, 2);
            for (w, (re, im)) in words.into_iter().zip(v) {
                s.set(w, c(re, im)).unwrap();
            }
            s
        })
    }

    proptest! {
        #[test]
        fn inner_product_is_sesquilinear_and_positive(
            f in arb_series(), g in arb_series(), re in -2.0f64..2.0, im in -2.0f64..2.0
        ) {
            let a = c(re, im);
            let lhs = f.inner_product(&g.scale(a)).unwrap();
            prop_assert!((lhs - a * f.inner_product(&g).unwrap()).norm() < 1e-12);
            let lhs = f.scale(a).inner_product(&g).unwrap();
            prop_assert!((lhs - a.conj() * f.inner_product(&g).unwrap()).norm() < 1e-12);
            let ff = f.inner_product(&f).unwrap();
            prop_assert!(ff.im.abs() < 1e-14 && ff.re >= 0.0);
            prop_assert!((ff.re - f.norm_sq()).abs() < 1e-12);
            let fg = f.inner_product(&g).unwrap();
            let gf = g.inner_product(&f).unwrap();
            prop_assert!((fg - gf.conj()).norm() < 1e-12);
        }
    }
}
