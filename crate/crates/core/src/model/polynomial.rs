use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Highest monomial degree a [`BinaryPolynomial`] may hold.
pub const MAX_DEGREE: usize = 3;

/// Multilinear polynomial over `{0,1}` variables with degree at most three.
///
/// Monomials are keyed by strictly increasing index lists; `x² = x` is
/// applied when terms are added, so a key never repeats an index. The empty
/// key holds the constant term.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BinaryPolynomial {
    num_vars: usize,
    terms: BTreeMap<Vec<usize>, f64>,
}

impl BinaryPolynomial {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, value: f64) -> Self {
        let mut p = Self::new(num_vars);
        p.add_constant(value);
        p
    }

    /// `constant + Σ coeff·x_i`.
    pub fn affine(num_vars: usize, constant: f64, linear: &[(usize, f64)]) -> Result<Self> {
        let mut p = Self::constant(num_vars, constant);
        for &(i, c) in linear {
            p.add_term(&[i], c)?;
        }
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Grows the variable count; never shrinks it.
    pub fn ensure_num_vars(&mut self, n: usize) {
        self.num_vars = self.num_vars.max(n);
    }

    pub fn add_constant(&mut self, value: f64) {
        self.accumulate(Vec::new(), value);
    }

    /// Adds `coeff · Π x_i` over the given indices. Repeated indices collapse
    /// since `x² = x` on binary variables.
    pub fn add_term(&mut self, vars: &[usize], coeff: f64) -> Result<()> {
        let mut key = vars.to_vec();
        key.sort_unstable();
        key.dedup();
        if key.len() > MAX_DEGREE {
            return Err(Error::DegreeTooHigh(key.len()));
        }
        if let Some(&index) = key.iter().find(|&&i| i >= self.num_vars) {
            return Err(Error::IndexOutOfRange {
                index,
                num_vars: self.num_vars,
            });
        }
        if !coeff.is_finite() {
            return Err(Error::contract(format!("non-finite coefficient {coeff}")));
        }
        self.accumulate(key, coeff);
        Ok(())
    }

    fn accumulate(&mut self, key: Vec<usize>, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        let entry = self.terms.entry(key);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if *o.get() == 0.0 {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
        }
    }

    /// Iterates over `(indices, coefficient)` in ascending key order.
    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        self.terms.iter().map(|(k, &c)| (k.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, vars: &[usize]) -> f64 {
        let mut key = vars.to_vec();
        key.sort_unstable();
        key.dedup();
        self.terms.get(&key).copied().unwrap_or(0.0)
    }

    pub fn constant_term(&self) -> f64 {
        self.coefficient(&[])
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Sum of absolute coefficients over the cubic monomials.
    pub fn cubic_abs_sum(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(k, _)| k.len() == 3)
            .map(|(_, c)| c.abs())
            .sum()
    }

    pub fn evaluate(&self, bits: &[bool]) -> Result<f64> {
        if bits.len() != self.num_vars {
            return Err(Error::LengthMismatch {
                expected: self.num_vars,
                actual: bits.len(),
            });
        }
        Ok(self
            .terms
            .iter()
            .filter(|(k, _)| k.iter().all(|&i| bits[i]))
            .map(|(_, &c)| c)
            .sum())
    }

    /// `self += factor · other`, growing the variable count as needed.
    pub fn add_scaled(&mut self, other: &BinaryPolynomial, factor: f64) {
        self.ensure_num_vars(other.num_vars);
        for (k, &c) in &other.terms {
            self.accumulate(k.clone(), factor * c);
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = Self::new(self.num_vars);
        out.add_scaled(self, factor);
        out
    }

    /// Product of two polynomials; fails if any resulting monomial would
    /// exceed degree three.
    pub fn try_mul(&self, other: &BinaryPolynomial) -> Result<Self> {
        let mut out = Self::new(self.num_vars.max(other.num_vars));
        for (ka, &ca) in &self.terms {
            for (kb, &cb) in &other.terms {
                let mut key: Vec<usize> = ka.iter().chain(kb.iter()).copied().collect();
                key.sort_unstable();
                key.dedup();
                if key.len() > MAX_DEGREE {
                    return Err(Error::DegreeTooHigh(key.len()));
                }
                out.accumulate(key, ca * cb);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_product_terms() {
        let mut p = BinaryPolynomial::new(2);
        p.add_term(&[0, 1], 1.0).unwrap();
        assert_eq!(p.evaluate(&[true, true]).unwrap(), 1.0);
        assert_eq!(p.evaluate(&[true, false]).unwrap(), 0.0);
    }

    #[test]
    fn evaluates_mixed_degree() {
        let mut p = BinaryPolynomial::constant(3, -1.0);
        p.add_term(&[0], 2.0).unwrap();
        p.add_term(&[2, 0, 1], 3.0).unwrap();
        assert_eq!(p.evaluate(&[true, true, true]).unwrap(), 4.0);
        assert_eq!(p.degree(), 3);
    }

    #[test]
    fn idempotent_indices_collapse() {
        let mut p = BinaryPolynomial::new(2);
        p.add_term(&[1, 1, 0, 0], 2.0).unwrap();
        assert_eq!(p.coefficient(&[0, 1]), 2.0);
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        let mut p = BinaryPolynomial::new(4);
        assert!(matches!(
            p.add_term(&[0, 1, 2, 3], 1.0),
            Err(Error::DegreeTooHigh(4))
        ));
        assert!(matches!(
            p.add_term(&[5], 1.0),
            Err(Error::IndexOutOfRange { index: 5, .. })
        ));
        assert!(matches!(
            p.evaluate(&[true]),
            Err(Error::LengthMismatch { expected: 4, actual: 1 })
        ));
    }

    #[test]
    fn cancelling_terms_are_dropped() {
        let mut p = BinaryPolynomial::new(2);
        p.add_term(&[0, 1], 1.5).unwrap();
        p.add_term(&[1, 0], -1.5).unwrap();
        assert_eq!(p.num_terms(), 0);
    }

    #[test]
    fn multiplication_respects_degree_limit() {
        let a = BinaryPolynomial::affine(4, 1.0, &[(0, 1.0), (1, 1.0)]).unwrap();
        let b = BinaryPolynomial::affine(4, 0.0, &[(2, 1.0), (3, 1.0)]).unwrap();
        let ab = a.try_mul(&b).unwrap();
        assert_eq!(ab.degree(), 2);
        let abb = ab.try_mul(&a).unwrap();
        assert_eq!(abb.degree(), 3);
        assert!(abb.try_mul(&b).is_err());
        // (1 + x0 + x1)(x2 + x3) at all ones = 3 * 2
        assert_eq!(ab.evaluate(&[true; 4]).unwrap(), 6.0);
    }
}
