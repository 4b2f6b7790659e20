use crate::error::{Error, Result};

use super::BinaryPolynomial;

/// Quadratic unconstrained binary model
/// `E(x) = offset + Σ_i Q_ii x_i + Σ_{i<j} Q_ij x_i x_j`.
///
/// Only the upper triangle (`i <= j`) is stored; [`QuboModel::get`] accepts
/// either index order.
#[derive(Clone, Debug, PartialEq)]
pub struct QuboModel {
    n: usize,
    upper: Vec<f64>,
    offset: f64,
}

impl QuboModel {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            upper: vec![0.0; n * n],
            offset: 0.0,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn set_offset(&mut self, offset: f64) {
        self.offset = offset;
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        a * self.n + b
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[self.slot(i, j)]
    }

    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let s = self.slot(i, j);
        self.upper[s] += value;
    }

    /// Nonzero upper-triangle entries `(i, j, Q_ij)` with `i <= j`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            (i..self.n).filter_map(move |j| {
                let v = self.upper[i * self.n + j];
                (v != 0.0).then_some((i, j, v))
            })
        })
    }

    pub fn energy(&self, bits: &[bool]) -> Result<f64> {
        if bits.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: bits.len(),
            });
        }
        let mut e = self.offset;
        for i in (0..self.n).filter(|&i| bits[i]) {
            let row = &self.upper[i * self.n..(i + 1) * self.n];
            e += row[i];
            for j in (i + 1..self.n).filter(|&j| bits[j]) {
                e += row[j];
            }
        }
        Ok(e)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.upper.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_nonzero_abs_coefficient(&self) -> Option<f64> {
        self.upper
            .iter()
            .filter(|v| **v != 0.0)
            .map(|v| v.abs())
            .reduce(f64::min)
    }

    /// Symmetric dense copy (`n × n`, row-major) with the linear terms on the
    /// diagonal and each coupling stored on both sides.
    pub fn to_dense_symmetric(&self) -> Vec<f64> {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            m[i * n + i] = self.upper[i * n + i];
            for j in i + 1..n {
                let v = self.upper[i * n + j];
                m[i * n + j] = v;
                m[j * n + i] = v;
            }
        }
        m
    }
}

/// Places the coefficients of a degree-≤2 polynomial into a QUBO matrix.
pub fn to_qubo(poly: &BinaryPolynomial) -> Result<QuboModel> {
    if poly.degree() > 2 {
        return Err(Error::RequiresQuadratization);
    }
    let mut q = QuboModel::new(poly.num_vars());
    for (vars, c) in poly.terms() {
        match *vars {
            [] => q.offset += c,
            [i] => q.add(i, i, c),
            [i, j] => q.add(i, j, c),
            _ => unreachable!("degree checked above"),
        }
    }
    if !q.offset.is_finite() || q.upper.iter().any(|v| !v.is_finite()) {
        return Err(Error::contract("QUBO coefficients must be finite"));
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_polynomial_is_pure_offset() {
        let q = to_qubo(&BinaryPolynomial::constant(3, 5.0)).unwrap();
        assert_eq!(q.offset(), 5.0);
        assert_eq!(q.entries().count(), 0);
        assert_eq!(q.energy(&[false; 3]).unwrap(), 5.0);
    }

    #[test]
    fn direct_coefficient_placement() {
        let mut p = BinaryPolynomial::new(2);
        p.add_term(&[0], 1.0).unwrap();
        p.add_term(&[0, 1], 1.0).unwrap();
        let q = to_qubo(&p).unwrap();
        assert_eq!(q.get(0, 0), 1.0);
        assert_eq!(q.get(0, 1), 1.0);
        assert_eq!(q.get(1, 0), 1.0);
        assert_eq!(q.get(1, 1), 0.0);
        assert_eq!(q.offset(), 0.0);
    }

    #[test]
    fn cubic_input_is_rejected() {
        let mut p = BinaryPolynomial::new(3);
        p.add_term(&[0, 1, 2], 1.0).unwrap();
        assert!(matches!(to_qubo(&p), Err(Error::RequiresQuadratization)));
    }
}
