use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::QuboModel;

/// Ising model `E(s) = offset + Σ_i h_i s_i + Σ_{i<j} J_ij s_i s_j` over
/// spins `s_i ∈ {-1, +1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingModel {
    pub h: Vec<f64>,
    /// Couplings keyed by `(i, j)` with `i < j`.
    pub j: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
}

impl IsingModel {
    pub fn new(n: usize) -> Self {
        Self {
            h: vec![0.0; n],
            j: BTreeMap::new(),
            offset: 0.0,
        }
    }

    pub fn num_spins(&self) -> usize {
        self.h.len()
    }

    pub fn add_coupling(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        let n = self.h.len();
        if i == j || i >= n || j >= n {
            return Err(Error::contract(format!(
                "invalid coupling ({i}, {j}) for {n} spins"
            )));
        }
        let key = if i < j { (i, j) } else { (j, i) };
        *self.j.entry(key).or_insert(0.0) += value;
        Ok(())
    }

    pub fn energy(&self, spins: &[i8]) -> Result<f64> {
        if spins.len() != self.h.len() {
            return Err(Error::LengthMismatch {
                expected: self.h.len(),
                actual: spins.len(),
            });
        }
        let mut e = self.offset;
        for (h, &s) in self.h.iter().zip(spins) {
            e += h * f64::from(s);
        }
        for (&(i, j), v) in &self.j {
            e += v * f64::from(spins[i]) * f64::from(spins[j]);
        }
        Ok(e)
    }

    /// Largest absolute linear and coupling coefficients.
    pub fn max_abs(&self) -> (f64, f64) {
        let h = self.h.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let j = self.j.values().fold(0.0_f64, |m, v| m.max(v.abs()));
        (h, j)
    }

    pub fn is_empty(&self) -> bool {
        self.h.iter().all(|&v| v == 0.0) && self.j.values().all(|&v| v == 0.0)
    }
}

/// Substitutes `x = (1 - s)/2`; energies agree state by state with the
/// constant carried in `offset`.
pub fn qubo_to_ising(q: &QuboModel) -> IsingModel {
    let n = q.num_vars();
    let mut m = IsingModel::new(n);
    m.offset = q.offset();
    for (i, j, v) in q.entries() {
        if i == j {
            m.offset += v / 2.0;
            m.h[i] -= v / 2.0;
        } else {
            m.offset += v / 4.0;
            m.h[i] -= v / 4.0;
            m.h[j] -= v / 4.0;
            *m.j.entry((i, j)).or_insert(0.0) += v / 4.0;
        }
    }
    m
}

/// Substitutes `s = 1 - 2x`.
pub fn ising_to_qubo(m: &IsingModel) -> QuboModel {
    let n = m.num_spins();
    let mut q = QuboModel::new(n);
    let mut offset = m.offset;
    for (i, &h) in m.h.iter().enumerate() {
        offset += h;
        q.add(i, i, -2.0 * h);
    }
    for (&(i, j), &v) in &m.j {
        offset += v;
        q.add(i, i, -2.0 * v);
        q.add(j, j, -2.0 * v);
        q.add(i, j, 4.0 * v);
    }
    q.set_offset(offset);
    q
}
