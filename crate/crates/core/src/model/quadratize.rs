use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::{to_qubo, BinaryPolynomial, QuboModel};

/// How cubic monomials are assigned auxiliary variables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PairSelection {
    /// One fresh auxiliary per cubic monomial, substituting its two
    /// lowest-indexed variables.
    #[default]
    PerTerm,
    /// Repeatedly substitute the pair shared by the most remaining cubic
    /// monomials (ties go to the lexicographically smallest pair), so one
    /// auxiliary can serve several monomials.
    SharedGreedy,
}

/// Auxiliary variable standing for the product of `pair`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuxVariable {
    pub index: usize,
    pub pair: (usize, usize),
}

#[derive(Clone, Debug)]
pub struct Quadratized {
    pub qubo: QuboModel,
    pub num_original: usize,
    pub aux: Vec<AuxVariable>,
    pub weight: f64,
}

impl Quadratized {
    pub fn num_vars(&self) -> usize {
        self.qubo.num_vars()
    }

    /// Extends an assignment of the original variables with auxiliaries set
    /// to the products they stand for.
    pub fn extend(&self, original: &[bool]) -> Result<Vec<bool>> {
        if original.len() != self.num_original {
            return Err(Error::LengthMismatch {
                expected: self.num_original,
                actual: original.len(),
            });
        }
        let mut bits = original.to_vec();
        bits.resize(self.num_vars(), false);
        // auxiliaries may reference earlier auxiliaries only through their
        // index order, so one forward pass suffices
        for a in &self.aux {
            bits[a.index] = bits[a.pair.0] && bits[a.pair.1];
        }
        Ok(bits)
    }

    /// Whether every auxiliary equals its product in `bits`.
    pub fn is_consistent(&self, bits: &[bool]) -> bool {
        self.aux
            .iter()
            .all(|a| bits[a.index] == (bits[a.pair.0] && bits[a.pair.1]))
    }
}

/// `2 (1 + Σ |cubic coefficients|)`.
pub fn default_penalty_weight(poly: &BinaryPolynomial) -> f64 {
    2.0 * (1.0 + poly.cubic_abs_sum())
}

pub fn quadratize(poly: &BinaryPolynomial) -> Result<Quadratized> {
    quadratize_with(poly, PairSelection::default(), None)
}

/// Rosenberg substitution: each chosen pair `(i, j)` is replaced by an
/// auxiliary `w` and the penalty `M (x_i x_j - 2 x_i w - 2 x_j w + 3 w)` is
/// added. The penalty vanishes iff `w = x_i x_j` and is at least `M`
/// otherwise, so with `M > Σ |cubic|` the minimizers restricted to the
/// original variables coincide with those of `poly`.
pub fn quadratize_with(
    poly: &BinaryPolynomial,
    selection: PairSelection,
    weight: Option<f64>,
) -> Result<Quadratized> {
    let bound = poly.cubic_abs_sum();
    let weight = weight.unwrap_or_else(|| default_penalty_weight(poly));
    if !weight.is_finite() || weight <= 0.0 || weight <= bound {
        return Err(Error::contract(format!(
            "penalty weight {weight} must be positive and exceed the cubic coefficient sum {bound}"
        )));
    }
    let n = poly.num_vars();
    if poly.degree() < 3 {
        return Ok(Quadratized {
            qubo: to_qubo(poly)?,
            num_original: n,
            aux: Vec::new(),
            weight,
        });
    }

    let mut reduced = BinaryPolynomial::new(n);
    let mut cubic: Vec<([usize; 3], f64)> = Vec::new();
    for (vars, c) in poly.terms() {
        match *vars {
            [i, j, k] => cubic.push(([i, j, k], c)),
            _ => reduced.add_term(vars, c)?,
        }
    }

    let mut aux = Vec::new();
    match selection {
        PairSelection::PerTerm => {
            for ([i, j, k], c) in cubic {
                let w = n + aux.len();
                aux.push(AuxVariable { index: w, pair: (i, j) });
                reduced.ensure_num_vars(w + 1);
                reduced.add_term(&[w, k], c)?;
            }
        }
        PairSelection::SharedGreedy => {
            while !cubic.is_empty() {
                let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
                for ([i, j, k], _) in &cubic {
                    for p in [(*i, *j), (*i, *k), (*j, *k)] {
                        *counts.entry(p).or_default() += 1;
                    }
                }
                // max_by_key keeps the last maximum; iterate in reverse so ties
                // resolve to the smallest pair
                let (&pair, _) = counts
                    .iter()
                    .rev()
                    .max_by_key(|(_, &c)| c)
                    .expect("nonempty cubic set");
                let w = n + aux.len();
                aux.push(AuxVariable { index: w, pair });
                reduced.ensure_num_vars(w + 1);
                cubic.retain(|(t, c)| {
                    if t.contains(&pair.0) && t.contains(&pair.1) {
                        let other = *t.iter().find(|&&v| v != pair.0 && v != pair.1).unwrap();
                        reduced.add_term(&[w, other], *c).expect("valid indices");
                        false
                    } else {
                        true
                    }
                });
            }
        }
    }

    for a in &aux {
        let (i, j) = a.pair;
        reduced.add_term(&[i, j], weight)?;
        reduced.add_term(&[i, a.index], -2.0 * weight)?;
        reduced.add_term(&[j, a.index], -2.0 * weight)?;
        reduced.add_term(&[a.index], 3.0 * weight)?;
    }

    Ok(Quadratized {
        qubo: to_qubo(&reduced)?,
        num_original: n,
        aux,
        weight,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn states(n: usize) -> impl Iterator<Item = Vec<bool>> {
        (0..1u32 << n).map(move |s| (0..n).map(|i| s >> i & 1 == 1).collect())
    }

    #[test]
    fn quadratic_input_passes_through() {
        let mut p = BinaryPolynomial::new(2);
        p.add_term(&[0, 1], 3.0).unwrap();
        let q = quadratize(&p).unwrap();
        assert!(q.aux.is_empty());
        assert_eq!(q.qubo, to_qubo(&p).unwrap());
    }

    #[test]
    fn single_cubic_term() {
        let mut p = BinaryPolynomial::new(3);
        p.add_term(&[0, 1, 2], 1.0).unwrap();
        let q = quadratize(&p).unwrap();
        assert_eq!(q.num_vars(), 4);
        assert_eq!(q.aux, vec![AuxVariable { index: 3, pair: (0, 1) }]);
        for x in states(3) {
            let min = states(1)
                .map(|w| {
                    let mut b = x.clone();
                    b.push(w[0]);
                    q.qubo.energy(&b).unwrap()
                })
                .fold(f64::INFINITY, f64::min);
            assert_eq!(min, p.evaluate(&x).unwrap());
        }
    }

    #[test]
    fn shared_pairs_use_fewer_auxiliaries() {
        let mut p = BinaryPolynomial::new(4);
        p.add_term(&[0, 1, 2], 1.0).unwrap();
        p.add_term(&[0, 1, 3], -2.0).unwrap();
        let per_term = quadratize(&p).unwrap();
        let shared = quadratize_with(&p, PairSelection::SharedGreedy, None).unwrap();
        assert_eq!(per_term.aux.len(), 2);
        assert_eq!(shared.aux.len(), 1);
        assert_eq!(shared.aux[0].pair, (0, 1));
    }

    #[test]
    fn weight_must_dominate_cubic_part() {
        let mut p = BinaryPolynomial::new(3);
        p.add_term(&[0, 1, 2], 2.0).unwrap();
        assert!(quadratize_with(&p, PairSelection::PerTerm, Some(2.0)).is_err());
        assert!(quadratize_with(&p, PairSelection::PerTerm, Some(-1.0)).is_err());
        assert!(quadratize_with(&p, PairSelection::PerTerm, Some(2.5)).is_ok());
    }
}
