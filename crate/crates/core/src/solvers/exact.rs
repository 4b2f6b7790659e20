use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{BinaryPolynomial, QuboModel};

use super::{Sample, SolveOutcome, SolverKind};

/// Largest model [`solve_exact`] will enumerate.
pub const EXACT_LIMIT: usize = 28;

const INNER_BITS: usize = 16;

#[derive(Clone, Copy)]
struct Best {
    mask: u64,
    energy: f64,
}

fn mask_less(a: u64, b: u64) -> bool {
    // lexicographic on bit vectors: the first differing index decides and
    // the vector holding 0 there is smaller
    let d = a ^ b;
    d != 0 && a & (d & d.wrapping_neg()) == 0
}

fn better(c: Best, b: Best, tol: f64) -> bool {
    c.energy < b.energy - tol || (c.energy <= b.energy + tol && mask_less(c.mask, b.mask))
}

fn to_bits(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

/// Global minimum by enumerating all `2^n` states.
///
/// States are visited in Gray-code order inside blocks of `2^16`, with
/// local fields recomputed from scratch at each block start so rounding does
/// not accumulate. Energies within a small relative tolerance count as ties
/// and resolve to the lexicographically smallest state.
pub fn solve_exact(model: &QuboModel) -> Result<SolveOutcome> {
    let n = model.num_vars();
    if n > EXACT_LIMIT {
        return Err(Error::TooManyVariables {
            num_vars: n,
            limit: EXACT_LIMIT,
        });
    }
    let m = model.to_dense_symmetric();
    let scale: f64 = m.iter().map(|v| v.abs()).sum::<f64>();
    let tol = 1e-13 * scale;
    let inner = n.min(INNER_BITS);
    let blocks = 1u64 << (n - inner);

    let block_best = |block: u64| -> Best {
        let base = block << inner;
        let mut x: Vec<bool> = to_bits(base, n);
        // field[i] = Σ_{j≠i} M_ij x_j
        let mut field = vec![0.0; n];
        let mut energy = 0.0;
        for i in 0..n {
            for j in 0..n {
                if j != i && x[j] {
                    field[i] += m[i * n + j];
                }
            }
        }
        for i in (0..n).filter(|&i| x[i]) {
            energy += m[i * n + i];
            for j in (i + 1..n).filter(|&j| x[j]) {
                energy += m[i * n + j];
            }
        }
        let mut mask = base;
        let mut best = Best { mask, energy };
        for step in 1..1u64 << inner {
            let i = step.trailing_zeros() as usize;
            let sign = if x[i] { -1.0 } else { 1.0 };
            energy += sign * (m[i * n + i] + field[i]);
            x[i] = !x[i];
            mask ^= 1 << i;
            let row = &m[i * n..(i + 1) * n];
            for (j, f) in field.iter_mut().enumerate() {
                if j != i {
                    *f += sign * row[j];
                }
            }
            let c = Best { mask, energy };
            if better(c, best, tol) {
                best = c;
            }
        }
        best
    };

    let per_block: Vec<Best> = (0..blocks).into_par_iter().map(block_best).collect();
    let best = per_block
        .into_iter()
        .reduce(|b, c| if better(c, b, tol) { c } else { b })
        .expect("at least one block");
    let best_bits = to_bits(best.mask, n);
    let best_energy = model.energy(&best_bits)?;
    Ok(SolveOutcome {
        samples: vec![Sample {
            bits: best_bits.clone(),
            energy: best_energy,
            multiplicity: 1,
        }],
        best_bits,
        best_energy,
        kind: SolverKind::Exact,
    })
}

/// Global minimum of a polynomial of degree up to three by direct
/// evaluation of every state; meant for small variable counts.
pub fn solve_exact_polynomial(poly: &BinaryPolynomial) -> Result<(Vec<bool>, f64)> {
    let n = poly.num_vars();
    if n > EXACT_LIMIT {
        return Err(Error::TooManyVariables {
            num_vars: n,
            limit: EXACT_LIMIT,
        });
    }
    let terms: Vec<(u64, f64)> = poly
        .terms()
        .map(|(vars, c)| (vars.iter().fold(0u64, |m, &v| m | 1 << v), c))
        .collect();
    let scale: f64 = terms.iter().map(|(_, c)| c.abs()).sum();
    let tol = 1e-13 * scale;
    let mut best = Best {
        mask: 0,
        energy: f64::INFINITY,
    };
    for mask in 0..1u64 << n {
        let energy: f64 = terms
            .iter()
            .filter(|(t, _)| mask & t == *t)
            .map(|(_, c)| c)
            .sum();
        let c = Best { mask, energy };
        if better(c, best, tol) {
            best = c;
        }
    }
    let bits = to_bits(best.mask, n);
    let energy = poly.evaluate(&bits)?;
    Ok((bits, energy))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_models() {
        let mut q = QuboModel::new(1);
        q.add(0, 0, 1.0);
        let o = solve_exact(&q).unwrap();
        assert_eq!((o.best_bits.clone(), o.best_energy), (vec![false], 0.0));
        let mut q = QuboModel::new(1);
        q.add(0, 0, -1.0);
        let o = solve_exact(&q).unwrap();
        assert_eq!((o.best_bits.clone(), o.best_energy), (vec![true], -1.0));
    }

    #[test]
    fn ties_pick_lexicographically_smallest() {
        // x0 + x1 - 2 x0 x1 has minima 00 and 11
        let mut q = QuboModel::new(2);
        q.add(0, 0, 1.0);
        q.add(1, 1, 1.0);
        q.add(0, 1, -2.0);
        assert_eq!(solve_exact(&q).unwrap().best_bits, vec![false, false]);
        // -x0 - x1 + 2 x0 x1 has minima 10 and 01; [0,1] < [1,0]
        let mut q = QuboModel::new(2);
        q.add(0, 0, -1.0);
        q.add(1, 1, -1.0);
        q.add(0, 1, 2.0);
        assert_eq!(solve_exact(&q).unwrap().best_bits, vec![false, true]);
    }

    #[test]
    fn mask_order_matches_vector_order() {
        for a in 0..16u64 {
            for b in 0..16u64 {
                assert_eq!(mask_less(a, b), to_bits(a, 4) < to_bits(b, 4));
            }
        }
    }

    #[test]
    fn refuses_large_models() {
        let q = QuboModel::new(EXACT_LIMIT + 1);
        assert!(matches!(solve_exact(&q), Err(Error::TooManyVariables { .. })));
    }

    #[test]
    fn empty_model() {
        let mut q = QuboModel::new(0);
        q.set_offset(2.0);
        let o = solve_exact(&q).unwrap();
        assert!(o.best_bits.is_empty());
        assert_eq!(o.best_energy, 2.0);
    }
}
