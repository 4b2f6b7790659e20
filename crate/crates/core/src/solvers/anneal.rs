use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::QuboModel;

use super::{aggregate, SolveOutcome, SolverKind};

/// Geometric temperature ladder. Unset temperatures default to
/// `T_hi = max |Q|` and `T_lo = 1e-3 · min nonzero |Q|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Schedule {
    pub sweeps: usize,
    pub t_hi: Option<f64>,
    pub t_lo: Option<f64>,
}

impl Default for Schedule {
    fn default() -> Self {
        Self {
            sweeps: 1000,
            t_hi: None,
            t_lo: None,
        }
    }
}

impl Schedule {
    pub fn with_sweeps(sweeps: usize) -> Self {
        Self {
            sweeps,
            ..Self::default()
        }
    }

    /// Temperatures for every sweep, hottest first.
    pub fn temperatures(&self, model: &QuboModel) -> Result<Vec<f64>> {
        if self.sweeps == 0 {
            return Err(Error::contract("schedule needs at least one sweep"));
        }
        let max = model.max_abs_coefficient();
        let min = model.min_nonzero_abs_coefficient();
        let t_hi = self.t_hi.unwrap_or(if max > 0.0 { max } else { 1.0 });
        let t_lo = self.t_lo.unwrap_or(min.map_or(1.0, |m| 1e-3 * m)).min(t_hi);
        if !(t_lo > 0.0 && t_hi.is_finite()) {
            return Err(Error::contract(format!(
                "temperatures must be positive and finite (T_hi = {t_hi}, T_lo = {t_lo})"
            )));
        }
        let last = (self.sweeps - 1).max(1) as f64;
        let ratio = t_lo / t_hi;
        Ok((0..self.sweeps)
            .map(|t| t_hi * ratio.powf(t as f64 / last))
            .collect())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolveRequest<'a> {
    pub model: &'a QuboModel,
    pub num_reads: usize,
    pub seed: u64,
    pub schedule: Schedule,
}

/// Independent single-flip Metropolis reads. Read `r` draws from its own
/// ChaCha stream `r` of `seed`, so results do not depend on thread count.
pub fn solve_sa(req: &SolveRequest<'_>) -> Result<SolveOutcome> {
    if req.num_reads == 0 {
        return Err(Error::contract("num_reads must be at least 1"));
    }
    let temps = req.schedule.temperatures(req.model)?;
    let m = req.model.to_dense_symmetric();
    let n = req.model.num_vars();
    let states: Vec<Vec<bool>> = (0..req.num_reads)
        .into_par_iter()
        .map(|read| {
            let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
            rng.set_stream(read as u64);
            anneal_once(&m, n, &temps, &mut rng)
        })
        .collect();
    aggregate(req.model, states, SolverKind::Sa)
}

fn anneal_once(m: &[f64], n: usize, temps: &[f64], rng: &mut ChaCha8Rng) -> Vec<bool> {
    let mut x: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    let mut field = vec![0.0; n];
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i && x[j]) {
            field[i] += m[i * n + j];
        }
    }
    for &t in temps {
        for i in 0..n {
            let sign = if x[i] { -1.0 } else { 1.0 };
            let delta = sign * (m[i * n + i] + field[i]);
            if delta <= 0.0 || rng.random::<f64>() < (-delta / t).exp() {
                x[i] = !x[i];
                let row = &m[i * n..(i + 1) * n];
                for (j, f) in field.iter_mut().enumerate() {
                    if j != i {
                        *f += sign * row[j];
                    }
                }
            }
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_is_geometric_and_decreasing() {
        let mut q = QuboModel::new(2);
        q.add(0, 0, 2.0);
        q.add(0, 1, -0.5);
        let t = Schedule::with_sweeps(3).temperatures(&q).unwrap();
        assert_eq!(t[0], 2.0);
        assert!((t[2] - 5e-4).abs() < 1e-15);
        assert!((t[1] - (2.0f64 * 5e-4).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn single_variable_downhill() {
        let mut q = QuboModel::new(1);
        q.add(0, 0, -1.0);
        let o = solve_sa(&SolveRequest {
            model: &q,
            num_reads: 5,
            seed: 3,
            schedule: Schedule::with_sweeps(10),
        })
        .unwrap();
        assert_eq!(o.best_energy, -1.0);
        assert_eq!(o.samples.iter().map(|s| s.multiplicity).sum::<usize>(), 5);
    }

    #[test]
    fn zero_reads_rejected() {
        let q = QuboModel::new(1);
        let req = SolveRequest {
            model: &q,
            num_reads: 0,
            seed: 0,
            schedule: Schedule::default(),
        };
        assert!(solve_sa(&req).is_err());
    }
}
