//! QUBO minimizers: exhaustive enumeration, simulated annealing and an
//! annealer emulation that perturbs the model before sampling.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{DeviceRanges, IceNoise, QuboModel};

mod anneal;
mod exact;
mod noisy;

pub use anneal::{solve_sa, Schedule, SolveRequest};
pub use exact::{solve_exact, solve_exact_polynomial, EXACT_LIMIT};
pub use noisy::solve_noisy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Exact,
    Sa,
    NoisySa,
}

impl SolverKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverKind::Exact => "exact",
            SolverKind::Sa => "sa",
            SolverKind::NoisySa => "noisy_sa",
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(SolverKind::Exact),
            "sa" => Ok(SolverKind::Sa),
            "noisy_sa" => Ok(SolverKind::NoisySa),
            other => Err(Error::Config(format!(
                "unknown solver `{other}` (expected exact, sa or noisy_sa)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub bits: Vec<bool>,
    pub energy: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOutcome {
    pub best_bits: Vec<bool>,
    pub best_energy: f64,
    /// Distinct states ordered by energy, then lexicographically.
    pub samples: Vec<Sample>,
    pub kind: SolverKind,
}

/// Groups raw read results by state and picks the best one.
pub(crate) fn aggregate(model: &QuboModel, states: Vec<Vec<bool>>, kind: SolverKind) -> Result<SolveOutcome> {
    let mut counts: BTreeMap<Vec<bool>, usize> = BTreeMap::new();
    for s in states {
        *counts.entry(s).or_default() += 1;
    }
    let mut samples = counts
        .into_iter()
        .map(|(bits, multiplicity)| {
            let energy = model.energy(&bits)?;
            Ok(Sample {
                bits,
                energy,
                multiplicity,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    // BTreeMap order is already lexicographic, so a stable sort on energy
    // keeps ties lexicographic
    samples.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    let best = samples
        .first()
        .ok_or_else(|| Error::contract("solver produced no samples"))?;
    Ok(SolveOutcome {
        best_bits: best.bits.clone(),
        best_energy: best.energy,
        kind,
        samples,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaParams {
    pub num_reads: usize,
    pub schedule: Schedule,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            num_reads: 500,
            schedule: Schedule::default(),
        }
    }
}

/// Solver selection shared by the iterative schemes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Backend {
    Exact,
    Sa(SaParams),
    NoisySa {
        sa: SaParams,
        noise: IceNoise,
        device: DeviceRanges,
    },
}

impl Backend {
    pub fn kind(&self) -> SolverKind {
        match self {
            Backend::Exact => SolverKind::Exact,
            Backend::Sa(_) => SolverKind::Sa,
            Backend::NoisySa { .. } => SolverKind::NoisySa,
        }
    }

    pub fn solve(&self, model: &QuboModel, seed: u64) -> Result<SolveOutcome> {
        match self {
            Backend::Exact => solve_exact(model),
            Backend::Sa(p) => solve_sa(&SolveRequest {
                model,
                num_reads: p.num_reads,
                seed,
                schedule: p.schedule,
            }),
            Backend::NoisySa { sa, noise, device } => solve_noisy(
                &SolveRequest {
                    model,
                    num_reads: sa.num_reads,
                    seed,
                    schedule: sa.schedule,
                },
                noise,
                device,
            ),
        }
    }
}

/// Seed for iteration `k` of a run seeded with `seed` (splitmix64 finalizer).
pub fn derive_seed(seed: u64, k: u64) -> u64 {
    let mut z = seed ^ k.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
