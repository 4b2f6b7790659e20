use crate::encoding::{AdaptiveState, EncodingSet, Interval, Sample};
use crate::error::{Error, Result};
use crate::model::{quadratize_with, PairSelection};
use crate::rod::{
    analytic_selfweight_force, complementary_energy_polynomial, equilibrium_residual,
    h1_relative_error, optimal_design, ComplementaryModel, DesignAssignment, FieldKind,
    FieldSolution, RodModel,
};
use crate::solvers::{derive_seed, solve_exact_polynomial, Backend, EXACT_LIMIT};

use super::{check_common, EncodingMode};

#[derive(Clone, Debug, PartialEq)]
pub struct PenaltyConfig {
    pub lambda0: f64,
    pub eta: f64,
    pub eps_feas: f64,
    pub k_max: usize,
    pub rho: f64,
    pub num_bits: usize,
    pub initial_range: Interval,
    pub mode: EncodingMode,
    pub pair_selection: PairSelection,
    /// Also minimize every iteration's objective exactly to record the best
    /// approximation.
    pub track_best: bool,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        Self {
            lambda0: 5.0,
            eta: 1.5,
            eps_feas: 1e-9,
            k_max: 50,
            rho: 0.5,
            num_bits: 3,
            initial_range: Interval { lo: 0.0, hi: 1.0 },
            mode: EncodingMode::Adaptive,
            pair_selection: PairSelection::PerTerm,
            track_best: true,
        }
    }
}

impl PenaltyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda0.is_finite() && self.lambda0 > 0.0) {
            return Err(Error::Config("lambda0 must be positive".into()));
        }
        if !(self.eta.is_finite() && self.eta > 1.0) {
            return Err(Error::Config("eta must exceed 1".into()));
        }
        if self.eps_feas.is_nan() || self.eps_feas <= 0.0 {
            return Err(Error::Config("eps_feas must be positive".into()));
        }
        check_common(self.num_bits, self.initial_range, self.rho, self.k_max, self.mode)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PenaltyIteration {
    pub iteration: usize,
    pub lambda: f64,
    pub ranges: Vec<Interval>,
    pub design: DesignAssignment,
    pub force: FieldSolution,
    /// Equilibrium residual of the decoded force field.
    pub residual: f64,
    /// Error against the static force field of the compliance-optimal design.
    pub error: f64,
    pub error_ba: Option<f64>,
    /// Variables in the quadratized model.
    pub num_vars: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PenaltyHistory {
    pub iterations: Vec<PenaltyIteration>,
    pub feasible: bool,
    pub optimal_design: DesignAssignment,
    pub reference: FieldSolution,
}

impl PenaltyHistory {
    pub fn last(&self) -> &PenaltyIteration {
        self.iterations.last().expect("at least one iteration")
    }
}

fn decode(
    rod: &RodModel,
    enc: &EncodingSet,
    cm: &ComplementaryModel,
    bits: &[bool],
) -> Result<(Vec<f64>, DesignAssignment, FieldSolution)> {
    let values = enc.decode_all(bits)?;
    let design = rod.resolve_design(&cm.design_bits(bits))?;
    let force = FieldSolution::from_free(rod, FieldKind::Force, &values)?;
    Ok((values, design, force))
}

/// Quadratic penalty method on the complementary-energy formulation: each
/// iteration minimizes `U^c + λ π` jointly over encoded forces and design
/// bits, stops once `π ≤ eps_feas`, and otherwise grows `λ` by `eta` and
/// (in adaptive mode) updates the force ranges.
pub fn run_penalty(cfg: &PenaltyConfig, rod: &RodModel, backend: &Backend, seed: u64) -> Result<PenaltyHistory> {
    cfg.validate()?;
    rod.validate()?;
    let (optimal, _) = optimal_design(rod)?;
    let reference = analytic_selfweight_force(rod, &optimal)?;
    let num_free = rod.free_nodes().len();
    let mut state = AdaptiveState::new(&vec![cfg.initial_range; num_free], cfg.rho)?;
    let mut lambda = cfg.lambda0;
    let mut iterations = Vec::new();
    let mut feasible = false;

    for k in 0..cfg.k_max {
        let ranges = state.ranges();
        let enc = EncodingSet::binary(&ranges, cfg.num_bits)?;
        let cm = complementary_energy_polynomial(rod, &enc, lambda)?;
        let quad = quadratize_with(&cm.objective, cfg.pair_selection, None)?;
        let outcome = backend.solve(&quad.qubo, derive_seed(seed, k as u64))?;
        let bits = &outcome.best_bits[..cm.num_vars()];
        let (values, design, force) = decode(rod, &enc, &cm, bits)?;
        let residual = equilibrium_residual(&force, rod, &design)?;
        let error = h1_relative_error(&force, &reference)?;
        let error_ba = if cfg.track_best && cm.num_vars() <= EXACT_LIMIT {
            let (best, _) = solve_exact_polynomial(&cm.objective)?;
            let (_, _, f) = decode(rod, &enc, &cm, &best)?;
            Some(h1_relative_error(&f, &reference)?)
        } else {
            None
        };
        iterations.push(PenaltyIteration {
            iteration: k,
            lambda,
            ranges,
            design,
            force,
            residual,
            error,
            error_ba,
            num_vars: quad.num_vars(),
        });
        if residual <= cfg.eps_feas {
            feasible = true;
            break;
        }
        lambda *= cfg.eta;
        if cfg.mode == EncodingMode::Adaptive {
            state.record(
                (0..num_free)
                    .map(|i| Sample {
                        value: values[i],
                        bits: enc.bits_of(i, bits).to_vec(),
                    })
                    .collect(),
            )?;
            if state.ready() {
                state.update()?;
            }
        }
    }
    Ok(PenaltyHistory {
        iterations,
        feasible,
        optimal_design: optimal,
        reference,
    })
}
