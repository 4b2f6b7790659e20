use rayon::prelude::*;

use crate::encoding::Interval;
use crate::error::Result;
use crate::schemes::{run_fsi, run_penalty, EncodingMode, FsiHistory, PenaltyConfig, PenaltyHistory};
use crate::solvers::{Backend, SolverKind};

use super::config::{ExperimentConfig, ExperimentId};

/// Settings shared by every run of one variant.
#[derive(Clone, Debug, PartialEq)]
pub struct Metadata {
    pub num_bits: usize,
    pub rho: f64,
    pub num_reads: Option<usize>,
    pub range: Interval,
    pub solver: SolverKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRow {
    pub iteration: usize,
    pub error: f64,
    pub error_ba: Option<f64>,
    pub error_step: Option<f64>,
    pub pressure: Option<f64>,
    pub delta_u: Option<f64>,
    pub penalty_residual: Option<f64>,
    pub lambda: Option<f64>,
    /// Design bits packed with the first design element least significant.
    pub design_bits: Option<u64>,
    pub ranges: Vec<Interval>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunHistory {
    pub run: usize,
    pub seed: u64,
    pub rows: Vec<IterationRow>,
    /// Met the convergence test (FSI) or the feasibility test (penalty).
    pub converged: bool,
    /// Final design equals the compliance optimum (penalty only).
    pub optimal_design: Option<bool>,
}

impl RunHistory {
    pub fn final_error(&self) -> f64 {
        self.rows.last().expect("nonempty run").error
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variant {
    pub label: String,
    pub meta: Metadata,
    pub runs: Vec<RunHistory>,
}

impl Variant {
    pub fn final_errors(&self) -> Vec<f64> {
        self.runs.iter().map(RunHistory::final_error).collect()
    }

    pub fn max_iterations(&self) -> usize {
        self.runs.iter().map(|r| r.rows.len()).max().unwrap_or(0)
    }

    /// Error of every run at `iteration`; runs that already stopped
    /// contribute their final value.
    pub fn errors_at(&self, iteration: usize) -> Vec<f64> {
        self.runs
            .iter()
            .filter_map(|r| r.rows.get(iteration).or(r.rows.last()).map(|row| row.error))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorVsBitsRow {
    pub solver: SolverKind,
    pub num_bits: usize,
    pub run: usize,
    pub seed: u64,
    pub error: f64,
    pub error_ba: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Fsi,
    Penalty,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExperimentData {
    ErrorVsBits(Vec<ErrorVsBitsRow>),
    History { scheme: Scheme, variants: Vec<Variant> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResults {
    pub id: ExperimentId,
    pub data: ExperimentData,
}

fn fsi_rows(h: &FsiHistory) -> Vec<IterationRow> {
    h.iterations
        .iter()
        .map(|it| IterationRow {
            iteration: it.iteration,
            error: it.error,
            error_ba: it.error_ba,
            error_step: Some(it.error_step),
            pressure: Some(it.pressure),
            delta_u: it.delta_u,
            penalty_residual: None,
            lambda: None,
            design_bits: None,
            ranges: it.ranges.clone(),
        })
        .collect()
}

fn penalty_rows(h: &PenaltyHistory) -> Vec<IterationRow> {
    h.iterations
        .iter()
        .map(|it| IterationRow {
            iteration: it.iteration,
            error: it.error,
            error_ba: it.error_ba,
            error_step: None,
            pressure: None,
            delta_u: None,
            penalty_residual: Some(it.residual),
            lambda: Some(it.lambda),
            design_bits: Some(pack(&it.design.bits())),
            ranges: it.ranges.clone(),
        })
        .collect()
}

fn pack(bits: &[bool]) -> u64 {
    bits.iter().enumerate().fold(0, |m, (i, &b)| m | (u64::from(b) << i))
}

fn num_reads(backend: &Backend) -> Option<usize> {
    match backend {
        Backend::Exact => None,
        Backend::Sa(p) | Backend::NoisySa { sa: p, .. } => Some(p.num_reads),
    }
}

fn seeds(cfg: &ExperimentConfig) -> Vec<(usize, u64)> {
    (0..cfg.experiment.runs)
        .map(|r| (r, cfg.experiment.seed.wrapping_add(r as u64)))
        .collect()
}

/// Executes the configured experiment. Runs execute in parallel; results
/// come back in run order so output does not depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResults> {
    cfg.validate()?;
    let id = cfg.experiment.id;
    let data = match id {
        ExperimentId::E1 => ExperimentData::ErrorVsBits(error_vs_bits(cfg)?),
        ExperimentId::E2 => {
            let backend = cfg.solver.backend(cfg.solver.kind, cfg.solver.num_reads);
            let variants = cfg
                .sweep
                .modes
                .iter()
                .map(|&mode| fsi_variant(cfg, mode_label(mode), mode, &backend))
                .collect::<Result<_>>()?;
            ExperimentData::History {
                scheme: Scheme::Fsi,
                variants,
            }
        }
        _ => ExperimentData::History {
            scheme: Scheme::Penalty,
            variants: penalty_variants(cfg)?,
        },
    };
    Ok(ExperimentResults { id, data })
}

fn mode_label(mode: EncodingMode) -> String {
    match mode {
        EncodingMode::Fixed => "fixed".into(),
        EncodingMode::Adaptive => "adaptive".into(),
    }
}

fn error_vs_bits(cfg: &ExperimentConfig) -> Result<Vec<ErrorVsBitsRow>> {
    let mut out = Vec::new();
    for &solver in &cfg.sweep.solvers {
        let backend = cfg.solver.backend(solver, cfg.solver.num_reads);
        for &n in &cfg.sweep.bits {
            let fsi = crate::schemes::FsiConfig {
                num_bits: n,
                k_max: 1,
                track_best: true,
                ..cfg.fsi_config(EncodingMode::Fixed)?
            };
            let rows = seeds(cfg)
                .into_par_iter()
                .map(|(run, seed)| {
                    let h = run_fsi(&fsi, &backend, seed)?;
                    let it = h.last();
                    Ok(ErrorVsBitsRow {
                        solver,
                        num_bits: n,
                        run,
                        seed,
                        error: it.error_step,
                        error_ba: it.error_ba_step.expect("best approximation tracked"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            out.extend(rows);
        }
    }
    Ok(out)
}

fn fsi_variant(cfg: &ExperimentConfig, label: String, mode: EncodingMode, backend: &Backend) -> Result<Variant> {
    let fsi = cfg.fsi_config(mode)?;
    let runs = seeds(cfg)
        .into_par_iter()
        .map(|(run, seed)| {
            let h = run_fsi(&fsi, backend, seed)?;
            Ok(RunHistory {
                run,
                seed,
                rows: fsi_rows(&h),
                converged: h.converged,
                optimal_design: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Variant {
        label,
        meta: Metadata {
            num_bits: fsi.num_bits,
            rho: fsi.rho,
            num_reads: num_reads(backend),
            range: fsi.initial_range,
            solver: backend.kind(),
        },
        runs,
    })
}

fn penalty_variants(cfg: &ExperimentConfig) -> Result<Vec<Variant>> {
    let base = cfg.penalty_config()?;
    let default_backend = cfg.solver.backend(cfg.solver.kind, cfg.solver.num_reads);
    let settings: Vec<(String, PenaltyConfig, Backend)> = match cfg.experiment.id {
        ExperimentId::E3 => cfg
            .sweep
            .modes
            .iter()
            .map(|&mode| (mode_label(mode), PenaltyConfig { mode, ..base.clone() }, default_backend))
            .collect(),
        ExperimentId::E4 => cfg
            .sweep
            .rho
            .iter()
            .map(|&rho| (format!("rho_{rho}"), PenaltyConfig { rho, ..base.clone() }, default_backend))
            .collect(),
        ExperimentId::E5 => cfg
            .sweep
            .ranges
            .iter()
            .map(|&[lo, hi]| {
                (
                    format!("range_{lo}_{hi}"),
                    PenaltyConfig {
                        initial_range: Interval { lo, hi },
                        ..base.clone()
                    },
                    default_backend,
                )
            })
            .collect(),
        ExperimentId::E6 => cfg
            .sweep
            .reads
            .iter()
            .map(|&reads| {
                (
                    format!("reads_{reads}"),
                    base.clone(),
                    cfg.solver.backend(cfg.solver.kind, reads),
                )
            })
            .collect(),
        ExperimentId::E1 | ExperimentId::E2 => unreachable!("piston experiments"),
    };
    let rod = cfg.rod.rod();
    settings
        .into_iter()
        .map(|(label, pc, backend)| {
            let runs = seeds(cfg)
                .into_par_iter()
                .map(|(run, seed)| {
                    let h = run_penalty(&pc, &rod, &backend, seed)?;
                    Ok(RunHistory {
                        run,
                        seed,
                        rows: penalty_rows(&h),
                        converged: h.feasible,
                        optimal_design: Some(h.last().design == h.optimal_design),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Variant {
                label,
                meta: Metadata {
                    num_bits: pc.num_bits,
                    rho: pc.rho,
                    num_reads: num_reads(&backend),
                    range: pc.initial_range,
                    solver: backend.kind(),
                },
                runs,
            })
        })
        .collect()
}
