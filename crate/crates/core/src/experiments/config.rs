use std::path::Path;

use serde::Deserialize;

use crate::encoding::Interval;
use crate::error::{Error, Result};
use crate::model::{CoefficientRange, DeviceRanges, IceNoise, PairSelection};
use crate::rod::{AreaSpec, RodModel};
use crate::schemes::{EncodingMode, FsiConfig, PenaltyConfig, PistonParams};
use crate::solvers::{Backend, SaParams, Schedule, SolverKind, EXACT_LIMIT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
pub enum ExperimentId {
    /// Single-step piston error against bits per variable.
    E1,
    /// Piston coupling with fixed and adaptive encodings.
    E2,
    /// Composite rod penalty method, fixed against adaptive.
    E3,
    /// Composite rod, relaxation sweep.
    E4,
    /// Composite rod, initial range sweep.
    E5,
    /// Composite rod, reads sweep.
    E6,
}

impl ExperimentId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentId::E1 => "E1",
            ExperimentId::E2 => "E2",
            ExperimentId::E3 => "E3",
            ExperimentId::E4 => "E4",
            ExperimentId::E5 => "E5",
            ExperimentId::E6 => "E6",
        }
    }

    pub fn uses_piston(&self) -> bool {
        matches!(self, ExperimentId::E1 | ExperimentId::E2)
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub id: ExperimentId,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_runs() -> usize {
    10
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub kind: SolverKind,
    pub num_reads: usize,
    pub sweeps: usize,
    pub t_hi: Option<f64>,
    pub t_lo: Option<f64>,
    pub sigma_h: f64,
    pub sigma_j: f64,
    pub h_range: [f64; 2],
    pub j_range: [f64; 2],
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            kind: SolverKind::Sa,
            num_reads: 500,
            sweeps: 1000,
            t_hi: None,
            t_lo: None,
            sigma_h: 0.0,
            sigma_j: 0.0,
            h_range: [-4.0, 4.0],
            j_range: [-1.0, 1.0],
        }
    }
}

impl SolverSection {
    pub fn backend(&self, kind: SolverKind, num_reads: usize) -> Backend {
        let sa = SaParams {
            num_reads,
            schedule: Schedule {
                sweeps: self.sweeps,
                t_hi: self.t_hi,
                t_lo: self.t_lo,
            },
        };
        match kind {
            SolverKind::Exact => Backend::Exact,
            SolverKind::Sa => Backend::Sa(sa),
            SolverKind::NoisySa => Backend::NoisySa {
                sa,
                noise: IceNoise {
                    sigma_h: self.sigma_h,
                    sigma_j: self.sigma_j,
                },
                device: DeviceRanges {
                    h: CoefficientRange {
                        lo: self.h_range[0],
                        hi: self.h_range[1],
                    },
                    j: CoefficientRange {
                        lo: self.j_range[0],
                        hi: self.j_range[1],
                    },
                },
            },
        }
    }

    fn validate(&self) -> Result<()> {
        if self.num_reads == 0 {
            return Err(Error::Config("solver.num_reads must be at least 1".into()));
        }
        if self.sweeps == 0 {
            return Err(Error::Config("solver.sweeps must be at least 1".into()));
        }
        for (name, t) in [("t_hi", self.t_hi), ("t_lo", self.t_lo)] {
            if t.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
                return Err(Error::Config(format!("solver.{name} must be positive")));
            }
        }
        if let (Some(hi), Some(lo)) = (self.t_hi, self.t_lo) {
            if lo > hi {
                return Err(Error::Config("solver.t_lo must not exceed solver.t_hi".into()));
            }
        }
        if !(self.sigma_h >= 0.0 && self.sigma_j >= 0.0) || !self.sigma_h.is_finite() || !self.sigma_j.is_finite() {
            return Err(Error::Config("noise levels must be nonnegative".into()));
        }
        for (name, [lo, hi]) in [("h_range", self.h_range), ("j_range", self.j_range)] {
            if !(lo < 0.0 && hi > 0.0) {
                return Err(Error::Config(format!("solver.{name} must contain zero in its interior")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EncodingSection {
    pub bits: usize,
    pub range: [f64; 2],
    pub rho: f64,
    pub mode: EncodingMode,
}

impl Default for EncodingSection {
    fn default() -> Self {
        Self {
            bits: 8,
            range: [0.0, 1.0],
            rho: 1.0,
            mode: EncodingMode::Adaptive,
        }
    }
}

/// Composite rod for the design experiments: supported at node 0, with a
/// prescribed force at the free end and one area choice per element.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RodSection {
    pub element_lengths: Vec<f64>,
    pub youngs_modulus: f64,
    pub areas: [f64; 2],
    pub specific_weight: f64,
    pub tip_force: f64,
}

impl Default for RodSection {
    fn default() -> Self {
        Self {
            element_lengths: vec![0.4, 0.6],
            youngs_modulus: 1.0,
            areas: [0.25, 0.5],
            specific_weight: 1.5,
            tip_force: 0.3,
        }
    }
}

impl RodSection {
    pub fn rod(&self) -> RodModel {
        let n = self.element_lengths.len();
        let mut rod = RodModel::uniform(n, 1.0, 1.0, self.youngs_modulus);
        rod.element_lengths = self.element_lengths.clone();
        rod.areas = vec![AreaSpec::Choice(self.areas); n];
        rod.specific_weight = self.specific_weight;
        rod.prescribed.insert(n, self.tip_force);
        rod
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FsiSection {
    pub eps_tol: f64,
    pub k_max: usize,
    pub track_best: bool,
}

impl Default for FsiSection {
    fn default() -> Self {
        Self {
            eps_tol: 2e-2,
            k_max: 15,
            track_best: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PenaltySection {
    pub lambda0: f64,
    pub eta: f64,
    pub eps_feas: f64,
    pub k_max: usize,
    pub pair_selection: PairSelectionName,
    pub track_best: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSelectionName {
    PerTerm,
    SharedGreedy,
}

impl From<PairSelectionName> for PairSelection {
    fn from(p: PairSelectionName) -> Self {
        match p {
            PairSelectionName::PerTerm => PairSelection::PerTerm,
            PairSelectionName::SharedGreedy => PairSelection::SharedGreedy,
        }
    }
}

impl Default for PenaltySection {
    fn default() -> Self {
        let d = PenaltyConfig::default();
        Self {
            lambda0: d.lambda0,
            eta: d.eta,
            eps_feas: d.eps_feas,
            k_max: d.k_max,
            pair_selection: PairSelectionName::PerTerm,
            track_best: true,
        }
    }
}

/// Values swept by the experiments; each experiment reads only its own key.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub bits: Vec<usize>,
    pub solvers: Vec<SolverKind>,
    pub modes: Vec<EncodingMode>,
    pub rho: Vec<f64>,
    pub ranges: Vec<[f64; 2]>,
    pub reads: Vec<usize>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            bits: (3..=10).collect(),
            solvers: vec![SolverKind::Exact, SolverKind::Sa, SolverKind::NoisySa],
            modes: vec![EncodingMode::Fixed, EncodingMode::Adaptive],
            rho: vec![0.25, 0.5, 0.75],
            ranges: vec![[0.0, 1.0], [0.0, 5.0], [0.0, 10.0]],
            reads: vec![400, 800],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub encoding: EncodingSection,
    #[serde(default)]
    pub rod: RodSection,
    #[serde(default)]
    pub piston: PistonParams,
    #[serde(default)]
    pub fsi: FsiSection,
    #[serde(default)]
    pub penalty: PenaltySection,
    #[serde(default)]
    pub sweep: SweepSection,
}

/// Command-line replacements for config values.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub runs: Option<usize>,
    pub solver: Option<SolverKind>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.experiment.seed = seed;
        }
        if let Some(runs) = o.runs {
            self.experiment.runs = runs;
        }
        if let Some(kind) = o.solver {
            self.solver.kind = kind;
            self.sweep.solvers = vec![kind];
        }
    }

    pub fn initial_range(&self) -> Result<Interval> {
        interval(self.encoding.range)
    }

    pub fn fsi_config(&self, mode: EncodingMode) -> Result<FsiConfig> {
        Ok(FsiConfig {
            piston: self.piston,
            eps_tol: self.fsi.eps_tol,
            k_max: self.fsi.k_max,
            mode,
            num_bits: self.encoding.bits,
            initial_range: self.initial_range()?,
            rho: self.encoding.rho,
            track_best: self.fsi.track_best,
        })
    }

    pub fn penalty_config(&self) -> Result<PenaltyConfig> {
        Ok(PenaltyConfig {
            lambda0: self.penalty.lambda0,
            eta: self.penalty.eta,
            eps_feas: self.penalty.eps_feas,
            k_max: self.penalty.k_max,
            rho: self.encoding.rho,
            num_bits: self.encoding.bits,
            initial_range: self.initial_range()?,
            mode: self.encoding.mode,
            pair_selection: self.penalty.pair_selection.into(),
            track_best: self.penalty.track_best,
        })
    }

    /// Checks everything the selected experiment will use.
    pub fn validate(&self) -> Result<()> {
        self.check().map_err(|e| match e {
            Error::Config(_) => e,
            other => Error::Config(other.to_string()),
        })
    }

    fn check(&self) -> Result<()> {
        if self.experiment.runs == 0 {
            return Err(Error::Config("experiment.runs must be at least 1".into()));
        }
        self.solver.validate()?;
        let id = self.experiment.id;
        if id.uses_piston() {
            self.piston.validate()?;
        } else {
            if self.rod.element_lengths.is_empty() {
                return Err(Error::Config("rod.element_lengths must not be empty".into()));
            }
            self.rod.rod().validate()?;
        }
        match id {
            ExperimentId::E1 => {
                nonempty("sweep.bits", &self.sweep.bits)?;
                nonempty("sweep.solvers", &self.sweep.solvers)?;
                for &n in &self.sweep.bits {
                    let vars = n * self.piston.num_elements;
                    if n == 0 || vars > EXACT_LIMIT {
                        return Err(Error::Config(format!(
                            "sweep.bits entry {n} gives {vars} variables; the best approximation needs 1..={EXACT_LIMIT}"
                        )));
                    }
                }
                self.fsi_config(EncodingMode::Fixed)?.validate()?;
            }
            ExperimentId::E2 => {
                nonempty("sweep.modes", &self.sweep.modes)?;
                for &m in &self.sweep.modes {
                    self.fsi_config(m)?.validate()?;
                }
            }
            ExperimentId::E3 => {
                nonempty("sweep.modes", &self.sweep.modes)?;
                for &m in &self.sweep.modes {
                    PenaltyConfig {
                        mode: m,
                        ..self.penalty_config()?
                    }
                    .validate()?;
                }
            }
            ExperimentId::E4 => {
                nonempty("sweep.rho", &self.sweep.rho)?;
                for &rho in &self.sweep.rho {
                    PenaltyConfig {
                        rho,
                        ..self.penalty_config()?
                    }
                    .validate()?;
                }
            }
            ExperimentId::E5 => {
                nonempty("sweep.ranges", &self.sweep.ranges)?;
                for &r in &self.sweep.ranges {
                    PenaltyConfig {
                        initial_range: interval(r)?,
                        ..self.penalty_config()?
                    }
                    .validate()?;
                }
            }
            ExperimentId::E6 => {
                nonempty("sweep.reads", &self.sweep.reads)?;
                if self.sweep.reads.contains(&0) {
                    return Err(Error::Config("sweep.reads entries must be at least 1".into()));
                }
                self.penalty_config()?.validate()?;
            }
        }
        Ok(())
    }
}

fn interval([lo, hi]: [f64; 2]) -> Result<Interval> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Config(format!("range [{lo}, {hi}] must satisfy lo < hi")));
    }
    Ok(Interval { lo, hi })
}

fn nonempty<T>(name: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Config(format!("{name} must not be empty")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = ExperimentConfig::parse("[experiment]\nid = \"E4\"\n").unwrap();
        assert_eq!(c.experiment.runs, 10);
        assert_eq!(c.sweep.rho, vec![0.25, 0.5, 0.75]);
        c.validate().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::parse("[experiment]\nid = \"E1\"\nbogus = 1\n").unwrap_err();
        assert!(err.is_config());
        assert!(ExperimentConfig::parse("[experiment]\nid = \"E9\"\n").is_err());
    }

    #[test]
    fn adaptive_needs_two_iterations() {
        let c = ExperimentConfig::parse("[experiment]\nid = \"E2\"\n[fsi]\nk_max = 1\n").unwrap();
        assert!(c.validate().unwrap_err().is_config());
    }
}
