//! Iterative drivers built on the encoded solvers: a partitioned
//! fluid-structure coupling and a quadratic penalty method for design.

use crate::encoding::Interval;
use crate::error::{Error, Result};

mod fsi;
mod penalty;

pub use fsi::{pressure_update, run_fsi, FsiConfig, FsiHistory, FsiIteration, PistonParams};
pub use penalty::{run_penalty, PenaltyConfig, PenaltyHistory, PenaltyIteration};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncodingMode {
    Fixed,
    Adaptive,
}

pub(crate) fn check_common(num_bits: usize, range: Interval, rho: f64, k_max: usize, mode: EncodingMode) -> Result<()> {
    if num_bits == 0 {
        return Err(Error::Config("bits per variable must be at least 1".into()));
    }
    if !(range.lo.is_finite() && range.hi.is_finite() && range.lo < range.hi) {
        return Err(Error::Config(format!(
            "initial range [{}, {}] must be a nonempty interval",
            range.lo, range.hi
        )));
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::Config(format!("rho must be in (0, 1], got {rho}")));
    }
    if k_max == 0 {
        return Err(Error::Config("k_max must be at least 1".into()));
    }
    if mode == EncodingMode::Adaptive && k_max < 2 {
        return Err(Error::Config("adaptive encoding needs k_max >= 2".into()));
    }
    Ok(())
}
