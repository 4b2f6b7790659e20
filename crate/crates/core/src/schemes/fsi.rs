use crate::encoding::{detect_saturation, AdaptiveState, EncodingSet, Interval, Sample, Saturation};
use crate::error::{Error, Result};
use crate::model::to_qubo;
use crate::rod::{
    analytic_piston_displacement, h1_norm, h1_relative_error, potential_energy_polynomial,
    FieldKind, FieldSolution, RodModel,
};
use crate::solvers::{derive_seed, solve_exact, Backend, EXACT_LIMIT};

use super::{check_common, EncodingMode};

/// Adiabatic chamber law `p · (L_f0 / (L_f0 + u))^γ`.
pub fn pressure_update(p: f64, chamber_length: f64, gamma: f64, u_interface: f64) -> Result<f64> {
    let len = chamber_length + u_interface;
    if len.is_nan() || len <= 0.0 {
        return Err(Error::ChamberCollapse(len));
    }
    Ok(p * (chamber_length / len).powf(gamma))
}

/// Piston rod closing a gas chamber at node 0; the last node is fixed.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PistonParams {
    pub num_elements: usize,
    pub rod_length: f64,
    pub rod_area: f64,
    pub youngs_modulus: f64,
    pub chamber_length: f64,
    pub fluid_area: f64,
    pub gamma: f64,
    pub initial_pressure: f64,
    /// `+1` when positive interface displacement lengthens the chamber.
    pub chamber_sign: f64,
}

impl Default for PistonParams {
    fn default() -> Self {
        Self {
            num_elements: 2,
            rod_length: 1.0,
            rod_area: 1.0,
            youngs_modulus: 1.0,
            chamber_length: 1.0,
            fluid_area: 2.0,
            gamma: 1.4,
            initial_pressure: 0.25,
            chamber_sign: 1.0,
        }
    }
}

impl PistonParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if self.num_elements == 0 {
            return Err(Error::Config("piston rod needs at least one element".into()));
        }
        for (name, v) in [
            ("rod_length", self.rod_length),
            ("rod_area", self.rod_area),
            ("youngs_modulus", self.youngs_modulus),
            ("chamber_length", self.chamber_length),
            ("fluid_area", self.fluid_area),
            ("initial_pressure", self.initial_pressure),
        ] {
            if !positive(v) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.gamma.is_nan() || self.gamma <= 1.0 {
            return Err(Error::Config(format!("gamma must exceed 1, got {}", self.gamma)));
        }
        if self.chamber_sign != 1.0 && self.chamber_sign != -1.0 {
            return Err(Error::Config("chamber_sign must be 1 or -1".into()));
        }
        Ok(())
    }

    /// Rod loaded by the chamber at pressure `p`.
    pub fn rod(&self, pressure: f64) -> RodModel {
        let mut rod = RodModel::uniform(self.num_elements, self.rod_length, self.rod_area, self.youngs_modulus);
        rod.prescribed.insert(self.num_elements, 0.0);
        rod.point_loads.insert(0, pressure * self.fluid_area);
        rod
    }

    pub fn analytic(&self, pressure: f64) -> Result<FieldSolution> {
        analytic_piston_displacement(&self.rod(pressure), pressure, self.fluid_area)
    }

    /// Pressure after the chamber responds to interface displacement `u0`,
    /// written relative to the initial state.
    pub fn next_pressure(&self, u0: f64) -> Result<f64> {
        pressure_update(self.initial_pressure, self.chamber_length, self.gamma, self.chamber_sign * u0)
    }

    /// Classical fixed point of the coupled problem (pressure, displacement).
    pub fn fixed_point(&self, tol: f64, max_iter: usize) -> Result<(f64, FieldSolution)> {
        let mut p = self.initial_pressure;
        for _ in 0..max_iter {
            let u = self.analytic(p)?;
            let next = self.next_pressure(u.coeffs[0])?;
            // the map p -> next has slope of magnitude below one for the
            // default data; relax to stay robust for stiffer chambers
            let relaxed = 0.5 * (p + next);
            if (relaxed - p).abs() <= tol * p.abs().max(1e-300) {
                return Ok((relaxed, self.analytic(relaxed)?));
            }
            p = relaxed;
        }
        Err(Error::contract("classical fixed point did not converge"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FsiConfig {
    pub piston: PistonParams,
    pub eps_tol: f64,
    pub k_max: usize,
    pub mode: EncodingMode,
    pub num_bits: usize,
    pub initial_range: Interval,
    pub rho: f64,
    /// Also solve every iteration exactly to record the best approximation.
    pub track_best: bool,
}

impl FsiConfig {
    pub fn validate(&self) -> Result<()> {
        self.piston.validate()?;
        if self.eps_tol.is_nan() || self.eps_tol <= 0.0 {
            return Err(Error::Config("eps_tol must be positive".into()));
        }
        check_common(self.num_bits, self.initial_range, self.rho, self.k_max, self.mode)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FsiIteration {
    pub iteration: usize,
    pub pressure: f64,
    pub displacement: FieldSolution,
    pub ranges: Vec<Interval>,
    /// Relative H¹ change from the previous iterate (absent at k = 0).
    pub delta_u: Option<f64>,
    /// Error against the classical fixed-point displacement.
    pub error: f64,
    /// Same, for the exact minimizer of this iteration's QUBO.
    pub error_ba: Option<f64>,
    /// Error against the exact displacement for this iteration's pressure.
    pub error_step: f64,
    pub error_ba_step: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FsiHistory {
    pub iterations: Vec<FsiIteration>,
    pub converged: bool,
    pub fixed_point_pressure: f64,
    pub fixed_point: FieldSolution,
}

impl FsiHistory {
    pub fn last(&self) -> &FsiIteration {
        self.iterations.last().expect("at least one iteration")
    }
}

/// Gauss–Seidel coupling: pressure → rod solve on the encoded QUBO →
/// chamber update, until the displacement changes by less than `eps_tol`
/// (relative H¹) or `k_max` iterations have run.
///
/// The pressure is always evaluated from the initial chamber state and the
/// current interface displacement.
pub fn run_fsi(cfg: &FsiConfig, backend: &Backend, seed: u64) -> Result<FsiHistory> {
    cfg.validate()?;
    let piston = &cfg.piston;
    let (p_star, u_star) = piston.fixed_point(1e-12, 10_000)?;
    let num_free = piston.num_elements;
    let mut state = AdaptiveState::new(&vec![cfg.initial_range; num_free], cfg.rho)?;
    let mut pressure = piston.initial_pressure;
    let mut prev: Option<FieldSolution> = None;
    let mut iterations = Vec::new();
    let mut converged = false;

    for k in 0..cfg.k_max {
        let rod = piston.rod(pressure);
        let ranges = state.ranges();
        let enc = EncodingSet::binary(&ranges, cfg.num_bits)?;
        let qubo = to_qubo(&potential_energy_polynomial(&rod, &enc)?)?;
        let outcome = backend.solve(&qubo, derive_seed(seed, k as u64))?;
        let values = enc.decode_all(&outcome.best_bits)?;
        let u = FieldSolution::from_free(&rod, FieldKind::Displacement, &values)?;
        let step_reference = piston.analytic(pressure)?;
        let best = match backend {
            Backend::Exact => Some(u.clone()),
            _ if cfg.track_best && qubo.num_vars() <= EXACT_LIMIT => {
                let best = solve_exact(&qubo)?;
                let v = enc.decode_all(&best.best_bits)?;
                Some(FieldSolution::from_free(&rod, FieldKind::Displacement, &v)?)
            }
            _ => None,
        };
        let delta_u = prev.as_ref().map(|p| relative_change(&u, p)).transpose()?;
        // a saturated adaptive iterate sits on a range bound that the next
        // update will move, so a small change there does not mean convergence
        let saturated = cfg.mode == EncodingMode::Adaptive
            && (0..num_free).any(|i| {
                detect_saturation(enc.bits_of(i, &outcome.best_bits))
                    .is_ok_and(|s| s != Saturation::None)
            });
        iterations.push(FsiIteration {
            iteration: k,
            pressure,
            ranges,
            delta_u,
            error: h1_relative_error(&u, &u_star)?,
            error_ba: best.as_ref().map(|b| h1_relative_error(b, &u_star)).transpose()?,
            error_step: h1_relative_error(&u, &step_reference)?,
            error_ba_step: best.as_ref().map(|b| h1_relative_error(b, &step_reference)).transpose()?,
            displacement: u.clone(),
        });
        if !saturated && delta_u.is_some_and(|d| d < cfg.eps_tol) {
            converged = true;
            break;
        }
        pressure = piston.next_pressure(u.coeffs[0])?;
        if cfg.mode == EncodingMode::Adaptive {
            state.record(
                (0..num_free)
                    .map(|i| Sample {
                        value: values[i],
                        bits: enc.bits_of(i, &outcome.best_bits).to_vec(),
                    })
                    .collect(),
            )?;
            if state.ready() {
                state.update()?;
            }
        }
        prev = Some(u);
    }
    Ok(FsiHistory {
        iterations,
        converged,
        fixed_point_pressure: p_star,
        fixed_point: u_star,
    })
}

fn relative_change(current: &FieldSolution, previous: &FieldSolution) -> Result<f64> {
    if h1_norm(current) == 0.0 {
        return Ok(if h1_norm(previous) == 0.0 { 0.0 } else { f64::INFINITY });
    }
    h1_relative_error(previous, current)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pressure_examples() {
        assert_eq!(pressure_update(0.25, 1.0, 1.4, 0.0).unwrap(), 0.25);
        let p = pressure_update(0.25, 1.0, 1.4, 0.1).unwrap();
        assert!((p - 0.25 * (1.0f64 / 1.1).powf(1.4)).abs() < 1e-15);
        assert!((p - 0.21874).abs() < 1e-4);
        assert_eq!(pressure_update(0.3, 1.0, 1.0, 1.0).unwrap(), 0.15);
        assert!(matches!(
            pressure_update(0.3, 1.0, 1.4, -1.0),
            Err(Error::ChamberCollapse(_))
        ));
    }

    #[test]
    fn fixed_point_is_consistent() {
        let piston = PistonParams::default();
        let (p, u) = piston.fixed_point(1e-13, 10_000).unwrap();
        let again = piston.next_pressure(u.coeffs[0]).unwrap();
        assert!((again - p).abs() < 1e-10);
        assert!(p > 0.15 && p < 0.2);
    }
}
