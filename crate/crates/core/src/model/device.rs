use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

use super::IsingModel;

/// Closed coefficient interval `[lo, hi]` with `lo < 0 < hi`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CoefficientRange {
    pub lo: f64,
    pub hi: f64,
}

impl CoefficientRange {
    pub fn symmetric(bound: f64) -> Self {
        Self {
            lo: -bound,
            hi: bound,
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(self.lo < 0.0 && self.hi > 0.0) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::contract(format!(
                "{name} range [{}, {}] must contain zero in its interior",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    /// Smallest divisor bringing `v` inside the range.
    fn required_divisor(&self, v: f64) -> f64 {
        if v > 0.0 {
            v / self.hi
        } else {
            v / self.lo
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DeviceRanges {
    pub h: CoefficientRange,
    pub j: CoefficientRange,
}

impl Default for DeviceRanges {
    fn default() -> Self {
        Self {
            h: CoefficientRange::symmetric(4.0),
            j: CoefficientRange::symmetric(1.0),
        }
    }
}

/// An Ising model together with the factor `beta` by which its coefficients
/// are divided to fit a device.
#[derive(Clone, Debug)]
pub struct ScaledIsing {
    pub base: IsingModel,
    pub beta: f64,
}

impl ScaledIsing {
    /// Coefficients and offset divided by `beta`.
    pub fn scaled(&self) -> IsingModel {
        let b = self.beta;
        IsingModel {
            h: self.base.h.iter().map(|v| v / b).collect(),
            j: self.base.j.iter().map(|(&k, v)| (k, v / b)).collect(),
            offset: self.base.offset / b,
        }
    }
}

/// Uniform scaling with the smallest `beta >= 1` that places every linear
/// and coupling coefficient inside the device ranges. Scaling by a positive
/// factor leaves the minimizers unchanged.
pub fn scale_to_device(m: &IsingModel, ranges: &DeviceRanges) -> Result<ScaledIsing> {
    ranges.h.validate("h")?;
    ranges.j.validate("J")?;
    let mut beta: f64 = 1.0;
    for &v in &m.h {
        beta = beta.max(ranges.h.required_divisor(v));
    }
    for &v in m.j.values() {
        beta = beta.max(ranges.j.required_divisor(v));
    }
    if !beta.is_finite() {
        return Err(Error::contract("Ising coefficients must be finite"));
    }
    Ok(ScaledIsing {
        base: m.clone(),
        beta,
    })
}

/// Standard deviations of the additive Gaussian control errors on the
/// linear and coupling coefficients.
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IceNoise {
    pub sigma_h: f64,
    pub sigma_j: f64,
}

impl IceNoise {
    pub fn is_zero(&self) -> bool {
        self.sigma_h == 0.0 && self.sigma_j == 0.0
    }
}

/// Adds independent `N(0, sigma²)` noise to every `h_i` and every coupling
/// already present. Draws happen in index order (all `h`, then couplings by
/// key) so a seeded generator gives reproducible models.
pub fn perturb<R: Rng + ?Sized>(m: &IsingModel, noise: &IceNoise, rng: &mut R) -> Result<IsingModel> {
    let normal = |s: f64| {
        Normal::new(0.0, s).map_err(|_| Error::contract(format!("invalid noise level {s}")))
    };
    let nh = normal(noise.sigma_h)?;
    let nj = normal(noise.sigma_j)?;
    let mut out = m.clone();
    if noise.sigma_h > 0.0 {
        for h in &mut out.h {
            *h += nh.sample(rng);
        }
    }
    if noise.sigma_j > 0.0 {
        for v in out.j.values_mut() {
            *v += nj.sample(rng);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn out_of_range_field_is_halved() {
        let mut m = IsingModel::new(1);
        m.h[0] = 2.0;
        let ranges = DeviceRanges {
            h: CoefficientRange::symmetric(1.0),
            j: CoefficientRange::symmetric(1.0),
        };
        let s = scale_to_device(&m, &ranges).unwrap();
        assert_eq!(s.beta, 2.0);
        assert_eq!(s.scaled().h, vec![1.0]);
    }

    #[test]
    fn in_range_model_is_untouched() {
        let mut m = IsingModel::new(2);
        m.h = vec![0.5, -3.0];
        m.add_coupling(0, 1, 0.9).unwrap();
        let s = scale_to_device(&m, &DeviceRanges::default()).unwrap();
        assert_eq!(s.beta, 1.0);
    }

    #[test]
    fn asymmetric_range_uses_matching_bound() {
        let mut m = IsingModel::new(1);
        m.h[0] = -3.0;
        let ranges = DeviceRanges {
            h: CoefficientRange { lo: -1.0, hi: 4.0 },
            j: CoefficientRange::symmetric(1.0),
        };
        assert_eq!(scale_to_device(&m, &ranges).unwrap().beta, 3.0);
    }

    #[test]
    fn zero_noise_is_identity_and_seeded_noise_repeats() {
        let mut m = IsingModel::new(3);
        m.h = vec![0.1, 0.2, 0.3];
        m.add_coupling(0, 2, -0.4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(perturb(&m, &IceNoise::default(), &mut rng).unwrap(), m);
        let noise = IceNoise {
            sigma_h: 0.1,
            sigma_j: 0.1,
        };
        let a = perturb(&m, &noise, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let b = perturb(&m, &noise, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, m);
        assert_eq!(a.j.len(), 1);
    }
}
