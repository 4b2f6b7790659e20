//! Fixed-point binary encodings `y = τ + λ Σ_l c_l x_l` and the adaptive
//! range update that re-centres them between iterations.

use crate::error::{Error, Result};
use crate::model::BinaryPolynomial;

/// Largest bit count for which [`VariableEncoding::representable_values`]
/// will enumerate.
pub const MAX_ENUMERATED_BITS: usize = 20;

/// Relative tolerance below which two decoded values count as unchanged.
pub const EQUALITY_TOLERANCE: f64 = 1e-12;

/// Relative floor on the width of an updated interval.
pub const MIN_WIDTH: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::contract(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, y: f64) -> bool {
        self.lo <= y && y <= self.hi
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariableEncoding {
    pub tau: f64,
    pub scale: f64,
    pub bit_weights: Vec<f64>,
    pub range: Interval,
}

impl VariableEncoding {
    /// Binary weights `c_l = 2^l` over `range`.
    pub fn binary(num_bits: usize, range: Interval) -> Result<Self> {
        if num_bits == 0 || num_bits > 52 {
            return Err(Error::contract(format!(
                "bits per variable must be in 1..=52, got {num_bits}"
            )));
        }
        let weights = (0..num_bits).map(|l| (1u64 << l) as f64).collect();
        Self::with_weights(weights, range)
    }

    /// General nonnegative weights; `scale` is chosen so that all-ones
    /// decodes to `range.hi`.
    pub fn with_weights(bit_weights: Vec<f64>, range: Interval) -> Result<Self> {
        if bit_weights.is_empty() {
            return Err(Error::contract("encoding needs at least one bit"));
        }
        if bit_weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::contract("bit weights must be positive"));
        }
        let total: f64 = bit_weights.iter().sum();
        Ok(Self {
            tau: range.lo,
            scale: range.width() / total,
            bit_weights,
            range,
        })
    }

    pub fn num_bits(&self) -> usize {
        self.bit_weights.len()
    }

    pub fn decode(&self, bits: &[bool]) -> Result<f64> {
        if bits.len() != self.num_bits() {
            return Err(Error::LengthMismatch {
                expected: self.num_bits(),
                actual: bits.len(),
            });
        }
        if bits.iter().all(|&b| b) {
            // avoid rounding away from the declared upper bound
            return Ok(self.range.hi);
        }
        let sum: f64 = self
            .bit_weights
            .iter()
            .zip(bits)
            .filter(|(_, &b)| b)
            .map(|(w, _)| w)
            .sum();
        Ok(self.tau + self.scale * sum)
    }

    pub fn representable_values(&self) -> Result<Vec<f64>> {
        let n = self.num_bits();
        if n > MAX_ENUMERATED_BITS {
            return Err(Error::contract(format!(
                "refusing to enumerate 2^{n} values (limit 2^{MAX_ENUMERATED_BITS})"
            )));
        }
        let mut values = (0..1u32 << n)
            .map(|s| {
                let bits: Vec<bool> = (0..n).map(|l| s >> l & 1 == 1).collect();
                self.decode(&bits)
            })
            .collect::<Result<Vec<_>>>()?;
        values.sort_by(f64::total_cmp);
        Ok(values)
    }

    /// Affine polynomial in bits `var_offset..var_offset + N`.
    pub fn symbolic_expansion(&self, var_offset: usize) -> BinaryPolynomial {
        let linear: Vec<(usize, f64)> = self
            .bit_weights
            .iter()
            .enumerate()
            .map(|(l, w)| (var_offset + l, self.scale * w))
            .collect();
        BinaryPolynomial::affine(var_offset + self.num_bits(), self.tau, &linear)
            .expect("indices are in range by construction")
    }
}

/// Several variables encoded back to back in one bit vector.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodingSet {
    encodings: Vec<VariableEncoding>,
    offsets: Vec<usize>,
}

impl EncodingSet {
    pub fn binary(ranges: &[Interval], num_bits: usize) -> Result<Self> {
        let encodings = ranges
            .iter()
            .map(|&r| VariableEncoding::binary(num_bits, r))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(encodings))
    }

    pub fn new(encodings: Vec<VariableEncoding>) -> Self {
        let mut offsets = Vec::with_capacity(encodings.len());
        let mut acc = 0;
        for e in &encodings {
            offsets.push(acc);
            acc += e.num_bits();
        }
        Self { encodings, offsets }
    }

    pub fn len(&self) -> usize {
        self.encodings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.encodings.is_empty()
    }

    pub fn encodings(&self) -> &[VariableEncoding] {
        &self.encodings
    }

    pub fn ranges(&self) -> Vec<Interval> {
        self.encodings.iter().map(|e| e.range).collect()
    }

    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub fn total_bits(&self) -> usize {
        self.encodings.iter().map(VariableEncoding::num_bits).sum()
    }

    pub fn bits_of<'a>(&self, i: usize, bits: &'a [bool]) -> &'a [bool] {
        let start = self.offsets[i];
        &bits[start..start + self.encodings[i].num_bits()]
    }

    /// Decodes every variable from the leading `total_bits()` entries of
    /// `bits`; trailing entries (design or auxiliary bits) are ignored.
    pub fn decode_all(&self, bits: &[bool]) -> Result<Vec<f64>> {
        if bits.len() < self.total_bits() {
            return Err(Error::LengthMismatch {
                expected: self.total_bits(),
                actual: bits.len(),
            });
        }
        (0..self.len())
            .map(|i| self.encodings[i].decode(self.bits_of(i, bits)))
            .collect()
    }

    /// Expansion of variable `i` as a polynomial over `num_vars` bits.
    pub fn expansion(&self, i: usize, num_vars: usize) -> BinaryPolynomial {
        let mut p = self.encodings[i].symbolic_expansion(self.offsets[i]);
        p.ensure_num_vars(num_vars);
        p
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Saturation {
    None,
    AllZero,
    AllOne,
}

pub fn detect_saturation(bits: &[bool]) -> Result<Saturation> {
    if bits.is_empty() {
        return Err(Error::contract("cannot classify an empty bit vector"));
    }
    Ok(if bits.iter().all(|&b| !b) {
        Saturation::AllZero
    } else if bits.iter().all(|&b| b) {
        Saturation::AllOne
    } else {
        Saturation::None
    })
}

/// Which contraction case fired.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Contraction {
    Decreased,
    Increased,
    Unchanged,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RangeUpdate {
    pub range: Interval,
    pub contraction: Contraction,
    pub saturation: Saturation,
}

/// Updates one variable's range from its last two decoded values.
///
/// `y_last` is the most recent value (decoded with `bits_last` in `range`)
/// and `y_before` the one preceding it. The interval is first contracted
/// towards the direction of motion, then widened by a quarter of the old
/// width on the side where the last sample saturated.
pub fn update_range(
    range: Interval,
    y_last: f64,
    y_before: f64,
    bits_last: &[bool],
    rho: f64,
) -> Result<RangeUpdate> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::contract(format!("relaxation must be in (0, 1], got {rho}")));
    }
    let saturation = detect_saturation(bits_last)?;
    let width = range.width();
    let d_min = y_last - range.lo;
    let d_max = range.hi - y_last;
    let (mut lo, mut hi) = (range.lo, range.hi);

    let tol = EQUALITY_TOLERANCE * y_last.abs().max(y_before.abs()).max(1.0);
    let contraction = if (y_last - y_before).abs() <= tol {
        lo = y_last - rho * width / 4.0;
        hi = y_last + rho * width / 4.0;
        Contraction::Unchanged
    } else if y_last < y_before {
        hi -= rho * d_max;
        Contraction::Decreased
    } else {
        lo += rho * d_min;
        Contraction::Increased
    };

    let floor = MIN_WIDTH * y_last.abs().max(1.0);
    if hi - lo < floor {
        lo = y_last - floor / 2.0;
        hi = y_last + floor / 2.0;
    }

    match saturation {
        Saturation::AllZero => lo -= width / 4.0,
        Saturation::AllOne => hi += width / 4.0,
        Saturation::None => {}
    }
    Ok(RangeUpdate {
        range: Interval { lo, hi },
        contraction,
        saturation,
    })
}

/// Decoded value and bit pattern of one variable at one iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub value: f64,
    pub bits: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariableHistory {
    pub range: Interval,
    /// Most recent sample first.
    pub recent: Vec<Sample>,
}

/// Ranges and the two most recent samples of every encoded variable.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptiveState {
    pub rho: f64,
    pub iteration: usize,
    pub variables: Vec<VariableHistory>,
}

impl AdaptiveState {
    pub fn new(ranges: &[Interval], rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::contract(format!("relaxation must be in (0, 1], got {rho}")));
        }
        Ok(Self {
            rho,
            iteration: 0,
            variables: ranges
                .iter()
                .map(|&range| VariableHistory {
                    range,
                    recent: Vec::new(),
                })
                .collect(),
        })
    }

    pub fn ranges(&self) -> Vec<Interval> {
        self.variables.iter().map(|v| v.range).collect()
    }

    /// Stores one iteration's samples, keeping the last two per variable.
    pub fn record(&mut self, samples: Vec<Sample>) -> Result<()> {
        if samples.len() != self.variables.len() {
            return Err(Error::LengthMismatch {
                expected: self.variables.len(),
                actual: samples.len(),
            });
        }
        for (v, s) in self.variables.iter_mut().zip(samples) {
            v.recent.insert(0, s);
            v.recent.truncate(2);
        }
        self.iteration += 1;
        Ok(())
    }

    pub fn ready(&self) -> bool {
        self.variables.iter().all(|v| v.recent.len() == 2)
    }

    /// Applies [`update_range`] to every variable and returns the new ranges.
    pub fn update(&mut self) -> Result<Vec<RangeUpdate>> {
        let mut out = Vec::with_capacity(self.variables.len());
        for (i, v) in self.variables.iter().enumerate() {
            let [last, before] = v.recent.as_slice() else {
                return Err(Error::MissingHistory(i));
            };
            out.push(update_range(v.range, last.value, before.value, &last.bits, self.rho)?);
        }
        for (v, u) in self.variables.iter_mut().zip(&out) {
            v.range = u.range;
        }
        Ok(out)
    }
}

/// Functional form of [`AdaptiveState::update`].
pub fn adaptive_update(state: &AdaptiveState) -> Result<Vec<Interval>> {
    let mut next = state.clone();
    Ok(next.update()?.into_iter().map(|u| u.range).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn two_bit_values() {
        let e = VariableEncoding::binary(2, unit()).unwrap();
        assert_eq!(e.decode(&[true, false]).unwrap(), 1.0 / 3.0);
        assert_eq!(e.decode(&[false, true]).unwrap(), 2.0 / 3.0);
        assert_eq!(e.representable_values().unwrap(), vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]);
    }

    #[test]
    fn three_bit_decode() {
        let e = VariableEncoding::binary(3, unit()).unwrap();
        assert!((e.decode(&[true, false, true]).unwrap() - 5.0 / 7.0).abs() < 1e-15);
        assert!(e.decode(&[true]).is_err());
    }

    #[test]
    fn expansion_coefficients() {
        let e = VariableEncoding::binary(2, unit()).unwrap();
        let p = e.symbolic_expansion(0);
        assert_eq!(p.coefficient(&[0]), 1.0 / 3.0);
        assert_eq!(p.coefficient(&[1]), 2.0 / 3.0);
        assert_eq!(p.constant_term(), 0.0);
    }

    #[test]
    fn update_examples() {
        let r = update_range(unit(), 0.6, 0.8, &[true, false, true], 1.0).unwrap();
        assert_eq!(r.range, Interval { lo: 0.0, hi: 0.6 });

        let r = update_range(unit(), 0.5, 0.5, &[true, false, true], 1.0).unwrap();
        assert_eq!(r.range, Interval { lo: 0.25, hi: 0.75 });

        let r = update_range(unit(), 1.0, 0.5, &[true, true, true], 0.5).unwrap();
        assert_eq!(r.contraction, Contraction::Increased);
        assert_eq!(r.range, Interval { lo: 0.5, hi: 1.25 });
    }

    #[test]
    fn saturation_classes() {
        assert_eq!(detect_saturation(&[false; 3]).unwrap(), Saturation::AllZero);
        assert_eq!(detect_saturation(&[true; 3]).unwrap(), Saturation::AllOne);
        assert_eq!(detect_saturation(&[true, false, true]).unwrap(), Saturation::None);
        assert!(detect_saturation(&[]).is_err());
    }

    #[test]
    fn update_needs_two_samples() {
        let mut s = AdaptiveState::new(&[unit()], 0.5).unwrap();
        s.record(vec![Sample { value: 0.5, bits: vec![true, false] }]).unwrap();
        assert!(!s.ready());
        assert!(matches!(s.update(), Err(Error::MissingHistory(0))));
        s.record(vec![Sample { value: 0.2, bits: vec![false, true] }]).unwrap();
        let ranges = adaptive_update(&s).unwrap();
        assert_eq!(ranges, vec![Interval { lo: 0.0, hi: 0.6 }]);
    }

    #[test]
    fn collapse_is_clamped() {
        let r = update_range(unit(), 1.0, 0.0, &[true, false], 1.0).unwrap();
        assert!(r.range.width() > 0.0);
        assert!(r.range.contains(1.0));
    }
}
