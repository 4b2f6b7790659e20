//! Axial rod discretized with linear two-node elements.
//!
//! Nodes are numbered `0..=n_e` from left to right; element `e` joins nodes
//! `e` and `e + 1`. Forces are positive in tension and loads act in the
//! `+x` direction, so the static internal force satisfies
//! `F_{e+1} - F_e + w_e = 0` with `w_e` the total element load.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

mod energy;
mod reference;

pub use energy::{
    complementary_energy, complementary_energy_polynomial, equilibrium_residual,
    potential_energy, potential_energy_polynomial, ComplementaryModel,
};
pub use reference::{
    analytic_piston_displacement, analytic_selfweight_force, compliance, h1_norm,
    h1_relative_error, optimal_design, solve_displacement,
};

/// Cross-section of one element: fixed, or one of two candidates selected by
/// a design bit (`false` picks the first).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AreaSpec {
    Fixed(f64),
    Choice([f64; 2]),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RodModel {
    pub element_lengths: Vec<f64>,
    pub areas: Vec<AreaSpec>,
    pub youngs_modulus: Vec<f64>,
    /// Load per unit volume; element `e` carries `specific_weight · A_e` per
    /// unit length.
    pub specific_weight: f64,
    /// Additional load per unit length, per element.
    pub distributed_load: Vec<f64>,
    pub point_loads: BTreeMap<usize, f64>,
    /// Prescribed nodal coefficients: displacements in the potential-energy
    /// setting, forces in the complementary-energy setting.
    pub prescribed: BTreeMap<usize, f64>,
}

impl RodModel {
    /// Unloaded rod of `num_elements` equal elements with one fixed area.
    pub fn uniform(num_elements: usize, length: f64, area: f64, youngs_modulus: f64) -> Self {
        let n = num_elements;
        Self {
            element_lengths: vec![length / n as f64; n],
            areas: vec![AreaSpec::Fixed(area); n],
            youngs_modulus: vec![youngs_modulus; n],
            specific_weight: 0.0,
            distributed_load: vec![0.0; n],
            point_loads: BTreeMap::new(),
            prescribed: BTreeMap::new(),
        }
    }

    pub fn num_elements(&self) -> usize {
        self.element_lengths.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.num_elements() + 1
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_elements();
        if n == 0 {
            return Err(Error::InvalidRod("rod needs at least one element".into()));
        }
        if self.areas.len() != n || self.youngs_modulus.len() != n || self.distributed_load.len() != n {
            return Err(Error::InvalidRod(format!(
                "per-element data must have {n} entries"
            )));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !self.element_lengths.iter().all(|&l| positive(l)) {
            return Err(Error::InvalidRod("element lengths must be positive".into()));
        }
        if !self.youngs_modulus.iter().all(|&e| positive(e)) {
            return Err(Error::InvalidRod("Young's moduli must be positive".into()));
        }
        for a in &self.areas {
            let ok = match *a {
                AreaSpec::Fixed(v) => positive(v),
                AreaSpec::Choice([a1, a2]) => positive(a1) && positive(a2),
            };
            if !ok {
                return Err(Error::InvalidRod("areas must be positive".into()));
            }
        }
        if !self.specific_weight.is_finite() || !self.distributed_load.iter().all(|q| q.is_finite()) {
            return Err(Error::InvalidRod("loads must be finite".into()));
        }
        for &node in self.point_loads.keys().chain(self.prescribed.keys()) {
            if node > n {
                return Err(Error::InvalidRod(format!(
                    "node {node} out of range for {n} elements"
                )));
            }
        }
        Ok(())
    }

    /// Nodes whose coefficient is unknown, ascending.
    pub fn free_nodes(&self) -> Vec<usize> {
        (0..self.num_nodes())
            .filter(|i| !self.prescribed.contains_key(i))
            .collect()
    }

    /// Elements whose area is a design choice, ascending.
    pub fn design_elements(&self) -> Vec<usize> {
        self.areas
            .iter()
            .enumerate()
            .filter(|(_, a)| matches!(a, AreaSpec::Choice(_)))
            .map(|(e, _)| e)
            .collect()
    }

    pub fn has_design_choices(&self) -> bool {
        !self.design_elements().is_empty()
    }

    /// Resolves areas from one bit per design element.
    pub fn resolve_design(&self, bits: &[bool]) -> Result<DesignAssignment> {
        let design = self.design_elements();
        if bits.len() != design.len() {
            return Err(Error::LengthMismatch {
                expected: design.len(),
                actual: bits.len(),
            });
        }
        let mut next = bits.iter();
        let (choices, areas) = self
            .areas
            .iter()
            .map(|a| match *a {
                AreaSpec::Fixed(v) => (None, v),
                AreaSpec::Choice(c) => {
                    let b = *next.next().expect("length checked");
                    (Some(b), c[usize::from(b)])
                }
            })
            .unzip();
        Ok(DesignAssignment { choices, areas })
    }

    /// Every design, ordered by the binary number of its bits (first design
    /// element least significant).
    pub fn all_designs(&self) -> Result<Vec<DesignAssignment>> {
        let m = self.design_elements().len();
        if m > 20 {
            return Err(Error::contract(format!("refusing to enumerate 2^{m} designs")));
        }
        (0..1u32 << m)
            .map(|s| {
                let bits: Vec<bool> = (0..m).map(|i| s >> i & 1 == 1).collect();
                self.resolve_design(&bits)
            })
            .collect()
    }

    /// The design when every area is fixed.
    pub fn fixed_design(&self) -> Result<DesignAssignment> {
        if self.has_design_choices() {
            return Err(Error::InvalidRod("rod has unresolved design choices".into()));
        }
        self.resolve_design(&[])
    }

    /// Total axial load on element `e` for the given area.
    pub fn element_load(&self, e: usize, area: f64) -> f64 {
        (self.specific_weight * area + self.distributed_load[e]) * self.element_lengths[e]
    }

    pub fn node_positions(&self) -> Vec<f64> {
        let mut x = vec![0.0];
        for l in &self.element_lengths {
            x.push(x.last().unwrap() + l);
        }
        x
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DesignAssignment {
    /// Selected candidate per element; `None` for fixed areas.
    pub choices: Vec<Option<bool>>,
    pub areas: Vec<f64>,
}

impl DesignAssignment {
    pub fn bits(&self) -> Vec<bool> {
        self.choices.iter().flatten().copied().collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Displacement,
    Force,
}

/// Piecewise-linear field given by its nodal coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSolution {
    pub kind: FieldKind,
    pub coeffs: Vec<f64>,
    pub element_lengths: Vec<f64>,
}

impl FieldSolution {
    pub fn new(kind: FieldKind, coeffs: Vec<f64>, element_lengths: Vec<f64>) -> Result<Self> {
        if coeffs.len() != element_lengths.len() + 1 {
            return Err(Error::LengthMismatch {
                expected: element_lengths.len() + 1,
                actual: coeffs.len(),
            });
        }
        Ok(Self {
            kind,
            coeffs,
            element_lengths,
        })
    }

    /// Assembles nodal values from prescribed entries and values for the
    /// free nodes (in ascending node order).
    pub fn from_free(rod: &RodModel, kind: FieldKind, free_values: &[f64]) -> Result<Self> {
        let free = rod.free_nodes();
        if free_values.len() != free.len() {
            return Err(Error::LengthMismatch {
                expected: free.len(),
                actual: free_values.len(),
            });
        }
        let mut coeffs = vec![0.0; rod.num_nodes()];
        for (&node, &v) in &rod.prescribed {
            coeffs[node] = v;
        }
        for (&node, &v) in free.iter().zip(free_values) {
            coeffs[node] = v;
        }
        Self::new(kind, coeffs, rod.element_lengths.clone())
    }
}
