use crate::encoding::EncodingSet;
use crate::error::{Error, Result};
use crate::model::BinaryPolynomial;

use super::{AreaSpec, DesignAssignment, FieldKind, FieldSolution, RodModel};

fn check_encodings(rod: &RodModel, enc: &EncodingSet) -> Result<Vec<usize>> {
    let free = rod.free_nodes();
    if enc.len() != free.len() {
        return Err(Error::MissingEncoding(format!(
            "{} free nodes but {} encoded variables",
            free.len(),
            enc.len()
        )));
    }
    Ok(free)
}

/// Polynomial for every nodal coefficient: constants at prescribed nodes,
/// encoding expansions elsewhere.
fn nodal_polynomials(rod: &RodModel, enc: &EncodingSet, num_vars: usize) -> Result<Vec<BinaryPolynomial>> {
    let free = check_encodings(rod, enc)?;
    let mut nodes: Vec<BinaryPolynomial> = (0..rod.num_nodes())
        .map(|i| BinaryPolynomial::constant(num_vars, rod.prescribed.get(&i).copied().unwrap_or(0.0)))
        .collect();
    for (k, &node) in free.iter().enumerate() {
        nodes[node] = enc.expansion(k, num_vars);
    }
    Ok(nodes)
}

/// Potential energy `Π = Σ_e (E A / 2L)(a_{e+1} - a_e)² - Σ_e w_e (a_e + a_{e+1})/2 - Σ_j P_j a_j`
/// over the bits of the free nodal displacements.
pub fn potential_energy_polynomial(rod: &RodModel, enc: &EncodingSet) -> Result<BinaryPolynomial> {
    rod.validate()?;
    let design = rod.fixed_design()?;
    let nv = enc.total_bits();
    let a = nodal_polynomials(rod, enc, nv)?;
    let mut pi = BinaryPolynomial::new(nv);
    for e in 0..rod.num_elements() {
        let stiffness = rod.youngs_modulus[e] * design.areas[e] / rod.element_lengths[e];
        let mut diff = a[e + 1].clone();
        diff.add_scaled(&a[e], -1.0);
        pi.add_scaled(&diff.try_mul(&diff)?, stiffness / 2.0);
        let w = rod.element_load(e, design.areas[e]);
        pi.add_scaled(&a[e], -w / 2.0);
        pi.add_scaled(&a[e + 1], -w / 2.0);
    }
    for (&node, &p) in &rod.point_loads {
        pi.add_scaled(&a[node], -p);
    }
    Ok(pi)
}

/// Direct evaluation of the potential energy for nodal displacements.
pub fn potential_energy(rod: &RodModel, coeffs: &[f64]) -> Result<f64> {
    rod.validate()?;
    let design = rod.fixed_design()?;
    if coeffs.len() != rod.num_nodes() {
        return Err(Error::LengthMismatch {
            expected: rod.num_nodes(),
            actual: coeffs.len(),
        });
    }
    let mut pi = 0.0;
    for e in 0..rod.num_elements() {
        let (l, area) = (rod.element_lengths[e], design.areas[e]);
        let d = coeffs[e + 1] - coeffs[e];
        pi += rod.youngs_modulus[e] * area / (2.0 * l) * d * d;
        pi -= rod.element_load(e, area) * (coeffs[e] + coeffs[e + 1]) / 2.0;
    }
    for (&node, &p) in &rod.point_loads {
        pi -= p * coeffs[node];
    }
    Ok(pi)
}

/// Penalized complementary-energy objective and its parts.
///
/// Variables are laid out as the force bits of the free nodes (as given by
/// the encoding set) followed by one bit per design element.
#[derive(Clone, Debug)]
pub struct ComplementaryModel {
    /// `U^c + λ π`.
    pub objective: BinaryPolynomial,
    pub internal_energy: BinaryPolynomial,
    pub residual: BinaryPolynomial,
    pub num_force_bits: usize,
    /// Variable index of each design element's bit.
    pub design_vars: Vec<usize>,
}

impl ComplementaryModel {
    pub fn num_vars(&self) -> usize {
        self.objective.num_vars()
    }

    pub fn design_bits(&self, bits: &[bool]) -> Vec<bool> {
        self.design_vars.iter().map(|&v| bits[v]).collect()
    }
}

/// Internal complementary energy
/// `U^c = Σ_e L_e / (6 E_e A_e) (F_e² + F_e F_{e+1} + F_{e+1}²)` plus
/// `λ Σ_e (F_{e+1} - F_e + w_e)²`.
///
/// For a design element `1/A_e` is written as `(1 - x)/A¹ + x/A²`, which
/// is exact on binary `x` and makes the energy cubic. Prescribed forces are
/// held fixed and supports have zero displacement, so no external
/// complementary work appears.
pub fn complementary_energy_polynomial(
    rod: &RodModel,
    enc: &EncodingSet,
    lambda: f64,
) -> Result<ComplementaryModel> {
    rod.validate()?;
    if rod.prescribed.is_empty() {
        return Err(Error::NoTractionNode);
    }
    if !rod.point_loads.is_empty() {
        return Err(Error::InvalidRod(
            "point loads are not supported with continuous force fields; prescribe end forces".into(),
        ));
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::contract(format!("penalty weight must be nonnegative, got {lambda}")));
    }
    let num_force_bits = enc.total_bits();
    let design_elements = rod.design_elements();
    let nv = num_force_bits + design_elements.len();
    let f = nodal_polynomials(rod, enc, nv)?;

    let mut design_vars = Vec::new();
    let mut u = BinaryPolynomial::new(nv);
    let mut pi = BinaryPolynomial::new(nv);
    for e in 0..rod.num_elements() {
        let (inv_area, area) = match rod.areas[e] {
            AreaSpec::Fixed(a) => (BinaryPolynomial::constant(nv, 1.0 / a), BinaryPolynomial::constant(nv, a)),
            AreaSpec::Choice([a1, a2]) => {
                let x = num_force_bits + design_vars.len();
                design_vars.push(x);
                (
                    BinaryPolynomial::affine(nv, 1.0 / a1, &[(x, 1.0 / a2 - 1.0 / a1)])?,
                    BinaryPolynomial::affine(nv, a1, &[(x, a2 - a1)])?,
                )
            }
        };
        let (fi, fj) = (&f[e], &f[e + 1]);
        let mut quad = fi.try_mul(fi)?;
        quad.add_scaled(&fi.try_mul(fj)?, 1.0);
        quad.add_scaled(&fj.try_mul(fj)?, 1.0);
        let l = rod.element_lengths[e];
        u.add_scaled(&inv_area.try_mul(&quad)?, l / (6.0 * rod.youngs_modulus[e]));

        let mut r = fj.clone();
        r.add_scaled(fi, -1.0);
        r.add_scaled(&area, rod.specific_weight * l);
        r.add_constant(rod.distributed_load[e] * l);
        pi.add_scaled(&r.try_mul(&r)?, 1.0);
    }
    let mut objective = u.clone();
    objective.add_scaled(&pi, lambda);
    Ok(ComplementaryModel {
        objective,
        internal_energy: u,
        residual: pi,
        num_force_bits,
        design_vars,
    })
}

fn check_nodes(rod: &RodModel, coeffs: &[f64]) -> Result<()> {
    if coeffs.len() != rod.num_nodes() {
        return Err(Error::LengthMismatch {
            expected: rod.num_nodes(),
            actual: coeffs.len(),
        });
    }
    Ok(())
}

/// Internal complementary energy of nodal forces under a resolved design.
pub fn complementary_energy(rod: &RodModel, design: &DesignAssignment, coeffs: &[f64]) -> Result<f64> {
    check_nodes(rod, coeffs)?;
    Ok((0..rod.num_elements())
        .map(|e| {
            let (a, b) = (coeffs[e], coeffs[e + 1]);
            rod.element_lengths[e] / (6.0 * rod.youngs_modulus[e] * design.areas[e]) * (a * a + a * b + b * b)
        })
        .sum())
}

/// `Σ_e (F_{e+1} - F_e + w_e)²`; zero iff the force field is in equilibrium
/// with the element loads.
pub fn equilibrium_residual(sol: &FieldSolution, rod: &RodModel, design: &DesignAssignment) -> Result<f64> {
    if sol.kind != FieldKind::Force {
        return Err(Error::WrongFieldKind { expected: "force" });
    }
    check_nodes(rod, &sol.coeffs)?;
    let a = &sol.coeffs;
    Ok((0..rod.num_elements())
        .map(|e| {
            let r = a[e + 1] - a[e] + rod.element_load(e, design.areas[e]);
            r * r
        })
        .sum())
}
