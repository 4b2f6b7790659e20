use crate::error::{Error, Result};

use super::{energy::complementary_energy, DesignAssignment, FieldKind, FieldSolution, RodModel};

fn h1_norm_sq(lengths: &[f64], a: &[f64]) -> f64 {
    lengths
        .iter()
        .enumerate()
        .map(|(e, &l)| {
            let (g0, g1) = (a[e], a[e + 1]);
            l / 3.0 * (g0 * g0 + g0 * g1 + g1 * g1) + (g1 - g0) * (g1 - g0) / l
        })
        .sum()
}

/// Exact H¹ norm of a piecewise-linear field.
pub fn h1_norm(f: &FieldSolution) -> f64 {
    h1_norm_sq(&f.element_lengths, &f.coeffs).sqrt()
}

/// `‖f - f*‖_H¹ / ‖f*‖_H¹` on a shared grid.
pub fn h1_relative_error(f: &FieldSolution, reference: &FieldSolution) -> Result<f64> {
    if f.kind != reference.kind {
        return Err(Error::WrongFieldKind {
            expected: match reference.kind {
                FieldKind::Displacement => "displacement",
                FieldKind::Force => "force",
            },
        });
    }
    if f.element_lengths != reference.element_lengths {
        return Err(Error::contract("fields live on different grids"));
    }
    let denom = h1_norm_sq(&reference.element_lengths, &reference.coeffs);
    if denom == 0.0 {
        return Err(Error::ZeroNormReference);
    }
    let diff: Vec<f64> = f.coeffs.iter().zip(&reference.coeffs).map(|(a, b)| a - b).collect();
    Ok((h1_norm_sq(&f.element_lengths, &diff) / denom).sqrt())
}

/// Displacement of a rod fixed (`u = 0`) at its last node and loaded by the
/// end force `pressure · fluid_area` at node 0 in `+x`.
pub fn analytic_piston_displacement(rod: &RodModel, pressure: f64, fluid_area: f64) -> Result<FieldSolution> {
    rod.validate()?;
    let design = rod.fixed_design()?;
    let force = pressure * fluid_area;
    let n = rod.num_elements();
    let mut coeffs = vec![0.0; n + 1];
    // the rod carries -force everywhere; each element shortens by force·L/(EA)
    for e in (0..n).rev() {
        coeffs[e] = coeffs[e + 1] + force * rod.element_lengths[e] / (rod.youngs_modulus[e] * design.areas[e]);
    }
    FieldSolution::new(FieldKind::Displacement, coeffs, rod.element_lengths.clone())
}

/// Static force from accumulating element loads away from the single
/// prescribed force node.
pub fn analytic_selfweight_force(rod: &RodModel, design: &DesignAssignment) -> Result<FieldSolution> {
    rod.validate()?;
    if design.areas.len() != rod.num_elements() {
        return Err(Error::LengthMismatch {
            expected: rod.num_elements(),
            actual: design.areas.len(),
        });
    }
    let mut prescribed = rod.prescribed.iter();
    let (&start, &value) = prescribed.next().ok_or(Error::NoTractionNode)?;
    if prescribed.next().is_some() {
        return Err(Error::InvalidRod(
            "analytic force field needs exactly one prescribed force node".into(),
        ));
    }
    let n = rod.num_elements();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[start] = value;
    for e in (0..start).rev() {
        coeffs[e] = coeffs[e + 1] + rod.element_load(e, design.areas[e]);
    }
    for e in start..n {
        coeffs[e + 1] = coeffs[e] - rod.element_load(e, design.areas[e]);
    }
    FieldSolution::new(FieldKind::Force, coeffs, rod.element_lengths.clone())
}

/// Complementary energy at the static force field of `design`.
pub fn compliance(rod: &RodModel, design: &DesignAssignment) -> Result<f64> {
    let f = analytic_selfweight_force(rod, design)?;
    complementary_energy(rod, design, &f.coeffs)
}

/// Design of least compliance by enumeration; ties go to the first design
/// in [`RodModel::all_designs`] order. Returns the design and its compliance.
pub fn optimal_design(rod: &RodModel) -> Result<(DesignAssignment, f64)> {
    let mut best: Option<(DesignAssignment, f64)> = None;
    for d in rod.all_designs()? {
        let c = compliance(rod, &d)?;
        if best.as_ref().is_none_or(|(_, b)| c < *b) {
            best = Some((d, c));
        }
    }
    Ok(best.expect("at least one design"))
}

/// Classical finite-element displacement solve with prescribed nodal
/// displacements.
pub fn solve_displacement(rod: &RodModel) -> Result<FieldSolution> {
    rod.validate()?;
    if rod.prescribed.is_empty() {
        return Err(Error::InvalidRod("displacement solve needs a support".into()));
    }
    let design = rod.fixed_design()?;
    let n = rod.num_nodes();
    let mut k = vec![0.0; n * n];
    let mut f = vec![0.0; n];
    for e in 0..rod.num_elements() {
        let s = rod.youngs_modulus[e] * design.areas[e] / rod.element_lengths[e];
        k[e * n + e] += s;
        k[(e + 1) * n + e + 1] += s;
        k[e * n + e + 1] -= s;
        k[(e + 1) * n + e] -= s;
        let w = rod.element_load(e, design.areas[e]);
        f[e] += w / 2.0;
        f[e + 1] += w / 2.0;
    }
    for (&node, &p) in &rod.point_loads {
        f[node] += p;
    }
    let free = rod.free_nodes();
    let m = free.len();
    // reduced system K_ff a_f = f_f - K_fp a_p, solved by Gaussian elimination
    let mut a = vec![0.0; m * m];
    let mut b = vec![0.0; m];
    for (r, &i) in free.iter().enumerate() {
        b[r] = f[i] - rod.prescribed.iter().map(|(&j, &v)| k[i * n + j] * v).sum::<f64>();
        for (c, &j) in free.iter().enumerate() {
            a[r * m + c] = k[i * n + j];
        }
    }
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&x, &y| a[x * m + col].abs().total_cmp(&a[y * m + col].abs()))
            .expect("nonempty range");
        if a[pivot * m + col] == 0.0 {
            return Err(Error::InvalidRod("singular stiffness matrix".into()));
        }
        for c in 0..m {
            a.swap(col * m + c, pivot * m + c);
        }
        b.swap(col, pivot);
        for r in col + 1..m {
            let factor = a[r * m + col] / a[col * m + col];
            for c in col..m {
                a[r * m + c] -= factor * a[col * m + c];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; m];
    for r in (0..m).rev() {
        let s: f64 = (r + 1..m).map(|c| a[r * m + c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r * m + r];
    }
    FieldSolution::from_free(rod, FieldKind::Displacement, &x)
}
