//! Brute-force max filtering used as a test oracle.
//!
//! Finite groups are enumerated element by element. Continuous groups are
//! scanned over a parameter grid, which yields a lower bound flagged
//! `approximate`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::filter::{argmax_within, tie_tolerance, validate, FilterResult};
use crate::group::{GroupAction, Witness};
use crate::linalg;

#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    /// Largest number of group elements the oracle will enumerate.
    pub max_elements: u128,
    /// Number of grid points per circle for continuous groups.
    pub grid_resolution: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_elements: 5_000_000, grid_resolution: 10_000 }
    }
}

pub fn brute_force_max_filter(group: &GroupAction, z: &[f64], x: &[f64]) -> Result<FilterResult> {
    brute_force_with(group, z, x, &OracleConfig::default())
}

pub fn brute_force_with(
    group: &GroupAction,
    z: &[f64],
    x: &[f64],
    config: &OracleConfig,
) -> Result<FilterResult> {
    validate(group, z, x)?;
    let too_big = |size: usize, cap: usize| -> Result<()> {
        if size > cap {
            Err(Error::EnumerationTooLarge { size: size as u128, cap: cap as u128 })
        } else {
            Ok(())
        }
    };
    match group {
        GroupAction::FullPermutation { d } => too_big(*d, 8)?,
        GroupAction::SignedPermutation { d } => too_big(*d, 6)?,
        GroupAction::SignFlips { d } => too_big(*d, 20)?,
        GroupAction::ColumnPermutation { n, .. } => too_big(*n, 8)?,
        GroupAction::PatchPermutation(spec) => {
            too_big(spec.patches().iter().map(|p| p.len()).max().unwrap_or(0), 8)?
        }
        _ => {}
    }

    let elements = if group.is_finite() {
        group.elements(config.max_elements)?
    } else {
        grid_elements(group, config.grid_resolution)?
    };
    let scores = elements
        .iter()
        .map(|g| group.apply(g, x).map(|gx| linalg::dot(z, &gx)))
        .collect::<Result<Vec<f64>>>()?;
    let (value, idx) = argmax_within(&scores, tie_tolerance(z, x));
    let approximate = !group.is_finite() && !is_exact_grid(group);
    let witnesses = idx.into_iter().map(|i| elements[i].clone()).collect();
    Ok(FilterResult { value, witnesses, approximate })
}

fn is_exact_grid(group: &GroupAction) -> bool {
    matches!(
        group,
        GroupAction::FullOrthogonal { d: 1 } | GroupAction::LeftOrthogonal { k: 1, .. }
    )
}

fn unit_phases(resolution: usize) -> Vec<Complex64> {
    (0..resolution)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / resolution as f64))
        .collect()
}

/// Grid over `O(k)` for `k <= 3`: rotations and their reflections.
fn orthogonal_grid(k: usize, resolution: usize) -> Result<Vec<Vec<f64>>> {
    match k {
        1 => Ok(vec![vec![1.0], vec![-1.0]]),
        2 => {
            let mut out = Vec::with_capacity(2 * resolution);
            for j in 0..resolution {
                let t = 2.0 * PI * j as f64 / resolution as f64;
                let (s, c) = t.sin_cos();
                out.push(vec![c, -s, s, c]);
                out.push(vec![c, s, s, -c]);
            }
            Ok(out)
        }
        3 => {
            let m = (resolution as f64).cbrt().ceil().max(4.0) as usize;
            let rot = |axis: usize, t: f64| -> Vec<f64> {
                let (s, c) = t.sin_cos();
                match axis {
                    0 => vec![1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c],
                    1 => vec![c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c],
                    _ => vec![c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0],
                }
            };
            let mut out = Vec::with_capacity(2 * m * m * m);
            for a in 0..m {
                for b in 0..=m {
                    for c in 0..m {
                        let alpha = 2.0 * PI * a as f64 / m as f64;
                        let beta = PI * b as f64 / m as f64;
                        let gamma = 2.0 * PI * c as f64 / m as f64;
                        let r = linalg::mat_mul(
                            &linalg::mat_mul(&rot(2, alpha), &rot(1, beta), 3),
                            &rot(2, gamma),
                            3,
                        );
                        out.push(linalg::scale(&r, -1.0));
                        out.push(r);
                    }
                }
            }
            Ok(out)
        }
        _ => Err(Error::Unsupported(format!("orthogonal grid in dimension {k}"))),
    }
}

fn grid_elements(group: &GroupAction, resolution: usize) -> Result<Vec<Witness>> {
    let resolution = resolution.max(1);
    Ok(match group {
        GroupAction::PhaseCircle { .. } => {
            unit_phases(resolution).into_iter().map(Witness::Phase).collect()
        }
        GroupAction::ShiftAndConjugate { n } => {
            let phases = unit_phases(resolution);
            let mut out = Vec::with_capacity(2 * n * resolution);
            for shift in 0..*n {
                for conjugate in [false, true] {
                    for &phase in &phases {
                        out.push(Witness::ShiftConjugate { shift, conjugate, phase });
                    }
                }
            }
            out
        }
        GroupAction::FullOrthogonal { d: dim } | GroupAction::LeftOrthogonal { k: dim, .. } => {
            orthogonal_grid(*dim, resolution)?
                .into_iter()
                .map(|matrix| Witness::Orthogonal { dim: *dim, matrix })
                .collect()
        }
        _ => unreachable!("finite kinds are enumerated"),
    })
}
