//! The max filtering map, the quotient metric and filter banks.

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_len, Error, Result};
use crate::group::{GroupAction, Witness};
use crate::groups;
use crate::linalg;
use crate::templates::Template;

/// Value of `max_{g in G} <z, g x>` and the elements attaining it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterResult {
    pub value: f64,
    /// Elements `g` with `|<z, g x> - value| <= tie_tolerance`.
    pub witnesses: Vec<Witness>,
    /// Set when the value is a grid lower bound rather than the exact maximum.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub approximate: bool,
}

impl FilterResult {
    pub(crate) fn exact(value: f64, witnesses: Vec<Witness>) -> Self {
        FilterResult { value, witnesses, approximate: false }
    }
}

/// Witness tie tolerance `1e-9 * (1 + |z| |x|)`.
pub fn tie_tolerance(z: &[f64], x: &[f64]) -> f64 {
    1e-9 * (1.0 + linalg::norm(z) * linalg::norm(x))
}

/// Collects every index whose score lies within `tol` of the maximum.
pub(crate) fn argmax_within(scores: &[f64], tol: f64) -> (f64, Vec<usize>) {
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let idx = scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| s >= best - tol)
        .map(|(i, _)| i)
        .collect();
    (best, idx)
}

pub(crate) fn validate(group: &GroupAction, z: &[f64], x: &[f64]) -> Result<()> {
    check_len(group.dim(), z.len())?;
    check_len(group.dim(), x.len())?;
    check_finite("template", z)?;
    check_finite("signal", x)?;
    Ok(())
}

/// `max_{g in G} <z, g x>` computed by the group's specialized algorithm.
pub fn max_filter(group: &GroupAction, z: &[f64], x: &[f64]) -> Result<FilterResult> {
    validate(group, z, x)?;
    match group {
        GroupAction::Enumerated(g) => {
            let d = g.dim();
            let scores: Vec<f64> = g
                .matrices()
                .iter()
                .map(|m| linalg::dot(z, &linalg::mat_vec(m, d, d, x)))
                .collect();
            let (value, idx) = argmax_within(&scores, tie_tolerance(z, x));
            Ok(FilterResult::exact(value, idx.into_iter().map(Witness::Element).collect()))
        }
        GroupAction::CyclicShift { .. } => groups::cyclic::mf_cyclic(z, x, true),
        GroupAction::FullPermutation { .. } => groups::sorting::mf_sort_permutation(z, x),
        GroupAction::SignedPermutation { .. } => groups::sorting::mf_signed_permutation(z, x),
        GroupAction::SignFlips { .. } => groups::sorting::mf_sign_flips(z, x),
        GroupAction::FullOrthogonal { .. } => groups::orthogonal::mf_orthogonal(z, x),
        GroupAction::LeftOrthogonal { k, n } => groups::orthogonal::left_orthogonal_flat(z, x, *k, *n),
        GroupAction::ColumnPermutation { k, n } => {
            groups::assignment::column_permutation_flat(z, x, *k, *n)
        }
        GroupAction::PhaseCircle { .. } => groups::complex::phase_flat(z, x),
        GroupAction::ShiftAndConjugate { .. } => groups::complex::shift_conjugate_flat(z, x),
        GroupAction::PatchPermutation(spec) => groups::sorting::mf_patch_permutation(z, x, spec),
        GroupAction::SlidingWindowShift { channels, width, positions } => {
            groups::window::sliding_window_flat(z, x, *channels, *width, *positions)
        }
    }
}

/// Quotient distance `d([x],[y]) = min_g |x - g y|`, via
/// `|x|^2 - 2 <<[x],[y]>> + |y|^2` clamped at zero.
pub fn quotient_distance(group: &GroupAction, x: &[f64], y: &[f64]) -> Result<f64> {
    let m = max_filter(group, x, y)?.value;
    let sq = linalg::norm_sq(x) - 2.0 * m + linalg::norm_sq(y);
    Ok(sq.max(0.0).sqrt())
}

/// Feature vector whose entry `i` is the max filter of `bank[i]` against `x`.
pub fn filter_bank_apply(group: &GroupAction, bank: &[Template], x: &[f64]) -> Result<Vec<f64>> {
    if bank.is_empty() {
        return Err(Error::InvalidInput("empty filter bank".into()));
    }
    for t in bank {
        if let Some(kind) = t.group_kind {
            if kind != group.kind() {
                return Err(Error::InvalidInput(format!(
                    "template `{}` is bound to {kind:?}, not {:?}",
                    t.label,
                    group.kind()
                )));
            }
        }
    }
    bank.iter()
        .map(|t| max_filter(group, &t.vector, x).map(|r| r.value))
        .collect()
}

/// Filter bank over raw template vectors.
pub fn filter_bank_vectors(group: &GroupAction, bank: &[Vec<f64>], x: &[f64]) -> Result<Vec<f64>> {
    if bank.is_empty() {
        return Err(Error::InvalidInput("empty filter bank".into()));
    }
    bank.iter()
        .map(|z| max_filter(group, z, x).map(|r| r.value))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::EnumeratedGroup;

    #[test]
    fn orthogonal_gives_norm() {
        let g = GroupAction::FullOrthogonal { d: 3 };
        let r = max_filter(&g, &[0.0, 1.0, 0.0], &[1.0, 2.0, 2.0]).unwrap();
        assert!((r.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn sign_group_gives_abs() {
        let g = GroupAction::Enumerated(EnumeratedGroup::sign(2));
        let r = max_filter(&g, &[1.0, 0.0], &[-2.0, 5.0]).unwrap();
        assert_eq!(r.value, 2.0);
        assert_eq!(r.witnesses, vec![Witness::Element(1)]);
    }

    #[test]
    fn enumerated_permutations() {
        // Enumerating all six group elements by hand: <e1, Px> ranges over {3, 1, 2}.
        let g = GroupAction::Enumerated(EnumeratedGroup::permutations(3));
        let r = max_filter(&g, &[1.0, 0.0, 0.0], &[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(r.value, 3.0);
        assert_eq!(r.witnesses.len(), 2);
    }

    #[test]
    fn quotient_distance_examples() {
        let g = GroupAction::Enumerated(EnumeratedGroup::sign(1));
        assert_eq!(quotient_distance(&g, &[1.0], &[-1.0]).unwrap(), 0.0);
        let g = GroupAction::Enumerated(EnumeratedGroup::permutations(3));
        let x = [1.0, 2.0, 3.0];
        assert_eq!(quotient_distance(&g, &x, &[3.0, 1.0, 2.0]).unwrap(), 0.0);
        assert!((quotient_distance(&g, &x, &[0.0; 3]).unwrap() - 14f64.sqrt()).abs() < 1e-12);
        assert_eq!(quotient_distance(&g, &x, &x).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        let g = GroupAction::CyclicShift { n: 3 };
        assert!(matches!(
            max_filter(&g, &[1.0; 3], &[1.0; 4]),
            Err(Error::DimensionMismatch { expected: 3, found: 4 })
        ));
        assert!(matches!(
            max_filter(&g, &[1.0; 3], &[1.0, f64::NAN, 0.0]),
            Err(Error::NonFinite(_))
        ));
        assert!(filter_bank_apply(&g, &[], &[0.0; 3]).is_err());
    }

    #[test]
    fn bank_examples() {
        let g = GroupAction::CyclicShift { n: 4 };
        let x = [0.5, -1.0, 2.0, 0.25];
        let bank = vec![Template::new(x.to_vec(), "self")];
        let phi = filter_bank_apply(&g, &bank, &x).unwrap();
        assert!((phi[0] - linalg::norm_sq(&x)).abs() < 1e-12);
        let bound = Template::new(x.to_vec(), "bound").bind(&GroupAction::FullPermutation { d: 4 });
        assert!(filter_bank_apply(&g, &[bound], &x).is_err());
    }
}
