//! One-sided derivatives and subgradients of `x -> <<[x],[y]>>`.
//!
//! The max filter is convex in the template. Its subdifferential at `x` is
//! the convex hull of `{g y : g maximizes <x, g y>}`.

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_len, Error, Result};
use crate::filter::{max_filter, validate};
use crate::group::{GroupAction, Witness};
use crate::groups::{complex, cyclic::CyclicCorrelator, window};
use crate::linalg;

/// Group size up to which finite kinds are enumerated outright.
pub const ENUMERATION_CAP: u128 = 100_000;

/// Default witness tolerance `1e-7 (1 + |x| |y|)`.
pub fn default_tolerance(x: &[f64], y: &[f64]) -> f64 {
    1e-7 * (1.0 + linalg::norm(x) * linalg::norm(y))
}

fn within(scores: &[f64], tol: f64) -> Vec<usize> {
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0..scores.len()).filter(|&i| scores[i] >= best - tol).collect()
}

/// Elements `g` with `<x, g y> >= max - tol` (`tol` defaults to
/// [`default_tolerance`]).
///
/// Shift-type groups and finite groups of order at most
/// [`ENUMERATION_CAP`] are scanned exhaustively. Continuous groups return
/// analytic maximizers; when the maximizer set is a continuum (a zero
/// argument) a single representative is returned. Large sorting-type groups
/// return the maximizers produced by sorting, which is the full set at
/// points without ties.
pub fn witness_set(group: &GroupAction, x: &[f64], y: &[f64], tol: Option<f64>) -> Result<Vec<Witness>> {
    validate(group, x, y)?;
    let tol = tol.unwrap_or_else(|| default_tolerance(x, y));
    if !(tol >= 0.0) {
        return Err(Error::InvalidInput("negative tolerance".into()));
    }
    match group {
        GroupAction::CyclicShift { n } => {
            let scores = CyclicCorrelator::new(*n).correlate(x, y);
            Ok(within(&scores, tol).into_iter().map(Witness::Shift).collect())
        }
        GroupAction::SlidingWindowShift { channels, width, positions } => {
            let scores = window::window_scores(x, y, *channels, *width, *positions)?;
            Ok(within(&scores, tol).into_iter().map(Witness::Shift).collect())
        }
        GroupAction::ShiftAndConjugate { .. } => {
            let all = complex::shift_conjugate_candidates(x, y)?;
            let scores: Vec<f64> = all.iter().map(|t| t.2.norm()).collect();
            Ok(within(&scores, tol)
                .into_iter()
                .map(|i| {
                    let (shift, conjugate, u) = all[i];
                    Witness::ShiftConjugate { shift, conjugate, phase: complex::unit_phase(u) }
                })
                .collect())
        }
        g if g.is_finite() && g.order().is_some_and(|o| o <= ENUMERATION_CAP) => {
            let elements = g.elements(ENUMERATION_CAP)?;
            let scores = elements
                .iter()
                .map(|w| g.apply(w, y).map(|gy| linalg::dot(x, &gy)))
                .collect::<Result<Vec<f64>>>()?;
            Ok(within(&scores, tol).into_iter().map(|i| elements[i].clone()).collect())
        }
        g => Ok(max_filter(g, x, y)?.witnesses),
    }
}

/// Generators `g y` of the subdifferential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubgradientSet {
    pub generators: Vec<Vec<f64>>,
    /// The subdifferential is the convex hull of `generators`.
    pub hull_note: bool,
}

pub fn subdifferential(group: &GroupAction, x: &[f64], y: &[f64]) -> Result<SubgradientSet> {
    let generators = witness_set(group, x, y, None)?
        .iter()
        .map(|w| group.apply(w, y))
        .collect::<Result<Vec<_>>>()?;
    Ok(SubgradientSet { generators, hull_note: true })
}

/// One-sided derivative of `<<[.],[y]>>` at `x` in direction `v`:
/// `max over witnesses g of <v, g y>`.
pub fn directional_derivative(group: &GroupAction, x: &[f64], y: &[f64], v: &[f64]) -> Result<f64> {
    check_len(x.len(), v.len())?;
    check_finite("direction", v)?;
    if v.iter().all(|&a| a == 0.0) {
        return Err(Error::InvalidInput("zero direction".into()));
    }
    validate(group, x, y)?;
    let tol = default_tolerance(x, y);
    // Continuum maximizer sets, handled in closed form. At x = 0 every
    // element is a witness.
    if x.iter().all(|&a| a == 0.0) {
        return Ok(max_filter(group, v, y)?.value);
    }
    match group {
        GroupAction::FullOrthogonal { .. } if linalg::norm(x) * linalg::norm(y) <= tol => {
            return Ok(linalg::norm(v) * linalg::norm(y));
        }
        GroupAction::PhaseCircle { .. } if max_filter(group, x, y)?.value <= tol => {
            return Ok(max_filter(group, v, y)?.value);
        }
        _ => {}
    }
    witness_set(group, x, y, Some(tol))?
        .iter()
        .map(|w| group.apply(w, y).map(|gy| linalg::dot(v, &gy)))
        .try_fold(f64::NEG_INFINITY, |m, s| s.map(|s| m.max(s)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// `g0 y` for the first witness.
    #[default]
    First,
    /// Mean of all witness images.
    Average,
}

/// A member of the subdifferential of `<<[.],[y]>>` at `x`.
pub fn subgradient(group: &GroupAction, x: &[f64], y: &[f64], selection: Selection) -> Result<Vec<f64>> {
    match selection {
        Selection::First => {
            let w = match group {
                // the specialized algorithm already yields a maximizer
                GroupAction::CyclicShift { .. }
                | GroupAction::SlidingWindowShift { .. }
                | GroupAction::FullPermutation { .. }
                | GroupAction::SignedPermutation { .. }
                | GroupAction::SignFlips { .. }
                | GroupAction::FullOrthogonal { .. }
                | GroupAction::LeftOrthogonal { .. }
                | GroupAction::ColumnPermutation { .. }
                | GroupAction::PhaseCircle { .. }
                | GroupAction::ShiftAndConjugate { .. }
                | GroupAction::PatchPermutation(_) => max_filter(group, x, y)?.witnesses.swap_remove(0),
                GroupAction::Enumerated(_) => witness_set(group, x, y, None)?.swap_remove(0),
            };
            group.apply(&w, y)
        }
        Selection::Average => {
            let set = subdifferential(group, x, y)?;
            let m = set.generators.len() as f64;
            let mut acc = vec![0.0; y.len()];
            for g in &set.generators {
                for (a, b) in acc.iter_mut().zip(g) {
                    *a += b / m;
                }
            }
            Ok(acc)
        }
    }
}
