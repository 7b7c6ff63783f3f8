//! Isometry groups acting on a flat real ambient space.
//!
//! Every group acts on `R^d` for a kind-specific `d`. Structured signals are
//! flattened as follows:
//!
//! * `LeftOrthogonal` / `ColumnPermutation`: a `k x n` matrix, row-major.
//! * `PhaseCircle` / `ShiftAndConjugate`: `C^n` as interleaved `(re, im)` pairs.
//! * `SlidingWindowShift`: a `channels x width x positions` tensor stored slice
//!   by slice, so slice `a` occupies `data[a * channels * width..]`.
//! * `PatchPermutation`: an image flattened row-major (or any 1-D signal).

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg;

/// Maximum deviation from orthogonality and closure accepted for enumerated groups.
pub const ENUMERATED_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    Enumerated,
    CyclicShift,
    FullPermutation,
    SignedPermutation,
    SignFlips,
    FullOrthogonal,
    LeftOrthogonal,
    ColumnPermutation,
    PhaseCircle,
    ShiftAndConjugate,
    PatchPermutation,
    SlidingWindowShift,
}

/// A finite group given by its orthogonal matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct EnumeratedGroup {
    dim: usize,
    /// Row-major `dim x dim` matrices.
    matrices: Vec<Vec<f64>>,
}

impl EnumeratedGroup {
    /// Validates orthogonality and closure under products and inverses.
    pub fn new(dim: usize, matrices: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 || matrices.is_empty() {
            return Err(Error::InvalidGroup("empty enumerated group".into()));
        }
        for m in &matrices {
            check_len(dim * dim, m.len())?;
            if m.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("group matrix"));
            }
            let mtm = linalg::mat_mul(&linalg::transpose(m, dim), m, dim);
            if linalg::max_abs_diff(&mtm, &linalg::identity(dim)) > ENUMERATED_TOLERANCE {
                return Err(Error::InvalidGroup("matrix is not orthogonal".into()));
            }
        }
        let group = EnumeratedGroup { dim, matrices };
        for a in &group.matrices {
            if group.find(&linalg::transpose(a, dim)).is_none() {
                return Err(Error::InvalidGroup("not closed under inverses".into()));
            }
            for b in &group.matrices {
                if group.find(&linalg::mat_mul(a, b, dim)).is_none() {
                    return Err(Error::InvalidGroup("not closed under products".into()));
                }
            }
        }
        Ok(group)
    }

    /// Parses a JSON list of row-major matrices, e.g. `[[[1,0],[0,1]], [[-1,0],[0,-1]]]`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Vec<Vec<Vec<f64>>> = serde_json::from_str(text)?;
        let dim = raw.first().map(|m| m.len()).unwrap_or(0);
        let mut flat = Vec::with_capacity(raw.len());
        for m in raw {
            if m.len() != dim || m.iter().any(|r| r.len() != dim) {
                return Err(Error::InvalidGroup("matrices must be square and equal size".into()));
            }
            flat.push(m.into_iter().flatten().collect());
        }
        Self::new(dim, flat)
    }

    pub fn to_json(&self) -> String {
        let nested: Vec<Vec<Vec<f64>>> = self
            .matrices
            .iter()
            .map(|m| m.chunks(self.dim).map(|r| r.to_vec()).collect())
            .collect();
        serde_json::to_string(&nested).expect("matrices serialize")
    }

    /// `{+I, -I}` in dimension `dim`.
    pub fn sign(dim: usize) -> Self {
        let id = linalg::identity(dim);
        let neg = linalg::scale(&id, -1.0);
        EnumeratedGroup { dim, matrices: vec![id, neg] }
    }

    /// All `dim!` permutation matrices, `(Px)_i = x_{sigma(i)}`.
    pub fn permutations(dim: usize) -> Self {
        let matrices = (0..dim)
            .permutations(dim)
            .map(|sigma| {
                let mut m = vec![0.0; dim * dim];
                for (i, &s) in sigma.iter().enumerate() {
                    m[i * dim + s] = 1.0;
                }
                m
            })
            .collect();
        EnumeratedGroup { dim, matrices }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrices(&self) -> &[Vec<f64>] {
        &self.matrices
    }

    fn find(&self, m: &[f64]) -> Option<usize> {
        self.matrices
            .iter()
            .position(|g| linalg::max_abs_diff(g, m) <= ENUMERATED_TOLERANCE)
    }
}

/// A partition of the index set into patches; the group permutes indices
/// within each patch independently.
#[derive(Clone, Debug, PartialEq)]
pub struct PatchSpec {
    len: usize,
    patches: Vec<Vec<usize>>,
    layout: PatchLayout,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum PatchLayout {
    Contiguous { size: usize },
    Grid { rows: usize, cols: usize, side: usize },
    Custom,
}

impl PatchSpec {
    /// Consecutive runs of `size` indices covering `0..len`.
    pub fn contiguous(len: usize, size: usize) -> Result<Self> {
        if size == 0 || len == 0 || len % size != 0 {
            return Err(Error::InvalidGroup(format!(
                "patch size {size} does not tile length {len}"
            )));
        }
        let patches = (0..len / size)
            .map(|p| (p * size..(p + 1) * size).collect())
            .collect();
        Ok(PatchSpec { len, patches, layout: PatchLayout::Contiguous { size } })
    }

    /// Square `side x side` blocks of a row-major `rows x cols` image.
    pub fn square_grid(rows: usize, cols: usize, side: usize) -> Result<Self> {
        if side == 0 || rows == 0 || cols == 0 || rows % side != 0 || cols % side != 0 {
            return Err(Error::InvalidGroup(format!(
                "patch side {side} does not tile a {rows}x{cols} grid"
            )));
        }
        let mut patches = Vec::with_capacity((rows / side) * (cols / side));
        for br in 0..rows / side {
            for bc in 0..cols / side {
                let mut p = Vec::with_capacity(side * side);
                for r in br * side..(br + 1) * side {
                    for c in bc * side..(bc + 1) * side {
                        p.push(r * cols + c);
                    }
                }
                patches.push(p);
            }
        }
        Ok(PatchSpec { len: rows * cols, patches, layout: PatchLayout::Grid { rows, cols, side } })
    }

    /// Arbitrary patches; they must tile `0..len` exactly.
    pub fn from_patches(len: usize, patches: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; len];
        for p in &patches {
            if p.is_empty() {
                return Err(Error::InvalidGroup("empty patch".into()));
            }
            for &i in p {
                if i >= len || seen[i] {
                    return Err(Error::InvalidGroup(format!(
                        "patches do not tile the index set (index {i})"
                    )));
                }
                seen[i] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidGroup("patches do not cover the index set".into()));
        }
        Ok(PatchSpec { len, patches, layout: PatchLayout::Custom })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn patches(&self) -> &[Vec<usize>] {
        &self.patches
    }
}

/// Descriptor of an isometry group together with its evaluation strategy.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupAction {
    Enumerated(EnumeratedGroup),
    CyclicShift { n: usize },
    FullPermutation { d: usize },
    SignedPermutation { d: usize },
    SignFlips { d: usize },
    FullOrthogonal { d: usize },
    LeftOrthogonal { k: usize, n: usize },
    ColumnPermutation { k: usize, n: usize },
    PhaseCircle { n: usize },
    ShiftAndConjugate { n: usize },
    PatchPermutation(PatchSpec),
    SlidingWindowShift { channels: usize, width: usize, positions: usize },
}

/// A group element achieving (or nearly achieving) a max filter value.
///
/// The encoding depends on the group kind; `GroupAction::apply` materializes
/// the action on a flat vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// Index into an enumerated group.
    Element(usize),
    /// Cyclic shift: `(g x)[i] = x[i - s]` (slices for sliding windows).
    Shift(usize),
    /// `(g x)[i] = x[perm[i]]`; columns for `ColumnPermutation`.
    Permutation(Vec<usize>),
    /// `(g x)[i] = signs[i] * x[perm[i]]`.
    SignedPermutation { perm: Vec<usize>, signs: Vec<i8> },
    /// Row-major orthogonal matrix acting on the left.
    Orthogonal { dim: usize, matrix: Vec<f64> },
    /// Unit complex scalar.
    Phase(Complex64),
    /// `g x = phase * T_shift(conj?(x))`.
    ShiftConjugate { shift: usize, conjugate: bool, phase: Complex64 },
}

impl GroupAction {
    pub fn kind(&self) -> GroupKind {
        match self {
            GroupAction::Enumerated(_) => GroupKind::Enumerated,
            GroupAction::CyclicShift { .. } => GroupKind::CyclicShift,
            GroupAction::FullPermutation { .. } => GroupKind::FullPermutation,
            GroupAction::SignedPermutation { .. } => GroupKind::SignedPermutation,
            GroupAction::SignFlips { .. } => GroupKind::SignFlips,
            GroupAction::FullOrthogonal { .. } => GroupKind::FullOrthogonal,
            GroupAction::LeftOrthogonal { .. } => GroupKind::LeftOrthogonal,
            GroupAction::ColumnPermutation { .. } => GroupKind::ColumnPermutation,
            GroupAction::PhaseCircle { .. } => GroupKind::PhaseCircle,
            GroupAction::ShiftAndConjugate { .. } => GroupKind::ShiftAndConjugate,
            GroupAction::PatchPermutation(_) => GroupKind::PatchPermutation,
            GroupAction::SlidingWindowShift { .. } => GroupKind::SlidingWindowShift,
        }
    }

    /// Dimension of the real ambient space the group acts on.
    pub fn dim(&self) -> usize {
        match self {
            GroupAction::Enumerated(g) => g.dim,
            GroupAction::CyclicShift { n } => *n,
            GroupAction::FullPermutation { d }
            | GroupAction::SignedPermutation { d }
            | GroupAction::SignFlips { d }
            | GroupAction::FullOrthogonal { d } => *d,
            GroupAction::LeftOrthogonal { k, n } | GroupAction::ColumnPermutation { k, n } => k * n,
            GroupAction::PhaseCircle { n } | GroupAction::ShiftAndConjugate { n } => 2 * n,
            GroupAction::PatchPermutation(spec) => spec.len,
            GroupAction::SlidingWindowShift { channels, width, positions } => {
                channels * width * positions
            }
        }
    }

    /// Group order, or `None` for infinite groups (and on overflow).
    pub fn order(&self) -> Option<u128> {
        fn factorial(n: usize) -> Option<u128> {
            (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
        }
        fn pow2(n: usize) -> Option<u128> {
            1u128.checked_shl(n as u32)
        }
        match self {
            GroupAction::Enumerated(g) => Some(g.matrices.len() as u128),
            GroupAction::CyclicShift { n } => Some(*n as u128),
            GroupAction::FullPermutation { d } => factorial(*d),
            GroupAction::SignedPermutation { d } => factorial(*d)?.checked_mul(pow2(*d)?),
            GroupAction::SignFlips { d } => pow2(*d),
            GroupAction::ColumnPermutation { n, .. } => factorial(*n),
            GroupAction::PatchPermutation(spec) => spec
                .patches
                .iter()
                .try_fold(1u128, |acc, p| acc.checked_mul(factorial(p.len())?)),
            GroupAction::SlidingWindowShift { positions, .. } => Some(*positions as u128),
            GroupAction::FullOrthogonal { .. }
            | GroupAction::LeftOrthogonal { .. }
            | GroupAction::PhaseCircle { .. }
            | GroupAction::ShiftAndConjugate { .. } => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(
            self,
            GroupAction::FullOrthogonal { .. }
                | GroupAction::LeftOrthogonal { .. }
                | GroupAction::PhaseCircle { .. }
                | GroupAction::ShiftAndConjugate { .. }
        )
    }

    /// Applies the group element `w` to the flat vector `x`.
    pub fn apply(&self, w: &Witness, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), x.len())?;
        let bad = || Error::InvalidInput(format!("witness {w:?} does not belong to {self}"));
        match (self, w) {
            (GroupAction::Enumerated(g), Witness::Element(i)) => {
                let m = g.matrices.get(*i).ok_or_else(bad)?;
                Ok(linalg::mat_vec(m, g.dim, g.dim, x))
            }
            (GroupAction::CyclicShift { n }, Witness::Shift(s)) => {
                let n = *n;
                let s = s % n;
                Ok((0..n).map(|i| x[(i + n - s) % n]).collect())
            }
            (
                GroupAction::SlidingWindowShift { channels, width, positions },
                Witness::Shift(s),
            ) => {
                let block = channels * width;
                let t = *positions;
                let s = s % t;
                let mut out = vec![0.0; x.len()];
                for a in 0..t {
                    let src = (a + t - s) % t;
                    out[a * block..(a + 1) * block]
                        .copy_from_slice(&x[src * block..(src + 1) * block]);
                }
                Ok(out)
            }
            (
                GroupAction::FullPermutation { d },
                Witness::Permutation(perm),
            ) => {
                check_perm(perm, *d).map_err(|_| bad())?;
                Ok(perm.iter().map(|&p| x[p]).collect())
            }
            (GroupAction::PatchPermutation(spec), Witness::Permutation(perm)) => {
                check_perm(perm, spec.len).map_err(|_| bad())?;
                let mut patch_of = vec![0usize; spec.len];
                for (pi, p) in spec.patches.iter().enumerate() {
                    for &i in p {
                        patch_of[i] = pi;
                    }
                }
                if perm.iter().enumerate().any(|(i, &p)| patch_of[i] != patch_of[p]) {
                    return Err(bad());
                }
                Ok(perm.iter().map(|&p| x[p]).collect())
            }
            (GroupAction::ColumnPermutation { k, n }, Witness::Permutation(perm)) => {
                check_perm(perm, *n).map_err(|_| bad())?;
                let mut out = vec![0.0; k * n];
                for r in 0..*k {
                    for (j, &p) in perm.iter().enumerate() {
                        out[r * n + j] = x[r * n + p];
                    }
                }
                Ok(out)
            }
            (
                GroupAction::SignedPermutation { d } | GroupAction::SignFlips { d },
                Witness::SignedPermutation { perm, signs },
            ) => {
                check_perm(perm, *d).map_err(|_| bad())?;
                if signs.len() != *d || signs.iter().any(|s| s.abs() != 1) {
                    return Err(bad());
                }
                if matches!(self, GroupAction::SignFlips { .. })
                    && perm.iter().enumerate().any(|(i, &p)| i != p)
                {
                    return Err(bad());
                }
                Ok(perm
                    .iter()
                    .zip(signs)
                    .map(|(&p, &s)| f64::from(s) * x[p])
                    .collect())
            }
            (GroupAction::FullOrthogonal { d }, Witness::Orthogonal { dim, matrix }) => {
                if dim != d || matrix.len() != d * d {
                    return Err(bad());
                }
                Ok(linalg::mat_vec(matrix, *d, *d, x))
            }
            (GroupAction::LeftOrthogonal { k, n }, Witness::Orthogonal { dim, matrix }) => {
                if dim != k || matrix.len() != k * k {
                    return Err(bad());
                }
                let mut out = vec![0.0; k * n];
                for r in 0..*k {
                    for l in 0..*k {
                        let m = matrix[r * k + l];
                        for j in 0..*n {
                            out[r * n + j] += m * x[l * n + j];
                        }
                    }
                }
                Ok(out)
            }
            (GroupAction::PhaseCircle { .. }, Witness::Phase(c)) => {
                let xs = to_complex(x);
                Ok(from_complex(&xs.iter().map(|v| c * v).collect::<Vec<_>>()))
            }
            (
                GroupAction::ShiftAndConjugate { n },
                Witness::ShiftConjugate { shift, conjugate, phase },
            ) => {
                let n = *n;
                let xs = to_complex(x);
                let s = shift % n;
                let out: Vec<Complex64> = (0..n)
                    .map(|i| {
                        let v = xs[(i + n - s) % n];
                        phase * if *conjugate { v.conj() } else { v }
                    })
                    .collect();
                Ok(from_complex(&out))
            }
            _ => Err(bad()),
        }
    }

    /// The identity element in this kind's witness encoding.
    pub fn identity(&self) -> Witness {
        match self {
            GroupAction::Enumerated(g) => {
                let id = linalg::identity(g.dim);
                Witness::Element(g.find(&id).unwrap_or(0))
            }
            GroupAction::CyclicShift { .. } | GroupAction::SlidingWindowShift { .. } => {
                Witness::Shift(0)
            }
            GroupAction::FullPermutation { d } => Witness::Permutation((0..*d).collect()),
            GroupAction::PatchPermutation(spec) => Witness::Permutation((0..spec.len).collect()),
            GroupAction::ColumnPermutation { n, .. } => Witness::Permutation((0..*n).collect()),
            GroupAction::SignedPermutation { d } | GroupAction::SignFlips { d } => {
                Witness::SignedPermutation { perm: (0..*d).collect(), signs: vec![1; *d] }
            }
            GroupAction::FullOrthogonal { d } => {
                Witness::Orthogonal { dim: *d, matrix: linalg::identity(*d) }
            }
            GroupAction::LeftOrthogonal { k, .. } => {
                Witness::Orthogonal { dim: *k, matrix: linalg::identity(*k) }
            }
            GroupAction::PhaseCircle { .. } => Witness::Phase(Complex64::new(1.0, 0.0)),
            GroupAction::ShiftAndConjugate { .. } => Witness::ShiftConjugate {
                shift: 0,
                conjugate: false,
                phase: Complex64::new(1.0, 0.0),
            },
        }
    }

    /// Every element of a finite group, provided the order is at most `cap`.
    pub fn elements(&self, cap: u128) -> Result<Vec<Witness>> {
        let order = self
            .order()
            .ok_or_else(|| Error::Unsupported(format!("{self} is infinite")))?;
        if order > cap {
            return Err(Error::EnumerationTooLarge { size: order, cap });
        }
        let out = match self {
            GroupAction::Enumerated(g) => (0..g.matrices.len()).map(Witness::Element).collect(),
            GroupAction::CyclicShift { n } => (0..*n).map(Witness::Shift).collect(),
            GroupAction::SlidingWindowShift { positions, .. } => {
                (0..*positions).map(Witness::Shift).collect()
            }
            GroupAction::FullPermutation { d } | GroupAction::ColumnPermutation { n: d, .. } => {
                (0..*d).permutations(*d).map(Witness::Permutation).collect()
            }
            GroupAction::SignFlips { d } => sign_patterns(*d)
                .into_iter()
                .map(|signs| Witness::SignedPermutation { perm: (0..*d).collect(), signs })
                .collect(),
            GroupAction::SignedPermutation { d } => {
                let signs = sign_patterns(*d);
                (0..*d)
                    .permutations(*d)
                    .flat_map(|perm| {
                        signs.iter().map(move |s| Witness::SignedPermutation {
                            perm: perm.clone(),
                            signs: s.clone(),
                        })
                    })
                    .collect()
            }
            GroupAction::PatchPermutation(spec) => {
                let per_patch: Vec<Vec<Vec<usize>>> = spec
                    .patches
                    .iter()
                    .map(|p| p.iter().copied().permutations(p.len()).collect())
                    .collect();
                per_patch
                    .iter()
                    .map(|choices| choices.iter())
                    .multi_cartesian_product()
                    .map(|choice| {
                        let mut perm: Vec<usize> = (0..spec.len).collect();
                        for (patch, images) in spec.patches.iter().zip(choice) {
                            for (&i, &p) in patch.iter().zip(images) {
                                perm[i] = p;
                            }
                        }
                        Witness::Permutation(perm)
                    })
                    .collect()
            }
            _ => unreachable!("infinite kinds rejected above"),
        };
        Ok(out)
    }
}

fn check_perm(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: perm.len() });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidInput("not a permutation".into()));
        }
        seen[p] = true;
    }
    Ok(())
}

fn sign_patterns(d: usize) -> Vec<Vec<i8>> {
    (0..1usize << d)
        .map(|mask| (0..d).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect())
        .collect()
}

/// Reads interleaved `(re, im)` pairs.
pub fn to_complex(x: &[f64]) -> Vec<Complex64> {
    x.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect()
}

/// Writes interleaved `(re, im)` pairs.
pub fn from_complex(z: &[Complex64]) -> Vec<f64> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

impl fmt::Display for GroupAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupAction::Enumerated(g) => write!(f, "enum:{}x{}", g.matrices.len(), g.dim),
            GroupAction::CyclicShift { n } => write!(f, "cyclic:{n}"),
            GroupAction::FullPermutation { d } => write!(f, "perm:{d}"),
            GroupAction::SignedPermutation { d } => write!(f, "signedperm:{d}"),
            GroupAction::SignFlips { d } => write!(f, "signflips:{d}"),
            GroupAction::FullOrthogonal { d } => write!(f, "orth:{d}"),
            GroupAction::LeftOrthogonal { k, n } => write!(f, "leftorth:{k}x{n}"),
            GroupAction::ColumnPermutation { k, n } => write!(f, "colperm:{k}x{n}"),
            GroupAction::PhaseCircle { n } => write!(f, "phase:{n}"),
            GroupAction::ShiftAndConjugate { n } => write!(f, "shiftconj:{n}"),
            GroupAction::PatchPermutation(spec) => match spec.layout {
                PatchLayout::Contiguous { size } => write!(f, "patchperm:{size}@{}", spec.len),
                PatchLayout::Grid { rows, cols, side } => {
                    write!(f, "patchperm:{side}@{rows}x{cols}")
                }
                PatchLayout::Custom => write!(f, "patchperm:custom{}", spec.len),
            },
            GroupAction::SlidingWindowShift { channels, width, positions } => {
                write!(f, "window:{channels}x{width}x{positions}")
            }
        }
    }
}

fn parse_dims(s: &str) -> Result<Vec<usize>> {
    s.split('x')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .ok()
                .filter(|&v| v > 0)
                .ok_or_else(|| Error::Parse(format!("bad dimension `{p}`")))
        })
        .collect()
}

impl FromStr for GroupAction {
    type Err = Error;

    /// Compact group specs: `cyclic:64`, `perm:10`, `signedperm:8`,
    /// `signflips:8`, `orth:3`, `phase:4`, `shiftconj:50`, `leftorth:2x50`,
    /// `colperm:2x50`, `patchperm:4@16x16` (square patches of an image),
    /// `patchperm:2@8` (contiguous patches), `window:30x971` (one channel) or
    /// `window:15x30x971`, and `pm:3` for `{+I, -I}`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("group spec `{s}` lacks `:`")))?;
        let one = |arg: &str| -> Result<usize> {
            match parse_dims(arg)?.as_slice() {
                [v] => Ok(*v),
                _ => Err(Error::Parse(format!("expected one dimension in `{s}`"))),
            }
        };
        let two = |arg: &str| -> Result<(usize, usize)> {
            match parse_dims(arg)?.as_slice() {
                [a, b] => Ok((*a, *b)),
                _ => Err(Error::Parse(format!("expected KxN in `{s}`"))),
            }
        };
        Ok(match name {
            "cyclic" => GroupAction::CyclicShift { n: one(arg)? },
            "perm" => GroupAction::FullPermutation { d: one(arg)? },
            "signedperm" => GroupAction::SignedPermutation { d: one(arg)? },
            "signflips" => GroupAction::SignFlips { d: one(arg)? },
            "orth" => GroupAction::FullOrthogonal { d: one(arg)? },
            "phase" => GroupAction::PhaseCircle { n: one(arg)? },
            "shiftconj" => GroupAction::ShiftAndConjugate { n: one(arg)? },
            "pm" => GroupAction::Enumerated(EnumeratedGroup::sign(one(arg)?)),
            "leftorth" => {
                let (k, n) = two(arg)?;
                GroupAction::LeftOrthogonal { k, n }
            }
            "colperm" => {
                let (k, n) = two(arg)?;
                GroupAction::ColumnPermutation { k, n }
            }
            "patchperm" => {
                let (side, shape) = arg
                    .split_once('@')
                    .ok_or_else(|| Error::Parse(format!("expected SIDE@SHAPE in `{s}`")))?;
                let side = one(side)?;
                match parse_dims(shape)?.as_slice() {
                    [len] => GroupAction::PatchPermutation(PatchSpec::contiguous(*len, side)?),
                    [rows, cols] => {
                        GroupAction::PatchPermutation(PatchSpec::square_grid(*rows, *cols, side)?)
                    }
                    _ => return Err(Error::Parse(format!("bad patch shape in `{s}`"))),
                }
            }
            "window" => match parse_dims(arg)?.as_slice() {
                [width, positions] => GroupAction::SlidingWindowShift {
                    channels: 1,
                    width: *width,
                    positions: *positions,
                },
                [channels, width, positions] => GroupAction::SlidingWindowShift {
                    channels: *channels,
                    width: *width,
                    positions: *positions,
                },
                _ => return Err(Error::Parse(format!("expected [Cx]WxT in `{s}`"))),
            },
            other => return Err(Error::Parse(format!("unknown group kind `{other}`"))),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs_round_trip() {
        for s in [
            "cyclic:64",
            "perm:10",
            "signedperm:8",
            "signflips:3",
            "orth:3",
            "phase:4",
            "shiftconj:50",
            "leftorth:2x50",
            "colperm:3x7",
            "patchperm:4@16x16",
            "patchperm:2@8",
            "window:15x30x971",
        ] {
            let g: GroupAction = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        let g: GroupAction = "window:30x971".parse().unwrap();
        assert_eq!(g.dim(), 30 * 971);
        assert!("cyclic:0".parse::<GroupAction>().is_err());
        assert!("bogus:3".parse::<GroupAction>().is_err());
        assert!("patchperm:3@16x16".parse::<GroupAction>().is_err());
    }

    #[test]
    fn enumerated_validation() {
        assert!(EnumeratedGroup::new(2, vec![vec![1.0, 0.0, 0.0, 1.0]]).is_ok());
        // -I alone is not closed (its square is I).
        let err = EnumeratedGroup::new(2, vec![vec![-1.0, 0.0, 0.0, -1.0]]);
        assert!(matches!(err, Err(Error::InvalidGroup(_))));
        // Not orthogonal.
        let err = EnumeratedGroup::new(1, vec![vec![1.0], vec![2.0]]);
        assert!(matches!(err, Err(Error::InvalidGroup(_))));
        let g = EnumeratedGroup::permutations(3);
        assert_eq!(g.matrices().len(), 6);
        let back = EnumeratedGroup::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn orders_and_elements() {
        let g: GroupAction = "signedperm:3".parse().unwrap();
        assert_eq!(g.order(), Some(48));
        assert_eq!(g.elements(1000).unwrap().len(), 48);
        let g = GroupAction::PatchPermutation(PatchSpec::contiguous(4, 2).unwrap());
        assert_eq!(g.order(), Some(4));
        assert_eq!(g.elements(10).unwrap().len(), 4);
        assert!(matches!(g.elements(3), Err(Error::EnumerationTooLarge { .. })));
        let g: GroupAction = "orth:3".parse().unwrap();
        assert!(g.order().is_none());
    }

    #[test]
    fn shift_convention() {
        let g = GroupAction::CyclicShift { n: 4 };
        let y = g.apply(&Witness::Shift(1), &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(y, vec![4.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn patch_witness_must_preserve_patches() {
        let g = GroupAction::PatchPermutation(PatchSpec::contiguous(4, 2).unwrap());
        assert!(g.apply(&Witness::Permutation(vec![1, 0, 3, 2]), &[0.0; 4]).is_ok());
        assert!(g.apply(&Witness::Permutation(vec![2, 1, 0, 3]), &[0.0; 4]).is_err());
    }
}
