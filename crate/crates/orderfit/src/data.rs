//! Core data types: item lists, permutations, sessions, datasets.
//!
//! A [`Permutation`] stores, for each item, the display position it occupies
//! (`positions[i]` = position of item `i`). The opposite view — which item
//! sits at a given position — is obtained through [`Permutation::invert`],
//! which is the single sanctioned conversion point between the two readings.
//!
//! All types validate their invariants at construction and are immutable
//! afterwards, so they are safe to share across concurrent readers.

use ndarray::{Array2, ArrayView1};

use crate::error::{Error, Result};

/// A list of `n` items, each described by a `d`-dimensional feature vector.
///
/// Stored as a `d × n` matrix whose column `i` is the feature vector of
/// item `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemList {
    features: Array2<f64>,
}

impl ItemList {
    /// Wraps a `d × n` feature matrix. Rejects empty or non-finite input.
    pub fn new(features: Array2<f64>) -> Result<Self> {
        if features.nrows() == 0 || features.ncols() == 0 {
            return Err(Error::InvalidInput(format!(
                "item list must have d >= 1 and n >= 1, got {} x {}",
                features.nrows(),
                features.ncols()
            )));
        }
        if features.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(
                "item list contains a non-finite feature value".into(),
            ));
        }
        Ok(Self { features })
    }

    /// Builds a list from item-major rows: `items[i]` is the feature vector
    /// of item `i`. This is the layout used by session files on disk.
    pub fn from_items(items: &[Vec<f64>]) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::InvalidInput("item list must have n >= 1".into()));
        }
        let d = items[0].len();
        if items.iter().any(|it| it.len() != d) {
            return Err(Error::InvalidInput(
                "all items must have the same feature dimension".into(),
            ));
        }
        let n = items.len();
        let mut features = Array2::zeros((d, n));
        for (i, item) in items.iter().enumerate() {
            for (k, &x) in item.iter().enumerate() {
                features[[k, i]] = x;
            }
        }
        Self::new(features)
    }

    /// Feature dimension `d`.
    pub fn d(&self) -> usize {
        self.features.nrows()
    }

    /// List length `n`.
    pub fn n(&self) -> usize {
        self.features.ncols()
    }

    /// Feature vector of item `i` (0-based).
    pub fn feature(&self, item: usize) -> ArrayView1<'_, f64> {
        self.features.column(item)
    }

    /// The underlying `d × n` matrix.
    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    /// Reorders columns so that the output column at position
    /// `perm.position_of(i)` is the input column of item `i`.
    pub fn apply_permutation(&self, perm: &Permutation) -> Result<ItemList> {
        if perm.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                actual: perm.len(),
                context: "permutation length vs list length",
            });
        }
        let mut out = Array2::zeros((self.d(), self.n()));
        for item in 0..self.n() {
            out.column_mut(perm.position_of(item))
                .assign(&self.features.column(item));
        }
        Ok(ItemList { features: out })
    }
}

/// A bijection of `{0, .., n-1}`: `positions[i]` is the display position of
/// item `i`. Positions are 0-based internally; external formats use 1-based
/// positions, converted via [`Permutation::from_one_based`] and
/// [`Permutation::one_based`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    positions: Vec<usize>,
}

impl Permutation {
    /// Validates that `positions` is a bijection onto `{0, .., n-1}`.
    pub fn new(positions: Vec<usize>) -> Result<Self> {
        let n = positions.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("empty permutation".into()));
        }
        let mut seen = vec![false; n];
        for &p in &positions {
            if p >= n {
                return Err(Error::InvalidPermutation(format!(
                    "position {} out of range for length {}",
                    p, n
                )));
            }
            if seen[p] {
                return Err(Error::InvalidPermutation(format!(
                    "position {} appears more than once",
                    p
                )));
            }
            seen[p] = true;
        }
        Ok(Self { positions })
    }

    /// Parses 1-based positions as used in files and the original notation.
    pub fn from_one_based(positions: Vec<usize>) -> Result<Self> {
        if positions.iter().any(|&p| p == 0) {
            return Err(Error::InvalidPermutation(
                "1-based position value 0 encountered".into(),
            ));
        }
        Self::new(positions.into_iter().map(|p| p - 1).collect())
    }

    /// 1-based view of the positions, for serialization.
    pub fn one_based(&self) -> Vec<usize> {
        self.positions.iter().map(|&p| p + 1).collect()
    }

    /// Identity permutation: every item stays at its own index.
    pub fn identity(n: usize) -> Self {
        Self {
            positions: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Display position of item `i`.
    pub fn position_of(&self, item: usize) -> usize {
        self.positions[item]
    }

    /// 0-based positions, one entry per item.
    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    /// Inverse view: `invert().position_of(j)` is the item shown at
    /// position `j`.
    pub fn invert(&self) -> Permutation {
        let mut inv = vec![0; self.positions.len()];
        for (item, &pos) in self.positions.iter().enumerate() {
            inv[pos] = item;
        }
        Permutation { positions: inv }
    }
}

/// Returns the permutation placing larger values at earlier positions.
/// Ties are broken by smaller original index first (stable).
pub fn sort_descending(values: &[f64]) -> Result<Permutation> {
    if values.is_empty() {
        return Err(Error::InvalidInput("cannot sort an empty vector".into()));
    }
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(
            "cannot sort non-finite values".into(),
        ));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut positions = vec![0; values.len()];
    for (rank, &item) in order.iter().enumerate() {
        positions[item] = rank;
    }
    Ok(Permutation { positions })
}

/// One observed example: a list, the order it was shown in, and the score
/// the user (or a ground-truth model) assigned to the pair.
#[derive(Debug, Clone)]
pub struct Session {
    items: ItemList,
    shown_order: Permutation,
    score: f64,
}

impl Session {
    pub fn new(items: ItemList, shown_order: Permutation, score: f64) -> Result<Self> {
        if shown_order.len() != items.n() {
            return Err(Error::DimensionMismatch {
                expected: items.n(),
                actual: shown_order.len(),
                context: "shown order length vs list length",
            });
        }
        if !score.is_finite() || score < 0.0 {
            return Err(Error::InvalidInput(format!(
                "session score must be finite and >= 0, got {}",
                score
            )));
        }
        Ok(Self {
            items,
            shown_order,
            score,
        })
    }

    pub fn items(&self) -> &ItemList {
        &self.items
    }

    pub fn shown_order(&self) -> &Permutation {
        &self.shown_order
    }

    pub fn score(&self) -> f64 {
        self.score
    }
}

/// An ordered, non-empty collection of sessions sharing one `n` and one `d`.
#[derive(Debug, Clone)]
pub struct Dataset {
    sessions: Vec<Session>,
}

impl Dataset {
    pub fn new(sessions: Vec<Session>) -> Result<Self> {
        let first = sessions
            .first()
            .ok_or_else(|| Error::InvalidInput("dataset must be non-empty".into()))?;
        let (n, d) = (first.items().n(), first.items().d());
        for (i, s) in sessions.iter().enumerate() {
            if s.items().n() != n || s.items().d() != d {
                return Err(Error::InvalidInput(format!(
                    "session {} has shape {}x{}, dataset uses {}x{}",
                    i,
                    s.items().d(),
                    s.items().n(),
                    d,
                    n
                )));
            }
        }
        Ok(Self { sessions })
    }

    pub fn sessions(&self) -> &[Session] {
        &self.sessions
    }

    pub fn len(&self) -> usize {
        self.sessions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sessions.is_empty()
    }

    /// Shared list length.
    pub fn n(&self) -> usize {
        self.sessions[0].items().n()
    }

    /// Shared feature dimension.
    pub fn d(&self) -> usize {
        self.sessions[0].items().d()
    }

    /// Observed scores in session order.
    pub fn scores(&self) -> Vec<f64> {
        self.sessions.iter().map(|s| s.score()).collect()
    }
}
