//! First-stage candidate generators.
//!
//! Every generator produces a [`Recommendation`]: tracks ordered by
//! descending score with ties broken by ascending [`TrackId`], never
//! containing seed tracks or duplicates. Scores are only comparable
//! within a single recommendation, not across recommenders.

pub mod artifacts;
pub mod item_cf;
pub mod playlist_knn;
pub mod popularity;
pub mod title;
pub mod wrmf;

use std::collections::HashSet;

use thiserror::Error;

use crate::ids::TrackId;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum RecommendError {
    #[error("seed is empty: this recommender needs at least one seed track")]
    EmptySeed,
    #[error("invalid training parameters: {0}")]
    InvalidParams(String),
    #[error("numerical failure in ALS half-sweep {iteration}: {detail}")]
    Numerical { iteration: usize, detail: String },
}

/// Ranked track list. `short` is set when fewer than the requested number
/// of candidates were available after excluding seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct Recommendation<S> {
    pub items: Vec<(TrackId, S)>,
    pub short: bool,
}

impl<S: Scalar> Recommendation<S> {
    pub fn empty(requested: usize) -> Self {
        Recommendation { items: Vec::new(), short: requested > 0 }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn tracks(&self) -> impl Iterator<Item = TrackId> + '_ {
        self.items.iter().map(|&(t, _)| t)
    }

    pub fn contains(&self, track: TrackId) -> bool {
        self.items.iter().any(|&(t, _)| t == track)
    }

    /// Appends fallback tracks until `n` items are present, skipping tracks
    /// already listed and tracks in `exclude`. Appended items are assigned
    /// synthetic scores strictly below the current minimum so the
    /// descending-score invariant survives; their relative order is kept.
    pub fn fill_from<I>(&mut self, fallback: I, exclude: &HashSet<TrackId>, n: usize)
    where
        I: IntoIterator<Item = TrackId>,
    {
        if self.items.len() < n {
            let base = self.items.last().map(|&(_, s)| s).unwrap_or_else(S::zero);
            let present: HashSet<TrackId> = self.tracks().collect();
            let mut step = 0usize;
            for track in fallback {
                if self.items.len() >= n {
                    break;
                }
                if present.contains(&track) || exclude.contains(&track) {
                    continue;
                }
                step += 1;
                self.items.push((track, base - S::of_usize(step)));
            }
        }
        self.short = self.items.len() < n;
    }
}

/// Sorts scored candidates into canonical order (score descending, TrackId
/// ascending), truncates to `n`, and flags a shortfall. Scores must be
/// finite; callers guarantee this by construction.
pub(crate) fn rank_candidates<S: Scalar>(
    mut candidates: Vec<(TrackId, S)>,
    n: usize,
) -> Recommendation<S> {
    candidates.sort_unstable_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("candidate scores must be finite")
            .then_with(|| a.0.cmp(&b.0))
    });
    candidates.truncate(n);
    let short = candidates.len() < n;
    Recommendation { items: candidates, short }
}

/// Deduplicates a positional seed list into the set of seed tracks,
/// sorted ascending so downstream float accumulation has a fixed order.
pub(crate) fn seed_track_set(seed: &[(u32, TrackId)]) -> Vec<TrackId> {
    let mut tracks: Vec<TrackId> = seed.iter().map(|&(_, t)| t).collect();
    tracks.sort_unstable();
    tracks.dedup();
    tracks
}
