//! Popularity baseline: most-included tracks first, seeds removed.

use std::collections::HashSet;

use crate::corpus::Corpus;
use crate::ids::TrackId;
use crate::scalar::Scalar;

use super::Recommendation;

/// Top `n` tracks by corpus-wide inclusion count, excluding `seed` tracks.
/// Scores are the raw counts; ties fall back to ascending [`TrackId`]
/// (inherited from [`Corpus::popularity_ranking`]).
pub fn recommend_popularity<S: Scalar>(
    seed: &HashSet<TrackId>,
    corpus: &Corpus,
    n: usize,
) -> Recommendation<S> {
    let mut items = Vec::with_capacity(n.min(corpus.n_tracks()));
    for track in corpus.popularity_ranking() {
        if items.len() >= n {
            break;
        }
        if seed.contains(&track) {
            continue;
        }
        items.push((track, S::of_u32(corpus.track_pop[track.index()])));
    }
    let short = items.len() < n;
    Recommendation { items, short }
}
