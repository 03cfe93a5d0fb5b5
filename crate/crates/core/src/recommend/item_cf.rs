//! Item-item collaborative filtering over binary track/playlist vectors.
//!
//! cos(t, s) = |P(t) ∩ P(s)| / sqrt(|P(t)|·|P(s)|) where P(t) is the set of
//! playlists containing t. Similarities are precomputed once per corpus into
//! a truncated neighbor index; scoring a seed playlist is then a handful of
//! sparse lookups.

use rayon::prelude::*;

use crate::corpus::Corpus;
use crate::ids::TrackId;
use crate::scalar::Scalar;

use super::{rank_candidates, seed_track_set, Recommendation, RecommendError};

/// Default neighbor-list truncation.
pub const DEFAULT_NEIGHBORS: usize = 200;

/// Per-track top neighbors by cosine similarity. Lists hold only strictly
/// positive similarities, exclude the track itself, and are sorted by
/// descending similarity with ascending-TrackId tie-breaks, truncated to
/// `cap` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemSimilarityIndex<S> {
    pub cap: usize,
    pub neighbors: Vec<Vec<(TrackId, S)>>,
}

impl<S> ItemSimilarityIndex<S> {
    pub fn n_tracks(&self) -> usize {
        self.neighbors.len()
    }
}

/// Builds the neighbor index. Parallel over tracks; each track's list is a
/// pure function of the corpus, so results are identical for any worker
/// count.
pub fn build_item_index<S: Scalar>(corpus: &Corpus, cap: usize) -> ItemSimilarityIndex<S> {
    let n_tracks = corpus.n_tracks();
    let neighbors: Vec<Vec<(TrackId, S)>> = (0..n_tracks)
        .into_par_iter()
        .map_init(
            || (vec![0u32; n_tracks], Vec::new()),
            |(counts, touched), t| {
                // Count co-occurrences of t with every other track by walking
                // the playlists containing t.
                for &pid in corpus.matrix.col(t) {
                    for &other in corpus.matrix.row(pid as usize) {
                        if counts[other as usize] == 0 {
                            touched.push(other);
                        }
                        counts[other as usize] += 1;
                    }
                }
                let df_t = corpus.track_df[t] as f64;
                let mut list: Vec<(TrackId, S)> = touched
                    .iter()
                    .filter(|&&other| other != t as u32)
                    .map(|&other| {
                        let co = counts[other as usize] as f64;
                        let df_o = corpus.track_df[other as usize] as f64;
                        (TrackId(other), S::of_f64(co / (df_t * df_o).sqrt()))
                    })
                    .collect();
                for &other in touched.iter() {
                    counts[other as usize] = 0;
                }
                touched.clear();
                list.sort_unstable_by(|a, b| {
                    b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0))
                });
                list.truncate(cap);
                list
            },
        )
        .collect();
    ItemSimilarityIndex { cap, neighbors }
}

/// Scores every track reachable from the seed through the index:
/// score(t) = idf(t) · Σ_{s ∈ seed} cos(t, s), candidates restricted to
/// strictly positive accumulated similarity and non-seed tracks.
pub fn recommend_item_cf<S: Scalar>(
    seed: &[(u32, TrackId)],
    index: &ItemSimilarityIndex<S>,
    idf: &[S],
    n: usize,
) -> Result<Recommendation<S>, RecommendError> {
    let seed_tracks = seed_track_set(seed);
    if seed_tracks.is_empty() {
        return Err(RecommendError::EmptySeed);
    }
    let n_tracks = index.n_tracks();
    let mut acc = vec![S::zero(); n_tracks];
    let mut touched: Vec<u32> = Vec::new();
    // Seed tracks are visited in ascending order so the floating-point
    // accumulation order is fixed.
    for &s in &seed_tracks {
        for &(t, sim) in &index.neighbors[s.index()] {
            if acc[t.index()] == S::zero() {
                touched.push(t.0);
            }
            acc[t.index()] += sim;
        }
    }
    let candidates: Vec<(TrackId, S)> = {
        touched.sort_unstable();
        touched.dedup();
        touched
            .iter()
            .filter(|&&t| !seed_tracks.contains(&TrackId(t)))
            .filter(|&&t| acc[t as usize] > S::zero())
            .map(|&t| (TrackId(t), idf[t as usize] * acc[t as usize]))
            .collect()
    };
    Ok(rank_candidates(candidates, n))
}
