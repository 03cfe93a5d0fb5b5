//! Playlist-based k-nearest-neighbors: find corpus playlists similar to the
//! seed, then surface the tracks they contain.

use crate::corpus::Corpus;
use crate::ids::TrackId;
use crate::scalar::Scalar;

use super::{rank_candidates, seed_track_set, Recommendation, RecommendError};

/// Default neighborhood size.
pub const DEFAULT_K: usize = 100;

/// Treats the seed's track set and every corpus playlist as binary vectors,
/// takes the `k` playlists with the highest cosine similarity (ties broken
/// by ascending playlist id), and scores
/// score(t) = idf(t) · Σ_{q ∈ kNN, t ∈ q} cos(seed, q)
/// over non-seed tracks. If no playlist shares a track with the seed the
/// recommendation is empty.
pub fn recommend_playlist_knn<S: Scalar>(
    seed: &[(u32, TrackId)],
    corpus: &Corpus,
    idf: &[S],
    k: usize,
    n: usize,
) -> Result<Recommendation<S>, RecommendError> {
    let seed_tracks = seed_track_set(seed);
    if seed_tracks.is_empty() {
        return Err(RecommendError::EmptySeed);
    }
    // Overlap counts |seed ∩ q| via the track → playlists mirror.
    let mut overlap = vec![0u32; corpus.n_playlists()];
    for &s in &seed_tracks {
        for &pid in corpus.matrix.col(s.index()) {
            overlap[pid as usize] += 1;
        }
    }
    let seed_len = seed_tracks.len() as f64;
    let mut sims: Vec<(u32, S)> = overlap
        .iter()
        .enumerate()
        .filter(|&(_, &o)| o > 0)
        .map(|(pid, &o)| {
            let q_len = corpus.matrix.row_nnz(pid) as f64;
            (pid as u32, S::of_f64(o as f64 / (seed_len * q_len).sqrt()))
        })
        .collect();
    sims.sort_unstable_by(|a, b| {
        b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0))
    });
    sims.truncate(k);

    // Neighbors are visited in similarity order (already deterministic), so
    // per-track accumulation order is fixed.
    let mut acc = vec![S::zero(); corpus.n_tracks()];
    let mut touched: Vec<u32> = Vec::new();
    for &(pid, sim) in &sims {
        for &t in corpus.matrix.row(pid as usize) {
            if acc[t as usize] == S::zero() {
                touched.push(t);
            }
            acc[t as usize] += sim;
        }
    }
    touched.sort_unstable();
    touched.dedup();
    let candidates: Vec<(TrackId, S)> = touched
        .iter()
        .filter(|&&t| !seed_tracks.contains(&TrackId(t)))
        .filter(|&&t| acc[t as usize] > S::zero())
        .map(|&t| (TrackId(t), idf[t as usize] * acc[t as usize]))
        .collect();
    Ok(rank_candidates(candidates, n))
}
