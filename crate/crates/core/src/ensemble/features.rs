//! Hand-crafted candidate features for the second-stage ranker.

use std::collections::HashMap;

use crate::challenge::ChallengePlaylist;
use crate::corpus::Corpus;
use crate::ids::TrackId;
use crate::scalar::Scalar;

use super::{BlendResult, N_RECOMMENDERS};

/// Feature vector layout (order is part of the ranker artifact format):
///   0        blended hybrid score
///   1..=5    per-slot normalized first-stage scores (0 when absent)
///   6        ln(1 + candidate popularity)
///   7        candidate idf
///   8        seed tracks sharing the candidate's artist
///   9        seed tracks sharing the candidate's album
///   10       seed co-occurrence count (playlists containing the candidate
///            and any seed track, summed over seeds)
///   11       seed length
///   12..=21  scenario one-hot
pub const N_FEATURES: usize = 22;

pub type FeatureVec<S> = [S; N_FEATURES];

/// Per-candidate features for every track in the blended pool, in pool
/// order. Pure arithmetic over immutable inputs; parallel-safe per playlist.
pub fn features_for_pool<S: Scalar>(
    playlist: &ChallengePlaylist,
    blend: &BlendResult<S>,
    corpus: &Corpus,
    idf: &[S],
) -> Vec<(TrackId, FeatureVec<S>)> {
    let seed_tracks: Vec<TrackId> = {
        let mut s: Vec<TrackId> = playlist.seed_tracks.iter().map(|&(_, t)| t).collect();
        s.sort_unstable();
        s.dedup();
        s
    };

    let mut artist_counts: HashMap<u32, u32> = HashMap::new();
    let mut album_counts: HashMap<u32, u32> = HashMap::new();
    for &s in &seed_tracks {
        *artist_counts.entry(corpus.artist_of(s).0).or_insert(0) += 1;
        *album_counts.entry(corpus.album_of(s).0).or_insert(0) += 1;
    }

    // Co-occurrence: one pass over the playlists containing each seed.
    let mut cooc = vec![0u32; corpus.n_tracks()];
    for &s in &seed_tracks {
        for &pid in corpus.matrix.col(s.index()) {
            for &t in corpus.matrix.row(pid as usize) {
                cooc[t as usize] += 1;
            }
        }
    }

    let seed_len = S::of_usize(seed_tracks.len());
    let scenario_idx = playlist.scenario.index();

    blend
        .rec
        .items
        .iter()
        .map(|&(t, blended)| {
            let mut f = [S::zero(); N_FEATURES];
            f[0] = blended;
            for slot in 0..N_RECOMMENDERS {
                if let Some(&s) = blend.components[slot].get(&t) {
                    f[1 + slot] = s;
                }
            }
            f[6] = S::of_f64((1.0 + corpus.track_pop[t.index()] as f64).ln());
            f[7] = idf[t.index()];
            f[8] = S::of_u32(
                artist_counts.get(&corpus.artist_of(t).0).copied().unwrap_or(0),
            );
            f[9] = S::of_u32(
                album_counts.get(&corpus.album_of(t).0).copied().unwrap_or(0),
            );
            f[10] = S::of_u32(cooc[t.index()]);
            f[11] = seed_len;
            f[12 + scenario_idx] = S::one();
            (t, f)
        })
        .collect()
}
