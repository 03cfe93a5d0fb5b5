//! Training-world data model: interned catalog, playlists, the binary
//! playlist-track matrix and the global statistics every recommender shares.

mod json;
pub mod normalize;
mod snapshot;

pub use json::{ingest, ingest_readers, write_json_slices};
pub use normalize::normalize_title;

use std::collections::HashSet;
use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

use crate::ids::{AlbumId, ArtistId, Interner, PlaylistId, TrackId};
use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{file}: JSON parse error: {detail}")]
    Parse { file: PathBuf, detail: String },
    #[error("{file}: schema error: {detail}")]
    Schema { file: PathBuf, detail: String },
    #[error("duplicate playlist id {pid}")]
    DuplicatePid { pid: u64 },
    #[error("unknown track {0}")]
    UnknownTrack(TrackId),
    #[error("io error on {file}: {source}")]
    Io {
        file: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("corrupt snapshot {file}: {detail}")]
    CorruptSnapshot { file: PathBuf, detail: String },
}

/// One playlist: raw and normalized title, ordered track list, metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Playlist {
    pub pid: PlaylistId,
    /// Original playlist id from the source data.
    pub orig_pid: u64,
    pub name: String,
    pub normalized_name: String,
    /// Ordered (position, track) pairs; positions are 0..k-1 with no gaps.
    /// Duplicate tracks are permitted.
    pub tracks: Vec<(u32, TrackId)>,
    pub num_followers: u64,
    pub modified_at: i64,
}

impl Playlist {
    /// Deduplicated track set (the seed-set view).
    pub fn track_set(&self) -> HashSet<TrackId> {
        self.tracks.iter().map(|&(_, t)| t).collect()
    }

    pub fn len(&self) -> usize {
        self.tracks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tracks.is_empty()
    }
}

/// The training world: playlists, interned catalog, interaction matrix and
/// per-track statistics. Immutable after construction.
#[derive(Debug, Default)]
pub struct Corpus {
    pub playlists: Vec<Playlist>,
    pub tracks: Interner,
    pub artists: Interner,
    pub albums: Interner,
    /// Per-track artist and album (every track maps to exactly one of each).
    pub track_artist: Vec<ArtistId>,
    pub track_album: Vec<AlbumId>,
    pub track_names: Vec<String>,
    pub artist_names: Vec<String>,
    pub album_names: Vec<String>,
    /// Binary playlist x track matrix over deduplicated playlist contents.
    pub matrix: CsrMatrix,
    /// Number of playlists each track appears in (matrix column count).
    pub track_df: Vec<u32>,
    /// Total non-deduplicated occurrence count per track.
    pub track_pop: Vec<u32>,
}

impl Corpus {
    pub fn n_playlists(&self) -> usize {
        self.playlists.len()
    }

    pub fn n_tracks(&self) -> usize {
        self.tracks.len()
    }

    /// Rebuild matrix and statistics from the playlist list and catalog.
    pub(crate) fn finalize(&mut self) {
        let n_tracks = self.tracks.len();
        let rows: Vec<Vec<u32>> = self
            .playlists
            .iter()
            .map(|p| p.tracks.iter().map(|&(_, t)| t.0).collect())
            .collect();
        self.matrix = CsrMatrix::from_rows(n_tracks, &rows);

        let mut df = vec![0u32; n_tracks];
        let mut pop = vec![0u32; n_tracks];
        for p in &self.playlists {
            for &(_, t) in &p.tracks {
                pop[t.index()] += 1;
            }
        }
        for r in 0..self.matrix.n_rows() {
            for &c in self.matrix.row(r) {
                df[c as usize] += 1;
            }
        }
        self.track_df = df;
        self.track_pop = pop;
    }

    /// Smoothed inverse document frequency: ln(1 + |playlists| / df).
    pub fn idf<S: Scalar>(&self, track: TrackId) -> Result<S, CorpusError> {
        let df = *self
            .track_df
            .get(track.index())
            .ok_or(CorpusError::UnknownTrack(track))?;
        if df == 0 {
            return Err(CorpusError::UnknownTrack(track));
        }
        let n = self.n_playlists() as f64;
        Ok(S::of_f64((1.0 + n / df as f64).ln()))
    }

    /// Per-track idf table; tracks absent from every playlist get 0.
    pub fn idf_table<S: Scalar>(&self) -> Vec<S> {
        let n = self.n_playlists() as f64;
        self.track_df
            .iter()
            .map(|&df| {
                if df == 0 {
                    S::zero()
                } else {
                    S::of_f64((1.0 + n / df as f64).ln())
                }
            })
            .collect()
    }

    /// All tracks sorted by total occurrence count descending, ties broken by
    /// ascending track id.
    pub fn popularity_ranking(&self) -> Vec<TrackId> {
        let mut ids: Vec<u32> = (0..self.n_tracks() as u32).collect();
        ids.sort_by(|&a, &b| {
            self.track_pop[b as usize]
                .cmp(&self.track_pop[a as usize])
                .then(a.cmp(&b))
        });
        ids.into_iter().map(TrackId).collect()
    }

    pub fn artist_of(&self, track: TrackId) -> ArtistId {
        self.track_artist[track.index()]
    }

    pub fn album_of(&self, track: TrackId) -> AlbumId {
        self.track_album[track.index()]
    }

    /// Copy of this corpus with the given playlists removed. The catalog and
    /// its interning are preserved; playlist ids are re-densified and the
    /// matrix and statistics recomputed over the remaining playlists.
    pub fn without_playlists(&self, remove: &HashSet<PlaylistId>) -> Corpus {
        let playlists: Vec<Playlist> = self
            .playlists
            .iter()
            .filter(|p| !remove.contains(&p.pid))
            .enumerate()
            .map(|(i, p)| {
                let mut q = p.clone();
                q.pid = PlaylistId(i as u32);
                q
            })
            .collect();
        let mut out = Corpus {
            playlists,
            tracks: self.tracks.clone(),
            artists: self.artists.clone(),
            albums: self.albums.clone(),
            track_artist: self.track_artist.clone(),
            track_album: self.track_album.clone(),
            track_names: self.track_names.clone(),
            artist_names: self.artist_names.clone(),
            album_names: self.album_names.clone(),
            matrix: CsrMatrix::default(),
            track_df: Vec::new(),
            track_pop: Vec::new(),
        };
        out.finalize();
        out
    }

    pub fn stats(&self) -> CorpusStats {
        let total_tracks: u64 = self.playlists.iter().map(|p| p.len() as u64).sum();
        let unique_titles: HashSet<&str> =
            self.playlists.iter().map(|p| p.name.as_str()).collect();
        let unique_normalized: HashSet<&str> = self
            .playlists
            .iter()
            .map(|p| p.normalized_name.as_str())
            .collect();
        CorpusStats {
            num_playlists: self.n_playlists() as u64,
            num_tracks: total_tracks,
            num_unique_tracks: self.tracks.len() as u64,
            num_unique_albums: self.albums.len() as u64,
            num_unique_artists: self.artists.len() as u64,
            num_unique_titles: unique_titles.len() as u64,
            num_unique_normalized_titles: unique_normalized.len() as u64,
            avg_playlist_length: if self.playlists.is_empty() {
                0.0
            } else {
                total_tracks as f64 / self.n_playlists() as f64
            },
        }
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), CorpusError> {
        snapshot::save(self, path)
    }

    pub fn load(path: &std::path::Path) -> Result<Corpus, CorpusError> {
        snapshot::load(path)
    }
}

/// Summary statistics of a corpus (one row per basic dataset property).
#[derive(Debug, Clone, Serialize)]
pub struct CorpusStats {
    pub num_playlists: u64,
    pub num_tracks: u64,
    pub num_unique_tracks: u64,
    pub num_unique_albums: u64,
    pub num_unique_artists: u64,
    pub num_unique_titles: u64,
    pub num_unique_normalized_titles: u64,
    pub avg_playlist_length: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::tiny_corpus;

    #[test]
    fn idf_matches_formula() {
        // 4 playlists; track "s" in 2 of them.
        let c = tiny_corpus(&[
            &["a", "s"],
            &["b", "s"],
            &["c"],
            &["d"],
        ]);
        let s = c.tracks.get("s").unwrap();
        let v: f64 = c.idf(TrackId(s)).unwrap();
        assert!((v - 1.0986122886681098).abs() < 1e-12); // ln(3)
    }

    #[test]
    fn idf_maximal_frequency_is_ln2() {
        for n in [1usize, 3, 17] {
            let rows: Vec<Vec<&str>> = (0..n).map(|_| vec!["x"]).collect();
            let slices: Vec<&[&str]> = rows.iter().map(|r| r.as_slice()).collect();
            let c = tiny_corpus(&slices);
            let v: f64 = c.idf(TrackId(0)).unwrap();
            assert!((v - 0.6931471805599453).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn idf_rare_track() {
        let mut rows: Vec<Vec<String>> = vec![vec!["rare".to_string()]];
        for i in 0..999 {
            rows.push(vec![format!("common{}", i % 3)]);
        }
        let refs: Vec<Vec<&str>> = rows
            .iter()
            .map(|r| r.iter().map(|s| s.as_str()).collect())
            .collect();
        let slices: Vec<&[&str]> = refs.iter().map(|r| r.as_slice()).collect();
        let c = tiny_corpus(&slices);
        let v: f64 = c.idf(TrackId(0)).unwrap();
        assert!((v - 6.90875477931522).abs() < 1e-12); // ln(1001)
    }

    #[test]
    fn idf_unknown_track_errors() {
        let c = tiny_corpus(&[&["a"]]);
        assert!(c.idf::<f64>(TrackId(99)).is_err());
    }

    #[test]
    fn popularity_ranking_sorts_with_tiebreak() {
        // pops: t0 appears 5x, t1 9x, t2 5x (within/across playlists)
        let c = tiny_corpus(&[
            &["t0", "t0", "t0", "t0", "t0", "t1", "t1", "t1", "t1"],
            &["t1", "t1", "t1", "t1", "t1", "t2", "t2", "t2", "t2", "t2"],
        ]);
        assert_eq!(c.track_pop, vec![5, 9, 5]);
        let ranked = c.popularity_ranking();
        assert_eq!(ranked, vec![TrackId(1), TrackId(0), TrackId(2)]);
    }

    #[test]
    fn popularity_ranking_all_equal_is_id_order() {
        let c = tiny_corpus(&[&["a", "b", "c"]]);
        assert_eq!(
            c.popularity_ranking(),
            vec![TrackId(0), TrackId(1), TrackId(2)]
        );
    }

    #[test]
    fn popularity_ranking_single_track() {
        let c = tiny_corpus(&[&["only"]]);
        assert_eq!(c.popularity_ranking(), vec![TrackId(0)]);
    }

    #[test]
    fn empty_corpus_popularity_is_empty() {
        let c = tiny_corpus(&[]);
        assert!(c.popularity_ranking().is_empty());
    }

    #[test]
    fn matrix_row_nnz_equals_dedup_count() {
        let c = tiny_corpus(&[&["a", "b", "a", "c", "b"]]);
        assert_eq!(c.matrix.row_nnz(0), 3);
        assert_eq!(c.playlists[0].len(), 5);
    }

    #[test]
    fn without_playlists_keeps_catalog_and_recounts() {
        let c = tiny_corpus(&[&["a", "b"], &["b", "c"], &["c"]]);
        let reduced = c.without_playlists(&[PlaylistId(1)].into_iter().collect());
        assert_eq!(reduced.n_tracks(), 3); // catalog preserved
        assert_eq!(reduced.n_playlists(), 2);
        assert_eq!(reduced.playlists[1].pid, PlaylistId(1)); // re-densified
        assert_eq!(reduced.track_df, vec![1, 1, 1]);
        assert_eq!(reduced.playlists[1].orig_pid, 2);
    }
}
