//! Corpus construction helpers shared by the integration suites. Everything
//! goes through the public JSON ingestion path so these tests exercise the
//! same entry points a user has.

#![allow(dead_code)]

use std::io::Cursor;
use std::path::PathBuf;

use encore_core::corpus::ingest_readers;
use encore_core::Corpus;
use rand::Rng;

/// Builds a corpus from (title, [(track, artist)]) pairs. Albums mirror
/// artists one-to-one.
pub fn corpus_with_artists(playlists: &[(String, Vec<(String, String)>)]) -> Corpus {
    let docs: Vec<serde_json::Value> = playlists
        .iter()
        .enumerate()
        .map(|(pid, (title, tracks))| {
            let tracks: Vec<serde_json::Value> = tracks
                .iter()
                .enumerate()
                .map(|(pos, (t, a))| {
                    serde_json::json!({
                        "pos": pos,
                        "track_uri": format!("track:{t}"),
                        "artist_uri": format!("artist:{a}"),
                        "album_uri": format!("album:{a}"),
                        "track_name": t,
                        "artist_name": a,
                        "album_name": a,
                    })
                })
                .collect();
            serde_json::json!({ "pid": pid, "name": title, "tracks": tracks })
        })
        .collect();
    let body = serde_json::json!({
        "info": { "slice": "0-0", "version": "v1" },
        "playlists": docs,
    });
    ingest_readers(vec![(PathBuf::from("<memory>"), Cursor::new(body.to_string()))])
        .expect("synthesized slice ingests")
}

/// Simple variant: every distinct track name is its own artist.
pub fn corpus(playlists: &[(&str, &[&str])]) -> Corpus {
    let own: Vec<(String, Vec<(String, String)>)> = playlists
        .iter()
        .map(|(title, ts)| {
            (
                title.to_string(),
                ts.iter().map(|t| (t.to_string(), t.to_string())).collect(),
            )
        })
        .collect();
    corpus_with_artists(&own)
}

/// Random corpus: playlists draw unique tracks from a catalog of `n_tracks`,
/// with `per_artist` consecutive tracks sharing an artist.
pub fn random_corpus<R: Rng>(
    rng: &mut R,
    n_playlists: usize,
    n_tracks: usize,
    len_range: (usize, usize),
    per_artist: usize,
) -> Corpus {
    let lists: Vec<(String, Vec<(String, String)>)> = (0..n_playlists)
        .map(|i| {
            let len = rng.gen_range(len_range.0..=len_range.1.min(n_tracks));
            let mut picks: Vec<usize> = (0..n_tracks).collect();
            for k in 0..len {
                let j = rng.gen_range(k..n_tracks);
                picks.swap(k, j);
            }
            let tracks = picks[..len]
                .iter()
                .map(|&t| (format!("t{t}"), format!("a{}", t / per_artist.max(1))))
                .collect();
            (format!("list {i}"), tracks)
        })
        .collect();
    corpus_with_artists(&lists)
}
