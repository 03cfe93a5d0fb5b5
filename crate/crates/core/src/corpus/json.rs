//! JSON slice ingestion and emission. A slice file is either a bare array of
//! playlist objects or an object with a "playlists" field (the shape of the
//! usual playlist dump exports). Unknown fields are ignored.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Corpus, CorpusError, Playlist};
use crate::ids::PlaylistId;

#[derive(Deserialize)]
struct RawPlaylist {
    pid: Option<u64>,
    name: Option<String>,
    num_followers: Option<u64>,
    modified_at: Option<i64>,
    tracks: Option<Vec<RawTrack>>,
}

#[derive(Deserialize)]
struct RawTrack {
    pos: Option<u32>,
    track_uri: Option<String>,
    artist_uri: Option<String>,
    album_uri: Option<String>,
    track_name: Option<String>,
    artist_name: Option<String>,
    album_name: Option<String>,
}

/// Read and intern a list of JSON slice files, in the order given.
pub fn ingest<P: AsRef<Path>>(paths: &[P]) -> Result<Corpus, CorpusError> {
    let mut b = Builder::default();
    for p in paths {
        let p = p.as_ref();
        let f = File::open(p).map_err(|e| CorpusError::Io {
            file: p.to_path_buf(),
            source: e,
        })?;
        b.add(p, BufReader::new(f))?;
    }
    Ok(b.finish())
}

/// Ingest from in-memory readers; `name` stands in for the file path in
/// error messages.
pub fn ingest_readers<R: Read>(files: Vec<(PathBuf, R)>) -> Result<Corpus, CorpusError> {
    let mut b = Builder::default();
    for (name, r) in files {
        b.add(&name, r)?;
    }
    Ok(b.finish())
}

#[derive(Default)]
struct Builder {
    corpus: Corpus,
    seen_pids: HashSet<u64>,
}

impl Builder {
    fn add<R: Read>(&mut self, file: &Path, reader: R) -> Result<(), CorpusError> {
        let value: serde_json::Value =
            serde_json::from_reader(reader).map_err(|e| CorpusError::Parse {
                file: file.to_path_buf(),
                detail: e.to_string(),
            })?;
        let raw_list = match value {
            serde_json::Value::Array(_) => value,
            serde_json::Value::Object(mut map) => {
                map.remove("playlists").ok_or_else(|| CorpusError::Schema {
                    file: file.to_path_buf(),
                    detail: "missing required field \"playlists\"".into(),
                })?
            }
            _ => {
                return Err(CorpusError::Schema {
                    file: file.to_path_buf(),
                    detail: "top level must be an array of playlists or an object \
                             with a \"playlists\" field"
                        .into(),
                })
            }
        };
        let raw: Vec<RawPlaylist> =
            serde_json::from_value(raw_list).map_err(|e| CorpusError::Parse {
                file: file.to_path_buf(),
                detail: e.to_string(),
            })?;
        for rp in raw {
            self.add_playlist(file, rp)?;
        }
        Ok(())
    }

    fn add_playlist(&mut self, file: &Path, rp: RawPlaylist) -> Result<(), CorpusError> {
        let missing = |field: &str| CorpusError::Schema {
            file: file.to_path_buf(),
            detail: format!("missing required field \"{field}\""),
        };
        let orig_pid = rp.pid.ok_or_else(|| missing("pid"))?;
        if !self.seen_pids.insert(orig_pid) {
            return Err(CorpusError::DuplicatePid { pid: orig_pid });
        }
        let raw_tracks = rp.tracks.ok_or_else(|| missing("tracks"))?;

        let c = &mut self.corpus;
        let mut entries: Vec<(u32, crate::ids::TrackId)> = Vec::with_capacity(raw_tracks.len());
        for (i, rt) in raw_tracks.into_iter().enumerate() {
            let track_uri = rt.track_uri.ok_or_else(|| missing("track_uri"))?;
            let artist_uri = rt.artist_uri.ok_or_else(|| missing("artist_uri"))?;
            let album_uri = rt.album_uri.ok_or_else(|| missing("album_uri"))?;

            let (artist_idx, artist_new) = c.artists.intern(&artist_uri);
            if artist_new {
                c.artist_names.push(rt.artist_name.unwrap_or_default());
            }
            let (album_idx, album_new) = c.albums.intern(&album_uri);
            if album_new {
                c.album_names.push(rt.album_name.unwrap_or_default());
            }
            let (track_idx, track_new) = c.tracks.intern(&track_uri);
            if track_new {
                c.track_artist.push(crate::ids::ArtistId(artist_idx));
                c.track_album.push(crate::ids::AlbumId(album_idx));
                c.track_names.push(rt.track_name.unwrap_or_default());
            }
            entries.push((rt.pos.unwrap_or(i as u32), crate::ids::TrackId(track_idx)));
        }
        // Order by the declared position, then close any gaps so positions
        // are always 0..k-1.
        entries.sort_by_key(|&(pos, _)| pos);
        let tracks: Vec<(u32, crate::ids::TrackId)> = entries
            .into_iter()
            .enumerate()
            .map(|(i, (_, t))| (i as u32, t))
            .collect();

        let name = rp.name.unwrap_or_default();
        let normalized_name = super::normalize_title(&name);
        c.playlists.push(Playlist {
            pid: PlaylistId(c.playlists.len() as u32),
            orig_pid,
            name,
            normalized_name,
            tracks,
            num_followers: rp.num_followers.unwrap_or(0),
            modified_at: rp.modified_at.unwrap_or(0),
        });
        Ok(())
    }

    fn finish(mut self) -> Corpus {
        self.corpus.finalize();
        self.corpus
    }
}

#[derive(Serialize)]
struct SliceFile<'a> {
    info: SliceInfo,
    playlists: Vec<PlaylistOut<'a>>,
}

#[derive(Serialize)]
struct SliceInfo {
    slice: String,
    version: &'static str,
}

#[derive(Serialize)]
struct PlaylistOut<'a> {
    name: &'a str,
    collaborative: &'static str,
    pid: u64,
    modified_at: i64,
    num_albums: usize,
    num_tracks: usize,
    num_followers: u64,
    num_artists: usize,
    tracks: Vec<TrackOut<'a>>,
}

#[derive(Serialize)]
struct TrackOut<'a> {
    pos: u32,
    artist_name: &'a str,
    track_uri: &'a str,
    artist_uri: &'a str,
    track_name: &'a str,
    album_uri: &'a str,
    album_name: &'a str,
}

/// Write the corpus back out as JSON slice files of `slice_size` playlists
/// each, in the same format `ingest` reads. Returns the paths written.
pub fn write_json_slices(
    corpus: &Corpus,
    dir: &Path,
    slice_size: usize,
) -> Result<Vec<PathBuf>, CorpusError> {
    assert!(slice_size > 0, "slice_size must be positive");
    let io_err = |e: std::io::Error| CorpusError::Io {
        file: dir.to_path_buf(),
        source: e,
    };
    std::fs::create_dir_all(dir).map_err(io_err)?;

    let mut written = Vec::new();
    let chunks: Vec<&[Playlist]> = if corpus.playlists.is_empty() {
        vec![&[]]
    } else {
        corpus.playlists.chunks(slice_size).collect()
    };
    for (ci, chunk) in chunks.iter().enumerate() {
        let start = ci * slice_size;
        let end = start + slice_size - 1;
        let playlists: Vec<PlaylistOut> = chunk
            .iter()
            .map(|p| {
                let albums: HashSet<u32> =
                    p.tracks.iter().map(|&(_, t)| corpus.track_album[t.index()].0).collect();
                let artists: HashSet<u32> =
                    p.tracks.iter().map(|&(_, t)| corpus.track_artist[t.index()].0).collect();
                PlaylistOut {
                    name: &p.name,
                    collaborative: "false",
                    pid: p.orig_pid,
                    modified_at: p.modified_at,
                    num_albums: albums.len(),
                    num_tracks: p.tracks.len(),
                    num_followers: p.num_followers,
                    num_artists: artists.len(),
                    tracks: p
                        .tracks
                        .iter()
                        .map(|&(pos, t)| TrackOut {
                            pos,
                            artist_name: &corpus.artist_names[corpus.track_artist[t.index()].index()],
                            track_uri: corpus.tracks.uri(t.0),
                            artist_uri: corpus.artists.uri(corpus.track_artist[t.index()].0),
                            track_name: &corpus.track_names[t.index()],
                            album_uri: corpus.albums.uri(corpus.track_album[t.index()].0),
                            album_name: &corpus.album_names[corpus.track_album[t.index()].index()],
                        })
                        .collect(),
                }
            })
            .collect();
        let slice = SliceFile {
            info: SliceInfo {
                slice: format!("{start}-{end}"),
                version: "v1",
            },
            playlists,
        };
        let path = dir.join(format!("slice.{start}-{end}.json"));
        let f = File::create(&path).map_err(|e| CorpusError::Io {
            file: path.clone(),
            source: e,
        })?;
        let mut w = BufWriter::new(f);
        serde_json::to_writer_pretty(&mut w, &slice).map_err(|e| CorpusError::Parse {
            file: path.clone(),
            detail: e.to_string(),
        })?;
        w.write_all(b"\n").map_err(|e| CorpusError::Io {
            file: path.clone(),
            source: e,
        })?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    const SAMPLE: &str = r#"{
        "info": {"slice": "0-999", "version": "v1"},
        "playlists": [{
            "name": "musical",
            "collaborative": "false",
            "pid": 5,
            "modified_at": 1493424000,
            "num_albums": 7,
            "num_tracks": 12,
            "num_followers": 1,
            "num_edits": 2,
            "duration_ms": 2657366,
            "num_artists": 6,
            "tracks": [
                {
                    "pos": 0,
                    "artist_name": "Degiheugi",
                    "track_uri": "spotify:track:7vqa3sDmtEaVJ2gcvxtRID",
                    "artist_uri": "spotify:artist:3V2paBXEoZIAhfZRJmo2jL",
                    "track_name": "Finalement",
                    "album_uri": "spotify:album:2KrRMJ9z7Xjoz1Az4O6UML",
                    "duration_ms": 166264,
                    "album_name": "Dancing Chords and Fireflies"
                },
                {
                    "pos": 1,
                    "artist_name": "Degiheugi",
                    "track_uri": "spotify:track:23EOmJivOZ88WJPUbIPjh6",
                    "artist_uri": "spotify:artist:3V2paBXEoZIAhfZRJmo2jL",
                    "track_name": "Betty",
                    "album_uri": "spotify:album:3lUSlvjUoHNA8IkNTqURqd",
                    "duration_ms": 235534,
                    "album_name": "Endless Smile"
                },
                {
                    "pos": 2,
                    "artist_name": "Degiheugi",
                    "track_uri": "spotify:track:1vaffTCJxkyqeJY7zF9a55",
                    "artist_uri": "spotify:artist:3V2paBXEoZIAhfZRJmo2jL",
                    "track_name": "Some Beat in My Head",
                    "album_uri": "spotify:album:2KrRMJ9z7Xjoz1Az4O6UML",
                    "duration_ms": 268050,
                    "album_name": "Dancing Chords and Fireflies"
                }
            ]
        }]
    }"#;

    fn from_str(s: &str) -> Result<Corpus, CorpusError> {
        ingest_readers(vec![(PathBuf::from("test.json"), Cursor::new(s.as_bytes()))])
    }

    #[test]
    fn sample_slice_interns_catalog() {
        let c = from_str(SAMPLE).unwrap();
        assert_eq!(c.n_playlists(), 1);
        assert_eq!(c.n_tracks(), 3);
        assert_eq!(c.artists.len(), 1);
        assert_eq!(c.albums.len(), 2);
        assert_eq!(c.artist_names[0], "Degiheugi");
        let p = &c.playlists[0];
        assert_eq!(p.orig_pid, 5);
        assert_eq!(p.name, "musical");
        assert_eq!(p.normalized_name, "musical");
        assert_eq!(p.num_followers, 1);
        assert_eq!(p.tracks.iter().map(|&(pos, _)| pos).collect::<Vec<_>>(), vec![0, 1, 2]);
        // Tracks 0 and 2 share an album, track 1 does not.
        assert_eq!(c.track_album[0], c.track_album[2]);
        assert_ne!(c.track_album[0], c.track_album[1]);
    }

    #[test]
    fn bare_array_is_accepted() {
        let c = from_str(
            r#"[{"pid": 1, "name": "x", "tracks": [
                {"track_uri": "t:1", "artist_uri": "a:1", "album_uri": "b:1"}
            ]}]"#,
        )
        .unwrap();
        assert_eq!(c.n_playlists(), 1);
        assert_eq!(c.n_tracks(), 1);
    }

    #[test]
    fn empty_playlist_list() {
        let c = from_str("[]").unwrap();
        assert_eq!(c.n_playlists(), 0);
        assert_eq!(c.n_tracks(), 0);
    }

    #[test]
    fn shared_track_counts_df() {
        let c = from_str(
            r#"[
                {"pid": 1, "tracks": [{"track_uri": "t:1", "artist_uri": "a:1", "album_uri": "b:1"}]},
                {"pid": 2, "tracks": [{"track_uri": "t:1", "artist_uri": "a:1", "album_uri": "b:1"}]}
            ]"#,
        )
        .unwrap();
        assert_eq!(c.track_df, vec![2]);
    }

    #[test]
    fn malformed_json_is_parse_error() {
        let err = from_str("{not json").unwrap_err();
        match err {
            CorpusError::Parse { detail, .. } => {
                assert!(detail.contains("line"), "want offset info, got: {detail}")
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_fields_are_schema_errors() {
        for (json, field) in [
            (r#"[{"tracks": []}]"#, "pid"),
            (r#"[{"pid": 1}]"#, "tracks"),
            (
                r#"[{"pid": 1, "tracks": [{"artist_uri": "a", "album_uri": "b"}]}]"#,
                "track_uri",
            ),
            (
                r#"[{"pid": 1, "tracks": [{"track_uri": "t", "album_uri": "b"}]}]"#,
                "artist_uri",
            ),
            (
                r#"[{"pid": 1, "tracks": [{"track_uri": "t", "artist_uri": "a"}]}]"#,
                "album_uri",
            ),
        ] {
            match from_str(json).unwrap_err() {
                CorpusError::Schema { detail, .. } => {
                    assert!(detail.contains(field), "{json}: {detail}")
                }
                other => panic!("{json}: expected schema error, got {other:?}"),
            }
        }
    }

    #[test]
    fn duplicate_pid_across_files_rejected() {
        let one = r#"[{"pid": 7, "tracks": []}]"#;
        let err = ingest_readers(vec![
            (PathBuf::from("a.json"), Cursor::new(one.as_bytes())),
            (PathBuf::from("b.json"), Cursor::new(one.as_bytes())),
        ])
        .unwrap_err();
        assert!(matches!(err, CorpusError::DuplicatePid { pid: 7 }));
    }

    #[test]
    fn out_of_order_positions_are_renumbered() {
        let c = from_str(
            r#"[{"pid": 1, "tracks": [
                {"pos": 9, "track_uri": "t:b", "artist_uri": "a:1", "album_uri": "b:1"},
                {"pos": 2, "track_uri": "t:a", "artist_uri": "a:1", "album_uri": "b:1"}
            ]}]"#,
        )
        .unwrap();
        let p = &c.playlists[0];
        assert_eq!(p.tracks[0], (0, crate::ids::TrackId(1))); // t:a first
        assert_eq!(p.tracks[1], (1, crate::ids::TrackId(0)));
    }

    #[test]
    fn slice_round_trip_preserves_everything() {
        let c = from_str(SAMPLE).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let paths = write_json_slices(&c, dir.path(), 500).unwrap();
        assert_eq!(paths.len(), 1);
        let c2 = ingest(&paths).unwrap();
        assert_eq!(c.playlists, c2.playlists);
        assert_eq!(c.tracks, c2.tracks);
        assert_eq!(c.matrix, c2.matrix);
        assert_eq!(c.track_names, c2.track_names);
        assert_eq!(c.album_names, c2.album_names);
    }
}
