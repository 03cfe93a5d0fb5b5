//! Small corpus constructors shared by unit tests.

use crate::corpus::{normalize_title, Corpus, Playlist};
use crate::ids::{AlbumId, ArtistId, PlaylistId, TrackId};

/// Build a corpus from per-playlist track-uri lists. Each distinct uri gets
/// its own artist ("a:<uri>") and album ("b:<uri>"); titles are "list <i>".
pub fn tiny_corpus(rows: &[&[&str]]) -> Corpus {
    let titled: Vec<(String, &[&str])> = rows
        .iter()
        .enumerate()
        .map(|(i, &row)| (format!("list {i}"), row))
        .collect();
    let borrowed: Vec<(&str, &[&str])> =
        titled.iter().map(|(t, r)| (t.as_str(), *r)).collect();
    titled_corpus(&borrowed)
}

/// Like `tiny_corpus` but with explicit playlist titles.
pub fn titled_corpus(rows: &[(&str, &[&str])]) -> Corpus {
    let mut c = Corpus::default();
    for (i, &(title, row)) in rows.iter().enumerate() {
        let mut tracks = Vec::new();
        for (pos, &uri) in row.iter().enumerate() {
            let (a, a_new) = c.artists.intern(&format!("a:{uri}"));
            if a_new {
                c.artist_names.push(format!("artist {uri}"));
            }
            let (b, b_new) = c.albums.intern(&format!("b:{uri}"));
            if b_new {
                c.album_names.push(format!("album {uri}"));
            }
            let (t, t_new) = c.tracks.intern(uri);
            if t_new {
                c.track_artist.push(ArtistId(a));
                c.track_album.push(AlbumId(b));
                c.track_names.push(format!("track {uri}"));
            }
            tracks.push((pos as u32, TrackId(t)));
        }
        c.playlists.push(Playlist {
            pid: PlaylistId(i as u32),
            orig_pid: i as u64,
            name: title.to_string(),
            normalized_name: normalize_title(title),
            tracks,
            num_followers: 1,
            modified_at: 0,
        });
    }
    c.finalize();
    c
}
