//! Binary corpus snapshot: versioned header followed by little-endian string
//! and integer tables plus the CSR arrays, so a reload is bit-identical.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Corpus, CorpusError, Playlist};
use crate::binio;
use crate::ids::{AlbumId, ArtistId, Interner, PlaylistId, TrackId};
use crate::sparse::CsrMatrix;

const MAGIC: &[u8; 8] = b"ENCORPUS";
const VERSION: u32 = 1;

pub fn save(corpus: &Corpus, path: &Path) -> Result<(), CorpusError> {
    let io_err = |e: std::io::Error| CorpusError::Io {
        file: path.to_path_buf(),
        source: e,
    };
    let f = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(f);
    write_into(corpus, &mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

fn write_into<W: Write>(c: &Corpus, w: &mut W) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    binio::write_u32(w, VERSION)?;
    binio::write_u64(w, c.playlists.len() as u64)?;
    binio::write_u64(w, c.tracks.len() as u64)?;
    binio::write_u64(w, c.artists.len() as u64)?;
    binio::write_u64(w, c.albums.len() as u64)?;

    for uri in c.tracks.uris() {
        binio::write_string(w, uri)?;
    }
    for uri in c.artists.uris() {
        binio::write_string(w, uri)?;
    }
    for uri in c.albums.uris() {
        binio::write_string(w, uri)?;
    }
    let artist_ids: Vec<u32> = c.track_artist.iter().map(|a| a.0).collect();
    let album_ids: Vec<u32> = c.track_album.iter().map(|a| a.0).collect();
    binio::write_u32_slice(w, &artist_ids)?;
    binio::write_u32_slice(w, &album_ids)?;
    for name in &c.track_names {
        binio::write_string(w, name)?;
    }
    for name in &c.artist_names {
        binio::write_string(w, name)?;
    }
    for name in &c.album_names {
        binio::write_string(w, name)?;
    }

    for p in &c.playlists {
        binio::write_u64(w, p.orig_pid)?;
        binio::write_string(w, &p.name)?;
        binio::write_string(w, &p.normalized_name)?;
        binio::write_u64(w, p.num_followers)?;
        binio::write_i64(w, p.modified_at)?;
        let ids: Vec<u32> = p.tracks.iter().map(|&(_, t)| t.0).collect();
        binio::write_u32_slice(w, &ids)?;
    }

    binio::write_u64_slice(w, c.matrix.indptr())?;
    binio::write_u32_slice(w, c.matrix.indices())?;
    binio::write_u32_slice(w, &c.track_df)?;
    binio::write_u32_slice(w, &c.track_pop)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Corpus, CorpusError> {
    let f = File::open(path).map_err(|e| CorpusError::Io {
        file: path.to_path_buf(),
        source: e,
    })?;
    let mut r = BufReader::new(f);
    let corrupt = |detail: String| CorpusError::CorruptSnapshot {
        file: path.to_path_buf(),
        detail,
    };
    let c = read_from(&mut r).map_err(|e| corrupt(e.to_string()))?;
    let mut probe = [0u8; 1];
    if r.read(&mut probe).map_err(|e| corrupt(e.to_string()))? != 0 {
        return Err(corrupt("trailing bytes after snapshot".into()));
    }
    Ok(c)
}

fn read_from<R: Read>(r: &mut R) -> std::io::Result<Corpus> {
    let bad = |msg: String| std::io::Error::new(std::io::ErrorKind::InvalidData, msg);
    binio::expect_magic(r, MAGIC)?;
    let version = binio::read_u32(r)?;
    if version != VERSION {
        return Err(bad(format!("unsupported snapshot version {version}")));
    }
    let n_playlists = binio::read_u64(r)? as usize;
    let n_tracks = binio::read_u64(r)? as usize;
    let n_artists = binio::read_u64(r)? as usize;
    let n_albums = binio::read_u64(r)? as usize;

    let read_strings = |r: &mut R, n: usize| -> std::io::Result<Vec<String>> {
        (0..n).map(|_| binio::read_string(r)).collect()
    };
    let tracks = Interner::from_uris(read_strings(r, n_tracks)?)
        .map_err(|uri| bad(format!("duplicate track uri {uri}")))?;
    let artists = Interner::from_uris(read_strings(r, n_artists)?)
        .map_err(|uri| bad(format!("duplicate artist uri {uri}")))?;
    let albums = Interner::from_uris(read_strings(r, n_albums)?)
        .map_err(|uri| bad(format!("duplicate album uri {uri}")))?;
    let track_artist: Vec<ArtistId> = binio::read_u32_vec(r)?.into_iter().map(ArtistId).collect();
    let track_album: Vec<AlbumId> = binio::read_u32_vec(r)?.into_iter().map(AlbumId).collect();
    if track_artist.len() != n_tracks || track_album.len() != n_tracks {
        return Err(bad("track metadata table length mismatch".into()));
    }
    if track_artist.iter().any(|a| a.index() >= n_artists)
        || track_album.iter().any(|a| a.index() >= n_albums)
    {
        return Err(bad("track metadata references out-of-range id".into()));
    }
    let track_names = read_strings(r, n_tracks)?;
    let artist_names = read_strings(r, n_artists)?;
    let album_names = read_strings(r, n_albums)?;

    let mut playlists = Vec::with_capacity(n_playlists);
    for i in 0..n_playlists {
        let orig_pid = binio::read_u64(r)?;
        let name = binio::read_string(r)?;
        let normalized_name = binio::read_string(r)?;
        let num_followers = binio::read_u64(r)?;
        let modified_at = binio::read_i64(r)?;
        let ids = binio::read_u32_vec(r)?;
        if let Some(&t) = ids.iter().find(|&&t| t as usize >= n_tracks) {
            return Err(bad(format!("playlist {i} references out-of-range track {t}")));
        }
        playlists.push(Playlist {
            pid: PlaylistId(i as u32),
            orig_pid,
            name,
            normalized_name,
            tracks: ids
                .into_iter()
                .enumerate()
                .map(|(pos, t)| (pos as u32, TrackId(t)))
                .collect(),
            num_followers,
            modified_at,
        });
    }

    let indptr = binio::read_u64_vec(r)?;
    let indices = binio::read_u32_vec(r)?;
    let matrix = CsrMatrix::from_parts(n_playlists, n_tracks, indptr, indices)
        .map_err(|msg| bad(format!("bad CSR arrays: {msg}")))?;
    let track_df = binio::read_u32_vec(r)?;
    let track_pop = binio::read_u32_vec(r)?;
    if track_df.len() != n_tracks || track_pop.len() != n_tracks {
        return Err(bad("statistics table length mismatch".into()));
    }

    Ok(Corpus {
        playlists,
        tracks,
        artists,
        albums,
        track_artist,
        track_album,
        track_names,
        artist_names,
        album_names,
        matrix,
        track_df,
        track_pop,
    })
}
