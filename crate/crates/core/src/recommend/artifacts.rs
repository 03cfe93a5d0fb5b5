//! Versioned binary serialization for trained model artifacts.
//!
//! Shared layout: 8-byte magic, u32 format version, u8 scalar tag (element
//! width), then the payload; all integers and floats little-endian. Loaders
//! validate structure and reject non-finite values, trailing bytes and
//! scalar-width mismatches instead of propagating garbage into scoring.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::binio::{
    expect_magic, read_string, read_u32, read_u64, read_u8, write_string, write_u32, write_u64,
    write_u8,
};
use crate::ids::TrackId;
use crate::scalar::Scalar;

use super::item_cf::ItemSimilarityIndex;
use super::title::{TitleEntry, TitleFactors, TitleIndex};
use super::wrmf::{FactorModel, WrmfParams};

pub const FORMAT_VERSION: u32 = 1;

const FACTOR_MAGIC: &[u8] = b"ENC.WRMF";
const ITEM_MAGIC: &[u8] = b"ENC.ITEM";
const TITLE_MAGIC: &[u8] = b"ENC.TITL";

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("io error on {file}: {source}")]
    Io {
        file: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("corrupt artifact {file}: {detail}")]
    Corrupt { file: PathBuf, detail: String },
}

pub(crate) fn wrap(file: &Path, e: io::Error) -> ArtifactError {
    match e.kind() {
        io::ErrorKind::InvalidData | io::ErrorKind::UnexpectedEof => ArtifactError::Corrupt {
            file: file.to_path_buf(),
            detail: e.to_string(),
        },
        _ => ArtifactError::Io { file: file.to_path_buf(), source: e },
    }
}

pub(crate) fn corrupt(detail: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, detail.into())
}

pub(crate) fn write_header<W: Write>(w: &mut W, magic: &[u8], tag: u8) -> io::Result<()> {
    w.write_all(magic)?;
    write_u32(w, FORMAT_VERSION)?;
    write_u8(w, tag)
}

pub(crate) fn read_header<R: Read>(r: &mut R, magic: &[u8], tag: u8) -> io::Result<()> {
    expect_magic(r, magic)?;
    let version = read_u32(r)?;
    if version != FORMAT_VERSION {
        return Err(corrupt(format!("unsupported format version {version}")));
    }
    let got = read_u8(r)?;
    if got != tag {
        return Err(corrupt(format!(
            "scalar width {got} bytes, this build expects {tag}"
        )));
    }
    Ok(())
}

fn write_f64<W: Write>(w: &mut W, v: f64) -> io::Result<()> {
    write_u64(w, v.to_bits())
}

fn read_f64<R: Read>(r: &mut R) -> io::Result<f64> {
    Ok(f64::from_bits(read_u64(r)?))
}

pub(crate) fn write_scalars<S: Scalar, W: Write>(w: &mut W, v: &[S]) -> io::Result<()> {
    for &x in v {
        x.write_le(w)?;
    }
    Ok(())
}

pub(crate) fn read_scalars<S: Scalar, R: Read>(r: &mut R, len: usize, what: &str) -> io::Result<Vec<S>> {
    let mut v = Vec::with_capacity(len);
    for _ in 0..len {
        let x = S::read_le(r)?;
        if !x.is_finite() {
            return Err(corrupt(format!("non-finite value in {what}")));
        }
        v.push(x);
    }
    Ok(v)
}

fn write_params<W: Write>(w: &mut W, p: &WrmfParams) -> io::Result<()> {
    write_u32(w, p.d as u32)?;
    write_f64(w, p.lambda)?;
    write_f64(w, p.alpha)?;
    write_u32(w, p.iterations as u32)?;
    write_u64(w, p.rng_seed)
}

fn read_params<R: Read>(r: &mut R) -> io::Result<WrmfParams> {
    let d = read_u32(r)? as usize;
    if d == 0 {
        return Err(corrupt("factor dimension is zero"));
    }
    let lambda = read_f64(r)?;
    let alpha = read_f64(r)?;
    let iterations = read_u32(r)? as usize;
    let rng_seed = read_u64(r)?;
    Ok(WrmfParams { d, lambda, alpha, iterations, rng_seed })
}

/// Errors unless the reader is exactly at end of file.
pub(crate) fn expect_eof<R: Read>(r: &mut R) -> io::Result<()> {
    let mut probe = [0u8; 1];
    match r.read(&mut probe)? {
        0 => Ok(()),
        _ => Err(corrupt("trailing bytes after payload")),
    }
}

pub fn save_factor_model<S: Scalar>(
    model: &FactorModel<S>,
    path: &Path,
) -> Result<(), ArtifactError> {
    let run = || -> io::Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        write_header(&mut w, FACTOR_MAGIC, S::DTYPE_TAG)?;
        write_params(&mut w, &model.params)?;
        write_u64(&mut w, model.n_playlists() as u64)?;
        write_u64(&mut w, model.n_tracks() as u64)?;
        write_scalars(&mut w, &model.playlist_factors)?;
        write_scalars(&mut w, &model.track_factors)?;
        w.flush()
    };
    run().map_err(|e| wrap(path, e))
}

pub fn load_factor_model<S: Scalar>(path: &Path) -> Result<FactorModel<S>, ArtifactError> {
    let run = || -> io::Result<FactorModel<S>> {
        let mut r = BufReader::new(File::open(path)?);
        read_header(&mut r, FACTOR_MAGIC, S::DTYPE_TAG)?;
        let params = read_params(&mut r)?;
        let n_playlists = read_u64(&mut r)? as usize;
        let n_tracks = read_u64(&mut r)? as usize;
        if params.d != 0 && n_playlists.checked_mul(params.d).is_none() {
            return Err(corrupt("factor table size overflows"));
        }
        let playlist_factors =
            read_scalars(&mut r, n_playlists * params.d, "playlist factors")?;
        let track_factors = read_scalars(&mut r, n_tracks * params.d, "track factors")?;
        expect_eof(&mut r)?;
        Ok(FactorModel { d: params.d, playlist_factors, track_factors, params })
    };
    run().map_err(|e| wrap(path, e))
}

pub fn save_item_index<S: Scalar>(
    index: &ItemSimilarityIndex<S>,
    path: &Path,
) -> Result<(), ArtifactError> {
    let run = || -> io::Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        write_header(&mut w, ITEM_MAGIC, S::DTYPE_TAG)?;
        write_u64(&mut w, index.cap as u64)?;
        write_u64(&mut w, index.neighbors.len() as u64)?;
        for list in &index.neighbors {
            write_u32(&mut w, list.len() as u32)?;
            for &(t, sim) in list {
                write_u32(&mut w, t.0)?;
                sim.write_le(&mut w)?;
            }
        }
        w.flush()
    };
    run().map_err(|e| wrap(path, e))
}

pub fn load_item_index<S: Scalar>(path: &Path) -> Result<ItemSimilarityIndex<S>, ArtifactError> {
    let run = || -> io::Result<ItemSimilarityIndex<S>> {
        let mut r = BufReader::new(File::open(path)?);
        read_header(&mut r, ITEM_MAGIC, S::DTYPE_TAG)?;
        let cap = read_u64(&mut r)? as usize;
        let n_tracks = read_u64(&mut r)? as usize;
        let mut neighbors = Vec::with_capacity(n_tracks);
        for t in 0..n_tracks {
            let len = read_u32(&mut r)? as usize;
            if len > cap {
                return Err(corrupt(format!("track {t}: neighbor list exceeds cap")));
            }
            let mut list: Vec<(TrackId, S)> = Vec::with_capacity(len);
            for _ in 0..len {
                let id = read_u32(&mut r)?;
                let sim = S::read_le(&mut r)?;
                if id as usize >= n_tracks || id as usize == t {
                    return Err(corrupt(format!("track {t}: bad neighbor id {id}")));
                }
                if !sim.is_finite() || sim <= S::zero() {
                    return Err(corrupt(format!("track {t}: non-positive similarity")));
                }
                list.push((TrackId(id), sim));
            }
            let ordered = list.windows(2).all(|w| {
                w[0].1 > w[1].1 || (w[0].1 == w[1].1 && w[0].0 < w[1].0)
            });
            if !ordered {
                return Err(corrupt(format!("track {t}: neighbor list out of order")));
            }
            neighbors.push(list);
        }
        expect_eof(&mut r)?;
        Ok(ItemSimilarityIndex { cap, neighbors })
    };
    run().map_err(|e| wrap(path, e))
}

pub fn save_title_index<S: Scalar>(
    index: &TitleIndex<S>,
    path: &Path,
) -> Result<(), ArtifactError> {
    let run = || -> io::Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        write_header(&mut w, TITLE_MAGIC, S::DTYPE_TAG)?;
        write_u64(&mut w, index.n_tracks as u64)?;
        write_u64(&mut w, index.entries.len() as u64)?;
        for e in &index.entries {
            write_string(&mut w, &e.key)?;
            write_u32(&mut w, e.tokens.len() as u32)?;
            for tok in &e.tokens {
                write_string(&mut w, tok)?;
            }
            write_u32(&mut w, e.n_playlists)?;
            write_u32(&mut w, e.track_counts.len() as u32)?;
            for &(t, c) in &e.track_counts {
                write_u32(&mut w, t.0)?;
                write_u32(&mut w, c)?;
            }
        }
        match &index.mf {
            None => write_u8(&mut w, 0)?,
            Some(mf) => {
                write_u8(&mut w, 1)?;
                write_params(&mut w, &mf.params)?;
                write_scalars(&mut w, &mf.title_factors)?;
                write_scalars(&mut w, &mf.track_factors)?;
            }
        }
        w.flush()
    };
    run().map_err(|e| wrap(path, e))
}

pub fn load_title_index<S: Scalar>(path: &Path) -> Result<TitleIndex<S>, ArtifactError> {
    let run = || -> io::Result<TitleIndex<S>> {
        let mut r = BufReader::new(File::open(path)?);
        read_header(&mut r, TITLE_MAGIC, S::DTYPE_TAG)?;
        let n_tracks = read_u64(&mut r)? as usize;
        let n_entries = read_u64(&mut r)? as usize;
        let mut entries = Vec::with_capacity(n_entries);
        for i in 0..n_entries {
            let key = read_string(&mut r)?;
            if let Some(TitleEntry { key: prev, .. }) = entries.last() {
                if *prev >= key {
                    return Err(corrupt(format!("entry {i}: keys out of order")));
                }
            }
            let n_tokens = read_u32(&mut r)? as usize;
            let mut tokens = std::collections::BTreeSet::new();
            for _ in 0..n_tokens {
                tokens.insert(read_string(&mut r)?);
            }
            let n_playlists = read_u32(&mut r)?;
            let n_counts = read_u32(&mut r)? as usize;
            let mut track_counts = Vec::with_capacity(n_counts);
            for _ in 0..n_counts {
                let t = read_u32(&mut r)?;
                let c = read_u32(&mut r)?;
                if t as usize >= n_tracks || c == 0 {
                    return Err(corrupt(format!("entry {i}: bad track count ({t}, {c})")));
                }
                track_counts.push((TrackId(t), c));
            }
            if track_counts.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(corrupt(format!("entry {i}: track counts out of order")));
            }
            entries.push(TitleEntry { key, tokens, n_playlists, track_counts });
        }
        let mf = match read_u8(&mut r)? {
            0 => None,
            1 => {
                let params = read_params(&mut r)?;
                let title_factors =
                    read_scalars(&mut r, entries.len() * params.d, "title factors")?;
                let track_factors =
                    read_scalars(&mut r, n_tracks * params.d, "track factors")?;
                Some(TitleFactors { d: params.d, title_factors, track_factors, params })
            }
            other => return Err(corrupt(format!("bad factor-presence flag {other}"))),
        };
        expect_eof(&mut r)?;
        Ok(TitleIndex::from_parts(entries, n_tracks, mf))
    };
    run().map_err(|e| wrap(path, e))
}
