//! Deterministic synthetic corpus generator with latent genre structure.
//!
//! The catalog is a fixed hierarchy (genre → artist → album → track). Each
//! playlist draws a genre mixture from a Dirichlet (normalized Gamma draws
//! whose sharpness is controlled by `genre_mix_concentration`), assigns every
//! slot to a genre by that mixture, then picks tracks within each genre by
//! Zipf-weighted sampling without replacement. The per-slot genre draw is
//! annealed along the playlist: early slots use a sharpened mixture and the
//! exponent decays to the raw mixture by the last slot, so the head leans on
//! the dominant genre while every prefix still samples the playlist's minor
//! genres — the opening of a playlist hints at its tail without spelling it
//! out. Titles are composed from the dominant genre's vocabulary, with a
//! fraction of genre-blind titles mixed in.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Gamma;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{normalize_title, Corpus, Playlist};
use crate::ids::{AlbumId, ArtistId, PlaylistId, TrackId};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("playlist length range ({min}, {max}) exceeds catalog of {catalog} tracks")]
    LengthExceedsCatalog {
        min: usize,
        max: usize,
        catalog: usize,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    pub n_genres: usize,
    pub artists_per_genre: usize,
    pub albums_per_artist: usize,
    pub tracks_per_album: usize,
    pub n_playlists: usize,
    /// Inclusive (min, max) playlist length.
    pub playlist_len_range: (usize, usize),
    /// Dirichlet-style sharpness: 1.0 gives a uniform Dirichlet; larger
    /// values concentrate each playlist on fewer genres.
    pub genre_mix_concentration: f64,
    /// Per-genre word lists for titles. Empty means the built-in vocabulary.
    pub title_vocab: Vec<Vec<String>>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 42,
            n_genres: 20,
            artists_per_genre: 25,
            albums_per_artist: 2,
            tracks_per_album: 5,
            n_playlists: 10_000,
            playlist_len_range: (10, 160),
            genre_mix_concentration: 4.0,
            title_vocab: Vec::new(),
        }
    }
}

impl GenConfig {
    pub fn tracks_per_genre(&self) -> usize {
        self.artists_per_genre * self.albums_per_artist * self.tracks_per_album
    }

    pub fn catalog_size(&self) -> usize {
        self.n_genres * self.tracks_per_genre()
    }

    fn validate(&self) -> Result<(), GenError> {
        let bad = |msg: &str| Err(GenError::InvalidConfig(msg.into()));
        if self.n_genres == 0
            || self.artists_per_genre == 0
            || self.albums_per_artist == 0
            || self.tracks_per_album == 0
        {
            return bad("catalog dimensions must all be positive");
        }
        let (min, max) = self.playlist_len_range;
        if min < 1 {
            return bad("playlist_len_range minimum must be at least 1");
        }
        if max < min {
            return bad("playlist_len_range maximum must be >= minimum");
        }
        if !(self.genre_mix_concentration > 0.0 && self.genre_mix_concentration.is_finite()) {
            return bad("genre_mix_concentration must be positive and finite");
        }
        if !self.title_vocab.is_empty() {
            if self.title_vocab.len() != self.n_genres {
                return bad("title_vocab must have one word list per genre");
            }
            if self.title_vocab.iter().any(|v| v.is_empty()) {
                return bad("title_vocab word lists must be nonempty");
            }
        }
        if max > self.catalog_size() {
            return Err(GenError::LengthExceedsCatalog {
                min,
                max,
                catalog: self.catalog_size(),
            });
        }
        Ok(())
    }
}

const THEMES: [&str; 24] = [
    "rock", "indie", "metal", "punk", "jazz", "blues", "soul", "funk", "country", "folk",
    "bluegrass", "americana", "rap", "hiphop", "trap", "rnb", "edm", "house", "techno", "trance",
    "pop", "disco", "latin", "reggae",
];

/// Genre-blind words usable on their own or as suffixes.
const MODIFIERS: [&str; 12] = [
    "mix", "vibes", "jams", "essentials", "hits", "favorites", "anthems", "classics", "radio",
    "party", "drive", "mood",
];

fn default_title_vocab(n_genres: usize) -> Vec<Vec<String>> {
    (0..n_genres)
        .map(|g| {
            let word = if g < THEMES.len() {
                THEMES[g].to_string()
            } else {
                format!("{}{}", THEMES[g % THEMES.len()], g / THEMES.len() + 1)
            };
            vec![word]
        })
        .collect()
}

/// Slot 0 draws its genre from the mixture raised to `1 + HEAD_SHARPNESS`;
/// the exponent decays linearly to 1 (the raw mixture) at the last slot.
const HEAD_SHARPNESS: f64 = 1.5;

pub fn generate(cfg: &GenConfig) -> Result<Corpus, GenError> {
    cfg.validate()?;
    let per_genre = cfg.tracks_per_genre();
    let catalog = cfg.catalog_size();
    let n_albums = catalog / cfg.tracks_per_album;
    let n_artists = n_albums / cfg.albums_per_artist;

    let mut c = Corpus::default();
    for a in 0..n_artists {
        let (id, fresh) = c.artists.intern(&format!("synth:artist:{a}"));
        debug_assert!(fresh && id as usize == a);
        c.artist_names.push(format!("Artist {a}"));
    }
    for b in 0..n_albums {
        let (id, fresh) = c.albums.intern(&format!("synth:album:{b}"));
        debug_assert!(fresh && id as usize == b);
        c.album_names.push(format!("Album {b}"));
    }
    for t in 0..catalog {
        let (id, fresh) = c.tracks.intern(&format!("synth:track:{t}"));
        debug_assert!(fresh && id as usize == t);
        let album = t / cfg.tracks_per_album;
        c.track_album.push(AlbumId(album as u32));
        c.track_artist.push(ArtistId((album / cfg.albums_per_artist) as u32));
        c.track_names.push(format!("Track {t}"));
    }

    let vocab = if cfg.title_vocab.is_empty() {
        default_title_vocab(cfg.n_genres)
    } else {
        cfg.title_vocab.clone()
    };
    let alpha = 1.0 / cfg.genre_mix_concentration;
    let (min_len, max_len) = cfg.playlist_len_range;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for i in 0..cfg.n_playlists {
        let len = rng.gen_range(min_len..=max_len);
        let weights = sample_mixture(&mut rng, cfg.n_genres, alpha);

        // Genre assignment per slot, annealed from sharp to raw mixture.
        let genre_seq: Vec<usize> = (0..len)
            .map(|p| {
                let along = if len > 1 { p as f64 / (len - 1) as f64 } else { 1.0 };
                let beta = 1.0 + HEAD_SHARPNESS * (1.0 - along);
                let sharpened: Vec<f64> = weights.iter().map(|w| w.powf(beta)).collect();
                let dist =
                    WeightedIndex::new(&sharpened).expect("mixture has a positive weight");
                dist.sample(&mut rng)
            })
            .collect();
        let mut counts = vec![0usize; cfg.n_genres];
        for &g in &genre_seq {
            counts[g] += 1;
        }

        // Within-genre Zipf sampling without replacement, genres visited in
        // ascending id order to keep the RNG stream stable.
        let mut blocks: Vec<Vec<u32>> = vec![Vec::new(); cfg.n_genres];
        let mut shortfall = 0usize;
        for (g, block) in blocks.iter_mut().enumerate() {
            let want = counts[g];
            if want == 0 {
                continue;
            }
            let take = want.min(per_genre);
            shortfall += want - take;
            *block = zipf_sample(&mut rng, per_genre, take)
                .into_iter()
                .map(|r| (g * per_genre + r) as u32)
                .collect();
        }

        let mut order: Vec<usize> = (0..cfg.n_genres).collect();
        order.sort_by(|&a, &b| {
            weights[b]
                .partial_cmp(&weights[a])
                .expect("mixture weights are finite")
                .then(a.cmp(&b))
        });

        // Overflow for exhausted genres comes from the strongest genres'
        // most popular unused tracks (deterministic, no RNG).
        let mut overflow: Vec<u32> = Vec::with_capacity(shortfall);
        for &g in &order {
            if overflow.len() == shortfall {
                break;
            }
            let mut used: Vec<bool> = vec![false; per_genre];
            for &t in &blocks[g] {
                used[t as usize - g * per_genre] = true;
            }
            for r in 0..per_genre {
                if overflow.len() == shortfall {
                    break;
                }
                if !used[r] {
                    overflow.push((g * per_genre + r) as u32);
                }
            }
        }

        // Lay tracks into the slot sequence, consuming each genre's block
        // in draw order; slots of exhausted genres take overflow tracks.
        let mut next = vec![0usize; cfg.n_genres];
        let mut spill = overflow.into_iter();
        let mut tracks = Vec::with_capacity(len);
        for &g in &genre_seq {
            let t = if next[g] < blocks[g].len() {
                next[g] += 1;
                blocks[g][next[g] - 1]
            } else {
                spill.next().expect("overflow sized to the shortfall")
            };
            tracks.push((tracks.len() as u32, TrackId(t)));
        }
        debug_assert_eq!(tracks.len(), len);

        let name = compose_title(&mut rng, &vocab[order[0]]);
        let normalized_name = normalize_title(&name);
        let num_followers = rng.gen_range(1..=20);
        let modified_at = 1_400_000_000 + rng.gen_range(0..100_000_000i64);
        c.playlists.push(Playlist {
            pid: PlaylistId(i as u32),
            orig_pid: i as u64,
            name,
            normalized_name,
            tracks,
            num_followers,
            modified_at,
        });
    }

    c.finalize();
    Ok(c)
}

/// Dirichlet(alpha, ..., alpha) draw via normalized Gammas. Extremely small
/// alpha can underflow every draw to zero; that regime means "degenerate
/// mixture", so it falls back to a uniformly chosen one-hot vector.
fn sample_mixture(rng: &mut ChaCha8Rng, n: usize, alpha: f64) -> Vec<f64> {
    let gamma = Gamma::new(alpha, 1.0).expect("alpha validated positive");
    let draws: Vec<f64> = (0..n).map(|_| gamma.sample(rng)).collect();
    let sum: f64 = draws.iter().sum();
    if !(sum > 0.0 && sum.is_finite()) || draws.iter().any(|d| !d.is_finite()) {
        let hot = rng.gen_range(0..n);
        let mut w = vec![0.0; n];
        w[hot] = 1.0;
        return w;
    }
    draws.into_iter().map(|d| d / sum).collect()
}

/// Weighted sampling of `k` distinct local ranks from 0..n with weight
/// 1/(rank+1), via the exponent trick: draw u^(1/w) per candidate and keep
/// the k largest keys; the key order is the draw order.
fn zipf_sample(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize)> = (0..n)
        .map(|r| {
            let u: f64 = rng.gen();
            (u.powi(r as i32 + 1), r)
        })
        .collect();
    keyed.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("keys are finite").then(a.1.cmp(&b.1)));
    keyed.truncate(k);
    keyed.into_iter().map(|(_, r)| r).collect()
}

fn compose_title(rng: &mut ChaCha8Rng, words: &[String]) -> String {
    let style = rng.gen_range(0..100u32);
    let theme = &words[rng.gen_range(0..words.len())];
    let modifier = MODIFIERS[rng.gen_range(0..MODIFIERS.len())];
    let base = if style < 40 {
        theme.clone()
    } else if style < 75 {
        format!("{theme} {modifier}")
    } else {
        // Genre-blind title: carries no signal about the contents.
        modifier.to_string()
    };
    match rng.gen_range(0..10u32) {
        0..=5 => base,
        6 | 7 => {
            // Title Case
            base.split(' ')
                .map(|w| {
                    let mut cs = w.chars();
                    match cs.next() {
                        Some(f) => f.to_uppercase().chain(cs).collect::<String>(),
                        None => String::new(),
                    }
                })
                .collect::<Vec<_>>()
                .join(" ")
        }
        8 => base.to_uppercase(),
        _ => format!("{base}!"),
    }
}

/// Genre that owns a track under a given config (catalog layout helper).
pub fn genre_of(cfg: &GenConfig, track: TrackId) -> usize {
    track.index() / cfg.tracks_per_genre()
}
