use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use encore_core::corpus::write_json_slices;
use encore_core::synthgen::{generate, GenConfig};

use crate::manifest::Manifest;

/// Generate a synthetic corpus snapshot (and optionally JSON slices).
#[derive(Debug, Args)]
pub struct GenArgs {
    /// Output directory (created if missing)
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// RNG seed; same seed, same corpus, byte for byte
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Number of playlists
    #[arg(long, default_value_t = 10_000)]
    pub playlists: usize,
    #[arg(long, default_value_t = 20)]
    pub genres: usize,
    #[arg(long, default_value_t = 25)]
    pub artists_per_genre: usize,
    #[arg(long, default_value_t = 2)]
    pub albums_per_artist: usize,
    #[arg(long, default_value_t = 5)]
    pub tracks_per_album: usize,
    /// Shortest playlist (inclusive)
    #[arg(long, default_value_t = 10)]
    pub min_len: usize,
    /// Longest playlist (inclusive)
    #[arg(long, default_value_t = 160)]
    pub max_len: usize,
    /// Genre-mix sharpness: higher keeps each playlist inside fewer genres
    #[arg(long, default_value_t = 4.0)]
    pub concentration: f64,
    /// Also write the corpus as JSON slice files of N playlists each
    #[arg(long, value_name = "N")]
    pub slices: Option<usize>,
}

pub fn run(args: &GenArgs) -> Result<()> {
    let cfg = GenConfig {
        seed: args.seed,
        n_genres: args.genres,
        artists_per_genre: args.artists_per_genre,
        albums_per_artist: args.albums_per_artist,
        tracks_per_album: args.tracks_per_album,
        n_playlists: args.playlists,
        playlist_len_range: (args.min_len, args.max_len),
        genre_mix_concentration: args.concentration,
        title_vocab: Vec::new(),
    };
    let corpus = generate(&cfg)?;

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let snap = args.out.join("corpus.snap");
    corpus.save(&snap)?;
    let stats = corpus.stats();
    let stats_path = args.out.join("stats.json");
    super::write_json(&stats_path, &stats)?;

    let mut manifest = Manifest::new("gen");
    manifest
        .param("seed", args.seed)
        .param("playlists", args.playlists)
        .param("genres", args.genres)
        .param("artists_per_genre", args.artists_per_genre)
        .param("albums_per_artist", args.albums_per_artist)
        .param("tracks_per_album", args.tracks_per_album)
        .param("min_len", args.min_len)
        .param("max_len", args.max_len)
        .param("concentration", args.concentration);
    if let Some(size) = args.slices {
        manifest.param("slices", size);
        let written = write_json_slices(&corpus, &args.out.join("slices"), size)?;
        for path in &written {
            let name = format!(
                "slices/{}",
                path.file_name().unwrap_or_default().to_string_lossy()
            );
            manifest.output(&name, &args.out, path)?;
        }
    }
    manifest.output("corpus", &args.out, &snap)?;
    manifest.output("stats", &args.out, &stats_path)?;
    manifest.write(&args.out)?;

    print!("{}", super::stats_table(&stats));
    Ok(())
}
