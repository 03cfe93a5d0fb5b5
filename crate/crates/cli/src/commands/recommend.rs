use std::path::PathBuf;

use anyhow::{anyhow, Context, Result};
use clap::{Args, ValueEnum};
use encore_core::challenge::load_challenge_json;
use encore_core::ensemble::ranker::{load_ranker, rerank};
use encore_core::ensemble::{blend_candidates, EnsembleError, HybridConfig, ModelSet};
use encore_core::ids::TrackId;
use encore_core::recommend::artifacts::{load_factor_model, load_item_index, load_title_index};
use encore_core::recommend::popularity::recommend_popularity;
use encore_core::submission::{save_submission_csv, Submission, SUBMISSION_LENGTH};
use rayon::prelude::*;

use crate::manifest::Manifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Recommender {
    /// Blended first stage re-scored by the trained ranker
    Hybrid,
    /// Most popular catalog tracks, seeds excluded (baseline)
    Popularity,
}

/// Produce a full-length submission for every challenge playlist.
#[derive(Debug, Args)]
pub struct RecommendArgs {
    /// Training-corpus snapshot the models were fitted on
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,
    /// Challenge set JSON
    #[arg(long, value_name = "FILE")]
    pub challenge: PathBuf,
    /// Directory holding trained artifacts (output of `train`); required
    /// for the hybrid recommender
    #[arg(long, value_name = "DIR")]
    pub models: Option<PathBuf>,
    /// Output directory (created if missing)
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Hybrid config TOML overriding the one stored with the models
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Recommender::Hybrid)]
    pub recommender: Recommender,
    /// Team name stamped into the submission header
    #[arg(long, default_value = "encore")]
    pub team: String,
    /// Challenge track stamped into the submission header
    #[arg(long, default_value = "main")]
    pub track: String,
}

pub fn run(args: &RecommendArgs) -> Result<()> {
    let corpus = super::load_corpus(&args.corpus)?;
    let cs = load_challenge_json(&args.challenge, &corpus)?;

    let mut manifest = Manifest::new("recommend");
    let entries: Vec<(u64, Vec<TrackId>)> = match args.recommender {
        Recommender::Popularity => cs
            .playlists
            .par_iter()
            .map(|p| {
                let rec =
                    recommend_popularity::<f64>(&p.seed_set(), &corpus, SUBMISSION_LENGTH);
                if rec.len() < SUBMISSION_LENGTH {
                    return Err(EnsembleError::CatalogTooSmall {
                        need: SUBMISSION_LENGTH,
                        have: rec.len(),
                    });
                }
                Ok((p.pid, rec.tracks().collect()))
            })
            .collect::<Result<_, _>>()?,
        Recommender::Hybrid => {
            let dir = args
                .models
                .as_ref()
                .ok_or_else(|| anyhow!("--models is required for the hybrid recommender"))?;
            let factors_path = dir.join("factors.bin");
            let items_path = dir.join("item_index.bin");
            let titles_path = dir.join("title_index.bin");
            let ranker_path = dir.join("ranker.bin");
            let config_path = match &args.config {
                Some(path) => path.clone(),
                None => dir.join("hybrid.toml"),
            };
            let config = HybridConfig::load(&config_path)?;
            let models = ModelSet {
                item_index: load_item_index::<f64>(&items_path)?,
                factors: load_factor_model(&factors_path)?,
                titles: load_title_index(&titles_path)?,
                idf: corpus.idf_table(),
            };
            let ranker = load_ranker(&ranker_path)?;
            manifest
                .input("factors", &factors_path)?
                .input("item_index", &items_path)?
                .input("title_index", &titles_path)?
                .input("ranker", &ranker_path)?
                .input("hybrid_config", &config_path)?;

            cs.playlists
                .par_iter()
                .map(|p| {
                    let blend =
                        blend_candidates(p, &models, &config, &corpus, config.pool)?;
                    let rec =
                        rerank(p, &blend, &ranker, &corpus, &models.idf, SUBMISSION_LENGTH);
                    if rec.len() < SUBMISSION_LENGTH {
                        return Err(EnsembleError::CatalogTooSmall {
                            need: SUBMISSION_LENGTH,
                            have: rec.len(),
                        });
                    }
                    Ok((p.pid, rec.tracks().collect()))
                })
                .collect::<Result<_, _>>()?
        }
    };

    let sub = Submission {
        team: args.team.clone(),
        track: args.track.clone(),
        entries,
    };
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let sub_path = args.out.join("submission.csv");
    save_submission_csv(&sub, &corpus, &sub_path)?;

    let recommender = match args.recommender {
        Recommender::Hybrid => "hybrid",
        Recommender::Popularity => "popularity",
    };
    manifest
        .param("recommender", recommender)
        .param("team", &args.team)
        .param("track", &args.track)
        .input("corpus", &args.corpus)?
        .input("challenge", &args.challenge)?
        .output("submission", &args.out, &sub_path)?;
    manifest.write(&args.out)?;

    eprintln!(
        "submission: {} playlists x {} tracks ({})",
        sub.entries.len(),
        SUBMISSION_LENGTH,
        recommender
    );
    Ok(())
}
