use std::collections::HashSet;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use encore_core::challenge::{build_challenge_set, save_challenge_json, save_ground_truth_json};
use encore_core::ids::PlaylistId;

use crate::manifest::Manifest;

/// Sample playlists into the ten challenge scenarios, withholding the rest
/// of each. Writes three files: the challenge set (seeds and titles only),
/// the withheld ground truth, and a training corpus with the sampled
/// playlists removed. Ground truth never appears in the challenge file.
#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Corpus snapshot to split
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,
    /// Output directory (created if missing)
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Challenge playlists drawn per scenario
    #[arg(long, default_value_t = 1000)]
    pub per_type: usize,
    /// RNG seed for sampling playlists and random-order seed positions
    #[arg(long, default_value_t = 13)]
    pub seed: u64,
}

pub fn run(args: &SplitArgs) -> Result<()> {
    let corpus = super::load_corpus(&args.corpus)?;
    let (cs, gt) = build_challenge_set(&corpus, args.per_type, args.seed)?;

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let challenge_path = args.out.join("challenge.json");
    let truth_path = args.out.join("ground_truth.json");
    let train_path = args.out.join("train_corpus.snap");

    save_challenge_json(&cs, &corpus, &challenge_path)?;
    save_ground_truth_json(&gt, &corpus, &truth_path)?;

    let held: HashSet<u64> = cs.playlists.iter().map(|p| p.pid).collect();
    let held_dense: HashSet<PlaylistId> = corpus
        .playlists
        .iter()
        .filter(|p| held.contains(&p.orig_pid))
        .map(|p| p.pid)
        .collect();
    let train = corpus.without_playlists(&held_dense);
    train.save(&train_path)?;

    let mut manifest = Manifest::new("split");
    manifest
        .param("per_type", args.per_type)
        .param("seed", args.seed)
        .input("corpus", &args.corpus)?
        .output("challenge", &args.out, &challenge_path)?
        .output("ground_truth", &args.out, &truth_path)?
        .output("train_corpus", &args.out, &train_path)?;
    manifest.write(&args.out)?;

    print!("{}", super::split_table(&cs));
    eprintln!(
        "training corpus keeps {} of {} playlists",
        train.n_playlists(),
        corpus.n_playlists()
    );
    Ok(())
}
