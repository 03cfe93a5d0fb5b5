//! `encore` — playlist-continuation benchmark harness. Subcommands cover
//! the whole protocol: synthesize or ingest a corpus, withhold a challenge
//! set, train the recommender stack, emit full-length submissions, then
//! validate, score, and rank them.
//!
//! Conventions shared by every subcommand: results land in `--out` next to
//! a `manifest.json` of parameters and SHA-256 checksums; reports are
//! written as both plain text and JSON; `--threads` changes wall time and
//! nothing else; errors print one machine-readable JSON line on stderr and
//! exit 1 (usage errors exit 2).

mod commands;
mod manifest;

use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "encore", version, about = "Playlist-continuation benchmark harness")]
struct Cli {
    /// Worker threads for parallel sections (0 = all cores); outputs are
    /// byte-identical at any setting
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus
    Gen(commands::gen::GenArgs),
    /// Build a corpus snapshot from JSON slice files
    Ingest(commands::ingest::IngestArgs),
    /// Withhold tracks from sampled playlists to form a challenge set
    Split(commands::split::SplitArgs),
    /// Fit the recommender models and the pairwise re-ranker
    Train(commands::train::TrainArgs),
    /// Produce a 500-track submission for every challenge playlist
    Recommend(commands::recommend::RecommendArgs),
    /// Check a submission against the challenge rules
    Validate(commands::validate::ValidateArgs),
    /// Validate and score a submission against withheld ground truth
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Rank score reports by Borda count across the three metrics
    Leaderboard(commands::leaderboard::LeaderboardArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let line = serde_json::json!({
                "error": error_code(&err),
                "detail": format!("{err:#}"),
            });
            eprintln!("{line}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .context("initializing the thread pool")?;
    match &cli.command {
        Command::Gen(args) => commands::gen::run(args),
        Command::Ingest(args) => commands::ingest::run(args),
        Command::Split(args) => commands::split::run(args),
        Command::Train(args) => commands::train::run(args),
        Command::Recommend(args) => commands::recommend::run(args),
        Command::Validate(args) => commands::validate::run(args),
        Command::Evaluate(args) => commands::evaluate::run(args),
        Command::Leaderboard(args) => commands::leaderboard::run(args),
    }
}

/// Stable category for the machine-readable error line: the outermost
/// module error in the chain names the failing stage.
fn error_code(err: &anyhow::Error) -> &'static str {
    use encore_core as core;
    for cause in err.chain() {
        if cause.downcast_ref::<commands::ValidationFailed>().is_some() {
            return "validation";
        } else if cause.downcast_ref::<core::corpus::CorpusError>().is_some() {
            return "corpus";
        } else if cause.downcast_ref::<core::synthgen::GenError>().is_some() {
            return "synthgen";
        } else if cause.downcast_ref::<core::challenge::ChallengeError>().is_some() {
            return "challenge";
        } else if cause.downcast_ref::<core::recommend::RecommendError>().is_some() {
            return "recommend";
        } else if cause.downcast_ref::<core::recommend::artifacts::ArtifactError>().is_some() {
            return "artifact";
        } else if cause.downcast_ref::<core::ensemble::EnsembleError>().is_some() {
            return "ensemble";
        } else if cause.downcast_ref::<core::submission::SubmissionError>().is_some() {
            return "submission";
        } else if cause.downcast_ref::<core::metrics::MetricsError>().is_some() {
            return "metrics";
        } else if cause.downcast_ref::<std::io::Error>().is_some() {
            return "io";
        }
    }
    "cli"
}
