use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use encore_core::challenge::load_challenge_json;
use encore_core::submission::{load_submission_csv, validate_submission};

use crate::manifest::Manifest;

/// Check a submission against the challenge rules: every pid answered with
/// exactly 500 unique known tracks, none of them seeds. Exits nonzero when
/// the submission fails.
#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Corpus snapshot that defines the track catalog
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,
    /// Challenge set JSON
    #[arg(long, value_name = "FILE")]
    pub challenge: PathBuf,
    /// Submission CSV to check
    #[arg(long, value_name = "FILE")]
    pub submission: PathBuf,
    /// Output directory (created if missing)
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

pub fn run(args: &ValidateArgs) -> Result<()> {
    let corpus = super::load_corpus(&args.corpus)?;
    let cs = load_challenge_json(&args.challenge, &corpus)?;
    let raw = load_submission_csv(&args.submission)?;
    let report = validate_submission(&raw, &cs, &corpus);

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let report_path = args.out.join("validation.json");
    super::write_json(&report_path, &report)?;

    let mut manifest = Manifest::new("validate");
    manifest
        .input("corpus", &args.corpus)?
        .input("challenge", &args.challenge)?
        .input("submission", &args.submission)?
        .output("validation", &args.out, &report_path)?;
    manifest.write(&args.out)?;

    print!("{}", super::validation_table(&report));
    if !report.pass {
        return Err(super::ValidationFailed {
            failing: report.failures.len(),
            checked: report.n_checked,
        }
        .into());
    }
    Ok(())
}
