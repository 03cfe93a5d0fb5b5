use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use encore_core::challenge::{load_challenge_json, load_ground_truth_json};
use encore_core::metrics::{render_tables, save_score_report_json, score_report};
use encore_core::submission::{load_submission_csv, validate_submission};

use crate::manifest::Manifest;

/// Validate a submission and score it against withheld ground truth. An
/// invalid submission gets its validation report and no scores.
#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Corpus snapshot that defines the track catalog
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,
    /// Challenge set JSON
    #[arg(long, value_name = "FILE")]
    pub challenge: PathBuf,
    /// Withheld ground truth JSON (output of `split`)
    #[arg(long, value_name = "FILE")]
    pub truth: PathBuf,
    /// Submission CSV to score
    #[arg(long, value_name = "FILE")]
    pub submission: PathBuf,
    /// Output directory (created if missing)
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

pub fn run(args: &EvaluateArgs) -> Result<()> {
    let corpus = super::load_corpus(&args.corpus)?;
    let cs = load_challenge_json(&args.challenge, &corpus)?;
    let gt = load_ground_truth_json(&args.truth, &corpus)?;
    let raw = load_submission_csv(&args.submission)?;

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let validation_path = args.out.join("validation.json");
    let vreport = validate_submission(&raw, &cs, &corpus);
    super::write_json(&validation_path, &vreport)?;

    let mut manifest = Manifest::new("evaluate");
    manifest
        .input("corpus", &args.corpus)?
        .input("challenge", &args.challenge)?
        .input("ground_truth", &args.truth)?
        .input("submission", &args.submission)?
        .output("validation", &args.out, &validation_path)?;

    if !vreport.pass {
        manifest.write(&args.out)?;
        print!("{}", super::validation_table(&vreport));
        return Err(super::ValidationFailed {
            failing: vreport.failures.len(),
            checked: vreport.n_checked,
        }
        .into());
    }

    let resolved = raw.resolve(&corpus)?;
    let report = score_report::<f64>(&resolved, &cs, &gt, &corpus)?;
    let tables = render_tables(&report);

    let report_path = args.out.join("score_report.json");
    let tables_path = args.out.join("score_report.txt");
    save_score_report_json(&report, &report_path)?;
    super::write_text(&tables_path, &tables)?;
    manifest
        .output("score_report", &args.out, &report_path)?
        .output("score_tables", &args.out, &tables_path)?;
    manifest.write(&args.out)?;

    print!("{tables}");
    Ok(())
}
