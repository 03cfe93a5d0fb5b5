use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use encore_core::metrics::{borda_aggregate, load_score_report_json, render_leaderboard, MeanRow};

use crate::manifest::Manifest;

/// Rank score reports by Borda count across the three metrics (higher
/// R-precision and NDCG, lower clicks).
#[derive(Debug, Args)]
pub struct LeaderboardArgs {
    /// Output directory (created if missing)
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Score-report JSON files (output of `evaluate`), one per entrant
    #[arg(value_name = "REPORT", required = true)]
    pub reports: Vec<PathBuf>,
}

pub fn run(args: &LeaderboardArgs) -> Result<()> {
    let mut rows: Vec<(String, MeanRow<f64>)> = Vec::with_capacity(args.reports.len());
    for path in &args.reports {
        let report = load_score_report_json::<f64>(path)?;
        let mut name = report.team;
        // Duplicate team names would make rows indistinguishable; number
        // repeats in input order.
        let dupes = rows.iter().filter(|(n, _)| n == &name || n.starts_with(&format!("{name} #"))).count();
        if dupes > 0 {
            name = format!("{name} #{}", dupes + 1);
        }
        rows.push((name, report.overall));
    }

    let entries = borda_aggregate(&rows);
    let table = render_leaderboard(&entries);

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let json_path = args.out.join("leaderboard.json");
    let table_path = args.out.join("leaderboard.txt");
    super::write_json(&json_path, &entries)?;
    super::write_text(&table_path, &table)?;

    let mut manifest = Manifest::new("leaderboard");
    let given: Vec<String> = args.reports.iter().map(|p| p.display().to_string()).collect();
    manifest.param("reports", given);
    for (i, path) in args.reports.iter().enumerate() {
        manifest.input(&format!("report-{i:04}"), path)?;
    }
    manifest
        .output("leaderboard", &args.out, &json_path)?
        .output("leaderboard_table", &args.out, &table_path)?;
    manifest.write(&args.out)?;

    print!("{table}");
    Ok(())
}
