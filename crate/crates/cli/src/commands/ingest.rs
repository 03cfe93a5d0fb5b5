use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use encore_core::corpus::ingest;

use crate::manifest::Manifest;

/// Build a corpus snapshot from JSON slice files.
#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Output directory (created if missing)
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// JSON slice files, ingested in the order given
    #[arg(value_name = "SLICE", required = true)]
    pub slices: Vec<PathBuf>,
}

pub fn run(args: &IngestArgs) -> Result<()> {
    let corpus = ingest(&args.slices)?;

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let snap = args.out.join("corpus.snap");
    corpus.save(&snap)?;
    let stats = corpus.stats();
    let stats_path = args.out.join("stats.json");
    super::write_json(&stats_path, &stats)?;

    let mut manifest = Manifest::new("ingest");
    let given: Vec<String> = args.slices.iter().map(|p| p.display().to_string()).collect();
    manifest.param("slices", given);
    for (i, path) in args.slices.iter().enumerate() {
        manifest.input(&format!("slice-{i:04}"), path)?;
    }
    manifest.output("corpus", &args.out, &snap)?;
    manifest.output("stats", &args.out, &stats_path)?;
    manifest.write(&args.out)?;

    print!("{}", super::stats_table(&stats));
    Ok(())
}
