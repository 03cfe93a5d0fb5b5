pub mod evaluate;
pub mod gen;
pub mod ingest;
pub mod leaderboard;
pub mod recommend;
pub mod split;
pub mod train;
pub mod validate;

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use encore_core::challenge::{ChallengeSet, ScenarioType};
use encore_core::corpus::{Corpus, CorpusStats};
use encore_core::submission::ValidationReport;
use serde::Serialize;

/// The submission broke challenge rules. Raised after the validation report
/// has already been printed and written, so the exit path only needs the
/// counts.
#[derive(Debug)]
pub struct ValidationFailed {
    pub failing: usize,
    pub checked: usize,
}

impl fmt::Display for ValidationFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "submission failed validation: {} of {} challenge playlists in violation",
            self.failing, self.checked
        )
    }
}

impl std::error::Error for ValidationFailed {}

pub(crate) fn load_corpus(path: &Path) -> Result<Corpus> {
    Corpus::load(path).with_context(|| format!("loading corpus snapshot {}", path.display()))
}

/// Serialize as pretty JSON with a trailing newline (the format every
/// report file in this tool uses).
pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file =
        File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)
        .with_context(|| format!("writing {}", path.display()))?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub(crate) fn stats_table(stats: &CorpusStats) -> String {
    let mut out = String::from("corpus\n");
    let rows: [(&str, String); 8] = [
        ("playlists", stats.num_playlists.to_string()),
        ("track entries", stats.num_tracks.to_string()),
        ("unique tracks", stats.num_unique_tracks.to_string()),
        ("unique albums", stats.num_unique_albums.to_string()),
        ("unique artists", stats.num_unique_artists.to_string()),
        ("unique titles", stats.num_unique_titles.to_string()),
        (
            "normalized titles",
            stats.num_unique_normalized_titles.to_string(),
        ),
        (
            "mean playlist length",
            format!("{:.2}", stats.avg_playlist_length),
        ),
    ];
    for (label, value) in rows {
        out.push_str(&format!("  {label:<22} {value:>12}\n"));
    }
    out
}

pub(crate) fn split_table(cs: &ChallengeSet) -> String {
    let mut counts = [0usize; 10];
    for p in &cs.playlists {
        counts[p.scenario.index()] += 1;
    }
    let mut out = String::from("challenge set\n");
    out.push_str(&format!(
        "  {:<4} {:<18} {:>9} {:>6} {:>6}\n",
        "", "scenario", "playlists", "seeds", "title"
    ));
    for sc in ScenarioType::ALL {
        out.push_str(&format!(
            "  {:<4} {:<18} {:>9} {:>6} {:>6}\n",
            sc.short(),
            sc.tag(),
            counts[sc.index()],
            sc.seed_count(),
            if sc.has_title() { "yes" } else { "no" },
        ));
    }
    out.push_str(&format!("  {:<23} {:>9}\n", "total", cs.len()));
    out
}

pub(crate) fn validation_table(report: &ValidationReport) -> String {
    let mut out = format!(
        "validation: {} ({} challenge playlists checked)\n",
        if report.pass { "PASS" } else { "FAIL" },
        report.n_checked
    );
    const SHOWN: usize = 20;
    for (pid, codes) in report.failures.iter().take(SHOWN) {
        let list: Vec<String> = codes.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("  pid {:<10} {}\n", pid, list.join(", ")));
    }
    if report.failures.len() > SHOWN {
        out.push_str(&format!(
            "  ... and {} more failing playlists\n",
            report.failures.len() - SHOWN
        ));
    }
    if !report.extra_pids.is_empty() {
        out.push_str(&format!(
            "  note: {} pid(s) not in the challenge set were ignored\n",
            report.extra_pids.len()
        ));
    }
    out
}
