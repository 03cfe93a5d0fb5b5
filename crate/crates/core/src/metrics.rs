//! Ranking metrics (R-precision with 0.25 artist credit, binary NDCG,
//! recommended-songs clicks), per-scenario score reports, and Borda rank
//! aggregation for comparing submissions.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::challenge::{ChallengeSet, GroundTruth, GroundTruthEntry, ScenarioType};
use crate::corpus::Corpus;
use crate::ids::TrackId;
use crate::scalar::Scalar;
use crate::submission::{validate_resolved, Submission, ValidationReport};

/// Clicks value awarded when no relevant track appears in the predictions:
/// one more than the 50 page refreshes a full miss costs.
pub const CLICKS_MISS: u32 = 51;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("ground truth is empty; metric undefined")]
    EmptyGroundTruth,
    #[error("submission failed validation: {} playlist(s) violate the rules", report.failures.len())]
    InvalidSubmission { report: ValidationReport },
    #[error("no ground truth entry for pid {0}")]
    MissingGroundTruth(u64),
    #[error("io error on {file}: {source}")]
    Io {
        file: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: {detail}")]
    Format { file: PathBuf, detail: String },
}

/// R-precision with 0.25 artist credit, exactly as the formula prints:
/// (|S_T ∩ G_T| + 0.25·|S_A ∩ G_A|) / |G_T|, where S_T is the first |G_T|
/// predictions and S_A their unique artists. Because matched tracks also
/// count toward artist matches, the value can exceed 1.
pub fn r_precision<S: Scalar>(
    predicted: &[TrackId],
    gt: &GroundTruthEntry,
    corpus: &Corpus,
) -> Result<S, MetricsError> {
    if gt.tracks.is_empty() {
        return Err(MetricsError::EmptyGroundTruth);
    }
    let n = gt.tracks.len();
    let window = &predicted[..predicted.len().min(n)];
    let s_t: HashSet<TrackId> = window.iter().copied().collect();
    let track_matches = s_t.iter().filter(|t| gt.tracks.contains(t)).count();
    let s_a: HashSet<_> = window.iter().map(|&t| corpus.artist_of(t)).collect();
    let artist_matches = s_a.iter().filter(|a| gt.artists.contains(a)).count();
    Ok(S::of_f64(
        (track_matches as f64 + 0.25 * artist_matches as f64) / n as f64,
    ))
}

/// Binary-relevance NDCG: DCG = Σ r_i / log2(i+1) over the whole prediction
/// list (1-based i), IDCG truncated at min(|G_T|, N).
pub fn ndcg<S: Scalar>(predicted: &[TrackId], gt: &GroundTruthEntry) -> Result<S, MetricsError> {
    if gt.tracks.is_empty() {
        return Err(MetricsError::EmptyGroundTruth);
    }
    if predicted.is_empty() {
        return Ok(S::zero());
    }
    let mut dcg = 0.0f64;
    for (i, t) in predicted.iter().enumerate() {
        if gt.tracks.contains(t) {
            dcg += 1.0 / ((i + 2) as f64).log2();
        }
    }
    let ideal_len = gt.tracks.len().min(predicted.len());
    let idcg: f64 = (0..ideal_len).map(|i| 1.0 / ((i + 2) as f64).log2()).sum();
    Ok(S::of_f64(dcg / idcg))
}

/// Number of ten-track page refreshes before the first relevant track:
/// floor((rank − 1)/10) with 1-based rank, or 51 when nothing is relevant.
pub fn clicks(predicted: &[TrackId], gt: &GroundTruthEntry) -> Result<u32, MetricsError> {
    if gt.tracks.is_empty() {
        return Err(MetricsError::EmptyGroundTruth);
    }
    Ok(predicted
        .iter()
        .position(|t| gt.tracks.contains(t))
        .map_or(CLICKS_MISS, |i| (i / 10) as u32))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaylistScore<S> {
    pub r_precision: S,
    pub ndcg: S,
    pub clicks: u32,
}

/// Mean metric values over some group of playlists (clicks averaged as a
/// real number).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanRow<S> {
    pub r_precision: S,
    pub ndcg: S,
    pub clicks: S,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRow<S> {
    pub scenario: ScenarioType,
    pub n: usize,
    pub means: MeanRow<S>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport<S> {
    pub team: String,
    pub n_playlists: usize,
    pub overall: MeanRow<S>,
    /// One row per scenario present, in scenario order.
    pub scenarios: Vec<ScenarioRow<S>>,
    pub per_playlist: BTreeMap<u64, PlaylistScore<S>>,
    /// How many playlists scored an R-precision above 1 (possible because
    /// the artist credit is additive).
    pub r_precision_over_one: usize,
}

/// Score a validated submission. Refuses (with the validation report) if the
/// submission breaks any challenge rule. Per-playlist scoring is parallel;
/// all aggregation runs in ascending-pid order so results are identical
/// across thread counts.
pub fn score_report<S: Scalar>(
    sub: &Submission,
    cs: &ChallengeSet,
    gt: &GroundTruth,
    corpus: &Corpus,
) -> Result<ScoreReport<S>, MetricsError> {
    let report = validate_resolved(sub, cs, corpus);
    if !report.pass {
        return Err(MetricsError::InvalidSubmission { report });
    }
    let by_pid: BTreeMap<u64, &[TrackId]> = sub
        .entries
        .iter()
        .map(|(pid, tracks)| (*pid, tracks.as_slice()))
        .collect();

    let scored: Vec<(u64, ScenarioType, PlaylistScore<S>)> = cs
        .playlists
        .par_iter()
        .map(|cp| {
            let entry = gt
                .get(cp.pid)
                .ok_or(MetricsError::MissingGroundTruth(cp.pid))?;
            // Validation guarantees the pid is present.
            let predicted = by_pid[&cp.pid];
            let score = PlaylistScore {
                r_precision: r_precision::<S>(predicted, entry, corpus)?,
                ndcg: ndcg::<S>(predicted, entry)?,
                clicks: clicks(predicted, entry)?,
            };
            Ok((cp.pid, cp.scenario, score))
        })
        .collect::<Result<_, MetricsError>>()?;

    let mut per_playlist = BTreeMap::new();
    let mut by_scenario: BTreeMap<usize, Vec<PlaylistScore<S>>> = BTreeMap::new();
    for (pid, scenario, score) in scored {
        per_playlist.insert(pid, score);
        by_scenario.entry(scenario.index()).or_default().push(score);
    }

    let mean_of = |scores: &mut dyn Iterator<Item = PlaylistScore<S>>| -> (MeanRow<S>, usize, usize) {
        let (mut rp, mut nd, mut cl) = (0.0f64, 0.0f64, 0.0f64);
        let mut n = 0usize;
        let mut over_one = 0usize;
        for s in scores {
            let rpf = s.r_precision.to_f64().unwrap();
            rp += rpf;
            nd += s.ndcg.to_f64().unwrap();
            cl += s.clicks as f64;
            if rpf > 1.0 {
                over_one += 1;
            }
            n += 1;
        }
        let d = n.max(1) as f64;
        (
            MeanRow {
                r_precision: S::of_f64(rp / d),
                ndcg: S::of_f64(nd / d),
                clicks: S::of_f64(cl / d),
            },
            n,
            over_one,
        )
    };

    let scenarios: Vec<ScenarioRow<S>> = ScenarioType::ALL
        .iter()
        .filter_map(|sc| {
            let scores = by_scenario.get(&sc.index())?;
            let (means, n, _) = mean_of(&mut scores.iter().copied());
            Some(ScenarioRow { scenario: *sc, n, means })
        })
        .collect();
    let (overall, n_playlists, r_precision_over_one) =
        mean_of(&mut per_playlist.values().copied());

    Ok(ScoreReport {
        team: sub.team.clone(),
        n_playlists,
        overall,
        scenarios,
        per_playlist,
        r_precision_over_one,
    })
}

pub fn save_score_report_json<S: Scalar + Serialize>(
    report: &ScoreReport<S>,
    path: &Path,
) -> Result<(), MetricsError> {
    let io_err = |e: std::io::Error| MetricsError::Io {
        file: path.to_path_buf(),
        source: e,
    };
    let f = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, report).map_err(|e| MetricsError::Format {
        file: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    w.write_all(b"\n").map_err(io_err)?;
    w.flush().map_err(io_err)
}

pub fn load_score_report_json<S: Scalar + for<'de> Deserialize<'de>>(
    path: &Path,
) -> Result<ScoreReport<S>, MetricsError> {
    let f = File::open(path).map_err(|e| MetricsError::Io {
        file: path.to_path_buf(),
        source: e,
    })?;
    serde_json::from_reader(BufReader::new(f)).map_err(|e| MetricsError::Format {
        file: path.to_path_buf(),
        detail: e.to_string(),
    })
}

/// Plain-text tables: overall means plus one row per scenario.
pub fn render_tables<S: Scalar>(report: &ScoreReport<S>) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "overall means over {} playlists (team {})\n",
        report.n_playlists, report.team
    ));
    out.push_str(&format!(
        "  {:<14} {:>10}\n  {:<14} {:>10.4}\n  {:<14} {:>10.4}\n  {:<14} {:>10.4}\n",
        "metric", "value",
        "R-precision", report.overall.r_precision,
        "NDCG", report.overall.ndcg,
        "clicks", report.overall.clicks,
    ));
    if report.r_precision_over_one > 0 {
        out.push_str(&format!(
            "  note: {} playlist(s) scored R-precision > 1 (additive artist credit)\n",
            report.r_precision_over_one
        ));
    }
    out.push('\n');
    out.push_str("per-scenario means\n");
    out.push_str(&format!(
        "  {:<4} {:<18} {:>6} {:>12} {:>10} {:>10}\n",
        "", "scenario", "n", "R-precision", "NDCG", "clicks"
    ));
    for row in &report.scenarios {
        out.push_str(&format!(
            "  {:<4} {:<18} {:>6} {:>12.4} {:>10.4} {:>10.4}\n",
            row.scenario.short(),
            row.scenario.tag(),
            row.n,
            row.means.r_precision,
            row.means.ndcg,
            row.means.clicks,
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeaderboardEntry {
    pub name: String,
    pub r_precision: f64,
    pub ndcg: f64,
    pub clicks: f64,
    pub rank_r_precision: f64,
    pub rank_ndcg: f64,
    pub rank_clicks: f64,
    /// Sum of the three metric ranks; lower is better.
    pub borda_sum: f64,
}

/// Borda rank aggregation: each metric ranks the submissions (higher better
/// for R-precision and NDCG, lower better for clicks; ties share the mean of
/// the tied positions), the three ranks are summed, and the leaderboard is
/// the ascending sum, names breaking ties.
pub fn borda_aggregate<S: Scalar>(reports: &[(String, MeanRow<S>)]) -> Vec<LeaderboardEntry> {
    let rp: Vec<f64> = reports
        .iter()
        .map(|(_, m)| m.r_precision.to_f64().unwrap())
        .collect();
    let nd: Vec<f64> = reports.iter().map(|(_, m)| m.ndcg.to_f64().unwrap()).collect();
    let cl: Vec<f64> = reports.iter().map(|(_, m)| m.clicks.to_f64().unwrap()).collect();
    let rp_ranks = fractional_ranks(&rp, true);
    let nd_ranks = fractional_ranks(&nd, true);
    let cl_ranks = fractional_ranks(&cl, false);

    let mut entries: Vec<LeaderboardEntry> = reports
        .iter()
        .enumerate()
        .map(|(i, (name, _))| LeaderboardEntry {
            name: name.clone(),
            r_precision: rp[i],
            ndcg: nd[i],
            clicks: cl[i],
            rank_r_precision: rp_ranks[i],
            rank_ndcg: nd_ranks[i],
            rank_clicks: cl_ranks[i],
            borda_sum: rp_ranks[i] + nd_ranks[i] + cl_ranks[i],
        })
        .collect();
    entries.sort_by(|a, b| {
        a.borda_sum
            .partial_cmp(&b.borda_sum)
            .expect("rank sums are finite")
            .then_with(|| a.name.cmp(&b.name))
    });
    entries
}

pub fn render_leaderboard(entries: &[LeaderboardEntry]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<4} {:<20} {:>12} {:>10} {:>10} {:>10}\n",
        "#", "name", "R-precision", "NDCG", "clicks", "borda"
    ));
    for (i, e) in entries.iter().enumerate() {
        out.push_str(&format!(
            "{:<4} {:<20} {:>12.4} {:>10.4} {:>10.4} {:>10.1}\n",
            i + 1,
            e.name,
            e.r_precision,
            e.ndcg,
            e.clicks,
            e.borda_sum,
        ));
    }
    out
}

/// 1-based ranks with tied values sharing the mean of their positions.
fn fractional_ranks(values: &[f64], higher_better: bool) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        let ord = values[a].partial_cmp(&values[b]).expect("scores are finite");
        if higher_better {
            ord.reverse()
        } else {
            ord
        }
    });
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let mean_rank = (i + j + 2) as f64 / 2.0;
        for &k in &idx[i..=j] {
            ranks[k] = mean_rank;
        }
        i = j + 1;
    }
    ranks
}
