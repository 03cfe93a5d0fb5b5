//! Submission files (500 ordered predictions per challenge playlist), their
//! CSV round trip, and rule validation against a challenge set.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::challenge::ChallengeSet;
use crate::corpus::Corpus;
use crate::ids::TrackId;

/// Required number of predictions per playlist.
pub const SUBMISSION_LENGTH: usize = 500;

#[derive(Debug, Error)]
pub enum SubmissionError {
    #[error("io error on {file}: {source}")]
    Io {
        file: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {detail}")]
    Format {
        file: PathBuf,
        line: usize,
        detail: String,
    },
    #[error("unknown track uri {uri}")]
    UnknownTrack { uri: String },
}

/// Fully resolved submission: every prediction is an interned track.
#[derive(Debug, Clone, PartialEq)]
pub struct Submission {
    pub team: String,
    pub track: String,
    pub entries: Vec<(u64, Vec<TrackId>)>,
}

/// Submission as read from disk; URIs not yet resolved against a corpus, so
/// unknown tracks survive long enough for validation to report them.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSubmission {
    pub team: String,
    pub track: String,
    pub entries: Vec<(u64, Vec<String>)>,
}

impl RawSubmission {
    /// Resolve every URI; fails on the first unknown one.
    pub fn resolve(&self, corpus: &Corpus) -> Result<Submission, SubmissionError> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for (pid, uris) in &self.entries {
            let mut tracks = Vec::with_capacity(uris.len());
            for uri in uris {
                let t = corpus
                    .tracks
                    .get(uri)
                    .ok_or_else(|| SubmissionError::UnknownTrack { uri: uri.clone() })?;
                tracks.push(TrackId(t));
            }
            entries.push((*pid, tracks));
        }
        Ok(Submission {
            team: self.team.clone(),
            track: self.track.clone(),
            entries,
        })
    }
}

pub fn save_submission_csv(
    sub: &Submission,
    corpus: &Corpus,
    path: &Path,
) -> Result<(), SubmissionError> {
    let io_err = |e: std::io::Error| SubmissionError::Io {
        file: path.to_path_buf(),
        source: e,
    };
    let f = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(f);
    writeln!(w, "#SUBMISSION,{},{}", sub.team, sub.track).map_err(io_err)?;
    for (pid, tracks) in &sub.entries {
        write!(w, "{pid}").map_err(io_err)?;
        for &t in tracks {
            write!(w, ",{}", corpus.tracks.uri(t.0)).map_err(io_err)?;
        }
        writeln!(w).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn load_submission_csv(path: &Path) -> Result<RawSubmission, SubmissionError> {
    let f = File::open(path).map_err(|e| SubmissionError::Io {
        file: path.to_path_buf(),
        source: e,
    })?;
    let fmt_err = |line: usize, detail: String| SubmissionError::Format {
        file: path.to_path_buf(),
        line,
        detail,
    };
    let mut header: Option<(String, String)> = None;
    let mut entries: Vec<(u64, Vec<String>)> = Vec::new();
    let mut seen: HashSet<u64> = HashSet::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| SubmissionError::Io {
            file: path.to_path_buf(),
            source: e,
        })?;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if header.is_none() {
                let parts: Vec<&str> = rest.split(',').collect();
                if parts.len() != 3 || parts[0] != "SUBMISSION" {
                    return Err(fmt_err(
                        lineno,
                        "header must be \"#SUBMISSION,<team>,<track>\"".into(),
                    ));
                }
                header = Some((parts[1].to_string(), parts[2].to_string()));
            }
            // Later comment lines are ignored.
            continue;
        }
        if header.is_none() {
            return Err(fmt_err(
                lineno,
                "missing \"#SUBMISSION,<team>,<track>\" header".into(),
            ));
        }
        let mut fields = line.split(',');
        let pid_str = fields.next().unwrap();
        let pid: u64 = pid_str
            .trim()
            .parse()
            .map_err(|_| fmt_err(lineno, format!("bad playlist id {pid_str:?}")))?;
        if !seen.insert(pid) {
            return Err(fmt_err(lineno, format!("pid {pid} listed twice")));
        }
        let uris: Vec<String> = fields.map(|s| s.trim().to_string()).collect();
        entries.push((pid, uris));
    }
    let (team, track) = header.ok_or_else(|| SubmissionError::Format {
        file: path.to_path_buf(),
        line: 0,
        detail: "empty submission file".into(),
    })?;
    Ok(RawSubmission { team, track, entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ValidationCode {
    MissingPid,
    WrongLength,
    DuplicateTrack,
    SeedLeak,
    UnknownTrack,
}

impl fmt::Display for ValidationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ValidationCode::MissingPid => "MISSING_PID",
            ValidationCode::WrongLength => "WRONG_LENGTH",
            ValidationCode::DuplicateTrack => "DUPLICATE_TRACK",
            ValidationCode::SeedLeak => "SEED_LEAK",
            ValidationCode::UnknownTrack => "UNKNOWN_TRACK",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    /// True iff every challenge pid is present and free of violations.
    pub pass: bool,
    /// Violations per failing pid (passing pids are omitted).
    pub failures: BTreeMap<u64, Vec<ValidationCode>>,
    /// Pids present in the submission but not in the challenge set. These do
    /// not fail validation; they are surfaced for the caller to notice.
    pub extra_pids: Vec<u64>,
    /// Number of challenge playlists checked.
    pub n_checked: usize,
}

enum Token {
    Known(TrackId),
    Unknown(String),
}

/// Check a loaded submission against the challenge rules: every challenge
/// pid present, exactly 500 predictions, no duplicates, no seed tracks, all
/// tracks known to the corpus.
pub fn validate_submission(
    sub: &RawSubmission,
    cs: &ChallengeSet,
    corpus: &Corpus,
) -> ValidationReport {
    let entries: Vec<(u64, Vec<Token>)> = sub
        .entries
        .iter()
        .map(|(pid, uris)| {
            let tokens = uris
                .iter()
                .map(|uri| match corpus.tracks.get(uri) {
                    Some(t) => Token::Known(TrackId(t)),
                    None => Token::Unknown(uri.clone()),
                })
                .collect();
            (*pid, tokens)
        })
        .collect();
    validate_tokens(&entries, cs, corpus)
}

/// Validate an already resolved submission (same rules, no unknown URIs
/// unless a TrackId is out of range).
pub fn validate_resolved(
    sub: &Submission,
    cs: &ChallengeSet,
    corpus: &Corpus,
) -> ValidationReport {
    let entries: Vec<(u64, Vec<Token>)> = sub
        .entries
        .iter()
        .map(|(pid, tracks)| {
            let tokens = tracks
                .iter()
                .map(|&t| {
                    if t.index() < corpus.n_tracks() {
                        Token::Known(t)
                    } else {
                        Token::Unknown(format!("{t}"))
                    }
                })
                .collect();
            (*pid, tokens)
        })
        .collect();
    validate_tokens(&entries, cs, corpus)
}

fn validate_tokens(
    entries: &[(u64, Vec<Token>)],
    cs: &ChallengeSet,
    _corpus: &Corpus,
) -> ValidationReport {
    let by_pid: BTreeMap<u64, &Vec<Token>> =
        entries.iter().map(|(pid, toks)| (*pid, toks)).collect();
    let mut failures: BTreeMap<u64, Vec<ValidationCode>> = BTreeMap::new();

    for cp in &cs.playlists {
        let Some(tokens) = by_pid.get(&cp.pid) else {
            failures.insert(cp.pid, vec![ValidationCode::MissingPid]);
            continue;
        };
        let mut codes = Vec::new();
        if tokens.len() != SUBMISSION_LENGTH {
            codes.push(ValidationCode::WrongLength);
        }
        let mut seen: HashSet<&str> = HashSet::new();
        let mut seen_ids: HashSet<TrackId> = HashSet::new();
        let mut dup = false;
        let mut unknown = false;
        let mut leak = false;
        let seeds = cp.seed_set();
        for tok in tokens.iter() {
            match tok {
                Token::Known(t) => {
                    if !seen_ids.insert(*t) {
                        dup = true;
                    }
                    if seeds.contains(t) {
                        leak = true;
                    }
                }
                Token::Unknown(uri) => {
                    unknown = true;
                    if !seen.insert(uri) {
                        dup = true;
                    }
                }
            }
        }
        if dup {
            codes.push(ValidationCode::DuplicateTrack);
        }
        if leak {
            codes.push(ValidationCode::SeedLeak);
        }
        if unknown {
            codes.push(ValidationCode::UnknownTrack);
        }
        if !codes.is_empty() {
            failures.insert(cp.pid, codes);
        }
    }

    let challenge_pids: HashSet<u64> = cs.playlists.iter().map(|p| p.pid).collect();
    let extra_pids: Vec<u64> = by_pid
        .keys()
        .copied()
        .filter(|pid| !challenge_pids.contains(pid))
        .collect();

    ValidationReport {
        pass: failures.is_empty(),
        failures,
        extra_pids,
        n_checked: cs.playlists.len(),
    }
}
