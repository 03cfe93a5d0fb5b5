//! Challenge-set construction: ten withholding scenarios, ground truth
//! bookkeeping, and the JSON exchange formats for both.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::{seq::SliceRandom, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Corpus;
use crate::ids::{ArtistId, TrackId};

#[derive(Debug, Error)]
pub enum ChallengeError {
    #[error("not enough eligible playlists for scenario {scenario}: need {need}, found {found}")]
    Infeasible {
        scenario: &'static str,
        need: usize,
        found: usize,
    },
    #[error("io error on {file}: {source}")]
    Io {
        file: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: {detail}")]
    Format { file: PathBuf, detail: String },
    #[error("{file}: unknown track uri {uri}")]
    UnknownTrack { file: PathBuf, uri: String },
}

/// The ten withholding scenarios. Numbering follows the challenge layout:
/// seed counts {0, 5, 5, 10, 10, 25, 25, 100, 100, 1}, title hidden for T3
/// and T5, random (rather than leading) seed positions for T7 and T9.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScenarioType {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    T7,
    T8,
    T9,
    T10,
}

impl ScenarioType {
    pub const ALL: [ScenarioType; 10] = [
        ScenarioType::T1,
        ScenarioType::T2,
        ScenarioType::T3,
        ScenarioType::T4,
        ScenarioType::T5,
        ScenarioType::T6,
        ScenarioType::T7,
        ScenarioType::T8,
        ScenarioType::T9,
        ScenarioType::T10,
    ];

    pub fn seed_count(self) -> usize {
        match self {
            ScenarioType::T1 => 0,
            ScenarioType::T2 | ScenarioType::T3 => 5,
            ScenarioType::T4 | ScenarioType::T5 => 10,
            ScenarioType::T6 | ScenarioType::T7 => 25,
            ScenarioType::T8 | ScenarioType::T9 => 100,
            ScenarioType::T10 => 1,
        }
    }

    pub fn has_title(self) -> bool {
        !matches!(self, ScenarioType::T3 | ScenarioType::T5)
    }

    /// Seeds drawn from random positions instead of the playlist head.
    pub fn random_order(self) -> bool {
        matches!(self, ScenarioType::T7 | ScenarioType::T9)
    }

    /// Stable tag used in files and reports.
    pub fn tag(self) -> &'static str {
        match self {
            ScenarioType::T1 => "title_only",
            ScenarioType::T2 => "title_first_5",
            ScenarioType::T3 => "first_5",
            ScenarioType::T4 => "title_first_10",
            ScenarioType::T5 => "first_10",
            ScenarioType::T6 => "title_first_25",
            ScenarioType::T7 => "title_random_25",
            ScenarioType::T8 => "title_first_100",
            ScenarioType::T9 => "title_random_100",
            ScenarioType::T10 => "title_first_1",
        }
    }

    pub fn from_tag(tag: &str) -> Option<ScenarioType> {
        ScenarioType::ALL.into_iter().find(|s| s.tag() == tag)
    }

    pub fn short(self) -> &'static str {
        match self {
            ScenarioType::T1 => "T1",
            ScenarioType::T2 => "T2",
            ScenarioType::T3 => "T3",
            ScenarioType::T4 => "T4",
            ScenarioType::T5 => "T5",
            ScenarioType::T6 => "T6",
            ScenarioType::T7 => "T7",
            ScenarioType::T8 => "T8",
            ScenarioType::T9 => "T9",
            ScenarioType::T10 => "T10",
        }
    }

    /// Position in `ALL` (used for one-hot features and sort keys).
    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&s| s == self).unwrap()
    }
}

impl std::fmt::Display for ScenarioType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.short())
    }
}

impl Serialize for ScenarioType {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.tag())
    }
}

impl<'de> Deserialize<'de> for ScenarioType {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        ScenarioType::from_tag(&s)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown scenario tag {s:?}")))
    }
}

/// One incomplete playlist as presented to recommenders. `pid` is the
/// original playlist id, stable across corpus re-densification.
#[derive(Debug, Clone, PartialEq)]
pub struct ChallengePlaylist {
    pub pid: u64,
    pub scenario: ScenarioType,
    pub title: Option<String>,
    /// Seed tracks with their original playlist positions, position-ascending.
    pub seed_tracks: Vec<(u32, TrackId)>,
}

impl ChallengePlaylist {
    pub fn seed_set(&self) -> HashSet<TrackId> {
        self.seed_tracks.iter().map(|&(_, t)| t).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChallengeSet {
    /// Sorted by (scenario, pid).
    pub playlists: Vec<ChallengePlaylist>,
}

impl ChallengeSet {
    pub fn len(&self) -> usize {
        self.playlists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.playlists.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthEntry {
    /// Withheld tracks (G_T): disjoint from the deduplicated seed set.
    pub tracks: BTreeSet<TrackId>,
    /// Artists of the withheld tracks (G_A).
    pub artists: BTreeSet<ArtistId>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroundTruth {
    pub entries: BTreeMap<u64, GroundTruthEntry>,
}

impl GroundTruth {
    pub fn get(&self, pid: u64) -> Option<&GroundTruthEntry> {
        self.entries.get(&pid)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Scenarios ordered by how scarce eligible playlists are (longest seed
/// requirements first), so the tight scenarios get first pick.
const ASSIGN_ORDER: [ScenarioType; 10] = [
    ScenarioType::T8,
    ScenarioType::T9,
    ScenarioType::T6,
    ScenarioType::T7,
    ScenarioType::T4,
    ScenarioType::T5,
    ScenarioType::T2,
    ScenarioType::T3,
    ScenarioType::T10,
    ScenarioType::T1,
];

/// Split `per_type` playlists per scenario out of the corpus. Each playlist
/// is used for at most one scenario. "First k" scenarios withhold everything
/// after position k-1; random scenarios sample k seed positions uniformly
/// without replacement (original positions kept, order preserved). The
/// withheld tracks, minus any that also appear among the seeds, form the
/// ground truth.
pub fn build_challenge_set(
    corpus: &Corpus,
    per_type: usize,
    rng_seed: u64,
) -> Result<(ChallengeSet, GroundTruth), ChallengeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut candidates: Vec<usize> = (0..corpus.n_playlists()).collect();
    candidates.shuffle(&mut rng);

    let mut used = vec![false; corpus.n_playlists()];
    let mut playlists = Vec::with_capacity(per_type * 10);
    let mut entries = BTreeMap::new();

    for sc in ASSIGN_ORDER {
        let k = sc.seed_count();
        let mut got = 0usize;
        for &pi in &candidates {
            if got == per_type {
                break;
            }
            if used[pi] {
                continue;
            }
            let p = &corpus.playlists[pi];
            if p.len() <= k {
                continue;
            }
            let split = if sc.random_order() {
                // A pathological duplicate pattern can leave the withheld
                // part empty; re-draw a few times before giving up on this
                // playlist.
                (0..10).find_map(|_| {
                    let mut pos = rand::seq::index::sample(&mut rng, p.len(), k).into_vec();
                    pos.sort_unstable();
                    split_at_positions(p.tracks.as_slice(), &pos)
                })
            } else {
                let pos: Vec<usize> = (0..k).collect();
                split_at_positions(p.tracks.as_slice(), &pos)
            };
            let Some((seed_tracks, gt_tracks)) = split else {
                continue;
            };
            used[pi] = true;
            got += 1;
            let artists = gt_tracks.iter().map(|&t| corpus.artist_of(t)).collect();
            entries.insert(
                p.orig_pid,
                GroundTruthEntry {
                    tracks: gt_tracks,
                    artists,
                },
            );
            playlists.push(ChallengePlaylist {
                pid: p.orig_pid,
                scenario: sc,
                title: sc.has_title().then(|| p.name.clone()),
                seed_tracks,
            });
        }
        if got < per_type {
            return Err(ChallengeError::Infeasible {
                scenario: sc.tag(),
                need: per_type,
                found: got,
            });
        }
    }

    playlists.sort_by(|a, b| {
        (a.scenario.index(), a.pid).cmp(&(b.scenario.index(), b.pid))
    });
    Ok((ChallengeSet { playlists }, GroundTruth { entries }))
}

/// Split a playlist into seed entries at the given (sorted) positions and
/// the withheld track set; None if the withheld set would be empty.
fn split_at_positions(
    tracks: &[(u32, TrackId)],
    seed_positions: &[usize],
) -> Option<(Vec<(u32, TrackId)>, BTreeSet<TrackId>)> {
    let pos_set: HashSet<usize> = seed_positions.iter().copied().collect();
    let seeds: Vec<(u32, TrackId)> = seed_positions.iter().map(|&i| tracks[i]).collect();
    let seed_tracks: HashSet<TrackId> = seeds.iter().map(|&(_, t)| t).collect();
    let gt: BTreeSet<TrackId> = tracks
        .iter()
        .enumerate()
        .filter(|(i, _)| !pos_set.contains(i))
        .map(|(_, &(_, t))| t)
        .filter(|t| !seed_tracks.contains(t))
        .collect();
    if gt.is_empty() {
        None
    } else {
        Some((seeds, gt))
    }
}

#[derive(Serialize, Deserialize)]
struct ChallengeJson {
    playlists: Vec<ChallengePlaylistJson>,
}

#[derive(Serialize, Deserialize)]
struct ChallengePlaylistJson {
    pid: u64,
    scenario: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    tracks: Vec<SeedTrackJson>,
}

#[derive(Serialize, Deserialize)]
struct SeedTrackJson {
    pos: u32,
    track_uri: String,
}

pub fn save_challenge_json(
    cs: &ChallengeSet,
    corpus: &Corpus,
    path: &Path,
) -> Result<(), ChallengeError> {
    let doc = ChallengeJson {
        playlists: cs
            .playlists
            .iter()
            .map(|p| ChallengePlaylistJson {
                pid: p.pid,
                scenario: p.scenario.tag().to_string(),
                name: p.title.clone(),
                tracks: p
                    .seed_tracks
                    .iter()
                    .map(|&(pos, t)| SeedTrackJson {
                        pos,
                        track_uri: corpus.tracks.uri(t.0).to_string(),
                    })
                    .collect(),
            })
            .collect(),
    };
    write_json(path, &doc)
}

pub fn load_challenge_json(path: &Path, corpus: &Corpus) -> Result<ChallengeSet, ChallengeError> {
    let doc: ChallengeJson = read_json(path)?;
    let mut playlists = Vec::with_capacity(doc.playlists.len());
    for p in doc.playlists {
        let scenario =
            ScenarioType::from_tag(&p.scenario).ok_or_else(|| ChallengeError::Format {
                file: path.to_path_buf(),
                detail: format!("unknown scenario tag {:?}", p.scenario),
            })?;
        let mut seed_tracks = Vec::with_capacity(p.tracks.len());
        for st in p.tracks {
            let t = corpus
                .tracks
                .get(&st.track_uri)
                .ok_or_else(|| ChallengeError::UnknownTrack {
                    file: path.to_path_buf(),
                    uri: st.track_uri.clone(),
                })?;
            seed_tracks.push((st.pos, TrackId(t)));
        }
        playlists.push(ChallengePlaylist {
            pid: p.pid,
            scenario,
            title: p.name,
            seed_tracks,
        });
    }
    Ok(ChallengeSet { playlists })
}

#[derive(Serialize, Deserialize)]
struct GroundTruthJson {
    entries: Vec<GroundTruthEntryJson>,
}

#[derive(Serialize, Deserialize)]
struct GroundTruthEntryJson {
    pid: u64,
    track_uris: Vec<String>,
}

pub fn save_ground_truth_json(
    gt: &GroundTruth,
    corpus: &Corpus,
    path: &Path,
) -> Result<(), ChallengeError> {
    let doc = GroundTruthJson {
        entries: gt
            .entries
            .iter()
            .map(|(&pid, e)| GroundTruthEntryJson {
                pid,
                track_uris: e
                    .tracks
                    .iter()
                    .map(|&t| corpus.tracks.uri(t.0).to_string())
                    .collect(),
            })
            .collect(),
    };
    write_json(path, &doc)
}

pub fn load_ground_truth_json(path: &Path, corpus: &Corpus) -> Result<GroundTruth, ChallengeError> {
    let doc: GroundTruthJson = read_json(path)?;
    let mut entries = BTreeMap::new();
    for e in doc.entries {
        let mut tracks = BTreeSet::new();
        for uri in &e.track_uris {
            let t = corpus
                .tracks
                .get(uri)
                .ok_or_else(|| ChallengeError::UnknownTrack {
                    file: path.to_path_buf(),
                    uri: uri.clone(),
                })?;
            tracks.insert(TrackId(t));
        }
        if tracks.is_empty() {
            return Err(ChallengeError::Format {
                file: path.to_path_buf(),
                detail: format!("pid {} has empty ground truth", e.pid),
            });
        }
        let artists = tracks.iter().map(|&t| corpus.artist_of(t)).collect();
        entries.insert(e.pid, GroundTruthEntry { tracks, artists });
    }
    Ok(GroundTruth { entries })
}

fn write_json<T: Serialize>(path: &Path, doc: &T) -> Result<(), ChallengeError> {
    let io_err = |e: std::io::Error| ChallengeError::Io {
        file: path.to_path_buf(),
        source: e,
    };
    let f = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, doc).map_err(|e| ChallengeError::Format {
        file: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    w.write_all(b"\n").map_err(io_err)?;
    w.flush().map_err(io_err)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ChallengeError> {
    let f = File::open(path).map_err(|e| ChallengeError::Io {
        file: path.to_path_buf(),
        source: e,
    })?;
    serde_json::from_reader(BufReader::new(f)).map_err(|e| ChallengeError::Format {
        file: path.to_path_buf(),
        detail: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::tiny_corpus;

    /// Corpus with `n` playlists of `len` distinct tracks each, sharing a
    /// common pool so playlists overlap.
    fn uniform_corpus(n: usize, len: usize) -> Corpus {
        let rows: Vec<Vec<String>> = (0..n)
            .map(|i| (0..len).map(|j| format!("x{}", (i + j * 7) % (len * 3))).collect())
            .collect();
        let refs: Vec<Vec<&str>> = rows
            .iter()
            .map(|r| r.iter().map(|s| s.as_str()).collect())
            .collect();
        let slices: Vec<&[&str]> = refs.iter().map(|r| r.as_slice()).collect();
        tiny_corpus(&slices)
    }

    #[test]
    fn scenario_table_matches_contract() {
        let want: [(ScenarioType, usize, bool, bool); 10] = [
            (ScenarioType::T1, 0, true, false),
            (ScenarioType::T2, 5, true, false),
            (ScenarioType::T3, 5, false, false),
            (ScenarioType::T4, 10, true, false),
            (ScenarioType::T5, 10, false, false),
            (ScenarioType::T6, 25, true, false),
            (ScenarioType::T7, 25, true, true),
            (ScenarioType::T8, 100, true, false),
            (ScenarioType::T9, 100, true, true),
            (ScenarioType::T10, 1, true, false),
        ];
        for (sc, seeds, title, random) in want {
            assert_eq!(sc.seed_count(), seeds, "{sc}");
            assert_eq!(sc.has_title(), title, "{sc}");
            assert_eq!(sc.random_order(), random, "{sc}");
            assert_eq!(ScenarioType::from_tag(sc.tag()), Some(sc));
        }
    }

    #[test]
    fn split_fills_every_scenario_exactly() {
        let c = uniform_corpus(60, 120);
        let (cs, gt) = build_challenge_set(&c, 3, 11).unwrap();
        assert_eq!(cs.len(), 30);
        assert_eq!(gt.len(), 30);
        for sc in ScenarioType::ALL {
            let n = cs.playlists.iter().filter(|p| p.scenario == sc).count();
            assert_eq!(n, 3, "{sc}");
        }
        // No playlist reused across scenarios.
        let pids: HashSet<u64> = cs.playlists.iter().map(|p| p.pid).collect();
        assert_eq!(pids.len(), 30);
        // Output sorted by (scenario, pid).
        let keys: Vec<(usize, u64)> = cs
            .playlists
            .iter()
            .map(|p| (p.scenario.index(), p.pid))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn first_k_scenarios_keep_leading_positions() {
        let c = uniform_corpus(60, 150);
        let (cs, gt) = build_challenge_set(&c, 2, 5).unwrap();
        for p in &cs.playlists {
            let e = gt.get(p.pid).unwrap();
            assert!(!e.tracks.is_empty());
            assert_eq!(p.seed_tracks.len(), p.scenario.seed_count());
            assert_eq!(p.title.is_some(), p.scenario.has_title());
            if !p.scenario.random_order() {
                let positions: Vec<u32> = p.seed_tracks.iter().map(|&(pos, _)| pos).collect();
                let want: Vec<u32> = (0..p.scenario.seed_count() as u32).collect();
                assert_eq!(positions, want, "{}", p.scenario);
            }
            if p.scenario == ScenarioType::T8 {
                // 150-track playlist: 100 seeds, at most 50 withheld.
                assert!(e.tracks.len() <= 50);
            }
            // Ground truth disjoint from seeds.
            let seeds = p.seed_set();
            assert!(e.tracks.iter().all(|t| !seeds.contains(t)));
            // Artist set is exactly the artists of the withheld tracks.
            let artists: BTreeSet<ArtistId> =
                e.tracks.iter().map(|&t| c.artist_of(t)).collect();
            assert_eq!(artists, e.artists);
        }
    }

    #[test]
    fn title_only_scenario_withholds_everything() {
        let c = uniform_corpus(40, 120);
        let (cs, gt) = build_challenge_set(&c, 1, 3).unwrap();
        let t1 = cs
            .playlists
            .iter()
            .find(|p| p.scenario == ScenarioType::T1)
            .unwrap();
        assert!(t1.seed_tracks.is_empty());
        let orig = c
            .playlists
            .iter()
            .find(|p| p.orig_pid == t1.pid)
            .unwrap();
        let want: BTreeSet<TrackId> = orig.track_set().into_iter().collect();
        assert_eq!(gt.get(t1.pid).unwrap().tracks, want);
    }

    #[test]
    fn random_scenarios_are_order_preserving_subsequences() {
        let c = uniform_corpus(80, 130);
        let (cs, gt) = build_challenge_set(&c, 4, 17).unwrap();
        for p in cs.playlists.iter().filter(|p| p.scenario.random_order()) {
            let orig = c.playlists.iter().find(|q| q.orig_pid == p.pid).unwrap();
            let mut last = None;
            for &(pos, t) in &p.seed_tracks {
                assert!(last.map_or(true, |prev| pos > prev), "positions ascend");
                assert_eq!(orig.tracks[pos as usize].1, t, "position metadata intact");
                last = Some(pos);
            }
            // Partition: seed positions and withheld positions cover 0..len.
            let seed_pos: HashSet<u32> = p.seed_tracks.iter().map(|&(pos, _)| pos).collect();
            let withheld: Vec<TrackId> = orig
                .tracks
                .iter()
                .filter(|&&(pos, _)| !seed_pos.contains(&pos))
                .map(|&(_, t)| t)
                .collect();
            assert_eq!(withheld.len() + seed_pos.len(), orig.len());
            // Withheld tracks minus seed dupes = ground truth.
            let seeds = p.seed_set();
            let want: BTreeSet<TrackId> = withheld
                .into_iter()
                .filter(|t| !seeds.contains(t))
                .collect();
            assert_eq!(gt.get(p.pid).unwrap().tracks, want);
        }
    }

    #[test]
    fn same_seed_reproduces_split() {
        let c = uniform_corpus(60, 120);
        let a = build_challenge_set(&c, 3, 99).unwrap();
        let b = build_challenge_set(&c, 3, 99).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        let d = build_challenge_set(&c, 3, 100).unwrap();
        assert_ne!(a.0, d.0);
    }

    #[test]
    fn infeasible_split_names_the_scenario() {
        // 30-track playlists can never serve the 100-seed scenarios.
        let c = uniform_corpus(40, 30);
        let err = build_challenge_set(&c, 2, 1).unwrap_err();
        match err {
            ChallengeError::Infeasible { scenario, need, found } => {
                assert_eq!(scenario, "title_first_100");
                assert_eq!(need, 2);
                assert_eq!(found, 0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn duplicate_tracks_never_leak_into_ground_truth() {
        // Playlist [a, b, a, c]: seeding first 1 keeps "a" out of the truth
        // even though "a" also appears at position 2.
        let c = tiny_corpus(&[&["a", "b", "a", "c"], &["b", "c", "d"]]);
        let (seeds, gt) = split_at_positions(&c.playlists[0].tracks, &[0]).unwrap();
        assert_eq!(seeds, vec![(0, TrackId(0))]);
        let b = TrackId(c.tracks.get("b").unwrap());
        let c_track = TrackId(c.tracks.get("c").unwrap());
        let want: BTreeSet<TrackId> = [b, c_track].into_iter().collect();
        assert_eq!(gt, want);

        // All-duplicate remainder -> no usable ground truth.
        let c2 = tiny_corpus(&[&["a", "a", "a"]]);
        assert!(split_at_positions(&c2.playlists[0].tracks, &[0]).is_none());
    }

    #[test]
    fn json_round_trip() {
        let c = uniform_corpus(60, 120);
        let (cs, gt) = build_challenge_set(&c, 2, 7).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let cs_path = dir.path().join("challenge.json");
        let gt_path = dir.path().join("truth.json");
        save_challenge_json(&cs, &c, &cs_path).unwrap();
        save_ground_truth_json(&gt, &c, &gt_path).unwrap();
        assert_eq!(load_challenge_json(&cs_path, &c).unwrap(), cs);
        assert_eq!(load_ground_truth_json(&gt_path, &c).unwrap(), gt);

        // Titles absent exactly for the no-title scenarios in the file too.
        let raw = std::fs::read_to_string(&cs_path).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&raw).unwrap();
        for p in doc["playlists"].as_array().unwrap() {
            let tag = p["scenario"].as_str().unwrap();
            let sc = ScenarioType::from_tag(tag).unwrap();
            assert_eq!(p.get("name").is_some(), sc.has_title());
        }
    }

    #[test]
    fn loading_unknown_uri_fails() {
        let c = uniform_corpus(60, 120);
        let (cs, _) = build_challenge_set(&c, 1, 7).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("challenge.json");
        save_challenge_json(&cs, &c, &path).unwrap();
        let other = tiny_corpus(&[&["unrelated"]]);
        assert!(matches!(
            load_challenge_json(&path, &other).unwrap_err(),
            ChallengeError::UnknownTrack { .. }
        ));
    }
}
