//! Title-driven cold-start recommendation.
//!
//! Playlists are grouped by normalized title. A query title is matched
//! exactly on the normalized form (weight 1.0) and fuzzily by stemmed-token
//! Jaccard overlap (weight = the Jaccard score, gated by a threshold), and
//! candidate tracks are scored by how often they appear under matched
//! titles. When that pool runs dry the chain falls back to factors learned
//! on the title × track count matrix, then to global popularity.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rust_stemmers::{Algorithm, Stemmer};

use crate::corpus::{normalize_title, Corpus};
use crate::ids::TrackId;
use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

use super::popularity::recommend_popularity;
use super::wrmf::{als, WrmfParams};
use super::{rank_candidates, Recommendation, RecommendError};

/// Minimum token-set Jaccard similarity for a fuzzy title match.
pub const DEFAULT_JACCARD_THRESHOLD: f64 = 0.5;

/// One normalized title with everything needed to score its tracks.
#[derive(Debug, Clone, PartialEq)]
pub struct TitleEntry {
    /// Normalized title, the grouping key.
    pub key: String,
    /// Union of stemmed tokens over all raw spellings seen for this key.
    pub tokens: BTreeSet<String>,
    pub n_playlists: u32,
    /// (track, number of playlists under this title containing it),
    /// ascending by track.
    pub track_counts: Vec<(TrackId, u32)>,
}

/// Factors learned on the title × track count matrix; rows align with
/// [`TitleIndex::entries`].
#[derive(Debug, Clone, PartialEq)]
pub struct TitleFactors<S> {
    pub d: usize,
    pub title_factors: Vec<S>,
    pub track_factors: Vec<S>,
    pub params: WrmfParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TitleIndex<S> {
    /// Sorted by key; every playlist with a nonempty normalized title is
    /// counted under exactly one entry.
    pub entries: Vec<TitleEntry>,
    pub n_tracks: usize,
    pub mf: Option<TitleFactors<S>>,
    by_key: HashMap<String, usize>,
}

impl<S: Scalar> TitleIndex<S> {
    pub fn lookup(&self, normalized: &str) -> Option<&TitleEntry> {
        self.by_key.get(normalized).map(|&i| &self.entries[i])
    }

    /// Rebuilds the key map; used when deserializing.
    pub(crate) fn from_parts(
        entries: Vec<TitleEntry>,
        n_tracks: usize,
        mf: Option<TitleFactors<S>>,
    ) -> Self {
        let by_key = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.key.clone(), i))
            .collect();
        TitleIndex { entries, n_tracks, mf, by_key }
    }
}

/// Lowercase, split on non-alphanumeric boundaries, stem each token.
pub fn tokenize_title(raw: &str) -> BTreeSet<String> {
    let stemmer = Stemmer::create(Algorithm::English);
    raw.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| stemmer.stem(t).into_owned())
        .collect()
}

fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    inter as f64 / union as f64
}

/// Groups the corpus by normalized title; optionally factorizes the
/// title × track count matrix for the second fallback stage.
pub fn build_title_index<S: Scalar>(
    corpus: &Corpus,
    mf_params: Option<&WrmfParams>,
) -> Result<TitleIndex<S>, RecommendError> {
    let mut groups: BTreeMap<&str, (BTreeSet<String>, u32, BTreeMap<TrackId, u32>)> =
        BTreeMap::new();
    for p in &corpus.playlists {
        if p.normalized_name.is_empty() {
            continue;
        }
        let (tokens, n, counts) = groups.entry(&p.normalized_name).or_default();
        tokens.extend(tokenize_title(&p.name));
        *n += 1;
        for t in p.track_set() {
            *counts.entry(t).or_insert(0) += 1;
        }
    }
    let entries: Vec<TitleEntry> = groups
        .into_iter()
        .map(|(key, (tokens, n_playlists, counts))| TitleEntry {
            key: key.to_string(),
            tokens,
            n_playlists,
            track_counts: counts.into_iter().collect(),
        })
        .collect();

    let mf = match mf_params {
        Some(params) if !entries.is_empty() => {
            let rows: Vec<Vec<u32>> = entries
                .iter()
                .map(|e| e.track_counts.iter().map(|&(t, _)| t.0).collect())
                .collect();
            let counts: Vec<u32> = entries
                .iter()
                .flat_map(|e| e.track_counts.iter().map(|&(_, c)| c))
                .collect();
            let matrix = CsrMatrix::from_rows(corpus.n_tracks(), &rows);
            let (title_factors, track_factors) =
                als::<S>(&matrix, Some(&counts), params, None)?;
            Some(TitleFactors {
                d: params.d,
                title_factors,
                track_factors,
                params: params.clone(),
            })
        }
        _ => None,
    };
    Ok(TitleIndex::from_parts(entries, corpus.n_tracks(), mf))
}

/// Scores tracks for a playlist known only (or mostly) by its title:
/// score(t) = idf(t) · Σ_{matched titles m} weight(m) · count_m(t).
/// Shortfalls are extended by title-factor dot products and finally by
/// popularity, so the result is never an error — an unusable title simply
/// degrades to the popularity baseline.
pub fn recommend_title<S: Scalar>(
    title: &str,
    seed: &HashSet<TrackId>,
    index: &TitleIndex<S>,
    corpus: &Corpus,
    idf: &[S],
    jaccard_threshold: f64,
    n: usize,
) -> Recommendation<S> {
    let normalized = normalize_title(title);
    if normalized.is_empty() {
        return recommend_popularity(seed, corpus, n);
    }

    // Phase 1: exact + fuzzy title matches.
    let exact = index.by_key.get(normalized.as_str()).copied();
    let query_tokens = tokenize_title(title);
    let mut matches: Vec<(usize, S)> = Vec::new();
    if let Some(i) = exact {
        matches.push((i, S::one()));
    }
    for (i, entry) in index.entries.iter().enumerate() {
        if Some(i) == exact {
            continue;
        }
        let j = jaccard(&query_tokens, &entry.tokens);
        if j > 0.0 && j >= jaccard_threshold {
            matches.push((i, S::of_f64(j)));
        }
    }
    matches.sort_unstable_by_key(|&(i, _)| i);

    let mut acc: BTreeMap<TrackId, S> = BTreeMap::new();
    for &(i, w) in &matches {
        for &(t, count) in &index.entries[i].track_counts {
            if !seed.contains(&t) {
                *acc.entry(t).or_insert_with(S::zero) += w * S::of_u32(count);
            }
        }
    }
    let candidates: Vec<(TrackId, S)> = acc
        .into_iter()
        .map(|(t, a)| (t, idf[t.index()] * a))
        .collect();
    let mut rec = rank_candidates(candidates, n);

    // Phase 2: title factors, queried with the exact title's row or the
    // match-weighted mean of fuzzy-matched rows.
    if rec.len() < n {
        if let (Some(mf), false) = (&index.mf, matches.is_empty()) {
            let d = mf.d;
            let mut v = vec![S::zero(); d];
            let mut total = S::zero();
            for &(i, w) in &matches {
                let row = &mf.title_factors[i * d..(i + 1) * d];
                for k in 0..d {
                    v[k] += w * row[k];
                }
                total += w;
            }
            for k in 0..d {
                v[k] /= total;
            }
            let scored: Vec<(TrackId, S)> = (0..index.n_tracks as u32)
                .map(|t| {
                    let row = &mf.track_factors[t as usize * d..(t as usize + 1) * d];
                    let mut s = S::zero();
                    for k in 0..d {
                        s += v[k] * row[k];
                    }
                    (TrackId(t), s)
                })
                .collect();
            let ordered = rank_candidates(scored, index.n_tracks);
            rec.fill_from(ordered.tracks(), seed, n);
        }
    }

    // Phase 3: popularity.
    if rec.len() < n {
        rec.fill_from(corpus.popularity_ranking(), seed, n);
    }
    rec.short = rec.len() < n;
    rec
}
