//! Scenario-aware hybrid: switching (route recommenders by scenario) plus
//! weighting (blend min-max-normalized scores), with a popularity backstop
//! that tops every submission up to exactly the required length.

pub mod features;
pub mod ranker;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::challenge::{ChallengeError, ChallengePlaylist, ScenarioType};
use crate::corpus::Corpus;
use crate::ids::TrackId;
use crate::recommend::item_cf::{build_item_index, recommend_item_cf, ItemSimilarityIndex};
use crate::recommend::playlist_knn::recommend_playlist_knn;
use crate::recommend::popularity::recommend_popularity;
use crate::recommend::title::{build_title_index, recommend_title, TitleIndex};
use crate::recommend::wrmf::{recommend_mf, train_wrmf, FactorModel, WrmfParams};
use crate::recommend::{rank_candidates, Recommendation, RecommendError};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("catalog too small: need {need} non-seed tracks, only {have} available")]
    CatalogTooSmall { need: usize, have: usize },
    #[error("invalid hybrid config: {0}")]
    Config(String),
    #[error("io error on {file}: {source}")]
    Io {
        file: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Recommend(#[from] RecommendError),
    #[error(transparent)]
    Challenge(#[from] ChallengeError),
    #[error("ranker training failed at epoch {epoch}: {detail}")]
    TrainingFailure { epoch: usize, detail: String },
}

/// Fixed recommender slot order; blend weights, component score maps and
/// ranker features all index by this.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Popularity = 0,
    ItemCf = 1,
    PlaylistKnn = 2,
    Mf = 3,
    Title = 4,
}

pub const N_RECOMMENDERS: usize = 5;
pub const SLOT_NAMES: [&str; N_RECOMMENDERS] =
    ["popularity", "item_cf", "playlist_knn", "mf", "title"];

/// Everything trained once per corpus that recommendation needs at runtime.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSet<S> {
    pub item_index: ItemSimilarityIndex<S>,
    pub factors: FactorModel<S>,
    pub titles: TitleIndex<S>,
    /// Cached per-track idf of the training corpus.
    pub idf: Vec<S>,
}

/// Hyperparameters for [`train_models`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrainParams {
    pub wrmf: WrmfParams,
    pub item_neighbors: usize,
    /// None disables the title-factor fallback stage.
    pub title_mf: Option<WrmfParams>,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            wrmf: WrmfParams::default(),
            item_neighbors: crate::recommend::item_cf::DEFAULT_NEIGHBORS,
            title_mf: Some(WrmfParams { d: 32, iterations: 10, ..WrmfParams::default() }),
        }
    }
}

pub fn train_models<S: Scalar>(
    corpus: &Corpus,
    params: &TrainParams,
) -> Result<ModelSet<S>, RecommendError> {
    let item_index = build_item_index(corpus, params.item_neighbors);
    let factors = train_wrmf(corpus, &params.wrmf)?;
    let titles = build_title_index(corpus, params.title_mf.as_ref())?;
    Ok(ModelSet { item_index, factors, titles, idf: corpus.idf_table() })
}

/// Blend weights for one scenario, one per [`Slot`].
pub type WeightRow = [f64; N_RECOMMENDERS];

/// Per-scenario routing and blending, plus the runtime knobs of the
/// recommenders that have no trained artifact. Serializes as versioned TOML
/// so runs can be reproduced from a reviewed config file.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridConfig {
    /// Candidate pool handed to the re-ranker.
    pub pool: usize,
    /// Neighborhood size for the playlist-kNN recommender.
    pub knn_k: usize,
    /// Fuzzy title match threshold.
    pub jaccard_threshold: f64,
    /// Indexed by `ScenarioType::index()`; a zero weight disables the slot.
    pub weights: [WeightRow; 10],
}

impl Default for HybridConfig {
    fn default() -> Self {
        //                pop    cf    knn    mf   title
        let t1 = [0.0, 0.0, 0.0, 0.0, 1.0];
        let few = [0.02, 0.6, 1.0, 0.4, 0.4]; // 5-10 seeds
        let mid = [0.02, 1.0, 0.8, 0.5, 0.2]; // 25 seeds
        let many = [0.02, 1.0, 0.6, 0.5, 0.1]; // 100 seeds
        let one = [0.02, 0.6, 1.0, 0.3, 0.5]; // single seed
        HybridConfig {
            pool: 2000,
            knn_k: crate::recommend::playlist_knn::DEFAULT_K,
            jaccard_threshold: crate::recommend::title::DEFAULT_JACCARD_THRESHOLD,
            weights: [t1, few, few, few, few, mid, mid, many, many, one],
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawWeights {
    #[serde(default)]
    popularity: f64,
    #[serde(default)]
    item_cf: f64,
    #[serde(default)]
    playlist_knn: f64,
    #[serde(default)]
    mf: f64,
    #[serde(default)]
    title: f64,
}

#[derive(Serialize, Deserialize)]
struct RawConfig {
    version: u32,
    pool: usize,
    knn_k: usize,
    jaccard_threshold: f64,
    scenarios: BTreeMap<String, RawWeights>,
}

pub const CONFIG_VERSION: u32 = 1;

impl HybridConfig {
    /// Weights actually applied for a scenario: T1 is forced onto the title
    /// recommender alone, and scenarios without a title never route to it.
    pub fn effective_weights(&self, scenario: ScenarioType) -> WeightRow {
        let mut w = self.weights[scenario.index()];
        if scenario == ScenarioType::T1 {
            for (i, v) in w.iter_mut().enumerate() {
                if i != Slot::Title as usize {
                    *v = 0.0;
                }
            }
        } else if !scenario.has_title() {
            w[Slot::Title as usize] = 0.0;
        }
        w
    }

    pub fn validate(&self) -> Result<(), EnsembleError> {
        if self.pool == 0 {
            return Err(EnsembleError::Config("pool must be positive".into()));
        }
        if self.knn_k == 0 {
            return Err(EnsembleError::Config("knn_k must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.jaccard_threshold) {
            return Err(EnsembleError::Config(
                "jaccard_threshold must lie in [0, 1]".into(),
            ));
        }
        for scenario in ScenarioType::ALL {
            let w = self.weights[scenario.index()];
            if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(EnsembleError::Config(format!(
                    "scenario {}: weights must be finite and nonnegative",
                    scenario.tag()
                )));
            }
            let effective = self.effective_weights(scenario);
            if effective.iter().sum::<f64>() <= 0.0 {
                return Err(EnsembleError::Config(format!(
                    "scenario {}: no recommender is routed (effective weights all zero)",
                    scenario.tag()
                )));
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        let scenarios: BTreeMap<String, RawWeights> = ScenarioType::ALL
            .iter()
            .map(|s| {
                let w = self.weights[s.index()];
                (
                    s.tag().to_string(),
                    RawWeights {
                        popularity: w[0],
                        item_cf: w[1],
                        playlist_knn: w[2],
                        mf: w[3],
                        title: w[4],
                    },
                )
            })
            .collect();
        let raw = RawConfig {
            version: CONFIG_VERSION,
            pool: self.pool,
            knn_k: self.knn_k,
            jaccard_threshold: self.jaccard_threshold,
            scenarios,
        };
        toml::to_string_pretty(&raw).expect("config serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self, EnsembleError> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| EnsembleError::Config(e.to_string()))?;
        if raw.version != CONFIG_VERSION {
            return Err(EnsembleError::Config(format!(
                "unsupported config version {}",
                raw.version
            )));
        }
        let mut weights = [[0.0; N_RECOMMENDERS]; 10];
        for scenario in ScenarioType::ALL {
            let row = raw.scenarios.get(scenario.tag()).ok_or_else(|| {
                EnsembleError::Config(format!("missing scenario table {}", scenario.tag()))
            })?;
            weights[scenario.index()] =
                [row.popularity, row.item_cf, row.playlist_knn, row.mf, row.title];
        }
        for key in raw.scenarios.keys() {
            if ScenarioType::from_tag(key).is_none() {
                return Err(EnsembleError::Config(format!("unknown scenario table {key}")));
            }
        }
        let config = HybridConfig {
            pool: raw.pool,
            knn_k: raw.knn_k,
            jaccard_threshold: raw.jaccard_threshold,
            weights,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn save(&self, path: &Path) -> Result<(), EnsembleError> {
        fs::write(path, self.to_toml()).map_err(|e| EnsembleError::Io {
            file: path.to_path_buf(),
            source: e,
        })
    }

    pub fn load(path: &Path) -> Result<Self, EnsembleError> {
        let text = fs::read_to_string(path).map_err(|e| EnsembleError::Io {
            file: path.to_path_buf(),
            source: e,
        })?;
        Self::from_toml(&text)
    }
}

/// Blended candidates plus the per-slot normalized scores they came from
/// (kept for ranker features).
#[derive(Debug, Clone)]
pub struct BlendResult<S> {
    pub rec: Recommendation<S>,
    pub components: [HashMap<TrackId, S>; N_RECOMMENDERS],
}

/// Min-max normalization to [0, 1] over one component's scores; a constant
/// list maps to all-ones so a single-candidate recommender still votes.
pub(crate) fn normalize_scores<S: Scalar>(items: &[(TrackId, S)]) -> Vec<(TrackId, S)> {
    if items.is_empty() {
        return Vec::new();
    }
    let mut lo = items[0].1;
    let mut hi = items[0].1;
    for &(_, s) in items {
        lo = lo.min(s);
        hi = hi.max(s);
    }
    if hi == lo {
        return items.iter().map(|&(t, _)| (t, S::one())).collect();
    }
    let range = hi - lo;
    items.iter().map(|&(t, s)| (t, (s - lo) / range)).collect()
}

/// Runs the routed recommenders for a playlist and blends their normalized
/// scores with the scenario's weights, topping up from popularity. Never
/// fails on a small catalog — the result is simply flagged short.
pub fn blend_candidates<S: Scalar>(
    playlist: &ChallengePlaylist,
    models: &ModelSet<S>,
    config: &HybridConfig,
    corpus: &Corpus,
    n: usize,
) -> Result<BlendResult<S>, EnsembleError> {
    let weights = config.effective_weights(playlist.scenario);
    let seed_set: HashSet<TrackId> = playlist.seed_set();
    let idf = &models.idf;

    let mut components: [HashMap<TrackId, S>; N_RECOMMENDERS] = Default::default();
    let mut blended: BTreeMap<TrackId, S> = BTreeMap::new();
    for slot in 0..N_RECOMMENDERS {
        if weights[slot] == 0.0 {
            continue;
        }
        let rec: Recommendation<S> = match slot {
            0 => recommend_popularity(&seed_set, corpus, n),
            1 => recommend_item_cf(&playlist.seed_tracks, &models.item_index, idf, n)?,
            2 => recommend_playlist_knn(
                &playlist.seed_tracks,
                corpus,
                idf,
                config.knn_k,
                n,
            )?,
            3 => recommend_mf(&playlist.seed_tracks, &models.factors, idf, n)?,
            _ => recommend_title(
                playlist.title.as_deref().unwrap_or(""),
                &seed_set,
                &models.titles,
                corpus,
                idf,
                config.jaccard_threshold,
                n,
            ),
        };
        let w = S::of_f64(weights[slot]);
        let normalized = normalize_scores(&rec.items);
        for &(t, s) in &normalized {
            *blended.entry(t).or_insert_with(S::zero) += w * s;
        }
        components[slot] = normalized.into_iter().collect();
    }

    let mut rec = rank_candidates(blended.into_iter().collect(), n);
    if rec.len() < n {
        rec.fill_from(corpus.popularity_ranking(), &seed_set, n);
    }
    Ok(BlendResult { rec, components })
}

/// Submission-grade hybrid recommendation: exactly `n` unique non-seed
/// tracks or a catalog-too-small error.
pub fn recommend_hybrid<S: Scalar>(
    playlist: &ChallengePlaylist,
    models: &ModelSet<S>,
    config: &HybridConfig,
    corpus: &Corpus,
    n: usize,
) -> Result<Recommendation<S>, EnsembleError> {
    let blend = blend_candidates(playlist, models, config, corpus, n)?;
    if blend.rec.len() < n {
        return Err(EnsembleError::CatalogTooSmall { need: n, have: blend.rec.len() });
    }
    Ok(blend.rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::challenge::ChallengePlaylist;
    use crate::testutil::{tiny_corpus, titled_corpus};

    fn tid(corpus: &Corpus, uri: &str) -> TrackId {
        TrackId(corpus.tracks.get(uri).unwrap())
    }

    fn quick_params() -> TrainParams {
        TrainParams {
            wrmf: WrmfParams { d: 4, lambda: 0.1, alpha: 10.0, iterations: 5, rng_seed: 3 },
            item_neighbors: 50,
            title_mf: None,
        }
    }

    fn challenge(
        scenario: ScenarioType,
        title: Option<&str>,
        seeds: &[TrackId],
    ) -> ChallengePlaylist {
        ChallengePlaylist {
            pid: 7,
            scenario,
            title: title.map(str::to_string),
            seed_tracks: seeds.iter().enumerate().map(|(i, &t)| (i as u32, t)).collect(),
        }
    }

    #[test]
    fn default_config_is_valid_and_round_trips_toml() {
        let config = HybridConfig::default();
        config.validate().unwrap();
        let text = config.to_toml();
        let parsed = HybridConfig::from_toml(&text).unwrap();
        assert_eq!(config, parsed);
        assert!(text.contains("title_random_100"));
    }

    #[test]
    fn config_rejections() {
        let mut c = HybridConfig::default();
        c.weights[ScenarioType::T4.index()] = [0.0; N_RECOMMENDERS];
        assert!(matches!(c.validate(), Err(EnsembleError::Config(_))));

        let mut c = HybridConfig::default();
        c.weights[ScenarioType::T2.index()][1] = -0.5;
        assert!(matches!(c.validate(), Err(EnsembleError::Config(_))));

        // T1 forced to title-only: a config giving T1 no title weight is dead.
        let mut c = HybridConfig::default();
        c.weights[ScenarioType::T1.index()] = [1.0, 1.0, 1.0, 1.0, 0.0];
        assert!(matches!(c.validate(), Err(EnsembleError::Config(_))));

        // Title-less scenario whose only weight is on title.
        let mut c = HybridConfig::default();
        c.weights[ScenarioType::T3.index()] = [0.0, 0.0, 0.0, 0.0, 1.0];
        assert!(matches!(c.validate(), Err(EnsembleError::Config(_))));

        let text = HybridConfig::default().to_toml().replace("version = 1", "version = 9");
        assert!(matches!(
            HybridConfig::from_toml(&text),
            Err(EnsembleError::Config(_))
        ));
    }

    #[test]
    fn normalization_maps_to_unit_interval() {
        let items = vec![(TrackId(0), 2.0_f64), (TrackId(1), 6.0), (TrackId(2), 4.0)];
        let norm = normalize_scores(&items);
        assert_eq!(norm, vec![(TrackId(0), 0.0), (TrackId(1), 1.0), (TrackId(2), 0.5)]);
        // Constant scores map to all ones.
        let flat = normalize_scores(&[(TrackId(0), 3.0_f64), (TrackId(1), 3.0)]);
        assert!(flat.iter().all(|&(_, s)| s == 1.0));
        assert!(normalize_scores::<f64>(&[]).is_empty());
    }

    #[test]
    fn blend_tie_breaks_by_track_id() {
        // Two components, equal weights: candidate 9 normalized (1.0, 0.0),
        // candidate 4 (0.4, 0.6) → both blend to 0.5; ascending id wins.
        let a = [(TrackId(9), 1.0_f64), (TrackId(4), 0.4)];
        let b = [(TrackId(4), 0.6_f64), (TrackId(9), 0.0)];
        let mut blended: BTreeMap<TrackId, f64> = BTreeMap::new();
        for &(t, s) in a.iter().chain(b.iter()) {
            *blended.entry(t).or_insert(0.0) += 0.5 * s;
        }
        let rec = rank_candidates(blended.into_iter().collect(), 2);
        assert_eq!(rec.items, vec![(TrackId(4), 0.5), (TrackId(9), 0.5)]);
    }

    #[test]
    fn t1_routes_to_title_only() {
        let c = titled_corpus(&[
            ("workout", &["g1", "g2", "g3"]),
            ("workout", &["g1", "g4"]),
            ("chill", &["c1", "c2", "c3", "c4"]),
        ]);
        let models = train_models::<f64>(&c, &quick_params()).unwrap();
        let config = HybridConfig::default();
        let playlist = challenge(ScenarioType::T1, Some("workout"), &[]);
        let blend = blend_candidates(&playlist, &models, &config, &c, 4).unwrap();
        let direct = recommend_title(
            "workout",
            &HashSet::new(),
            &models.titles,
            &c,
            &models.idf,
            config.jaccard_threshold,
            4,
        );
        assert_eq!(
            blend.rec.tracks().collect::<Vec<_>>(),
            direct.tracks().collect::<Vec<_>>()
        );
        // Only the title component is populated.
        for slot in [Slot::Popularity, Slot::ItemCf, Slot::PlaylistKnn, Slot::Mf] {
            assert!(blend.components[slot as usize].is_empty());
        }
    }

    #[test]
    fn degenerate_weights_reduce_to_single_recommender() {
        let c = tiny_corpus(&[
            &["a", "b", "c"],
            &["a", "b", "d"],
            &["c", "d", "e"],
            &["a", "e"],
        ]);
        let models = train_models::<f64>(&c, &quick_params()).unwrap();
        let mut config = HybridConfig::default();
        config.weights[ScenarioType::T10.index()] = [0.0, 1.0, 0.0, 0.0, 0.0];
        let a = tid(&c, "a");
        let playlist = challenge(ScenarioType::T10, Some("list 0"), &[a]);
        let blend = blend_candidates(&playlist, &models, &config, &c, 3).unwrap();
        let direct =
            recommend_item_cf(&playlist.seed_tracks, &models.item_index, &models.idf, 3)
                .unwrap();
        assert_eq!(
            blend.rec.tracks().collect::<Vec<_>>(),
            direct.tracks().collect::<Vec<_>>()
        );
    }

    #[test]
    fn titleless_scenarios_never_call_title() {
        let c = titled_corpus(&[
            ("mix", &["a", "b", "c"]),
            ("mix", &["a", "b", "d"]),
            ("mix", &["b", "c", "d"]),
        ]);
        let models = train_models::<f64>(&c, &quick_params()).unwrap();
        let config = HybridConfig::default();
        let playlist = challenge(ScenarioType::T3, None, &[tid(&c, "a")]);
        let blend = blend_candidates(&playlist, &models, &config, &c, 3).unwrap();
        assert!(blend.components[Slot::Title as usize].is_empty());
        assert!(!blend.rec.is_empty());
    }

    #[test]
    fn output_is_exact_length_unique_and_seed_free() {
        let c = tiny_corpus(&[
            &["a", "b", "c", "d"],
            &["a", "c", "e", "f"],
            &["b", "d", "f", "g"],
            &["a", "g", "h"],
        ]);
        let models = train_models::<f64>(&c, &quick_params()).unwrap();
        let config = HybridConfig::default();
        let a = tid(&c, "a");
        let playlist = challenge(ScenarioType::T10, Some("list 1"), &[a]);
        let rec = recommend_hybrid(&playlist, &models, &config, &c, 7).unwrap();
        assert_eq!(rec.len(), 7); // 8 tracks minus 1 seed
        let mut seen = HashSet::new();
        for t in rec.tracks() {
            assert!(t != a);
            assert!(seen.insert(t));
        }
        let scores: Vec<f64> = rec.items.iter().map(|&(_, s)| s).collect();
        assert!(scores.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn catalog_too_small_is_an_error() {
        let c = tiny_corpus(&[&["a", "b"], &["a", "c"]]);
        let models = train_models::<f64>(&c, &quick_params()).unwrap();
        let config = HybridConfig::default();
        let playlist = challenge(ScenarioType::T10, None, &[tid(&c, "a")]);
        match recommend_hybrid(&playlist, &models, &config, &c, 10) {
            Err(EnsembleError::CatalogTooSmall { need: 10, have: 2 }) => {}
            other => panic!("expected catalog-too-small, got {other:?}"),
        }
    }

    #[test]
    fn blending_is_deterministic() {
        let c = tiny_corpus(&[
            &["a", "b", "c"],
            &["b", "c", "d"],
            &["c", "d", "e"],
            &["a", "d", "e"],
        ]);
        let models = train_models::<f64>(&c, &quick_params()).unwrap();
        let config = HybridConfig::default();
        let playlist = challenge(ScenarioType::T2, Some("list 2"), &[tid(&c, "a")]);
        let r1 = blend_candidates(&playlist, &models, &config, &c, 4).unwrap();
        let r2 = blend_candidates(&playlist, &models, &config, &c, 4).unwrap();
        assert_eq!(r1.rec, r2.rec);
    }
}
