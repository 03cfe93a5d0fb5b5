//! Second-stage pairwise re-ranker.
//!
//! A linear model over [`features`](super::features) trained with pairwise
//! logistic loss Σ ln(1 + exp(−w·(f⁺ − f⁻))) by full-batch gradient descent.
//! The step size halves whenever a step would raise the loss, so the loss
//! trajectory is nonincreasing by construction.

use std::collections::HashSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::binio::{read_u32, write_u32};
use crate::challenge::build_challenge_set;
use crate::corpus::Corpus;
use crate::ids::{PlaylistId, TrackId};
use crate::recommend::artifacts::{
    corrupt, expect_eof, read_header, read_scalars, wrap, write_header, write_scalars,
    ArtifactError,
};
use crate::recommend::rank_candidates;
use crate::scalar::Scalar;

use super::features::{features_for_pool, FeatureVec, N_FEATURES};
use super::{blend_candidates, train_models, EnsembleError, HybridConfig, TrainParams};

const RANKER_MAGIC: &[u8] = b"ENC.RANK";

/// Linear scoring weights, one per feature dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct RankerModel<S> {
    pub weights: [S; N_FEATURES],
}

impl<S: Scalar> RankerModel<S> {
    pub fn zeros() -> Self {
        RankerModel { weights: [S::zero(); N_FEATURES] }
    }

    pub fn score(&self, f: &FeatureVec<S>) -> S {
        let mut s = S::zero();
        for k in 0..N_FEATURES {
            s += self.weights[k] * f[k];
        }
        s
    }
}

/// One (better, worse) observation from an internal challenge simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingPair<S> {
    pub positive: FeatureVec<S>,
    pub negative: FeatureVec<S>,
}

/// Simulates challenge scenarios on playlists held out of `corpus`, runs the
/// first stage on the remainder, and labels pool candidates against the
/// withheld ground truth. For every ground-truth hit in the pool one
/// negative is sampled uniformly from the same pool's misses.
pub fn make_training_pairs<S: Scalar>(
    corpus: &Corpus,
    train_params: &TrainParams,
    config: &HybridConfig,
    per_type: usize,
    rng_seed: u64,
) -> Result<Vec<TrainingPair<S>>, EnsembleError> {
    let (challenge_set, ground_truth) = build_challenge_set(corpus, per_type, rng_seed)?;
    let held: HashSet<u64> = challenge_set.playlists.iter().map(|p| p.pid).collect();
    let held_dense: HashSet<PlaylistId> = corpus
        .playlists
        .iter()
        .filter(|p| held.contains(&p.orig_pid))
        .map(|p| p.pid)
        .collect();
    let reduced = corpus.without_playlists(&held_dense);
    let models = train_models::<S>(&reduced, train_params)?;

    // Feature extraction per playlist is independent; the rng-driven
    // negative sampling below stays sequential in playlist order.
    let labeled: Vec<(Vec<FeatureVec<S>>, Vec<FeatureVec<S>>)> = challenge_set
        .playlists
        .par_iter()
        .map(|playlist| {
            let blend =
                blend_candidates(playlist, &models, config, &reduced, config.pool)?;
            let feats = features_for_pool(playlist, &blend, &reduced, &models.idf);
            let truth = &ground_truth
                .get(playlist.pid)
                .expect("challenge playlist has ground truth")
                .tracks;
            let mut positives = Vec::new();
            let mut negatives = Vec::new();
            for (t, f) in feats {
                if truth.contains(&t) {
                    positives.push(f);
                } else {
                    negatives.push(f);
                }
            }
            Ok((positives, negatives))
        })
        .collect::<Result<_, EnsembleError>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut pairs = Vec::new();
    for (positives, negatives) in labeled {
        if negatives.is_empty() {
            continue;
        }
        for positive in positives {
            let negative = negatives[rng.gen_range(0..negatives.len())];
            pairs.push(TrainingPair { positive, negative });
        }
    }
    Ok(pairs)
}

pub fn train_ranker<S: Scalar>(
    pairs: &[TrainingPair<S>],
    epochs: usize,
    learning_rate: f64,
    rng_seed: u64,
) -> Result<RankerModel<S>, EnsembleError> {
    train_ranker_traced(pairs, epochs, learning_rate, rng_seed, |_, _| {})
}

/// Like [`train_ranker`], reporting `trace(epoch, loss)` after every epoch
/// (epoch 0 is the initial loss at w = 0).
pub fn train_ranker_traced<S: Scalar>(
    pairs: &[TrainingPair<S>],
    epochs: usize,
    learning_rate: f64,
    rng_seed: u64,
    mut trace: impl FnMut(usize, f64),
) -> Result<RankerModel<S>, EnsembleError> {
    if pairs.is_empty() {
        return Err(EnsembleError::TrainingFailure {
            epoch: 0,
            detail: "no training pairs".into(),
        });
    }
    if !(learning_rate > 0.0) {
        return Err(EnsembleError::TrainingFailure {
            epoch: 0,
            detail: "learning_rate must be positive".into(),
        });
    }
    // Fixed summation order, drawn once: determinism does not depend on the
    // caller's pair ordering beyond this seeded shuffle.
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(rng_seed));
    let deltas: Vec<[f64; N_FEATURES]> = order
        .iter()
        .map(|&i| {
            let mut d = [0.0; N_FEATURES];
            for k in 0..N_FEATURES {
                d[k] = (pairs[i].positive[k] - pairs[i].negative[k]).to_f64().unwrap();
            }
            d
        })
        .collect();

    let mut w = [0.0_f64; N_FEATURES];
    let mut lr = learning_rate;
    let mut loss = pairwise_loss(&deltas, &w);
    trace(0, loss);
    if !loss.is_finite() {
        return Err(EnsembleError::TrainingFailure {
            epoch: 0,
            detail: "non-finite initial loss; check feature values".into(),
        });
    }
    for epoch in 1..=epochs {
        let grad = pairwise_gradient(&deltas, &w);
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(EnsembleError::TrainingFailure {
                epoch,
                detail: "non-finite gradient; lower learning_rate".into(),
            });
        }
        // Backtracking: halve the step until the loss stops increasing.
        loop {
            let mut next = w;
            for k in 0..N_FEATURES {
                next[k] -= lr * grad[k];
            }
            let next_loss = pairwise_loss(&deltas, &next);
            if next_loss.is_finite() && next_loss <= loss {
                w = next;
                loss = next_loss;
                break;
            }
            lr /= 2.0;
            if lr < 1e-300 {
                // Gradient numerically zero: already at a minimum.
                break;
            }
        }
        trace(epoch, loss);
    }
    let mut weights = [S::zero(); N_FEATURES];
    for k in 0..N_FEATURES {
        weights[k] = S::of_f64(w[k]);
    }
    Ok(RankerModel { weights })
}

/// Σ ln(1 + exp(−w·Δ)), evaluated with the stable softplus form.
fn pairwise_loss(deltas: &[[f64; N_FEATURES]], w: &[f64; N_FEATURES]) -> f64 {
    deltas
        .iter()
        .map(|d| {
            let margin: f64 = (0..N_FEATURES).map(|k| w[k] * d[k]).sum();
            softplus(-margin)
        })
        .sum()
}

fn pairwise_gradient(
    deltas: &[[f64; N_FEATURES]],
    w: &[f64; N_FEATURES],
) -> [f64; N_FEATURES] {
    let mut grad = [0.0; N_FEATURES];
    for d in deltas {
        let margin: f64 = (0..N_FEATURES).map(|k| w[k] * d[k]).sum();
        let coeff = -sigmoid(-margin);
        for k in 0..N_FEATURES {
            grad[k] += coeff * d[k];
        }
    }
    grad
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Rescores a blended candidate pool with the ranker and keeps the top `n`
/// (score descending, ascending TrackId on ties). A pool smaller than `n`
/// is topped up from popularity and flagged short.
pub fn rerank<S: Scalar>(
    playlist: &crate::challenge::ChallengePlaylist,
    blend: &super::BlendResult<S>,
    ranker: &RankerModel<S>,
    corpus: &Corpus,
    idf: &[S],
    n: usize,
) -> crate::recommend::Recommendation<S> {
    let feats = features_for_pool(playlist, blend, corpus, idf);
    let scored: Vec<(TrackId, S)> =
        feats.iter().map(|(t, f)| (*t, ranker.score(f))).collect();
    let mut rec = rank_candidates(scored, n);
    if rec.len() < n {
        rec.fill_from(corpus.popularity_ranking(), &playlist.seed_set(), n);
    }
    rec
}

pub fn save_ranker<S: Scalar>(
    model: &RankerModel<S>,
    path: &Path,
) -> Result<(), ArtifactError> {
    let run = || -> std::io::Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        write_header(&mut w, RANKER_MAGIC, S::DTYPE_TAG)?;
        write_u32(&mut w, N_FEATURES as u32)?;
        write_scalars(&mut w, &model.weights)?;
        use std::io::Write;
        w.flush()
    };
    run().map_err(|e| wrap(path, e))
}

pub fn load_ranker<S: Scalar>(path: &Path) -> Result<RankerModel<S>, ArtifactError> {
    let run = || -> std::io::Result<RankerModel<S>> {
        let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
        read_header(&mut r, RANKER_MAGIC, S::DTYPE_TAG)?;
        let n = read_u32(&mut r)? as usize;
        if n != N_FEATURES {
            return Err(corrupt(format!(
                "ranker has {n} features, this build expects {N_FEATURES}"
            )));
        }
        let v = read_scalars::<S, _>(&mut r, N_FEATURES, "ranker weights")?;
        expect_eof(&mut r)?;
        let mut weights = [S::zero(); N_FEATURES];
        weights.copy_from_slice(&v);
        Ok(RankerModel { weights })
    };
    run().map_err(|e| wrap(path, e))
}
