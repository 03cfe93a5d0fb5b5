//! Weighted regularized matrix factorization for implicit feedback,
//! trained by alternating least squares.
//!
//! Minimizes  Σ_{p,t} c_pt (b_pt − x_p·y_t)² + λ(‖X‖² + ‖Y‖²)
//! where b_pt ∈ {0,1} marks playlist membership and the confidence is
//! c_pt = 1 + α·r_pt (r_pt = 1 for observed entries unless an explicit
//! count matrix is supplied). Each half-sweep solves exact d×d regularized
//! normal equations per row, exploiting that unobserved entries share
//! confidence 1: A_p = YᵀY + λI + Σ_{t∈p} α r · y_t y_tᵀ.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::corpus::Corpus;
use crate::ids::TrackId;
use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

use super::{rank_candidates, seed_track_set, Recommendation, RecommendError};

#[derive(Debug, Clone, PartialEq)]
pub struct WrmfParams {
    pub d: usize,
    pub lambda: f64,
    pub alpha: f64,
    pub iterations: usize,
    pub rng_seed: u64,
}

impl Default for WrmfParams {
    fn default() -> Self {
        WrmfParams { d: 64, lambda: 0.1, alpha: 40.0, iterations: 15, rng_seed: 42 }
    }
}

impl WrmfParams {
    fn validate(&self) -> Result<(), RecommendError> {
        if self.d == 0 {
            return Err(RecommendError::InvalidParams("d must be >= 1".into()));
        }
        if !(self.lambda > 0.0) {
            return Err(RecommendError::InvalidParams("lambda must be > 0".into()));
        }
        if !(self.alpha > 0.0) {
            return Err(RecommendError::InvalidParams("alpha must be > 0".into()));
        }
        Ok(())
    }
}

/// Learned playlist and track factors, both row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorModel<S> {
    pub d: usize,
    pub playlist_factors: Vec<S>,
    pub track_factors: Vec<S>,
    pub params: WrmfParams,
}

impl<S: Scalar> FactorModel<S> {
    pub fn n_playlists(&self) -> usize {
        self.playlist_factors.len() / self.d
    }

    pub fn n_tracks(&self) -> usize {
        self.track_factors.len() / self.d
    }

    pub fn playlist_factor(&self, p: usize) -> &[S] {
        &self.playlist_factors[p * self.d..(p + 1) * self.d]
    }

    pub fn track_factor(&self, t: usize) -> &[S] {
        &self.track_factors[t * self.d..(t + 1) * self.d]
    }
}

pub fn train_wrmf<S: Scalar>(
    corpus: &Corpus,
    params: &WrmfParams,
) -> Result<FactorModel<S>, RecommendError> {
    let (x, y) = als(&corpus.matrix, None, params, None)?;
    Ok(FactorModel {
        d: params.d,
        playlist_factors: x,
        track_factors: y,
        params: params.clone(),
    })
}

/// Like [`train_wrmf`] but invokes `trace(half_sweep_index, objective)` with
/// the full weighted objective after every half-sweep (1-based); half-sweeps
/// alternate playlist side, track side. The objective evaluation roughly
/// doubles the cost of a sweep, which is why it is not always on.
pub fn train_wrmf_traced<S: Scalar>(
    corpus: &Corpus,
    params: &WrmfParams,
    mut trace: impl FnMut(usize, f64),
) -> Result<FactorModel<S>, RecommendError> {
    let (x, y) = als(&corpus.matrix, None, params, Some(&mut trace))?;
    Ok(FactorModel {
        d: params.d,
        playlist_factors: x,
        track_factors: y,
        params: params.clone(),
    })
}

/// Shared ALS core over an arbitrary binary interaction matrix, optionally
/// with per-entry observation counts aligned with `matrix.indices()`
/// (confidence 1 + α·count). Returns (row_factors, col_factors).
pub(crate) fn als<S: Scalar>(
    matrix: &CsrMatrix,
    counts: Option<&[u32]>,
    params: &WrmfParams,
    mut trace: Option<&mut dyn FnMut(usize, f64)>,
) -> Result<(Vec<S>, Vec<S>), RecommendError> {
    params.validate()?;
    if let Some(c) = counts {
        assert_eq!(c.len(), matrix.nnz(), "count array must align with matrix entries");
    }
    let d = params.d;

    // Counts regrouped per column, in the same row-ascending order the CSC
    // mirror lists each column's entries.
    let counts_by_col: Option<Vec<Vec<u32>>> = counts.map(|cs| {
        let mut per: Vec<Vec<u32>> = vec![Vec::new(); matrix.n_cols()];
        let mut e = 0usize;
        for r in 0..matrix.n_rows() {
            for &c in matrix.row(r) {
                per[c as usize].push(cs[e]);
                e += 1;
            }
        }
        per
    });

    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let mut init = |len: usize| -> Vec<S> {
        (0..len).map(|_| S::of_f64(rng.gen::<f64>() * 0.02 - 0.01)).collect()
    };
    let mut x = init(matrix.n_rows() * d);
    let mut y = init(matrix.n_cols() * d);

    for iter in 0..params.iterations {
        solve_side(matrix, &y, &mut x, params, Side::Rows { counts });
        let sweep = 2 * iter + 1;
        check_finite(&x, sweep)?;
        if let Some(t) = trace.as_deref_mut() {
            t(sweep, objective(matrix, counts, &x, &y, params));
        }

        solve_side(matrix, &x, &mut y, params, Side::Cols {
            counts: counts_by_col.as_deref(),
        });
        let sweep = 2 * iter + 2;
        check_finite(&y, sweep)?;
        if let Some(t) = trace.as_deref_mut() {
            t(sweep, objective(matrix, counts, &x, &y, params));
        }
    }
    Ok((x, y))
}

#[derive(Clone, Copy)]
enum Side<'a> {
    /// Solving row factors; counts aligned with `matrix.indices()`.
    Rows { counts: Option<&'a [u32]> },
    /// Solving column factors; counts regrouped per column.
    Cols { counts: Option<&'a [Vec<u32>]> },
}

/// One half-sweep: recomputes every factor on one side against the fixed
/// other side. Rows are solved in parallel; each solve depends only on the
/// shared Gram matrix and that row's entries, so output is independent of
/// the worker count.
fn solve_side<S: Scalar>(
    matrix: &CsrMatrix,
    fixed: &[S],
    out: &mut [S],
    params: &WrmfParams,
    side: Side<'_>,
) {
    let d = params.d;
    let lambda = S::of_f64(params.lambda);
    let alpha = S::of_f64(params.alpha);
    let gram = gram_matrix(fixed, d);

    out.par_chunks_mut(d).enumerate().for_each_init(
        || (vec![S::zero(); d * d], vec![S::zero(); d]),
        |(a, rhs), (i, factor)| {
            a.copy_from_slice(&gram);
            for k in 0..d {
                a[k * d + k] += lambda;
            }
            rhs.fill(S::zero());
            // Fold one observed entry into the normal equations.
            let mut apply = |j: usize, count: u32| {
                let w = alpha * S::of_u32(count); // c - 1
                let conf = S::one() + w;
                let f = &fixed[j * d..(j + 1) * d];
                for r in 0..d {
                    let wr = w * f[r];
                    for cidx in 0..d {
                        a[r * d + cidx] += wr * f[cidx];
                    }
                    rhs[r] += conf * f[r];
                }
            };
            match side {
                Side::Rows { counts } => {
                    let lo = matrix.indptr()[i] as usize;
                    for (off, &j) in matrix.row(i).iter().enumerate() {
                        apply(j as usize, counts.map_or(1, |cs| cs[lo + off]));
                    }
                }
                Side::Cols { counts } => {
                    for (off, &r) in matrix.col(i).iter().enumerate() {
                        apply(r as usize, counts.map_or(1, |cs| cs[i][off]));
                    }
                }
            }
            solve_spd_in_place(a, rhs, factor, d);
        },
    );
}

/// Gram matrix FᵀF accumulated sequentially in row order for determinism.
fn gram_matrix<S: Scalar>(factors: &[S], d: usize) -> Vec<S> {
    let mut g = vec![S::zero(); d * d];
    for row in factors.chunks_exact(d) {
        for r in 0..d {
            let fr = row[r];
            for c in r..d {
                g[r * d + c] += fr * row[c];
            }
        }
    }
    for r in 1..d {
        for c in 0..r {
            g[r * d + c] = g[c * d + r];
        }
    }
    g
}

/// Cholesky solve of A·out = rhs for symmetric positive-definite A,
/// in place (A and rhs are scratch). Non-SPD input produces non-finite
/// output, caught by the caller's finiteness check.
fn solve_spd_in_place<S: Scalar>(a: &mut [S], rhs: &mut [S], out: &mut [S], d: usize) {
    // A = L Lᵀ, lower triangle written into a.
    for k in 0..d {
        let mut diag = a[k * d + k];
        for j in 0..k {
            diag -= a[k * d + j] * a[k * d + j];
        }
        let diag = diag.sqrt();
        a[k * d + k] = diag;
        for i in (k + 1)..d {
            let mut v = a[i * d + k];
            for j in 0..k {
                v -= a[i * d + j] * a[k * d + j];
            }
            a[i * d + k] = v / diag;
        }
    }
    // Forward substitution L z = rhs (z written over rhs).
    for i in 0..d {
        let mut v = rhs[i];
        for j in 0..i {
            v -= a[i * d + j] * rhs[j];
        }
        rhs[i] = v / a[i * d + i];
    }
    // Back substitution Lᵀ out = z.
    for i in (0..d).rev() {
        let mut v = rhs[i];
        for j in (i + 1)..d {
            v -= a[j * d + i] * out[j];
        }
        out[i] = v / a[i * d + i];
    }
}

fn check_finite<S: Scalar>(factors: &[S], half_sweep: usize) -> Result<(), RecommendError> {
    if factors.iter().any(|v| !v.is_finite()) {
        return Err(RecommendError::Numerical {
            iteration: half_sweep,
            detail: "non-finite factor value; lower alpha or raise lambda".into(),
        });
    }
    Ok(())
}

/// Full weighted objective Σ c(b − xy)² + λ(‖X‖² + ‖Y‖²), in f64.
///
/// The dense sum over unobserved entries folds into Gram matrices:
/// Σ_all (x·y)² = Σ_p x_pᵀ (YᵀY) x_p, then observed entries are corrected
/// to their true confidence-weighted residuals.
pub(crate) fn objective<S: Scalar>(
    matrix: &CsrMatrix,
    counts: Option<&[u32]>,
    x: &[S],
    y: &[S],
    params: &WrmfParams,
) -> f64 {
    let d = params.d;
    let gy: Vec<f64> = gram_matrix(y, d).iter().map(|v| v.to_f64().unwrap()).collect();
    let xf: Vec<f64> = x.iter().map(|v| v.to_f64().unwrap()).collect();
    let yf: Vec<f64> = y.iter().map(|v| v.to_f64().unwrap()).collect();

    let mut total = 0.0;
    for row in xf.chunks_exact(d) {
        for r in 0..d {
            let mut s = 0.0;
            for c in 0..d {
                s += gy[r * d + c] * row[c];
            }
            total += row[r] * s;
        }
    }
    for i in 0..matrix.n_rows() {
        let (lo, hi) = (matrix.indptr()[i] as usize, matrix.indptr()[i + 1] as usize);
        let xi = &xf[i * d..(i + 1) * d];
        for e in lo..hi {
            let j = matrix.indices()[e] as usize;
            let yj = &yf[j * d..(j + 1) * d];
            let pred: f64 = xi.iter().zip(yj).map(|(&a, &b)| a * b).sum();
            let c = 1.0 + params.alpha * counts.map_or(1.0, |cs| cs[e] as f64);
            // Replace the background (pred − 0)² term with the observed one.
            total += c * (1.0 - pred) * (1.0 - pred) - pred * pred;
        }
    }
    let sq = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>();
    total + params.lambda * (sq(&xf) + sq(&yf))
}

/// Seed vector v = mean_{s∈seed} idf(s)·Y[s]; score(t) = v·Y[t] over
/// non-seed tracks.
pub fn recommend_mf<S: Scalar>(
    seed: &[(u32, TrackId)],
    model: &FactorModel<S>,
    idf: &[S],
    n: usize,
) -> Result<Recommendation<S>, RecommendError> {
    let seed_tracks = seed_track_set(seed);
    if seed_tracks.is_empty() {
        return Err(RecommendError::EmptySeed);
    }
    let d = model.d;
    let mut v = vec![S::zero(); d];
    for &s in &seed_tracks {
        let f = model.track_factor(s.index());
        let w = idf[s.index()];
        for k in 0..d {
            v[k] += w * f[k];
        }
    }
    let inv = S::one() / S::of_usize(seed_tracks.len());
    for k in 0..d {
        v[k] *= inv;
    }
    let candidates: Vec<(TrackId, S)> = (0..model.n_tracks() as u32)
        .filter(|&t| !seed_tracks.contains(&TrackId(t)))
        .map(|t| {
            let f = model.track_factor(t as usize);
            let mut score = S::zero();
            for k in 0..d {
                score += v[k] * f[k];
            }
            (TrackId(t), score)
        })
        .collect();
    Ok(rank_candidates(candidates, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::tiny_corpus;

    fn params(d: usize, lambda: f64, alpha: f64, iterations: usize) -> WrmfParams {
        WrmfParams { d, lambda, alpha, iterations, rng_seed: 9 }
    }

    #[test]
    fn invalid_params_are_rejected() {
        let c = tiny_corpus(&[&["a"]]);
        for bad in [
            params(0, 0.1, 40.0, 1),
            params(2, 0.0, 40.0, 1),
            params(2, -1.0, 40.0, 1),
            params(2, 0.1, 0.0, 1),
        ] {
            assert!(matches!(
                train_wrmf::<f64>(&c, &bad),
                Err(RecommendError::InvalidParams(_))
            ));
        }
    }

    #[test]
    fn heavy_regularization_drives_predictions_to_zero() {
        // Single playlist, single track, enormous lambda: the penalty
        // dominates and |x·y| collapses toward zero.
        let c = tiny_corpus(&[&["only"]]);
        let m = train_wrmf::<f64>(&c, &params(1, 1e6, 40.0, 10)).unwrap();
        let pred = m.playlist_factors[0] * m.track_factors[0];
        assert!(pred.abs() < 1e-3, "pred = {pred}");
    }

    #[test]
    fn objective_never_increases_across_half_sweeps() {
        let c = tiny_corpus(&[&["a", "b"], &["b", "c"], &["a", "c", "d"]]);
        let mut history = Vec::new();
        train_wrmf_traced::<f64>(&c, &params(2, 0.1, 5.0, 8), |sweep, obj| {
            history.push((sweep, obj));
        })
        .unwrap();
        assert_eq!(history.len(), 16);
        for w in history.windows(2) {
            let (prev, next) = (w[0].1, w[1].1);
            assert!(
                next <= prev * (1.0 + 1e-9) + 1e-12,
                "objective rose from {prev} to {next} at sweep {}",
                w[1].0
            );
        }
    }

    #[test]
    fn near_unregularized_fit_reconstructs_observations() {
        // 3 playlists × 3 tracks, d=3, lambda tiny: observed entries must be
        // reproduced almost exactly.
        let c = tiny_corpus(&[&["a", "b"], &["b", "c"], &["a", "c"]]);
        let m = train_wrmf::<f64>(&c, &params(3, 1e-6, 40.0, 30)).unwrap();
        for p in 0..3 {
            for &t in c.matrix.row(p) {
                let x = m.playlist_factor(p);
                let y = m.track_factor(t as usize);
                let pred: f64 = x.iter().zip(y).map(|(&a, &b)| a * b).sum();
                assert!((pred - 1.0).abs() < 1e-3, "p={p} t={t} pred={pred}");
            }
        }
    }

    #[test]
    fn training_is_deterministic_and_thread_count_independent() {
        let c = tiny_corpus(&[&["a", "b", "c"], &["b", "d"], &["a", "d", "e"]]);
        let p = params(3, 0.1, 10.0, 4);
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let m1 = pool1.install(|| train_wrmf::<f64>(&c, &p).unwrap());
        let m2 = pool4.install(|| train_wrmf::<f64>(&c, &p).unwrap());
        let m3 = train_wrmf::<f64>(&c, &p).unwrap();
        assert_eq!(m1, m2);
        assert_eq!(m1, m3);
    }

    #[test]
    fn different_seeds_give_different_factors() {
        let c = tiny_corpus(&[&["a", "b"], &["b", "c"]]);
        let mut p1 = params(2, 0.1, 10.0, 2);
        let mut p2 = p1.clone();
        p1.rng_seed = 1;
        p2.rng_seed = 2;
        let m1 = train_wrmf::<f64>(&c, &p1).unwrap();
        let m2 = train_wrmf::<f64>(&c, &p2).unwrap();
        assert_ne!(m1.playlist_factors, m2.playlist_factors);
    }

    #[test]
    fn overflow_reports_numerical_failure_with_sweep() {
        // f32 with absurd alpha overflows within a sweep or two.
        let c = tiny_corpus(&[&["a", "b"], &["b", "c"], &["a", "c"]]);
        let p = WrmfParams { d: 2, lambda: 1e-30, alpha: 1e38, iterations: 5, rng_seed: 3 };
        match train_wrmf::<f32>(&c, &p) {
            Err(RecommendError::Numerical { iteration, .. }) => {
                assert!(iteration >= 1, "iteration recorded");
            }
            other => panic!("expected numerical failure, got {other:?}"),
        }
    }

    #[test]
    fn mf_toy_ranking_follows_dot_products() {
        // d=1 track factors [2, 1, -1], idf all 1, seed {t0}:
        // v = 2, scores t1 = 2, t2 = -2.
        let model = FactorModel {
            d: 1,
            playlist_factors: vec![0.0_f64],
            track_factors: vec![2.0, 1.0, -1.0],
            params: WrmfParams::default(),
        };
        let idf = vec![1.0; 3];
        let rec = recommend_mf(&[(0, TrackId(0))], &model, &idf, 10).unwrap();
        assert_eq!(rec.items, vec![(TrackId(1), 2.0), (TrackId(2), -2.0)]);
    }

    #[test]
    fn mf_empty_seed_is_an_error() {
        let model = FactorModel {
            d: 1,
            playlist_factors: vec![0.0_f64],
            track_factors: vec![1.0],
            params: WrmfParams::default(),
        };
        assert!(matches!(
            recommend_mf(&[], &model, &[1.0], 5),
            Err(RecommendError::EmptySeed)
        ));
    }

    #[test]
    fn mf_averages_idf_weighted_seed_factors() {
        let model = FactorModel {
            d: 2,
            playlist_factors: vec![],
            track_factors: vec![
                1.0_f64, 0.0, // t0
                0.0, 1.0, // t1
                1.0, 1.0, // t2
                -1.0, 1.0, // t3
            ],
            params: WrmfParams::default(),
        };
        let idf = vec![2.0, 4.0, 1.0, 1.0];
        // v = (2·[1,0] + 4·[0,1]) / 2 = [1, 2].
        let rec = recommend_mf(&[(0, TrackId(0)), (1, TrackId(1))], &model, &idf, 10)
            .unwrap();
        let by_track: std::collections::HashMap<TrackId, f64> =
            rec.items.iter().copied().collect();
        assert_eq!(by_track[&TrackId(2)], 3.0); // [1,2]·[1,1]
        assert_eq!(by_track[&TrackId(3)], 1.0); // [1,2]·[-1,1]
        assert!(!rec.contains(TrackId(0)) && !rec.contains(TrackId(1)));
    }
}
