//! Playlist continuation engine: corpus model, synthetic data generation,
//! challenge splitting, first-stage recommenders, hybrid blending, pairwise
//! re-ranking and the evaluation metrics, all generic over the float width.

pub mod binio;
pub mod challenge;
pub mod corpus;
pub mod ensemble;
pub mod ids;
pub mod metrics;
pub mod recommend;
pub mod scalar;
pub mod sparse;
pub mod submission;
pub mod synthgen;

#[cfg(test)]
pub(crate) mod testutil;

pub use corpus::{Corpus, CorpusError, CorpusStats, Playlist};
pub use ids::{AlbumId, ArtistId, Interner, PlaylistId, TrackId};
pub use scalar::Scalar;
pub use sparse::CsrMatrix;

/// Concrete aliases for the common single-precision deployment; the `f64`
/// counterparts exist for oracle tests and tolerance-sensitive evaluation.
pub type FactorModelF32 = recommend::wrmf::FactorModel<f32>;
pub type FactorModelF64 = recommend::wrmf::FactorModel<f64>;
pub type ItemIndexF32 = recommend::item_cf::ItemSimilarityIndex<f32>;
pub type ItemIndexF64 = recommend::item_cf::ItemSimilarityIndex<f64>;
pub type TitleIndexF32 = recommend::title::TitleIndex<f32>;
pub type TitleIndexF64 = recommend::title::TitleIndex<f64>;
pub type ModelSetF32 = ensemble::ModelSet<f32>;
pub type ModelSetF64 = ensemble::ModelSet<f64>;
pub type RankerF32 = ensemble::ranker::RankerModel<f32>;
pub type RankerF64 = ensemble::ranker::RankerModel<f64>;
pub type RecommendationF32 = recommend::Recommendation<f32>;
pub type RecommendationF64 = recommend::Recommendation<f64>;
