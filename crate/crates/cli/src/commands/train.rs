use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use encore_core::ensemble::ranker::{make_training_pairs, save_ranker, train_ranker_traced};
use encore_core::ensemble::{HybridConfig, ModelSet, TrainParams};
use encore_core::recommend::artifacts::{save_factor_model, save_item_index, save_title_index};
use encore_core::recommend::item_cf::build_item_index;
use encore_core::recommend::title::build_title_index;
use encore_core::recommend::wrmf::{train_wrmf_traced, WrmfParams};

use crate::manifest::Manifest;

/// Fit every trained artifact on a training corpus: the item-similarity
/// index, the interaction factor model, the title-conditioned factor model,
/// and the pairwise re-ranker, plus the hybrid config they run under.
#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training-corpus snapshot
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,
    /// Output directory (created if missing)
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Hybrid blend config TOML; built-in defaults when omitted
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Latent dimensions of the interaction factor model
    #[arg(long, default_value_t = 64)]
    pub factors: usize,
    /// Alternating half-sweep pairs for the factor model
    #[arg(long, default_value_t = 15)]
    pub iterations: usize,
    /// L2 regularization for both factor models
    #[arg(long, default_value_t = 0.1)]
    pub lambda: f64,
    /// Implicit-feedback confidence multiplier
    #[arg(long, default_value_t = 40.0)]
    pub alpha: f64,
    /// Neighbors kept per track in the item-similarity index
    #[arg(long, default_value_t = 200)]
    pub neighbors: usize,
    /// Latent dimensions of the title-conditioned factor model (0 disables
    /// the title fallback's factor stage)
    #[arg(long, default_value_t = 32)]
    pub title_factors: usize,
    #[arg(long, default_value_t = 10)]
    pub title_iterations: usize,
    /// Gradient-descent epochs for the pairwise re-ranker
    #[arg(long, default_value_t = 40)]
    pub ranker_epochs: usize,
    /// Initial re-ranker learning rate (backtracks when a step overshoots)
    #[arg(long, default_value_t = 0.5)]
    pub ranker_lr: f64,
    /// Playlists per scenario in the internal split the re-ranker learns on
    #[arg(long, default_value_t = 100)]
    pub ranker_per_type: usize,
    /// RNG seed for factor init, the internal split, and pair sampling
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

pub fn run(args: &TrainArgs) -> Result<()> {
    let corpus = super::load_corpus(&args.corpus)?;
    let config = match &args.config {
        Some(path) => HybridConfig::load(path)?,
        None => HybridConfig::default(),
    };
    config.validate()?;

    let params = TrainParams {
        wrmf: WrmfParams {
            d: args.factors,
            lambda: args.lambda,
            alpha: args.alpha,
            iterations: args.iterations,
            rng_seed: args.seed,
        },
        item_neighbors: args.neighbors,
        title_mf: (args.title_factors > 0).then(|| WrmfParams {
            d: args.title_factors,
            lambda: args.lambda,
            alpha: args.alpha,
            iterations: args.title_iterations,
            rng_seed: args.seed.wrapping_add(1),
        }),
    };

    eprintln!(
        "item index: {} tracks, keeping {} neighbors each",
        corpus.n_tracks(),
        params.item_neighbors
    );
    let item_index = build_item_index::<f64>(&corpus, params.item_neighbors);

    eprintln!(
        "factor model: d={}, {} iterations",
        params.wrmf.d, params.wrmf.iterations
    );
    let factors = train_wrmf_traced(&corpus, &params.wrmf, |sweep, obj| {
        eprintln!("  sweep {sweep:>3}: objective {obj:.6e}");
    })?;

    if let Some(tp) = &params.title_mf {
        eprintln!("title index: factor stage d={}, {} iterations", tp.d, tp.iterations);
    } else {
        eprintln!("title index: neighbor stage only");
    }
    let titles = build_title_index(&corpus, params.title_mf.as_ref())?;
    let models = ModelSet { item_index, factors, titles, idf: corpus.idf_table() };

    eprintln!(
        "re-ranker: internal split of {} playlists per scenario",
        args.ranker_per_type
    );
    let pairs =
        make_training_pairs::<f64>(&corpus, &params, &config, args.ranker_per_type, args.seed)?;
    eprintln!("re-ranker: {} training pairs", pairs.len());
    let ranker = train_ranker_traced(
        &pairs,
        args.ranker_epochs,
        args.ranker_lr,
        args.seed,
        |epoch, loss| {
            if epoch % 10 == 0 || epoch == args.ranker_epochs {
                eprintln!("  epoch {epoch:>3}: loss {loss:.6}");
            }
        },
    )?;

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let factors_path = args.out.join("factors.bin");
    let items_path = args.out.join("item_index.bin");
    let titles_path = args.out.join("title_index.bin");
    let ranker_path = args.out.join("ranker.bin");
    let config_path = args.out.join("hybrid.toml");
    save_factor_model(&models.factors, &factors_path)?;
    save_item_index(&models.item_index, &items_path)?;
    save_title_index(&models.titles, &titles_path)?;
    save_ranker(&ranker, &ranker_path)?;
    config.save(&config_path)?;

    let mut manifest = Manifest::new("train");
    manifest
        .param("factors", args.factors)
        .param("iterations", args.iterations)
        .param("lambda", args.lambda)
        .param("alpha", args.alpha)
        .param("neighbors", args.neighbors)
        .param("title_factors", args.title_factors)
        .param("title_iterations", args.title_iterations)
        .param("ranker_epochs", args.ranker_epochs)
        .param("ranker_lr", args.ranker_lr)
        .param("ranker_per_type", args.ranker_per_type)
        .param("seed", args.seed)
        .input("corpus", &args.corpus)?;
    if let Some(path) = &args.config {
        manifest.param("config", path.display().to_string());
        manifest.input("config", path)?;
    }
    manifest
        .output("factors", &args.out, &factors_path)?
        .output("item_index", &args.out, &items_path)?
        .output("title_index", &args.out, &titles_path)?
        .output("ranker", &args.out, &ranker_path)?
        .output("hybrid_config", &args.out, &config_path)?;
    manifest.write(&args.out)?;
    Ok(())
}
