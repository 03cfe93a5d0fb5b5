//! Round trips through every on-disk format: corpus snapshots, JSON slices,
//! trained-model artifacts, hybrid configs, challenge sets, submissions and
//! score reports. Artifacts must also reject truncated or tampered files.

mod common;

use std::fs;
use std::path::Path;

use encore_core::challenge::{
    build_challenge_set, load_challenge_json, load_ground_truth_json, save_challenge_json,
    save_ground_truth_json,
};
use encore_core::corpus::{ingest, write_json_slices};
use encore_core::ensemble::features::N_FEATURES;
use encore_core::ensemble::ranker::{load_ranker, save_ranker, train_ranker, TrainingPair};
use encore_core::ensemble::{train_models, EnsembleError, HybridConfig, TrainParams};
use encore_core::metrics::{load_score_report_json, save_score_report_json, score_report};
use encore_core::recommend::artifacts::{
    load_factor_model, load_item_index, load_title_index, save_factor_model, save_item_index,
    save_title_index, ArtifactError,
};
use encore_core::recommend::popularity::recommend_popularity;
use encore_core::recommend::wrmf::WrmfParams;
use encore_core::submission::{
    load_submission_csv, save_submission_csv, validate_resolved, Submission, ValidationCode,
    SUBMISSION_LENGTH,
};
use encore_core::synthgen::{generate, GenConfig};
use encore_core::{Corpus, Scalar, TrackId};

fn small_corpus() -> Corpus {
    generate(&GenConfig {
        seed: 21,
        n_genres: 4,
        artists_per_genre: 4,
        albums_per_artist: 2,
        tracks_per_album: 3,
        n_playlists: 100,
        playlist_len_range: (3, 30),
        genre_mix_concentration: 3.0,
        title_vocab: Vec::new(),
    })
    .unwrap()
}

#[test]
fn corpus_snapshot_round_trips_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let c = small_corpus();
    let p1 = dir.path().join("a.snap");
    let p2 = dir.path().join("b.snap");
    c.save(&p1).unwrap();
    let c2 = Corpus::load(&p1).unwrap();
    c2.save(&p2).unwrap();
    assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
    assert_eq!(c.n_playlists(), c2.n_playlists());
    assert_eq!(c.track_df, c2.track_df);
    assert_eq!(c.track_pop, c2.track_pop);
}

fn assert_same_corpus(a: &Corpus, b: &Corpus) {
    assert_eq!(a.playlists, b.playlists);
    let uris = |i: &encore_core::Interner| -> Vec<String> {
        (0..i.len() as u32).map(|t| i.uri(t).to_string()).collect()
    };
    assert_eq!(uris(&a.tracks), uris(&b.tracks));
    assert_eq!(uris(&a.artists), uris(&b.artists));
    assert_eq!(uris(&a.albums), uris(&b.albums));
    assert_eq!(a.track_artist, b.track_artist);
    assert_eq!(a.track_album, b.track_album);
    assert_eq!(a.track_names, b.track_names);
    assert_eq!(a.artist_names, b.artist_names);
    assert_eq!(a.album_names, b.album_names);
    assert_eq!(a.track_df, b.track_df);
    assert_eq!(a.track_pop, b.track_pop);
}

/// Playlist contents in uri space: invariant under track-id renumbering.
fn uri_view(c: &Corpus) -> Vec<(u64, String, u64, i64, Vec<String>)> {
    c.playlists
        .iter()
        .map(|p| {
            (
                p.orig_pid,
                p.name.clone(),
                p.num_followers,
                p.modified_at,
                p.tracks.iter().map(|&(_, t)| c.tracks.uri(t.0).to_string()).collect(),
            )
        })
        .collect()
}

fn per_track_stats(c: &Corpus) -> std::collections::BTreeMap<String, (u32, u32, String, String)> {
    (0..c.n_tracks())
        .map(|t| {
            (
                c.tracks.uri(t as u32).to_string(),
                (
                    c.track_df[t],
                    c.track_pop[t],
                    c.artists.uri(c.track_artist[t].0).to_string(),
                    c.albums.uri(c.track_album[t].0).to_string(),
                ),
            )
        })
        .collect()
}

#[test]
fn json_slices_reingest_to_an_equivalent_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let c = small_corpus();
    // Ingestion interns ids by first appearance, so ids may be renumbered;
    // everything keyed by uri must survive, and a second trip must be a
    // fixpoint.
    let slices = write_json_slices(&c, &dir.path().join("s1"), 30).unwrap();
    assert!(slices.len() > 1, "expected multiple slice files");
    let c2 = ingest(&slices).unwrap();
    assert_eq!(uri_view(&c), uri_view(&c2));
    assert_eq!(per_track_stats(&c), per_track_stats(&c2));

    let slices2 = write_json_slices(&c2, &dir.path().join("s2"), 30).unwrap();
    let c3 = ingest(&slices2).unwrap();
    assert_same_corpus(&c2, &c3);
    let p2 = dir.path().join("b.snap");
    let p3 = dir.path().join("c.snap");
    c2.save(&p2).unwrap();
    c3.save(&p3).unwrap();
    assert_eq!(fs::read(&p2).unwrap(), fs::read(&p3).unwrap());
}

fn quick_train_params() -> TrainParams {
    TrainParams {
        wrmf: WrmfParams { d: 5, iterations: 3, ..Default::default() },
        item_neighbors: 25,
        title_mf: Some(WrmfParams { d: 3, iterations: 2, ..Default::default() }),
    }
}

fn assert_artifact_round_trips<S: Scalar>() {
    let dir = tempfile::tempdir().unwrap();
    let c = small_corpus();
    let models = train_models::<S>(&c, &quick_train_params()).unwrap();

    let fp = dir.path().join("factors.bin");
    save_factor_model(&models.factors, &fp).unwrap();
    assert_eq!(load_factor_model::<S>(&fp).unwrap(), models.factors);

    let ip = dir.path().join("items.bin");
    save_item_index(&models.item_index, &ip).unwrap();
    assert_eq!(load_item_index::<S>(&ip).unwrap(), models.item_index);

    let tp = dir.path().join("titles.bin");
    save_title_index(&models.titles, &tp).unwrap();
    assert_eq!(load_title_index::<S>(&tp).unwrap(), models.titles);

    let pairs: Vec<TrainingPair<S>> = (0..8)
        .map(|i| {
            let mut p = TrainingPair {
                positive: [S::zero(); N_FEATURES],
                negative: [S::zero(); N_FEATURES],
            };
            p.positive[2] = S::one();
            p.negative[3] = S::of_usize(i % 3);
            p
        })
        .collect();
    let ranker = train_ranker(&pairs, 10, 0.2, 4).unwrap();
    let rp = dir.path().join("ranker.bin");
    save_ranker(&ranker, &rp).unwrap();
    assert_eq!(load_ranker::<S>(&rp).unwrap(), ranker);
}

#[test]
fn artifacts_round_trip_in_both_precisions() {
    assert_artifact_round_trips::<f32>();
    assert_artifact_round_trips::<f64>();
}

#[test]
fn tampered_artifacts_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let c = small_corpus();
    let models = train_models::<f64>(&c, &quick_train_params()).unwrap();

    let fp = dir.path().join("factors.bin");
    save_factor_model(&models.factors, &fp).unwrap();
    let ip = dir.path().join("items.bin");
    save_item_index(&models.item_index, &ip).unwrap();
    let tp = dir.path().join("titles.bin");
    save_title_index(&models.titles, &tp).unwrap();
    let ranker = train_ranker::<f64>(
        &[TrainingPair { positive: [1.0; N_FEATURES], negative: [0.0; N_FEATURES] }],
        3,
        0.1,
        0,
    )
    .unwrap();
    let rp = dir.path().join("ranker.bin");
    save_ranker(&ranker, &rp).unwrap();

    let is_corrupt = |e: ArtifactError| matches!(e, ArtifactError::Corrupt { .. });
    let check = |path: &Path, load: &dyn Fn(&Path) -> Option<ArtifactError>| {
        let good = fs::read(path).unwrap();
        let bad = dir.path().join("bad.bin");

        for cut in [4, good.len() / 2, good.len() - 1] {
            fs::write(&bad, &good[..cut]).unwrap();
            let err = load(&bad).unwrap_or_else(|| panic!("truncation at {cut} accepted"));
            assert!(is_corrupt(err));
        }

        let mut flipped = good.clone();
        flipped[0] ^= 0xff; // break the magic
        fs::write(&bad, &flipped).unwrap();
        assert!(is_corrupt(load(&bad).expect("bad magic accepted")));

        let mut padded = good.clone();
        padded.push(0);
        fs::write(&bad, &padded).unwrap();
        assert!(is_corrupt(load(&bad).expect("trailing bytes accepted")));
    };

    check(&fp, &|p| load_factor_model::<f64>(p).err());
    check(&ip, &|p| load_item_index::<f64>(p).err());
    check(&tp, &|p| load_title_index::<f64>(p).err());
    check(&rp, &|p| load_ranker::<f64>(p).err());
}

#[test]
fn hybrid_config_file_round_trips_and_rejects_junk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hybrid.toml");
    let mut config = HybridConfig::default();
    config.pool = 1234;
    config.jaccard_threshold = 0.75;
    config.save(&path).unwrap();
    assert_eq!(HybridConfig::load(&path).unwrap(), config);

    fs::write(&path, "this is not a config").unwrap();
    assert!(matches!(HybridConfig::load(&path), Err(EnsembleError::Config(_))));
}

fn scored_fixture() -> (Corpus, encore_core::challenge::ChallengeSet, encore_core::challenge::GroundTruth, Submission)
{
    let c = generate(&GenConfig {
        seed: 33,
        n_genres: 3,
        artists_per_genre: 15,
        albums_per_artist: 2,
        tracks_per_album: 7, // 630-track catalog: room for 500 predictions
        n_playlists: 260,
        playlist_len_range: (5, 128),
        genre_mix_concentration: 3.0,
        title_vocab: Vec::new(),
    })
    .unwrap();
    let (cs, gt) = build_challenge_set(&c, 2, 9).unwrap();
    let entries: Vec<(u64, Vec<TrackId>)> = cs
        .playlists
        .iter()
        .map(|p| {
            let rec = recommend_popularity::<f64>(&p.seed_set(), &c, SUBMISSION_LENGTH);
            (p.pid, rec.tracks().collect())
        })
        .collect();
    let sub = Submission { team: "baseline".into(), track: "main".into(), entries };
    (c, cs, gt, sub)
}

#[test]
fn challenge_and_ground_truth_json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (c, cs, gt, _) = scored_fixture();
    let cp = dir.path().join("challenge.json");
    let gp = dir.path().join("truth.json");
    save_challenge_json(&cs, &c, &cp).unwrap();
    save_ground_truth_json(&gt, &c, &gp).unwrap();
    assert_eq!(load_challenge_json(&cp, &c).unwrap(), cs);
    assert_eq!(load_ground_truth_json(&gp, &c).unwrap(), gt);
}

#[test]
fn submission_csv_and_score_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (c, cs, gt, sub) = scored_fixture();

    let sp = dir.path().join("submission.csv");
    save_submission_csv(&sub, &c, &sp).unwrap();
    let raw = load_submission_csv(&sp).unwrap();
    assert_eq!(raw.resolve(&c).unwrap(), sub);

    let report = validate_resolved(&sub, &cs, &c);
    assert!(report.pass, "popularity submission must validate: {report:?}");
    assert!(report.extra_pids.is_empty());

    let scores = score_report::<f64>(&sub, &cs, &gt, &c).unwrap();
    assert_eq!(scores.n_playlists, cs.len());
    let jp = dir.path().join("report.json");
    save_score_report_json(&scores, &jp).unwrap();
    assert_eq!(load_score_report_json::<f64>(&jp).unwrap(), scores);
}

#[test]
fn validation_catches_each_rule_violation() {
    let (c, cs, _, good) = scored_fixture();
    let has = |sub: &Submission, pid: u64, code: ValidationCode| {
        let report = validate_resolved(sub, &cs, &c);
        assert!(!report.pass);
        assert!(
            report.failures.get(&pid).is_some_and(|v| v.contains(&code)),
            "expected {code:?} for pid {pid}: {report:?}"
        );
    };
    let pid = good.entries[0].0;

    let mut missing = good.clone();
    missing.entries.remove(0);
    has(&missing, pid, ValidationCode::MissingPid);

    let mut short = good.clone();
    short.entries[0].1.truncate(SUBMISSION_LENGTH - 1);
    has(&short, pid, ValidationCode::WrongLength);

    let mut duped = good.clone();
    duped.entries[0].1[1] = duped.entries[0].1[0];
    has(&duped, pid, ValidationCode::DuplicateTrack);

    // Seed leak needs a scenario that actually has seeds (entries follow
    // challenge order, and the T1 rows at the front have none).
    let (i, seeded) = cs
        .playlists
        .iter()
        .enumerate()
        .find(|(_, p)| !p.seed_tracks.is_empty())
        .unwrap();
    let mut leaked = good.clone();
    leaked.entries[i].1[0] = seeded.seed_tracks[0].1;
    has(&leaked, seeded.pid, ValidationCode::SeedLeak);
}
