use proptest::prelude::*;

use trackmix_core::data::{
    fit_scaler, load_dataset, read_dataset, save_dataset, split, write_dataset, Dataset, Label,
    TrackRecord, NUM_FEATURES,
};
use trackmix_core::nn::{Activation, LayerSpec, Matrix, Network};
use trackmix_core::synthetic::{separable_dataset, surrogate_dataset};
use trackmix_core::train::{
    evaluate, load_model, model_to_json, predict, save_model, train, TrainConfig, TrainError,
};

fn small_config(seed: u64) -> TrainConfig {
    TrainConfig {
        epochs: 15,
        seed,
        ..TrainConfig::default()
    }
}

fn naive_forward(net: &Network, x: &[f64]) -> f64 {
    let mut a = x.to_vec();
    for layer in net.layers() {
        let w = &layer.weights;
        let mut next = Vec::with_capacity(w.rows());
        for o in 0..w.rows() {
            let mut z = layer.bias[o];
            for (i, v) in a.iter().enumerate() {
                z += w.get(o, i) * v;
            }
            next.push(match layer.activation {
                Activation::Relu => z.max(0.0),
                Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
                Activation::Identity => z,
            });
        }
        a = next;
    }
    a[0]
}

#[test]
fn forward_matches_naive_loops() {
    let arch = [
        LayerSpec::new(4, Activation::Relu),
        LayerSpec::new(1, Activation::Sigmoid),
    ];
    let net = Network::seeded(NUM_FEATURES, &arch, 3).unwrap();
    let ds = surrogate_dataset(20, 5);
    let scaler = fit_scaler(&ds).unwrap();
    let rows: Vec<[f64; NUM_FEATURES]> = ds.records().iter().map(|r| scaler.scale(&r.features)).collect();
    let p = net.predict(&Matrix::from_rows(&rows).unwrap()).unwrap();
    for (row, got) in rows.iter().zip(p) {
        let want = naive_forward(&net, row);
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
}

#[test]
fn evaluating_train_partition_reproduces_last_epoch() {
    let ds = surrogate_dataset(120, 1);
    let cfg = small_config(4);
    let (model, metrics) = train(&cfg, &ds).unwrap();
    let (tr, va) = split(&ds, cfg.train_fraction, cfg.seed).unwrap();
    let last = metrics.last().unwrap();
    let e = evaluate(&model, &tr).unwrap();
    assert_eq!((e.accuracy, e.loss), (last.train_accuracy, last.train_loss));
    let e = evaluate(&model, &va).unwrap();
    assert_eq!((e.accuracy, e.loss), (last.val_accuracy, last.val_loss));
}

#[test]
fn flipped_labels_complement_accuracy() {
    let ds = surrogate_dataset(100, 2);
    let (model, _) = train(&small_config(0), &ds).unwrap();
    let a = evaluate(&model, &ds).unwrap().accuracy;
    let b = evaluate(&model, &ds.with_flipped_labels()).unwrap().accuracy;
    assert!((a + b - 100.0).abs() < 1e-9, "{a} + {b}");
}

#[test]
fn training_is_deterministic_per_seed() {
    let ds = surrogate_dataset(80, 3);
    let (m1, h1) = train(&small_config(9), &ds).unwrap();
    let (m2, h2) = train(&small_config(9), &ds).unwrap();
    assert_eq!(m1, m2);
    assert_eq!(h1, h2);
    let (m3, _) = train(&small_config(10), &ds).unwrap();
    assert_ne!(m1.network, m3.network);
}

#[test]
fn scaler_is_fitted_on_train_partition_only() {
    let mut records = surrogate_dataset(50, 6).into_records();
    for r in &mut records {
        r.features[10] = 100.0;
    }
    // an extreme tempo that can only land in one partition
    records[7].features[10] = 999.0;
    let ds = Dataset::new(records);
    let cfg = small_config(1);
    let (model, _) = train(&cfg, &ds).unwrap();
    let (tr, va) = split(&ds, cfg.train_fraction, cfg.seed).unwrap();
    assert_eq!(model.scaler, fit_scaler(&tr).unwrap());
    let extreme_in_val = va.records().iter().any(|r| r.features[10] == 999.0);
    let expected_max = if extreme_in_val { 100.0 } else { 999.0 };
    assert_eq!(model.scaler.maxs[10], expected_max);
}

#[test]
fn dataset_survives_write_and_reload() {
    let ds = surrogate_dataset(40, 8);
    let mut buf = Vec::new();
    write_dataset(&ds, &mut buf).unwrap();
    assert_eq!(read_dataset(buf.as_slice(), "History").unwrap(), ds);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tracks.csv");
    save_dataset(&ds, &path).unwrap();
    assert_eq!(load_dataset(&path, "history").unwrap(), ds);
}

#[test]
fn saved_model_predicts_identically() {
    let ds = surrogate_dataset(60, 4);
    let (model, _) = train(&small_config(2), &ds).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    save_model(&model, &path).unwrap();
    let loaded = load_model(&path).unwrap();
    assert_eq!(loaded, model);
    for r in surrogate_dataset(30, 77).records() {
        let (a, la) = predict(&model, &r.features).unwrap();
        let (b, lb) = predict(&loaded, &r.features).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert_eq!(la, lb);
    }
}

#[test]
fn model_document_is_versioned() {
    let (model, _) = train(&small_config(0), &separable_dataset(20, 0)).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&model_to_json(&model).unwrap()).unwrap();
    assert_eq!(doc["format_version"], 1);
    assert_eq!(doc["feature_names"].as_array().unwrap().len(), NUM_FEATURES);
}

#[test]
fn saving_into_missing_directory_reports_path() {
    let (model, _) = train(&small_config(0), &separable_dataset(20, 0)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("absent").join("model.json");
    match save_model(&model, &path) {
        Err(e @ TrainError::Io { .. }) => assert!(e.to_string().contains("absent")),
        other => panic!("expected an io error, got {other:?}"),
    }
}

#[test]
fn prediction_equals_forward_on_scaled_features() {
    let ds = surrogate_dataset(60, 12);
    let (model, _) = train(&small_config(5), &ds).unwrap();
    for r in ds.records().iter().take(10) {
        let scaled = model.scaler.scale(&r.features);
        let want = model.network.predict(&Matrix::from_rows(&[scaled]).unwrap()).unwrap()[0];
        let (p, label) = predict(&model, &r.features).unwrap();
        assert_eq!(p.to_bits(), want.to_bits());
        assert_eq!(label == Label::Liked, p >= model.config.threshold);
    }
}

fn labeled(liked: usize, disliked: usize) -> Dataset {
    let records = (0..liked + disliked)
        .map(|i| {
            let label = if i < liked { Label::Liked } else { Label::Disliked };
            TrackRecord::new(format!("t{i}"), [i as f64; NUM_FEATURES], label).unwrap()
        })
        .collect();
    Dataset::new(records)
}

proptest! {
    #[test]
    fn split_keeps_class_shares(liked in 1usize..80, disliked in 1usize..80, seed in any::<u64>()) {
        let ds = labeled(liked, disliked);
        let (tr, va) = split(&ds, 0.7, seed).unwrap();
        let n = ds.len() as f64;
        prop_assert_eq!(tr.len() + va.len(), ds.len());
        let (tl, td) = tr.class_counts();
        prop_assert!((tl as f64 - 0.7 * liked as f64).abs() <= 1.0);
        prop_assert!((td as f64 - 0.7 * disliked as f64).abs() <= 1.0);
        prop_assert!((tr.len() as f64 - (0.7 * n).round()).abs() <= 1.0);
    }
}
