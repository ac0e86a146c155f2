//! Fixtures shared by the benchmarks in `benches/`.

use trackmix_core::collab::RatingMatrix;
use trackmix_core::data::{apply_scaler, fit_scaler, Dataset};
use trackmix_core::synthetic::surrogate_dataset;
use trackmix_core::Batch;

/// `n` surrogate tracks scaled onto [0, 1].
pub fn scaled_tracks(n: usize) -> Dataset {
    let ds = surrogate_dataset(n, 0);
    let params = fit_scaler(&ds).expect("non-empty");
    apply_scaler(&params, &ds).expect("unscaled input")
}

pub fn batch(n: usize) -> Batch {
    Batch::from_dataset(&scaled_tracks(n)).expect("non-empty")
}

/// Dense-ish ratings: every user rates roughly three items in four.
pub fn ratings(users: usize, items: usize) -> RatingMatrix {
    let triples = (0..users).flat_map(|u| {
        (0..items)
            .filter(move |i| (u * 7 + i * 3) % 4 != 0)
            .map(move |i| {
                let r = ((u * 31 + i * 17) % 101) as f64 / 100.0;
                (format!("u{u:03}"), format!("i{i:04}"), r)
            })
    });
    RatingMatrix::from_triples(triples).expect("ratings in range")
}
