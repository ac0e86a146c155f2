use rand::seq::SliceRandom;

use super::{DataError, Dataset, Label};
use crate::rng::{seeded, Stream};

/// Stratified, seeded train/validation partition.
///
/// The train side receives `round(train_fraction * n)` records (kept within
/// `1..=n-1`). Each class contributes `floor(train_fraction * n_class)` and
/// the leftover slots go to the classes with the largest fractional remainders
/// (disliked before liked on ties). Both partitions keep the original record
/// order.
pub fn split(
    ds: &Dataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(Dataset, Dataset), DataError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(DataError::BadFraction(train_fraction));
    }
    let n = ds.len();
    if n < 2 {
        return Err(DataError::TooFewRecords { needed: 2, got: n });
    }

    let mut rng = seeded(seed, Stream::Split);
    let mut classes: Vec<Vec<usize>> = [Label::Disliked, Label::Liked]
        .iter()
        .map(|&label| {
            (0..n)
                .filter(|&i| ds.records()[i].history == label)
                .collect()
        })
        .collect();
    for class in &mut classes {
        class.shuffle(&mut rng);
    }

    let target = ((train_fraction * n as f64).round() as usize).clamp(1, n - 1);
    let exact: Vec<f64> = classes
        .iter()
        .map(|c| train_fraction * c.len() as f64)
        .collect();
    let mut quota: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut order: Vec<usize> = (0..classes.len()).collect();
    order.sort_by(|&a, &b| {
        let (fa, fb) = (exact[a].fract(), exact[b].fract());
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    let mut remaining = target - quota.iter().sum::<usize>();
    while remaining > 0 {
        let Some(&k) = order.iter().find(|&&k| quota[k] < classes[k].len()) else {
            break;
        };
        quota[k] += 1;
        remaining -= 1;
        order.retain(|&c| c != k);
        order.push(k);
    }

    let mut in_train = vec![false; n];
    for (class, &q) in classes.iter().zip(&quota) {
        for &i in &class[..q] {
            in_train[i] = true;
        }
    }
    let (mut train, mut val) = (Vec::new(), Vec::new());
    for (r, keep) in ds.records().iter().zip(in_train) {
        if keep {
            train.push(r.clone());
        } else {
            val.push(r.clone());
        }
    }
    Ok((
        Dataset::with_scaled(train, ds.is_scaled()),
        Dataset::with_scaled(val, ds.is_scaled()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{TrackRecord, NUM_FEATURES};
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn dataset(liked: usize, disliked: usize) -> Dataset {
        let records = (0..liked + disliked)
            .map(|i| {
                let label = if i < liked { Label::Liked } else { Label::Disliked };
                TrackRecord::new(format!("t{i:03}"), [i as f64; NUM_FEATURES], label).unwrap()
            })
            .collect();
        Dataset::new(records)
    }

    #[test]
    fn ten_records_eighty_percent() {
        let (train, val) = split(&dataset(5, 5), 0.8, 1).unwrap();
        assert_eq!((train.len(), val.len()), (8, 2));
        assert_eq!(train.class_counts(), (4, 4));
    }

    #[test]
    fn deterministic_per_seed() {
        let ds = dataset(13, 29);
        assert_eq!(split(&ds, 0.7, 9).unwrap(), split(&ds, 0.7, 9).unwrap());
        assert_ne!(split(&ds, 0.7, 9).unwrap(), split(&ds, 0.7, 10).unwrap());
    }

    #[test]
    fn stratified_seventy_thirty() {
        let (train, _) = split(&dataset(70, 30), 0.8, 3).unwrap();
        assert_eq!(train.len(), 80);
        let (liked, disliked) = train.class_counts();
        // 70/30 of 80 is 56/24
        assert!(liked.abs_diff(56) <= 1 && disliked.abs_diff(24) <= 1);
    }

    #[test]
    fn bad_fraction_and_tiny_dataset() {
        let ds = dataset(3, 3);
        for f in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            assert!(matches!(split(&ds, f, 0), Err(DataError::BadFraction(_))));
        }
        assert!(matches!(
            split(&dataset(1, 0), 0.5, 0),
            Err(DataError::TooFewRecords { .. })
        ));
    }

    #[test]
    fn both_sides_non_empty() {
        let (train, val) = split(&dataset(1, 1), 0.99, 0).unwrap();
        assert_eq!((train.len(), val.len()), (1, 1));
        let (train, val) = split(&dataset(2, 1), 0.01, 0).unwrap();
        assert_eq!((train.len(), val.len()), (1, 2));
    }

    proptest! {
        #[test]
        fn split_is_a_partition(liked in 0usize..40, disliked in 0usize..40,
                                f in 0.05f64..0.95, seed in any::<u64>()) {
            prop_assume!(liked + disliked >= 2);
            let ds = dataset(liked, disliked);
            let (train, val) = split(&ds, f, seed).unwrap();
            prop_assert_eq!(train.len() + val.len(), ds.len());
            let ids: BTreeSet<String> = train.records().iter().chain(val.records())
                .map(|r| r.track_id.clone()).collect();
            prop_assert_eq!(ids.len(), ds.len());
            prop_assert!(!train.is_empty() && !val.is_empty());
        }
    }
}
