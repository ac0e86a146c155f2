//! User-user collaborative filtering.
//!
//! Users are compared with the Pearson coefficient over the items both have
//! rated; a prediction for the active user is their own mean rating shifted
//! by the similarity-weighted deviations of the nearest neighbors who rated
//! the item. Ratings live in [0, 1].

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

/// Default weight of the content model in [`hybrid_score`].
pub const DEFAULT_LAMBDA: f64 = 0.5;

#[derive(Debug, Error)]
pub enum CollabError {
    #[error("unknown user '{0}'")]
    UnknownUser(String),
    #[error("unknown item '{0}'")]
    UnknownItem(String),
    #[error("a user cannot be compared with itself ('{0}')")]
    SameUser(String),
    #[error("neighborhood size must be at least 1")]
    BadNeighborCount,
    #[error("{name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("row {row}: rating {value} is outside [0, 1]")]
    BadRating { row: usize, value: f64 },
    #[error("row {row}: duplicate rating for user '{user}' and item '{item}'")]
    DuplicateRating {
        row: usize,
        user: String,
        item: String,
    },
    #[error("ratings file has no rows")]
    Empty,
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Sparse user x item ratings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RatingMatrix {
    ratings: BTreeMap<String, BTreeMap<String, f64>>,
    items: BTreeSet<String>,
}

impl RatingMatrix {
    /// Builds from `(user, item, rating)` triples; row numbers in errors count from 1.
    pub fn from_triples<U, I>(
        triples: impl IntoIterator<Item = (U, I, f64)>,
    ) -> Result<Self, CollabError>
    where
        U: Into<String>,
        I: Into<String>,
    {
        let mut m = Self::default();
        for (row, (user, item, value)) in triples.into_iter().enumerate() {
            let (user, item) = (user.into(), item.into());
            if !(0.0..=1.0).contains(&value) {
                return Err(CollabError::BadRating { row: row + 1, value });
            }
            let entry = m.ratings.entry(user.clone()).or_default();
            if entry.insert(item.clone(), value).is_some() {
                return Err(CollabError::DuplicateRating {
                    row: row + 1,
                    user,
                    item,
                });
            }
            m.items.insert(item);
        }
        Ok(m)
    }

    pub fn users(&self) -> impl Iterator<Item = &str> {
        self.ratings.keys().map(String::as_str)
    }

    pub fn items(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(String::as_str)
    }

    pub fn has_user(&self, user: &str) -> bool {
        self.ratings.contains_key(user)
    }

    pub fn has_item(&self, item: &str) -> bool {
        self.items.contains(item)
    }

    pub fn rating(&self, user: &str, item: &str) -> Option<f64> {
        self.ratings.get(user)?.get(item).copied()
    }

    pub fn user_ratings(&self, user: &str) -> Result<&BTreeMap<String, f64>, CollabError> {
        self.ratings
            .get(user)
            .ok_or_else(|| CollabError::UnknownUser(user.to_string()))
    }

    /// Mean over the items the user has rated.
    pub fn user_mean(&self, user: &str) -> Result<f64, CollabError> {
        let r = self.user_ratings(user)?;
        Ok(r.values().sum::<f64>() / r.len() as f64)
    }
}

#[derive(Deserialize)]
struct RatingRow {
    user_id: String,
    track_id: String,
    rating: f64,
}

/// Reads a `user_id,track_id,rating` CSV.
pub fn read_ratings<R: Read>(reader: R) -> Result<RatingMatrix, CollabError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let rows = rdr
        .deserialize::<RatingRow>()
        .map(|r| r.map(|r| (r.user_id, r.track_id, r.rating)))
        .collect::<Result<Vec<_>, _>>()?;
    if rows.is_empty() {
        return Err(CollabError::Empty);
    }
    RatingMatrix::from_triples(rows)
}

pub fn load_ratings(path: impl AsRef<Path>) -> Result<RatingMatrix, CollabError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| CollabError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_ratings(file)
}

/// Pearson coefficient between two users together with its components.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityScore {
    pub active: String,
    pub other: String,
    pub value: f64,
    pub covariance: f64,
    pub std_active: f64,
    pub std_other: f64,
    pub overlap: usize,
}

fn population_std(values: &[f64], mean: f64) -> f64 {
    if values.iter().all(|&v| v == values[0]) {
        return 0.0;
    }
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
}

/// Pearson similarity over co-rated items, using population moments.
/// Fewer than two co-rated items or a zero deviation gives a value of 0.
pub fn pearson_similarity(
    m: &RatingMatrix,
    active: &str,
    other: &str,
) -> Result<SimilarityScore, CollabError> {
    let ra = m.user_ratings(active)?;
    let ru = m.user_ratings(other)?;
    if active == other {
        return Err(CollabError::SameUser(active.to_string()));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = ra
        .iter()
        .filter_map(|(item, &x)| ru.get(item).map(|&y| (x, y)))
        .unzip();
    let n = xs.len();
    let mut score = SimilarityScore {
        active: active.to_string(),
        other: other.to_string(),
        value: 0.0,
        covariance: 0.0,
        std_active: 0.0,
        std_other: 0.0,
        overlap: n,
    };
    if n == 0 {
        return Ok(score);
    }
    let mean_x = xs.iter().sum::<f64>() / n as f64;
    let mean_y = ys.iter().sum::<f64>() / n as f64;
    score.covariance = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum::<f64>()
        / n as f64;
    score.std_active = population_std(&xs, mean_x);
    score.std_other = population_std(&ys, mean_y);
    if n >= 2 && score.std_active > 0.0 && score.std_other > 0.0 {
        score.value = if n == 2 {
            // two points are always perfectly (anti)correlated; exact so ties rank stably
            score.covariance.signum()
        } else {
            (score.covariance / (score.std_active * score.std_other)).clamp(-1.0, 1.0)
        };
    }
    Ok(score)
}

fn ranked_neighbors(m: &RatingMatrix, active: &str) -> Result<Vec<SimilarityScore>, CollabError> {
    m.user_ratings(active)?;
    let mut scores = m
        .users()
        .filter(|&u| u != active)
        .map(|u| pearson_similarity(m, active, u))
        .collect::<Result<Vec<_>, _>>()?;
    scores.sort_by(|a, b| b.value.total_cmp(&a.value).then_with(|| a.other.cmp(&b.other)));
    Ok(scores)
}

/// The `k` most similar users, highest similarity first, ties by user id.
pub fn top_k_neighbors(
    m: &RatingMatrix,
    active: &str,
    k: usize,
) -> Result<Vec<SimilarityScore>, CollabError> {
    if k == 0 {
        return Err(CollabError::BadNeighborCount);
    }
    let mut scores = ranked_neighbors(m, active)?;
    scores.truncate(k);
    Ok(scores)
}

/// Predicted rating of `item` for `active` from the `k` most similar users
/// who rated it. Falls back to the active user's mean when those neighbors
/// carry no similarity weight.
pub fn predict_rating(
    m: &RatingMatrix,
    active: &str,
    item: &str,
    k: usize,
) -> Result<f64, CollabError> {
    if k == 0 {
        return Err(CollabError::BadNeighborCount);
    }
    let mean_active = m.user_mean(active)?;
    if !m.has_item(item) {
        return Err(CollabError::UnknownItem(item.to_string()));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for s in ranked_neighbors(m, active)?
        .into_iter()
        .filter(|s| m.rating(&s.other, item).is_some())
        .take(k)
    {
        let r = m.rating(&s.other, item).unwrap_or_default();
        num += s.value * (r - m.user_mean(&s.other)?);
        den += s.value.abs();
    }
    if den == 0.0 {
        return Ok(mean_active);
    }
    Ok((mean_active + num / den).clamp(0.0, 1.0))
}

/// Convex blend `lambda * content + (1 - lambda) * collab`.
pub fn hybrid_score(content_p: f64, collab_r: f64, lambda: f64) -> Result<f64, CollabError> {
    for (name, value) in [
        ("content probability", content_p),
        ("collaborative rating", collab_r),
        ("lambda", lambda),
    ] {
        if !(0.0..=1.0).contains(&value) {
            return Err(CollabError::OutOfRange { name, value });
        }
    }
    Ok((lambda * content_p + (1.0 - lambda) * collab_r).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn matrix(rows: &[(&str, &str, f64)]) -> RatingMatrix {
        RatingMatrix::from_triples(rows.iter().map(|&(u, i, r)| (u, i, r))).unwrap()
    }

    #[test]
    fn identical_users_correlate_fully() {
        let m = matrix(&[
            ("a", "x", 0.2),
            ("a", "y", 0.9),
            ("a", "z", 0.5),
            ("b", "x", 0.2),
            ("b", "y", 0.9),
            ("b", "z", 0.5),
        ]);
        let s = pearson_similarity(&m, "a", "b").unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        assert_eq!(s.overlap, 3);
    }

    #[test]
    fn reversed_ratings_anti_correlate() {
        let m = matrix(&[
            ("a", "x", 0.1),
            ("a", "y", 0.2),
            ("a", "z", 0.3),
            ("b", "x", 0.3),
            ("b", "y", 0.2),
            ("b", "z", 0.1),
        ]);
        let s = pearson_similarity(&m, "a", "b").unwrap();
        assert!((s.value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn hand_computed_coefficient() {
        // r_a = [1,2,3,4]/4 and r_u = [2,2,4,4]/4: scale-free, so c = 4 / sqrt(20)
        let m = matrix(&[
            ("a", "i1", 0.25),
            ("a", "i2", 0.5),
            ("a", "i3", 0.75),
            ("a", "i4", 1.0),
            ("u", "i1", 0.5),
            ("u", "i2", 0.5),
            ("u", "i3", 1.0),
            ("u", "i4", 1.0),
        ]);
        let s = pearson_similarity(&m, "a", "u").unwrap();
        assert!((s.value - 4.0 / 20f64.sqrt()).abs() < 1e-12);
        assert!((s.value - 0.894427).abs() < 1e-6);
        // deviations [-3,-1,1,3]/8 and [-1,-1,1,1]/4: cov = (3+1+1+3)/32/4
        assert!((s.covariance - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn degenerate_pairs_score_zero() {
        let m = matrix(&[
            ("a", "x", 0.4),
            ("a", "y", 0.8),
            ("b", "x", 0.5),
            ("c", "x", 0.6),
            ("c", "y", 0.6),
        ]);
        let ab = pearson_similarity(&m, "a", "b").unwrap();
        assert_eq!((ab.value, ab.overlap), (0.0, 1));
        let ac = pearson_similarity(&m, "a", "c").unwrap();
        assert_eq!((ac.value, ac.overlap, ac.std_other), (0.0, 2, 0.0));
        assert!(matches!(
            pearson_similarity(&m, "a", "a"),
            Err(CollabError::SameUser(_))
        ));
        assert!(matches!(
            pearson_similarity(&m, "a", "zz"),
            Err(CollabError::UnknownUser(_))
        ));
    }

    #[test]
    fn neighbors_sorted_with_id_tiebreak() {
        let m = matrix(&[
            ("a", "x", 0.1),
            ("a", "y", 0.9),
            ("c", "x", 0.2),
            ("c", "y", 0.8),
            ("b", "x", 0.3),
            ("b", "y", 0.7),
            ("d", "x", 0.9),
            ("d", "y", 0.1),
        ]);
        let n = top_k_neighbors(&m, "a", 2).unwrap();
        let ids: Vec<&str> = n.iter().map(|s| s.other.as_str()).collect();
        assert_eq!(ids, vec!["b", "c"]);
        let all = top_k_neighbors(&m, "a", 10).unwrap();
        assert_eq!(all.len(), 3);
        assert_eq!(all[2].other, "d");
        assert!(matches!(
            top_k_neighbors(&m, "a", 0),
            Err(CollabError::BadNeighborCount)
        ));
    }

    #[test]
    fn two_co_rated_items_give_exact_unit_similarity() {
        // 0.1 / 0.7 and 0.3 / 0.9 do not produce exactly 1 through the general formula
        let m = matrix(&[
            ("a", "x", 0.1),
            ("a", "y", 0.7),
            ("b", "x", 0.3),
            ("b", "y", 0.9),
            ("c", "x", 0.9),
            ("c", "y", 0.3),
        ]);
        assert_eq!(pearson_similarity(&m, "a", "b").unwrap().value, 1.0);
        assert_eq!(pearson_similarity(&m, "a", "c").unwrap().value, -1.0);
    }

    #[test]
    fn single_neighbor_prediction() {
        // neighbor u: mean 0.4, rated target 0.6 (= mean + 0.2); c(a,u) = 1; mean_a = 0.5
        let m = matrix(&[
            ("a", "x", 0.3),
            ("a", "y", 0.7),
            ("u", "x", 0.2),
            ("u", "y", 0.4),
            ("u", "t", 0.6),
        ]);
        assert!((pearson_similarity(&m, "a", "u").unwrap().value - 1.0).abs() < 1e-12);
        let p = predict_rating(&m, "a", "t", 5).unwrap();
        assert!((p - 0.7).abs() < 1e-12);
    }

    #[test]
    fn fallbacks_to_active_mean() {
        let m = matrix(&[
            ("a", "x", 0.2),
            ("a", "y", 0.6),
            ("b", "x", 0.5),
            ("b", "y", 0.1),
            ("c", "t", 0.9),
            ("d", "x", 0.3),
            ("d", "y", 0.7),
            ("d", "s", 0.5),
        ]);
        // "t" was only rated by c, who shares nothing with a
        assert!((predict_rating(&m, "a", "t", 3).unwrap() - 0.4).abs() < 1e-15);
        // d rated "s" at exactly d's own mean
        assert!((predict_rating(&m, "a", "s", 3).unwrap() - 0.4).abs() < 1e-15);
        assert!(matches!(
            predict_rating(&m, "a", "nope", 3),
            Err(CollabError::UnknownItem(_))
        ));
    }

    #[test]
    fn hybrid_endpoints() {
        assert_eq!(hybrid_score(0.83, 0.21, 1.0).unwrap(), 0.83);
        assert_eq!(hybrid_score(0.83, 0.21, 0.0).unwrap(), 0.21);
        assert!((hybrid_score(0.8, 0.4, 0.5).unwrap() - 0.6).abs() < 1e-15);
        assert!(matches!(
            hybrid_score(1.2, 0.4, 0.5),
            Err(CollabError::OutOfRange { .. })
        ));
        assert!(matches!(
            hybrid_score(0.2, 0.4, -0.1),
            Err(CollabError::OutOfRange { .. })
        ));
    }

    #[test]
    fn ratings_csv() {
        let text = "user_id,track_id,rating\nu1,t1,0.5\nu1,t2,1\nu2,t1,0\n";
        let m = read_ratings(text.as_bytes()).unwrap();
        assert_eq!(m.users().collect::<Vec<_>>(), vec!["u1", "u2"]);
        assert_eq!(m.rating("u1", "t2"), Some(1.0));
        let bad = "user_id,track_id,rating\nu1,t1,1.5\n";
        assert!(matches!(
            read_ratings(bad.as_bytes()),
            Err(CollabError::BadRating { row: 1, .. })
        ));
        let dup = "user_id,track_id,rating\nu1,t1,0.5\nu1,t1,0.2\n";
        assert!(matches!(
            read_ratings(dup.as_bytes()),
            Err(CollabError::DuplicateRating { row: 2, .. })
        ));
        assert!(matches!(
            read_ratings("user_id,track_id,rating\n".as_bytes()),
            Err(CollabError::Empty)
        ));
    }

    fn random_matrix() -> impl Strategy<Value = RatingMatrix> {
        prop::collection::vec(prop::option::weighted(0.7, 0.0f64..=1.0), 6 * 8).prop_map(
            |cells| {
                let triples = cells.iter().enumerate().filter_map(|(k, c)| {
                    c.map(|r| (format!("u{}", k / 8), format!("i{}", k % 8), r))
                });
                RatingMatrix::from_triples(triples).unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn similarity_symmetric_and_bounded(m in random_matrix()) {
            let users: Vec<String> = m.users().map(str::to_string).collect();
            for a in &users {
                for u in &users {
                    if a == u { continue; }
                    let s = pearson_similarity(&m, a, u).unwrap();
                    let t = pearson_similarity(&m, u, a).unwrap();
                    prop_assert!((s.value - t.value).abs() <= 1e-12);
                    prop_assert!(s.value.abs() <= 1.0 + 1e-12);
                }
            }
        }

        #[test]
        fn affine_rescaling_preserves_similarity(m in random_matrix(),
                                                 alpha in 0.1f64..1.0, beta in 0.0f64..0.5) {
            let users: Vec<String> = m.users().map(str::to_string).collect();
            prop_assume!(users.len() >= 2);
            let (a, u) = (&users[0], &users[1]);
            // r -> alpha * r + beta, kept inside [0, 1] by construction
            let alpha = alpha * (1.0 - beta);
            let rescaled = RatingMatrix::from_triples(m.users().flat_map(|user| {
                m.user_ratings(user).unwrap().iter().map(move |(item, &r)| {
                    let r = if user == u.as_str() { alpha * r + beta } else { r };
                    (user.to_string(), item.clone(), r)
                })
            })).unwrap();
            let before = pearson_similarity(&m, a, u).unwrap();
            let after = pearson_similarity(&rescaled, a, u).unwrap();
            prop_assume!(before.std_other > 1e-6);
            prop_assert!((before.value - after.value).abs() <= 1e-9);
        }

        #[test]
        fn predictions_in_unit_interval(m in random_matrix(), k in 1usize..6) {
            let users: Vec<String> = m.users().map(str::to_string).collect();
            let items: Vec<String> = m.items().map(str::to_string).collect();
            for a in &users {
                for i in &items {
                    let p = predict_rating(&m, a, i, k).unwrap();
                    prop_assert!((0.0..=1.0).contains(&p));
                }
            }
        }
    }
}
