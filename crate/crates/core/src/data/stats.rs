use std::io::Write;

use super::{DataError, Dataset, Label, FEATURE_NAMES, LABEL_ATTRIBUTE, NUM_FEATURES};

const NUM_ATTRIBUTES: usize = NUM_FEATURES + 1;

/// Pairwise Pearson coefficients of the 13 features and the label.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    /// CSV with a header row, one row per attribute, first column the
    /// attribute name. Values use shortest round-trip formatting.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "attribute")?;
        for l in &self.labels {
            write!(w, ",{l}")?;
        }
        writeln!(w)?;
        for (label, row) in self.labels.iter().zip(&self.values) {
            write!(w, "{label}")?;
            for v in row {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Column-major view: 13 feature columns followed by the label as 0/1.
fn attribute_columns(ds: &Dataset) -> Vec<Vec<f64>> {
    let mut cols: Vec<Vec<f64>> = (0..NUM_ATTRIBUTES)
        .map(|_| Vec::with_capacity(ds.len()))
        .collect();
    for r in ds.records() {
        for (col, &v) in cols.iter_mut().zip(r.features.iter()) {
            col.push(v);
        }
        cols[NUM_FEATURES].push(r.history.as_f64());
    }
    cols
}

/// Pearson correlation of every attribute pair. Constant columns correlate 0
/// with everything else and 1 with themselves.
pub fn correlation_matrix(ds: &Dataset) -> Result<CorrelationMatrix, DataError> {
    if ds.len() < 2 {
        return Err(DataError::TooFewRecords {
            needed: 2,
            got: ds.len(),
        });
    }
    let n = ds.len() as f64;
    let cols = attribute_columns(ds);
    let constant: Vec<bool> = cols.iter().map(|c| c.iter().all(|&v| v == c[0])).collect();
    let centered: Vec<Vec<f64>> = cols
        .iter()
        .map(|c| {
            let mean = c.iter().sum::<f64>() / n;
            c.iter().map(|v| v - mean).collect()
        })
        .collect();
    let norms: Vec<f64> = centered
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();

    let mut values = vec![vec![0.0; NUM_ATTRIBUTES]; NUM_ATTRIBUTES];
    for i in 0..NUM_ATTRIBUTES {
        values[i][i] = 1.0;
        if constant[i] {
            continue;
        }
        for j in (i + 1)..NUM_ATTRIBUTES {
            if constant[j] {
                continue;
            }
            let dot: f64 = centered[i]
                .iter()
                .zip(&centered[j])
                .map(|(a, b)| a * b)
                .sum();
            let r = (dot / (norms[i] * norms[j])).clamp(-1.0, 1.0);
            values[i][j] = r;
            values[j][i] = r;
        }
    }

    let mut labels: Vec<String> = FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
    labels.push(LABEL_ATTRIBUTE.to_string());
    Ok(CorrelationMatrix { labels, values })
}

/// Per-feature means split by label. A class with no records has no mean.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSummary {
    pub feature: &'static str,
    pub mean_liked: Option<f64>,
    pub mean_disliked: Option<f64>,
    pub count_liked: usize,
    pub count_disliked: usize,
}

pub fn class_conditional_summary(ds: &Dataset) -> Vec<FeatureSummary> {
    let mut sums = [[0.0; NUM_FEATURES]; 2];
    let mut counts = [0usize; 2];
    for r in ds.records() {
        let k = usize::from(r.history == Label::Liked);
        counts[k] += 1;
        for (s, v) in sums[k].iter_mut().zip(r.features) {
            *s += v;
        }
    }
    let mean = |k: usize, i: usize| (counts[k] > 0).then(|| sums[k][i] / counts[k] as f64);
    FEATURE_NAMES
        .iter()
        .enumerate()
        .map(|(i, &feature)| FeatureSummary {
            feature,
            mean_liked: mean(1, i),
            mean_disliked: mean(0, i),
            count_liked: counts[1],
            count_disliked: counts[0],
        })
        .collect()
}

/// Summary CSV: `feature,count_liked,mean_liked,count_disliked,mean_disliked`;
/// an absent mean is an empty cell.
pub fn write_summary_csv<W: Write>(summary: &[FeatureSummary], mut w: W) -> std::io::Result<()> {
    let cell = |m: Option<f64>| m.map(|v| v.to_string()).unwrap_or_default();
    writeln!(w, "feature,count_liked,mean_liked,count_disliked,mean_disliked")?;
    for s in summary {
        writeln!(
            w,
            "{},{},{},{},{}",
            s.feature,
            s.count_liked,
            cell(s.mean_liked),
            s.count_disliked,
            cell(s.mean_disliked)
        )?;
    }
    Ok(())
}
