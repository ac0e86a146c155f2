use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{
    DataError, Dataset, Features, Label, TrackRecord, DEFAULT_LABEL_COLUMN,
    FEATURE_NAMES, NUM_FEATURES,
};

const TRACK_ID_COLUMN: &str = "track_id";

/// Features of a track whose label is unknown (prediction candidates).
#[derive(Debug, Clone, PartialEq)]
pub struct UnlabeledTrack {
    pub track_id: String,
    pub features: Features,
}

struct Columns {
    features: [usize; NUM_FEATURES],
    label: Option<usize>,
    track_id: Option<usize>,
}

fn locate_columns(
    headers: &csv::StringRecord,
    label_column: Option<&str>,
) -> Result<Columns, DataError> {
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
    };
    let mut features = [0usize; NUM_FEATURES];
    for (slot, name) in features.iter_mut().zip(FEATURE_NAMES) {
        *slot = find(name).ok_or_else(|| DataError::MissingColumn(name.to_string()))?;
    }
    let label = match label_column {
        Some(name) => Some(find(name).ok_or_else(|| DataError::MissingColumn(name.to_string()))?),
        None => None,
    };
    Ok(Columns {
        features,
        label,
        track_id: find(TRACK_ID_COLUMN),
    })
}

fn parse_features(
    record: &csv::StringRecord,
    columns: &Columns,
    row: usize,
) -> Result<Features, DataError> {
    let mut features = [0.0; NUM_FEATURES];
    for (i, &col) in columns.features.iter().enumerate() {
        let value = record
            .get(col)
            .and_then(|cell| cell.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite())
            .ok_or_else(|| DataError::NonNumericCell {
                row,
                column: FEATURE_NAMES[i].to_string(),
            })?;
        features[i] = value;
    }
    Ok(features)
}

fn parse_label(cell: Option<&str>, row: usize) -> Result<Label, DataError> {
    let value = cell
        .and_then(|c| c.trim().parse::<f64>().ok())
        .ok_or(DataError::BadLabel { row })?;
    if value == 0.0 {
        Ok(Label::Disliked)
    } else if value == 1.0 {
        Ok(Label::Liked)
    } else {
        Err(DataError::BadLabel { row })
    }
}

fn track_id(record: &csv::StringRecord, columns: &Columns, row: usize) -> String {
    columns
        .track_id
        .and_then(|c| record.get(c))
        .map(|s| s.trim().to_string())
        .unwrap_or_else(|| row.to_string())
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader)
}

fn open(path: &Path) -> Result<File, DataError> {
    File::open(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses a labeled track CSV. Rows are numbered from 1 (the first data row)
/// in error values. A missing `track_id` column synthesizes ids from row numbers.
pub fn read_dataset<R: Read>(reader: R, label_column: &str) -> Result<Dataset, DataError> {
    let mut rdr = csv_reader(reader);
    let columns = locate_columns(rdr.headers()?, Some(label_column))?;
    let mut records = Vec::new();
    for (i, result) in rdr.records().enumerate() {
        let row = i + 1;
        let record = result?;
        let features = parse_features(&record, &columns, row)?;
        let history = parse_label(columns.label.and_then(|c| record.get(c)), row)?;
        records.push(TrackRecord {
            track_id: track_id(&record, &columns, row),
            features,
            history,
        });
    }
    if records.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    Ok(Dataset::new(records))
}

pub fn load_dataset(path: impl AsRef<Path>, label_column: &str) -> Result<Dataset, DataError> {
    read_dataset(open(path.as_ref())?, label_column)
}

/// Parses a track CSV without requiring a label column.
pub fn read_tracks<R: Read>(reader: R) -> Result<Vec<UnlabeledTrack>, DataError> {
    let mut rdr = csv_reader(reader);
    let columns = locate_columns(rdr.headers()?, None)?;
    let mut tracks = Vec::new();
    for (i, result) in rdr.records().enumerate() {
        let row = i + 1;
        let record = result?;
        tracks.push(UnlabeledTrack {
            track_id: track_id(&record, &columns, row),
            features: parse_features(&record, &columns, row)?,
        });
    }
    if tracks.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    Ok(tracks)
}

pub fn load_tracks(path: impl AsRef<Path>) -> Result<Vec<UnlabeledTrack>, DataError> {
    read_tracks(open(path.as_ref())?)
}

/// Writes `track_id`, the 13 features and the label column (as 0/1) with
/// shortest round-trip decimals, so that [`read_dataset`] reproduces the data.
pub fn write_dataset<W: Write>(ds: &Dataset, writer: W) -> Result<(), DataError> {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    let mut header = vec![TRACK_ID_COLUMN];
    header.extend(FEATURE_NAMES);
    header.push(DEFAULT_LABEL_COLUMN);
    wtr.write_record(&header)?;
    for r in ds.records() {
        let mut row = Vec::with_capacity(NUM_FEATURES + 2);
        row.push(r.track_id.clone());
        row.extend(r.features.iter().map(|v| v.to_string()));
        row.push(match r.history {
            Label::Disliked => "0".to_string(),
            Label::Liked => "1".to_string(),
        });
        wtr.write_record(&row)?;
    }
    wtr.flush().map_err(|e| DataError::Csv(e.into()))?;
    Ok(())
}

pub fn save_dataset(ds: &Dataset, path: impl AsRef<Path>) -> Result<(), DataError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_dataset(ds, std::io::BufWriter::new(file))
}
