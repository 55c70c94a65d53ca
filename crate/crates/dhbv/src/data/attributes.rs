//! Static basin attributes: the 35-column table consumed by the
//! parameterization network, with categorical columns encoded through a
//! persisted vocabulary and missing numerics imputed with the column mean.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::DataError;

/// Attribute column order; the network and all files index attributes this
/// way.
pub const ATTRIBUTE_NAMES: [&str; 35] = [
    "p_mean",
    "pet_mean",
    "p_seasonality",
    "frac_snow",
    "aridity",
    "high_prec_freq",
    "high_prec_dur",
    "low_prec_freq",
    "low_prec_dur",
    "elev_mean",
    "slope_mean",
    "area_gages2",
    "frac_forest",
    "lai_max",
    "lai_diff",
    "gvf_max",
    "gvf_diff",
    "dom_land_cover_frac",
    "dom_land_cover",
    "root_depth_50",
    "soil_depth_pelletier",
    "soil_depth_statgso",
    "soil_porosity",
    "soil_conductivity",
    "max_water_content",
    "sand_frac",
    "silt_frac",
    "clay_frac",
    "geol_class_1st",
    "geol_class_1st_frac",
    "geol_class_2nd",
    "geol_class_2nd_frac",
    "carbonate_rocks_frac",
    "geol_porosity",
    "geol_permeability",
];

/// Columns carrying labels rather than numbers.
pub const CATEGORICAL_ATTRIBUTES: [&str; 3] = ["dom_land_cover", "geol_class_1st", "geol_class_2nd"];

pub fn attribute_count() -> usize {
    ATTRIBUTE_NAMES.len()
}

pub fn is_categorical(name: &str) -> bool {
    CATEGORICAL_ATTRIBUTES.contains(&name)
}

/// Ordered label list per categorical column; a label's code is its index.
pub type CategoricalVocab = BTreeMap<String, Vec<String>>;

/// One basin's identity and encoded attribute vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasinRecord {
    pub id: String,
    pub latitude: f64,
    pub area_km2: f64,
    /// 35 values in [`ATTRIBUTE_NAMES`] order, categoricals encoded,
    /// missing values imputed.
    pub attributes: Vec<f64>,
}

/// Raw attribute rows as read from the CSV: basin id plus one string cell
/// per attribute column (empty string = missing).
pub struct RawAttributeRow {
    pub basin_id: String,
    pub cells: Vec<String>,
}

/// Encode raw rows: build the vocabulary from sorted unique labels, map
/// labels to codes, parse numerics, and impute missing entries with the
/// column mean. Returns the encoded vectors keyed by basin id.
pub fn encode_attributes(
    rows: &[RawAttributeRow],
) -> Result<(BTreeMap<String, Vec<f64>>, CategoricalVocab), DataError> {
    let n_cols = ATTRIBUTE_NAMES.len();
    let mut vocab = CategoricalVocab::new();
    for (j, name) in ATTRIBUTE_NAMES.iter().enumerate() {
        if !is_categorical(name) {
            continue;
        }
        let mut labels: Vec<String> = rows
            .iter()
            .map(|r| r.cells[j].trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        labels.sort();
        labels.dedup();
        vocab.insert((*name).to_string(), labels);
    }

    // First pass: parse with NaN as the missing-value sentinel.
    let mut values: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
    for (row_idx, row) in rows.iter().enumerate() {
        if row.cells.len() != n_cols {
            return Err(DataError::Schema {
                basin: row.basin_id.clone(),
                line: row_idx + 2,
                detail: format!("expected {} attribute cells, found {}", n_cols, row.cells.len()),
            });
        }
        let mut vec = Vec::with_capacity(n_cols);
        for (j, name) in ATTRIBUTE_NAMES.iter().enumerate() {
            let cell = row.cells[j].trim();
            let v = if cell.is_empty() {
                f64::NAN
            } else if let Some(labels) = vocab.get(*name) {
                match labels.iter().position(|l| l == cell) {
                    Some(code) => code as f64,
                    None => {
                        return Err(DataError::Schema {
                            basin: row.basin_id.clone(),
                            line: row_idx + 2,
                            detail: format!("unknown label '{cell}' in column {name}"),
                        })
                    }
                }
            } else {
                cell.parse::<f64>().map_err(|_| DataError::Schema {
                    basin: row.basin_id.clone(),
                    line: row_idx + 2,
                    detail: format!("cannot parse '{cell}' in column {name}"),
                })?
            };
            vec.push(v);
        }
        values.push(vec);
    }

    // Impute missing entries with the column mean over present values.
    for j in 0..n_cols {
        let present: Vec<f64> = values.iter().map(|r| r[j]).filter(|v| v.is_finite()).collect();
        let fill = if present.is_empty() {
            0.0
        } else {
            present.iter().sum::<f64>() / present.len() as f64
        };
        for row in values.iter_mut() {
            if !row[j].is_finite() {
                row[j] = fill;
            }
        }
    }

    let map = rows
        .iter()
        .zip(values)
        .map(|(r, v)| (r.basin_id.clone(), v))
        .collect();
    Ok((map, vocab))
}

/// Decode an encoded categorical value back to its label (for report
/// output); falls back to the numeric form for out-of-vocabulary codes.
pub fn decode_label(vocab: &CategoricalVocab, column: &str, code: f64) -> String {
    vocab
        .get(column)
        .and_then(|labels| labels.get(code.round() as usize))
        .cloned()
        .unwrap_or_else(|| format!("{code}"))
}
