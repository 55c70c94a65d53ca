//! Dataset ingestion, unit handling, potential ET, normalization, and the
//! synthetic-twin generator.

mod attributes;
#[cfg(test)]
mod tests;
mod fluxfile;
mod loader;
mod manifest;
mod normalize;
mod pet;
mod series;
mod synthetic;
mod units;

pub use attributes::{
    attribute_count, decode_label, encode_attributes, is_categorical, BasinRecord,
    CategoricalVocab, RawAttributeRow, ATTRIBUTE_NAMES, CATEGORICAL_ATTRIBUTES,
};
pub use fluxfile::{read_simulation_csv, write_simulation_csv, SimTable, SIMULATION_COLUMNS};
pub use loader::{load_dataset, BasinCoverage, Dataset};
pub use manifest::{FlowUnits, Manifest, ManifestBasin};
pub use normalize::{flow_transform, flow_transform_inv, NormStats, STD_FLOOR};
pub use pet::{extraterrestrial_radiation, hargreaves_pet, MAX_LATITUDE_DEG};
pub use series::{ForcingSeries, ObservationSeries};
pub use synthetic::{synthesize_dataset, write_dataset, SynthConfig, SyntheticDataset};
pub use units::{cfs_to_mm_per_day, mm_per_day_to_cfs};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("basin {basin}: file not found: {path}")]
    MissingFile { basin: String, path: String },
    #[error("basin {basin}, line {line}: {detail}")]
    Schema {
        basin: String,
        line: usize,
        detail: String,
    },
    #[error("basin {basin}, line {line}: expected date {expected}, found {found}")]
    DateGap {
        basin: String,
        expected: String,
        found: String,
        line: usize,
    },
    #[error(
        "basin {basin}: series starts {got_start} with {got_len} days, expected {expected_start} with {expected_len} days"
    )]
    AxisMismatch {
        basin: String,
        expected_start: String,
        expected_len: usize,
        got_start: String,
        got_len: usize,
    },
    #[error("manifest {path}: {detail}")]
    Manifest { path: String, detail: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("basin area must be positive, got {area_km2} km^2")]
    NonPositiveArea { area_km2: f64 },
    #[error("latitude {latitude} is poleward of the daily radiation formula's range")]
    PolarLatitude { latitude: f64 },
    #[error("t_max {t_max} below t_min {t_min}")]
    TemperatureOrder { t_min: f64, t_max: f64 },
    #[error("negative flow {value} cannot be transformed")]
    NegativeFlow { value: f64 },
    #[error("synthetic generator failed for basin {basin}: {detail}")]
    Generator { basin: String, detail: String },
}
