//! Dataset ingestion and validation.
//!
//! Expected files (all paths relative to the manifest):
//! - per-basin forcing CSV: `date,prcp_mm,tmin_c,tmax_c[,tmean_c][,pet_mm]`
//!   with contiguous daily dates; mean temperature defaults to the midpoint
//!   of the extremes and potential ET is computed with Hargreaves when the
//!   column is absent;
//! - per-basin flow CSV: `date,flow` in the manifest's units; missing dates
//!   or empty cells are masked, never imputed;
//! - one attribute CSV: `basin_id` plus the 35 attribute columns.
//!
//! Every series must cover the same date axis so training can sample
//! windows on a shared index space.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{Datelike, Days, NaiveDate};

use super::attributes::{
    encode_attributes, BasinRecord, CategoricalVocab, RawAttributeRow, ATTRIBUTE_NAMES,
};
use super::manifest::{FlowUnits, Manifest};
use super::pet::{extraterrestrial_radiation, hargreaves_pet};
use super::series::{ForcingSeries, ObservationSeries};
use super::units::cfs_to_mm_per_day;
use super::DataError;

/// A validated, date-aligned collection of basins.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub basins: Vec<BasinRecord>,
    pub forcings: Vec<ForcingSeries>,
    pub observations: Vec<ObservationSeries>,
    pub vocab: CategoricalVocab,
}

impl Dataset {
    pub fn n_basins(&self) -> usize {
        self.basins.len()
    }

    /// Number of days on the shared axis.
    pub fn len(&self) -> usize {
        self.forcings[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.forcings.is_empty()
    }

    pub fn start(&self) -> NaiveDate {
        self.forcings[0].start
    }

    pub fn end(&self) -> NaiveDate {
        self.forcings[0].date(self.len() - 1)
    }

    pub fn index_of(&self, date: NaiveDate) -> Option<usize> {
        self.forcings[0].index_of(date)
    }

    pub fn date(&self, index: usize) -> NaiveDate {
        self.forcings[0].date(index)
    }

    pub fn basin_index(&self, id: &str) -> Option<usize> {
        self.basins.iter().position(|b| b.id == id)
    }

    pub fn coverage(&self) -> Vec<BasinCoverage> {
        self.basins
            .iter()
            .zip(&self.observations)
            .map(|(b, o)| BasinCoverage {
                basin_id: b.id.clone(),
                valid_days: o.valid_count(),
                total_days: o.len(),
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct BasinCoverage {
    pub basin_id: String,
    pub valid_days: usize,
    pub total_days: usize,
}

fn parse_date(s: &str, path: &str, line: usize) -> Result<NaiveDate, DataError> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").map_err(|_| DataError::Schema {
        basin: path.to_string(),
        line,
        detail: format!("cannot parse date '{s}' (expected YYYY-MM-DD)"),
    })
}

fn parse_num(s: &str, what: &str, path: &str, line: usize) -> Result<f64, DataError> {
    s.trim().parse::<f64>().map_err(|_| DataError::Schema {
        basin: path.to_string(),
        line,
        detail: format!("cannot parse {what} '{s}'"),
    })
}

struct ForcingColumns {
    date: usize,
    precip: usize,
    t_min: usize,
    t_max: usize,
    t_mean: Option<usize>,
    pet: Option<usize>,
}

fn forcing_columns(headers: &csv::StringRecord, path: &str) -> Result<ForcingColumns, DataError> {
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);
    let need = |name: &str| {
        find(name).ok_or_else(|| DataError::Schema {
            basin: path.to_string(),
            line: 1,
            detail: format!("missing required column '{name}'"),
        })
    };
    Ok(ForcingColumns {
        date: need("date")?,
        precip: need("prcp_mm")?,
        t_min: need("tmin_c")?,
        t_max: need("tmax_c")?,
        t_mean: find("tmean_c"),
        pet: find("pet_mm"),
    })
}

fn load_forcing(path: &Path, basin: &str, latitude: f64) -> Result<ForcingSeries, DataError> {
    let mut reader = csv::Reader::from_path(path).map_err(|_| DataError::MissingFile {
        basin: basin.to_string(),
        path: path.display().to_string(),
    })?;
    let cols = forcing_columns(reader.headers().map_err(csv_err(path))?, basin)?;

    let mut start: Option<NaiveDate> = None;
    let mut precip = Vec::new();
    let mut t_min = Vec::new();
    let mut t_max = Vec::new();
    let mut t_mean = Vec::new();
    let mut pet = Vec::new();

    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(csv_err(path))?;
        let date = parse_date(&record[cols.date], basin, line)?;
        match start {
            None => start = Some(date),
            Some(s) => {
                let expected = s + Days::new(precip.len() as u64);
                if date != expected {
                    return Err(DataError::DateGap {
                        basin: basin.to_string(),
                        expected: expected.to_string(),
                        found: date.to_string(),
                        line,
                    });
                }
            }
        }
        let p = parse_num(&record[cols.precip], "precipitation", basin, line)?;
        if p < 0.0 {
            return Err(DataError::Schema {
                basin: basin.to_string(),
                line,
                detail: format!("negative precipitation {p}"),
            });
        }
        let lo = parse_num(&record[cols.t_min], "minimum temperature", basin, line)?;
        let hi = parse_num(&record[cols.t_max], "maximum temperature", basin, line)?;
        if hi < lo {
            return Err(DataError::Schema {
                basin: basin.to_string(),
                line,
                detail: format!("t_max {hi} below t_min {lo}"),
            });
        }
        let mean = match cols.t_mean {
            Some(j) if !record[j].trim().is_empty() => {
                parse_num(&record[j], "mean temperature", basin, line)?
            }
            _ => 0.5 * (lo + hi),
        };
        let ep = match cols.pet {
            Some(j) if !record[j].trim().is_empty() => {
                parse_num(&record[j], "potential ET", basin, line)?
            }
            _ => {
                let ra = extraterrestrial_radiation(latitude, date.ordinal())?;
                hargreaves_pet(lo, hi, mean, ra)?
            }
        };
        precip.push(p);
        t_min.push(lo);
        t_max.push(hi);
        t_mean.push(mean);
        pet.push(ep);
    }

    let start = start.ok_or_else(|| DataError::Schema {
        basin: basin.to_string(),
        line: 1,
        detail: "forcing file has no rows".into(),
    })?;
    Ok(ForcingSeries {
        start,
        precip,
        t_min,
        t_max,
        t_mean,
        pet,
    })
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> DataError + '_ {
    move |e| DataError::Manifest {
        path: path.display().to_string(),
        detail: e.to_string(),
    }
}

fn load_flow(
    path: &Path,
    basin: &str,
    axis: &ForcingSeries,
    units: FlowUnits,
    area_km2: f64,
) -> Result<ObservationSeries, DataError> {
    let mut reader = csv::Reader::from_path(path).map_err(|_| DataError::MissingFile {
        basin: basin.to_string(),
        path: path.display().to_string(),
    })?;
    let headers = reader.headers().map_err(csv_err(path))?.clone();
    let date_col = headers
        .iter()
        .position(|h| h.trim() == "date")
        .ok_or_else(|| DataError::Schema {
            basin: basin.to_string(),
            line: 1,
            detail: "flow file is missing the 'date' column".into(),
        })?;
    let flow_col = headers
        .iter()
        .position(|h| {
            let h = h.trim();
            h == "flow_cfs" || h == "flow_mm_day" || h == "flow"
        })
        .ok_or_else(|| DataError::Schema {
            basin: basin.to_string(),
            line: 1,
            detail: "flow file needs a 'flow', 'flow_cfs', or 'flow_mm_day' column".into(),
        })?;

    let mut flow = vec![0.0; axis.len()];
    let mut mask = vec![false; axis.len()];
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(csv_err(path))?;
        let date = parse_date(&record[date_col], basin, line)?;
        let Some(idx) = axis.index_of(date) else {
            // Rows outside the forcing axis carry no usable signal.
            continue;
        };
        let cell = record[flow_col].trim().to_string();
        if cell.is_empty() {
            continue; // stays masked
        }
        let raw = parse_num(&cell, "flow", basin, line)?;
        if raw < 0.0 {
            return Err(DataError::Schema {
                basin: basin.to_string(),
                line,
                detail: format!("negative flow {raw}"),
            });
        }
        flow[idx] = match units {
            FlowUnits::MmDay => raw,
            FlowUnits::Cfs => cfs_to_mm_per_day(raw, area_km2)?,
        };
        mask[idx] = true;
    }
    Ok(ObservationSeries {
        start: axis.start,
        flow,
        mask,
    })
}

fn load_attribute_table(
    path: &Path,
) -> Result<(BTreeMap<String, Vec<f64>>, CategoricalVocab), DataError> {
    let mut reader = csv::Reader::from_path(path).map_err(|_| DataError::MissingFile {
        basin: "<attributes>".to_string(),
        path: path.display().to_string(),
    })?;
    let headers = reader.headers().map_err(csv_err(path))?.clone();
    let id_col = headers
        .iter()
        .position(|h| h.trim() == "basin_id")
        .ok_or_else(|| DataError::Schema {
            basin: "<attributes>".into(),
            line: 1,
            detail: "attribute table is missing the 'basin_id' column".into(),
        })?;
    let mut col_index = Vec::with_capacity(ATTRIBUTE_NAMES.len());
    for name in ATTRIBUTE_NAMES {
        let j = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| DataError::Schema {
                basin: "<attributes>".into(),
                line: 1,
                detail: format!("attribute table is missing column '{name}'"),
            })?;
        col_index.push(j);
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err(path))?;
        rows.push(RawAttributeRow {
            basin_id: record[id_col].trim().to_string(),
            cells: col_index.iter().map(|&j| record[j].to_string()).collect(),
        });
    }
    encode_attributes(&rows)
}

/// Load and validate the dataset named by a manifest file.
pub fn load_dataset(manifest_path: &Path) -> Result<Dataset, DataError> {
    let (manifest, base) = Manifest::read(manifest_path)?;
    let (attr_map, vocab) = load_attribute_table(&base.join(&manifest.attributes_path))?;

    let mut basins = Vec::with_capacity(manifest.basins.len());
    let mut forcings = Vec::with_capacity(manifest.basins.len());
    let mut observations = Vec::with_capacity(manifest.basins.len());

    for entry in &manifest.basins {
        let attributes = attr_map.get(&entry.id).cloned().ok_or_else(|| DataError::Schema {
            basin: entry.id.clone(),
            line: 0,
            detail: "basin missing from the attribute table".into(),
        })?;
        if entry.area_km2 <= 0.0 {
            return Err(DataError::NonPositiveArea {
                area_km2: entry.area_km2,
            });
        }
        if entry.lat.abs() > 90.0 {
            return Err(DataError::Schema {
                basin: entry.id.clone(),
                line: 0,
                detail: format!("latitude {} out of range", entry.lat),
            });
        }
        let forcing = load_forcing(&base.join(&entry.forcing_path), &entry.id, entry.lat)?;
        let obs = load_flow(
            &base.join(&entry.flow_path),
            &entry.id,
            &forcing,
            manifest.flow_units,
            entry.area_km2,
        )?;
        basins.push(BasinRecord {
            id: entry.id.clone(),
            latitude: entry.lat,
            area_km2: entry.area_km2,
            attributes,
        });
        forcings.push(forcing);
        observations.push(obs);
    }

    // All basins must share the axis.
    let start = forcings[0].start;
    let len = forcings[0].len();
    for (b, f) in basins.iter().zip(&forcings) {
        if f.start != start || f.len() != len {
            return Err(DataError::AxisMismatch {
                basin: b.id.clone(),
                expected_start: start.to_string(),
                expected_len: len,
                got_start: f.start.to_string(),
                got_len: f.len(),
            });
        }
    }

    Ok(Dataset {
        basins,
        forcings,
        observations,
        vocab,
    })
}
