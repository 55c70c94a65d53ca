//! The dataset manifest: one JSON file naming every per-basin file and the
//! attribute table.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::DataError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowUnits {
    /// Gauge units, converted to depth with the basin area.
    Cfs,
    /// Already basin-average depth.
    MmDay,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestBasin {
    pub id: String,
    pub lat: f64,
    pub area_km2: f64,
    pub forcing_path: String,
    pub flow_path: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub basins: Vec<ManifestBasin>,
    pub attributes_path: String,
    pub flow_units: FlowUnits,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<(Manifest, PathBuf), DataError> {
        let text = std::fs::read_to_string(path).map_err(|e| DataError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let manifest: Manifest = serde_json::from_str(&text).map_err(|e| DataError::Manifest {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        if manifest.basins.is_empty() {
            return Err(DataError::Manifest {
                path: path.display().to_string(),
                detail: "manifest lists no basins".into(),
            });
        }
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Ok((manifest, base))
    }

    pub fn write(&self, path: &Path) -> Result<(), DataError> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text).map_err(|e| DataError::Io {
            path: path.display().to_string(),
            source: e,
        })
    }
}
