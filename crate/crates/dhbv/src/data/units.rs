//! Gauge-unit conversions between volumetric discharge and basin depth.

use super::DataError;

/// Cubic feet per second to cubic metres per day.
const CFS_TO_M3_PER_DAY: f64 = 0.0283168 * 86400.0;

/// Convert cubic feet per second to mm/day of basin-average depth.
pub fn cfs_to_mm_per_day(q_cfs: f64, area_km2: f64) -> Result<f64, DataError> {
    if area_km2 <= 0.0 {
        return Err(DataError::NonPositiveArea { area_km2 });
    }
    Ok(q_cfs * CFS_TO_M3_PER_DAY / (area_km2 * 1e6) * 1000.0)
}

pub fn mm_per_day_to_cfs(q_mm: f64, area_km2: f64) -> Result<f64, DataError> {
    if area_km2 <= 0.0 {
        return Err(DataError::NonPositiveArea { area_km2 });
    }
    Ok(q_mm / 1000.0 * (area_km2 * 1e6) / CFS_TO_M3_PER_DAY)
}
