//! The per-basin simulation CSV: one row per day with forcings, all five
//! states, all fluxes, and routed discharge. Column order is fixed and is
//! the file contract for the `simulate` and `evaluate` commands.

use std::io::Write;
use std::path::Path;

use chrono::{Days, NaiveDate};

use crate::hbv::SimulationOutput;

use super::series::ForcingSeries;
use super::DataError;

pub const SIMULATION_COLUMNS: [&str; 23] = [
    "date",
    "precip_mm",
    "temp_c",
    "pet_mm",
    "snowpack_mm",
    "snow_liquid_mm",
    "soil_moisture_mm",
    "upper_zone_mm",
    "lower_zone_mm",
    "precip_snow_mm",
    "precip_rain_mm",
    "snowmelt_mm",
    "refreeze_mm",
    "snow_infiltration_mm",
    "effective_rainfall_mm",
    "excess_mm",
    "actual_et_mm",
    "percolation_mm",
    "fast_flow_mm",
    "stormflow_mm",
    "baseflow_mm",
    "discharge_mm",
    "routed_discharge_mm",
];

/// Write a simulation aligned to `forcing` starting at index
/// `offset` on the forcing axis, skipping the first `sim.warmup_days` rows.
pub fn write_simulation_csv(
    path: &Path,
    forcing: &ForcingSeries,
    offset: usize,
    sim: &SimulationOutput,
) -> Result<(), DataError> {
    let io_err = |e: std::io::Error| DataError::Io {
        path: path.display().to_string(),
        source: e,
    };
    let mut f = std::fs::File::create(path).map_err(io_err)?;
    writeln!(f, "{}", SIMULATION_COLUMNS.join(",")).map_err(io_err)?;
    let n = sim.fluxes.discharge.len();
    for d in sim.warmup_days..n {
        let axis = offset + d;
        let row = [
            forcing.precip[axis],
            forcing.t_mean[axis],
            forcing.pet[axis],
            sim.states.snowpack[d],
            sim.states.snow_liquid[d],
            sim.states.soil_moisture[d],
            sim.states.upper_zone[d],
            sim.states.lower_zone[d],
            sim.fluxes.precip_snow[d],
            sim.fluxes.precip_rain[d],
            sim.fluxes.snowmelt[d],
            sim.fluxes.refreeze[d],
            sim.fluxes.snow_infiltration[d],
            sim.fluxes.effective_rainfall[d],
            sim.fluxes.excess[d],
            sim.fluxes.actual_et[d],
            sim.fluxes.percolation[d],
            sim.fluxes.fast_flow[d],
            sim.fluxes.stormflow[d],
            sim.fluxes.baseflow[d],
            sim.fluxes.discharge[d],
            sim.fluxes.routed_discharge[d],
        ];
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        writeln!(f, "{},{}", forcing.date(axis), cells.join(",")).map_err(io_err)?;
    }
    Ok(())
}

/// The simulation columns evaluation needs, read back from a file.
#[derive(Clone, Debug)]
pub struct SimTable {
    pub start: NaiveDate,
    pub discharge: Vec<f64>,
    pub routed_discharge: Vec<f64>,
    pub baseflow: Vec<f64>,
    pub actual_et: Vec<f64>,
}

impl SimTable {
    pub fn len(&self) -> usize {
        self.discharge.len()
    }

    pub fn is_empty(&self) -> bool {
        self.discharge.is_empty()
    }

    pub fn index_of(&self, date: NaiveDate) -> Option<usize> {
        let offset = (date - self.start).num_days();
        (offset >= 0 && (offset as usize) < self.len()).then_some(offset as usize)
    }

    pub fn date(&self, index: usize) -> NaiveDate {
        self.start + Days::new(index as u64)
    }
}

pub fn read_simulation_csv(path: &Path) -> Result<SimTable, DataError> {
    let mut reader = csv::Reader::from_path(path).map_err(|_| DataError::MissingFile {
        basin: path.display().to_string(),
        path: path.display().to_string(),
    })?;
    let headers = reader.headers().map_err(|e| DataError::Manifest {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let date_col = col("date").ok_or_else(|| DataError::Schema {
        basin: path.display().to_string(),
        line: 1,
        detail: "missing 'date' column".into(),
    })?;
    let need = |name: &str| {
        col(name).ok_or_else(|| DataError::Schema {
            basin: path.display().to_string(),
            line: 1,
            detail: format!("missing '{name}' column"),
        })
    };
    let discharge_col = need("discharge_mm")?;
    let routed_col = need("routed_discharge_mm")?;
    // Baseflow and ET may be absent in reduced outputs (the data-driven
    // baseline predicts only discharge).
    let baseflow_col = col("baseflow_mm");
    let et_col = col("actual_et_mm");

    let mut start: Option<NaiveDate> = None;
    let mut table = SimTable {
        start: NaiveDate::from_ymd_opt(1970, 1, 1).unwrap(),
        discharge: Vec::new(),
        routed_discharge: Vec::new(),
        baseflow: Vec::new(),
        actual_et: Vec::new(),
    };
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| DataError::Manifest {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        let date = NaiveDate::parse_from_str(record[date_col].trim(), "%Y-%m-%d").map_err(|_| {
            DataError::Schema {
                basin: path.display().to_string(),
                line,
                detail: format!("cannot parse date '{}'", &record[date_col]),
            }
        })?;
        match start {
            None => start = Some(date),
            Some(s) => {
                let expected = s + Days::new(table.discharge.len() as u64);
                if date != expected {
                    return Err(DataError::DateGap {
                        basin: path.display().to_string(),
                        expected: expected.to_string(),
                        found: date.to_string(),
                        line,
                    });
                }
            }
        }
        let num = |j: usize, what: &str| -> Result<f64, DataError> {
            record[j].trim().parse::<f64>().map_err(|_| DataError::Schema {
                basin: path.display().to_string(),
                line,
                detail: format!("cannot parse {what} '{}'", &record[j]),
            })
        };
        table.discharge.push(num(discharge_col, "discharge")?);
        table.routed_discharge.push(num(routed_col, "routed discharge")?);
        if let Some(j) = baseflow_col {
            table.baseflow.push(num(j, "baseflow")?);
        }
        if let Some(j) = et_col {
            table.actual_et.push(num(j, "actual ET")?);
        }
    }
    table.start = start.ok_or_else(|| DataError::Schema {
        basin: path.display().to_string(),
        line: 1,
        detail: "simulation file has no rows".into(),
    })?;
    Ok(table)
}
