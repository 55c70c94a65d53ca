//! Potential evapotranspiration from daily temperature extremes and
//! latitude: top-of-atmosphere radiation from standard solar geometry, then
//! the Hargreaves temperature-range formula.

use std::f64::consts::PI;

use super::DataError;

/// Solar constant, MJ m^-2 min^-1.
const SOLAR_CONSTANT: f64 = 0.0820;

/// Latitudes poleward of this see polar night, which the daily formula does
/// not handle.
pub const MAX_LATITUDE_DEG: f64 = 66.5;

/// Extraterrestrial radiation in MJ m^-2 day^-1 for a latitude (degrees)
/// and day of year (1-366).
pub fn extraterrestrial_radiation(latitude_deg: f64, day_of_year: u32) -> Result<f64, DataError> {
    if latitude_deg.abs() >= MAX_LATITUDE_DEG {
        return Err(DataError::PolarLatitude {
            latitude: latitude_deg,
        });
    }
    let phi = latitude_deg.to_radians();
    let j = day_of_year as f64;
    let inv_distance = 1.0 + 0.033 * (2.0 * PI / 365.0 * j).cos();
    let declination = 0.409 * (2.0 * PI / 365.0 * j - 1.39).sin();
    let sunset_angle = (-phi.tan() * declination.tan()).clamp(-1.0, 1.0).acos();
    Ok((24.0 * 60.0 / PI)
        * SOLAR_CONSTANT
        * inv_distance
        * (sunset_angle * phi.sin() * declination.sin()
            + phi.cos() * declination.cos() * sunset_angle.sin()))
}

/// Hargreaves potential ET in mm/day. `0.408` converts MJ m^-2 day^-1 to an
/// equivalent water depth. Clamped at zero.
pub fn hargreaves_pet(t_min: f64, t_max: f64, t_mean: f64, ra: f64) -> Result<f64, DataError> {
    if t_max < t_min {
        return Err(DataError::TemperatureOrder { t_min, t_max });
    }
    Ok((0.0023 * 0.408 * ra * (t_mean + 17.8) * (t_max - t_min).sqrt()).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent transcription of the same solar-geometry relations, kept
    /// structurally separate from the implementation above.
    fn ra_oracle(lat_deg: f64, day: u32) -> f64 {
        let lat = lat_deg * PI / 180.0;
        let d = day as f64;
        let dr = 1.0 + 0.033 * f64::cos(2.0 * PI * d / 365.0);
        let delta = 0.409 * f64::sin(2.0 * PI * d / 365.0 - 1.39);
        let x = -f64::tan(lat) * f64::tan(delta);
        let ws = f64::acos(x.clamp(-1.0, 1.0));
        1440.0 / PI
            * 0.0820
            * dr
            * (ws * f64::sin(lat) * f64::sin(delta) + f64::cos(lat) * f64::cos(delta) * f64::sin(ws))
    }

    #[test]
    fn equator_equinox_radiation() {
        let ra = extraterrestrial_radiation(0.0, 80).unwrap();
        assert!((ra - ra_oracle(0.0, 80)).abs() < 1e-9);
        assert!(ra > 36.0 && ra < 39.0, "got {ra}");
    }

    #[test]
    fn hemispheric_symmetry_at_solstices() {
        // Northern summer solstice at +40 matches southern winter solstice
        // (day 355) at -40 once the Earth-Sun distance factor is divided
        // out; the leftover is the small declination difference between the
        // two dates.
        let dr = |day: u32| 1.0 + 0.033 * f64::cos(2.0 * PI * day as f64 / 365.0);
        let north = extraterrestrial_radiation(40.0, 172).unwrap() / dr(172);
        let south = extraterrestrial_radiation(-40.0, 355).unwrap() / dr(355);
        assert!((north - south).abs() / north < 0.01, "{north} vs {south}");
    }

    #[test]
    fn midlatitudes_positive_all_year() {
        for lat in [-55.0, -30.0, 0.0, 30.0, 55.0] {
            for day in 1..=365 {
                let ra = extraterrestrial_radiation(lat, day).unwrap();
                assert!(ra > 0.0, "Ra {ra} at lat {lat} day {day}");
                let oracle = ra_oracle(lat, day);
                assert!((ra - oracle).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn polar_latitude_rejected() {
        assert!(extraterrestrial_radiation(70.0, 100).is_err());
    }

    #[test]
    fn hargreaves_zero_cases() {
        // Zero diurnal range and the -17.8 degC crossing both clamp to zero.
        assert_eq!(hargreaves_pet(12.0, 12.0, 12.0, 30.0).unwrap(), 0.0);
        assert_eq!(hargreaves_pet(-20.0, -15.6, -17.8, 30.0).unwrap(), 0.0);
        // Colder than the crossing stays clamped at zero.
        assert_eq!(hargreaves_pet(-30.0, -20.0, -25.0, 30.0).unwrap(), 0.0);
    }

    #[test]
    fn hargreaves_reference_value() {
        // 0.0023 * 0.408 * 30 * 32.8 * sqrt(10)
        let pet = hargreaves_pet(10.0, 20.0, 15.0, 30.0).unwrap();
        assert!((pet - 2.920_001_654_601_174_7).abs() < 1e-12, "got {pet}");
    }

    #[test]
    fn temperature_order_enforced() {
        assert!(hargreaves_pet(21.0, 20.0, 20.5, 30.0).is_err());
    }
}
