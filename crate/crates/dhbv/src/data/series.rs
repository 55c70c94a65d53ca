//! Daily series types. Every series is date-contiguous; a series' index
//! space is `start + i` days.

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

/// Daily meteorology for one basin. Lengths are equal and dates contiguous.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForcingSeries {
    pub start: NaiveDate,
    pub precip: Vec<f64>,
    pub t_min: Vec<f64>,
    pub t_max: Vec<f64>,
    pub t_mean: Vec<f64>,
    pub pet: Vec<f64>,
}

impl ForcingSeries {
    pub fn len(&self) -> usize {
        self.precip.len()
    }

    pub fn is_empty(&self) -> bool {
        self.precip.is_empty()
    }

    pub fn date(&self, index: usize) -> NaiveDate {
        self.start + Days::new(index as u64)
    }

    /// Index of a date on this series' axis, if it lies inside the record.
    pub fn index_of(&self, date: NaiveDate) -> Option<usize> {
        let offset = (date - self.start).num_days();
        (offset >= 0 && (offset as usize) < self.len()).then_some(offset as usize)
    }
}

/// Observed discharge in mm/day on the same axis as the basin's forcing;
/// `mask[i]` is false where the gauge record is missing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservationSeries {
    pub start: NaiveDate,
    pub flow: Vec<f64>,
    pub mask: Vec<bool>,
}

impl ObservationSeries {
    pub fn len(&self) -> usize {
        self.flow.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flow.is_empty()
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}
