//! Characteristics of a found SSHOM set: order distribution, the equal-fail
//! and N+1 rules, and the proximity of constituents in the source.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mutgen::MutantCatalog;
use crate::sshomsat::SshomRecord;
use crate::MutantId;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("record references unknown mutant {0}")]
    UnknownMutant(MutantId),
}

/// Span classification of one record's constituents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Proximity {
    /// All in one function.
    SameFunction,
    /// One unit, several functions.
    SameUnit,
    /// Exactly two units.
    TwoUnits,
    /// Three or more units.
    Spread,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ProximityCounts {
    pub same_function: usize,
    pub same_unit: usize,
    pub two_units: usize,
    pub spread: usize,
}

impl ProximityCounts {
    pub fn total(&self) -> usize {
        self.same_function + self.same_unit + self.two_units + self.spread
    }
}

/// Record count by order (number of constituents).
pub fn order_histogram(records: &[SshomRecord]) -> BTreeMap<usize, usize> {
    let mut histogram = BTreeMap::new();
    for record in records {
        *histogram.entry(record.mutants.len()).or_default() += 1;
    }
    histogram
}

/// Percentage of records whose constituents all share one kill set.
/// `None` when there are no records.
pub fn equal_fail_rate(
    records: &[SshomRecord],
    fom_kills: &BTreeMap<MutantId, BTreeSet<String>>,
) -> Option<f64> {
    if records.is_empty() {
        return None;
    }
    let equal = records
        .iter()
        .filter(|record| {
            let mut kills = record.mutants.iter().map(|m| &fom_kills[m]);
            let first = kills.next().expect("records have constituents");
            kills.all(|k| k == first)
        })
        .count();
    Some(100.0 * equal as f64 / records.len() as f64)
}

/// Among records of order above two, the percentage whose mutant set extends
/// another record's set by exactly one mutant. `None` when no record has
/// order above two.
pub fn n_plus_one_rate(records: &[SshomRecord]) -> Option<f64> {
    let sets: BTreeSet<&BTreeSet<MutantId>> = records.iter().map(|r| &r.mutants).collect();
    let bigger: Vec<&SshomRecord> = records.iter().filter(|r| r.mutants.len() > 2).collect();
    if bigger.is_empty() {
        return None;
    }
    let chained = bigger
        .iter()
        .filter(|record| {
            record.mutants.iter().any(|m| {
                let mut smaller = record.mutants.clone();
                smaller.remove(m);
                sets.contains(&smaller)
            })
        })
        .count();
    Some(100.0 * chained as f64 / bigger.len() as f64)
}

/// Classify each record by the span of its constituents' locations.
pub fn proximity_distribution(
    records: &[SshomRecord],
    catalog: &MutantCatalog,
) -> Result<ProximityCounts, AnalysisError> {
    let mut counts = ProximityCounts::default();
    for record in records {
        match classify_span(record, catalog)? {
            Proximity::SameFunction => counts.same_function += 1,
            Proximity::SameUnit => counts.same_unit += 1,
            Proximity::TwoUnits => counts.two_units += 1,
            Proximity::Spread => counts.spread += 1,
        }
    }
    Ok(counts)
}

fn classify_span(
    record: &SshomRecord,
    catalog: &MutantCatalog,
) -> Result<Proximity, AnalysisError> {
    let mut units = BTreeSet::new();
    let mut functions = BTreeSet::new();
    for &m in &record.mutants {
        let fom = catalog
            .get(m)
            .map_err(|_| AnalysisError::UnknownMutant(m))?;
        units.insert(&fom.location.unit);
        functions.insert((&fom.location.unit, &fom.location.function));
    }
    Ok(match (units.len(), functions.len()) {
        (1, 1) => Proximity::SameFunction,
        (1, _) => Proximity::SameUnit,
        (2, _) => Proximity::TwoUnits,
        _ => Proximity::Spread,
    })
}

/// The full characteristics report; the JSON export mirrors this struct.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CharacteristicsReport {
    /// Keys are orders rendered in decimal.
    pub order_histogram: BTreeMap<String, usize>,
    /// Percentage, absent when there are no records.
    pub equal_fail_rate_percent: Option<f64>,
    /// Percentage among records of order above two, absent when none exist.
    pub n_plus_one_rate_percent: Option<f64>,
    pub proximity: ProximityCounts,
}

impl CharacteristicsReport {
    pub fn build(
        records: &[SshomRecord],
        catalog: &MutantCatalog,
        fom_kills: &BTreeMap<MutantId, BTreeSet<String>>,
    ) -> Result<Self, AnalysisError> {
        Ok(CharacteristicsReport {
            order_histogram: order_histogram(records)
                .into_iter()
                .map(|(order, count)| (order.to_string(), count))
                .collect(),
            equal_fail_rate_percent: equal_fail_rate(records, fom_kills),
            n_plus_one_rate_percent: n_plus_one_rate(records),
            proximity: proximity_distribution(records, catalog)?,
        })
    }

    /// Plot-ready rows: `class,count` per proximity class.
    pub fn proximity_csv(&self) -> String {
        format!(
            "class,count\nM,{}\nC,{}\n2C,{}\n*,{}\n",
            self.proximity.same_function,
            self.proximity.same_unit,
            self.proximity.two_units,
            self.proximity.spread
        )
    }
}
