//! Strongly-subsuming higher-order mutants as a satisfiability problem.
//!
//! Given the per-test failure conditions of a kill report, one formula is
//! built whose models are exactly the (strict-)SSHOM selections:
//!
//! * the selection must fail at least one test,
//! * every test failing the selection must fail each selected mutant alone,
//! * (strict only) some test kills every selected mutant alone but not the
//!   selection,
//!
//! conjoined with a cardinality-two floor (a higher-order mutant has at
//! least two constituents; without the floor every killed first-order mutant
//! satisfies the first two criteria trivially) and the same-location
//! exclusions of the catalog, so every enumerated model is instantiable.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

use crate::formula::Formula;
use crate::mutgen::MutantCatalog;
use crate::varex::{exclusion_context, KillReport};
use crate::MutantId;

/// A found higher-order mutant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SshomRecord {
    pub mutants: BTreeSet<MutantId>,
    pub strict: bool,
    /// Tests killing the combination (T_h).
    pub kill_set: BTreeSet<String>,
    pub discovery_index: u64,
}

/// Model enumeration strategy. Both produce the same sequence; the
/// decision-diagram walk is the default, solve-and-block is the fallback
/// kept behind the same interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnumerationStrategy {
    #[default]
    AllSat,
    SolveAndBlock,
}

/// Conjunction of the non-strict criteria over the report's tests.
pub fn build_sshom_formula(report: &mut KillReport, catalog: &MutantCatalog) -> Formula {
    let universe = report.num_mutants;
    let (store, tests) = report.parts_mut();
    let tests = tests.to_vec();

    let mut any_fails = store.mk_false();
    for (_, f) in &tests {
        any_fails = store.or(any_fails, *f);
    }

    let mut subsumption = store.mk_true();
    for (_, f) in &tests {
        let mut not_killed_alone_off = store.mk_true();
        for index in 0..universe {
            let m = MutantId(index);
            if !store.eval_singleton(*f, m).unwrap() {
                let var = store.var(m).unwrap();
                let off = store.not(var);
                not_killed_alone_off = store.and(not_killed_alone_off, off);
            }
        }
        let implication = store.implies(*f, not_killed_alone_off);
        subsumption = store.and(subsumption, implication);
    }

    if universe < 2 {
        // No selection can meet the cardinality floor.
        return store.mk_false();
    }
    let at_least_two = store.at_least_k(2);
    let exclusions = exclusion_context(catalog, store);

    let mut result = store.and(any_fails, subsumption);
    result = store.and(result, at_least_two);
    store.and(result, exclusions)
}

/// The non-strict formula conjoined with the masking criterion: some test
/// kills every constituent alone but not the combination.
pub fn build_strict_formula(report: &mut KillReport, catalog: &MutantCatalog) -> Formula {
    let base = build_sshom_formula(report, catalog);
    let universe = report.num_mutants;
    let (store, tests) = report.parts_mut();
    let tests = tests.to_vec();

    let mut masked_somewhere = store.mk_false();
    for (_, f) in &tests {
        let mut kills_all_constituents = store.mk_true();
        for index in 0..universe {
            let m = MutantId(index);
            if !store.eval_singleton(*f, m).unwrap() {
                let var = store.var(m).unwrap();
                let off = store.not(var);
                kills_all_constituents = store.and(kills_all_constituents, off);
            }
        }
        let survives = store.not(*f);
        let masked = store.and(survives, kills_all_constituents);
        masked_somewhere = store.or(masked_somewhere, masked);
    }
    store.and(base, masked_somewhere)
}

/// Enumerate every (strict-)SSHOM of the report, deterministically ordered
/// by the model enumeration order (lexicographic by mutant id).
pub fn enumerate_sshoms(
    report: &mut KillReport,
    catalog: &MutantCatalog,
    strict: bool,
    strategy: EnumerationStrategy,
) -> Vec<SshomRecord> {
    assert_eq!(
        report.universe_digest,
        catalog.digest(),
        "kill report was produced for a different catalog"
    );
    let formula = if strict {
        build_strict_formula(report, catalog)
    } else {
        build_sshom_formula(report, catalog)
    };
    let fom_kills = report.fom_kills();
    let (store, tests) = report.parts_mut();
    let models = match strategy {
        EnumerationStrategy::AllSat => store.enumerate_models(formula).collect::<Vec<_>>(),
        EnumerationStrategy::SolveAndBlock => store.enumerate_models_blocking(formula),
    };

    let mut records = Vec::with_capacity(models.len());
    for (discovery_index, model) in models.into_iter().enumerate() {
        let mutants: BTreeSet<MutantId> = model.true_vars().collect();
        debug_assert!(mutants.len() >= 2);
        let kill_set: BTreeSet<String> = tests
            .iter()
            .filter(|(_, f)| store.eval(*f, &model))
            .map(|(id, _)| id.clone())
            .collect();
        let mut constituents = mutants.iter();
        let mut intersection: BTreeSet<String> =
            fom_kills[constituents.next().unwrap()].clone();
        for m in constituents {
            intersection = intersection
                .intersection(&fom_kills[m])
                .cloned()
                .collect();
        }
        // Re-verify the record's own invariants against the raw data.
        assert!(!kill_set.is_empty(), "enumerated an unkilled combination");
        assert!(
            kill_set.is_subset(&intersection),
            "enumerated a non-subsuming combination"
        );
        let is_strict = kill_set != intersection;
        if strict {
            assert!(is_strict, "strict enumeration yielded a non-strict record");
        }
        records.push(SshomRecord {
            mutants,
            strict: is_strict,
            kill_set,
            discovery_index: discovery_index as u64,
        });
    }
    records
}

// ---------------------------------------------------------------------
// SSHOM set file format
// ---------------------------------------------------------------------

/// JSON schema of an exported SSHOM set; the ground-truth artifact consumed
/// by the characteristics analysis and search-strategy scoring.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SshomSetFile {
    pub catalog_digest: String,
    /// Whether the strict formula was enumerated.
    pub strict_mode: bool,
    pub records: Vec<SshomRecordRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SshomRecordRow {
    pub mutants: Vec<u32>,
    pub strict: bool,
    pub kill_set: Vec<String>,
    pub discovery_index: u64,
}

impl SshomRecordRow {
    pub fn from_record(record: &SshomRecord) -> Self {
        SshomRecordRow {
            mutants: record.mutants.iter().map(|m| m.0).collect(),
            strict: record.strict,
            kill_set: record.kill_set.iter().cloned().collect(),
            discovery_index: record.discovery_index,
        }
    }

    pub fn to_record(&self) -> SshomRecord {
        SshomRecord {
            mutants: self.mutants.iter().map(|&m| MutantId(m)).collect(),
            strict: self.strict,
            kill_set: self.kill_set.iter().cloned().collect(),
            discovery_index: self.discovery_index,
        }
    }
}

impl SshomSetFile {
    pub fn new(catalog_digest: String, strict_mode: bool, records: &[SshomRecord]) -> Self {
        SshomSetFile {
            catalog_digest,
            strict_mode,
            records: records.iter().map(SshomRecordRow::from_record).collect(),
        }
    }

    pub fn to_records(&self) -> Vec<SshomRecord> {
        self.records.iter().map(|r| r.to_record()).collect()
    }
}

/// Derived per-mutant kill sets in the string form used by analysis.
pub fn fom_kill_names(report: &KillReport) -> BTreeMap<MutantId, BTreeSet<String>> {
    report.fom_kills()
}
