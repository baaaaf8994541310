//! Concrete, one-selection-at-a-time candidate evaluation: the measurement
//! core shared by all search strategies.
//!
//! Tests are selected by reachability: a test that never executes a mutant's
//! location cannot kill it, so only reaching tests are run. Kill sets use
//! test indices into the program's test list; ids are materialized at the
//! reporting boundary.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::mutgen::{MetaProgram, MutgenError};
use crate::rational::Rational;
use crate::toylang::{coverage, run_selection, Program};
use crate::MutantId;

/// Per-first-order-mutant measurements.
#[derive(Debug, Clone)]
pub struct FomResults {
    /// Indexed by mutant id: tests (by index) killing the mutant alone.
    pub kill_sets: Vec<BTreeSet<u16>>,
    /// Indexed by mutant id: tests reaching the mutant's location on the
    /// unmutated program. Kill sets are always subsets of these.
    pub reach_map: Vec<BTreeSet<u16>>,
    /// Test executions consumed.
    pub evaluations: u64,
}

impl FomResults {
    /// Mutants killed by at least one test, ascending.
    pub fn killed_ids(&self) -> Vec<MutantId> {
        self.kill_sets
            .iter()
            .enumerate()
            .filter(|(_, kills)| !kills.is_empty())
            .map(|(index, _)| MutantId(index as u32))
            .collect()
    }

    pub fn kill_set_names(&self, m: MutantId, program: &Program) -> BTreeSet<String> {
        self.kill_sets[m.index()]
            .iter()
            .map(|&t| program.tests[t as usize].id.clone())
            .collect()
    }
}

/// Measure every first-order mutant: coverage once per test on the pristine
/// program, then each mutant against its reaching tests. `jobs > 1` runs
/// the per-mutant measurements on a thread pool; results are keyed by
/// mutant, so the outcome is schedule-independent.
pub fn evaluate_foms(meta: &MetaProgram, step_bound: u64, jobs: usize) -> FomResults {
    let pristine = crate::mutgen::instantiate(meta, &BTreeSet::new())
        .expect("empty selection always instantiates");
    let per_test_coverage: Vec<BTreeSet<crate::toylang::Location>> = meta
        .base
        .tests
        .iter()
        .map(|test| coverage(&pristine, test, step_bound).locations)
        .collect();

    let reach_map: Vec<BTreeSet<u16>> = meta
        .catalog
        .mutants
        .iter()
        .map(|fom| {
            per_test_coverage
                .iter()
                .enumerate()
                .filter(|(_, covered)| covered.contains(&fom.location))
                .map(|(t, _)| t as u16)
                .collect()
        })
        .collect();

    let measure = |fom: &crate::mutgen::Fom| -> (BTreeSet<u16>, u64) {
        let guards = BTreeSet::from([fom.id.0]);
        let mut kills = BTreeSet::new();
        let mut executions = 0;
        for &t in &reach_map[fom.id.index()] {
            let outcome =
                run_selection(&meta.base, &meta.base.tests[t as usize], step_bound, &guards);
            executions += 1;
            if outcome.status.is_kill() {
                kills.insert(t);
            }
        }
        (kills, executions)
    };

    let measured: Vec<(BTreeSet<u16>, u64)> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        pool.install(|| meta.catalog.mutants.par_iter().map(measure).collect())
    } else {
        meta.catalog.mutants.iter().map(measure).collect()
    };

    let evaluations = measured.iter().map(|(_, n)| n).sum();
    FomResults {
        kill_sets: measured.into_iter().map(|(kills, _)| kills).collect(),
        reach_map,
        evaluations,
    }
}

/// Kill set of one candidate higher-order mutant, measured by concrete runs
/// of the selection against the union of its constituents' reaching tests.
/// Returns the kill set and the number of test executions consumed.
pub fn evaluate_candidate(
    meta: &MetaProgram,
    candidate: &BTreeSet<MutantId>,
    fom_results: &FomResults,
    step_bound: u64,
) -> Result<(BTreeSet<u16>, u64), MutgenError> {
    assert!(candidate.len() >= 2, "candidates combine at least two mutants");
    for &m in candidate {
        if m.index() >= meta.catalog.len() {
            return Err(MutgenError::UnknownMutant(m));
        }
    }
    if let Some((a, b)) = meta.catalog.selection_conflict(candidate) {
        return Err(MutgenError::ConflictingSelection(a, b));
    }
    let mut reaching: BTreeSet<u16> = BTreeSet::new();
    for &m in candidate {
        reaching.extend(&fom_results.reach_map[m.index()]);
    }
    let guards: BTreeSet<u32> = candidate.iter().map(|m| m.0).collect();
    let mut kills = BTreeSet::new();
    let mut executions = 0;
    for &t in &reaching {
        let outcome =
            run_selection(&meta.base, &meta.base.tests[t as usize], step_bound, &guards);
        executions += 1;
        if outcome.status.is_kill() {
            kills.insert(t);
        }
    }
    Ok((kills, executions))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    NotKilled,
    NonSshom,
    Sshom,
    StrictSshom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict<T: Ord> {
    pub kind: VerdictKind,
    pub kill_set: BTreeSet<T>,
}

impl<T: Ord> Verdict<T> {
    pub fn is_sshom(&self) -> bool {
        matches!(self.kind, VerdictKind::Sshom | VerdictKind::StrictSshom)
    }
}

/// Classify a higher-order kill set against its constituents' kill sets:
/// subsuming iff non-empty and within the intersection, strict iff a proper
/// subset of it.
pub fn classify<T: Ord + Clone>(
    t_h: &BTreeSet<T>,
    constituent_kills: &[&BTreeSet<T>],
) -> Verdict<T> {
    assert!(!constituent_kills.is_empty());
    if t_h.is_empty() {
        return Verdict {
            kind: VerdictKind::NotKilled,
            kill_set: BTreeSet::new(),
        };
    }
    let mut intersection = constituent_kills[0].clone();
    for kills in &constituent_kills[1..] {
        intersection = intersection.intersection(kills).cloned().collect();
    }
    let kind = if !t_h.is_subset(&intersection) {
        VerdictKind::NonSshom
    } else if t_h.len() < intersection.len() {
        VerdictKind::StrictSshom
    } else {
        VerdictKind::Sshom
    };
    Verdict {
        kind,
        kill_set: t_h.clone(),
    }
}

/// Search fitness: `|T_h| / |intersection of constituent kill sets|` as an
/// exact rational, used piecewise — (0,1] marks a subsuming combination,
/// (0,1) a strict one, 0 a potential equivalent, and the sentinel a discard.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fitness {
    NonSshom,
    Value(Rational),
}

pub fn fitness<T: Ord + Clone>(t_h: &BTreeSet<T>, constituent_kills: &[&BTreeSet<T>]) -> Fitness {
    assert!(!constituent_kills.is_empty());
    let mut intersection = constituent_kills[0].clone();
    for kills in &constituent_kills[1..] {
        intersection = intersection.intersection(kills).cloned().collect();
    }
    if intersection.is_empty() || !t_h.is_subset(&intersection) {
        return Fitness::NonSshom;
    }
    if t_h.is_empty() {
        return Fitness::Value(Rational::zero());
    }
    Fitness::Value(Rational::new(t_h.len() as i64, intersection.len() as i64))
}
