//! Higher-order-mutation laboratory.
//!
//! The pipeline, end to end:
//!
//! 1. [`toylang`] parses and interprets programs of a small deterministic
//!    imperative language in which subjects and their test suites are written.
//! 2. [`mutgen`] generates every first-order mutant (AOR, ROR, LCR) and weaves
//!    them into a single metaprogram with guarded choice points.
//! 3. [`varex`] runs the metaprogram variationally, once per test, producing a
//!    propositional failure condition over mutant options for each test.
//! 4. [`sshomsat`] encodes the strongly-subsuming-higher-order-mutant criteria
//!    over those conditions and enumerates the complete solution set.
//! 5. [`evaluator`] and [`search`] provide the one-candidate-at-a-time side:
//!    brute-force, genetic, and characteristics-prioritized search.
//! 6. [`analysis`] computes characteristics (order, equal-fail, N+1,
//!    proximity) of a found mutant set.
//!
//! [`formula`] is the propositional engine shared by steps 3-4, and
//! [`corpus`] generates seeded random subject programs for differential
//! testing of the variational path against brute force.

pub mod analysis;
pub mod corpus;
pub mod evaluator;
pub mod formula;
pub mod mutgen;
pub mod rational;
pub mod search;
pub mod sshomsat;
pub mod toylang;
pub mod varex;

use serde::{Deserialize, Serialize};

/// Identifier of a first-order mutant: a dense index into a
/// [`mutgen::MutantCatalog`], assigned in source order. Doubles as the
/// propositional variable index in [`formula`].
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct MutantId(pub u32);

impl MutantId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for MutantId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "m{}", self.0)
    }
}
