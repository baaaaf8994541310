//! One-candidate-at-a-time search strategies: brute force, genetic, and
//! characteristics-prioritized. Each emits a deterministic timeline of found
//! (strict-)SSHOMs keyed by candidate-evaluation count.
//!
//! Budgets count candidate evaluations, the machine-independent unit; an
//! optional wall-clock cap exists for long runs but sacrifices
//! reproducibility. Timelines never embed clock readings — the `wall_ms`
//! column is written as zero and real timing belongs to the caller's log —
//! so repeated runs are byte-identical (per seed, for the genetic search).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::evaluator::{classify, evaluate_candidate, evaluate_foms, Fitness, FomResults};
use crate::mutgen::{Fom, MetaProgram};
use crate::rational::Rational;
use crate::sshomsat::SshomRecord;
use crate::toylang::Location;
use crate::MutantId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimelineEntry {
    pub record: SshomRecord,
    /// Candidate evaluations consumed when this record was found.
    pub evaluations_so_far: u64,
    /// Reserved column; deterministic outputs write 0 (timing lives in the
    /// run log, not in reproducible artifacts).
    pub wall_millis: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Timeline {
    pub entries: Vec<TimelineEntry>,
    pub total_evaluations: u64,
    pub budget_exhausted: bool,
}

impl Timeline {
    /// Mutant sets found, for ground-truth comparisons.
    pub fn found_sets(&self) -> BTreeSet<BTreeSet<MutantId>> {
        self.entries
            .iter()
            .map(|e| e.record.mutants.clone())
            .collect()
    }

    pub fn strict_count(&self) -> usize {
        self.entries.iter().filter(|e| e.record.strict).count()
    }

    /// Fixed plot-ready format: `evaluations,wall_ms,mutants,strict`, one
    /// row per found record, mutant ids joined by `+`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("evaluations,wall_ms,mutants,strict\n");
        for entry in &self.entries {
            let mutants = entry
                .record
                .mutants
                .iter()
                .map(|m| m.0.to_string())
                .collect::<Vec<_>>()
                .join("+");
            out.push_str(&format!(
                "{},{},{},{}\n",
                entry.evaluations_so_far, entry.wall_millis, mutants, entry.record.strict
            ));
        }
        out
    }
}

/// JSON schema of an exported timeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimelineFile {
    pub catalog_digest: String,
    pub strategy: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub total_evaluations: u64,
    pub budget_exhausted: bool,
    pub entries: Vec<TimelineFileEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimelineFileEntry {
    pub evaluations: u64,
    pub wall_ms: u64,
    pub mutants: Vec<u32>,
    pub strict: bool,
    pub kill_set: Vec<String>,
}

impl TimelineFile {
    pub fn new(
        timeline: &Timeline,
        catalog_digest: String,
        strategy: &str,
        seed: Option<u64>,
    ) -> Self {
        TimelineFile {
            catalog_digest,
            strategy: strategy.to_string(),
            seed,
            total_evaluations: timeline.total_evaluations,
            budget_exhausted: timeline.budget_exhausted,
            entries: timeline
                .entries
                .iter()
                .map(|e| TimelineFileEntry {
                    evaluations: e.evaluations_so_far,
                    wall_ms: e.wall_millis,
                    mutants: e.record.mutants.iter().map(|m| m.0).collect(),
                    strict: e.record.strict,
                    kill_set: e.record.kill_set.iter().cloned().collect(),
                })
                .collect(),
        }
    }
}

/// Search budget. Evaluations are the primary, deterministic unit; the wall
/// cap is a secondary stop for unattended runs.
#[derive(Debug, Clone, Copy, Default)]
pub struct Budget {
    pub max_evaluations: Option<u64>,
    pub max_wall: Option<Duration>,
}

impl Budget {
    pub fn evaluations(n: u64) -> Self {
        Budget {
            max_evaluations: Some(n),
            max_wall: None,
        }
    }

    pub fn unbounded() -> Self {
        Budget::default()
    }

    fn hit(&self, evaluations: u64, started: Instant) -> bool {
        if let Some(max) = self.max_evaluations {
            if evaluations >= max {
                return true;
            }
        }
        if let Some(max) = self.max_wall {
            if started.elapsed() >= max {
                return true;
            }
        }
        false
    }
}

/// Penalty weights; defaults 5, 1, 15.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityWeights {
    pub order: Rational,
    pub test_diff: Rational,
    pub n_plus_one: Rational,
}

impl Default for PriorityWeights {
    fn default() -> Self {
        PriorityWeights {
            order: Rational::from_int(5),
            test_diff: Rational::from_int(1),
            n_plus_one: Rational::from_int(15),
        }
    }
}

/// Candidate-space bounds of the prioritized search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub max_order: usize,
    pub max_functions: usize,
    pub max_units: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_order: 6,
            max_functions: 4,
            max_units: 3,
        }
    }
}

impl Bounds {
    pub fn validate(&self) {
        assert!(self.max_order >= 2, "orders below 2 are not higher-order");
        assert!(
            self.max_units <= self.max_functions,
            "a unit span wider than the function span is vacuous"
        );
    }
}

/// Per-batch stop condition of the prioritized search.
#[derive(Debug, Clone, Copy, Default)]
pub struct BatchBudget {
    pub max_evaluations: Option<u64>,
    pub max_wall: Option<Duration>,
}

/// Genetic-search parameters. The defaults are this artifact's choices.
#[derive(Debug, Clone)]
pub struct GeneticParams {
    pub population: usize,
    pub tournament: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub elitism: usize,
}

impl Default for GeneticParams {
    fn default() -> Self {
        GeneticParams {
            population: 64,
            tournament: 2,
            crossover_rate: 0.9,
            mutation_rate: 0.2,
            elitism: 2,
        }
    }
}

// ---------------------------------------------------------------------
// Shared machinery
// ---------------------------------------------------------------------

struct SearchCtx<'a> {
    meta: &'a MetaProgram,
    fom_results: FomResults,
    /// Dense location index per mutant, for conflict checks.
    loc_index: Vec<u32>,
    step_bound: u64,
    evaluations: u64,
    entries: Vec<TimelineEntry>,
    found: BTreeSet<BTreeSet<MutantId>>,
    started: Instant,
}

impl<'a> SearchCtx<'a> {
    fn new(meta: &'a MetaProgram, step_bound: u64, jobs: usize) -> Self {
        let fom_results = evaluate_foms(meta, step_bound, jobs);
        let mut loc_ids: BTreeMap<&Location, u32> = BTreeMap::new();
        let mut loc_index = Vec::with_capacity(meta.catalog.len());
        for fom in &meta.catalog.mutants {
            let next = loc_ids.len() as u32;
            let id = *loc_ids.entry(&fom.location).or_insert(next);
            loc_index.push(id);
        }
        SearchCtx {
            meta,
            fom_results,
            loc_index,
            step_bound,
            evaluations: 0,
            entries: Vec::new(),
            found: BTreeSet::new(),
            started: Instant::now(),
        }
    }

    fn conflict_free(&self, candidate: &[MutantId]) -> bool {
        for (i, &a) in candidate.iter().enumerate() {
            for &b in &candidate[i + 1..] {
                if self.loc_index[a.index()] == self.loc_index[b.index()] {
                    return false;
                }
            }
        }
        true
    }

    /// Evaluate and classify one candidate, recording a timeline entry on a
    /// subsumption hit. Returns the fitness for strategies that want it.
    fn evaluate(&mut self, candidate: &BTreeSet<MutantId>) -> Fitness {
        let (kills, _executions) =
            evaluate_candidate(self.meta, candidate, &self.fom_results, self.step_bound)
                .expect("strategies only submit conflict-free known candidates");
        self.evaluations += 1;
        let constituent_kills: Vec<&BTreeSet<u16>> = candidate
            .iter()
            .map(|m| &self.fom_results.kill_sets[m.index()])
            .collect();
        let verdict = classify(&kills, &constituent_kills);
        let fit = crate::evaluator::fitness(&kills, &constituent_kills);
        if verdict.is_sshom() && !self.found.contains(candidate) {
            let kill_set: BTreeSet<String> = kills
                .iter()
                .map(|&t| self.meta.base.tests[t as usize].id.clone())
                .collect();
            let strict = verdict.kind == crate::evaluator::VerdictKind::StrictSshom;
            self.found.insert(candidate.clone());
            self.entries.push(TimelineEntry {
                record: SshomRecord {
                    mutants: candidate.clone(),
                    strict,
                    kill_set,
                    discovery_index: self.entries.len() as u64,
                },
                evaluations_so_far: self.evaluations,
                wall_millis: 0,
            });
        }
        fit
    }

    fn finish(self, budget_exhausted: bool) -> Timeline {
        Timeline {
            entries: self.entries,
            total_evaluations: self.evaluations,
            budget_exhausted,
        }
    }
}

/// Lexicographic k-combination indices over 0..n.
struct Combinations {
    n: usize,
    k: usize,
    indices: Vec<usize>,
    started: bool,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            k,
            indices: (0..k).collect(),
            started: false,
            done: k > n || k == 0,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.indices.clone());
        }
        // Advance the rightmost index that can still move.
        let mut i = self.k;
        loop {
            if i == 0 {
                self.done = true;
                return None;
            }
            i -= 1;
            if self.indices[i] < self.n - self.k + i {
                self.indices[i] += 1;
                for j in i + 1..self.k {
                    self.indices[j] = self.indices[j - 1] + 1;
                }
                return Some(self.indices.clone());
            }
        }
    }
}

// ---------------------------------------------------------------------
// Brute force
// ---------------------------------------------------------------------

/// Enumerate conflict-free subsets of killed mutants in (size, id) order,
/// evaluating each until the budget runs out.
pub fn brute_force(
    meta: &MetaProgram,
    step_bound: u64,
    budget: Budget,
    max_order: usize,
    jobs: usize,
) -> Timeline {
    assert!(max_order >= 2);
    let mut ctx = SearchCtx::new(meta, step_bound, jobs);
    let killed = ctx.fom_results.killed_ids();
    let mut exhausted = false;
    'sizes: for size in 2..=max_order {
        if killed.len() < size {
            break;
        }
        for combo in Combinations::new(killed.len(), size) {
            let candidate: Vec<MutantId> = combo.iter().map(|&i| killed[i]).collect();
            if !ctx.conflict_free(&candidate) {
                continue;
            }
            if budget.hit(ctx.evaluations, ctx.started) {
                exhausted = true;
                break 'sizes;
            }
            ctx.evaluate(&candidate.into_iter().collect());
        }
    }
    ctx.finish(exhausted)
}

// ---------------------------------------------------------------------
// Genetic search
// ---------------------------------------------------------------------

/// Generations a run may spend without consuming budget (every individual
/// cached) before the search is declared converged.
const STAGNATION_LIMIT: usize = 1000;

/// Genetic search over sets of killed mutants, fully
/// deterministic for a fixed seed.
pub fn genetic_search(
    meta: &MetaProgram,
    step_bound: u64,
    budget: Budget,
    params: &GeneticParams,
    seed: u64,
    jobs: usize,
) -> Timeline {
    assert!(params.population >= 2 && params.tournament >= 1);
    let mut ctx = SearchCtx::new(meta, step_bound, jobs);
    let killed = ctx.fom_results.killed_ids();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let any_pair_exists = {
        let mut exists = false;
        'scan: for (i, &a) in killed.iter().enumerate() {
            for &b in &killed[i + 1..] {
                if ctx.conflict_free(&[a, b]) {
                    exists = true;
                    break 'scan;
                }
            }
        }
        exists
    };
    if !any_pair_exists {
        return ctx.finish(false);
    }

    let random_pair = |rng: &mut ChaCha8Rng, ctx: &SearchCtx| -> BTreeSet<MutantId> {
        loop {
            let a = killed[rng.gen_range(0..killed.len())];
            let b = killed[rng.gen_range(0..killed.len())];
            if a != b && ctx.conflict_free(&[a, b]) {
                return BTreeSet::from([a, b]);
            }
        }
    };

    let mut population: Vec<BTreeSet<MutantId>> = (0..params.population)
        .map(|_| random_pair(&mut rng, &ctx))
        .collect();
    let mut cache: HashMap<Vec<u32>, Fitness> = HashMap::new();
    let mut exhausted = false;
    let mut stagnant_generations = 0;

    'generations: loop {
        let mut consumed_this_generation = false;
        let mut scored: Vec<(BTreeSet<MutantId>, Fitness)> =
            Vec::with_capacity(population.len());
        for individual in &population {
            let key: Vec<u32> = individual.iter().map(|m| m.0).collect();
            let fit = match cache.get(&key) {
                Some(&fit) => fit,
                None => {
                    if budget.hit(ctx.evaluations, ctx.started) {
                        exhausted = true;
                        break 'generations;
                    }
                    let fit = ctx.evaluate(individual);
                    consumed_this_generation = true;
                    cache.insert(key, fit);
                    fit
                }
            };
            scored.push((individual.clone(), fit));
        }
        if consumed_this_generation {
            stagnant_generations = 0;
        } else {
            stagnant_generations += 1;
            if stagnant_generations >= STAGNATION_LIMIT {
                break;
            }
        }

        // Discard sentinels and potential equivalents; keep fitness (0, 1].
        let survivors: Vec<(BTreeSet<MutantId>, Rational)> = scored
            .into_iter()
            .filter_map(|(ind, fit)| match fit {
                Fitness::Value(r) if r.is_positive() && r <= Rational::one() => Some((ind, r)),
                _ => None,
            })
            .collect();

        let mut next: Vec<BTreeSet<MutantId>> = Vec::with_capacity(params.population);
        if !survivors.is_empty() {
            let mut ranked = survivors.clone();
            ranked.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
            ranked.dedup_by(|a, b| a.0 == b.0);
            for (elite, _) in ranked.iter().take(params.elitism) {
                next.push(elite.clone());
            }
        }
        while next.len() < params.population {
            if survivors.is_empty() {
                next.push(random_pair(&mut rng, &ctx));
                continue;
            }
            let tournament = |rng: &mut ChaCha8Rng| -> &BTreeSet<MutantId> {
                let mut best = rng.gen_range(0..survivors.len());
                for _ in 1..params.tournament {
                    let challenger = rng.gen_range(0..survivors.len());
                    if survivors[challenger].1 < survivors[best].1 {
                        best = challenger;
                    }
                }
                &survivors[best].0
            };
            let parent_a = tournament(&mut rng).clone();
            let parent_b = tournament(&mut rng).clone();
            let mut child = if rng.gen_bool(params.crossover_rate) {
                crossover(&mut rng, &parent_a, &parent_b, &ctx)
            } else {
                parent_a.clone()
            };
            if rng.gen_bool(params.mutation_rate) {
                mutate(&mut rng, &mut child, &killed, &ctx);
            }
            if child.len() < 2 {
                child = random_pair(&mut rng, &ctx);
            }
            next.push(child);
        }
        population = next;
    }
    ctx.finish(exhausted)
}

/// Uniform set crossover: each element of the union is kept with equal
/// probability; later same-location picks are dropped.
fn crossover(
    rng: &mut ChaCha8Rng,
    a: &BTreeSet<MutantId>,
    b: &BTreeSet<MutantId>,
    ctx: &SearchCtx,
) -> BTreeSet<MutantId> {
    let union: BTreeSet<MutantId> = a.union(b).copied().collect();
    let mut child = BTreeSet::new();
    let mut used_locations = BTreeSet::new();
    for &m in &union {
        if rng.gen_bool(0.5) && used_locations.insert(ctx.loc_index[m.index()]) {
            child.insert(m);
        }
    }
    if child.len() < 2 {
        a.clone()
    } else {
        child
    }
}

/// Point mutation: add, remove, or replace one constituent.
fn mutate(
    rng: &mut ChaCha8Rng,
    individual: &mut BTreeSet<MutantId>,
    killed: &[MutantId],
    ctx: &SearchCtx,
) {
    let addable = |individual: &BTreeSet<MutantId>, rng: &mut ChaCha8Rng| -> Option<MutantId> {
        let used: BTreeSet<u32> = individual
            .iter()
            .map(|m| ctx.loc_index[m.index()])
            .collect();
        let free: Vec<MutantId> = killed
            .iter()
            .copied()
            .filter(|m| !used.contains(&ctx.loc_index[m.index()]))
            .collect();
        if free.is_empty() {
            None
        } else {
            Some(free[rng.gen_range(0..free.len())])
        }
    };
    match rng.gen_range(0..3u8) {
        0 => {
            if let Some(m) = addable(individual, rng) {
                individual.insert(m);
            }
        }
        1 => {
            if individual.len() > 2 {
                let victims: Vec<MutantId> = individual.iter().copied().collect();
                let victim = victims[rng.gen_range(0..victims.len())];
                individual.remove(&victim);
            }
        }
        _ => {
            let victims: Vec<MutantId> = individual.iter().copied().collect();
            let victim = victims[rng.gen_range(0..victims.len())];
            individual.remove(&victim);
            match addable(individual, rng) {
                Some(m) => {
                    individual.insert(m);
                }
                None => {
                    individual.insert(victim);
                }
            }
        }
    }
}

// ---------------------------------------------------------------------
// Characteristics-prioritized search
// ---------------------------------------------------------------------

/// Candidate penalty: weighted order, plus the number of tests killing a
/// proper non-empty subset of the constituents, minus a bonus when the
/// candidate extends an already-found record by exactly one mutant.
pub fn penalty(
    candidate: &BTreeSet<MutantId>,
    fom_results: &FomResults,
    known: &BTreeSet<BTreeSet<MutantId>>,
    weights: &PriorityWeights,
    num_tests: usize,
) -> Rational {
    debug_assert!(candidate.len() >= 2);
    let order = candidate.len() as i64;
    let mut test_diff = 0i64;
    for t in 0..num_tests as u16 {
        let killing = candidate
            .iter()
            .filter(|m| fom_results.kill_sets[m.index()].contains(&t))
            .count();
        if killing > 0 && killing < candidate.len() {
            test_diff += 1;
        }
    }
    let is_n_plus_one = candidate.iter().any(|m| {
        let mut smaller = candidate.clone();
        smaller.remove(m);
        known.contains(&smaller)
    });
    let mut total = weights.order.mul_int(order) + weights.test_diff.mul_int(test_diff);
    if is_n_plus_one {
        total = total - weights.n_plus_one;
    }
    total
}

/// All conflict-free subsets of `foms` within the bounds, ordered by
/// (size, lexicographic ids). Call with killed mutants only.
pub fn enumerate_candidates(foms: &[&Fom], bounds: &Bounds) -> Vec<Vec<MutantId>> {
    enumerate_candidates_from(foms, bounds, foms.len())
}

/// As [`enumerate_candidates`], but the smallest constituent must come from
/// `foms[..first_limit]`. Used for batching: a batch enumerates candidates
/// whose lowest-id constituent belongs to it.
fn enumerate_candidates_from(
    foms: &[&Fom],
    bounds: &Bounds,
    first_limit: usize,
) -> Vec<Vec<MutantId>> {
    bounds.validate();
    let mut result = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    for size in 2..=bounds.max_order.min(foms.len()) {
        extend(
            foms,
            bounds,
            first_limit,
            size,
            0,
            &mut chosen,
            &mut result,
        );
    }
    result
}

fn extend(
    foms: &[&Fom],
    bounds: &Bounds,
    first_limit: usize,
    size: usize,
    from: usize,
    chosen: &mut Vec<usize>,
    result: &mut Vec<Vec<MutantId>>,
) {
    if chosen.len() == size {
        result.push(chosen.iter().map(|&i| foms[i].id).collect());
        return;
    }
    let limit = if chosen.is_empty() {
        first_limit
    } else {
        foms.len()
    };
    for next in from..limit {
        // Remaining slots must still be fillable.
        if foms.len() - next < size - chosen.len() {
            break;
        }
        if !spans_within(foms, chosen, next, bounds) {
            continue;
        }
        chosen.push(next);
        extend(foms, bounds, first_limit, size, next + 1, chosen, result);
        chosen.pop();
    }
}

fn spans_within(foms: &[&Fom], chosen: &[usize], next: usize, bounds: &Bounds) -> bool {
    let candidate_location = &foms[next].location;
    let mut units: BTreeSet<&str> = BTreeSet::new();
    let mut functions: BTreeSet<(&str, &str)> = BTreeSet::new();
    for &i in chosen {
        let location = &foms[i].location;
        if location == candidate_location {
            return false; //同 location rewrites conflict
        }
        units.insert(&location.unit);
        functions.insert((&location.unit, &location.function));
    }
    units.insert(&candidate_location.unit);
    functions.insert((&candidate_location.unit, &candidate_location.function));
    functions.len() <= bounds.max_functions && units.len() <= bounds.max_units
}

/// Batched, penalty-ordered exploration. Batches follow unit order; a
/// candidate spanning several units belongs to the batch of its lowest-id
/// constituent. Finding a record re-scores the not-yet-evaluated
/// size-plus-one supersets in the pool (the N+1 boost).
pub fn prioritized_search(
    meta: &MetaProgram,
    step_bound: u64,
    weights: &PriorityWeights,
    bounds: &Bounds,
    batch_budget: BatchBudget,
    budget: Budget,
    jobs: usize,
) -> Timeline {
    bounds.validate();
    let mut ctx = SearchCtx::new(meta, step_bound, jobs);
    let killed = ctx.fom_results.killed_ids();
    let num_tests = meta.base.tests.len();
    let mut exhausted = false;

    // Unit id ranges in catalog order.
    let mut unit_ranges: Vec<(String, u32, u32)> = Vec::new();
    for unit in &meta.base.units {
        let lo = meta
            .catalog
            .mutants
            .iter()
            .find(|f| f.location.unit == unit.name)
            .map(|f| f.id.0);
        let hi = meta
            .catalog
            .mutants
            .iter()
            .rev()
            .find(|f| f.location.unit == unit.name)
            .map(|f| f.id.0 + 1);
        if let (Some(lo), Some(hi)) = (lo, hi) {
            unit_ranges.push((unit.name.clone(), lo, hi));
        }
    }

    'batches: for (_unit, lo, hi) in unit_ranges {
        // Killed mutants from this unit onward; the first constituent must
        // come from the unit itself.
        let tail: Vec<&Fom> = killed
            .iter()
            .filter(|m| m.0 >= lo)
            .map(|m| &meta.catalog.mutants[m.index()])
            .collect();
        let first_limit = tail.iter().take_while(|f| f.id.0 < hi).count();
        if first_limit == 0 {
            continue;
        }
        let pool = enumerate_candidates_from(&tail, bounds, first_limit);
        let mut evaluated = vec![false; pool.len()];
        let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<(Rational, usize)>> =
            std::collections::BinaryHeap::with_capacity(pool.len());
        let sets: Vec<BTreeSet<MutantId>> = pool
            .iter()
            .map(|ids| ids.iter().copied().collect())
            .collect();
        for (index, candidate) in sets.iter().enumerate() {
            let p = penalty(candidate, &ctx.fom_results, &ctx.found, weights, num_tests);
            heap.push(std::cmp::Reverse((p, index)));
        }
        let batch_started = Instant::now();
        let batch_eval_start = ctx.evaluations;

        while let Some(std::cmp::Reverse((key, index))) = heap.pop() {
            if evaluated[index] {
                continue;
            }
            let fresh = penalty(&sets[index], &ctx.fom_results, &ctx.found, weights, num_tests);
            if fresh != key {
                // Stale entry; the improved one is elsewhere in the heap.
                continue;
            }
            if budget.hit(ctx.evaluations, ctx.started) {
                exhausted = true;
                break 'batches;
            }
            let batch_evals = ctx.evaluations - batch_eval_start;
            if let Some(max) = batch_budget.max_evaluations {
                if batch_evals >= max {
                    exhausted = true;
                    break;
                }
            }
            if let Some(max) = batch_budget.max_wall {
                if batch_started.elapsed() >= max {
                    exhausted = true;
                    break;
                }
            }
            evaluated[index] = true;
            let before = ctx.entries.len();
            ctx.evaluate(&sets[index]);
            if ctx.entries.len() > before {
                // New record: boost its size-plus-one supersets.
                let record = ctx.entries.last().unwrap().record.mutants.clone();
                for other_index in 0..sets.len() {
                    if evaluated[other_index] || sets[other_index].len() != record.len() + 1 {
                        continue;
                    }
                    if record.is_subset(&sets[other_index]) {
                        let boosted = penalty(
                            &sets[other_index],
                            &ctx.fom_results,
                            &ctx.found,
                            weights,
                            num_tests,
                        );
                        heap.push(std::cmp::Reverse((boosted, other_index)));
                    }
                }
            }
        }
    }
    ctx.finish(exhausted)
}
