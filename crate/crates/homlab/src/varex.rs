//! Variational execution of a metaprogram: one run per test explores every
//! mutant selection simultaneously and returns the failure condition `f_t`,
//! a formula that is true exactly for the selections under which the test
//! fails, errors, or exhausts the step bound.
//!
//! Values are conditional: a partition of disjoint formula-guarded concrete
//! alternatives. Choice points split the context on their guard variable;
//! control flow splits on conditional booleans and stores join again at the
//! end of each branch (the immediate post-dominator). Step counting mirrors
//! the concrete interpreter exactly — one step per statement evaluation plus
//! one per loop iteration, tracked per path condition — so a selection is
//! bound-killed variationally iff its concrete run is.
//!
//! Selections picking two rewrites of one expression are contradictory; the
//! initial context conjoins their pairwise exclusions, so failure conditions
//! are false outside the instantiable universe.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::formula::{Formula, FormulaStore};
use crate::mutgen::{MetaProgram, MutantCatalog};
use crate::toylang::{
    apply_binop, BinOp, Expr, Function, Location, Stmt, TestCase, UnaryOp, Value, MAX_CALL_DEPTH,
};
use crate::MutantId;

/// Alternatives one conditional value may hold before the run is aborted as
/// exploding.
pub const DEFAULT_PARTITION_LIMIT: usize = 4096;

/// Largest catalog the brute-force oracle will enumerate (2^n runs per test).
pub const DEFAULT_ORACLE_LIMIT: u32 = 14;

#[derive(Debug, Clone)]
pub struct VarexConfig {
    pub step_bound: u64,
    pub partition_limit: usize,
}

impl Default for VarexConfig {
    fn default() -> Self {
        VarexConfig {
            step_bound: crate::toylang::DEFAULT_STEP_BOUND,
            partition_limit: DEFAULT_PARTITION_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum VarexError {
    #[error("conditional-value partition limit exceeded in test {test}; hottest locations: {}",
            format_hot(.hot))]
    PartitionExplosion {
        test: String,
        /// Locations whose option variables occur most often in the exploded
        /// partition's conditions, with occurrence counts.
        hot: Vec<(Location, usize)>,
    },
    #[error("catalog has {size} mutants, above the brute-force oracle limit {limit}")]
    OracleLimitExceeded { size: usize, limit: u32 },
    #[error("kill report is invalid: {0}")]
    InvalidReport(String),
}

fn format_hot(hot: &[(Location, usize)]) -> String {
    hot.iter()
        .map(|(loc, n)| format!("{loc} ({n})"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Per-test failure conditions for a whole suite, together with the formula
/// store they live in.
pub struct KillReport {
    pub universe_digest: String,
    pub num_mutants: u32,
    store: FormulaStore,
    per_test: Vec<(String, Formula)>,
}

impl KillReport {
    pub fn store(&self) -> &FormulaStore {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut FormulaStore {
        &mut self.store
    }

    pub fn tests(&self) -> &[(String, Formula)] {
        &self.per_test
    }

    pub fn failure_condition(&self, test_id: &str) -> Option<Formula> {
        self.per_test
            .iter()
            .find(|(id, _)| id == test_id)
            .map(|(_, f)| *f)
    }

    /// Derived per-mutant kill sets: which tests kill each mutant alone.
    pub fn fom_kills(&self) -> BTreeMap<MutantId, BTreeSet<String>> {
        let mut kills = BTreeMap::new();
        for index in 0..self.num_mutants {
            let m = MutantId(index);
            let killed_by: BTreeSet<String> = self
                .per_test
                .iter()
                .filter(|(_, f)| self.store.eval_singleton(*f, m).unwrap())
                .map(|(id, _)| id.clone())
                .collect();
            kills.insert(m, killed_by);
        }
        kills
    }

    /// Split borrow for encoders that build new formulas over the report.
    pub fn parts_mut(&mut self) -> (&mut FormulaStore, &[(String, Formula)]) {
        (&mut self.store, &self.per_test)
    }

    pub fn to_file(&mut self) -> KillReportFile {
        let rows = self
            .per_test
            .iter()
            .map(|(id, f)| (id.clone(), *f))
            .collect::<Vec<_>>();
        KillReportFile {
            universe_digest: self.universe_digest.clone(),
            mutant_count: self.num_mutants,
            tests: rows
                .into_iter()
                .map(|(id, f)| KillReportRow {
                    id,
                    failure_condition: self.store.to_infix(f),
                })
                .collect(),
        }
    }

    pub fn from_file(file: &KillReportFile) -> Result<KillReport, VarexError> {
        let mut store = FormulaStore::new(file.mutant_count);
        let mut per_test = Vec::with_capacity(file.tests.len());
        let mut seen = BTreeSet::new();
        for row in &file.tests {
            if !seen.insert(row.id.clone()) {
                return Err(VarexError::InvalidReport(format!(
                    "duplicate test id {}",
                    row.id
                )));
            }
            let f = store
                .parse_infix(&row.failure_condition)
                .map_err(|e| VarexError::InvalidReport(format!("test {}: {e}", row.id)))?;
            per_test.push((row.id.clone(), f));
        }
        if per_test.is_empty() {
            return Err(VarexError::InvalidReport("no tests in report".to_string()));
        }
        Ok(KillReport {
            universe_digest: file.universe_digest.clone(),
            num_mutants: file.mutant_count,
            store,
            per_test,
        })
    }
}

/// JSON schema of an exported kill report.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct KillReportFile {
    pub universe_digest: String,
    pub mutant_count: u32,
    pub tests: Vec<KillReportRow>,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct KillReportRow {
    pub id: String,
    pub failure_condition: String,
}

/// Variational run of one test. The store must be sized to the catalog.
pub fn vrun(
    meta: &MetaProgram,
    test: &TestCase,
    store: &mut FormulaStore,
    config: &VarexConfig,
) -> Result<Formula, VarexError> {
    assert!(config.step_bound > 0, "step bound must be positive");
    assert_eq!(store.num_vars() as usize, meta.catalog.len());
    let initial = exclusion_context(&meta.catalog, store);
    let nothing_killed = store.mk_false();
    let functions = meta
        .base
        .units
        .iter()
        .flat_map(|u| u.functions.iter())
        .map(|f| (f.name.as_str(), f))
        .collect();
    let mut interp = VInterp {
        functions,
        catalog: &meta.catalog,
        store,
        step_bound: config.step_bound,
        partition_limit: config.partition_limit,
        killed: nothing_killed,
        steps: vec![(initial, 0)],
        depth: 0,
    };
    let mut env = VEnv::new();
    let mut frame = FrameState::new(interp.store);
    match interp.exec_block(&test.body, initial, &mut env, &mut frame) {
        Ok(()) => Ok(interp.killed),
        Err(explosion) => Err(VarexError::PartitionExplosion {
            test: test.id.clone(),
            hot: explosion.hot,
        }),
    }
}

/// Conjunction of pairwise exclusions for mutants sharing a location.
pub fn exclusion_context(catalog: &MutantCatalog, store: &mut FormulaStore) -> Formula {
    let mut context = store.mk_true();
    for (a, b) in catalog.conflicting_pairs() {
        let va = store.var(a).unwrap();
        let vb = store.var(b).unwrap();
        let both = store.and(va, vb);
        context = store.and_not(context, both);
    }
    context
}

/// Run the whole suite, producing one failure condition per test.
pub fn vrun_suite(meta: &MetaProgram, config: &VarexConfig) -> Result<KillReport, VarexError> {
    assert!(
        !meta.base.tests.is_empty(),
        "a kill report needs at least one test"
    );
    let mut store = FormulaStore::new(meta.catalog.len() as u32);
    let mut per_test = Vec::with_capacity(meta.base.tests.len());
    for test in &meta.base.tests {
        let f = vrun(meta, test, &mut store, config)?;
        per_test.push((test.id.clone(), f));
    }
    Ok(KillReport {
        universe_digest: meta.catalog.digest(),
        num_mutants: meta.catalog.len() as u32,
        store,
        per_test,
    })
}

/// Independent brute-force oracle: run every conflict-free selection
/// concretely and assemble the failure condition from the outcomes. Only
/// usable on small catalogs.
pub fn oracle_failure_condition(
    meta: &MetaProgram,
    test: &TestCase,
    store: &mut FormulaStore,
    step_bound: u64,
    oracle_limit: u32,
) -> Result<Formula, VarexError> {
    let n = meta.catalog.len();
    if n > oracle_limit as usize {
        return Err(VarexError::OracleLimitExceeded {
            size: n,
            limit: oracle_limit,
        });
    }
    assert_eq!(store.num_vars() as usize, n);
    let conflict_masks: Vec<u64> = meta
        .catalog
        .conflicting_pairs()
        .iter()
        .map(|(a, b)| (1u64 << a.0) | (1u64 << b.0))
        .collect();
    let mut failing = store.mk_false();
    'selections: for mask in 0u64..(1u64 << n) {
        for &pair in &conflict_masks {
            if mask & pair == pair {
                continue 'selections;
            }
        }
        let guards: BTreeSet<u32> = (0..n as u32).filter(|i| mask >> i & 1 == 1).collect();
        let outcome = crate::toylang::run_selection(&meta.base, test, step_bound, &guards);
        if outcome.status.is_kill() {
            let mut assignment = crate::formula::Assignment::all_false(n as u32);
            for &g in &guards {
                assignment.set(g, true);
            }
            let minterm = store.minterm(&assignment);
            failing = store.or(failing, minterm);
        }
    }
    Ok(failing)
}

// ---------------------------------------------------------------------
// Conditional values and the interpreter
// ---------------------------------------------------------------------

/// A conditional value: disjoint formula-guarded alternatives with pairwise
/// distinct concrete values. The disjunction of the conditions is the
/// context the value is live under.
#[derive(Debug, Clone)]
struct VValue {
    parts: Vec<(Formula, Value)>,
}

impl VValue {
    fn concrete(ctx: Formula, value: Value) -> Self {
        VValue {
            parts: vec![(ctx, value)],
        }
    }

    fn empty() -> Self {
        VValue { parts: Vec::new() }
    }
}

type VEnv = HashMap<String, VValue>;

struct FrameState {
    returned: Formula,
    ret_parts: Vec<(Formula, Value)>,
}

impl FrameState {
    fn new(store: &FormulaStore) -> Self {
        FrameState {
            returned: store.mk_false(),
            ret_parts: Vec::new(),
        }
    }
}

#[derive(Debug)]
struct Explosion {
    hot: Vec<(Location, usize)>,
}

struct VInterp<'a> {
    functions: HashMap<&'a str, &'a Function>,
    catalog: &'a MutantCatalog,
    store: &'a mut FormulaStore,
    step_bound: u64,
    partition_limit: usize,
    /// Contexts where the test already failed, errored, or hit the bound.
    killed: Formula,
    /// Statement counter per path condition, covering all live contexts.
    steps: Vec<(Formula, u64)>,
    depth: usize,
}

impl<'a> VInterp<'a> {
    fn kill(&mut self, ctx: Formula) {
        self.killed = self.store.or(self.killed, ctx);
    }

    fn live(&mut self, ctx: Formula) -> Formula {
        self.store.and_not(ctx, self.killed)
    }

    /// Advance the step counters of every context inside `ctx`; contexts
    /// reaching the bound are killed.
    fn vtick(&mut self, ctx: Formula) -> Result<(), Explosion> {
        let mut next: Vec<(Formula, u64)> = Vec::new();
        for (condition, count) in std::mem::take(&mut self.steps) {
            let inside = self.store.and(condition, ctx);
            let outside = self.store.and_not(condition, ctx);
            if !outside.is_false() {
                // Contexts already dead never tick again; drop them here so
                // finished paths do not accumulate.
                let outside_live = self.store.and_not(outside, self.killed);
                if !outside_live.is_false() {
                    next.push((outside_live, count));
                }
            }
            if !inside.is_false() {
                let advanced = count + 1;
                if advanced >= self.step_bound {
                    self.kill(inside);
                } else {
                    next.push((inside, advanced));
                }
            }
        }
        // Merge equal counts to keep the partition canonical.
        let mut by_count: BTreeMap<u64, Formula> = BTreeMap::new();
        for (condition, count) in next {
            let entry = by_count.entry(count).or_insert_with(|| self.store.mk_false());
            *entry = self.store.or(*entry, condition);
        }
        self.steps = by_count.into_iter().map(|(n, c)| (c, n)).collect();
        if self.steps.len() > self.partition_limit {
            let parts: Vec<(Formula, Value)> = self
                .steps
                .iter()
                .map(|(c, _)| (*c, Value::Bool(false)))
                .collect();
            return Err(self.explosion(&parts));
        }
        Ok(())
    }

    fn explosion(&mut self, parts: &[(Formula, Value)]) -> Explosion {
        let mut counts: BTreeMap<Location, usize> = BTreeMap::new();
        for (condition, _) in parts {
            for var in self.store.support(*condition) {
                if let Ok(fom) = self.catalog.get(var) {
                    *counts.entry(fom.location.clone()).or_default() += 1;
                }
            }
        }
        let mut hot: Vec<(Location, usize)> = counts.into_iter().collect();
        hot.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        hot.truncate(5);
        Explosion { hot }
    }

    /// Merge equal values, drop unsatisfiable alternatives, enforce the
    /// partition limit.
    fn normalize(&mut self, parts: Vec<(Formula, Value)>) -> Result<VValue, Explosion> {
        let mut order: Vec<Value> = Vec::new();
        let mut merged: HashMap<Value, Formula> = HashMap::new();
        for (condition, value) in parts {
            if condition.is_false() {
                continue;
            }
            match merged.get_mut(&value) {
                Some(existing) => *existing = self.store.or(*existing, condition),
                None => {
                    merged.insert(value, condition);
                    order.push(value);
                }
            }
        }
        let parts: Vec<(Formula, Value)> =
            order.into_iter().map(|v| (merged[&v], v)).collect();
        if parts.len() > self.partition_limit {
            return Err(self.explosion(&parts));
        }
        Ok(VValue { parts })
    }

    #[cfg(debug_assertions)]
    fn check_partition(&mut self, value: &VValue, ctx: Formula) {
        let mut cover = self.store.mk_false();
        for (i, (ci, _)) in value.parts.iter().enumerate() {
            cover = self.store.or(cover, *ci);
            for (cj, _) in &value.parts[i + 1..] {
                let overlap = self.store.and(*ci, *cj);
                debug_assert!(overlap.is_false(), "partition conditions overlap");
            }
        }
        debug_assert_eq!(cover, ctx, "partition does not cover its context");
    }

    fn exec_block(
        &mut self,
        stmts: &'a [Stmt],
        ctx: Formula,
        env: &mut VEnv,
        frame: &mut FrameState,
    ) -> Result<(), Explosion> {
        for stmt in stmts {
            let live = self.live(ctx);
            let runnable = self.store.and_not(live, frame.returned);
            if runnable.is_false() {
                break;
            }
            self.exec_stmt(stmt, runnable, env, frame)?;
        }
        Ok(())
    }

    fn exec_stmt(
        &mut self,
        stmt: &'a Stmt,
        ctx: Formula,
        env: &mut VEnv,
        frame: &mut FrameState,
    ) -> Result<(), Explosion> {
        self.vtick(ctx)?;
        let ctx = self.live(ctx);
        if ctx.is_false() {
            return Ok(());
        }
        match stmt {
            Stmt::Let { name, value, .. } | Stmt::Assign { name, value, .. } => {
                let v = self.eval(value, ctx, env)?;
                self.assign(env, name, v, ctx)?;
                Ok(())
            }
            Stmt::If {
                cond,
                then_body,
                else_body,
                ..
            } => {
                let (truthy, falsy) = self.eval_bool(cond, ctx, env)?;
                if !truthy.is_false() {
                    self.exec_block(then_body, truthy, env, frame)?;
                }
                if !falsy.is_false() {
                    self.exec_block(else_body, falsy, env, frame)?;
                }
                Ok(())
            }
            Stmt::While { cond, body, .. } => {
                let mut looping = ctx;
                loop {
                    let (truthy, _falsy) = self.eval_bool(cond, looping, env)?;
                    looping = truthy;
                    if looping.is_false() {
                        break;
                    }
                    self.exec_block(body, looping, env, frame)?;
                    looping = self.live(looping);
                    looping = self.store.and_not(looping, frame.returned);
                    if looping.is_false() {
                        break;
                    }
                    self.vtick(looping)?;
                    looping = self.live(looping);
                    if looping.is_false() {
                        break;
                    }
                }
                Ok(())
            }
            Stmt::Return { value, .. } => {
                let v = self.eval(value, ctx, env)?;
                let returned_now = self.live(ctx);
                frame.returned = self.store.or(frame.returned, returned_now);
                frame.ret_parts.extend(v.parts);
                Ok(())
            }
            Stmt::Assert { cond, .. } => {
                let (_truthy, falsy) = self.eval_bool(cond, ctx, env)?;
                self.kill(falsy);
                Ok(())
            }
            Stmt::Call { expr, .. } => {
                self.eval(expr, ctx, env)?;
                Ok(())
            }
        }
    }

    fn assign(
        &mut self,
        env: &mut VEnv,
        name: &str,
        value: VValue,
        ctx: Formula,
    ) -> Result<(), Explosion> {
        let mut parts = Vec::new();
        if let Some(old) = env.get(name) {
            for (condition, v) in &old.parts {
                let kept = self.store.and_not(*condition, ctx);
                if !kept.is_false() {
                    parts.push((kept, *v));
                }
            }
        }
        parts.extend(value.parts);
        // Re-merging equal values across old and new parts; the union can
        // legitimately exceed the limit even when both inputs are inside it.
        let normalized = self.normalize(parts)?;
        env.insert(name.to_string(), normalized);
        Ok(())
    }

    fn lookup(&mut self, env: &VEnv, name: &str, ctx: Formula) -> Result<VValue, Explosion> {
        let stored = env
            .get(name)
            .unwrap_or_else(|| unreachable!("type checker admitted undefined `{name}`"));
        let mut parts = Vec::with_capacity(stored.parts.len());
        for (condition, value) in &stored.parts {
            let restricted = self.store.and(*condition, ctx);
            if !restricted.is_false() {
                parts.push((restricted, *value));
            }
        }
        let value = self.normalize(parts)?;
        #[cfg(debug_assertions)]
        self.check_partition(&value, ctx);
        Ok(value)
    }

    fn eval_bool(
        &mut self,
        expr: &'a Expr,
        ctx: Formula,
        env: &mut VEnv,
    ) -> Result<(Formula, Formula), Explosion> {
        let v = self.eval(expr, ctx, env)?;
        let mut truthy = self.store.mk_false();
        let mut falsy = self.store.mk_false();
        for (condition, value) in v.parts {
            match value {
                Value::Bool(true) => truthy = self.store.or(truthy, condition),
                Value::Bool(false) => falsy = self.store.or(falsy, condition),
                Value::Int(_) => unreachable!("type checker admitted int condition"),
            }
        }
        Ok((truthy, falsy))
    }

    fn eval(&mut self, expr: &'a Expr, ctx: Formula, env: &mut VEnv) -> Result<VValue, Explosion> {
        match expr {
            Expr::IntLit { value, .. } => Ok(VValue::concrete(ctx, Value::Int(*value))),
            Expr::BoolLit { value, .. } => Ok(VValue::concrete(ctx, Value::Bool(*value))),
            Expr::Var { name, .. } => self.lookup(env, name, ctx),
            Expr::Unary { op, operand, .. } => {
                let inner = self.eval(operand, ctx, env)?;
                let parts = inner
                    .parts
                    .into_iter()
                    .map(|(c, v)| {
                        let mapped = match op {
                            UnaryOp::Neg => Value::Int(match v {
                                Value::Int(i) => i.wrapping_neg(),
                                Value::Bool(_) => unreachable!(),
                            }),
                            UnaryOp::Not => Value::Bool(match v {
                                Value::Bool(b) => !b,
                                Value::Int(_) => unreachable!(),
                            }),
                        };
                        (c, mapped)
                    })
                    .collect();
                self.normalize(parts)
            }
            Expr::Binary {
                op: op @ (BinOp::And | BinOp::Or),
                lhs,
                rhs,
                ..
            } => {
                let (truthy, falsy) = self.eval_bool(lhs, ctx, env)?;
                let (short_ctx, eval_ctx, short_value) = if *op == BinOp::And {
                    (falsy, truthy, false)
                } else {
                    (truthy, falsy, true)
                };
                let mut parts = Vec::new();
                if !short_ctx.is_false() {
                    parts.push((short_ctx, Value::Bool(short_value)));
                }
                if !eval_ctx.is_false() {
                    let rv = self.eval(rhs, eval_ctx, env)?;
                    parts.extend(rv.parts);
                }
                self.normalize(parts)
            }
            Expr::Binary { op, lhs, rhs, .. } => {
                let lv = self.eval(lhs, ctx, env)?;
                let rhs_ctx = self.live(ctx);
                if rhs_ctx.is_false() {
                    return Ok(VValue::empty());
                }
                let rv = self.eval(rhs, rhs_ctx, env)?;
                let mut parts = Vec::new();
                for (lc, l) in &lv.parts {
                    for (rc, r) in &rv.parts {
                        let condition = self.store.and(*lc, *rc);
                        if condition.is_false() {
                            continue;
                        }
                        match apply_binop(*op, *l, *r) {
                            Some(value) => parts.push((condition, value)),
                            None => self.kill(condition),
                        }
                    }
                }
                self.normalize(parts)
            }
            Expr::Call { callee, args, .. } => {
                let mut arg_values = Vec::with_capacity(args.len());
                let mut call_ctx = ctx;
                for arg in args {
                    let v = self.eval(arg, call_ctx, env)?;
                    call_ctx = self.live(call_ctx);
                    if call_ctx.is_false() {
                        return Ok(VValue::empty());
                    }
                    arg_values.push(v);
                }
                if self.depth >= MAX_CALL_DEPTH {
                    self.kill(call_ctx);
                    return Ok(VValue::empty());
                }
                self.depth += 1;
                let function = self.functions[callee.as_str()];
                let mut callee_env: VEnv = HashMap::new();
                for (param, value) in function.params.iter().zip(arg_values) {
                    // Argument covers may be wider than the final call
                    // context; lookups restrict as needed.
                    callee_env.insert(param.name.clone(), value);
                }
                let mut frame = FrameState::new(self.store);
                self.exec_block(&function.body, call_ctx, &mut callee_env, &mut frame)?;
                self.depth -= 1;
                self.normalize(frame.ret_parts)
            }
            Expr::Choice {
                guard,
                mutated,
                original,
            } => {
                let g = self
                    .store
                    .var(MutantId(*guard))
                    .expect("woven guard outside catalog universe");
                let mutated_ctx = self.store.and(ctx, g);
                let original_ctx = self.store.and_not(ctx, g);
                let mut parts = Vec::new();
                if !mutated_ctx.is_false() {
                    parts.extend(self.eval(mutated, mutated_ctx, env)?.parts);
                }
                if !original_ctx.is_false() {
                    parts.extend(self.eval(original, original_ctx, env)?.parts);
                }
                self.normalize(parts)
            }
        }
    }
}
