//! Exhaustive first-order mutant generation and metaprogram weaving.
//!
//! Three operator families are applied at every applicable location:
//! AOR replaces an arithmetic operator with each of the other four of
//! `+ - * / %`, ROR replaces a relational operator with each of the other
//! five of `== != < > <= >=`, and LCR swaps `&&` with `||`. Mutant ids are
//! dense and assigned in source order, so a catalog is a pure function of
//! the source text.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::toylang::{
    hex_digest, mutation_points, BinOp, Expr, Location, MutationPoint, OpClass, Pos, Program,
    Stmt,
};
use crate::MutantId;

const AOR_OPS: [BinOp; 5] = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Mod];
const ROR_OPS: [BinOp; 6] = [
    BinOp::Eq,
    BinOp::Ne,
    BinOp::Lt,
    BinOp::Gt,
    BinOp::Le,
    BinOp::Ge,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorKind {
    Aor,
    Ror,
    Lcr,
}

impl OperatorKind {
    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Aor => "AOR",
            OperatorKind::Ror => "ROR",
            OperatorKind::Lcr => "LCR",
        }
    }

    fn from_class(class: OpClass) -> Self {
        match class {
            OpClass::Arithmetic => OperatorKind::Aor,
            OpClass::Relational => OperatorKind::Ror,
            OpClass::Logical => OperatorKind::Lcr,
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "AOR" => OperatorKind::Aor,
            "ROR" => OperatorKind::Ror,
            "LCR" => OperatorKind::Lcr,
            _ => return None,
        })
    }
}

/// A first-order mutant: one operator replacement at one location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fom {
    pub id: MutantId,
    pub kind: OperatorKind,
    pub location: Location,
    pub original: BinOp,
    pub replacement: BinOp,
    /// Operator token position, the weaving anchor.
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutantCatalog {
    pub mutants: Vec<Fom>,
    pub program_digest: String,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum MutgenError {
    #[error("catalog was generated from a different source (catalog digest {catalog}, program digest {program})")]
    DigestMismatch { catalog: String, program: String },
    #[error("mutants {0} and {1} rewrite the same expression and conflict")]
    ConflictingSelection(MutantId, MutantId),
    #[error("unknown mutant {0}")]
    UnknownMutant(MutantId),
    #[error("catalog file is inconsistent: {0}")]
    InconsistentCatalog(String),
}

impl MutantCatalog {
    pub fn len(&self) -> usize {
        self.mutants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mutants.is_empty()
    }

    pub fn get(&self, id: MutantId) -> Result<&Fom, MutgenError> {
        self.mutants
            .get(id.index())
            .ok_or(MutgenError::UnknownMutant(id))
    }

    /// Content hash covering the source digest and every mutant row; the
    /// consistency key carried by all downstream artifacts.
    pub fn digest(&self) -> String {
        let mut rows = String::new();
        rows.push_str(&self.program_digest);
        for fom in &self.mutants {
            rows.push_str(&format!(
                ";{}:{}:{}:{}:{}:{}:{}",
                fom.id.0,
                fom.kind.name(),
                fom.location.unit,
                fom.location.function,
                fom.location.ordinal,
                fom.original.token(),
                fom.replacement.token()
            ));
        }
        hex_digest(&rows)
    }

    /// Pairs of mutants rewriting the same expression; such pairs are
    /// mutually exclusive rewrites, never combined into candidates.
    pub fn conflicting_pairs(&self) -> Vec<(MutantId, MutantId)> {
        let mut by_location: HashMap<&Location, Vec<MutantId>> = HashMap::new();
        for fom in &self.mutants {
            by_location.entry(&fom.location).or_default().push(fom.id);
        }
        let mut pairs = Vec::new();
        for ids in by_location.values() {
            for (i, &a) in ids.iter().enumerate() {
                for &b in &ids[i + 1..] {
                    pairs.push((a.min(b), a.max(b)));
                }
            }
        }
        pairs.sort();
        pairs.dedup();
        pairs
    }

    /// Whether the selection picks two mutants of one location.
    pub fn selection_conflict(
        &self,
        selection: &BTreeSet<MutantId>,
    ) -> Option<(MutantId, MutantId)> {
        let mut seen: HashMap<&Location, MutantId> = HashMap::new();
        for &id in selection {
            let fom = &self.mutants[id.index()];
            if let Some(&first) = seen.get(&fom.location) {
                return Some((first, id));
            }
            seen.insert(&fom.location, id);
        }
        None
    }

    /// Restrict to the given ids, re-indexed densely in ascending original
    /// id order.
    pub fn filter(&self, keep: &BTreeSet<MutantId>) -> Result<MutantCatalog, MutgenError> {
        for &id in keep {
            if id.index() >= self.mutants.len() {
                return Err(MutgenError::UnknownMutant(id));
            }
        }
        let mutants = keep
            .iter()
            .enumerate()
            .map(|(new_index, &old)| {
                let mut fom = self.mutants[old.index()].clone();
                fom.id = MutantId(new_index as u32);
                fom
            })
            .collect();
        Ok(MutantCatalog {
            mutants,
            program_digest: self.program_digest.clone(),
        })
    }
}

/// Generate every applicable first-order mutant, ids in source order.
pub fn generate_mutants(program: &Program) -> MutantCatalog {
    let mut mutants = Vec::new();
    for point in mutation_points(program) {
        let kind = OperatorKind::from_class(point.op.class());
        let replacements: Vec<BinOp> = match point.op.class() {
            OpClass::Arithmetic => AOR_OPS
                .iter()
                .copied()
                .filter(|&op| op != point.op)
                .collect(),
            OpClass::Relational => ROR_OPS
                .iter()
                .copied()
                .filter(|&op| op != point.op)
                .collect(),
            OpClass::Logical => vec![if point.op == BinOp::And {
                BinOp::Or
            } else {
                BinOp::And
            }],
        };
        for replacement in replacements {
            mutants.push(Fom {
                id: MutantId(mutants.len() as u32),
                kind,
                location: point.location.clone(),
                original: point.op,
                replacement,
                pos: point.pos,
            });
        }
    }
    MutantCatalog {
        mutants,
        program_digest: program.source_digest.clone(),
    }
}

/// The program with every cataloged mutant woven in as a guarded choice
/// point. Tests are carried over untouched.
#[derive(Debug, Clone)]
pub struct MetaProgram {
    pub base: Program,
    pub catalog: MutantCatalog,
}

/// Weave the catalog's mutants into the program. Mutants of one expression
/// nest with the lowest id outermost (innermost-last in id order).
pub fn weave(program: &Program, catalog: &MutantCatalog) -> Result<MetaProgram, MutgenError> {
    if catalog.program_digest != program.source_digest {
        return Err(MutgenError::DigestMismatch {
            catalog: catalog.program_digest.clone(),
            program: program.source_digest.clone(),
        });
    }
    let mut by_pos: HashMap<Pos, Vec<&Fom>> = HashMap::new();
    for fom in &catalog.mutants {
        by_pos.entry(fom.pos).or_default().push(fom);
    }
    let mut base = program.clone();
    for unit in &mut base.units {
        for function in &mut unit.functions {
            for stmt in &mut function.body {
                weave_stmt(stmt, &by_pos);
            }
        }
    }
    Ok(MetaProgram {
        base,
        catalog: catalog.clone(),
    })
}

fn weave_stmt(stmt: &mut Stmt, by_pos: &HashMap<Pos, Vec<&Fom>>) {
    match stmt {
        Stmt::Let { value, .. } | Stmt::Assign { value, .. } | Stmt::Return { value, .. } => {
            weave_expr(value, by_pos)
        }
        Stmt::If {
            cond,
            then_body,
            else_body,
            ..
        } => {
            weave_expr(cond, by_pos);
            for s in then_body {
                weave_stmt(s, by_pos);
            }
            for s in else_body {
                weave_stmt(s, by_pos);
            }
        }
        Stmt::While { cond, body, .. } => {
            weave_expr(cond, by_pos);
            for s in body {
                weave_stmt(s, by_pos);
            }
        }
        Stmt::Assert { cond, .. } => weave_expr(cond, by_pos),
        Stmt::Call { expr, .. } => weave_expr(expr, by_pos),
    }
}

fn weave_expr(expr: &mut Expr, by_pos: &HashMap<Pos, Vec<&Fom>>) {
    match expr {
        Expr::IntLit { .. } | Expr::BoolLit { .. } | Expr::Var { .. } => {}
        Expr::Unary { operand, .. } => weave_expr(operand, by_pos),
        Expr::Call { args, .. } => {
            for arg in args {
                weave_expr(arg, by_pos);
            }
        }
        Expr::Choice { .. } => unreachable!("weaving an already-woven program"),
        Expr::Binary { op, lhs, rhs, pos } => {
            weave_expr(lhs, by_pos);
            weave_expr(rhs, by_pos);
            let Some(mutants) = by_pos.get(pos) else {
                return;
            };
            let mut woven = Expr::Binary {
                op: *op,
                lhs: lhs.clone(),
                rhs: rhs.clone(),
                pos: *pos,
            };
            for fom in mutants.iter().rev() {
                debug_assert_eq!(fom.original, *op);
                woven = Expr::Choice {
                    guard: fom.id.0,
                    mutated: Box::new(Expr::Binary {
                        op: fom.replacement,
                        lhs: lhs.clone(),
                        rhs: rhs.clone(),
                        pos: *pos,
                    }),
                    original: Box::new(woven),
                };
            }
            *expr = woven;
        }
    }
}

/// Extract the concrete program for one mutant selection.
pub fn instantiate(
    meta: &MetaProgram,
    selection: &BTreeSet<MutantId>,
) -> Result<Program, MutgenError> {
    for &id in selection {
        if id.index() >= meta.catalog.mutants.len() {
            return Err(MutgenError::UnknownMutant(id));
        }
    }
    if let Some((a, b)) = meta.catalog.selection_conflict(selection) {
        return Err(MutgenError::ConflictingSelection(a, b));
    }
    let guards: BTreeSet<u32> = selection.iter().map(|m| m.0).collect();
    let mut program = meta.base.clone();
    for unit in &mut program.units {
        for function in &mut unit.functions {
            for stmt in &mut function.body {
                resolve_stmt(stmt, &guards);
            }
        }
    }
    Ok(program)
}

fn resolve_stmt(stmt: &mut Stmt, guards: &BTreeSet<u32>) {
    match stmt {
        Stmt::Let { value, .. } | Stmt::Assign { value, .. } | Stmt::Return { value, .. } => {
            resolve_expr(value, guards)
        }
        Stmt::If {
            cond,
            then_body,
            else_body,
            ..
        } => {
            resolve_expr(cond, guards);
            for s in then_body {
                resolve_stmt(s, guards);
            }
            for s in else_body {
                resolve_stmt(s, guards);
            }
        }
        Stmt::While { cond, body, .. } => {
            resolve_expr(cond, guards);
            for s in body {
                resolve_stmt(s, guards);
            }
        }
        Stmt::Assert { cond, .. } => resolve_expr(cond, guards),
        Stmt::Call { expr, .. } => resolve_expr(expr, guards),
    }
}

fn resolve_expr(expr: &mut Expr, guards: &BTreeSet<u32>) {
    match expr {
        Expr::IntLit { .. } | Expr::BoolLit { .. } | Expr::Var { .. } => {}
        Expr::Unary { operand, .. } => resolve_expr(operand, guards),
        Expr::Call { args, .. } => {
            for arg in args {
                resolve_expr(arg, guards);
            }
        }
        Expr::Binary { lhs, rhs, .. } => {
            resolve_expr(lhs, guards);
            resolve_expr(rhs, guards);
        }
        Expr::Choice {
            guard,
            mutated,
            original,
        } => {
            let chosen = if guards.contains(guard) {
                std::mem::replace(mutated.as_mut(), placeholder())
            } else {
                std::mem::replace(original.as_mut(), placeholder())
            };
            *expr = chosen;
            resolve_expr(expr, guards);
        }
    }
}

fn placeholder() -> Expr {
    Expr::BoolLit {
        value: false,
        pos: Pos::default(),
    }
}

// ---------------------------------------------------------------------
// Catalog file format
// ---------------------------------------------------------------------

/// JSON schema of an exported catalog.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CatalogFile {
    pub program_digest: String,
    pub catalog_digest: String,
    pub mutants: Vec<CatalogRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CatalogRow {
    pub id: u32,
    pub kind: String,
    pub unit: String,
    pub function: String,
    pub ordinal: u32,
    pub original: String,
    pub replacement: String,
}

impl MutantCatalog {
    pub fn to_file(&self) -> CatalogFile {
        CatalogFile {
            program_digest: self.program_digest.clone(),
            catalog_digest: self.digest(),
            mutants: self
                .mutants
                .iter()
                .map(|fom| CatalogRow {
                    id: fom.id.0,
                    kind: fom.kind.name().to_string(),
                    unit: fom.location.unit.clone(),
                    function: fom.location.function.clone(),
                    ordinal: fom.location.ordinal,
                    original: fom.original.token().to_string(),
                    replacement: fom.replacement.token().to_string(),
                })
                .collect(),
        }
    }

    /// Rebuild a catalog from its file form alone, without re-anchoring to
    /// source positions. The result supports location lookups and digest
    /// checks (the digest covers the rows, not positions) but cannot be
    /// woven; use [`from_file`](Self::from_file) with the program for that.
    pub fn from_file_unanchored(file: &CatalogFile) -> Result<MutantCatalog, MutgenError> {
        let mut mutants = Vec::with_capacity(file.mutants.len());
        for (index, row) in file.mutants.iter().enumerate() {
            if row.id as usize != index {
                return Err(MutgenError::InconsistentCatalog(format!(
                    "row {index} has id {}; ids must be dense and ordered",
                    row.id
                )));
            }
            let kind = OperatorKind::from_name(&row.kind).ok_or_else(|| {
                MutgenError::InconsistentCatalog(format!("unknown operator kind {}", row.kind))
            })?;
            let (Some(original), Some(replacement)) = (
                BinOp::from_token(&row.original),
                BinOp::from_token(&row.replacement),
            ) else {
                return Err(MutgenError::InconsistentCatalog(format!(
                    "bad operator token in row {index}"
                )));
            };
            mutants.push(Fom {
                id: MutantId(row.id),
                kind,
                location: Location {
                    unit: row.unit.clone(),
                    function: row.function.clone(),
                    ordinal: row.ordinal,
                },
                original,
                replacement,
                pos: Pos::default(),
            });
        }
        let catalog = MutantCatalog {
            mutants,
            program_digest: file.program_digest.clone(),
        };
        if catalog.digest() != file.catalog_digest {
            return Err(MutgenError::InconsistentCatalog(
                "catalog digest does not match rows".to_string(),
            ));
        }
        Ok(catalog)
    }

    /// Rebuild a catalog from its file form against the program it was
    /// generated from. Every row is re-anchored to a mutation point of the
    /// program and cross-checked.
    pub fn from_file(program: &Program, file: &CatalogFile) -> Result<MutantCatalog, MutgenError> {
        if file.program_digest != program.source_digest {
            return Err(MutgenError::DigestMismatch {
                catalog: file.program_digest.clone(),
                program: program.source_digest.clone(),
            });
        }
        let points: HashMap<Location, MutationPoint> = mutation_points(program)
            .into_iter()
            .map(|p| (p.location.clone(), p))
            .collect();
        let mut mutants = Vec::with_capacity(file.mutants.len());
        for (index, row) in file.mutants.iter().enumerate() {
            if row.id as usize != index {
                return Err(MutgenError::InconsistentCatalog(format!(
                    "row {index} has id {}; ids must be dense and ordered",
                    row.id
                )));
            }
            let location = Location {
                unit: row.unit.clone(),
                function: row.function.clone(),
                ordinal: row.ordinal,
            };
            let point = points.get(&location).ok_or_else(|| {
                MutgenError::InconsistentCatalog(format!("no mutable expression at {location}"))
            })?;
            let kind = OperatorKind::from_name(&row.kind).ok_or_else(|| {
                MutgenError::InconsistentCatalog(format!("unknown operator kind {}", row.kind))
            })?;
            let original = BinOp::from_token(&row.original);
            let replacement = BinOp::from_token(&row.replacement);
            let (Some(original), Some(replacement)) = (original, replacement) else {
                return Err(MutgenError::InconsistentCatalog(format!(
                    "bad operator token in row {index}"
                )));
            };
            if original != point.op {
                return Err(MutgenError::InconsistentCatalog(format!(
                    "row {index} claims original `{}` but {location} holds `{}`",
                    row.original,
                    point.op.token()
                )));
            }
            mutants.push(Fom {
                id: MutantId(row.id),
                kind,
                location,
                original,
                replacement,
                pos: point.pos,
            });
        }
        let catalog = MutantCatalog {
            mutants,
            program_digest: file.program_digest.clone(),
        };
        if catalog.digest() != file.catalog_digest {
            return Err(MutgenError::InconsistentCatalog(
                "catalog digest does not match rows".to_string(),
            ));
        }
        Ok(catalog)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toylang::{parse, run, TestStatus, DEFAULT_STEP_BOUND};

    const DEMO_SRC: &str = "\
unit demo {
  fn f(a: int, b: int) -> bool {
    if (a == 1) {
      return a < b;
    }
    return a > b;
  }
}

test T1 { assert f(1, 2); }
test T2 { assert !f(0, 3); }
test T3 { assert !f(1, 1); }
";

    #[test]
    fn demo_yields_fifteen_ror_mutants() {
        let program = parse(DEMO_SRC).unwrap();
        let catalog = generate_mutants(&program);
        assert_eq!(catalog.len(), 15);
        assert!(catalog.mutants.iter().all(|m| m.kind == OperatorKind::Ror));
        for (i, fom) in catalog.mutants.iter().enumerate() {
            assert_eq!(fom.id.0 as usize, i);
            assert_eq!(fom.location.ordinal as usize, i / 5);
            assert_ne!(fom.original, fom.replacement);
        }
    }

    #[test]
    fn arithmetic_occurrence_yields_four_replacements() {
        let src = "unit u { fn f(a: int, b: int) -> int { return a + b; } } test t { assert f(1, 2) == 3; }";
        let catalog = generate_mutants(&parse(src).unwrap());
        assert_eq!(catalog.len(), 4);
        let replacements: Vec<BinOp> = catalog.mutants.iter().map(|m| m.replacement).collect();
        assert_eq!(
            replacements,
            vec![BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Mod]
        );
    }

    #[test]
    fn program_without_mutable_expressions_yields_empty_catalog() {
        let src = "unit u { fn f() -> int { return 1; } } test t { assert true; }";
        let catalog = generate_mutants(&parse(src).unwrap());
        assert!(catalog.is_empty());
    }

    #[test]
    fn catalog_is_deterministic() {
        let program = parse(DEMO_SRC).unwrap();
        assert_eq!(generate_mutants(&program), generate_mutants(&program));
        assert_eq!(
            generate_mutants(&program).digest(),
            generate_mutants(&program).digest()
        );
    }

    #[test]
    fn weave_builds_nested_choices_in_id_order() {
        let program = parse(DEMO_SRC).unwrap();
        let catalog = generate_mutants(&program);
        let meta = weave(&program, &catalog).unwrap();
        // The if condition holds mutants 0..5 nested lowest-id-outermost.
        let cond = match &meta.base.units[0].functions[0].body[0] {
            Stmt::If { cond, .. } => cond,
            other => panic!("unexpected stmt {other:?}"),
        };
        let mut depth = 0;
        let mut cursor = cond;
        while let Expr::Choice {
            guard, original, ..
        } = cursor
        {
            assert_eq!(*guard, depth);
            depth += 1;
            cursor = original;
        }
        assert_eq!(depth, 5);
        assert!(matches!(cursor, Expr::Binary { op: BinOp::Eq, .. }));
    }

    #[test]
    fn weave_rejects_foreign_catalog() {
        let program = parse(DEMO_SRC).unwrap();
        let other = parse(&DEMO_SRC.replace("a < b", "a <= b")).unwrap();
        let catalog = generate_mutants(&other);
        assert!(matches!(
            weave(&program, &catalog),
            Err(MutgenError::DigestMismatch { .. })
        ));
    }

    #[test]
    fn empty_selection_reproduces_original_behavior() {
        let program = parse(DEMO_SRC).unwrap();
        let catalog = generate_mutants(&program);
        let meta = weave(&program, &catalog).unwrap();
        let restored = instantiate(&meta, &BTreeSet::new()).unwrap();
        for (test, original_test) in restored.tests.iter().zip(&program.tests) {
            let a = run(&restored, test, DEFAULT_STEP_BOUND);
            let b = run(&program, original_test, DEFAULT_STEP_BOUND);
            assert_eq!(a, b);
            assert_eq!(a.status, TestStatus::Pass);
        }
    }

    #[test]
    fn single_selection_applies_exactly_that_mutation() {
        let program = parse(DEMO_SRC).unwrap();
        let catalog = generate_mutants(&program);
        let meta = weave(&program, &catalog).unwrap();
        // Mutant 0 is == -> !=: T1 and T2 fail, T3 passes.
        let mutated = instantiate(&meta, &BTreeSet::from([MutantId(0)])).unwrap();
        let statuses: Vec<TestStatus> = mutated
            .tests
            .iter()
            .map(|t| run(&mutated, t, DEFAULT_STEP_BOUND).status)
            .collect();
        assert_eq!(
            statuses,
            vec![TestStatus::Fail, TestStatus::Fail, TestStatus::Pass]
        );
    }

    #[test]
    fn single_instantiation_changes_exactly_one_operator() {
        let program = parse(DEMO_SRC).unwrap();
        let catalog = generate_mutants(&program);
        let meta = weave(&program, &catalog).unwrap();
        let original_points = crate::toylang::mutation_points(&program);
        for fom in &catalog.mutants {
            let mutated = instantiate(&meta, &BTreeSet::from([fom.id])).unwrap();
            let mutated_points = crate::toylang::mutation_points(&mutated);
            assert_eq!(original_points.len(), mutated_points.len());
            let diffs: Vec<_> = original_points
                .iter()
                .zip(&mutated_points)
                .filter(|(a, b)| a != b)
                .collect();
            assert_eq!(diffs.len(), 1, "mutant {}", fom.id);
            let (before, after) = diffs[0];
            assert_eq!(before.location, fom.location);
            assert_eq!(before.pos, after.pos);
            assert_eq!(before.op, fom.original);
            assert_eq!(after.op, fom.replacement);
        }
    }

    #[test]
    fn conflicting_selection_is_rejected() {
        let program = parse(DEMO_SRC).unwrap();
        let catalog = generate_mutants(&program);
        let meta = weave(&program, &catalog).unwrap();
        // Mutants 0 and 1 both rewrite the first location.
        let err = instantiate(&meta, &BTreeSet::from([MutantId(0), MutantId(1)])).unwrap_err();
        assert_eq!(
            err,
            MutgenError::ConflictingSelection(MutantId(0), MutantId(1))
        );
    }

    #[test]
    fn out_of_universe_selection_is_rejected() {
        let program = parse(DEMO_SRC).unwrap();
        let catalog = generate_mutants(&program);
        let meta = weave(&program, &catalog).unwrap();
        assert_eq!(
            instantiate(&meta, &BTreeSet::from([MutantId(99)])).unwrap_err(),
            MutgenError::UnknownMutant(MutantId(99))
        );
    }

    #[test]
    fn filter_reindexes_densely() {
        let program = parse(DEMO_SRC).unwrap();
        let catalog = generate_mutants(&program);
        let filtered = catalog
            .filter(&BTreeSet::from([MutantId(0), MutantId(9)]))
            .unwrap();
        assert_eq!(filtered.len(), 2);
        assert_eq!(filtered.mutants[0].id, MutantId(0));
        assert_eq!(filtered.mutants[0].original, BinOp::Eq);
        assert_eq!(filtered.mutants[0].replacement, BinOp::Ne);
        assert_eq!(filtered.mutants[1].id, MutantId(1));
        assert_eq!(filtered.mutants[1].original, BinOp::Lt);
        assert_eq!(filtered.mutants[1].replacement, BinOp::Ge);
        assert_ne!(filtered.digest(), catalog.digest());
    }

    #[test]
    fn conflicting_pairs_groups_by_location() {
        let program = parse(DEMO_SRC).unwrap();
        let catalog = generate_mutants(&program);
        let pairs = catalog.conflicting_pairs();
        // Three locations with five mutants each: 3 * C(5,2) pairs.
        assert_eq!(pairs.len(), 30);
        assert!(pairs.contains(&(MutantId(0), MutantId(4))));
        assert!(!pairs.contains(&(MutantId(4), MutantId(5))));
    }

    #[test]
    fn catalog_file_round_trips() {
        let program = parse(DEMO_SRC).unwrap();
        let catalog = generate_mutants(&program);
        let file = catalog.to_file();
        let restored = MutantCatalog::from_file(&program, &file).unwrap();
        assert_eq!(restored, catalog);

        let mut doctored = file.clone();
        doctored.mutants[0].original = "<".to_string();
        assert!(matches!(
            MutantCatalog::from_file(&program, &doctored),
            Err(MutgenError::InconsistentCatalog(_))
        ));
    }
}
