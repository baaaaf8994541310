//! Propositional formula engine over mutant option variables.
//!
//! Formulas are stored as reduced ordered binary decision diagrams in a
//! [`FormulaStore`]; the variable order is fixed to the mutant id order of the
//! catalog the store was created for. Hash-consing makes the representation
//! canonical: two formulas built in the same store are semantically equal if
//! and only if their [`Formula`] handles are equal.
//!
//! The store is single-threaded by design. Code that wants to run several
//! analyses in parallel gives each thread its own store and moves formulas
//! between stores through the textual infix form ([`FormulaStore::to_infix`] /
//! [`FormulaStore::parse_infix`]).

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use thiserror::Error;

use crate::MutantId;

const FALSE_IDX: u32 = 0;
const TRUE_IDX: u32 = 1;

/// Handle to a formula inside a [`FormulaStore`]. Only meaningful together
/// with the store that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Formula(u32);

impl Formula {
    pub fn is_false(self) -> bool {
        self.0 == FALSE_IDX
    }

    pub fn is_true(self) -> bool {
        self.0 == TRUE_IDX
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("variable m{0} is outside the universe of {1} variables")]
    UnknownVariable(u32, u32),
    #[error("formula parse error at byte {at}: {message}")]
    Parse { at: usize, message: String },
}

/// Boolean connective selector for [`FormulaStore::combine`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
    Not,
    Implies,
}

/// A total assignment of the variable universe.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment {
    bits: Vec<bool>,
}

impl Assignment {
    pub fn all_false(num_vars: u32) -> Self {
        Assignment {
            bits: vec![false; num_vars as usize],
        }
    }

    /// Assignment with exactly one variable set.
    pub fn singleton(num_vars: u32, m: MutantId) -> Self {
        let mut a = Assignment::all_false(num_vars);
        a.set(m.0, true);
        a
    }

    pub fn from_true_set(num_vars: u32, set: &BTreeSet<MutantId>) -> Self {
        let mut a = Assignment::all_false(num_vars);
        for m in set {
            a.set(m.0, true);
        }
        a
    }

    pub fn get(&self, var: u32) -> bool {
        self.bits[var as usize]
    }

    pub fn set(&mut self, var: u32, value: bool) {
        self.bits[var as usize] = value;
    }

    pub fn num_vars(&self) -> u32 {
        self.bits.len() as u32
    }

    /// Variables assigned true, ascending.
    pub fn true_vars(&self) -> impl Iterator<Item = MutantId> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(i, _)| MutantId(i as u32))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    var: u32,
    lo: u32,
    hi: u32,
}

/// Hash-consed decision-diagram store over a fixed variable universe.
pub struct FormulaStore {
    num_vars: u32,
    nodes: Vec<Node>,
    unique: HashMap<Node, u32>,
    ite_cache: HashMap<(u32, u32, u32), u32>,
}

impl FormulaStore {
    pub fn new(num_vars: u32) -> Self {
        let sentinel = Node {
            var: u32::MAX,
            lo: 0,
            hi: 0,
        };
        FormulaStore {
            num_vars,
            nodes: vec![sentinel, sentinel],
            unique: HashMap::new(),
            ite_cache: HashMap::new(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn mk_true(&self) -> Formula {
        Formula(TRUE_IDX)
    }

    pub fn mk_false(&self) -> Formula {
        Formula(FALSE_IDX)
    }

    pub fn var(&mut self, m: MutantId) -> Result<Formula, FormulaError> {
        if m.0 >= self.num_vars {
            return Err(FormulaError::UnknownVariable(m.0, self.num_vars));
        }
        Ok(Formula(self.mk_node(m.0, FALSE_IDX, TRUE_IDX)))
    }

    /// Level of a node for ordering purposes; terminals sit below all
    /// variables.
    fn level(&self, idx: u32) -> u32 {
        if idx == FALSE_IDX || idx == TRUE_IDX {
            self.num_vars
        } else {
            self.nodes[idx as usize].var
        }
    }

    fn mk_node(&mut self, var: u32, lo: u32, hi: u32) -> u32 {
        if lo == hi {
            return lo;
        }
        debug_assert!(var < self.level(lo) && var < self.level(hi));
        let node = Node { var, lo, hi };
        if let Some(&idx) = self.unique.get(&node) {
            return idx;
        }
        let idx = self.nodes.len() as u32;
        self.nodes.push(node);
        self.unique.insert(node, idx);
        idx
    }

    fn cofactor(&self, idx: u32, var: u32, value: bool) -> u32 {
        if self.level(idx) != var {
            return idx;
        }
        let node = self.nodes[idx as usize];
        if value {
            node.hi
        } else {
            node.lo
        }
    }

    fn ite(&mut self, i: u32, t: u32, e: u32) -> u32 {
        if i == TRUE_IDX {
            return t;
        }
        if i == FALSE_IDX {
            return e;
        }
        if t == e {
            return t;
        }
        if t == TRUE_IDX && e == FALSE_IDX {
            return i;
        }
        if let Some(&cached) = self.ite_cache.get(&(i, t, e)) {
            return cached;
        }
        let split = self.level(i).min(self.level(t)).min(self.level(e));
        debug_assert!(split < self.num_vars);
        let lo = {
            let (i0, t0, e0) = (
                self.cofactor(i, split, false),
                self.cofactor(t, split, false),
                self.cofactor(e, split, false),
            );
            self.ite(i0, t0, e0)
        };
        let hi = {
            let (i1, t1, e1) = (
                self.cofactor(i, split, true),
                self.cofactor(t, split, true),
                self.cofactor(e, split, true),
            );
            self.ite(i1, t1, e1)
        };
        let result = self.mk_node(split, lo, hi);
        self.ite_cache.insert((i, t, e), result);
        result
    }

    pub fn not(&mut self, f: Formula) -> Formula {
        Formula(self.ite(f.0, FALSE_IDX, TRUE_IDX))
    }

    pub fn and(&mut self, a: Formula, b: Formula) -> Formula {
        Formula(self.ite(a.0, b.0, FALSE_IDX))
    }

    pub fn or(&mut self, a: Formula, b: Formula) -> Formula {
        Formula(self.ite(a.0, TRUE_IDX, b.0))
    }

    pub fn implies(&mut self, a: Formula, b: Formula) -> Formula {
        Formula(self.ite(a.0, b.0, TRUE_IDX))
    }

    /// `a AND NOT b`, a common step in the encodings.
    pub fn and_not(&mut self, a: Formula, b: Formula) -> Formula {
        let nb = self.not(b);
        self.and(a, nb)
    }

    /// N-ary combination. `Not` takes exactly one operand, `Implies` exactly
    /// two; `And`/`Or` fold over any number (empty folds give the unit).
    pub fn combine(&mut self, op: BoolOp, operands: &[Formula]) -> Formula {
        match op {
            BoolOp::Not => {
                assert_eq!(operands.len(), 1, "NOT takes exactly one operand");
                self.not(operands[0])
            }
            BoolOp::Implies => {
                assert_eq!(operands.len(), 2, "IMPLIES takes exactly two operands");
                self.implies(operands[0], operands[1])
            }
            BoolOp::And => {
                let mut acc = self.mk_true();
                for &f in operands {
                    acc = self.and(acc, f);
                }
                acc
            }
            BoolOp::Or => {
                let mut acc = self.mk_false();
                for &f in operands {
                    acc = self.or(acc, f);
                }
                acc
            }
        }
    }

    pub fn eval(&self, f: Formula, assignment: &Assignment) -> bool {
        assert_eq!(assignment.num_vars(), self.num_vars);
        let mut idx = f.0;
        while idx != FALSE_IDX && idx != TRUE_IDX {
            let node = self.nodes[idx as usize];
            idx = if assignment.get(node.var) {
                node.hi
            } else {
                node.lo
            };
        }
        idx == TRUE_IDX
    }

    /// Evaluate `f` with mutant `m` true and every other variable false.
    pub fn eval_singleton(&self, f: Formula, m: MutantId) -> Result<bool, FormulaError> {
        if m.0 >= self.num_vars {
            return Err(FormulaError::UnknownVariable(m.0, self.num_vars));
        }
        Ok(self.eval(f, &Assignment::singleton(self.num_vars, m)))
    }

    pub fn is_sat(&self, f: Formula) -> bool {
        !f.is_false()
    }

    /// Exact model count over the full universe.
    pub fn count_models(&self, f: Formula) -> BigUint {
        let mut memo: HashMap<u32, BigUint> = HashMap::new();
        let sub = self.count_rel(f.0, &mut memo);
        sub << self.level(f.0) as usize
    }

    /// Models over the variable suffix starting at the node's own level.
    fn count_rel(&self, idx: u32, memo: &mut HashMap<u32, BigUint>) -> BigUint {
        if idx == FALSE_IDX {
            return BigUint::from(0u32);
        }
        if idx == TRUE_IDX {
            return BigUint::from(1u32);
        }
        if let Some(c) = memo.get(&idx) {
            return c.clone();
        }
        let node = self.nodes[idx as usize];
        let lo = self.count_rel(node.lo, memo) << (self.level(node.lo) - node.var - 1) as usize;
        let hi = self.count_rel(node.hi, memo) << (self.level(node.hi) - node.var - 1) as usize;
        let total = lo + hi;
        memo.insert(idx, total.clone());
        total
    }

    /// All satisfying assignments in lexicographic order by variable index
    /// (false before true).
    pub fn enumerate_models(&self, f: Formula) -> ModelIter<'_> {
        ModelIter {
            store: self,
            current: Assignment::all_false(self.num_vars),
            stack: vec![Frame {
                node: f.0,
                level: 0,
                next_value: Some(false),
            }],
        }
    }

    /// Solve-and-block enumeration: repeatedly take the least model and
    /// conjoin its negation. Produces the same sequence as
    /// [`enumerate_models`](Self::enumerate_models); kept as the alternative
    /// strategy behind the same interface.
    pub fn enumerate_models_blocking(&mut self, f: Formula) -> Vec<Assignment> {
        let mut models = Vec::new();
        let mut remaining = f;
        while let Some(model) = self.first_model(remaining) {
            let minterm = self.minterm(&model);
            remaining = self.and_not(remaining, minterm);
            models.push(model);
        }
        models
    }

    fn first_model(&self, f: Formula) -> Option<Assignment> {
        if f.is_false() {
            return None;
        }
        let mut assignment = Assignment::all_false(self.num_vars);
        let mut idx = f.0;
        for var in 0..self.num_vars {
            let lo = self.cofactor(idx, var, false);
            if lo == FALSE_IDX {
                assignment.set(var, true);
                idx = self.cofactor(idx, var, true);
            } else {
                idx = lo;
            }
        }
        debug_assert_eq!(idx, TRUE_IDX);
        Some(assignment)
    }

    /// Conjunction of literals pinning every variable to the assignment.
    pub fn minterm(&mut self, assignment: &Assignment) -> Formula {
        // Built from the bottom so each mk_node sees ordered children.
        let mut acc = TRUE_IDX;
        for var in (0..self.num_vars).rev() {
            acc = if assignment.get(var) {
                self.mk_node(var, FALSE_IDX, acc)
            } else {
                self.mk_node(var, acc, FALSE_IDX)
            };
        }
        Formula(acc)
    }

    /// Formula satisfied exactly by assignments with at least `k` true
    /// variables.
    pub fn at_least_k(&mut self, k: u32) -> Formula {
        assert!(k <= self.num_vars, "threshold exceeds universe size");
        let mut memo = HashMap::new();
        let idx = self.at_least_rec(0, k, &mut memo);
        Formula(idx)
    }

    fn at_least_rec(&mut self, var: u32, need: u32, memo: &mut HashMap<(u32, u32), u32>) -> u32 {
        if need == 0 {
            return TRUE_IDX;
        }
        if self.num_vars - var < need {
            return FALSE_IDX;
        }
        if let Some(&idx) = memo.get(&(var, need)) {
            return idx;
        }
        let lo = self.at_least_rec(var + 1, need, memo);
        let hi = self.at_least_rec(var + 1, need - 1, memo);
        let idx = self.mk_node(var, lo, hi);
        memo.insert((var, need), idx);
        idx
    }

    /// Variables the formula actually depends on.
    pub fn support(&self, f: Formula) -> BTreeSet<MutantId> {
        let mut seen = BTreeSet::new();
        let mut vars = BTreeSet::new();
        let mut stack = vec![f.0];
        while let Some(idx) = stack.pop() {
            if idx == FALSE_IDX || idx == TRUE_IDX || !seen.insert(idx) {
                continue;
            }
            let node = self.nodes[idx as usize];
            vars.insert(MutantId(node.var));
            stack.push(node.lo);
            stack.push(node.hi);
        }
        vars
    }

    // ------------------------------------------------------------------
    // Textual infix form
    // ------------------------------------------------------------------

    /// Render as an irredundant sum of products with variables `m<k>`,
    /// e.g. `m0 | m1` or `m0 & !m1`. Constants render as `true` / `false`.
    pub fn to_infix(&mut self, f: Formula) -> String {
        if f.is_false() {
            return "false".to_string();
        }
        if f.is_true() {
            return "true".to_string();
        }
        let mut memo = HashMap::new();
        let cubes = self.isop(f.0, f.0, &mut memo);
        debug_assert!(!cubes.is_empty());
        let rendered: Vec<String> = cubes
            .iter()
            .map(|cube| {
                cube.iter()
                    .map(|&(var, positive)| {
                        if positive {
                            format!("m{var}")
                        } else {
                            format!("!m{var}")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" & ")
            })
            .collect();
        rendered.join(" | ")
    }

    /// Minato-Morreale irredundant sum-of-products between lower bound `l`
    /// and upper bound `u`. Cubes are (variable, polarity) lists sorted by
    /// variable.
    fn isop(&mut self, l: u32, u: u32, memo: &mut IsopMemo) -> Vec<Cube> {
        if l == FALSE_IDX {
            return Vec::new();
        }
        if u == TRUE_IDX {
            return vec![Vec::new()];
        }
        if let Some(cached) = memo.get(&(l, u)) {
            return cached.clone();
        }
        let v = self.level(l).min(self.level(u));
        let (l0, l1) = (self.cofactor(l, v, false), self.cofactor(l, v, true));
        let (u0, u1) = (self.cofactor(u, v, false), self.cofactor(u, v, true));

        let need_neg = self.and_not(Formula(l0), Formula(u1));
        let cubes_neg = self.isop(need_neg.0, u0, memo);
        let need_pos = self.and_not(Formula(l1), Formula(u0));
        let cubes_pos = self.isop(need_pos.0, u1, memo);

        let cover_neg = self.cubes_to_formula(&cubes_neg);
        let cover_pos = self.cubes_to_formula(&cubes_pos);
        let rest0 = self.and_not(Formula(l0), cover_neg);
        let rest1 = self.and_not(Formula(l1), cover_pos);
        let rest_l = self.or(rest0, rest1);
        let rest_u = self.and(Formula(u0), Formula(u1));
        let cubes_free = self.isop(rest_l.0, rest_u.0, memo);

        let mut result = Vec::with_capacity(cubes_neg.len() + cubes_pos.len() + cubes_free.len());
        for cube in cubes_neg {
            let mut with_var = vec![(v, false)];
            with_var.extend(cube);
            result.push(with_var);
        }
        for cube in cubes_pos {
            let mut with_var = vec![(v, true)];
            with_var.extend(cube);
            result.push(with_var);
        }
        result.extend(cubes_free);
        memo.insert((l, u), result.clone());
        result
    }

    fn cubes_to_formula(&mut self, cubes: &[Cube]) -> Formula {
        let mut acc = self.mk_false();
        for cube in cubes {
            let mut term = TRUE_IDX;
            for &(var, positive) in cube.iter().rev() {
                term = if positive {
                    self.mk_node(var, FALSE_IDX, term)
                } else {
                    self.mk_node(var, term, FALSE_IDX)
                };
            }
            acc = self.or(acc, Formula(term));
        }
        acc
    }

    /// Parse the infix form produced by [`to_infix`](Self::to_infix).
    /// Grammar: `or := and ('|' and)*; and := unary ('&' unary)*;
    /// unary := '!' unary | 'true' | 'false' | m<digits> | '(' or ')'`.
    pub fn parse_infix(&mut self, text: &str) -> Result<Formula, FormulaError> {
        let mut parser = InfixParser {
            bytes: text.as_bytes(),
            pos: 0,
        };
        parser.skip_ws();
        let f = parser.parse_or(self)?;
        parser.skip_ws();
        if parser.pos != parser.bytes.len() {
            return Err(FormulaError::Parse {
                at: parser.pos,
                message: "trailing input".to_string(),
            });
        }
        Ok(f)
    }
}

/// Product term as (variable, polarity) literals sorted by variable.
type Cube = Vec<(u32, bool)>;
type IsopMemo = HashMap<(u32, u32), Vec<Cube>>;

struct Frame {
    node: u32,
    level: u32,
    next_value: Option<bool>,
}

/// Iterator over all models, lexicographic by variable index.
pub struct ModelIter<'s> {
    store: &'s FormulaStore,
    current: Assignment,
    stack: Vec<Frame>,
}

impl Iterator for ModelIter<'_> {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        while let Some(top) = self.stack.last_mut() {
            if top.node == FALSE_IDX {
                self.stack.pop();
                continue;
            }
            if top.level == self.store.num_vars {
                debug_assert_eq!(top.node, TRUE_IDX);
                let model = self.current.clone();
                self.stack.pop();
                return Some(model);
            }
            match top.next_value {
                Some(value) => {
                    top.next_value = if value { None } else { Some(true) };
                    let level = top.level;
                    let child = self.store.cofactor(top.node, level, value);
                    self.current.set(level, value);
                    self.stack.push(Frame {
                        node: child,
                        level: level + 1,
                        next_value: Some(false),
                    });
                }
                None => {
                    self.stack.pop();
                }
            }
        }
        None
    }
}

struct InfixParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl InfixParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, byte: u8) -> bool {
        self.skip_ws();
        if self.pos < self.bytes.len() && self.bytes[self.pos] == byte {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse_or(&mut self, store: &mut FormulaStore) -> Result<Formula, FormulaError> {
        let mut acc = self.parse_and(store)?;
        while self.eat(b'|') {
            let rhs = self.parse_and(store)?;
            acc = store.or(acc, rhs);
        }
        Ok(acc)
    }

    fn parse_and(&mut self, store: &mut FormulaStore) -> Result<Formula, FormulaError> {
        let mut acc = self.parse_unary(store)?;
        while self.eat(b'&') {
            let rhs = self.parse_unary(store)?;
            acc = store.and(acc, rhs);
        }
        Ok(acc)
    }

    fn parse_unary(&mut self, store: &mut FormulaStore) -> Result<Formula, FormulaError> {
        self.skip_ws();
        if self.eat(b'!') {
            let inner = self.parse_unary(store)?;
            return Ok(store.not(inner));
        }
        if self.eat(b'(') {
            let inner = self.parse_or(store)?;
            if !self.eat(b')') {
                return Err(FormulaError::Parse {
                    at: self.pos,
                    message: "expected ')'".to_string(),
                });
            }
            return Ok(inner);
        }
        self.skip_ws();
        let rest = &self.bytes[self.pos..];
        if rest.starts_with(b"true") {
            self.pos += 4;
            return Ok(store.mk_true());
        }
        if rest.starts_with(b"false") {
            self.pos += 5;
            return Ok(store.mk_false());
        }
        if rest.first() == Some(&b'm') {
            let mut end = 1;
            while end < rest.len() && rest[end].is_ascii_digit() {
                end += 1;
            }
            if end > 1 {
                let digits = std::str::from_utf8(&rest[1..end]).unwrap();
                let var: u32 = digits.parse().map_err(|_| FormulaError::Parse {
                    at: self.pos,
                    message: "variable index out of range".to_string(),
                })?;
                self.pos += end;
                return store.var(MutantId(var));
            }
        }
        Err(FormulaError::Parse {
            at: self.pos,
            message: "expected '!', '(', 'true', 'false', or m<k>".to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_var_store() -> (FormulaStore, Formula, Formula) {
        let mut store = FormulaStore::new(2);
        let m0 = store.var(MutantId(0)).unwrap();
        let m1 = store.var(MutantId(1)).unwrap();
        (store, m0, m1)
    }

    #[test]
    fn var_outside_universe_is_rejected() {
        let mut store = FormulaStore::new(2);
        assert_eq!(
            store.var(MutantId(2)),
            Err(FormulaError::UnknownVariable(2, 2))
        );
    }

    #[test]
    fn canonicity_commutes_and_double_negation() {
        let (mut store, m0, m1) = two_var_store();
        let ab = store.and(m0, m1);
        let ba = store.and(m1, m0);
        assert_eq!(ab, ba);
        let nn = store.not(m0);
        let back = store.not(nn);
        assert_eq!(back, m0);
        let contradiction = store.and_not(m0, m0);
        assert!(contradiction.is_false());
        let t = store.mk_false();
        let imp = store.implies(t, m1);
        assert!(imp.is_true());
    }

    #[test]
    fn eval_singleton_matches_worked_example_rows() {
        let (mut store, m0, m1) = two_var_store();
        let t1 = store.or(m0, m1);
        let t2 = store.and_not(m0, m1);
        let t3 = store.and_not(m1, m0);
        assert!(store.eval_singleton(t1, MutantId(0)).unwrap());
        assert!(store.eval_singleton(t1, MutantId(1)).unwrap());
        assert!(store.eval_singleton(t2, MutantId(0)).unwrap());
        assert!(!store.eval_singleton(t2, MutantId(1)).unwrap());
        assert!(!store.eval_singleton(t3, MutantId(0)).unwrap());
        assert!(store.eval_singleton(t3, MutantId(1)).unwrap());
        assert!(store.eval_singleton(store.mk_true(), MutantId(0)).unwrap());
    }

    #[test]
    fn model_counts() {
        let (mut store, m0, m1) = two_var_store();
        assert_eq!(store.count_models(store.mk_false()), BigUint::from(0u32));
        assert_eq!(store.count_models(store.mk_true()), BigUint::from(4u32));
        let disj = store.or(m0, m1);
        assert_eq!(store.count_models(disj), BigUint::from(3u32));
        let one = store.and_not(m0, m1);
        assert_eq!(store.count_models(one), BigUint::from(1u32));
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        let (mut store, m0, m1) = two_var_store();
        let disj = store.or(m0, m1);
        let models: Vec<_> = store.enumerate_models(disj).collect();
        assert_eq!(models.len(), 3);
        let as_bits: Vec<Vec<bool>> = models
            .iter()
            .map(|a| (0..2).map(|v| a.get(v)).collect())
            .collect();
        assert_eq!(
            as_bits,
            vec![
                vec![false, true],
                vec![true, false],
                vec![true, true],
            ]
        );
        let conj = store.and(m0, m1);
        let models: Vec<_> = store.enumerate_models(conj).collect();
        assert_eq!(models.len(), 1);
        assert!(models[0].get(0) && models[0].get(1));
        assert_eq!(store.enumerate_models(store.mk_false()).count(), 0);
    }

    #[test]
    fn blocking_enumeration_agrees_with_allsat() {
        let (mut store, m0, m1) = two_var_store();
        let disj = store.or(m0, m1);
        let walked: Vec<_> = store.enumerate_models(disj).collect();
        let blocked = store.enumerate_models_blocking(disj);
        assert_eq!(walked, blocked);
    }

    #[test]
    fn at_least_k_counts() {
        let mut store = FormulaStore::new(3);
        assert!(store.at_least_k(0).is_true());
        let two_of_three = store.at_least_k(2);
        // C(3,2) + C(3,3)
        assert_eq!(store.count_models(two_of_three), BigUint::from(4u32));

        let mut pair_store = FormulaStore::new(2);
        let both = pair_store.at_least_k(2);
        let m0 = pair_store.var(MutantId(0)).unwrap();
        let m1 = pair_store.var(MutantId(1)).unwrap();
        let expected = pair_store.and(m0, m1);
        assert_eq!(both, expected);
    }

    #[test]
    fn infix_rendering_uses_minimal_cubes() {
        let (mut store, m0, m1) = two_var_store();
        let disj = store.or(m0, m1);
        assert_eq!(store.to_infix(disj), "m0 | m1");
        let only_first = store.and_not(m0, m1);
        assert_eq!(store.to_infix(only_first), "m0 & !m1");
        let only_second = store.and_not(m1, m0);
        assert_eq!(store.to_infix(only_second), "!m0 & m1");
        assert_eq!(store.to_infix(store.mk_true()), "true");
        assert_eq!(store.to_infix(store.mk_false()), "false");
    }

    #[test]
    fn infix_round_trip() {
        let (mut store, m0, m1) = two_var_store();
        let f = store.and_not(m0, m1);
        let text = store.to_infix(f);
        let parsed = store.parse_infix(&text).unwrap();
        assert_eq!(parsed, f);
        let with_parens = store.parse_infix("(m0 | m1) & !m0").unwrap();
        let expected = store.and_not(m1, m0);
        assert_eq!(with_parens, expected);
        assert!(store.parse_infix("m0 |").is_err());
        assert!(store.parse_infix("m7").is_err());
    }

    #[test]
    fn support_reports_dependencies() {
        let (mut store, m0, m1) = two_var_store();
        let f = store.or(m0, m1);
        let support = store.support(f);
        assert_eq!(
            support.into_iter().collect::<Vec<_>>(),
            vec![MutantId(0), MutantId(1)]
        );
        // `m0 | !m0` collapses to true, so no support.
        let nm0 = store.not(m0);
        let taut = store.or(m0, nm0);
        assert!(store.support(taut).is_empty());
    }

    proptest::proptest! {
        /// Random formula ASTs over 10 variables: the diagram's model set
        /// must agree exactly with a truth-table oracle, counts included,
        /// and the infix dump must round-trip.
        #[test]
        fn models_agree_with_truth_table(ast in arb_expr(4, 10)) {
            let mut store = FormulaStore::new(10);
            let f = build(&mut store, &ast);

            let mut expected = Vec::new();
            for bits in 0u32..1024 {
                let mut a = Assignment::all_false(10);
                for v in 0..10 {
                    a.set(v, bits >> v & 1 == 1);
                }
                if eval_ast(&ast, &a) {
                    expected.push(a);
                }
            }
            let mut enumerated: Vec<_> = store.enumerate_models(f).collect();
            enumerated.sort();
            let mut expected_sorted = expected.clone();
            expected_sorted.sort();
            proptest::prop_assert_eq!(&enumerated, &expected_sorted);
            proptest::prop_assert_eq!(
                store.count_models(f),
                BigUint::from(expected.len())
            );

            let text = store.to_infix(f);
            let reparsed = store.parse_infix(&text).unwrap();
            proptest::prop_assert_eq!(reparsed, f);

            let blocked = store.enumerate_models_blocking(f);
            let walked: Vec<_> = store.enumerate_models(f).collect();
            proptest::prop_assert_eq!(blocked, walked);
        }
    }

    #[derive(Debug, Clone)]
    enum Ast {
        Var(u32),
        Const(bool),
        Not(Box<Ast>),
        And(Box<Ast>, Box<Ast>),
        Or(Box<Ast>, Box<Ast>),
    }

    fn arb_expr(depth: u32, vars: u32) -> impl proptest::strategy::Strategy<Value = Ast> {
        use proptest::prelude::*;
        let leaf = prop_oneof![
            (0..vars).prop_map(Ast::Var),
            any::<bool>().prop_map(Ast::Const),
        ];
        leaf.prop_recursive(depth, 32, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Ast::Not(Box::new(e))),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Ast::And(Box::new(a), Box::new(b))),
                (inner.clone(), inner).prop_map(|(a, b)| Ast::Or(Box::new(a), Box::new(b))),
            ]
        })
    }

    fn build(store: &mut FormulaStore, ast: &Ast) -> Formula {
        match ast {
            Ast::Var(v) => store.var(MutantId(*v)).unwrap(),
            Ast::Const(true) => store.mk_true(),
            Ast::Const(false) => store.mk_false(),
            Ast::Not(inner) => {
                let f = build(store, inner);
                store.not(f)
            }
            Ast::And(a, b) => {
                let fa = build(store, a);
                let fb = build(store, b);
                store.and(fa, fb)
            }
            Ast::Or(a, b) => {
                let fa = build(store, a);
                let fb = build(store, b);
                store.or(fa, fb)
            }
        }
    }

    fn eval_ast(ast: &Ast, a: &Assignment) -> bool {
        match ast {
            Ast::Var(v) => a.get(*v),
            Ast::Const(b) => *b,
            Ast::Not(inner) => !eval_ast(inner, a),
            Ast::And(l, r) => eval_ast(l, a) && eval_ast(r, a),
            Ast::Or(l, r) => eval_ast(l, a) || eval_ast(r, a),
        }
    }
}
