//! Concrete interpreter: deterministic single-test execution with a step
//! bound, plus coverage tracking of mutable-expression locations.
//!
//! Step accounting: one step per statement evaluation, plus one per loop
//! iteration (the re-evaluation of a `while` condition). Reaching the bound
//! terminates the run with `StepBoundExceeded`. The variational interpreter
//! mirrors this accounting exactly so that both report identical outcomes
//! for every mutant selection.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{
    mutation_points, BinOp, Expr, Function, Location, Pos, Program, Stmt, TestCase, UnaryOp,
};

/// Statement-evaluation budget per test run.
pub const DEFAULT_STEP_BOUND: u64 = 1_000_000;

/// Call frames allowed before a runtime error.
pub const MAX_CALL_DEPTH: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TestStatus {
    Pass,
    Fail,
    RuntimeError,
    StepBoundExceeded,
}

impl TestStatus {
    /// Whether this outcome counts as detecting (killing) a mutant.
    pub fn is_kill(self) -> bool {
        !matches!(self, TestStatus::Pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestOutcome {
    pub status: TestStatus,
    pub steps_executed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Value {
    Int(i64),
    Bool(bool),
}

impl Value {
    fn as_int(self) -> i64 {
        match self {
            Value::Int(v) => v,
            Value::Bool(_) => unreachable!("type checker admitted bool where int expected"),
        }
    }

    fn as_bool(self) -> bool {
        match self {
            Value::Bool(v) => v,
            Value::Int(_) => unreachable!("type checker admitted int where bool expected"),
        }
    }
}

/// Apply a binary operator to concrete operands. `None` models division or
/// modulo by zero. Shared with the variational interpreter.
pub(crate) fn apply_binop(op: BinOp, lhs: Value, rhs: Value) -> Option<Value> {
    Some(match op {
        BinOp::Add => Value::Int(lhs.as_int().wrapping_add(rhs.as_int())),
        BinOp::Sub => Value::Int(lhs.as_int().wrapping_sub(rhs.as_int())),
        BinOp::Mul => Value::Int(lhs.as_int().wrapping_mul(rhs.as_int())),
        BinOp::Div => {
            let d = rhs.as_int();
            if d == 0 {
                return None;
            }
            Value::Int(lhs.as_int().wrapping_div(d))
        }
        BinOp::Mod => {
            let d = rhs.as_int();
            if d == 0 {
                return None;
            }
            Value::Int(lhs.as_int().wrapping_rem(d))
        }
        BinOp::Eq => Value::Bool(lhs.as_int() == rhs.as_int()),
        BinOp::Ne => Value::Bool(lhs.as_int() != rhs.as_int()),
        BinOp::Lt => Value::Bool(lhs.as_int() < rhs.as_int()),
        BinOp::Gt => Value::Bool(lhs.as_int() > rhs.as_int()),
        BinOp::Le => Value::Bool(lhs.as_int() <= rhs.as_int()),
        BinOp::Ge => Value::Bool(lhs.as_int() >= rhs.as_int()),
        BinOp::And | BinOp::Or => unreachable!("logical operators are short-circuited"),
    })
}

/// Run a test against a pristine (choice-free) program.
pub fn run(program: &Program, test: &TestCase, step_bound: u64) -> TestOutcome {
    run_inner(program, test, step_bound, None, None)
}

/// Run a test against a woven metaprogram base, resolving each choice point
/// against `selection` (guard indices of enabled mutants). Behaviorally
/// identical to instantiating the selection and running the result.
pub fn run_selection(
    program: &Program,
    test: &TestCase,
    step_bound: u64,
    selection: &BTreeSet<u32>,
) -> TestOutcome {
    run_inner(program, test, step_bound, Some(selection), None)
}

/// Evaluate one function call on a pristine program and return its value,
/// or the error-ish status (`Fail` never occurs here).
pub fn call_function(
    program: &Program,
    name: &str,
    args: &[Value],
    step_bound: u64,
) -> Result<Value, TestStatus> {
    let functions: HashMap<&str, &Function> = program
        .units
        .iter()
        .flat_map(|u| u.functions.iter())
        .map(|f| (f.name.as_str(), f))
        .collect();
    let function = *functions.get(name).expect("call target exists");
    assert_eq!(function.params.len(), args.len());
    let mut interp = Interp {
        functions,
        step_bound,
        steps: 0,
        depth: 0,
        selection: None,
        coverage: None,
    };
    let mut env: Env = function
        .params
        .iter()
        .zip(args)
        .map(|(p, v)| (p.name.clone(), *v))
        .collect();
    match interp.exec_block(&function.body, &mut env) {
        Ok(Flow::Returned(value)) => Ok(value),
        Ok(Flow::Normal) => unreachable!("type checker guarantees all paths return"),
        Err(Abort::AssertFailed) => unreachable!("no asserts inside functions"),
        Err(Abort::RuntimeError) => Err(TestStatus::RuntimeError),
        Err(Abort::StepBound) => Err(TestStatus::StepBoundExceeded),
    }
}

/// Coverage of a single test: the mutable-expression locations it reaches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coverage {
    pub locations: BTreeSet<Location>,
    /// Outcome of the instrumented run; on error or bound exhaustion the
    /// location set is the partial coverage up to that point.
    pub outcome: TestOutcome,
}

/// Execute the test on the unmutated program, recording every
/// mutable-expression location evaluated at least once.
pub fn coverage(program: &Program, test: &TestCase, step_bound: u64) -> Coverage {
    let lookup: HashMap<Pos, Location> = mutation_points(program)
        .into_iter()
        .map(|p| (p.pos, p.location))
        .collect();
    let mut sink = BTreeSet::new();
    let empty = BTreeSet::new();
    // Choice points, if present, resolve to their original arms.
    let outcome = run_inner(
        program,
        test,
        step_bound,
        Some(&empty),
        Some((&lookup, &mut sink)),
    );
    Coverage {
        locations: sink,
        outcome,
    }
}

fn run_inner(
    program: &Program,
    test: &TestCase,
    step_bound: u64,
    selection: Option<&BTreeSet<u32>>,
    coverage: Option<(&HashMap<Pos, Location>, &mut BTreeSet<Location>)>,
) -> TestOutcome {
    assert!(step_bound > 0, "step bound must be positive");
    let functions: HashMap<&str, &Function> = program
        .units
        .iter()
        .flat_map(|u| u.functions.iter())
        .map(|f| (f.name.as_str(), f))
        .collect();
    let mut interp = Interp {
        functions,
        step_bound,
        steps: 0,
        depth: 0,
        selection,
        coverage,
    };
    let mut env = HashMap::new();
    let status = match interp.exec_block(&test.body, &mut env) {
        Ok(Flow::Normal) => TestStatus::Pass,
        Ok(Flow::Returned(_)) => unreachable!("type checker rejects return in tests"),
        Err(Abort::AssertFailed) => TestStatus::Fail,
        Err(Abort::RuntimeError) => TestStatus::RuntimeError,
        Err(Abort::StepBound) => TestStatus::StepBoundExceeded,
    };
    TestOutcome {
        status,
        steps_executed: interp.steps,
    }
}

enum Abort {
    AssertFailed,
    RuntimeError,
    StepBound,
}

enum Flow {
    Normal,
    Returned(Value),
}

type Env = HashMap<String, Value>;

struct Interp<'p> {
    functions: HashMap<&'p str, &'p Function>,
    step_bound: u64,
    steps: u64,
    depth: usize,
    selection: Option<&'p BTreeSet<u32>>,
    coverage: Option<(&'p HashMap<Pos, Location>, &'p mut BTreeSet<Location>)>,
}

impl<'p> Interp<'p> {
    fn tick(&mut self) -> Result<(), Abort> {
        self.steps += 1;
        if self.steps >= self.step_bound {
            Err(Abort::StepBound)
        } else {
            Ok(())
        }
    }

    fn exec_block(&mut self, stmts: &'p [Stmt], env: &mut Env) -> Result<Flow, Abort> {
        for stmt in stmts {
            if let Flow::Returned(v) = self.exec_stmt(stmt, env)? {
                return Ok(Flow::Returned(v));
            }
        }
        Ok(Flow::Normal)
    }

    fn exec_stmt(&mut self, stmt: &'p Stmt, env: &mut Env) -> Result<Flow, Abort> {
        self.tick()?;
        match stmt {
            Stmt::Let { name, value, .. } | Stmt::Assign { name, value, .. } => {
                let v = self.eval(value, env)?;
                match env.get_mut(name) {
                    Some(slot) => *slot = v,
                    None => {
                        env.insert(name.clone(), v);
                    }
                }
                Ok(Flow::Normal)
            }
            Stmt::If {
                cond,
                then_body,
                else_body,
                ..
            } => {
                if self.eval(cond, env)?.as_bool() {
                    self.exec_block(then_body, env)
                } else {
                    self.exec_block(else_body, env)
                }
            }
            Stmt::While { cond, body, .. } => {
                loop {
                    if !self.eval(cond, env)?.as_bool() {
                        break;
                    }
                    if let Flow::Returned(v) = self.exec_block(body, env)? {
                        return Ok(Flow::Returned(v));
                    }
                    self.tick()?;
                }
                Ok(Flow::Normal)
            }
            Stmt::Return { value, .. } => {
                let v = self.eval(value, env)?;
                Ok(Flow::Returned(v))
            }
            Stmt::Assert { cond, .. } => {
                if self.eval(cond, env)?.as_bool() {
                    Ok(Flow::Normal)
                } else {
                    Err(Abort::AssertFailed)
                }
            }
            Stmt::Call { expr, .. } => {
                self.eval(expr, env)?;
                Ok(Flow::Normal)
            }
        }
    }

    fn eval(&mut self, expr: &'p Expr, env: &mut Env) -> Result<Value, Abort> {
        match expr {
            Expr::IntLit { value, .. } => Ok(Value::Int(*value)),
            Expr::BoolLit { value, .. } => Ok(Value::Bool(*value)),
            Expr::Var { name, .. } => Ok(*env
                .get(name)
                .unwrap_or_else(|| unreachable!("type checker admitted undefined `{name}`"))),
            Expr::Unary { op, operand, .. } => {
                let v = self.eval(operand, env)?;
                Ok(match op {
                    UnaryOp::Neg => Value::Int(v.as_int().wrapping_neg()),
                    UnaryOp::Not => Value::Bool(!v.as_bool()),
                })
            }
            Expr::Binary { op, lhs, rhs, pos } => {
                if let Some((lookup, sink)) = self.coverage.as_mut() {
                    if let Some(location) = lookup.get(pos) {
                        sink.insert(location.clone());
                    }
                }
                match op {
                    BinOp::And => {
                        if !self.eval(lhs, env)?.as_bool() {
                            Ok(Value::Bool(false))
                        } else {
                            self.eval(rhs, env)
                        }
                    }
                    BinOp::Or => {
                        if self.eval(lhs, env)?.as_bool() {
                            Ok(Value::Bool(true))
                        } else {
                            self.eval(rhs, env)
                        }
                    }
                    _ => {
                        let l = self.eval(lhs, env)?;
                        let r = self.eval(rhs, env)?;
                        apply_binop(*op, l, r).ok_or(Abort::RuntimeError)
                    }
                }
            }
            Expr::Call { callee, args, .. } => {
                let mut values = Vec::with_capacity(args.len());
                for arg in args {
                    values.push(self.eval(arg, env)?);
                }
                let function = self.functions[callee.as_str()];
                if self.depth >= MAX_CALL_DEPTH {
                    return Err(Abort::RuntimeError);
                }
                self.depth += 1;
                let mut callee_env: Env = function
                    .params
                    .iter()
                    .zip(values)
                    .map(|(p, v)| (p.name.clone(), v))
                    .collect();
                let flow = self.exec_block(&function.body, &mut callee_env)?;
                self.depth -= 1;
                match flow {
                    Flow::Returned(v) => Ok(v),
                    Flow::Normal => unreachable!("type checker guarantees all paths return"),
                }
            }
            Expr::Choice {
                guard,
                mutated,
                original,
            } => match self.selection {
                Some(selection) if selection.contains(guard) => self.eval(mutated, env),
                Some(_) => self.eval(original, env),
                None => panic!("unresolved choice point in concrete run (instantiate first)"),
            },
        }
    }
}
