//! Parser and concrete interpreter for the subject language.
//!
//! A program is a sequence of `unit` blocks holding functions, followed by
//! `test` blocks. The language is deterministic by construction: `int` is
//! 64-bit two's-complement with wrapping overflow, division and modulo by
//! zero are runtime errors, there is no I/O and no randomness. The full
//! grammar ships as `docs/grammar.ebnf`.

mod interp;
mod lexer;
mod parser;
mod typecheck;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use interp::{
    call_function, coverage, run, run_selection, Coverage, TestOutcome, TestStatus, Value,
    DEFAULT_STEP_BOUND, MAX_CALL_DEPTH,
};
pub(crate) use interp::apply_binop;

/// Source position, 1-based.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl std::fmt::Display for Pos {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Type {
    Int,
    Bool,
}

impl std::fmt::Display for Type {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Type::Int => write!(f, "int"),
            Type::Bool => write!(f, "bool"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Program {
    pub units: Vec<Unit>,
    pub tests: Vec<TestCase>,
    /// Hex SHA-256 of the source text this program was parsed from. Mutant
    /// catalogs are keyed against it.
    pub source_digest: String,
}

#[derive(Debug, Clone)]
pub struct Unit {
    pub name: String,
    pub functions: Vec<Function>,
    pub pos: Pos,
}

#[derive(Debug, Clone)]
pub struct Function {
    pub name: String,
    pub params: Vec<Param>,
    pub return_type: Type,
    pub body: Vec<Stmt>,
    pub pos: Pos,
}

#[derive(Debug, Clone)]
pub struct Param {
    pub name: String,
    pub ty: Type,
}

#[derive(Debug, Clone)]
pub struct TestCase {
    pub id: String,
    pub body: Vec<Stmt>,
    pub pos: Pos,
}

#[derive(Debug, Clone)]
pub enum Stmt {
    Let {
        name: String,
        ty: Option<Type>,
        value: Expr,
        pos: Pos,
    },
    Assign {
        name: String,
        value: Expr,
        pos: Pos,
    },
    If {
        cond: Expr,
        then_body: Vec<Stmt>,
        else_body: Vec<Stmt>,
        pos: Pos,
    },
    While {
        cond: Expr,
        body: Vec<Stmt>,
        pos: Pos,
    },
    Return {
        value: Expr,
        pos: Pos,
    },
    Assert {
        cond: Expr,
        pos: Pos,
    },
    /// Call in statement position, result discarded.
    Call {
        expr: Expr,
        pos: Pos,
    },
}

#[derive(Debug, Clone)]
pub enum Expr {
    IntLit {
        value: i64,
        pos: Pos,
    },
    BoolLit {
        value: bool,
        pos: Pos,
    },
    Var {
        name: String,
        pos: Pos,
    },
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
        pos: Pos,
    },
    /// `pos` is the operator token's position; it identifies the mutation
    /// point this expression corresponds to.
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
        pos: Pos,
    },
    Call {
        callee: String,
        args: Vec<Expr>,
        pos: Pos,
    },
    /// A guarded mutation choice point, present only in woven metaprograms.
    /// `guard` is a mutant option index; when the guard is selected the
    /// mutated arm applies, otherwise the original one.
    Choice {
        guard: u32,
        mutated: Box<Expr>,
        original: Box<Expr>,
    },
}

impl Expr {
    pub fn pos(&self) -> Pos {
        match self {
            Expr::IntLit { pos, .. }
            | Expr::BoolLit { pos, .. }
            | Expr::Var { pos, .. }
            | Expr::Unary { pos, .. }
            | Expr::Binary { pos, .. }
            | Expr::Call { pos, .. } => *pos,
            Expr::Choice { original, .. } => original.pos(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    And,
    Or,
}

/// Token class of a binary operator; each class is one mutation-operator
/// family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpClass {
    Arithmetic,
    Relational,
    Logical,
}

impl BinOp {
    pub fn class(self) -> OpClass {
        match self {
            BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod => OpClass::Arithmetic,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge => {
                OpClass::Relational
            }
            BinOp::And | BinOp::Or => OpClass::Logical,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::Le => "<=",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    pub fn from_token(token: &str) -> Option<BinOp> {
        Some(match token {
            "+" => BinOp::Add,
            "-" => BinOp::Sub,
            "*" => BinOp::Mul,
            "/" => BinOp::Div,
            "%" => BinOp::Mod,
            "==" => BinOp::Eq,
            "!=" => BinOp::Ne,
            "<" => BinOp::Lt,
            ">" => BinOp::Gt,
            "<=" => BinOp::Le,
            ">=" => BinOp::Ge,
            "&&" => BinOp::And,
            "||" => BinOp::Or,
            _ => return None,
        })
    }
}

/// Identity of a mutable expression: which unit and function it sits in and
/// its index among the function's mutable expressions in source order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Location {
    pub unit: String,
    pub function: String,
    pub ordinal: u32,
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}::{}#{}", self.unit, self.function, self.ordinal)
    }
}

/// A mutable expression occurrence: its location, the original operator, and
/// the operator token's source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutationPoint {
    pub location: Location,
    pub op: BinOp,
    pub pos: Pos,
}

/// All mutable-expression occurrences of the program's units, in global
/// source order (unit order, function order, operator position). Tests are
/// never mutation targets. Choice points in woven programs are traversed
/// through their original arm, so woven and pristine programs report the
/// same points.
pub fn mutation_points(program: &Program) -> Vec<MutationPoint> {
    let mut points = Vec::new();
    for unit in &program.units {
        for function in &unit.functions {
            let mut in_function: Vec<(Pos, BinOp)> = Vec::new();
            collect_block(&function.body, &mut in_function);
            in_function.sort_by_key(|(pos, _)| *pos);
            for (ordinal, (pos, op)) in in_function.into_iter().enumerate() {
                points.push(MutationPoint {
                    location: Location {
                        unit: unit.name.clone(),
                        function: function.name.clone(),
                        ordinal: ordinal as u32,
                    },
                    op,
                    pos,
                });
            }
        }
    }
    points
}

fn collect_block(stmts: &[Stmt], out: &mut Vec<(Pos, BinOp)>) {
    for stmt in stmts {
        match stmt {
            Stmt::Let { value, .. } | Stmt::Assign { value, .. } => collect_expr(value, out),
            Stmt::If {
                cond,
                then_body,
                else_body,
                ..
            } => {
                collect_expr(cond, out);
                collect_block(then_body, out);
                collect_block(else_body, out);
            }
            Stmt::While { cond, body, .. } => {
                collect_expr(cond, out);
                collect_block(body, out);
            }
            Stmt::Return { value, .. } => collect_expr(value, out),
            Stmt::Assert { cond, .. } => collect_expr(cond, out),
            Stmt::Call { expr, .. } => collect_expr(expr, out),
        }
    }
}

fn collect_expr(expr: &Expr, out: &mut Vec<(Pos, BinOp)>) {
    match expr {
        Expr::IntLit { .. } | Expr::BoolLit { .. } | Expr::Var { .. } => {}
        Expr::Unary { operand, .. } => collect_expr(operand, out),
        Expr::Binary { op, lhs, rhs, pos } => {
            out.push((*pos, *op));
            collect_expr(lhs, out);
            collect_expr(rhs, out);
        }
        Expr::Call { args, .. } => {
            for arg in args {
                collect_expr(arg, out);
            }
        }
        Expr::Choice { original, .. } => collect_expr(original, out),
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: u32, col: u32, message: String },
    #[error("resolution error at {line}:{col}: {message}")]
    Resolution { line: u32, col: u32, message: String },
    #[error("type error at {line}:{col}: {message}")]
    Type { line: u32, col: u32, message: String },
}

impl ParseError {
    pub(crate) fn syntax(pos: Pos, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            line: pos.line,
            col: pos.col,
            message: message.into(),
        }
    }

    pub(crate) fn resolution(pos: Pos, message: impl Into<String>) -> Self {
        ParseError::Resolution {
            line: pos.line,
            col: pos.col,
            message: message.into(),
        }
    }

    pub(crate) fn type_error(pos: Pos, message: impl Into<String>) -> Self {
        ParseError::Type {
            line: pos.line,
            col: pos.col,
            message: message.into(),
        }
    }
}

/// Parse, resolve, and type-check a source file.
pub fn parse(source: &str) -> Result<Program, ParseError> {
    let tokens = lexer::lex(source)?;
    let mut program = parser::parse_tokens(tokens)?;
    program.source_digest = hex_digest(source);
    typecheck::check(&program)?;
    Ok(program)
}

pub(crate) fn hex_digest(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
