//! Resolution and type checking.
//!
//! Rules: unit names and (program-wide) function names are unique; variables
//! are declared once per function and must be definitely defined on every
//! path reaching a use; all function paths return a value of the declared
//! type; relational operators take `int` operands only; `assert` and test
//! bodies are checked per test-case shape (at least one assert, body ends in
//! an assert, no `return`).

use std::collections::{BTreeSet, HashMap};

use super::{Expr, Function, OpClass, ParseError, Program, Stmt, Type, UnaryOp};

pub fn check(program: &Program) -> Result<(), ParseError> {
    let mut unit_names = BTreeSet::new();
    for unit in &program.units {
        if unit.name.is_empty() {
            return Err(ParseError::resolution(unit.pos, "empty unit name"));
        }
        if !unit_names.insert(unit.name.clone()) {
            return Err(ParseError::resolution(
                unit.pos,
                format!("duplicate unit name `{}`", unit.name),
            ));
        }
    }

    let mut functions: HashMap<&str, &Function> = HashMap::new();
    for unit in &program.units {
        for function in &unit.functions {
            if functions.insert(&function.name, function).is_some() {
                return Err(ParseError::resolution(
                    function.pos,
                    format!(
                        "duplicate function name `{}` (function names are unique program-wide)",
                        function.name
                    ),
                ));
            }
        }
    }

    for unit in &program.units {
        for function in &unit.functions {
            check_function(function, &functions)?;
        }
    }

    let mut test_ids = BTreeSet::new();
    for test in &program.tests {
        if !test_ids.insert(test.id.clone()) {
            return Err(ParseError::resolution(
                test.pos,
                format!("duplicate test id `{}`", test.id),
            ));
        }
        check_test(test, &functions)?;
    }
    Ok(())
}

struct Scope<'p> {
    functions: &'p HashMap<&'p str, &'p Function>,
    /// Every declaration in the current function or test, for duplicate
    /// detection and types.
    declared: HashMap<String, Type>,
    /// Names definitely defined on the current control-flow path.
    defined: BTreeSet<String>,
    /// Return type; None inside test bodies, where `return` is illegal.
    return_type: Option<Type>,
    in_test: bool,
}

fn check_function(
    function: &Function,
    functions: &HashMap<&str, &Function>,
) -> Result<(), ParseError> {
    let mut scope = Scope {
        functions,
        declared: HashMap::new(),
        defined: BTreeSet::new(),
        return_type: Some(function.return_type),
        in_test: false,
    };
    for param in &function.params {
        if scope
            .declared
            .insert(param.name.clone(), param.ty)
            .is_some()
        {
            return Err(ParseError::resolution(
                function.pos,
                format!("duplicate parameter `{}`", param.name),
            ));
        }
        scope.defined.insert(param.name.clone());
    }
    check_block(&function.body, &mut scope)?;
    if !block_returns(&function.body) {
        return Err(ParseError::type_error(
            function.pos,
            format!("not all paths of `{}` return a value", function.name),
        ));
    }
    Ok(())
}

fn check_test(
    test: &super::TestCase,
    functions: &HashMap<&str, &Function>,
) -> Result<(), ParseError> {
    let mut scope = Scope {
        functions,
        declared: HashMap::new(),
        defined: BTreeSet::new(),
        return_type: None,
        in_test: true,
    };
    check_block(&test.body, &mut scope)?;
    match test.body.last() {
        Some(Stmt::Assert { .. }) => Ok(()),
        _ => Err(ParseError::type_error(
            test.pos,
            format!("test `{}` must end in an assert statement", test.id),
        )),
    }
}

fn check_block(stmts: &[Stmt], scope: &mut Scope) -> Result<(), ParseError> {
    for stmt in stmts {
        check_stmt(stmt, scope)?;
    }
    Ok(())
}

fn check_stmt(stmt: &Stmt, scope: &mut Scope) -> Result<(), ParseError> {
    match stmt {
        Stmt::Let {
            name,
            ty,
            value,
            pos,
        } => {
            let value_ty = check_expr(value, scope)?;
            if let Some(annotated) = ty {
                if *annotated != value_ty {
                    return Err(ParseError::type_error(
                        *pos,
                        format!("`{name}` is annotated {annotated} but initialized with {value_ty}"),
                    ));
                }
            }
            if scope.declared.insert(name.clone(), value_ty).is_some() {
                return Err(ParseError::resolution(
                    *pos,
                    format!("duplicate declaration of `{name}` (one declaration per function)"),
                ));
            }
            scope.defined.insert(name.clone());
            Ok(())
        }
        Stmt::Assign { name, value, pos } => {
            if !scope.defined.contains(name) {
                return Err(ParseError::resolution(
                    *pos,
                    format!("assignment to `{name}`, which is not defined on this path"),
                ));
            }
            let declared_ty = scope.declared[name];
            let value_ty = check_expr(value, scope)?;
            if declared_ty != value_ty {
                return Err(ParseError::type_error(
                    *pos,
                    format!("cannot assign {value_ty} to `{name}` of type {declared_ty}"),
                ));
            }
            Ok(())
        }
        Stmt::If {
            cond,
            then_body,
            else_body,
            pos,
        } => {
            expect_type(cond, Type::Bool, scope, *pos)?;
            let before = scope.defined.clone();
            check_block(then_body, scope)?;
            let after_then = std::mem::replace(&mut scope.defined, before);
            check_block(else_body, scope)?;
            let after_else = std::mem::take(&mut scope.defined);
            scope.defined = after_then.intersection(&after_else).cloned().collect();
            Ok(())
        }
        Stmt::While { cond, body, pos } => {
            expect_type(cond, Type::Bool, scope, *pos)?;
            let before = scope.defined.clone();
            check_block(body, scope)?;
            // The body may run zero times.
            scope.defined = before;
            Ok(())
        }
        Stmt::Return { value, pos } => match scope.return_type {
            None => Err(ParseError::type_error(
                *pos,
                "`return` is not allowed in test bodies",
            )),
            Some(expected) => {
                let actual = check_expr(value, scope)?;
                if actual != expected {
                    return Err(ParseError::type_error(
                        *pos,
                        format!("returning {actual} from a function declared -> {expected}"),
                    ));
                }
                Ok(())
            }
        },
        Stmt::Assert { cond, pos } => {
            if !scope.in_test {
                return Err(ParseError::type_error(
                    *pos,
                    "`assert` is only allowed in test bodies",
                ));
            }
            expect_type(cond, Type::Bool, scope, *pos)
        }
        Stmt::Call { expr, pos } => match expr {
            Expr::Call { .. } => {
                check_expr(expr, scope)?;
                Ok(())
            }
            _ => Err(ParseError::type_error(
                *pos,
                "expression statements must be calls",
            )),
        },
    }
}

fn expect_type(
    expr: &Expr,
    expected: Type,
    scope: &mut Scope,
    pos: super::Pos,
) -> Result<(), ParseError> {
    let actual = check_expr(expr, scope)?;
    if actual != expected {
        return Err(ParseError::type_error(
            pos,
            format!("expected {expected}, found {actual}"),
        ));
    }
    Ok(())
}

fn check_expr(expr: &Expr, scope: &mut Scope) -> Result<Type, ParseError> {
    match expr {
        Expr::IntLit { .. } => Ok(Type::Int),
        Expr::BoolLit { .. } => Ok(Type::Bool),
        Expr::Var { name, pos } => {
            if scope.defined.contains(name) {
                Ok(scope.declared[name])
            } else if scope.declared.contains_key(name) {
                Err(ParseError::resolution(
                    *pos,
                    format!("`{name}` is not defined on every path reaching this use"),
                ))
            } else {
                Err(ParseError::resolution(
                    *pos,
                    format!("undefined variable `{name}`"),
                ))
            }
        }
        Expr::Unary { op, operand, pos } => {
            let inner = check_expr(operand, scope)?;
            match op {
                UnaryOp::Neg if inner == Type::Int => Ok(Type::Int),
                UnaryOp::Not if inner == Type::Bool => Ok(Type::Bool),
                UnaryOp::Neg => Err(ParseError::type_error(*pos, "unary `-` requires int")),
                UnaryOp::Not => Err(ParseError::type_error(*pos, "`!` requires bool")),
            }
        }
        Expr::Binary { op, lhs, rhs, pos } => {
            let lt = check_expr(lhs, scope)?;
            let rt = check_expr(rhs, scope)?;
            match op.class() {
                OpClass::Arithmetic => {
                    if lt == Type::Int && rt == Type::Int {
                        Ok(Type::Int)
                    } else {
                        Err(ParseError::type_error(
                            *pos,
                            format!("`{}` requires int operands", op.token()),
                        ))
                    }
                }
                OpClass::Relational => {
                    if lt == Type::Int && rt == Type::Int {
                        Ok(Type::Bool)
                    } else {
                        Err(ParseError::type_error(
                            *pos,
                            format!("`{}` requires int operands", op.token()),
                        ))
                    }
                }
                OpClass::Logical => {
                    if lt == Type::Bool && rt == Type::Bool {
                        Ok(Type::Bool)
                    } else {
                        Err(ParseError::type_error(
                            *pos,
                            format!("`{}` requires bool operands", op.token()),
                        ))
                    }
                }
            }
        }
        Expr::Call { callee, args, pos } => {
            let function = scope.functions.get(callee.as_str()).ok_or_else(|| {
                ParseError::resolution(*pos, format!("call to undefined function `{callee}`"))
            })?;
            if args.len() != function.params.len() {
                return Err(ParseError::type_error(
                    *pos,
                    format!(
                        "`{callee}` takes {} arguments, {} given",
                        function.params.len(),
                        args.len()
                    ),
                ));
            }
            for (arg, param) in args.iter().zip(&function.params) {
                let arg_ty = check_expr(arg, scope)?;
                if arg_ty != param.ty {
                    return Err(ParseError::type_error(
                        arg.pos(),
                        format!(
                            "argument `{}` of `{callee}` expects {}, found {arg_ty}",
                            param.name, param.ty
                        ),
                    ));
                }
            }
            Ok(function.return_type)
        }
        Expr::Choice {
            mutated, original, ..
        } => {
            let mutated_ty = check_expr(mutated, scope)?;
            let original_ty = check_expr(original, scope)?;
            debug_assert_eq!(mutated_ty, original_ty);
            Ok(original_ty)
        }
    }
}

/// Whether every path through the block definitely returns.
fn block_returns(stmts: &[Stmt]) -> bool {
    stmts.iter().any(stmt_returns)
}

fn stmt_returns(stmt: &Stmt) -> bool {
    match stmt {
        Stmt::Return { .. } => true,
        Stmt::If {
            then_body,
            else_body,
            ..
        } => block_returns(then_body) && block_returns(else_body),
        _ => false,
    }
}
