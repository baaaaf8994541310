//! Recursive-descent parser producing the AST of `super`.
//!
//! Comparison operators are non-associative (`a < b < c` is rejected at parse
//! time), which keeps every relational-operator substitution well-typed.

use super::lexer::{Tok, Token};
use super::{
    BinOp, Expr, Function, Param, ParseError, Pos, Program, Stmt, TestCase, Type, UnaryOp, Unit,
};

pub fn parse_tokens(tokens: Vec<Token>) -> Result<Program, ParseError> {
    let mut parser = Parser { tokens, index: 0 };
    parser.parse_program()
}

struct Parser {
    tokens: Vec<Token>,
    index: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.index]
    }

    fn advance(&mut self) -> Token {
        let token = self.tokens[self.index].clone();
        if self.index + 1 < self.tokens.len() {
            self.index += 1;
        }
        token
    }

    fn expect(&mut self, expected: Tok, what: &str) -> Result<Token, ParseError> {
        let token = self.peek().clone();
        if token.tok == expected {
            Ok(self.advance())
        } else {
            Err(ParseError::syntax(
                token.pos,
                format!("expected {what}, found {}", token.tok.describe()),
            ))
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, Pos), ParseError> {
        let token = self.peek().clone();
        match token.tok {
            Tok::Ident(name) => {
                self.advance();
                Ok((name, token.pos))
            }
            other => Err(ParseError::syntax(
                token.pos,
                format!("expected {what}, found {}", other.describe()),
            )),
        }
    }

    fn parse_program(&mut self) -> Result<Program, ParseError> {
        let mut units = Vec::new();
        let mut tests = Vec::new();
        if self.peek().tok == Tok::Eof {
            return Err(ParseError::syntax(
                self.peek().pos,
                "empty input: expected `unit` or `test` blocks",
            ));
        }
        loop {
            let token = self.peek().clone();
            match token.tok {
                Tok::KwUnit => units.push(self.parse_unit()?),
                Tok::KwTest => tests.push(self.parse_test()?),
                Tok::Eof => break,
                other => {
                    return Err(ParseError::syntax(
                        token.pos,
                        format!("expected `unit` or `test`, found {}", other.describe()),
                    ))
                }
            }
        }
        Ok(Program {
            units,
            tests,
            source_digest: String::new(),
        })
    }

    fn parse_unit(&mut self) -> Result<Unit, ParseError> {
        let kw = self.expect(Tok::KwUnit, "`unit`")?;
        let (name, _) = self.expect_ident("unit name")?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut functions = Vec::new();
        while self.peek().tok != Tok::RBrace {
            functions.push(self.parse_function()?);
        }
        self.expect(Tok::RBrace, "`}`")?;
        Ok(Unit {
            name,
            functions,
            pos: kw.pos,
        })
    }

    fn parse_function(&mut self) -> Result<Function, ParseError> {
        let kw = self.expect(Tok::KwFn, "`fn`")?;
        let (name, _) = self.expect_ident("function name")?;
        self.expect(Tok::LParen, "`(`")?;
        let mut params = Vec::new();
        if self.peek().tok != Tok::RParen {
            loop {
                let (pname, _) = self.expect_ident("parameter name")?;
                self.expect(Tok::Colon, "`:`")?;
                let ty = self.parse_type()?;
                params.push(Param { name: pname, ty });
                if self.peek().tok == Tok::Comma {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        self.expect(Tok::Arrow, "`->`")?;
        let return_type = self.parse_type()?;
        let body = self.parse_block()?;
        Ok(Function {
            name,
            params,
            return_type,
            body,
            pos: kw.pos,
        })
    }

    fn parse_test(&mut self) -> Result<TestCase, ParseError> {
        let kw = self.expect(Tok::KwTest, "`test`")?;
        let (id, _) = self.expect_ident("test id")?;
        let body = self.parse_block()?;
        Ok(TestCase {
            id,
            body,
            pos: kw.pos,
        })
    }

    fn parse_type(&mut self) -> Result<Type, ParseError> {
        let token = self.advance();
        match token.tok {
            Tok::KwInt => Ok(Type::Int),
            Tok::KwBool => Ok(Type::Bool),
            other => Err(ParseError::syntax(
                token.pos,
                format!("expected `int` or `bool`, found {}", other.describe()),
            )),
        }
    }

    fn parse_block(&mut self) -> Result<Vec<Stmt>, ParseError> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut stmts = Vec::new();
        while self.peek().tok != Tok::RBrace {
            stmts.push(self.parse_stmt()?);
        }
        self.expect(Tok::RBrace, "`}`")?;
        Ok(stmts)
    }

    fn parse_stmt(&mut self) -> Result<Stmt, ParseError> {
        let token = self.peek().clone();
        match token.tok {
            Tok::KwLet => {
                self.advance();
                let (name, _) = self.expect_ident("variable name")?;
                let ty = if self.peek().tok == Tok::Colon {
                    self.advance();
                    Some(self.parse_type()?)
                } else {
                    None
                };
                self.expect(Tok::Assign, "`=`")?;
                let value = self.parse_expr()?;
                self.expect(Tok::Semi, "`;`")?;
                Ok(Stmt::Let {
                    name,
                    ty,
                    value,
                    pos: token.pos,
                })
            }
            Tok::KwIf => {
                self.advance();
                self.expect(Tok::LParen, "`(`")?;
                let cond = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                let then_body = self.parse_block()?;
                let else_body = if self.peek().tok == Tok::KwElse {
                    self.advance();
                    if self.peek().tok == Tok::KwIf {
                        vec![self.parse_stmt()?]
                    } else {
                        self.parse_block()?
                    }
                } else {
                    Vec::new()
                };
                Ok(Stmt::If {
                    cond,
                    then_body,
                    else_body,
                    pos: token.pos,
                })
            }
            Tok::KwWhile => {
                self.advance();
                self.expect(Tok::LParen, "`(`")?;
                let cond = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                let body = self.parse_block()?;
                Ok(Stmt::While {
                    cond,
                    body,
                    pos: token.pos,
                })
            }
            Tok::KwReturn => {
                self.advance();
                let value = self.parse_expr()?;
                self.expect(Tok::Semi, "`;`")?;
                Ok(Stmt::Return {
                    value,
                    pos: token.pos,
                })
            }
            Tok::KwAssert => {
                self.advance();
                let cond = self.parse_expr()?;
                self.expect(Tok::Semi, "`;`")?;
                Ok(Stmt::Assert {
                    cond,
                    pos: token.pos,
                })
            }
            Tok::Ident(name) => {
                // Either an assignment or a call statement.
                let next = &self.tokens[self.index + 1];
                match next.tok {
                    Tok::Assign => {
                        self.advance();
                        self.advance();
                        let value = self.parse_expr()?;
                        self.expect(Tok::Semi, "`;`")?;
                        Ok(Stmt::Assign {
                            name,
                            value,
                            pos: token.pos,
                        })
                    }
                    Tok::LParen => {
                        let expr = self.parse_expr()?;
                        self.expect(Tok::Semi, "`;`")?;
                        Ok(Stmt::Call {
                            expr,
                            pos: token.pos,
                        })
                    }
                    _ => Err(ParseError::syntax(
                        next.pos,
                        format!("expected `=` or `(`, found {}", next.tok.describe()),
                    )),
                }
            }
            other => Err(ParseError::syntax(
                token.pos,
                format!("expected a statement, found {}", other.describe()),
            )),
        }
    }

    fn parse_expr(&mut self) -> Result<Expr, ParseError> {
        self.parse_or()
    }

    fn parse_or(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_and()?;
        while self.peek().tok == Tok::OrOr {
            let op_pos = self.advance().pos;
            let rhs = self.parse_and()?;
            lhs = Expr::Binary {
                op: BinOp::Or,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                pos: op_pos,
            };
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_rel()?;
        while self.peek().tok == Tok::AndAnd {
            let op_pos = self.advance().pos;
            let rhs = self.parse_rel()?;
            lhs = Expr::Binary {
                op: BinOp::And,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                pos: op_pos,
            };
        }
        Ok(lhs)
    }

    fn rel_op(tok: &Tok) -> Option<BinOp> {
        Some(match tok {
            Tok::EqEq => BinOp::Eq,
            Tok::NotEq => BinOp::Ne,
            Tok::Less => BinOp::Lt,
            Tok::Greater => BinOp::Gt,
            Tok::LessEq => BinOp::Le,
            Tok::GreaterEq => BinOp::Ge,
            _ => return None,
        })
    }

    fn parse_rel(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.parse_add()?;
        if let Some(op) = Self::rel_op(&self.peek().tok) {
            let op_pos = self.advance().pos;
            let rhs = self.parse_add()?;
            if let Some(chained) = Self::rel_op(&self.peek().tok) {
                return Err(ParseError::syntax(
                    self.peek().pos,
                    format!(
                        "chained comparison: `{}` cannot follow a comparison (parenthesize)",
                        chained.token()
                    ),
                ));
            }
            return Ok(Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                pos: op_pos,
            });
        }
        Ok(lhs)
    }

    fn parse_add(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_mul()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            let op_pos = self.advance().pos;
            let rhs = self.parse_mul()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                pos: op_pos,
            };
        }
        Ok(lhs)
    }

    fn parse_mul(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                Tok::Percent => BinOp::Mod,
                _ => break,
            };
            let op_pos = self.advance().pos;
            let rhs = self.parse_unary()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                pos: op_pos,
            };
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Expr, ParseError> {
        let token = self.peek().clone();
        match token.tok {
            Tok::Bang => {
                self.advance();
                let operand = self.parse_unary()?;
                Ok(Expr::Unary {
                    op: UnaryOp::Not,
                    operand: Box::new(operand),
                    pos: token.pos,
                })
            }
            Tok::Minus => {
                self.advance();
                let operand = self.parse_unary()?;
                Ok(Expr::Unary {
                    op: UnaryOp::Neg,
                    operand: Box::new(operand),
                    pos: token.pos,
                })
            }
            _ => self.parse_primary(),
        }
    }

    fn parse_primary(&mut self) -> Result<Expr, ParseError> {
        let token = self.advance();
        match token.tok {
            Tok::Int(value) => Ok(Expr::IntLit {
                value,
                pos: token.pos,
            }),
            Tok::KwTrue => Ok(Expr::BoolLit {
                value: true,
                pos: token.pos,
            }),
            Tok::KwFalse => Ok(Expr::BoolLit {
                value: false,
                pos: token.pos,
            }),
            Tok::LParen => {
                let inner = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if self.peek().tok == Tok::LParen {
                    self.advance();
                    let mut args = Vec::new();
                    if self.peek().tok != Tok::RParen {
                        loop {
                            args.push(self.parse_expr()?);
                            if self.peek().tok == Tok::Comma {
                                self.advance();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Expr::Call {
                        callee: name,
                        args,
                        pos: token.pos,
                    })
                } else {
                    Ok(Expr::Var {
                        name,
                        pos: token.pos,
                    })
                }
            }
            other => Err(ParseError::syntax(
                token.pos,
                format!("expected an expression, found {}", other.describe()),
            )),
        }
    }
}
