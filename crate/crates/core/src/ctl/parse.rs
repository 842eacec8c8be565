//! Text syntax for formulas.
//!
//! ```text
//! or    := and ('|' and)*
//! and   := unary ('&' unary)*
//! unary := '!' unary | 'AX' unary | 'AF' unary | 'AG' unary
//!        | 'EX' unary | 'EF' unary | 'EG' unary
//!        | 'A' unary 'U' unary | 'E' unary 'U' unary
//!        | 'True' | atom | '(' or ')'
//! ```
//!
//! Precedence is `!` > temporal > `&` > `|`. `A True U x` is the same
//! formula as `AF x` and is parsed as such (likewise for `E`).

use thiserror::Error;

use super::{Formula, FormulaBuilder, Head, NodeId};
use crate::kripke::AtomId;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("column {column}: {message}")]
pub struct FormulaParseError {
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Bang,
    Amp,
    Pipe,
    LParen,
    RParen,
}

struct Lexer {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end_column: usize,
}

fn lex(text: &str) -> Result<Lexer, FormulaParseError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '!' => {
                tokens.push((column, Token::Bang));
                i += 1;
            }
            '&' => {
                tokens.push((column, Token::Amp));
                i += 1;
            }
            '|' => {
                tokens.push((column, Token::Pipe));
                i += 1;
            }
            '(' => {
                tokens.push((column, Token::LParen));
                i += 1;
            }
            ')' => {
                tokens.push((column, Token::RParen));
                i += 1;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                tokens.push((column, Token::Ident(chars[start..i].iter().collect())));
            }
            other => {
                return Err(FormulaParseError {
                    column,
                    message: format!("unexpected character '{other}'"),
                })
            }
        }
    }
    Ok(Lexer { tokens, pos: 0, end_column: chars.len() + 1 })
}

impl Lexer {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn column(&self) -> usize {
        self.tokens.get(self.pos).map(|(c, _)| *c).unwrap_or(self.end_column)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }
}

struct Parser<'a> {
    lexer: Lexer,
    atoms: &'a [String],
    builder: FormulaBuilder,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> FormulaParseError {
        FormulaParseError { column: self.lexer.column(), message: message.into() }
    }

    fn or_expr(&mut self) -> Result<NodeId, FormulaParseError> {
        let mut node = self.and_expr()?;
        while self.lexer.peek() == Some(&Token::Pipe) {
            self.lexer.bump();
            let rhs = self.and_expr()?;
            node = self.builder.add(false, Head::Or, Some(node), Some(rhs));
        }
        Ok(node)
    }

    fn and_expr(&mut self) -> Result<NodeId, FormulaParseError> {
        let mut node = self.unary_expr()?;
        while self.lexer.peek() == Some(&Token::Amp) {
            self.lexer.bump();
            let rhs = self.unary_expr()?;
            node = self.builder.add(false, Head::And, Some(node), Some(rhs));
        }
        Ok(node)
    }

    fn until(&mut self, head: Head) -> Result<NodeId, FormulaParseError> {
        let left = self.unary_expr()?;
        match self.lexer.bump() {
            Some(Token::Ident(u)) if u == "U" => {}
            _ => return Err(self.error("expected 'U'")),
        }
        let right = self.unary_expr()?;
        // Fold the `True U x` alias into the canonical one-argument form.
        let left_node = self.builder.nodes[left];
        if left_node.head == Head::True && !left_node.negated {
            let alias = if head == Head::Au { Head::Af } else { Head::Ef };
            return Ok(self.builder.add(false, alias, None, Some(right)));
        }
        Ok(self.builder.add(false, head, Some(left), Some(right)))
    }

    fn unary_expr(&mut self) -> Result<NodeId, FormulaParseError> {
        match self.lexer.bump() {
            Some(Token::Bang) => {
                let child = self.unary_expr()?;
                Ok(self.builder.add(false, Head::Not, None, Some(child)))
            }
            Some(Token::LParen) => {
                let node = self.or_expr()?;
                match self.lexer.bump() {
                    Some(Token::RParen) => Ok(node),
                    _ => Err(self.error("expected ')'")),
                }
            }
            Some(Token::Ident(word)) => match word.as_str() {
                "True" => Ok(self.builder.add(false, Head::True, None, None)),
                "AX" | "AF" | "AG" | "EX" | "EF" | "EG" => {
                    let head = match word.as_str() {
                        "AX" => Head::Ax,
                        "AF" => Head::Af,
                        "AG" => Head::Ag,
                        "EX" => Head::Ex,
                        "EF" => Head::Ef,
                        _ => Head::Eg,
                    };
                    let child = self.unary_expr()?;
                    Ok(self.builder.add(false, head, None, Some(child)))
                }
                "A" => self.until(Head::Au),
                "E" => self.until(Head::Eu),
                "U" => Err(self.error("'U' without a preceding 'A' or 'E'")),
                name => match self.atoms.iter().position(|a| a == name) {
                    Some(a) => Ok(self.builder.add(false, Head::Atom(a as AtomId), None, None)),
                    None => Err(FormulaParseError {
                        column: self.lexer.column(),
                        message: format!("unknown atom \"{name}\""),
                    }),
                },
            },
            Some(tok) => Err(self.error(format!("unexpected token {tok:?}"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Parses a formula, resolving atom names against `atoms` (declaration
/// order gives the atom ids).
pub fn parse(text: &str, atoms: &[String]) -> Result<Formula, FormulaParseError> {
    let lexer = lex(text)?;
    let mut parser = Parser { lexer, atoms, builder: FormulaBuilder::new() };
    let root = parser.or_expr()?;
    if parser.lexer.peek().is_some() {
        return Err(parser.error("trailing input"));
    }
    Ok(parser.builder.finish(root))
}
