//! ASCII concrete syntax.
//!
//! ```text
//! P ::= 0 | tau.P | a(x).P | a!b.P | [a=b]P | [a!=b]P
//!     | P + P | P | P | (^x)P | !P | (P) | NAME
//! ```
//!
//! Prefixes and unary operators bind tightest, then `|`, then `+`; both binary
//! operators associate to the left. `NAME` (an upper-case identifier) expands
//! a definition loaded from a `.pi` file of `NAME = <agent>;` lines.

mod lexer;
mod print;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::nominal::Name;
use crate::syntax::Agent;

use lexer::{Lexer, Token};

pub use print::{print_agent, print_residual, printable, AnyResidual};

/// Byte offsets plus the 1-based line and column of `start`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}",
            self.span.line, self.span.column, self.message
        )?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl ParseError {
    fn new(span: SourceSpan, message: impl Into<String>) -> ParseError {
        ParseError {
            span,
            message: message.into(),
            expected: Vec::new(),
        }
    }

    fn expected(span: SourceSpan, found: &Token, expected: &[&str]) -> ParseError {
        ParseError {
            span,
            message: format!("unexpected {}", found.describe()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Renders the error with the offending source line and a caret.
    pub fn render(&self, src: &str) -> String {
        let line = src.lines().nth(self.span.line.saturating_sub(1)).unwrap_or("");
        let width = (self.span.end - self.span.start).max(1);
        format!(
            "error: {self}\n  | {line}\n  | {}{}",
            " ".repeat(self.span.column.saturating_sub(1)),
            "^".repeat(width.min(line.len().max(1)))
        )
    }
}

/// Named abbreviations, expanded where they are referenced.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Definitions {
    entries: BTreeMap<String, Agent>,
}

impl Definitions {
    pub fn get(&self, name: &str) -> Option<&Agent> {
        self.entries.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Agent)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn parse_agent(src: &str) -> Result<Agent, ParseError> {
    parse_agent_with(src, &Definitions::default())
}

pub fn parse_agent_with(src: &str, defs: &Definitions) -> Result<Agent, ParseError> {
    let tokens = Lexer::new(src, false).tokenize()?;
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        defs,
    };
    let agent = parser.sum()?;
    parser.expect_eof()?;
    Ok(agent)
}

/// Parses a definitions file. Later definitions may use earlier ones.
pub fn parse_definitions(src: &str) -> Result<Definitions, ParseError> {
    let mut defs = Definitions::default();
    let tokens = Lexer::new(src, true).tokenize()?;
    let mut pos = 0;
    while tokens[pos].0 != Token::Eof {
        let (name, span) = match &tokens[pos] {
            (Token::Upper(name), span) => (name.clone(), *span),
            (tok, span) => return Err(ParseError::expected(*span, tok, &["definition name"])),
        };
        if defs.entries.contains_key(&name) {
            return Err(ParseError::new(span, format!("`{name}` is defined twice")));
        }
        pos += 1;
        match &tokens[pos] {
            (Token::Equals, _) => pos += 1,
            (tok, span) => return Err(ParseError::expected(*span, tok, &["`=`"])),
        }
        let mut parser = Parser {
            tokens: &tokens,
            pos,
            defs: &defs,
            };
        let body = parser.sum()?;
        pos = parser.pos;
        match &tokens[pos] {
            (Token::Semi, _) => pos += 1,
            (tok, span) => return Err(ParseError::expected(*span, tok, &["`;`"])),
        }
        defs.entries.insert(name, body);
    }
    Ok(defs)
}

struct Parser<'a> {
    tokens: &'a [(Token, SourceSpan)],
    pos: usize,
    defs: &'a Definitions,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn peek2(&self) -> &Token {
        &self.tokens[(self.pos + 1).min(self.tokens.len() - 1)].0
    }

    fn span(&self) -> SourceSpan {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> (Token, SourceSpan) {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn expect(&mut self, want: Token, label: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(ParseError::expected(self.span(), self.peek(), &[label]))
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Token::Eof => Ok(()),
            tok => Err(ParseError::expected(self.span(), tok, &["`+`", "`|`", "end of input"])),
        }
    }

    fn name(&mut self) -> Result<Name, ParseError> {
        match self.bump() {
            (Token::Ident(n), _) => Ok(n),
            (tok, span) => Err(ParseError::expected(span, &tok, &["name"])),
        }
    }

    fn sum(&mut self) -> Result<Agent, ParseError> {
        let mut left = self.par()?;
        while *self.peek() == Token::Plus {
            self.bump();
            let right = self.par()?;
            left = Agent::sum(left, right);
        }
        Ok(left)
    }

    fn par(&mut self) -> Result<Agent, ParseError> {
        let mut left = self.unary()?;
        while *self.peek() == Token::Bar {
            self.bump();
            let right = self.unary()?;
            left = Agent::par(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Agent, ParseError> {
        let span = self.span();
        match self.peek().clone() {
            Token::Zero => {
                self.bump();
                Ok(Agent::Nil)
            }
            Token::Tau => {
                self.bump();
                self.expect(Token::Dot, "`.`")?;
                Ok(Agent::tau(self.unary()?))
            }
            Token::Bang => {
                self.bump();
                Ok(Agent::bang(self.unary()?))
            }
            Token::LBracket => {
                self.bump();
                let l = self.name()?;
                let negated = match self.bump() {
                    (Token::Equals, _) => false,
                    (Token::NotEquals, _) => true,
                    (tok, span) => return Err(ParseError::expected(span, &tok, &["`=`", "`!=`"])),
                };
                let r = self.name()?;
                self.expect(Token::RBracket, "`]`")?;
                let cont = self.unary()?;
                Ok(if negated {
                    Agent::mismatch(l, r, cont)
                } else {
                    Agent::matching(l, r, cont)
                })
            }
            Token::LParen if *self.peek2() == Token::Caret => {
                self.bump();
                self.bump();
                let x = self.name()?;
                self.expect(Token::RParen, "`)`")?;
                let cont = self.unary()?;
                Ok(Agent::res(x, cont))
            }
            Token::LParen => {
                self.bump();
                let inner = self.sum()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Token::Ident(chan) => {
                self.bump();
                match self.bump() {
                    (Token::LParen, _) => {
                        let x = self.name()?;
                        self.expect(Token::RParen, "`)`")?;
                        self.expect(Token::Dot, "`.`")?;
                        let cont = self.unary()?;
                        Ok(Agent::input(chan, x, cont))
                    }
                    (Token::Bang, _) => {
                        let msg = self.name()?;
                        self.expect(Token::Dot, "`.`")?;
                        Ok(Agent::output(chan, msg, self.unary()?))
                    }
                    (tok, span) => Err(ParseError::expected(span, &tok, &["`(`", "`!`"])),
                }
            }
            Token::Upper(def) => {
                self.bump();
                let body = self
                    .defs
                    .get(&def)
                    .ok_or_else(|| ParseError::new(span, format!("unknown definition `{def}`")))?;
                Ok(body.clone())
            }
            tok => Err(ParseError::expected(
                span,
                &tok,
                &["`0`", "`tau`", "name", "`[`", "`(`", "`!`"],
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::alpha_eq;

    #[test]
    fn parses_prefixes() {
        assert_eq!(parse_agent("tau.0").unwrap(), Agent::tau(Agent::Nil));
        assert_eq!(
            parse_agent("a(x).x!b.0 + (^c)c!d.0").unwrap(),
            Agent::sum(
                Agent::input("a", "x", Agent::output("x", "b", Agent::Nil)),
                Agent::res("c", Agent::output("c", "d", Agent::Nil))
            )
        );
        assert_eq!(
            parse_agent("[a=b][a!=c]!0").unwrap(),
            Agent::matching("a", "b", Agent::mismatch("a", "c", Agent::bang(Agent::Nil)))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let nil = || Agent::Nil;
        let t = || Agent::tau(nil());
        assert_eq!(
            parse_agent("tau.0 | 0 + 0 | tau.0").unwrap(),
            Agent::sum(Agent::par(t(), nil()), Agent::par(nil(), t()))
        );
        assert_eq!(
            parse_agent("0 | 0 | tau.0").unwrap(),
            Agent::par(Agent::par(nil(), nil()), t())
        );
        assert_eq!(
            parse_agent("0 + 0 + tau.0").unwrap(),
            Agent::sum(Agent::sum(nil(), nil()), t())
        );
        assert_eq!(
            parse_agent("(^x)x!a.0 | 0").unwrap(),
            Agent::par(Agent::res("x", Agent::output("x", "a", nil())), nil())
        );
        assert_eq!(
            parse_agent("!tau.0 | 0").unwrap(),
            Agent::par(Agent::bang(t()), nil())
        );
    }

    #[test]
    fn primes_and_underscores_in_names() {
        let p = parse_agent("a'(x_1).x_1!a''.0").unwrap();
        assert_eq!(p, Agent::input("a'", "x_1", Agent::output("x_1", "a''", Agent::Nil)));
    }

    #[test]
    fn missing_continuation_is_an_error() {
        let err = parse_agent("a!b").unwrap_err();
        assert_eq!(err.expected, vec!["`.`".to_string()]);
        assert_eq!(err.span.column, 4);
        assert!(parse_agent("").is_err());
        assert!(parse_agent("a(x).0 |").is_err());
        assert!(parse_agent("(a!b.0").is_err());
        assert!(parse_agent("0 0").is_err());
    }

    #[test]
    fn reserved_atoms_are_rejected() {
        let err = parse_agent("#0!a.0").unwrap_err();
        assert!(err.message.contains("reserved"), "{err}");
    }

    #[test]
    fn tau_is_a_keyword() {
        assert!(parse_agent("tau(x).0").is_err());
        assert!(parse_agent("taux!a.0").is_ok());
    }

    #[test]
    fn error_positions_track_lines() {
        let err = parse_agent("a!b.0 |\n  ]").unwrap_err();
        assert_eq!((err.span.line, err.span.column), (2, 3));
        assert!(err.render("a!b.0 |\n  ]").contains("^"));
    }

    #[test]
    fn definitions_expand() {
        let defs = parse_definitions(
            "# a buffer cell\nCELL = a(x).b!x.0;\nTWO = CELL | CELL; # two of them\n",
        )
        .unwrap();
        assert_eq!(defs.len(), 2);
        let p = parse_agent_with("(^a)TWO", &defs).unwrap();
        assert!(alpha_eq(
            &p,
            &parse_agent("(^a)(a(x).b!x.0 | a(x).b!x.0)").unwrap()
        ));
        assert!(parse_agent_with("UNKNOWN", &defs).is_err());
        // expansion is textual: enclosing binders scope over the body
        let q = parse_agent_with("c(b).CELL", &defs).unwrap();
        assert!(alpha_eq(&q, &parse_agent("c(y).a(x).y!x.0").unwrap()));
        assert!(parse_definitions("A = 0; A = 0;").is_err());
        assert!(parse_definitions("A = B;").is_err());
        assert!(parse_definitions("A = 0").is_err());
    }
}
