use crate::nominal::{Name, RESERVED_PREFIX};

use super::{ParseError, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(super) enum Token {
    Zero,
    Tau,
    Ident(Name),
    Upper(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Dot,
    Bang,
    Caret,
    Plus,
    Bar,
    Equals,
    NotEquals,
    Semi,
    Eof,
}

impl Token {
    pub(super) fn describe(&self) -> String {
        match self {
            Token::Zero => "`0`".into(),
            Token::Tau => "`tau`".into(),
            Token::Ident(n) => format!("name `{n}`"),
            Token::Upper(d) => format!("definition `{d}`"),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::LBracket => "`[`".into(),
            Token::RBracket => "`]`".into(),
            Token::Dot => "`.`".into(),
            Token::Bang => "`!`".into(),
            Token::Caret => "`^`".into(),
            Token::Plus => "`+`".into(),
            Token::Bar => "`|`".into(),
            Token::Equals => "`=`".into(),
            Token::NotEquals => "`!=`".into(),
            Token::Semi => "`;`".into(),
            Token::Eof => "end of input".into(),
        }
    }
}

pub(super) struct Lexer<'s> {
    src: &'s str,
    pos: usize,
    line: usize,
    line_start: usize,
    comments: bool,
}

impl<'s> Lexer<'s> {
    /// `comments` enables `#` line comments (definitions files only).
    pub(super) fn new(src: &'s str, comments: bool) -> Lexer<'s> {
        Lexer {
            src,
            pos: 0,
            line: 1,
            line_start: 0,
            comments,
        }
    }

    fn span_from(&self, start: usize, line: usize, line_start: usize) -> SourceSpan {
        SourceSpan {
            start,
            end: self.pos,
            line,
            column: self.src[line_start..start].chars().count() + 1,
        }
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    pub(super) fn tokenize(mut self) -> Result<Vec<(Token, SourceSpan)>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            let (start, line, line_start) = (self.pos, self.line, self.line_start);
            let Some(c) = self.peek_char() else {
                out.push((Token::Eof, self.span_from(start, line, line_start)));
                return Ok(out);
            };
            self.pos += c.len_utf8();
            let tok = match c {
                '0' => Token::Zero,
                '(' => Token::LParen,
                ')' => Token::RParen,
                '[' => Token::LBracket,
                ']' => Token::RBracket,
                '.' => Token::Dot,
                '^' => Token::Caret,
                '+' => Token::Plus,
                '|' => Token::Bar,
                '=' => Token::Equals,
                ';' => Token::Semi,
                '!' if self.peek_char() == Some('=') => {
                    self.pos += 1;
                    Token::NotEquals
                }
                '!' => Token::Bang,
                'a'..='z' => {
                    let word = self.word(start);
                    if word == "tau" {
                        Token::Tau
                    } else {
                        Token::Ident(Name::new(word))
                    }
                }
                'A'..='Z' => Token::Upper(self.word(start).to_string()),
                RESERVED_PREFIX => {
                    self.word(start);
                    return Err(ParseError::new(
                        self.span_from(start, line, line_start),
                        "reserved canonical atoms cannot appear in source",
                    ));
                }
                other => {
                    return Err(ParseError::new(
                        self.span_from(start, line, line_start),
                        format!("unexpected character `{other}`"),
                    ))
                }
            };
            out.push((tok, self.span_from(start, line, line_start)));
        }
    }

    fn word(&mut self, start: usize) -> &'s str {
        while let Some(c) = self.peek_char() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                self.pos += 1;
            } else {
                break;
            }
        }
        &self.src[start..self.pos]
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek_char() {
            if c == '\n' {
                self.pos += 1;
                self.line += 1;
                self.line_start = self.pos;
            } else if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else if c == '#' && self.comments {
                while let Some(c) = self.peek_char() {
                    if c == '\n' {
                        break;
                    }
                    self.pos += c.len_utf8();
                }
            } else {
                break;
            }
        }
    }
}
