//! Tokenizer for the declaration format.

use super::ast::Pos;
use super::parser::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// Identifier, element id, or integer literal.
    Word(String),
    Str(String),
    Dot,
    Colon,
    Comma,
    Semi,
    LBrace,
    RBrace,
    Eq,
    Arrow,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || "_!#$%&*+<>?@^~|'()[]-".contains(c)
}

/// True if `s` can be written unquoted (and is not the reserved `id`).
pub fn is_bare_token(s: &str) -> bool {
    !s.is_empty() && s != "id" && s.chars().all(is_word_char) && !s.contains("->")
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let advance = |i: &mut usize, col: &mut usize, n: usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(&mut i, &mut col, 1),
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '"' => {
                let mut s = String::new();
                advance(&mut i, &mut col, 1);
                loop {
                    match chars.get(i) {
                        None | Some('\n') => {
                            return Err(ParseError::Syntax {
                                pos,
                                message: "unterminated string literal".into(),
                            })
                        }
                        Some('"') => {
                            advance(&mut i, &mut col, 1);
                            break;
                        }
                        Some('\\') => {
                            let esc = match chars.get(i + 1) {
                                Some('"') => '"',
                                Some('\\') => '\\',
                                Some('n') => '\n',
                                Some('t') => '\t',
                                Some('r') => '\r',
                                other => {
                                    return Err(ParseError::Syntax {
                                        pos: Pos { line, col },
                                        message: format!("unknown escape {:?}", other.map(|c| format!("\\{c}"))),
                                    })
                                }
                            };
                            s.push(esc);
                            advance(&mut i, &mut col, 2);
                        }
                        Some(&c) => {
                            s.push(c);
                            advance(&mut i, &mut col, 1);
                        }
                    }
                }
                out.push(Token { tok: Tok::Str(s), pos });
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push(Token { tok: Tok::Arrow, pos });
                advance(&mut i, &mut col, 2);
            }
            c if is_word_char(c) => {
                let mut w = String::new();
                while let Some(&c) = chars.get(i) {
                    if !is_word_char(c) || (c == '-' && chars.get(i + 1) == Some(&'>')) {
                        break;
                    }
                    w.push(c);
                    advance(&mut i, &mut col, 1);
                }
                out.push(Token { tok: Tok::Word(w), pos });
            }
            _ => {
                let tok = match c {
                    '.' => Tok::Dot,
                    ':' => Tok::Colon,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '=' => Tok::Eq,
                    _ => {
                        return Err(ParseError::Syntax {
                            pos,
                            message: format!("unexpected character {c:?}"),
                        })
                    }
                };
                out.push(Token { tok, pos });
                advance(&mut i, &mut col, 1);
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}
