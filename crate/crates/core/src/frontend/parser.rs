//! Recursive-descent parser producing [`SourceFile`]s.

use thiserror::Error;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: unresolved reference to {kind} `{name}`")]
    UnresolvedReference { kind: &'static str, name: String, pos: Pos },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Syntax { pos, .. } | ParseError::UnresolvedReference { pos, .. } => *pos,
        }
    }
}

pub fn parse_source(src: &str) -> Result<SourceFile, ParseError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        at: 0,
    };
    let mut decls = Vec::new();
    while p.peek() != &Tok::Eof {
        decls.push(p.decl()?);
    }
    Ok(SourceFile { decls })
}

/// Parses a single path such as `admin.works` or `id:Dept`.
pub fn parse_path(src: &str) -> Result<RawPath, ParseError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        at: 0,
    };
    let path = p.path()?;
    p.expect(Tok::Eof)?;
    Ok(path)
}

/// Parses `p = q`.
pub fn parse_equation(src: &str) -> Result<EquationDecl, ParseError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        at: 0,
    };
    let eq = p.equation()?;
    p.expect(Tok::Eof)?;
    Ok(eq)
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if t.tok != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, wanted: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            message: format!("expected {wanted}, found {}", self.peek().describe()),
        })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos, ParseError> {
        if self.peek() == &tok {
            Ok(self.bump().pos)
        } else {
            self.error(&tok.describe())
        }
    }

    fn word(&mut self, what: &str) -> Result<Ident, ParseError> {
        match self.peek().clone() {
            Tok::Word(w) => {
                let pos = self.bump().pos;
                Ok(Ident { name: w, pos })
            }
            _ => self.error(what),
        }
    }

    /// A name that may not be the reserved word `id`.
    fn name(&mut self, what: &str) -> Result<Ident, ParseError> {
        if self.peek() == &Tok::Word("id".into()) {
            return Err(ParseError::Syntax {
                pos: self.pos(),
                message: format!("`id` is reserved and cannot be used as {what}"),
            });
        }
        self.word(what)
    }

    fn keyword(&mut self, kw: &str) -> Result<Pos, ParseError> {
        match self.peek() {
            Tok::Word(w) if w == kw => Ok(self.bump().pos),
            _ => self.error(&format!("`{kw}`")),
        }
    }

    fn decl(&mut self) -> Result<Decl, ParseError> {
        match self.peek() {
            Tok::Word(w) if w == "schema" => self.schema().map(Decl::Schema),
            Tok::Word(w) if w == "instance" => self.instance().map(Decl::Instance),
            Tok::Word(w) if w == "mapping" => self.mapping().map(Decl::Mapping),
            _ => self.error("`schema`, `instance` or `mapping`"),
        }
    }

    /// `item, item, ...` up to (not including) `;` or `}`.
    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T, ParseError>) -> Result<Vec<T>, ParseError> {
        let mut out = Vec::new();
        if matches!(self.peek(), Tok::Semi | Tok::RBrace) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if !self.eat(&Tok::Comma) {
                return Ok(out);
            }
        }
    }

    /// Runs `section` for each `label: ...;` until `}`; labels at most once.
    fn sections(
        &mut self,
        labels: &[&str],
        mut section: impl FnMut(&mut Self, &str) -> Result<(), ParseError>,
    ) -> Result<(), ParseError> {
        self.expect(Tok::LBrace)?;
        let mut seen = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let label = self.word("a section name")?;
            let Some(&l) = labels.iter().find(|l| **l == label.name) else {
                return Err(ParseError::Syntax {
                    pos: label.pos,
                    message: format!("unknown section `{}` (expected one of: {})", label.name, labels.join(", ")),
                });
            };
            if seen.contains(&l) {
                return Err(ParseError::Syntax {
                    pos: label.pos,
                    message: format!("section `{l}` appears twice"),
                });
            }
            seen.push(l);
            self.expect(Tok::Colon)?;
            section(self, l)?;
            if !self.eat(&Tok::Semi) && self.peek() != &Tok::RBrace {
                return self.error("`;` or `}`");
            }
        }
        Ok(())
    }

    fn schema(&mut self) -> Result<SchemaDecl, ParseError> {
        let pos = self.keyword("schema")?;
        let name = self.name("a schema name")?;
        let mut decl = SchemaDecl {
            name: name.name,
            pos,
            ..SchemaDecl::default()
        };
        self.sections(&["entities", "types", "edges", "equations"], |p, label| {
            match label {
                "entities" => decl.entities = p.list(|p| p.name("an entity name"))?,
                "types" => decl.types = p.list(|p| p.name("a type name"))?,
                "edges" => {
                    decl.edges = p.list(|p| {
                        let name = p.name("an edge name")?;
                        p.expect(Tok::Colon)?;
                        let source = p.name("a source node")?;
                        p.expect(Tok::Arrow)?;
                        let target = p.name("a target node")?;
                        Ok(EdgeDecl {
                            name: name.name,
                            source: source.name,
                            target: target.name,
                            pos: name.pos,
                        })
                    })?
                }
                _ => decl.equations = p.list(Parser::equation)?,
            }
            Ok(())
        })?;
        Ok(decl)
    }

    fn equation(&mut self) -> Result<EquationDecl, ParseError> {
        let lhs = self.path()?;
        self.expect(Tok::Eq)?;
        let rhs = self.path()?;
        Ok(EquationDecl { pos: lhs.pos, lhs, rhs })
    }

    fn path(&mut self) -> Result<RawPath, ParseError> {
        let pos = self.pos();
        let first = self.word("a path")?;
        if first.name == "id" {
            self.expect(Tok::Colon)?;
            let node = self.name("a node name")?;
            return Ok(RawPath {
                start: Some(node.name),
                edges: vec![],
                pos,
            });
        }
        let (start, mut edges) = if self.eat(&Tok::Colon) {
            (Some(first.name), vec![self.name("an edge name")?.name])
        } else {
            (None, vec![first.name])
        };
        while self.eat(&Tok::Dot) {
            edges.push(self.name("an edge name")?.name);
        }
        Ok(RawPath { start, edges, pos })
    }

    fn qual_name(&mut self) -> Result<QualName, ParseError> {
        let first = self.name("a name")?;
        if self.eat(&Tok::Dot) {
            let second = self.name("an edge name")?;
            Ok(QualName {
                qualifier: Some(first.name),
                name: second.name,
                pos: first.pos,
            })
        } else {
            Ok(QualName {
                qualifier: None,
                name: first.name,
                pos: first.pos,
            })
        }
    }

    fn instance(&mut self) -> Result<InstanceDecl, ParseError> {
        let pos = self.keyword("instance")?;
        let name = self.name("an instance name")?;
        self.keyword("on")?;
        let schema = self.name("a schema name")?;
        self.expect(Tok::LBrace)?;
        let mut entries = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let target = self.qual_name()?;
            self.expect(Tok::Eq)?;
            self.expect(Tok::LBrace)?;
            let items = self.list(|p| {
                let key = p.word("an element id")?;
                let value = if p.eat(&Tok::Arrow) {
                    Some(match p.peek().clone() {
                        Tok::Word(w) => {
                            p.bump();
                            RawValue::Bare(w)
                        }
                        Tok::Str(s) => {
                            p.bump();
                            RawValue::Quoted(s)
                        }
                        _ => return p.error("an element id or literal"),
                    })
                } else {
                    None
                };
                Ok(RawItem {
                    key: key.name,
                    value,
                    pos: key.pos,
                })
            })?;
            self.expect(Tok::RBrace)?;
            if !self.eat(&Tok::Semi) && self.peek() != &Tok::RBrace {
                return self.error("`;` or `}`");
            }
            entries.push(InstanceEntry {
                pos: target.pos,
                target,
                items,
            });
        }
        Ok(InstanceDecl {
            name: name.name,
            schema: schema.name,
            entries,
            pos,
        })
    }

    fn mapping(&mut self) -> Result<MappingDecl, ParseError> {
        let pos = self.keyword("mapping")?;
        let name = self.name("a mapping name")?;
        self.expect(Tok::Colon)?;
        let source = self.name("a schema name")?;
        self.expect(Tok::Arrow)?;
        let target = self.name("a schema name")?;
        let mut decl = MappingDecl {
            name: name.name,
            source: source.name,
            target: target.name,
            pos,
            ..MappingDecl::default()
        };
        self.sections(&["nodes", "edges"], |p, label| {
            if label == "nodes" {
                decl.nodes = p.list(|p| {
                    let source = p.name("a node name")?;
                    p.expect(Tok::Arrow)?;
                    let target = p.name("a node name")?;
                    Ok(NodeAssign {
                        source: source.name,
                        target: target.name,
                        pos: source.pos,
                    })
                })?;
            } else {
                decl.edges = p.list(|p| {
                    let edge = p.qual_name()?;
                    p.expect(Tok::Arrow)?;
                    let path = p.path()?;
                    Ok(EdgeAssign {
                        pos: edge.pos,
                        edge,
                        path,
                    })
                })?;
            }
            Ok(())
        })?;
        Ok(decl)
    }
}
