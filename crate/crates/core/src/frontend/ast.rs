//! Unvalidated declarations as they appear in source text.

use std::fmt;

/// 1-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub pos: Pos,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Self {
        Ident {
            name: name.into(),
            pos: Pos::default(),
        }
    }
}

/// `id:Node`, `e1.e2`, or `Node:e1.e2`. An empty edge list with a start is
/// an identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawPath {
    pub start: Option<String>,
    pub edges: Vec<String>,
    pub pos: Pos,
}

impl fmt::Display for RawPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.start, self.edges.is_empty()) {
            (Some(s), true) => write!(f, "id:{s}"),
            (Some(s), false) => write!(f, "{s}:{}", self.edges.join(".")),
            (None, _) => write!(f, "{}", self.edges.join(".")),
        }
    }
}

/// An edge reference, optionally qualified by its source node: `Emp.name`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QualName {
    pub qualifier: Option<String>,
    pub name: String,
    pub pos: Pos,
}

impl fmt::Display for QualName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.qualifier {
            Some(q) => write!(f, "{q}.{}", self.name),
            None => write!(f, "{}", self.name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeDecl {
    pub name: String,
    pub source: String,
    pub target: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationDecl {
    pub lhs: RawPath,
    pub rhs: RawPath,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SchemaDecl {
    pub name: String,
    pub entities: Vec<Ident>,
    pub types: Vec<Ident>,
    pub edges: Vec<EdgeDecl>,
    pub equations: Vec<EquationDecl>,
    pub pos: Pos,
}

/// A bare token (element id or integer) or a quoted string literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RawValue {
    Bare(String),
    Quoted(String),
}

/// `x` in a carrier list, or `x -> v` in an edge map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawItem {
    pub key: String,
    pub value: Option<RawValue>,
    pub pos: Pos,
}

/// `Node = {..}` or `edge = {..}`; which one is decided during validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceEntry {
    pub target: QualName,
    pub items: Vec<RawItem>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InstanceDecl {
    pub name: String,
    pub schema: String,
    pub entries: Vec<InstanceEntry>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeAssign {
    pub source: String,
    pub target: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeAssign {
    pub edge: QualName,
    pub path: RawPath,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MappingDecl {
    pub name: String,
    pub source: String,
    pub target: String,
    pub nodes: Vec<NodeAssign>,
    pub edges: Vec<EdgeAssign>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Schema(SchemaDecl),
    Instance(InstanceDecl),
    Mapping(MappingDecl),
}

impl Decl {
    pub fn name(&self) -> &str {
        match self {
            Decl::Schema(d) => &d.name,
            Decl::Instance(d) => &d.name,
            Decl::Mapping(d) => &d.name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Decl::Schema(_) => "schema",
            Decl::Instance(_) => "instance",
            Decl::Mapping(_) => "mapping",
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            Decl::Schema(d) => d.pos,
            Decl::Instance(d) => d.pos,
            Decl::Mapping(d) => d.pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceFile {
    pub decls: Vec<Decl>,
}

impl SourceFile {
    pub fn schemas(&self) -> impl Iterator<Item = &SchemaDecl> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Schema(s) => Some(s),
            _ => None,
        })
    }

    pub fn instances(&self) -> impl Iterator<Item = &InstanceDecl> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Instance(s) => Some(s),
            _ => None,
        })
    }

    pub fn mappings(&self) -> impl Iterator<Item = &MappingDecl> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Mapping(s) => Some(s),
            _ => None,
        })
    }
}
