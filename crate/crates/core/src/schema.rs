//! Schemas: a typed multigraph of entity and builtin type nodes plus path
//! equations, presenting a category.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::frontend::ast::{EdgeDecl, EquationDecl, Ident, Pos, RawPath, SchemaDecl};
use crate::presentation::{
    complete, enumerate_paths, Budget, Enumeration, Graph, Path, PathEquation, PathError, Theory,
};

/// The builtin literal carriers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BuiltinType {
    String,
    Int,
}

impl BuiltinType {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "String" => Some(BuiltinType::String),
            "Int" => Some(BuiltinType::Int),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BuiltinType::String => "String",
            BuiltinType::Int => "Int",
        }
    }
}

/// A value of a builtin type. Equality is syntactic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Literal {
    Str(String),
    Int(i64),
}

impl Literal {
    pub fn builtin(&self) -> BuiltinType {
        match self {
            Literal::Str(_) => BuiltinType::String,
            Literal::Int(_) => BuiltinType::Int,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Int(n) => write!(f, "{n}"),
            Literal::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\t' => f.write_str("\\t")?,
                        '\r' => f.write_str("\\r")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaViolation {
    #[error("{pos}: duplicate name `{name}`")]
    DuplicateName { name: String, pos: Pos },
    #[error("{pos}: unknown type `{name}` (the builtin types are String and Int)")]
    UnknownType { name: String, pos: Pos },
    #[error("{pos}: edge `{edge}` refers to undeclared node `{node}`")]
    DanglingEdge { edge: String, node: String, pos: Pos },
    #[error("{pos}: edge `{edge}` leaves type node `{node}`")]
    EdgeFromTypeNode { edge: String, node: String, pos: Pos },
    #[error("{pos}: equation `{lhs} = {rhs}` is ill typed: left side runs {lhs_ends}, right side runs {rhs_ends}")]
    IllTypedEquation {
        lhs: String,
        rhs: String,
        lhs_ends: String,
        rhs_ends: String,
        pos: Pos,
    },
    #[error("{pos}: bad path `{path}`: {reason}")]
    BadPath { path: String, reason: String, pos: Pos },
}

/// Every violation found in one schema declaration.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct SchemaError {
    pub schema: String,
    pub violations: Vec<SchemaViolation>,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "schema `{}` is invalid", self.schema)?;
        for v in &self.violations {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

/// A validated schema with its completed theory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Schema {
    name: String,
    entities: Vec<String>,
    types: Vec<BuiltinType>,
    theory: Theory,
    #[serde(skip)]
    warnings: Vec<String>,
}

impl Schema {
    /// Builds and validates a schema from resolved parts.
    pub fn build(
        name: &str,
        entities: &[&str],
        types: &[BuiltinType],
        edges: &[(&str, &str, &str)],
        equations: Vec<PathEquation>,
        budget: &Budget,
    ) -> Result<Schema, SchemaError> {
        let decl = SchemaDecl {
            name: name.to_owned(),
            entities: entities.iter().map(|e| Ident::new(*e)).collect(),
            types: types.iter().map(|t| Ident::new(t.name())).collect(),
            edges: edges
                .iter()
                .map(|(n, s, t)| EdgeDecl {
                    name: n.to_string(),
                    source: s.to_string(),
                    target: t.to_string(),
                    pos: Pos::default(),
                })
                .collect(),
            equations: equations
                .iter()
                .map(|eq| EquationDecl {
                    lhs: raw_of(&eq.lhs),
                    rhs: raw_of(&eq.rhs),
                    pos: Pos::default(),
                })
                .collect(),
            pos: Pos::default(),
        };
        validate_schema(&decl, budget)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn entities(&self) -> &[String] {
        &self.entities
    }

    pub fn types(&self) -> &[BuiltinType] {
        &self.types
    }

    pub fn graph(&self) -> &Graph {
        self.theory.graph()
    }

    pub fn theory(&self) -> &Theory {
        &self.theory
    }

    pub fn equations(&self) -> &[PathEquation] {
        self.theory.equations()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn is_entity(&self, node: &str) -> bool {
        self.entities.iter().any(|e| e == node)
    }

    /// The builtin carried by `node`, if it is a type node.
    pub fn builtin(&self, node: &str) -> Option<BuiltinType> {
        BuiltinType::from_name(node).filter(|b| self.types.contains(b))
    }

    /// Re-completes the theory under a different budget.
    pub fn with_budget(&self, budget: &Budget) -> Schema {
        let mut s = self.clone();
        s.theory = complete(&self.theory, budget);
        s
    }

    /// Normal-form morphisms `a -> b`, bounded by the budget's path length.
    pub fn hom_set(
        &self,
        a: &str,
        b: &str,
        budget: &Budget,
    ) -> Result<(Vec<Path>, Enumeration), PathError> {
        enumerate_paths(&self.theory, a, b, budget)
    }

    /// Writes `p` the way the text format needs it: bare when its first
    /// edge name identifies the start node, qualified otherwise.
    pub fn raw_path(&self, p: &Path) -> RawPath {
        let unique = p
            .edges
            .first()
            .map(|e| self.graph().sources_of(e).len() == 1)
            .unwrap_or(false);
        RawPath {
            start: (!unique).then(|| p.start.clone()),
            edges: p.edges.clone(),
            pos: Pos::default(),
        }
    }

    /// A declaration that validates back to this schema.
    pub fn to_decl(&self) -> SchemaDecl {
        SchemaDecl {
            name: self.name.clone(),
            entities: self.entities.iter().map(Ident::new).collect(),
            types: self.types.iter().map(|t| Ident::new(t.name())).collect(),
            edges: self
                .graph()
                .edges()
                .iter()
                .map(|e| EdgeDecl {
                    name: e.name.clone(),
                    source: e.source.clone(),
                    target: e.target.clone(),
                    pos: Pos::default(),
                })
                .collect(),
            equations: self
                .equations()
                .iter()
                .map(|eq| EquationDecl {
                    lhs: self.raw_path(&eq.lhs),
                    rhs: self.raw_path(&eq.rhs),
                    pos: Pos::default(),
                })
                .collect(),
            pos: Pos::default(),
        }
    }
}

pub(crate) fn raw_of(p: &Path) -> RawPath {
    RawPath {
        start: Some(p.start.clone()),
        edges: p.edges.clone(),
        pos: Pos::default(),
    }
}

/// Checks a schema declaration and completes its theory.
///
/// All violations are collected. Equations with syntactically identical
/// sides are dropped with a warning.
pub fn validate_schema(decl: &SchemaDecl, budget: &Budget) -> Result<Schema, SchemaError> {
    let mut violations = Vec::new();
    let mut graph = Graph::new();
    let mut entities = Vec::new();
    let mut types = Vec::new();
    let mut warnings = Vec::new();

    for ent in &decl.entities {
        if graph.add_node(ent.name.clone()) {
            entities.push(ent.name.clone());
        } else {
            violations.push(SchemaViolation::DuplicateName {
                name: ent.name.clone(),
                pos: ent.pos,
            });
        }
    }
    for ty in &decl.types {
        let Some(b) = BuiltinType::from_name(&ty.name) else {
            violations.push(SchemaViolation::UnknownType {
                name: ty.name.clone(),
                pos: ty.pos,
            });
            continue;
        };
        if graph.add_node(ty.name.clone()) {
            types.push(b);
        } else {
            violations.push(SchemaViolation::DuplicateName {
                name: ty.name.clone(),
                pos: ty.pos,
            });
        }
    }

    let mut seen_edges = HashSet::new();
    for e in &decl.edges {
        let mut ok = true;
        for node in [&e.source, &e.target] {
            if !graph.has_node(node) {
                violations.push(SchemaViolation::DanglingEdge {
                    edge: e.name.clone(),
                    node: node.clone(),
                    pos: e.pos,
                });
                ok = false;
            }
        }
        if ok && !entities.contains(&e.source) {
            violations.push(SchemaViolation::EdgeFromTypeNode {
                edge: e.name.clone(),
                node: e.source.clone(),
                pos: e.pos,
            });
            ok = false;
        }
        if !seen_edges.insert((e.source.clone(), e.name.clone())) {
            violations.push(SchemaViolation::DuplicateName {
                name: format!("{}.{}", e.source, e.name),
                pos: e.pos,
            });
            ok = false;
        }
        if ok {
            graph
                .add_edge(e.name.clone(), e.source.clone(), e.target.clone())
                .expect("edge endpoints checked");
        }
    }

    let mut equations = Vec::new();
    for eq in &decl.equations {
        let (lhs, rhs) = match resolve_equation(&graph, &eq.lhs, &eq.rhs) {
            Ok(pair) => pair,
            Err(v) => {
                violations.extend(v);
                continue;
            }
        };
        let candidate = PathEquation::new(lhs, rhs);
        if let Err(e) = graph.check_equation(&candidate) {
            let ends = |p: &Path| {
                graph
                    .end(p)
                    .map(|end| format!("{} -> {}", p.start, end))
                    .unwrap_or_else(|_| e.to_string())
            };
            violations.push(SchemaViolation::IllTypedEquation {
                lhs: eq.lhs.to_string(),
                rhs: eq.rhs.to_string(),
                lhs_ends: ends(&candidate.lhs),
                rhs_ends: ends(&candidate.rhs),
                pos: eq.pos,
            });
            continue;
        }
        if candidate.lhs == candidate.rhs {
            warnings.push(format!("{}: equation `{}` has identical sides; dropped", eq.pos, candidate));
            continue;
        }
        equations.push(candidate);
    }

    if !violations.is_empty() {
        return Err(SchemaError {
            schema: decl.name.clone(),
            violations,
        });
    }
    let theory = Theory::new(Arc::new(graph), equations).expect("equations checked");
    Ok(Schema {
        name: decl.name.clone(),
        entities,
        types,
        theory: complete(&theory, budget),
        warnings,
    })
}

/// Resolves both sides of an equation. A bare path whose first edge name is
/// shared by several nodes borrows its start from the other side.
pub fn resolve_equation(
    graph: &Graph,
    lhs: &RawPath,
    rhs: &RawPath,
) -> Result<(Path, Path), Vec<SchemaViolation>> {
    let own = |raw: &RawPath| raw.start.clone().or_else(|| infer_start(graph, raw));
    let (l_start, r_start) = (own(lhs), own(rhs));
    let l = resolve_path(graph, lhs, l_start.as_deref().or(r_start.as_deref()));
    let r = resolve_path(graph, rhs, r_start.as_deref().or(l_start.as_deref()));
    match (l, r) {
        (Ok(l), Ok(r)) => Ok((l, r)),
        (l, r) => Err(l.err().into_iter().chain(r.err()).collect()),
    }
}

fn infer_start(graph: &Graph, raw: &RawPath) -> Option<String> {
    let first = raw.edges.first()?;
    match graph.sources_of(first).as_slice() {
        [only] => Some(only.to_string()),
        _ => None,
    }
}

/// Resolves a raw path against `graph`. `expected` is the start node implied
/// by context (an equation's other side, a mapping's source edge).
pub(crate) fn resolve_path(
    graph: &Graph,
    raw: &RawPath,
    expected: Option<&str>,
) -> Result<Path, SchemaViolation> {
    let bad = |reason: String| SchemaViolation::BadPath {
        path: raw.to_string(),
        reason,
        pos: raw.pos,
    };
    let start = match (&raw.start, expected) {
        (Some(s), _) => s.clone(),
        (None, Some(e)) => e.to_owned(),
        (None, None) => match raw.edges.first() {
            None => return Err(bad("empty path".into())),
            Some(first) => match graph.sources_of(first).as_slice() {
                [] => return Err(bad(format!("no edge named `{first}`"))),
                [only] => only.to_string(),
                many => {
                    return Err(bad(format!(
                        "edge `{first}` leaves several nodes ({}); write `Node:{}`",
                        many.join(", "),
                        raw.edges.join(".")
                    )))
                }
            },
        },
    };
    let path = Path::new(start, raw.edges.clone());
    graph.resolve(&path).map_err(|e| bad(e.to_string()))?;
    Ok(path)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn emp_dept_schema() -> Schema {
        Schema::build(
            "S",
            &["Emp", "Dept"],
            &[BuiltinType::String],
            &[
                ("mgr", "Emp", "Emp"),
                ("works", "Emp", "Dept"),
                ("name", "Emp", "String"),
                ("admin", "Dept", "Emp"),
                ("name", "Dept", "String"),
            ],
            vec![PathEquation::new(
                Path::parse_dotted("Dept", "admin.works"),
                Path::identity("Dept"),
            )],
            &Budget::default(),
        )
        .unwrap()
    }
}
