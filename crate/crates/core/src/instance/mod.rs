//! Finite instances: a carrier per entity node and a total function per edge.

mod hom;

use std::fmt;
use std::sync::Arc;

use indexmap::IndexSet;
use serde::Serialize;
use thiserror::Error;

use crate::frontend::ast::{InstanceDecl, InstanceEntry, Pos, QualName, RawItem, RawValue};
use crate::frontend::lexer::is_bare_token;
use crate::presentation::{Path, PathEquation, PathError};
use crate::schema::{BuiltinType, Literal, Schema};

pub use hom::{
    check_hom, count_homs, enumerate_homs, iso_check, HomEnumeration, HomError, HomReport, InstanceMorphism,
    NaturalityViolation,
};

/// An edge value: an element of the target carrier (by position) or a literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Value {
    Elem(usize),
    Lit(Literal),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceViolation {
    #[error("{pos}: `{name}` is neither a node nor an edge of the schema")]
    UnknownTarget { name: String, pos: Pos },
    #[error("{pos}: edge `{name}` leaves several nodes ({sources}); write `Node.{name}`")]
    AmbiguousEdge { name: String, sources: String, pos: Pos },
    #[error("{pos}: `{node}` is a type node and has no finite carrier")]
    CarrierForTypeNode { node: String, pos: Pos },
    #[error("{pos}: `{name}` is given more than once")]
    DuplicateEntry { name: String, pos: Pos },
    #[error("{pos}: element id `{id}` appears twice in `{node}`")]
    DuplicateElementId { node: String, id: String, pos: Pos },
    #[error("{pos}: `{id}` cannot be used as an element id")]
    InvalidElementId { node: String, id: String, pos: Pos },
    #[error("{pos}: `{found}` does not fit `{name}` ({reason})")]
    MalformedItem { name: String, found: String, reason: String, pos: Pos },
    #[error("edge `{edge}` has no value for `{element}`")]
    MissingEdgeValue { edge: String, element: String },
    #[error("{pos}: edge `{edge}` mentions `{element}`, which is not in `{node}`")]
    UnknownElement { edge: String, element: String, node: String, pos: Pos },
    #[error("{pos}: edge `{edge}` at `{element}`: expected {expected}, found {found}")]
    LiteralTypeMismatch {
        edge: String,
        element: String,
        expected: String,
        found: String,
        pos: Pos,
    },
    #[error("{pos}: edge `{edge}` is given twice at `{element}`")]
    DuplicateEdgeValue { edge: String, element: String, pos: Pos },
    #[error("instance shape does not match the schema: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct InstanceError {
    pub instance: String,
    pub violations: Vec<InstanceViolation>,
}

impl fmt::Display for InstanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "instance `{}` is invalid", self.instance)?;
        for v in &self.violations {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

/// A set-valued functor on a schema, given by finite tables.
#[derive(Debug, Clone)]
pub struct Instance {
    schema: Arc<Schema>,
    /// One per graph node; type nodes stay empty.
    carriers: Vec<IndexSet<String>>,
    /// One per graph edge, indexed by position in the source carrier.
    maps: Vec<Vec<Value>>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.schema, &other.schema) || self.schema == other.schema)
            && self.carriers.len() == other.carriers.len()
            && self
                .carriers
                .iter()
                .zip(&other.carriers)
                .all(|(a, b)| a.iter().eq(b.iter()))
            && self.maps == other.maps
    }
}

impl Eq for Instance {}

/// One failed equation at one element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstraintViolation {
    pub equation_index: usize,
    pub equation: PathEquation,
    pub element: String,
    pub lhs_value: String,
    pub rhs_value: String,
}

impl fmt::Display for ConstraintViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} fails at {}: left gives {}, right gives {}",
            self.equation, self.element, self.lhs_value, self.rhs_value
        )
    }
}

/// Equation failures, ordered by equation index and then element order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ViolationReport {
    pub violations: Vec<ConstraintViolation>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

impl Instance {
    /// The instance with every carrier empty.
    pub fn empty(schema: Arc<Schema>) -> Instance {
        let g = schema.graph();
        Instance {
            carriers: vec![IndexSet::new(); g.nodes().len()],
            maps: vec![Vec::new(); g.edges().len()],
            schema,
        }
    }

    /// Builds an instance from positional tables, checking totality, ranges,
    /// literal types and id uniqueness.
    pub fn from_parts(
        schema: Arc<Schema>,
        carriers: Vec<Vec<String>>,
        maps: Vec<Vec<Value>>,
    ) -> Result<Instance, InstanceError> {
        let fail = |v: Vec<InstanceViolation>| InstanceError {
            instance: String::new(),
            violations: v,
        };
        let g = schema.graph();
        if carriers.len() != g.nodes().len() || maps.len() != g.edges().len() {
            return Err(fail(vec![InstanceViolation::Shape(format!(
                "{} carriers and {} edge maps for {} nodes and {} edges",
                carriers.len(),
                maps.len(),
                g.nodes().len(),
                g.edges().len()
            ))]));
        }
        let mut violations = Vec::new();
        let mut sets = Vec::with_capacity(carriers.len());
        for (node, ids) in g.nodes().iter().zip(carriers) {
            let mut set = IndexSet::with_capacity(ids.len());
            if !ids.is_empty() && !schema.is_entity(node) {
                violations.push(InstanceViolation::CarrierForTypeNode {
                    node: node.clone(),
                    pos: Pos::default(),
                });
            }
            for id in ids {
                if !is_bare_token(&id) {
                    violations.push(InstanceViolation::InvalidElementId {
                        node: node.clone(),
                        id,
                        pos: Pos::default(),
                    });
                } else if !set.insert(id.clone()) {
                    violations.push(InstanceViolation::DuplicateElementId {
                        node: node.clone(),
                        id,
                        pos: Pos::default(),
                    });
                }
            }
            sets.push(set);
        }
        for (e, (edge, values)) in g.edges().iter().zip(&maps).enumerate() {
            let src = &sets[g.node_id(&edge.source).unwrap()];
            if values.len() != src.len() {
                violations.push(InstanceViolation::Shape(format!(
                    "edge {}.{} has {} values for {} elements",
                    edge.source,
                    edge.name,
                    values.len(),
                    src.len()
                )));
                continue;
            }
            let tgt = &sets[g.node_id(&edge.target).unwrap()];
            let builtin = schema.builtin(&edge.target);
            for (x, v) in values.iter().enumerate() {
                let ok = match (v, builtin) {
                    (Value::Elem(i), None) => *i < tgt.len(),
                    (Value::Lit(l), Some(b)) => l.builtin() == b,
                    _ => false,
                };
                if !ok {
                    violations.push(InstanceViolation::Shape(format!(
                        "edge {}.{} (#{e}) at {}: value {:?} outside {}",
                        edge.source, edge.name, src[x], v, edge.target
                    )));
                }
            }
        }
        if !violations.is_empty() {
            return Err(fail(violations));
        }
        Ok(Instance {
            schema,
            carriers: sets,
            maps,
        })
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    /// Carrier of the node with graph index `node`.
    pub fn carrier_at(&self, node: usize) -> &IndexSet<String> {
        &self.carriers[node]
    }

    pub fn carrier(&self, node: &str) -> Option<&IndexSet<String>> {
        self.schema.graph().node_id(node).map(|i| &self.carriers[i])
    }

    /// Values of the edge with graph index `edge`.
    pub fn map_at(&self, edge: usize) -> &[Value] {
        &self.maps[edge]
    }

    pub fn map(&self, source: &str, edge: &str) -> Option<&[Value]> {
        self.schema
            .graph()
            .edge_id(source, edge)
            .map(|i| self.maps[i].as_slice())
    }

    /// Total number of elements over all entity nodes.
    pub fn size(&self) -> usize {
        self.carriers.iter().map(IndexSet::len).sum()
    }

    /// Position of element `id` in the carrier of `node`.
    pub fn element(&self, node: &str, id: &str) -> Option<usize> {
        self.carrier(node)?.get_index_of(id)
    }

    /// Follows the resolved edge ids from element `x` of their start node.
    pub fn eval_edges(&self, x: usize, edges: &[usize]) -> Value {
        let mut v = Value::Elem(x);
        for &e in edges {
            v = match v {
                Value::Elem(i) => self.maps[e][i].clone(),
                Value::Lit(_) => unreachable!("edges never leave type nodes"),
            };
        }
        v
    }

    /// Evaluates `p` at element `x` (a position in the carrier of `p.start`).
    pub fn eval_path(&self, p: &Path, x: usize) -> Result<Value, PathError> {
        let edges = self.schema.graph().resolve(p)?;
        Ok(self.eval_edges(x, &edges))
    }

    /// Evaluates `p` at the element named `id`.
    pub fn eval_path_at(&self, p: &Path, id: &str) -> Result<Value, PathError> {
        let x = self.element(&p.start, id).ok_or_else(|| PathError::UnknownNode(format!("{}:{id}", p.start)))?;
        self.eval_path(p, x)
    }

    /// Renders a value that lives at `node`: ids bare, literals quoted.
    pub fn render(&self, node: &str, v: &Value) -> String {
        match v {
            Value::Elem(i) => self
                .carrier(node)
                .and_then(|c| c.get_index(*i))
                .cloned()
                .unwrap_or_else(|| format!("#{i}")),
            Value::Lit(l) => l.to_string(),
        }
    }

    /// Compares both sides of every schema equation at every element.
    pub fn check_constraints(&self) -> ViolationReport {
        let g = self.schema.graph();
        let mut violations = Vec::new();
        for (k, eq) in self.schema.equations().iter().enumerate() {
            let (Ok(l), Ok(r)) = (g.resolve(&eq.lhs), g.resolve(&eq.rhs)) else {
                continue;
            };
            let end = g.end(&eq.lhs).expect("validated equation");
            let Some(carrier) = self.carrier(&eq.lhs.start) else { continue };
            for (x, id) in carrier.iter().enumerate() {
                let (lv, rv) = (self.eval_edges(x, &l), self.eval_edges(x, &r));
                if lv != rv {
                    violations.push(ConstraintViolation {
                        equation_index: k,
                        equation: eq.clone(),
                        element: id.clone(),
                        lhs_value: self.render(end, &lv),
                        rhs_value: self.render(end, &rv),
                    });
                }
            }
        }
        ViolationReport { violations }
    }

    /// A declaration that validates back to this instance.
    pub fn to_decl(&self, name: &str) -> InstanceDecl {
        let g = self.schema.graph();
        let mut entries = Vec::new();
        for node in self.schema.entities() {
            let c = self.carrier(node).unwrap();
            entries.push(InstanceEntry {
                target: QualName {
                    qualifier: None,
                    name: node.clone(),
                    pos: Pos::default(),
                },
                items: c
                    .iter()
                    .map(|id| RawItem {
                        key: id.clone(),
                        value: None,
                        pos: Pos::default(),
                    })
                    .collect(),
                pos: Pos::default(),
            });
        }
        for (e, edge) in g.edges().iter().enumerate() {
            let shared = g.sources_of(&edge.name).len() > 1 || self.schema.graph().has_node(&edge.name);
            let src = self.carrier(&edge.source).unwrap();
            entries.push(InstanceEntry {
                target: QualName {
                    qualifier: shared.then(|| edge.source.clone()),
                    name: edge.name.clone(),
                    pos: Pos::default(),
                },
                items: src
                    .iter()
                    .zip(&self.maps[e])
                    .map(|(id, v)| RawItem {
                        key: id.clone(),
                        value: Some(match v {
                            Value::Elem(i) => RawValue::Bare(self.render(&edge.target, &Value::Elem(*i))),
                            Value::Lit(Literal::Int(n)) => RawValue::Bare(n.to_string()),
                            Value::Lit(Literal::Str(s)) => RawValue::Quoted(s.clone()),
                        }),
                        pos: Pos::default(),
                    })
                    .collect(),
                pos: Pos::default(),
            });
        }
        InstanceDecl {
            name: name.to_owned(),
            schema: self.schema.name().to_owned(),
            entries,
            pos: Pos::default(),
        }
    }
}

enum Resolved {
    Carrier(usize),
    Edge(usize),
}

fn resolve_entry(schema: &Schema, target: &QualName) -> Result<Resolved, InstanceViolation> {
    let g = schema.graph();
    if target.qualifier.is_none() {
        if let Some(n) = g.node_id(&target.name) {
            if !schema.is_entity(&target.name) {
                return Err(InstanceViolation::CarrierForTypeNode {
                    node: target.name.clone(),
                    pos: target.pos,
                });
            }
            return Ok(Resolved::Carrier(n));
        }
    }
    let unknown = || InstanceViolation::UnknownTarget {
        name: target.to_string(),
        pos: target.pos,
    };
    match &target.qualifier {
        Some(q) => g.edge_id(q, &target.name).map(Resolved::Edge).ok_or_else(unknown),
        None => match g.sources_of(&target.name).as_slice() {
            [] => Err(unknown()),
            [only] => Ok(Resolved::Edge(g.edge_id(only, &target.name).unwrap())),
            many => Err(InstanceViolation::AmbiguousEdge {
                name: target.name.clone(),
                sources: many.join(", "),
                pos: target.pos,
            }),
        },
    }
}

/// Checks totality and codomains of a declared instance. Equations are not
/// checked here; see [`Instance::check_constraints`].
pub fn validate_instance(schema: &Arc<Schema>, decl: &InstanceDecl) -> Result<Instance, InstanceError> {
    let g = schema.graph();
    let mut violations = Vec::new();
    let mut carriers: Vec<IndexSet<String>> = vec![IndexSet::new(); g.nodes().len()];
    let mut seen_carrier = vec![false; g.nodes().len()];
    let mut edge_entries: Vec<Option<&InstanceEntry>> = vec![None; g.edges().len()];

    for entry in &decl.entries {
        match resolve_entry(schema, &entry.target) {
            Err(v) => violations.push(v),
            Ok(Resolved::Carrier(n)) => {
                if std::mem::replace(&mut seen_carrier[n], true) {
                    violations.push(InstanceViolation::DuplicateEntry {
                        name: entry.target.to_string(),
                        pos: entry.pos,
                    });
                    continue;
                }
                for item in &entry.items {
                    if let Some(v) = &item.value {
                        violations.push(InstanceViolation::MalformedItem {
                            name: entry.target.to_string(),
                            found: format!("{} -> {}", item.key, render_raw(v)),
                            reason: "carriers list element ids".into(),
                            pos: item.pos,
                        });
                    } else if !is_bare_token(&item.key) {
                        violations.push(InstanceViolation::InvalidElementId {
                            node: g.nodes()[n].clone(),
                            id: item.key.clone(),
                            pos: item.pos,
                        });
                    } else if !carriers[n].insert(item.key.clone()) {
                        violations.push(InstanceViolation::DuplicateElementId {
                            node: g.nodes()[n].clone(),
                            id: item.key.clone(),
                            pos: item.pos,
                        });
                    }
                }
            }
            Ok(Resolved::Edge(e)) => {
                if edge_entries[e].replace(entry).is_some() {
                    violations.push(InstanceViolation::DuplicateEntry {
                        name: entry.target.to_string(),
                        pos: entry.pos,
                    });
                }
            }
        }
    }

    let mut maps = Vec::with_capacity(g.edges().len());
    for (e, edge) in g.edges().iter().enumerate() {
        let label = if g.sources_of(&edge.name).len() > 1 {
            format!("{}.{}", edge.source, edge.name)
        } else {
            edge.name.clone()
        };
        let src = &carriers[g.node_id(&edge.source).unwrap()];
        let tgt = &carriers[g.node_id(&edge.target).unwrap()];
        let builtin = schema.builtin(&edge.target);
        let mut values: Vec<Option<Value>> = vec![None; src.len()];
        let mut mentioned = vec![false; src.len()];
        for item in edge_entries[e].map(|en| en.items.as_slice()).unwrap_or(&[]) {
            let Some(raw) = &item.value else {
                violations.push(InstanceViolation::MalformedItem {
                    name: label.clone(),
                    found: item.key.clone(),
                    reason: "edge maps list `element -> value` pairs".into(),
                    pos: item.pos,
                });
                continue;
            };
            let Some(x) = src.get_index_of(&item.key) else {
                violations.push(InstanceViolation::UnknownElement {
                    edge: label.clone(),
                    element: item.key.clone(),
                    node: edge.source.clone(),
                    pos: item.pos,
                });
                continue;
            };
            mentioned[x] = true;
            let mismatch = |expected: &str| InstanceViolation::LiteralTypeMismatch {
                edge: label.clone(),
                element: item.key.clone(),
                expected: expected.to_owned(),
                found: render_raw(raw),
                pos: item.pos,
            };
            let value = match (builtin, raw) {
                (None, RawValue::Bare(id)) => match tgt.get_index_of(id) {
                    Some(i) => Value::Elem(i),
                    None => {
                        violations.push(InstanceViolation::UnknownElement {
                            edge: label.clone(),
                            element: id.clone(),
                            node: edge.target.clone(),
                            pos: item.pos,
                        });
                        continue;
                    }
                },
                (None, RawValue::Quoted(_)) => {
                    violations.push(mismatch(&format!("an element of {}", edge.target)));
                    continue;
                }
                (Some(BuiltinType::String), RawValue::Quoted(s)) => Value::Lit(Literal::Str(s.clone())),
                (Some(BuiltinType::Int), RawValue::Bare(t)) => match t.parse::<i64>() {
                    Ok(n) => Value::Lit(Literal::Int(n)),
                    Err(_) => {
                        violations.push(mismatch("an Int literal"));
                        continue;
                    }
                },
                (Some(b), _) => {
                    violations.push(mismatch(&format!("a {} literal", b.name())));
                    continue;
                }
            };
            if values[x].replace(value).is_some() {
                violations.push(InstanceViolation::DuplicateEdgeValue {
                    edge: label.clone(),
                    element: item.key.clone(),
                    pos: item.pos,
                });
            }
        }
        let mut complete = Vec::with_capacity(values.len());
        for (x, v) in values.into_iter().enumerate() {
            match v {
                Some(v) => complete.push(v),
                None if mentioned[x] => {}
                None => violations.push(InstanceViolation::MissingEdgeValue {
                    edge: label.clone(),
                    element: src[x].clone(),
                }),
            }
        }
        maps.push(complete);
    }

    if !violations.is_empty() {
        return Err(InstanceError {
            instance: decl.name.clone(),
            violations,
        });
    }
    Ok(Instance {
        schema: schema.clone(),
        carriers,
        maps,
    })
}

fn render_raw(v: &RawValue) -> String {
    match v {
        RawValue::Bare(s) => s.clone(),
        RawValue::Quoted(s) => Literal::Str(s.clone()).to_string(),
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::schema::fixtures::emp_dept_schema;

    fn ids(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn s(x: &str) -> Value {
        Value::Lit(Literal::Str(x.into()))
    }

    /// The employee/department tables; `corrected` swaps the admin column so
    /// that every administrator works in their own department.
    pub fn paper_instance(corrected: bool) -> Instance {
        let schema = Arc::new(emp_dept_schema());
        // nodes: Emp, Dept, String; edges: mgr, works, Emp.name, admin, Dept.name
        let admin = if corrected { [0, 1] } else { [1, 0] };
        Instance::from_parts(
            schema,
            vec![ids(&["101", "102", "103"]), ids(&["q10", "x02"]), vec![]],
            vec![
                vec![Value::Elem(2), Value::Elem(1), Value::Elem(2)],
                vec![Value::Elem(0), Value::Elem(1), Value::Elem(0)],
                vec![s("Al"), s("Bob"), s("Carl")],
                admin.iter().map(|&i| Value::Elem(i)).collect(),
                vec![s("CS"), s("Math")],
            ],
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::paper_instance;
    use super::*;
    use crate::schema::fixtures::emp_dept_schema;

    fn item(key: &str, value: Option<RawValue>) -> RawItem {
        RawItem {
            key: key.into(),
            value,
            pos: Pos::default(),
        }
    }

    fn entry(name: &str, items: Vec<RawItem>) -> InstanceEntry {
        let (qualifier, name) = match name.split_once('.') {
            Some((q, n)) => (Some(q.to_owned()), n.to_owned()),
            None => (None, name.to_owned()),
        };
        InstanceEntry {
            target: QualName {
                qualifier,
                name,
                pos: Pos::default(),
            },
            items,
            pos: Pos::default(),
        }
    }

    #[test]
    fn paper_tables_validate_via_decl() {
        let i = paper_instance(false);
        let back = validate_instance(i.schema(), &i.to_decl("P")).unwrap();
        assert_eq!(back, i);
    }

    #[test]
    fn empty_instance_is_valid_and_satisfies_everything() {
        let schema = Arc::new(emp_dept_schema());
        let decl = InstanceDecl {
            name: "E".into(),
            schema: "S".into(),
            ..Default::default()
        };
        let i = validate_instance(&schema, &decl).unwrap();
        assert_eq!(i, Instance::empty(schema));
        assert!(i.check_constraints().is_empty());
    }

    #[test]
    fn missing_works_value() {
        let i = paper_instance(true);
        let mut decl = i.to_decl("P");
        let works = decl.entries.iter_mut().find(|e| e.target.name == "works").unwrap();
        works.items.retain(|it| it.key != "103");
        let err = validate_instance(i.schema(), &decl).unwrap_err();
        assert_eq!(
            err.violations,
            vec![InstanceViolation::MissingEdgeValue {
                edge: "works".into(),
                element: "103".into()
            }]
        );
    }

    #[test]
    fn reports_every_problem() {
        let schema = Arc::new(emp_dept_schema());
        let decl = InstanceDecl {
            name: "Bad".into(),
            schema: "S".into(),
            entries: vec![
                entry("Emp", vec![item("1", None), item("1", None)]),
                entry("Dept", vec![item("d", None)]),
                entry("mgr", vec![item("1", Some(RawValue::Bare("9".into())))]),
                entry("works", vec![item("1", Some(RawValue::Quoted("d".into())))]),
                entry("Emp.name", vec![item("1", Some(RawValue::Bare("Al".into())))]),
                entry("name", vec![]),
                entry("String", vec![]),
            ],
            pos: Pos::default(),
        };
        let err = validate_instance(&schema, &decl).unwrap_err();
        let has = |f: fn(&InstanceViolation) -> bool| err.violations.iter().any(f);
        assert!(has(|v| matches!(v, InstanceViolation::DuplicateElementId { .. })));
        assert!(has(|v| matches!(v, InstanceViolation::UnknownElement { .. })));
        assert!(has(|v| matches!(v, InstanceViolation::LiteralTypeMismatch { .. })));
        assert!(has(|v| matches!(v, InstanceViolation::AmbiguousEdge { .. })));
        assert!(has(|v| matches!(v, InstanceViolation::CarrierForTypeNode { .. })));
        assert!(has(|v| matches!(v, InstanceViolation::MissingEdgeValue { .. })));
    }

    #[test]
    fn int_literals_only_at_int_nodes() {
        let schema = Arc::new(
            Schema::build(
                "A",
                &["P"],
                &[BuiltinType::Int],
                &[("age", "P", "Int")],
                vec![],
                &Default::default(),
            )
            .unwrap(),
        );
        let decl = InstanceDecl {
            name: "I".into(),
            schema: "A".into(),
            entries: vec![
                entry("P", vec![item("101", None), item("102", None)]),
                entry(
                    "age",
                    vec![
                        item("101", Some(RawValue::Bare("-4".into()))),
                        item("102", Some(RawValue::Bare("x".into()))),
                    ],
                ),
            ],
            pos: Pos::default(),
        };
        let err = validate_instance(&schema, &decl).unwrap_err();
        assert_eq!(err.violations.len(), 1);
        assert!(matches!(err.violations[0], InstanceViolation::LiteralTypeMismatch { .. }));
    }

    #[test]
    fn eval_examples() {
        let i = paper_instance(false);
        let admin_works = Path::parse_dotted("Dept", "admin.works");
        assert_eq!(i.render("Dept", &i.eval_path_at(&admin_works, "q10").unwrap()), "x02");
        assert_eq!(i.eval_path_at(&Path::identity("Emp"), "101").unwrap(), Value::Elem(0));
        let v = i.eval_path_at(&Path::parse_dotted("Emp", "mgr.name"), "101").unwrap();
        assert_eq!(v, Value::Lit(Literal::Str("Carl".into())));
    }

    #[test]
    fn verbatim_tables_violate_admin_equation_twice() {
        let report = paper_instance(false).check_constraints();
        let got: Vec<_> = report
            .violations
            .iter()
            .map(|v| (v.element.as_str(), v.lhs_value.as_str(), v.rhs_value.as_str()))
            .collect();
        assert_eq!(got, vec![("q10", "x02", "q10"), ("x02", "q10", "x02")]);
    }

    #[test]
    fn corrected_tables_satisfy_constraints() {
        assert!(paper_instance(true).check_constraints().is_empty());
    }

    #[test]
    fn no_equations_no_violations() {
        let schema = Arc::new(
            Schema::build("L", &["A"], &[], &[("f", "A", "A")], vec![], &Default::default()).unwrap(),
        );
        let i = Instance::from_parts(
            schema,
            vec![vec!["a".into(), "b".into()]],
            vec![vec![Value::Elem(1), Value::Elem(1)]],
        )
        .unwrap();
        assert!(i.check_constraints().is_empty());
    }
}
