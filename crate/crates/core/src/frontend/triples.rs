//! An instance as a graph: one `(subject, edge, object)` triple per element
//! and outgoing edge.

use std::fmt;

use serde::Serialize;

use crate::instance::{Instance, Value};
use crate::schema::Literal;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Object {
    Element(String),
    Literal(Literal),
}

impl fmt::Display for Object {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Object::Element(id) => f.write_str(id),
            Object::Literal(l) => write!(f, "{l}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Triple {
    pub subject: String,
    pub edge: String,
    pub object: Object,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct TripleSet {
    pub triples: Vec<Triple>,
}

impl TripleSet {
    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }
}

/// Tab-separated, one triple per line.
impl fmt::Display for TripleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.triples {
            writeln!(f, "{}\t{}\t{}", t.subject, t.edge, t.object)?;
        }
        Ok(())
    }
}

pub fn export_triples(i: &Instance) -> TripleSet {
    let g = i.schema().graph();
    let mut triples = Vec::new();
    for (n, _) in g.nodes().iter().enumerate() {
        for (x, id) in i.carrier_at(n).iter().enumerate() {
            for &e in g.out_edges(n) {
                let edge = &g.edges()[e];
                let object = match &i.map_at(e)[x] {
                    Value::Elem(y) => Object::Element(i.carrier_at(g.node_id(&edge.target).unwrap())[*y].clone()),
                    Value::Lit(l) => Object::Literal(l.clone()),
                };
                triples.push(Triple {
                    subject: id.clone(),
                    edge: edge.name.clone(),
                    object,
                });
            }
        }
    }
    TripleSet { triples }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::paper_instance;

    #[test]
    fn paper_instance_triples() {
        let i = paper_instance(true);
        let t = export_triples(&i);
        assert_eq!(t.len(), 13);
        let text = t.to_string();
        assert!(text.lines().any(|l| l == "101\tworks\tq10"));
        assert!(text.lines().any(|l| l == "103\tname\t\"Carl\""));
        assert!(export_triples(&Instance::empty(i.schema().clone())).is_empty());
    }
}
