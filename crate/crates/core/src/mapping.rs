//! Schema mappings: node and edge assignments that present a functor.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::frontend::ast::{EdgeAssign, MappingDecl, NodeAssign, Pos, QualName};
use crate::presentation::{prove_equal, Budget, Path, PathError, ProofOutcome, Trace};
use crate::schema::{resolve_path, Schema};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MappingViolation {
    #[error("{pos}: `{name}` is not a node of `{schema}`")]
    UnknownNode { name: String, schema: String, pos: Pos },
    #[error("{pos}: `{name}` is not an edge of `{schema}`")]
    UnknownEdge { name: String, schema: String, pos: Pos },
    #[error("{pos}: edge `{name}` leaves several nodes ({sources}); write `Node.{name}`")]
    AmbiguousEdge { name: String, sources: String, pos: Pos },
    #[error("{pos}: `{name}` is assigned twice")]
    DuplicateAssignment { name: String, pos: Pos },
    #[error("no assignment for {kind} `{name}`")]
    MissingAssignment { kind: &'static str, name: String },
    #[error("{pos}: edge `{edge}` must go to a path {expected}, but `{path}` runs {found}")]
    EndpointMismatch {
        edge: String,
        path: String,
        expected: String,
        found: String,
        pos: Pos,
    },
    #[error("{pos}: `{node}` cannot be sent to `{target}` (type nodes map to the same builtin, entities to entities)")]
    BuiltinMismatch { node: String, target: String, pos: Pos },
    #[error("{pos}: bad path `{path}`: {reason}")]
    BadPath { path: String, reason: String, pos: Pos },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MappingError {
    #[error("{}", render_invalid(.mapping, .violations))]
    Invalid {
        mapping: String,
        violations: Vec<MappingViolation>,
    },
    #[error("cannot compose `{first}` with `{second}`: `{first}` ends at `{reached}` but `{second}` starts at `{expected}`")]
    SchemaMismatch {
        first: String,
        second: String,
        reached: String,
        expected: String,
    },
}

fn render_invalid(mapping: &str, violations: &[MappingViolation]) -> String {
    let mut s = format!("mapping `{mapping}` is invalid");
    for v in violations {
        s.push_str(&format!("\n  {v}"));
    }
    s
}

/// A functor presentation `source -> target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mapping {
    name: String,
    source: Arc<Schema>,
    target: Arc<Schema>,
    /// Target node index per source node index.
    nodes: Vec<usize>,
    /// Target path per source edge index.
    edges: Vec<Path>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FunctorialityVerdict {
    /// One trace per source equation.
    Functorial(Vec<Trace>),
    /// The first refuted equation (by index) with both images.
    NotFunctorial { equation: usize, lhs: Path, rhs: Path },
    /// Indices of the equations the prover could not settle.
    Undetermined(Vec<usize>),
}

impl FunctorialityVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            FunctorialityVerdict::Functorial(_) => "Functorial",
            FunctorialityVerdict::NotFunctorial { .. } => "NotFunctorial",
            FunctorialityVerdict::Undetermined(_) => "Undetermined",
        }
    }
}

impl fmt::Display for FunctorialityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctorialityVerdict::Functorial(_) => write!(f, "Functorial"),
            FunctorialityVerdict::NotFunctorial { equation, lhs, rhs } => {
                write!(f, "NotFunctorial: equation #{equation} maps to {lhs} = {rhs}, which does not hold")
            }
            FunctorialityVerdict::Undetermined(eqs) => {
                let list: Vec<String> = eqs.iter().map(|k| format!("#{k}")).collect();
                write!(f, "Undetermined: no verdict for equations {}", list.join(", "))
            }
        }
    }
}

impl Mapping {
    /// Builds a mapping from resolved parts; `nodes` lists every source node
    /// (type nodes may be omitted and are sent to themselves).
    pub fn build(
        name: &str,
        source: Arc<Schema>,
        target: Arc<Schema>,
        nodes: &[(&str, &str)],
        edges: &[(&str, &str, Path)],
    ) -> Result<Mapping, MappingError> {
        let decl = MappingDecl {
            name: name.to_owned(),
            source: source.name().to_owned(),
            target: target.name().to_owned(),
            nodes: nodes
                .iter()
                .map(|(s, t)| NodeAssign {
                    source: s.to_string(),
                    target: t.to_string(),
                    pos: Pos::default(),
                })
                .collect(),
            edges: edges
                .iter()
                .map(|(s, e, p)| EdgeAssign {
                    edge: QualName {
                        qualifier: Some(s.to_string()),
                        name: e.to_string(),
                        pos: Pos::default(),
                    },
                    path: crate::schema::raw_of(p),
                    pos: Pos::default(),
                })
                .collect(),
            pos: Pos::default(),
        };
        validate_mapping(source, target, &decl)
    }

    pub fn identity(schema: Arc<Schema>) -> Mapping {
        let g = schema.graph();
        Mapping {
            name: format!("id_{}", schema.name()),
            nodes: (0..g.nodes().len()).collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| Path::new(e.source.clone(), vec![e.name.clone()]))
                .collect(),
            source: schema.clone(),
            target: schema,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Mapping {
        self.name = name.into();
        self
    }

    pub fn source(&self) -> &Arc<Schema> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Schema> {
        &self.target
    }

    /// Target node index of source node index `n`.
    pub fn node_at(&self, n: usize) -> usize {
        self.nodes[n]
    }

    pub fn node(&self, name: &str) -> Option<&str> {
        let n = self.source.graph().node_id(name)?;
        Some(&self.target.graph().nodes()[self.nodes[n]])
    }

    /// Image of source edge index `e`.
    pub fn edge_at(&self, e: usize) -> &Path {
        &self.edges[e]
    }

    /// Image of a path given by its start node index and resolved edge ids.
    pub fn apply_edges(&self, start: usize, edges: &[usize]) -> Path {
        let mut out = Path::identity(self.target.graph().nodes()[self.nodes[start]].clone());
        for &e in edges {
            out.edges.extend(self.edges[e].edges.iter().cloned());
        }
        out
    }

    /// Homomorphic extension of the edge assignment to paths.
    pub fn apply_to_path(&self, p: &Path) -> Result<Path, PathError> {
        let g = self.source.graph();
        let start = g.node_id(&p.start).ok_or_else(|| PathError::UnknownNode(p.start.clone()))?;
        let edges = g.resolve(p)?;
        Ok(self.apply_edges(start, &edges))
    }

    /// Proves the image of every source equation in the target theory.
    pub fn equation_outcomes(&self, budget: &Budget) -> Vec<(Path, Path, ProofOutcome)> {
        self.source
            .equations()
            .iter()
            .map(|eq| {
                let lhs = self.apply_to_path(&eq.lhs).expect("validated equation");
                let rhs = self.apply_to_path(&eq.rhs).expect("validated equation");
                let outcome = prove_equal(self.target.theory(), &lhs, &rhs, budget).expect("images share endpoints");
                (lhs, rhs, outcome)
            })
            .collect()
    }

    pub fn check_functoriality(&self, budget: &Budget) -> FunctorialityVerdict {
        let outcomes = self.equation_outcomes(budget);
        let mut traces = Vec::new();
        let mut unknown = Vec::new();
        for (k, (lhs, rhs, outcome)) in outcomes.into_iter().enumerate() {
            match outcome {
                ProofOutcome::Proven(t) => traces.push(t),
                ProofOutcome::Refuted => return FunctorialityVerdict::NotFunctorial { equation: k, lhs, rhs },
                ProofOutcome::Unknown(_) => unknown.push(k),
            }
        }
        if unknown.is_empty() {
            FunctorialityVerdict::Functorial(traces)
        } else {
            FunctorialityVerdict::Undetermined(unknown)
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Mapping) -> Result<Mapping, MappingError> {
        if *self.target != *next.source {
            return Err(MappingError::SchemaMismatch {
                first: self.name.clone(),
                second: next.name.clone(),
                reached: self.target.name().to_owned(),
                expected: next.source.name().to_owned(),
            });
        }
        let mid = self.target.graph();
        let edges = self
            .edges
            .iter()
            .map(|p| {
                let start = mid.node_id(&p.start).unwrap();
                next.apply_edges(start, &mid.resolve(p).unwrap())
            })
            .collect();
        Ok(Mapping {
            name: format!("{}_{}", self.name, next.name),
            source: self.source.clone(),
            target: next.target.clone(),
            nodes: self.nodes.iter().map(|&n| next.nodes[n]).collect(),
            edges,
        })
    }

    /// A declaration that validates back to this mapping.
    pub fn to_decl(&self) -> MappingDecl {
        let (sg, tg) = (self.source.graph(), self.target.graph());
        MappingDecl {
            name: self.name.clone(),
            source: self.source.name().to_owned(),
            target: self.target.name().to_owned(),
            nodes: sg
                .nodes()
                .iter()
                .zip(&self.nodes)
                .map(|(s, &t)| NodeAssign {
                    source: s.clone(),
                    target: tg.nodes()[t].clone(),
                    pos: Pos::default(),
                })
                .collect(),
            edges: sg
                .edges()
                .iter()
                .zip(&self.edges)
                .map(|(e, p)| EdgeAssign {
                    edge: QualName {
                        qualifier: (sg.sources_of(&e.name).len() > 1).then(|| e.source.clone()),
                        name: e.name.clone(),
                        pos: Pos::default(),
                    },
                    path: self.target.raw_path(p),
                    pos: Pos::default(),
                })
                .collect(),
            pos: Pos::default(),
        }
    }
}

/// Checks totality and endpoint compatibility. Functoriality is a separate
/// step: [`Mapping::check_functoriality`].
pub fn validate_mapping(source: Arc<Schema>, target: Arc<Schema>, decl: &MappingDecl) -> Result<Mapping, MappingError> {
    let (sg, tg) = (source.graph(), target.graph());
    let mut violations = Vec::new();

    let mut nodes: Vec<Option<usize>> = vec![None; sg.nodes().len()];
    for a in &decl.nodes {
        let Some(s) = sg.node_id(&a.source) else {
            violations.push(MappingViolation::UnknownNode {
                name: a.source.clone(),
                schema: source.name().to_owned(),
                pos: a.pos,
            });
            continue;
        };
        let Some(t) = tg.node_id(&a.target) else {
            violations.push(MappingViolation::UnknownNode {
                name: a.target.clone(),
                schema: target.name().to_owned(),
                pos: a.pos,
            });
            continue;
        };
        let ok = match source.builtin(&a.source) {
            Some(b) => target.builtin(&a.target) == Some(b),
            None => target.is_entity(&a.target),
        };
        if !ok {
            violations.push(MappingViolation::BuiltinMismatch {
                node: a.source.clone(),
                target: a.target.clone(),
                pos: a.pos,
            });
        } else if nodes[s].replace(t).is_some() {
            violations.push(MappingViolation::DuplicateAssignment {
                name: a.source.clone(),
                pos: a.pos,
            });
        }
    }
    for (n, name) in sg.nodes().iter().enumerate() {
        if nodes[n].is_some() {
            continue;
        }
        match source.builtin(name) {
            Some(b) => match tg.node_id(b.name()).filter(|_| target.builtin(b.name()).is_some()) {
                Some(t) => nodes[n] = Some(t),
                None => violations.push(MappingViolation::BuiltinMismatch {
                    node: name.clone(),
                    target: format!("(no `{}` in `{}`)", b.name(), target.name()),
                    pos: decl.pos,
                }),
            },
            None => violations.push(MappingViolation::MissingAssignment {
                kind: "node",
                name: name.clone(),
            }),
        }
    }

    let mut edges: Vec<Option<Path>> = vec![None; sg.edges().len()];
    let mut attempted = vec![false; sg.edges().len()];
    for a in &decl.edges {
        let e = match &a.edge.qualifier {
            Some(q) => sg.edge_id(q, &a.edge.name),
            None => match sg.sources_of(&a.edge.name).as_slice() {
                [only] => sg.edge_id(only, &a.edge.name),
                [] => None,
                many => {
                    violations.push(MappingViolation::AmbiguousEdge {
                        name: a.edge.name.clone(),
                        sources: many.join(", "),
                        pos: a.pos,
                    });
                    continue;
                }
            },
        };
        let Some(e) = e else {
            violations.push(MappingViolation::UnknownEdge {
                name: a.edge.to_string(),
                schema: source.name().to_owned(),
                pos: a.pos,
            });
            continue;
        };
        attempted[e] = true;
        let edge = &sg.edges()[e];
        let (Some(fs), Some(ft)) = (
            nodes[sg.node_id(&edge.source).unwrap()],
            nodes[sg.node_id(&edge.target).unwrap()],
        ) else {
            continue;
        };
        let (fs, ft) = (&tg.nodes()[fs], &tg.nodes()[ft]);
        let path = match resolve_path(tg, &a.path, Some(fs)) {
            Ok(p) => p,
            Err(err) => {
                violations.push(match err {
                    crate::schema::SchemaViolation::BadPath { path, reason, pos } => {
                        MappingViolation::BadPath { path, reason, pos }
                    }
                    other => MappingViolation::BadPath {
                        path: a.path.to_string(),
                        reason: other.to_string(),
                        pos: a.pos,
                    },
                });
                continue;
            }
        };
        let end = tg.end(&path).unwrap();
        if path.start != *fs || end != ft {
            violations.push(MappingViolation::EndpointMismatch {
                edge: format!("{}.{}", edge.source, edge.name),
                path: a.path.to_string(),
                expected: format!("{fs} -> {ft}"),
                found: format!("{} -> {end}", path.start),
                pos: a.pos,
            });
            continue;
        }
        if edges[e].replace(path).is_some() {
            violations.push(MappingViolation::DuplicateAssignment {
                name: a.edge.to_string(),
                pos: a.pos,
            });
        }
    }
    for (e, edge) in sg.edges().iter().enumerate() {
        let endpoints_known =
            nodes[sg.node_id(&edge.source).unwrap()].is_some() && nodes[sg.node_id(&edge.target).unwrap()].is_some();
        if edges[e].is_none() && !attempted[e] && endpoints_known {
            violations.push(MappingViolation::MissingAssignment {
                kind: "edge",
                name: format!("{}.{}", edge.source, edge.name),
            });
        }
    }

    if !violations.is_empty() {
        return Err(MappingError::Invalid {
            mapping: decl.name.clone(),
            violations,
        });
    }
    Ok(Mapping {
        name: decl.name.clone(),
        source,
        target,
        nodes: nodes.into_iter().map(Option::unwrap).collect(),
        edges: edges.into_iter().map(Option::unwrap).collect(),
    })
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::presentation::PathEquation;

    /// One entity `node` with a loop `edge`, optionally idempotent.
    pub fn loop_schema(name: &str, node: &str, edge: &str, idempotent: bool) -> Arc<Schema> {
        let eqs = if idempotent {
            vec![PathEquation::new(
                Path::new(node, vec![edge.into(), edge.into()]),
                Path::new(node, vec![edge.into()]),
            )]
        } else {
            vec![]
        };
        Arc::new(Schema::build(name, &[node], &[], &[(edge, node, node)], eqs, &Budget::default()).unwrap())
    }
}
