//! Typed paths over a directed multigraph and the equational machinery on
//! them: orientation, completion, normalization and the three-valued prover.
//!
//! Paths are written diagrammatically: `admin.works` means "follow `admin`,
//! then `works`". Edge names are unique per source node, so a path is fully
//! determined by its start node and its sequence of edge names.

mod completion;
mod prove;
mod rewrite;
mod trace;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use completion::{complete, CompletionStatus, Theory};
pub use prove::{enumerate_paths, enumerate_paths_from, prove_equal, Enumeration, Exhaustion, ProofOutcome};
pub use rewrite::{normalize, normalize_traced, orient, Orientation, RewriteRule};
pub use trace::{verify_theory, verify_trace, Justification, Step, Trace, TraceError};

/// Errors raised by path construction, typing and rewriting.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("no edge `{edge}` out of node `{node}`")]
    UnknownEdge { node: String, edge: String },
    #[error("endpoint mismatch: expected a path at `{expected}`, found one at `{found}`")]
    EndpointMismatch { expected: String, found: String },
    #[error("equation `{0} = {0}` has identical sides and cannot be oriented")]
    Unorientable(Path),
    #[error("rewrite budget of {0} steps exceeded")]
    BudgetExceeded(usize),
}

/// Resource bounds for completion, proof search and path enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_completion_iterations: usize,
    pub max_rewrite_steps: usize,
    pub max_path_len: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_completion_iterations: 2048,
            max_rewrite_steps: 4096,
            max_path_len: 12,
        }
    }
}

impl Budget {
    /// Returns `None` unless every bound is strictly positive.
    pub fn new(
        max_completion_iterations: usize,
        max_rewrite_steps: usize,
        max_path_len: usize,
    ) -> Option<Self> {
        (max_completion_iterations > 0 && max_rewrite_steps > 0 && max_path_len > 0).then_some(
            Budget {
                max_completion_iterations,
                max_rewrite_steps,
                max_path_len,
            },
        )
    }
}

/// A directed edge of a schema graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub name: String,
    pub source: String,
    pub target: String,
}

/// A directed multigraph with named nodes and edges named uniquely per source.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Graph {
    nodes: Vec<String>,
    edges: Vec<Edge>,
    #[serde(skip)]
    node_index: HashMap<String, usize>,
    #[serde(skip)]
    edge_index: HashMap<(String, String), usize>,
    #[serde(skip)]
    out_edges: Vec<Vec<usize>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a node; returns `false` if the name was already present.
    pub fn add_node(&mut self, name: impl Into<String>) -> bool {
        let name = name.into();
        if self.node_index.contains_key(&name) {
            return false;
        }
        self.node_index.insert(name.clone(), self.nodes.len());
        self.nodes.push(name);
        self.out_edges.push(Vec::new());
        true
    }

    /// Adds an edge between existing nodes. Fails on an unknown endpoint or
    /// when the source already has an edge of that name.
    pub fn add_edge(
        &mut self,
        name: impl Into<String>,
        source: impl Into<String>,
        target: impl Into<String>,
    ) -> Result<usize, PathError> {
        let (name, source, target) = (name.into(), source.into(), target.into());
        let src = self.node_id(&source).ok_or_else(|| PathError::UnknownNode(source.clone()))?;
        if self.node_id(&target).is_none() {
            return Err(PathError::UnknownNode(target));
        }
        let key = (source.clone(), name.clone());
        if self.edge_index.contains_key(&key) {
            return Err(PathError::UnknownEdge { node: source, edge: name });
        }
        let id = self.edges.len();
        self.edge_index.insert(key, id);
        self.out_edges[src].push(id);
        self.edges.push(Edge { name, source, target });
        Ok(id)
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_id(&self, name: &str) -> Option<usize> {
        self.node_index.get(name).copied()
    }

    pub fn has_node(&self, name: &str) -> bool {
        self.node_index.contains_key(name)
    }

    pub fn edge_id(&self, source: &str, name: &str) -> Option<usize> {
        self.edge_index.get(&(source.to_owned(), name.to_owned())).copied()
    }

    pub fn edge(&self, source: &str, name: &str) -> Option<&Edge> {
        self.edge_id(source, name).map(|i| &self.edges[i])
    }

    /// Edge ids leaving `node`, in declaration order.
    pub fn out_edges(&self, node: usize) -> &[usize] {
        &self.out_edges[node]
    }

    /// All nodes that have an outgoing edge called `name`.
    pub fn sources_of(&self, name: &str) -> Vec<&str> {
        self.edges
            .iter()
            .filter(|e| e.name == name)
            .map(|e| e.source.as_str())
            .collect()
    }

    /// Type-checks `p` and returns its edge ids.
    pub fn resolve(&self, p: &Path) -> Result<Vec<usize>, PathError> {
        if !self.has_node(&p.start) {
            return Err(PathError::UnknownNode(p.start.clone()));
        }
        let mut at = p.start.as_str();
        let mut ids = Vec::with_capacity(p.edges.len());
        for name in &p.edges {
            let id = self.edge_id(at, name).ok_or_else(|| PathError::UnknownEdge {
                node: at.to_owned(),
                edge: name.clone(),
            })?;
            ids.push(id);
            at = &self.edges[id].target;
        }
        Ok(ids)
    }

    /// The node sequence visited by `p`; one longer than `p`.
    pub fn visited_nodes<'g>(&'g self, p: &Path) -> Result<Vec<&'g str>, PathError> {
        let start = self
            .node_id(&p.start)
            .map(|i| self.nodes[i].as_str())
            .ok_or_else(|| PathError::UnknownNode(p.start.clone()))?;
        let mut out = Vec::with_capacity(p.edges.len() + 1);
        out.push(start);
        for id in self.resolve(p)? {
            out.push(self.edges[id].target.as_str());
        }
        Ok(out)
    }

    /// The end node of a well-typed path.
    pub fn end<'g>(&'g self, p: &Path) -> Result<&'g str, PathError> {
        Ok(self.visited_nodes(p)?.pop().expect("nonempty node sequence"))
    }

    /// Concatenation `p` then `q`.
    pub fn compose(&self, p: &Path, q: &Path) -> Result<Path, PathError> {
        let end = self.end(p)?;
        self.resolve(q)?;
        if end != q.start {
            return Err(PathError::EndpointMismatch {
                expected: end.to_owned(),
                found: q.start.clone(),
            });
        }
        let mut edges = p.edges.clone();
        edges.extend(q.edges.iter().cloned());
        Ok(Path::new(p.start.clone(), edges))
    }

    /// Checks that both sides are well typed with equal endpoints.
    pub fn check_equation(&self, eq: &PathEquation) -> Result<(String, String), PathError> {
        let l_end = self.end(&eq.lhs)?;
        let r_end = self.end(&eq.rhs)?;
        if eq.lhs.start != eq.rhs.start || l_end != r_end {
            return Err(PathError::EndpointMismatch {
                expected: format!("{} -> {}", eq.lhs.start, l_end),
                found: format!("{} -> {}", eq.rhs.start, r_end),
            });
        }
        Ok((eq.lhs.start.clone(), l_end.to_owned()))
    }
}

/// A composable word of edges; the empty word is the identity at `start`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path {
    pub start: String,
    pub edges: Vec<String>,
}

impl Path {
    pub fn new(start: impl Into<String>, edges: Vec<String>) -> Self {
        Path {
            start: start.into(),
            edges,
        }
    }

    pub fn identity(node: impl Into<String>) -> Self {
        Path::new(node, Vec::new())
    }

    /// Builds a path from a dot-separated edge list, e.g. `("Dept", "admin.works")`.
    pub fn parse_dotted(start: impl Into<String>, dotted: &str) -> Self {
        let edges = if dotted.is_empty() {
            Vec::new()
        } else {
            dotted.split('.').map(str::to_owned).collect()
        };
        Path::new(start, edges)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.edges.is_empty()
    }

    /// Length first, then lexicographic on edge names.
    pub fn term_cmp(&self, other: &Path) -> Ordering {
        self.edges
            .len()
            .cmp(&other.edges.len())
            .then_with(|| self.edges.cmp(&other.edges))
    }

    /// Same word, written with an explicit start node.
    pub fn qualified(&self) -> String {
        if self.is_identity() {
            format!("id:{}", self.start)
        } else {
            format!("{}:{}", self.start, self.edges.join("."))
        }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            write!(f, "id:{}", self.start)
        } else {
            write!(f, "{}", self.edges.join("."))
        }
    }
}

/// A path equation `lhs = rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathEquation {
    pub lhs: Path,
    pub rhs: Path,
}

impl PathEquation {
    pub fn new(lhs: Path, rhs: Path) -> Self {
        PathEquation { lhs, rhs }
    }
}

impl fmt::Display for PathEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

/// Does `side` occur in `word` at `pos`? `nodes` is the node sequence of `word`.
pub(crate) fn occurs_at(word: &[String], nodes: &[&str], side: &Path, pos: usize) -> bool {
    pos + side.edges.len() <= word.len()
        && nodes[pos] == side.start
        && word[pos..pos + side.edges.len()] == side.edges[..]
}

/// `word` with `len` edges at `pos` replaced by `with`.
pub(crate) fn splice(word: &Path, pos: usize, len: usize, with: &[String]) -> Path {
    let mut edges = Vec::with_capacity(word.edges.len() - len + with.len());
    edges.extend_from_slice(&word.edges[..pos]);
    edges.extend_from_slice(with);
    edges.extend_from_slice(&word.edges[pos + len..]);
    Path::new(word.start.clone(), edges)
}
