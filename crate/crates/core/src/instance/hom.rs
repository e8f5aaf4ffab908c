//! Instance homomorphisms (natural transformations between instances).

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::{Instance, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomError {
    #[error("source and target live on different schemas")]
    SchemaMismatch,
    #[error("component at `{node}` has {found} entries, source carrier has {expected}")]
    ComponentShape { node: String, expected: usize, found: usize },
    #[error("component at `{node}` sends `{element}` outside the target carrier")]
    OutOfRange { node: String, element: String },
}

/// A family of functions, one per entity node, from source to target carriers.
#[derive(Debug, Clone)]
pub struct InstanceMorphism {
    source: Arc<Instance>,
    target: Arc<Instance>,
    /// Per graph node, target positions indexed by source positions.
    components: Vec<Vec<usize>>,
}

impl PartialEq for InstanceMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.components == other.components && *self.source == *other.source && *self.target == *other.target
    }
}

impl Eq for InstanceMorphism {}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NaturalityViolation {
    pub edge: String,
    pub element: String,
    /// Image of the edge value under the morphism.
    pub expected: String,
    /// Edge value at the image in the target.
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct HomReport {
    pub violations: Vec<NaturalityViolation>,
}

impl HomReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for HomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(
                f,
                "edge {} at {}: h(edge(x)) = {} but edge(h(x)) = {}",
                v.edge, v.element, v.expected, v.found
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HomEnumeration {
    Complete,
    Capped,
}

fn same_schema(a: &Instance, b: &Instance) -> bool {
    Arc::ptr_eq(a.schema(), b.schema()) || a.schema() == b.schema()
}

impl InstanceMorphism {
    /// Checks structure only; naturality is [`InstanceMorphism::check`].
    pub fn new(
        source: Arc<Instance>,
        target: Arc<Instance>,
        components: Vec<Vec<usize>>,
    ) -> Result<InstanceMorphism, HomError> {
        if !same_schema(&source, &target) {
            return Err(HomError::SchemaMismatch);
        }
        let g = source.schema().graph();
        for (n, node) in g.nodes().iter().enumerate() {
            let (src, tgt) = (source.carrier_at(n), target.carrier_at(n));
            let comp = components.get(n).map(Vec::as_slice).unwrap_or(&[]);
            if comp.len() != src.len() {
                return Err(HomError::ComponentShape {
                    node: node.clone(),
                    expected: src.len(),
                    found: comp.len(),
                });
            }
            if let Some(x) = comp.iter().position(|&y| y >= tgt.len()) {
                return Err(HomError::OutOfRange {
                    node: node.clone(),
                    element: src[x].clone(),
                });
            }
        }
        let mut components = components;
        components.resize(g.nodes().len(), Vec::new());
        Ok(InstanceMorphism {
            source,
            target,
            components,
        })
    }

    pub fn identity(i: Arc<Instance>) -> InstanceMorphism {
        let components = (0..i.schema().graph().nodes().len())
            .map(|n| (0..i.carrier_at(n).len()).collect())
            .collect();
        InstanceMorphism {
            source: i.clone(),
            target: i,
            components,
        }
    }

    pub fn source(&self) -> &Arc<Instance> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Instance> {
        &self.target
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    /// Image of element `x` of node index `node`.
    pub fn apply(&self, node: usize, x: usize) -> usize {
        self.components[node][x]
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &InstanceMorphism) -> Result<InstanceMorphism, HomError> {
        if *self.target != *next.source {
            return Err(HomError::SchemaMismatch);
        }
        let components = self
            .components
            .iter()
            .zip(&next.components)
            .map(|(f, g)| f.iter().map(|&y| g[y]).collect())
            .collect();
        Ok(InstanceMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            components,
        })
    }

    /// Naturality on every generating edge; attribute values must be equal.
    pub fn check(&self) -> HomReport {
        let (i, j) = (&*self.source, &*self.target);
        let g = i.schema().graph();
        let mut violations = Vec::new();
        for (e, edge) in g.edges().iter().enumerate() {
            let c = g.node_id(&edge.source).unwrap();
            let t = g.node_id(&edge.target).unwrap();
            for (x, v) in i.map_at(e).iter().enumerate() {
                let hx = self.components[c][x];
                let expected = match v {
                    Value::Elem(y) => Value::Elem(self.components[t][*y]),
                    lit => lit.clone(),
                };
                let found = &j.map_at(e)[hx];
                if &expected != found {
                    violations.push(NaturalityViolation {
                        edge: format!("{}.{}", edge.source, edge.name),
                        element: i.carrier_at(c)[x].clone(),
                        expected: j.render(&edge.target, &expected),
                        found: j.render(&edge.target, found),
                    });
                }
            }
        }
        HomReport { violations }
    }

    pub fn is_bijective(&self) -> bool {
        self.components.iter().enumerate().all(|(n, comp)| {
            let mut seen = vec![false; self.target.carrier_at(n).len()];
            comp.len() == seen.len() && comp.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
        })
    }
}

/// Free-standing form of [`InstanceMorphism::check`].
pub fn check_hom(h: &InstanceMorphism) -> HomReport {
    h.check()
}

/// Backtracking search over component values, elements visited in a fixed
/// order (nodes in graph order, then carrier order). Assigning an element
/// forces the images of its edge successors, so conflicts prune early.
struct Search<'a> {
    i: &'a Instance,
    j: &'a Instance,
    injective: bool,
    order: Vec<(usize, usize)>,
    assign: Vec<Vec<Option<usize>>>,
    used: Vec<Vec<bool>>,
    trail: Vec<(usize, usize)>,
    /// Per node, the out-edges as (edge, target node, is attribute).
    out: Vec<Vec<(usize, usize, bool)>>,
}

impl<'a> Search<'a> {
    fn new(i: &'a Instance, j: &'a Instance, injective: bool) -> Self {
        let g = i.schema().graph();
        let n = g.nodes().len();
        let mut order = Vec::new();
        let mut out = vec![Vec::new(); n];
        for (node, edges) in out.iter_mut().enumerate() {
            for x in 0..i.carrier_at(node).len() {
                order.push((node, x));
            }
            for &e in g.out_edges(node) {
                let edge = &g.edges()[e];
                let t = g.node_id(&edge.target).unwrap();
                edges.push((e, t, !i.schema().is_entity(&edge.target)));
            }
        }
        Search {
            i,
            j,
            injective,
            order,
            assign: (0..n).map(|k| vec![None; i.carrier_at(k).len()]).collect(),
            used: (0..n).map(|k| vec![false; j.carrier_at(k).len()]).collect(),
            trail: Vec::new(),
            out,
        }
    }

    fn set(&mut self, node: usize, x: usize, y: usize) -> bool {
        let mut stack = vec![(node, x, y)];
        while let Some((c, x, y)) = stack.pop() {
            match self.assign[c][x] {
                Some(prev) if prev == y => continue,
                Some(_) => return false,
                None => {}
            }
            if self.injective && self.used[c][y] {
                return false;
            }
            self.assign[c][x] = Some(y);
            if self.injective {
                self.used[c][y] = true;
            }
            self.trail.push((c, x));
            for &(e, t, attr) in &self.out[c] {
                let (v, w) = (&self.i.map_at(e)[x], &self.j.map_at(e)[y]);
                if attr {
                    if v != w {
                        return false;
                    }
                } else if let (Value::Elem(x2), Value::Elem(y2)) = (v, w) {
                    stack.push((t, *x2, *y2));
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (c, x) = self.trail.pop().unwrap();
            if self.injective {
                let y = self.assign[c][x].unwrap();
                self.used[c][y] = false;
            }
            self.assign[c][x] = None;
        }
    }

    /// Calls `emit` on each hom; stops early when `emit` returns false.
    fn run(&mut self, pos: usize, emit: &mut dyn FnMut(Vec<Vec<usize>>) -> bool) -> bool {
        let Some(&(c, x)) = self.order.get(pos) else {
            let comps = self
                .assign
                .iter()
                .map(|row| row.iter().map(|v| v.unwrap()).collect())
                .collect();
            return emit(comps);
        };
        if self.assign[c][x].is_some() {
            return self.run(pos + 1, emit);
        }
        for y in 0..self.j.carrier_at(c).len() {
            let mark = self.trail.len();
            if self.set(c, x, y) && !self.run(pos + 1, emit) {
                self.undo(mark);
                return false;
            }
            self.undo(mark);
        }
        true
    }
}

/// All homomorphisms `i -> j`, each exactly once, up to `cap` of them.
pub fn enumerate_homs(
    i: &Arc<Instance>,
    j: &Arc<Instance>,
    cap: usize,
) -> Result<(Vec<InstanceMorphism>, HomEnumeration), HomError> {
    if !same_schema(i, j) {
        return Err(HomError::SchemaMismatch);
    }
    let mut found = Vec::new();
    let mut capped = false;
    Search::new(i, j, false).run(0, &mut |components| {
        if found.len() == cap {
            capped = true;
            return false;
        }
        found.push(InstanceMorphism {
            source: i.clone(),
            target: j.clone(),
            components,
        });
        true
    });
    let status = if capped { HomEnumeration::Capped } else { HomEnumeration::Complete };
    Ok((found, status))
}

/// Number of homomorphisms `i -> j`, stopping once it exceeds `cap`.
pub fn count_homs(i: &Instance, j: &Instance, cap: usize) -> Result<(usize, HomEnumeration), HomError> {
    if !same_schema(i, j) {
        return Err(HomError::SchemaMismatch);
    }
    let mut n = 0usize;
    let mut capped = false;
    Search::new(i, j, false).run(0, &mut |_| {
        if n == cap {
            capped = true;
            return false;
        }
        n += 1;
        true
    });
    Ok((n, if capped { HomEnumeration::Capped } else { HomEnumeration::Complete }))
}

/// An isomorphism `i -> j` if one exists.
pub fn iso_check(i: &Arc<Instance>, j: &Arc<Instance>) -> Option<InstanceMorphism> {
    if !same_schema(i, j) {
        return None;
    }
    let n = i.schema().graph().nodes().len();
    if (0..n).any(|k| i.carrier_at(k).len() != j.carrier_at(k).len()) {
        return None;
    }
    let mut result = None;
    Search::new(i, j, true).run(0, &mut |components| {
        result = Some(components);
        false
    });
    result.map(|components| InstanceMorphism {
        source: i.clone(),
        target: j.clone(),
        components,
    })
}
