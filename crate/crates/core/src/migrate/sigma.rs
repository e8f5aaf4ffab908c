//! The chase behind sigma.
//!
//! Terms are generators (one per input element, placed at the image node),
//! literals (one per distinct literal per type node) and labeled nulls. A
//! union-find with congruence closure merges terms; each class records at
//! most one image per outgoing target edge.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::{MigrateError, MigrationLimits};
use crate::instance::{Instance, Value};
use crate::mapping::Mapping;
use crate::schema::Literal;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProvenanceEntry {
    /// Source node and element.
    pub node: String,
    pub element: String,
    /// Target node and the output element it became.
    pub target_node: String,
    pub output: String,
}

#[derive(Debug, Clone)]
pub struct SigmaOutput {
    pub instance: Instance,
    /// One entry per input element, in input order.
    pub provenance: Vec<ProvenanceEntry>,
}

#[derive(Debug, Clone)]
enum Kind {
    Gen { node: usize, elem: usize },
    Lit(Literal),
    Null(usize),
}

struct Chase<'a> {
    f: &'a Mapping,
    limits: &'a MigrationLimits,
    /// Target node of each term.
    node: Vec<usize>,
    kind: Vec<Kind>,
    parent: Vec<usize>,
    /// Literal held by a class, keyed by root.
    lit: Vec<Option<Literal>>,
    /// Image of a class under a target edge, keyed by (root, edge).
    img: BTreeMap<(usize, usize), usize>,
    literals: HashMap<(usize, Literal), usize>,
    nulls: usize,
    changed: bool,
}

impl<'a> Chase<'a> {
    fn push(&mut self, node: usize, kind: Kind) -> Result<usize, MigrateError> {
        if self.kind.len() >= self.limits.max_elements {
            return Err(MigrateError::SigmaDivergence {
                reason: format!("more than {} terms", self.limits.max_elements),
            });
        }
        let t = self.kind.len();
        self.lit.push(match &kind {
            Kind::Lit(l) => Some(l.clone()),
            _ => None,
        });
        self.node.push(node);
        self.kind.push(kind);
        self.parent.push(t);
        Ok(t)
    }

    fn null(&mut self, node: usize) -> Result<usize, MigrateError> {
        let k = self.nulls;
        self.nulls += 1;
        self.changed = true;
        self.push(node, Kind::Null(k))
    }

    fn literal(&mut self, node: usize, l: &Literal) -> Result<usize, MigrateError> {
        if let Some(&t) = self.literals.get(&(node, l.clone())) {
            return Ok(t);
        }
        let t = self.push(node, Kind::Lit(l.clone()))?;
        self.literals.insert((node, l.clone()), t);
        Ok(t)
    }

    fn find(&mut self, mut t: usize) -> usize {
        let mut root = t;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[t] != root {
            let next = self.parent[t];
            self.parent[t] = root;
            t = next;
        }
        root
    }

    fn out_edges(&self, node: usize) -> &'a [usize] {
        self.f.target().graph().out_edges(node)
    }

    fn union(&mut self, a: usize, b: usize) -> Result<(), MigrateError> {
        let mut work = vec![(a, b)];
        while let Some((a, b)) = work.pop() {
            let (ra, rb) = (self.find(a), self.find(b));
            if ra == rb {
                continue;
            }
            let (root, other) = (ra.min(rb), ra.max(rb));
            match (&self.lit[root], &self.lit[other]) {
                (Some(x), Some(y)) if x != y => {
                    return Err(MigrateError::LiteralCollision {
                        node: self.f.target().graph().nodes()[self.node[root]].clone(),
                        left: x.to_string(),
                        right: y.to_string(),
                    })
                }
                (None, Some(_)) => self.lit[root] = self.lit[other].take(),
                _ => {}
            }
            self.parent[other] = root;
            self.changed = true;
            for &e in self.out_edges(self.node[root]) {
                if let Some(y) = self.img.remove(&(other, e)) {
                    match self.img.get(&(root, e)) {
                        Some(&x) => work.push((x, y)),
                        None => {
                            self.img.insert((root, e), y);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Follows `edges` from `t`, creating nulls where images are missing.
    fn walk_creating(&mut self, mut t: usize, edges: &[usize]) -> Result<usize, MigrateError> {
        let g = self.f.target().graph();
        for &e in edges {
            let r = self.find(t);
            t = match self.img.get(&(r, e)) {
                Some(&y) => y,
                None => {
                    let target = g.node_id(&g.edges()[e].target).unwrap();
                    let y = self.null(target)?;
                    self.img.insert((r, e), y);
                    y
                }
            };
        }
        Ok(t)
    }

    fn walk(&mut self, mut t: usize, edges: &[usize]) -> Option<usize> {
        for &e in edges {
            let r = self.find(t);
            t = *self.img.get(&(r, e))?;
        }
        Some(t)
    }

    fn roots_at(&mut self, node: usize) -> Vec<usize> {
        (0..self.kind.len())
            .filter(|&t| self.node[t] == node && self.parent[t] == t)
            .collect()
    }
}

pub(super) fn run(f: &Mapping, i: &Instance, limits: &MigrationLimits) -> Result<SigmaOutput, MigrateError> {
    let (cg, dg) = (f.source().graph(), f.target().graph());
    let mut ch = Chase {
        f,
        limits,
        node: vec![],
        kind: vec![],
        parent: vec![],
        lit: vec![],
        img: BTreeMap::new(),
        literals: HashMap::new(),
        nulls: 0,
        changed: false,
    };

    let mut gens: Vec<Vec<usize>> = Vec::with_capacity(cg.nodes().len());
    for c in 0..cg.nodes().len() {
        let mut row = Vec::with_capacity(i.carrier_at(c).len());
        for x in 0..i.carrier_at(c).len() {
            row.push(ch.push(f.node_at(c), Kind::Gen { node: c, elem: x })?);
        }
        gens.push(row);
    }

    let equations: Vec<(usize, Vec<usize>, Vec<usize>)> = f
        .target()
        .equations()
        .iter()
        .map(|eq| {
            (
                dg.node_id(&eq.lhs.start).unwrap(),
                dg.resolve(&eq.lhs).unwrap(),
                dg.resolve(&eq.rhs).unwrap(),
            )
        })
        .collect();

    let mut converged = false;
    for round in 0..limits.max_chase_rounds {
        ch.changed = false;
        if round == 0 {
            for (e, edge) in cg.edges().iter().enumerate() {
                let c = cg.node_id(&edge.source).unwrap();
                let path = dg.resolve(f.edge_at(e)).unwrap();
                let end_node = f.node_at(cg.node_id(&edge.target).unwrap());
                for (x, v) in i.map_at(e).iter().enumerate() {
                    let end = ch.walk_creating(gens[c][x], &path)?;
                    let want = match v {
                        Value::Elem(y) => gens[cg.node_id(&edge.target).unwrap()][*y],
                        Value::Lit(l) => ch.literal(end_node, l)?,
                    };
                    ch.union(end, want)?;
                }
            }
        }
        loop {
            let before = ch.changed;
            ch.changed = false;
            for (start, l, r) in &equations {
                for t in ch.roots_at(*start) {
                    if let (Some(a), Some(b)) = (ch.walk(t, l), ch.walk(t, r)) {
                        ch.union(a, b)?;
                    }
                }
            }
            let progressed = ch.changed;
            ch.changed |= before;
            if !progressed {
                break;
            }
        }
        for n in 0..dg.nodes().len() {
            for t in ch.roots_at(n) {
                for &e in ch.out_edges(n) {
                    if ch.find(t) == t && !ch.img.contains_key(&(t, e)) {
                        ch.walk_creating(t, &[e])?;
                    }
                }
            }
        }
        if !ch.changed {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(MigrateError::SigmaDivergence {
            reason: format!(
                "no fixpoint after {} rounds ({} nulls created)",
                limits.max_chase_rounds, ch.nulls
            ),
        });
    }

    // Quotient: output elements are the classes at entity nodes, ordered by root.
    let d = f.target();
    let mut carriers: Vec<Vec<String>> = vec![Vec::new(); dg.nodes().len()];
    let mut position: HashMap<usize, usize> = HashMap::new();
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for t in 0..ch.kind.len() {
        let r = ch.find(t);
        members.entry(r).or_default().push(t);
    }
    for (n, carrier) in carriers.iter_mut().enumerate() {
        if !d.is_entity(&dg.nodes()[n]) {
            continue;
        }
        let roots: Vec<usize> = members.keys().copied().filter(|&r| ch.node[r] == n).collect();
        // (least original id, its source node) or the least null.
        let candidates: Vec<(String, Option<usize>)> = roots
            .iter()
            .map(|r| {
                let mut best_gen: Option<(&str, usize)> = None;
                let mut best_null: Option<usize> = None;
                for &t in &members[r] {
                    match ch.kind[t] {
                        Kind::Gen { node, elem } => {
                            let id = i.carrier_at(node)[elem].as_str();
                            if best_gen.is_none_or(|(b, bn)| (id, node) < (b, bn)) {
                                best_gen = Some((id, node));
                            }
                        }
                        Kind::Null(k) => best_null = Some(best_null.map_or(k, |b| b.min(k))),
                        Kind::Lit(_) => {}
                    }
                }
                match best_gen {
                    Some((id, node)) => (id.to_owned(), Some(node)),
                    None => (format!("!{}", best_null.expect("entity classes hold a generator or a null")), None),
                }
            })
            .collect();
        let mut count: HashMap<&str, usize> = HashMap::new();
        for (name, _) in &candidates {
            *count.entry(name.as_str()).or_default() += 1;
        }
        let mut names: Vec<String> = candidates
            .iter()
            .map(|(name, src)| match src {
                Some(c) if count[name.as_str()] > 1 => format!("{name}@{}", cg.nodes()[*c]),
                _ => name.clone(),
            })
            .collect();
        let mut used = std::collections::HashSet::new();
        for name in &mut names {
            while !used.insert(name.clone()) {
                name.push('\'');
            }
        }
        for (k, &r) in roots.iter().enumerate() {
            position.insert(r, k);
        }
        *carrier = names;
    }

    let mut maps = Vec::with_capacity(dg.edges().len());
    for (e, edge) in dg.edges().iter().enumerate() {
        let s = dg.node_id(&edge.source).unwrap();
        let roots: Vec<usize> = members.keys().copied().filter(|&r| ch.node[r] == s).collect();
        let mut values = Vec::with_capacity(roots.len());
        for (k, r) in roots.into_iter().enumerate() {
            let y = ch.img[&(r, e)];
            let y = ch.find(y);
            values.push(if d.is_entity(&edge.target) {
                Value::Elem(position[&y])
            } else {
                match &ch.lit[y] {
                    Some(l) => Value::Lit(l.clone()),
                    None => {
                        return Err(MigrateError::SigmaUnconstrainedAttribute {
                            edge: format!("{}.{}", edge.source, edge.name),
                            element: carriers[s][k].clone(),
                        })
                    }
                }
            });
        }
        maps.push(values);
    }

    let mut provenance = Vec::new();
    for (c, row) in gens.iter().enumerate() {
        for (x, &t) in row.iter().enumerate() {
            let r = ch.find(t);
            let n = ch.node[r];
            provenance.push(ProvenanceEntry {
                node: cg.nodes()[c].clone(),
                element: i.carrier_at(c)[x].clone(),
                target_node: dg.nodes()[n].clone(),
                output: carriers[n][position[&r]].clone(),
            });
        }
    }

    let instance = Instance::from_parts(d.clone(), carriers, maps).expect("chase result is a valid instance");
    Ok(SigmaOutput { instance, provenance })
}
