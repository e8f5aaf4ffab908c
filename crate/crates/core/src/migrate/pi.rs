//! Pi as compatible families over comma categories `(d ↓ F)`.
//!
//! At a target node `d`, the objects are pairs `(c, g)` with `g: d -> F(c)` a
//! normal-form path. A source edge `e: c -> c'` gives an arrow
//! `(c, g) -> (c', nf(g.F(e)))`. An output element picks a value for every
//! object such that each arrow is respected by the input's edge maps.

use std::collections::HashMap;

use super::{MigrateError, MigrationLimits};
use crate::instance::{Instance, Value};
use crate::mapping::Mapping;
use crate::presentation::{enumerate_paths_from, normalize, Budget, Enumeration, Path};

struct Comma {
    /// (source node, path) per object, ordered by path then node.
    objects: Vec<(usize, Path)>,
    index: HashMap<(usize, Path), usize>,
    /// Per object, the arrows (edge, target object).
    arrows: Vec<Vec<(usize, usize)>>,
}

fn comma(f: &Mapping, d: usize, budget: &Budget, bound: usize) -> Result<Comma, MigrateError> {
    let (cg, dg) = (f.source().graph(), f.target().graph());
    let theory = f.target().theory();
    let (paths, status) = enumerate_paths_from(theory, &dg.nodes()[d], budget).expect("known node");
    if status == Enumeration::Truncated {
        return Err(MigrateError::PiInfinite {
            node: dg.nodes()[d].clone(),
            bound,
        });
    }
    let mut objects = Vec::new();
    for g in paths {
        let end = dg.node_id(dg.end(&g).unwrap()).unwrap();
        for c in 0..cg.nodes().len() {
            if f.node_at(c) == end {
                objects.push((c, g.clone()));
            }
        }
    }
    let index: HashMap<(usize, Path), usize> = objects.iter().cloned().enumerate().map(|(k, o)| (o, k)).collect();
    let mut arrows = vec![Vec::new(); objects.len()];
    for (k, (c, g)) in objects.iter().enumerate() {
        for &e in cg.out_edges(*c) {
            let target = cg.node_id(&cg.edges()[e].target).unwrap();
            let mut p = g.clone();
            p.edges.extend(f.edge_at(e).edges.iter().cloned());
            let p = normalize(theory, &p, budget).map_err(|_| MigrateError::PiInfinite {
                node: dg.nodes()[d].clone(),
                bound,
            })?;
            let t = *index.get(&(target, p)).ok_or_else(|| MigrateError::PiInfinite {
                node: dg.nodes()[d].clone(),
                bound,
            })?;
            arrows[k].push((e, t));
        }
    }
    Ok(Comma { objects, index, arrows })
}

struct Families<'a> {
    i: &'a Instance,
    comma: &'a Comma,
    entity: Vec<bool>,
    assign: Vec<Option<Value>>,
    trail: Vec<usize>,
    found: Vec<Vec<Value>>,
    limit: usize,
}

impl Families<'_> {
    fn set(&mut self, k: usize, v: Value) -> bool {
        let mut stack = vec![(k, v)];
        while let Some((k, v)) = stack.pop() {
            match &self.assign[k] {
                Some(prev) if *prev == v => continue,
                Some(_) => return false,
                None => {}
            }
            if let Value::Elem(x) = v {
                for &(e, t) in &self.comma.arrows[k] {
                    stack.push((t, self.i.map_at(e)[x].clone()));
                }
            }
            self.assign[k] = Some(v);
            self.trail.push(k);
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let k = self.trail.pop().unwrap();
            self.assign[k] = None;
        }
    }

    /// Returns false once the limit is exceeded.
    fn run(&mut self, k: usize) -> bool {
        if k == self.assign.len() {
            if self.found.len() == self.limit {
                return false;
            }
            // Unforced type objects are reported by the caller.
            let family = self.assign.iter().map(|v| v.clone().unwrap_or(Value::Elem(usize::MAX))).collect();
            self.found.push(family);
            return true;
        }
        if self.assign[k].is_some() || !self.entity[k] {
            return self.run(k + 1);
        }
        let c = self.comma.objects[k].0;
        for x in 0..self.i.carrier_at(c).len() {
            let mark = self.trail.len();
            let ok = self.set(k, Value::Elem(x)) && !self.run(k + 1);
            self.undo(mark);
            if ok {
                return false;
            }
        }
        true
    }
}

pub(super) fn run(f: &Mapping, i: &Instance, limits: &MigrationLimits) -> Result<Instance, MigrateError> {
    let (cg, dg) = (f.source().graph(), f.target().graph());
    let d_schema = f.target();
    let budget = Budget {
        max_path_len: limits.comma_path_bound,
        ..limits.budget
    };
    let n = dg.nodes().len();
    let mut commas: Vec<Option<Comma>> = Vec::with_capacity(n);
    let mut families: Vec<Vec<Vec<Value>>> = vec![Vec::new(); n];
    let mut carriers: Vec<Vec<String>> = vec![Vec::new(); n];
    for d in 0..n {
        if !d_schema.is_entity(&dg.nodes()[d]) {
            commas.push(None);
            continue;
        }
        let comma = comma(f, d, &budget, limits.comma_path_bound)?;
        let entity: Vec<bool> = comma.objects.iter().map(|(c, _)| f.source().is_entity(&cg.nodes()[*c])).collect();
        let mut search = Families {
            i,
            comma: &comma,
            entity: entity.clone(),
            assign: vec![None; comma.objects.len()],
            trail: vec![],
            found: vec![],
            limit: limits.max_elements,
        };
        if !search.run(0) {
            return Err(MigrateError::ElementLimitExceeded {
                node: dg.nodes()[d].clone(),
                limit: limits.max_elements,
            });
        }
        let found = search.found;
        if !found.is_empty() {
            let forced: Vec<bool> = {
                let mut v = entity.clone();
                for (k, arrows) in comma.arrows.iter().enumerate() {
                    if entity[k] {
                        for &(_, t) in arrows {
                            v[t] = true;
                        }
                    }
                }
                v
            };
            if let Some(k) = forced.iter().position(|ok| !ok) {
                let (c, g) = &comma.objects[k];
                return Err(MigrateError::PiUnconstrainedAttribute {
                    edge: format!("{} at {}", cg.nodes()[*c], d_schema.raw_path(g)),
                });
            }
        }
        carriers[d] = name_families(i, &comma, &entity, &found);
        families[d] = found;
        commas.push(Some(comma));
    }

    let theory = d_schema.theory();
    let mut maps = Vec::with_capacity(dg.edges().len());
    for edge in dg.edges() {
        let s = dg.node_id(&edge.source).unwrap();
        let t = dg.node_id(&edge.target).unwrap();
        let src = commas[s].as_ref().unwrap();
        let values: Vec<Value> = if d_schema.is_entity(&edge.target) {
            let tgt = commas[t].as_ref().unwrap();
            let reindex: Vec<usize> = tgt
                .objects
                .iter()
                .map(|(c, g)| {
                    let mut p = Path::new(edge.source.clone(), vec![edge.name.clone()]);
                    p.edges.extend(g.edges.iter().cloned());
                    let p = normalize(theory, &p, &budget).expect("convergent theory");
                    src.index[&(*c, p)]
                })
                .collect();
            let lookup: HashMap<&Vec<Value>, usize> = families[t].iter().enumerate().map(|(k, fam)| (fam, k)).collect();
            families[s]
                .iter()
                .map(|fam| {
                    let image: Vec<Value> = reindex.iter().map(|&k| fam[k].clone()).collect();
                    Value::Elem(lookup[&image])
                })
                .collect()
        } else {
            if families[s].is_empty() {
                maps.push(Vec::new());
                continue;
            }
            let p = normalize(theory, &Path::new(edge.source.clone(), vec![edge.name.clone()]), &budget)
                .expect("convergent theory");
            let object = (0..cg.nodes().len())
                .filter(|&c| f.node_at(c) == t)
                .find_map(|c| src.index.get(&(c, p.clone())).copied());
            let Some(k) = object else {
                return Err(MigrateError::PiUnconstrainedAttribute {
                    edge: format!("{}.{}", edge.source, edge.name),
                });
            };
            families[s].iter().map(|fam| fam[k].clone()).collect()
        };
        maps.push(values);
    }

    Ok(Instance::from_parts(d_schema.clone(), carriers, maps).expect("limit is a valid instance"))
}

/// Names each family by its value at the first entity object when that is
/// injective, and `#k` otherwise.
fn name_families(i: &Instance, comma: &Comma, entity: &[bool], found: &[Vec<Value>]) -> Vec<String> {
    if let Some(k0) = entity.iter().position(|&e| e) {
        let c = comma.objects[k0].0;
        let names: Vec<String> = found
            .iter()
            .map(|fam| match fam[k0] {
                Value::Elem(x) => i.carrier_at(c)[x].clone(),
                Value::Lit(_) => unreachable!("entity objects hold elements"),
            })
            .collect();
        let mut seen = std::collections::HashSet::new();
        if names.iter().all(|n| seen.insert(n.as_str())) {
            return names;
        }
    }
    (0..found.len()).map(|k| format!("#{k}")).collect()
}
