//! Seeded random schemas, mappings and instances, plus brute-force oracles
//! that only look at raw tables.

#![allow(dead_code)]

use std::sync::Arc;

use catmig::instance::{Instance, Value};
use catmig::mapping::{FunctorialityVerdict, Mapping};
use catmig::presentation::{Budget, Enumeration, Path, PathEquation};
use catmig::schema::{BuiltinType, Literal, Schema};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape knobs for [`random_schema`].
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_nodes: usize,
    /// Attach `String`/`Int` attributes.
    pub attributes: bool,
    /// Allow idempotent loops `l.l = l`.
    pub loops: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_nodes: 3,
            attributes: false,
            loops: true,
        }
    }
}

/// A finite category: edges only go from `N<i>` to `N<j>` with `i < j`, loops
/// are idempotent, and some parallel paths are made to commute.
pub fn random_schema(rng: &mut Rng8, name: &str, shape: Shape) -> Arc<Schema> {
    loop {
        if let Some(s) = try_schema(rng, name, shape) {
            return Arc::new(s);
        }
    }
}

fn try_schema(rng: &mut Rng8, name: &str, shape: Shape) -> Option<Schema> {
    let k = rng.gen_range(1..=shape.max_nodes);
    let nodes: Vec<String> = (0..k).map(|i| format!("N{i}")).collect();
    let mut edges: Vec<(String, String, String)> = Vec::new();
    let mut fresh = 0;
    for i in 0..k {
        for j in i + 1..k {
            for _ in 0..rng.gen_range(0..=2) {
                edges.push((format!("f{fresh}"), nodes[i].clone(), nodes[j].clone()));
                fresh += 1;
            }
        }
    }
    let mut equations = Vec::new();
    if shape.loops {
        for n in &nodes {
            if rng.gen_bool(0.3) {
                let l = format!("l{fresh}");
                fresh += 1;
                edges.push((l.clone(), n.clone(), n.clone()));
                let twice = Path::new(n.clone(), vec![l.clone(), l.clone()]);
                equations.push(PathEquation::new(twice, Path::new(n.clone(), vec![l])));
            }
        }
    }
    let mut types = Vec::new();
    if shape.attributes {
        types.push(BuiltinType::String);
        if rng.gen_bool(0.5) {
            types.push(BuiltinType::Int);
        }
        for n in &nodes {
            if rng.gen_bool(0.6) {
                let t = types.choose(rng).unwrap().name();
                edges.push((format!("a{fresh}"), n.clone(), t.to_owned()));
                fresh += 1;
            }
        }
    }
    // Candidate paths of length <= 2 that avoid loops, grouped by endpoints.
    let plain: Vec<&(String, String, String)> = edges.iter().filter(|(_, s, t)| s != t).collect();
    let mut paths: Vec<(Path, String)> = plain
        .iter()
        .map(|(e, s, t)| (Path::new(s.clone(), vec![e.clone()]), t.clone()))
        .collect();
    for (e1, s1, t1) in &plain {
        for (e2, s2, t2) in &plain {
            if t1 == s2 {
                paths.push((Path::new(s1.clone(), vec![e1.clone(), e2.clone()]), t2.clone()));
            }
        }
    }
    for a in 0..paths.len() {
        for b in a + 1..paths.len() {
            let (p, pt) = &paths[a];
            let (q, qt) = &paths[b];
            if p.start == q.start && pt == qt && rng.gen_bool(0.35) {
                equations.push(PathEquation::new(q.clone(), p.clone()));
            }
        }
    }
    let entity_refs: Vec<&str> = nodes.iter().map(String::as_str).collect();
    let edge_refs: Vec<(&str, &str, &str)> = edges
        .iter()
        .map(|(n, s, t)| (n.as_str(), s.as_str(), t.as_str()))
        .collect();
    let s = Schema::build(name, &entity_refs, &types, &edge_refs, equations, &Budget::default()).ok()?;
    s.theory().is_convergent().then_some(s)
}

/// A random mapping `source -> target` that is Functorial, if one turns up.
pub fn random_mapping(rng: &mut Rng8, name: &str, source: &Arc<Schema>, target: &Arc<Schema>) -> Option<Mapping> {
    let budget = Budget::default();
    let sg = source.graph();
    for _ in 0..40 {
        let mut node_map: Vec<(String, String)> = Vec::new();
        for n in source.entities() {
            node_map.push((n.clone(), target.entities().choose(rng).unwrap().clone()));
        }
        let image = |n: &str| -> String {
            node_map
                .iter()
                .find(|(s, _)| s == n)
                .map(|(_, t)| t.clone())
                .unwrap_or_else(|| n.to_owned())
        };
        let mut edge_map = Vec::new();
        let mut ok = true;
        for e in sg.edges() {
            let (a, b) = (image(&e.source), image(&e.target));
            if !target.graph().has_node(&b) {
                ok = false;
                break;
            }
            match target.hom_set(&a, &b, &budget) {
                Ok((paths, Enumeration::Complete)) if !paths.is_empty() => {
                    edge_map.push((e.source.clone(), e.name.clone(), paths.choose(rng).unwrap().clone()));
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let nodes: Vec<(&str, &str)> = node_map.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let edges: Vec<(&str, &str, Path)> = edge_map
            .iter()
            .map(|(s, e, p)| (s.as_str(), e.as_str(), p.clone()))
            .collect();
        let Ok(m) = Mapping::build(name, source.clone(), target.clone(), &nodes, &edges) else {
            continue;
        };
        if matches!(m.check_functoriality(&budget), FunctorialityVerdict::Functorial(_)) {
            return Some(m);
        }
    }
    None
}

fn random_literal(rng: &mut Rng8, t: BuiltinType, pool: usize) -> Literal {
    match t {
        BuiltinType::String => Literal::Str(["p", "q", "r"][rng.gen_range(0..pool.min(3))].to_owned()),
        BuiltinType::Int => Literal::Int(rng.gen_range(0..pool.min(3)) as i64),
    }
}

fn fill(rng: &mut Rng8, schema: &Arc<Schema>, sizes: &[usize], pool: usize) -> Instance {
    let g = schema.graph();
    let carriers: Vec<Vec<String>> = g
        .nodes()
        .iter()
        .zip(sizes)
        .map(|(n, &k)| (0..k).map(|x| format!("{}_{x}", n.to_lowercase())).collect())
        .collect();
    let maps = g
        .edges()
        .iter()
        .map(|e| {
            let src = sizes[g.node_id(&e.source).unwrap()];
            let tgt = sizes[g.node_id(&e.target).unwrap()];
            (0..src)
                .map(|_| match schema.builtin(&e.target) {
                    Some(t) => Value::Lit(random_literal(rng, t, pool)),
                    None => Value::Elem(rng.gen_range(0..tgt)),
                })
                .collect()
        })
        .collect();
    Instance::from_parts(schema.clone(), carriers, maps).expect("well-shaped tables")
}

/// A random instance with at most `max` elements per entity node that
/// satisfies every equation.
pub fn random_instance(rng: &mut Rng8, schema: &Arc<Schema>, max: usize) -> Instance {
    let g = schema.graph();
    for attempt in 0..200 {
        let cap = if attempt < 150 { max } else { max.min(1) };
        let pool = if attempt < 100 { 3 } else { 1 };
        let sizes: Vec<usize> = g
            .nodes()
            .iter()
            .map(|n| if schema.is_entity(n) { rng.gen_range(0..=cap) } else { 0 })
            .collect();
        // An edge out of a nonempty node needs a nonempty target.
        let sizes = close_sizes(schema, sizes);
        let i = fill(rng, schema, &sizes, pool);
        if i.check_constraints().is_empty() {
            return i;
        }
    }
    Instance::empty(schema.clone())
}

fn close_sizes(schema: &Schema, mut sizes: Vec<usize>) -> Vec<usize> {
    let g = schema.graph();
    loop {
        let mut changed = false;
        for e in g.edges() {
            let (s, t) = (g.node_id(&e.source).unwrap(), g.node_id(&e.target).unwrap());
            if schema.is_entity(&e.target) && sizes[s] > 0 && sizes[t] == 0 {
                sizes[t] = 1;
                changed = true;
            }
        }
        if !changed {
            return sizes;
        }
    }
}

/// Strings that stress quoting: commas, quotes, newlines, unicode.
pub fn awkward_string(rng: &mut Rng8) -> String {
    const PIECES: &[&str] = &["a", "b c", ",", "\"", "\n", "é", "", "x,y", "''", "\\", "\t", "-1"];
    (0..rng.gen_range(0..4)).map(|_| *PIECES.choose(rng).unwrap()).collect()
}

/// Like [`random_instance`] but with arbitrary literals and element ids,
/// for round-trip tests on schemas without equations.
pub fn random_wild_instance(rng: &mut Rng8, schema: &Arc<Schema>, max: usize) -> Instance {
    let g = schema.graph();
    let sizes: Vec<usize> = g
        .nodes()
        .iter()
        .map(|n| if schema.is_entity(n) { rng.gen_range(0..=max) } else { 0 })
        .collect();
    let sizes = close_sizes(schema, sizes);
    let carriers: Vec<Vec<String>> = g
        .nodes()
        .iter()
        .zip(&sizes)
        .map(|(n, &k)| {
            (0..k)
                .map(|x| if rng.gen_bool(0.5) { format!("{}", 100 + x) } else { format!("{n}_{x}") })
                .collect()
        })
        .collect();
    let maps = g
        .edges()
        .iter()
        .map(|e| {
            let src = sizes[g.node_id(&e.source).unwrap()];
            let tgt = sizes[g.node_id(&e.target).unwrap()];
            (0..src)
                .map(|_| match schema.builtin(&e.target) {
                    Some(BuiltinType::String) => Value::Lit(Literal::Str(awkward_string(rng))),
                    Some(BuiltinType::Int) => Value::Lit(Literal::Int(rng.gen_range(-1000..1000))),
                    None => Value::Elem(rng.gen_range(0..tgt)),
                })
                .collect()
        })
        .collect();
    Instance::from_parts(schema.clone(), carriers, maps).expect("well-shaped tables")
}

/// `J` pulled back along `f`, computed straight from the tables.
pub fn delta_oracle(f: &Mapping, j: &Instance) -> (Vec<Vec<String>>, Vec<Vec<Value>>) {
    let c = f.source().graph();
    let d = f.target().graph();
    let carriers = c
        .nodes()
        .iter()
        .map(|n| {
            if f.source().is_entity(n) {
                j.carrier(f.node(n).unwrap()).unwrap().iter().cloned().collect()
            } else {
                Vec::new()
            }
        })
        .collect();
    let maps = c
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let path = f.edge_at(e);
            let start = j.carrier(f.node(&edge.source).unwrap()).unwrap();
            (0..start.len())
                .map(|x| {
                    let mut node = path.start.clone();
                    let mut v = Value::Elem(x);
                    for name in &path.edges {
                        let Value::Elem(k) = v else { panic!("path continues past a literal") };
                        v = j.map(&node, name).unwrap()[k].clone();
                        node = d.edge(&node, name).unwrap().target.clone();
                    }
                    v
                })
                .collect()
        })
        .collect();
    (carriers, maps)
}

/// Counts natural transformations `i -> j` by trying every assignment;
/// `None` when there are more than `limit` assignments to try.
pub fn brute_force_homs(i: &Instance, j: &Instance, limit: u64) -> Option<usize> {
    let schema = i.schema();
    let g = schema.graph();
    let mut slots: Vec<(usize, usize)> = Vec::new();
    let mut space: u64 = 1;
    for (n, node) in g.nodes().iter().enumerate() {
        if !schema.is_entity(node) {
            continue;
        }
        let radix = j.carrier_at(n).len() as u64;
        for x in 0..i.carrier_at(n).len() {
            slots.push((n, x));
            space = space.checked_mul(radix)?;
            if space > limit {
                return None;
            }
        }
    }
    if slots.iter().any(|&(n, _)| j.carrier_at(n).is_empty()) {
        return Some(0);
    }
    let mut h: Vec<Vec<usize>> = g.nodes().iter().enumerate().map(|(n, _)| vec![0; i.carrier_at(n).len()]).collect();
    let mut count = 0;
    'outer: loop {
        let natural = g.edges().iter().enumerate().all(|(e, edge)| {
            let s = g.node_id(&edge.source).unwrap();
            let t = g.node_id(&edge.target).unwrap();
            (0..i.carrier_at(s).len()).all(|x| match (&i.map_at(e)[x], &j.map_at(e)[h[s][x]]) {
                (Value::Elem(a), Value::Elem(b)) => h[t][*a] == *b,
                (Value::Lit(a), Value::Lit(b)) => a == b,
                _ => false,
            })
        });
        if natural {
            count += 1;
        }
        for &(n, x) in &slots {
            h[n][x] += 1;
            if h[n][x] < j.carrier_at(n).len() {
                continue 'outer;
            }
            h[n][x] = 0;
        }
        return Some(count);
    }
}

/// Source text declaring `schema` and `instances`.
pub fn source_text(schema: &Schema, instances: &[(&str, &Instance)]) -> String {
    use catmig::frontend::ast::{Decl, SourceFile};
    let mut decls = vec![Decl::Schema(schema.to_decl())];
    for (name, i) in instances {
        decls.push(Decl::Instance(i.to_decl(name)));
    }
    catmig::frontend::print_source(&SourceFile { decls })
}

pub fn samples_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../samples")
}

/// Every CLI invocation the suites exercise, as argument lists (without the
/// program name), with outputs under `out`.
pub fn cli_cases(out: &std::path::Path) -> Vec<Vec<String>> {
    let s = |f: &str| samples_dir().join(f).display().to_string();
    let o = |f: &str| out.join(f).display().to_string();
    let cases: Vec<Vec<String>> = vec![
        vec!["validate".into(), s("empdept.cql")],
        vec!["validate".into(), s("loops.cql")],
        vec!["check".into(), s("chemistry.cql"), "--instance".into(), "Water".into()],
        vec!["check".into(), s("empdept.cql"), "--instance".into(), "PaperVerbatim".into()],
        vec!["check".into(), s("empdept.cql"), "--instance".into(), "Corrected".into()],
        vec!["prove".into(), s("empdept.cql"), "--schema".into(), "S".into(), "admin.works.admin.works = id:Dept".into()],
        vec!["prove".into(), s("empdept.cql"), "--schema".into(), "S".into(), "mgr = id:Emp".into()],
        vec!["map-check".into(), s("loops.cql"), "--mapping".into(), "Forget".into()],
        vec!["map-check".into(), s("loops.cql"), "--mapping".into(), "Keep".into()],
        vec![
            "migrate".into(), s("loops.cql"), "--kind".into(), "sigma".into(), "--mapping".into(), "Into".into(),
            "--instance".into(), "One".into(), "-o".into(), o("sigma.cql"), "--provenance".into(), o("prov.json"),
            "--csv".into(), o("sigma_csv"),
        ],
        vec![
            "migrate".into(), s("loops.cql"), "--kind".into(), "sigma".into(), "--mapping".into(), "IntoFree".into(),
            "--instance".into(), "One".into(), "-o".into(), o("diverge.cql"),
        ],
        vec![
            "migrate".into(), s("loops.cql"), "--kind".into(), "delta".into(), "--mapping".into(), "Keep".into(),
            "--instance".into(), "Fixed".into(), "-o".into(), o("delta.cql"),
        ],
        vec![
            "migrate".into(), s("product.cql"), "--kind".into(), "pi".into(), "--mapping".into(), "Collapse".into(),
            "--instance".into(), "Small".into(), "-o".into(), o("pi.cql"),
        ],
        vec!["homs".into(), s("empdept.cql"), "--from".into(), "Corrected".into(), "--to".into(), "Corrected".into()],
        vec!["fmt".into(), s("empdept.cql")],
        vec!["fmt".into(), s("loops.cql"), "-o".into(), o("loops_fmt.cql")],
        vec!["triples".into(), s("empdept.cql"), "--instance".into(), "Corrected".into()],
        vec!["export-csv".into(), s("empdept.cql"), "--instance".into(), "Corrected".into(), "--dir".into(), o("csv")],
        vec![
            "import-csv".into(), s("empdept.cql"), "--schema".into(), "S".into(), "--dir".into(), o("csv"),
            "-o".into(), o("imported.cql"),
        ],
    ];
    cases
}

/// Runs the CLI in-process; returns (exit code, stdout, stderr).
pub fn run_cli(args: &[String]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("catmig".to_owned()).chain(args.iter().cloned());
    let code = catmig::frontend::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// Every regular file below `dir` with its bytes, sorted by path.
pub fn snapshot(dir: &std::path::Path) -> Vec<(std::path::PathBuf, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let bytes = std::fs::read(&p).unwrap();
                files.push((p, bytes));
            }
        }
    }
    files.sort();
    files
}
