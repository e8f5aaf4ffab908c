//! Canonical text output.
//!
//! Declarations are grouped by kind (schemas, mappings, instances) and sorted
//! by name within a kind; sections come in a fixed order and items keep their
//! source order.

use std::fmt::Write;

use super::ast::*;
use crate::schema::Literal;

pub fn print_source(file: &SourceFile) -> String {
    let mut decls: Vec<&Decl> = file.decls.iter().collect();
    decls.sort_by(|a, b| (rank(a), a.name()).cmp(&(rank(b), b.name())));
    let mut out = String::new();
    for (k, d) in decls.into_iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        match d {
            Decl::Schema(s) => print_schema(&mut out, s),
            Decl::Mapping(m) => print_mapping(&mut out, m),
            Decl::Instance(i) => print_instance(&mut out, i),
        }
    }
    out
}

fn rank(d: &Decl) -> u8 {
    match d {
        Decl::Schema(_) => 0,
        Decl::Mapping(_) => 1,
        Decl::Instance(_) => 2,
    }
}

fn inline(out: &mut String, label: &str, names: &[Ident]) {
    if !names.is_empty() {
        let names: Vec<&str> = names.iter().map(|i| i.name.as_str()).collect();
        let _ = writeln!(out, "  {label}: {};", names.join(", "));
    }
}

fn block(out: &mut String, label: &str, lines: Vec<String>) {
    if lines.is_empty() {
        return;
    }
    let _ = writeln!(out, "  {label}:");
    let last = lines.len() - 1;
    for (k, line) in lines.into_iter().enumerate() {
        let _ = writeln!(out, "    {line}{}", if k == last { ";" } else { "," });
    }
}

pub fn print_schema(out: &mut String, s: &SchemaDecl) {
    let _ = writeln!(out, "schema {} {{", s.name);
    inline(out, "entities", &s.entities);
    inline(out, "types", &s.types);
    block(
        out,
        "edges",
        s.edges
            .iter()
            .map(|e| format!("{}: {} -> {}", e.name, e.source, e.target))
            .collect(),
    );
    block(
        out,
        "equations",
        s.equations.iter().map(|eq| format!("{} = {}", eq.lhs, eq.rhs)).collect(),
    );
    out.push_str("}\n");
}

pub fn print_mapping(out: &mut String, m: &MappingDecl) {
    let _ = writeln!(out, "mapping {} : {} -> {} {{", m.name, m.source, m.target);
    block(
        out,
        "nodes",
        m.nodes.iter().map(|a| format!("{} -> {}", a.source, a.target)).collect(),
    );
    block(
        out,
        "edges",
        m.edges.iter().map(|a| format!("{} -> {}", a.edge, a.path)).collect(),
    );
    out.push_str("}\n");
}

pub fn print_instance(out: &mut String, i: &InstanceDecl) {
    let _ = writeln!(out, "instance {} on {} {{", i.name, i.schema);
    for entry in &i.entries {
        let items: Vec<String> = entry
            .items
            .iter()
            .map(|item| match &item.value {
                None => item.key.clone(),
                Some(RawValue::Bare(v)) => format!("{} -> {v}", item.key),
                Some(RawValue::Quoted(s)) => format!("{} -> {}", item.key, Literal::Str(s.clone())),
            })
            .collect();
        let _ = writeln!(out, "  {} = {{{}}};", entry.target, items.join(", "));
    }
    out.push_str("}\n");
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse_source;
    use super::*;

    #[test]
    fn empty_prints_empty() {
        assert_eq!(print_source(&SourceFile::default()), "");
    }

    #[test]
    fn canonical_layout_and_idempotence() {
        let src = r#"instance I on S { Emp = {b, a}; name = {b -> "x\"y", a -> "z"}; }
            schema S { types: String; entities: Emp; edges: name: Emp -> String, f: Emp -> Emp; equations: f.f = f; }
            mapping M : S -> S { edges: f -> id:Emp, name -> name; nodes: Emp -> Emp; }"#;
        let once = print_source(&parse_source(src).unwrap());
        let expected = "schema S {
  entities: Emp;
  types: String;
  edges:
    name: Emp -> String,
    f: Emp -> Emp;
  equations:
    f.f = f;
}

mapping M : S -> S {
  nodes:
    Emp -> Emp;
  edges:
    f -> id:Emp,
    name -> name;
}

instance I on S {
  Emp = {b, a};
  name = {b -> \"x\\\"y\", a -> \"z\"};
}
";
        assert_eq!(once, expected);
        assert_eq!(print_source(&parse_source(&once).unwrap()), once);
    }
}
