//! One CSV table per entity node: `id` followed by the node's outgoing
//! edges in declaration order. String literals are always quoted.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use super::ast::{InstanceDecl, InstanceEntry, Pos, QualName, RawItem, RawValue};
use super::write_atomic;
use crate::instance::{validate_instance, Instance, InstanceError, Value};
use crate::schema::{Literal, Schema};

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{0}: missing table")]
    MissingFile(PathBuf),
    #[error("{path}: header must be `{expected}`, found `{found}`")]
    HeaderMismatch { path: PathBuf, expected: String, found: String },
    #[error("{path}: line {line}: {message}")]
    Row { path: PathBuf, line: u64, message: String },
    #[error(transparent)]
    Invalid(#[from] InstanceError),
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn header(schema: &Schema, node: usize) -> Vec<String> {
    let g = schema.graph();
    std::iter::once("id".to_owned())
        .chain(g.out_edges(node).iter().map(|&e| g.edges()[e].name.clone()))
        .collect()
}

/// The table for one entity node, as text.
pub fn table(i: &Instance, node: &str) -> String {
    let schema = i.schema();
    let g = schema.graph();
    let n = g.node_id(node).expect("known node");
    let mut out = header(schema, n).join(",");
    out.push('\n');
    for (x, id) in i.carrier_at(n).iter().enumerate() {
        out.push_str(id);
        for &e in g.out_edges(n) {
            out.push(',');
            let edge = &g.edges()[e];
            match &i.map_at(e)[x] {
                Value::Elem(y) => out.push_str(&i.carrier_at(g.node_id(&edge.target).unwrap())[*y]),
                Value::Lit(Literal::Str(s)) => out.push_str(&quote(s)),
                Value::Lit(Literal::Int(k)) => out.push_str(&k.to_string()),
            }
        }
        out.push('\n');
    }
    out
}

/// Writes `<Node>.csv` for every entity node into `dir` and returns the paths.
pub fn export_csv(i: &Instance, dir: &Path) -> Result<Vec<PathBuf>, CsvError> {
    let io = |path: &Path, e: std::io::Error| CsvError::Io {
        path: path.to_owned(),
        message: e.to_string(),
    };
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut written = Vec::new();
    for node in i.schema().entities() {
        let path = dir.join(format!("{node}.csv"));
        write_atomic(&path, table(i, node).as_bytes()).map_err(|e| io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// Reads the tables written by [`export_csv`] back into a validated instance.
pub fn import_csv(schema: &Arc<Schema>, dir: &Path, name: &str) -> Result<Instance, CsvError> {
    let g = schema.graph();
    let mut entries = Vec::new();
    let mut edge_entries: Vec<Option<InstanceEntry>> = vec![None; g.edges().len()];
    for node in schema.entities() {
        let n = g.node_id(node).unwrap();
        let path = dir.join(format!("{node}.csv"));
        if !path.is_file() {
            return Err(CsvError::MissingFile(path));
        }
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(&path)
            .map_err(|e| CsvError::Io {
                path: path.clone(),
                message: e.to_string(),
            })?;
        let expected = header(schema, n);
        let found: Vec<String> = reader
            .headers()
            .map_err(|e| CsvError::Io {
                path: path.clone(),
                message: e.to_string(),
            })?
            .iter()
            .map(str::to_owned)
            .collect();
        if found != expected {
            return Err(CsvError::HeaderMismatch {
                path,
                expected: expected.join(","),
                found: found.join(","),
            });
        }
        let out = g.out_edges(n);
        let mut ids = Vec::new();
        let mut columns: Vec<Vec<RawItem>> = vec![Vec::new(); out.len()];
        for record in reader.records() {
            let record = record.map_err(|e| CsvError::Row {
                path: path.clone(),
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line()) as usize;
            let pos = Pos { line, col: 1 };
            let id = record[0].to_owned();
            for (k, &e) in out.iter().enumerate() {
                let field = record[k + 1].to_owned();
                let value = if schema.builtin(&g.edges()[e].target) == Some(crate::schema::BuiltinType::String) {
                    RawValue::Quoted(field)
                } else {
                    RawValue::Bare(field)
                };
                columns[k].push(RawItem {
                    key: id.clone(),
                    value: Some(value),
                    pos,
                });
            }
            ids.push(RawItem {
                key: id,
                value: None,
                pos,
            });
        }
        entries.push(InstanceEntry {
            target: QualName {
                qualifier: None,
                name: node.clone(),
                pos: Pos::default(),
            },
            items: ids,
            pos: Pos::default(),
        });
        for (k, &e) in out.iter().enumerate() {
            edge_entries[e] = Some(InstanceEntry {
                target: QualName {
                    qualifier: Some(node.clone()),
                    name: g.edges()[e].name.clone(),
                    pos: Pos::default(),
                },
                items: std::mem::take(&mut columns[k]),
                pos: Pos::default(),
            });
        }
    }
    entries.extend(edge_entries.into_iter().flatten());
    let decl = InstanceDecl {
        name: name.to_owned(),
        schema: schema.name().to_owned(),
        entries,
        pos: Pos::default(),
    };
    Ok(validate_instance(schema, &decl)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::paper_instance;

    #[test]
    fn paper_tables() {
        let i = paper_instance(false);
        assert_eq!(
            table(&i, "Emp"),
            "id,mgr,works,name\n101,103,q10,\"Al\"\n102,102,x02,\"Bob\"\n103,103,q10,\"Carl\"\n"
        );
        assert_eq!(table(&i, "Dept"), "id,admin,name\nq10,102,\"CS\"\nx02,101,\"Math\"\n");
    }

    #[test]
    fn round_trip_and_errors() {
        let i = paper_instance(true);
        let dir = tempfile::tempdir().unwrap();
        let files = export_csv(&i, dir.path()).unwrap();
        assert_eq!(files.len(), 2);
        let back = import_csv(i.schema(), dir.path(), "I").unwrap();
        assert_eq!(back, i);

        fs::write(dir.path().join("Emp.csv"), "id,mgr,works,name,age\n").unwrap();
        assert!(matches!(
            import_csv(i.schema(), dir.path(), "I"),
            Err(CsvError::HeaderMismatch { .. })
        ));
        export_csv(&i, dir.path()).unwrap();
        fs::remove_file(dir.path().join("Dept.csv")).unwrap();
        assert!(matches!(
            import_csv(i.schema(), dir.path(), "I"),
            Err(CsvError::MissingFile(_))
        ));
    }

    #[test]
    fn empty_instance_has_headers_only() {
        let i = Instance::empty(paper_instance(true).schema().clone());
        assert_eq!(table(&i, "Dept"), "id,admin,name\n");
    }
}
