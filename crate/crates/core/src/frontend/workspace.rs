//! Loading a set of source files into validated schemas, mappings and
//! instances.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use indexmap::IndexMap;

use super::ast::{Decl, Pos, SourceFile};
use super::parser::{parse_source, ParseError};
use crate::instance::{validate_instance, Instance};
use crate::mapping::{validate_mapping, Mapping};
use crate::presentation::Budget;
use crate::schema::{validate_schema, Schema};

/// One problem, tagged with the file it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadError {
    pub file: String,
    pub message: String,
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct WorkspaceError {
    pub errors: Vec<LoadError>,
}

impl fmt::Display for WorkspaceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in self.errors.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct Workspace {
    pub schemas: IndexMap<String, Arc<Schema>>,
    pub mappings: IndexMap<String, Mapping>,
    pub instances: IndexMap<String, Arc<Instance>>,
    /// Parsed form of the first (main) source.
    pub main: SourceFile,
}

fn positioned(pos: Pos, message: impl fmt::Display) -> String {
    let m = message.to_string();
    if pos == Pos::default() || m.starts_with(&pos.to_string()) {
        format!(" {m}")
    } else {
        format!("{pos}: {m}")
    }
}

impl Workspace {
    pub fn schema(&self, name: &str) -> Option<&Arc<Schema>> {
        self.schemas.get(name)
    }

    pub fn mapping(&self, name: &str) -> Option<&Mapping> {
        self.mappings.get(name)
    }

    pub fn instance(&self, name: &str) -> Option<&Arc<Instance>> {
        self.instances.get(name)
    }

    /// Loads `(file name, text)` pairs; the first is the main source, the
    /// rest only contribute declarations. Every error is reported.
    pub fn from_sources(sources: &[(String, String)], budget: &Budget) -> Result<Workspace, WorkspaceError> {
        let mut errors = Vec::new();
        let mut parsed = Vec::new();
        for (file, text) in sources {
            match parse_source(text) {
                Ok(f) => parsed.push((file.clone(), f)),
                Err(e) => errors.push(LoadError {
                    file: file.clone(),
                    message: format!("{e}"),
                }),
            }
        }
        if !errors.is_empty() {
            return Err(WorkspaceError { errors });
        }

        let mut seen: HashMap<(&'static str, String), (String, Pos)> = HashMap::new();
        for (file, f) in &parsed {
            for d in &f.decls {
                if let Some((other, at)) = seen.get(&(d.kind(), d.name().to_owned())) {
                    errors.push(LoadError {
                        file: file.clone(),
                        message: positioned(
                            d.pos(),
                            format!("{} `{}` is already declared at {other}:{at}", d.kind(), d.name()),
                        ),
                    });
                } else {
                    seen.insert((d.kind(), d.name().to_owned()), (file.clone(), d.pos()));
                }
            }
        }

        let mut ws = Workspace::default();
        let mut broken: Vec<String> = Vec::new();
        for (file, f) in &parsed {
            for s in f.schemas() {
                if ws.schemas.contains_key(&s.name) {
                    continue;
                }
                match validate_schema(s, budget) {
                    Ok(schema) => {
                        ws.schemas.insert(s.name.clone(), Arc::new(schema));
                    }
                    Err(e) => {
                        broken.push(s.name.clone());
                        errors.push(LoadError {
                            file: file.clone(),
                            message: positioned(s.pos, e),
                        });
                    }
                }
            }
        }
        let unresolved = |file: &str, pos: Pos, kind: &'static str, name: &str| LoadError {
            file: file.to_owned(),
            message: format!(
                "{}",
                ParseError::UnresolvedReference {
                    kind,
                    name: name.to_owned(),
                    pos
                }
            ),
        };
        for (file, f) in &parsed {
            for m in f.mappings() {
                if ws.mappings.contains_key(&m.name) {
                    continue;
                }
                let (Some(src), Some(tgt)) = (ws.schemas.get(&m.source), ws.schemas.get(&m.target)) else {
                    for s in [&m.source, &m.target] {
                        if !ws.schemas.contains_key(s) && !broken.contains(s) {
                            errors.push(unresolved(file, m.pos, "schema", s));
                        }
                    }
                    continue;
                };
                match validate_mapping(src.clone(), tgt.clone(), m) {
                    Ok(mapping) => {
                        ws.mappings.insert(m.name.clone(), mapping);
                    }
                    Err(e) => errors.push(LoadError {
                        file: file.clone(),
                        message: positioned(m.pos, e),
                    }),
                }
            }
            for i in f.instances() {
                if ws.instances.contains_key(&i.name) {
                    continue;
                }
                let Some(schema) = ws.schemas.get(&i.schema) else {
                    if !broken.contains(&i.schema) {
                        errors.push(unresolved(file, i.pos, "schema", &i.schema));
                    }
                    continue;
                };
                match validate_instance(schema, i) {
                    Ok(inst) => {
                        ws.instances.insert(i.name.clone(), Arc::new(inst));
                    }
                    Err(e) => errors.push(LoadError {
                        file: file.clone(),
                        message: positioned(i.pos, e),
                    }),
                }
            }
        }
        if !errors.is_empty() {
            return Err(WorkspaceError { errors });
        }
        ws.main = parsed.into_iter().next().map(|(_, f)| f).unwrap_or_default();
        Ok(ws)
    }

    /// Reads `main` and `includes` from disk and loads them.
    pub fn load(main: &Path, includes: &[impl AsRef<Path>], budget: &Budget) -> Result<Workspace, WorkspaceError> {
        let mut sources = Vec::new();
        let mut errors = Vec::new();
        for p in std::iter::once(main).chain(includes.iter().map(AsRef::as_ref)) {
            match std::fs::read_to_string(p) {
                Ok(text) => sources.push((p.display().to_string(), text)),
                Err(e) => errors.push(LoadError {
                    file: p.display().to_string(),
                    message: format!(" cannot read: {e}"),
                }),
            }
        }
        if !errors.is_empty() {
            return Err(WorkspaceError { errors });
        }
        Workspace::from_sources(&sources, budget)
    }

    /// Declarations of the main source, as a [`SourceFile`].
    pub fn decls(&self) -> &[Decl] {
        &self.main.decls
    }
}
