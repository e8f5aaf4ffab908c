//! Text format, CSV and triple exchange, and the command line.

pub mod ast;
pub mod cli;
pub mod csv;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod triples;
pub mod workspace;

use std::io::Write;
use std::path::Path;

pub use parser::{parse_source, ParseError};
pub use printer::print_source;
pub use workspace::{Workspace, WorkspaceError};

/// Writes `bytes` to a temporary file next to `path`, then renames it over
/// `path`, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
