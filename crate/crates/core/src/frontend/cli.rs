//! The `catmig` command line.
//!
//! Exit codes: 0 for success (proven, no violations, functorial), 1 for a
//! domain failure (refuted, violations, invalid input, migration errors), 2
//! for usage errors and undecided outcomes.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use super::ast::{Decl, SourceFile};
use super::csv::{export_csv, import_csv};
use super::parser::parse_equation;
use super::printer::print_source;
use super::triples::export_triples;
use super::workspace::Workspace;
use super::write_atomic;
use crate::instance::{enumerate_homs, HomEnumeration};
use crate::mapping::FunctorialityVerdict;
use crate::migrate::{Migration, MigrationLimits, MigrateError};
use crate::presentation::{prove_equal, Budget, Exhaustion, Justification, PathEquation, ProofOutcome, Trace};
use crate::schema::{resolve_equation, Schema};

#[derive(Debug, Parser)]
#[command(name = "catmig", version, about = "Schemas as categories, instances as functors, and data migration along mappings")]
struct Cli {
    /// Completion iteration budget.
    #[arg(long, global = true, default_value_t = 2048, value_parser = clap::value_parser!(u64).range(1..))]
    max_kb_steps: u64,
    /// Rewrite steps allowed per proof.
    #[arg(long, global = true, default_value_t = 4096, value_parser = clap::value_parser!(u64).range(1..))]
    max_rewrite_steps: u64,
    /// Longest path considered when enumerating morphisms (also bounds comma categories).
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..))]
    max_path_len: u64,
    #[arg(long, global = true, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    max_chase_rounds: u64,
    #[arg(long, global = true, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_elements: u64,
    /// Extra source files whose declarations may be referenced.
    #[arg(long, global = true)]
    include: Vec<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Delta,
    Sigma,
    Pi,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate every declaration.
    Validate { file: PathBuf },
    /// Check an instance against its schema's equations.
    Check {
        file: PathBuf,
        #[arg(long)]
        instance: String,
    },
    /// Decide an equation `p = q` in a schema.
    Prove {
        file: PathBuf,
        #[arg(long)]
        schema: String,
        equation: String,
    },
    /// Check that a mapping preserves every equation.
    MapCheck {
        file: PathBuf,
        #[arg(long)]
        mapping: String,
    },
    /// Migrate an instance along a mapping.
    Migrate {
        file: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        mapping: String,
        #[arg(long)]
        instance: String,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        /// Name of the result (default: `<kind>_<mapping>_<instance>`).
        #[arg(long)]
        name: Option<String>,
        /// Also write the result as CSV tables into this directory.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the sigma provenance map (JSON) to this file.
        #[arg(long)]
        provenance: Option<PathBuf>,
        #[arg(long)]
        allow_undetermined: bool,
    },
    /// Enumerate homomorphisms between two instances.
    Homs {
        file: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 1000)]
        cap: usize,
    },
    /// Print the file in canonical form.
    Fmt {
        file: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Print an instance as tab-separated triples.
    Triples {
        file: PathBuf,
        #[arg(long)]
        instance: String,
    },
    /// Write an instance as one CSV table per entity node.
    ExportCsv {
        file: PathBuf,
        #[arg(long)]
        instance: String,
        #[arg(long)]
        dir: PathBuf,
    },
    /// Read CSV tables into an instance and print (or write) its declaration.
    ImportCsv {
        file: PathBuf,
        #[arg(long)]
        schema: String,
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, default_value = "Imported")]
        name: String,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl std::fmt::Display) -> Failure {
    Failure {
        code,
        message: message.to_string(),
    }
}

type Outcome = Result<i32, Failure>;

/// Runs the CLI with `args` (including the program name); returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    2
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

impl Cli {
    fn budget(&self) -> Budget {
        Budget {
            max_completion_iterations: self.max_kb_steps as usize,
            max_rewrite_steps: self.max_rewrite_steps as usize,
            max_path_len: self.max_path_len as usize,
        }
    }

    fn limits(&self) -> MigrationLimits {
        MigrationLimits {
            max_chase_rounds: self.max_chase_rounds as usize,
            max_elements: self.max_elements as usize,
            comma_path_bound: self.max_path_len as usize,
            budget: self.budget(),
        }
    }

    fn load(&self, file: &Path) -> Result<Workspace, Failure> {
        Workspace::load(file, &self.include, &self.budget()).map_err(|e| fail(1, e))
    }
}

fn lookup<'a, T>(found: Option<&'a T>, kind: &str, name: &str) -> Result<&'a T, Failure> {
    found.ok_or_else(|| fail(2, format!("no {kind} named `{name}`")))
}

fn io_fail(path: &Path, e: impl std::fmt::Display) -> Failure {
    fail(1, format!("{}: {e}", path.display()))
}

fn render_trace(schema: &Schema, trace: &Trace) -> Vec<String> {
    let mut lines = vec![format!("  {}", schema.raw_path(&trace.start))];
    for step in &trace.steps {
        let by = match step.by {
            Justification::Equation(k) => format!("equation #{k}"),
            Justification::Rule(k) => format!("rule #{k}"),
        };
        let dir = if step.reversed { ", right to left" } else { "" };
        lines.push(format!(
            "  = {}    [{by}{dir} at {}]",
            schema.raw_path(&step.result),
            step.position
        ));
    }
    lines
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Outcome {
    let w = |out: &mut dyn Write, s: String| -> Result<(), Failure> {
        out.write_all(s.as_bytes()).map_err(|e| fail(1, e))
    };
    match &cli.command {
        Command::Validate { file } => {
            let ws = cli.load(file)?;
            let mut s = String::new();
            for d in ws.decls() {
                match d {
                    Decl::Schema(decl) => {
                        let schema = &ws.schemas[&decl.name];
                        let g = schema.graph();
                        s += &format!(
                            "schema {}: {} nodes, {} edges, {} equations; completion {:?} with {} rules\n",
                            decl.name,
                            g.nodes().len(),
                            g.edges().len(),
                            schema.equations().len(),
                            schema.theory().status(),
                            schema.theory().rule_count()
                        );
                        for warning in schema.warnings() {
                            s += &format!("  warning: {warning}\n");
                        }
                    }
                    Decl::Mapping(decl) => {
                        let m = &ws.mappings[&decl.name];
                        s += &format!("mapping {}: {} -> {}\n", decl.name, m.source().name(), m.target().name());
                    }
                    Decl::Instance(decl) => {
                        let i = &ws.instances[&decl.name];
                        s += &format!("instance {} on {}: {} elements\n", decl.name, decl.schema, i.size());
                    }
                }
            }
            s += "ok\n";
            w(out, s)?;
            Ok(0)
        }
        Command::Check { file, instance } => {
            let ws = cli.load(file)?;
            let i = lookup(ws.instance(instance), "instance", instance)?;
            let report = i.check_constraints();
            let schema = i.schema();
            let mut s = format!("instance {instance}: {} violation(s)\n", report.len());
            for v in &report.violations {
                s += &format!(
                    "  {} = {} at {}: left {}, right {}\n",
                    schema.raw_path(&v.equation.lhs),
                    schema.raw_path(&v.equation.rhs),
                    v.element,
                    v.lhs_value,
                    v.rhs_value
                );
            }
            w(out, s)?;
            Ok(if report.is_empty() { 0 } else { 1 })
        }
        Command::Prove { file, schema, equation } => {
            let ws = cli.load(file)?;
            let s = lookup(ws.schema(schema), "schema", schema)?;
            let eq = parse_equation(equation).map_err(|e| fail(2, format!("in equation: {e}")))?;
            let (lhs, rhs) = resolve_equation(s.graph(), &eq.lhs, &eq.rhs).map_err(|vs| {
                fail(
                    1,
                    vs.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
                )
            })?;
            let outcome = prove_equal(s.theory(), &lhs, &rhs, &cli.budget()).map_err(|e| fail(1, e))?;
            let mut text = format!("{}\n", outcome.label());
            let code = match &outcome {
                ProofOutcome::Proven(trace) => {
                    for line in render_trace(s, trace) {
                        text += &line;
                        text.push('\n');
                    }
                    0
                }
                ProofOutcome::Refuted => {
                    let eq = PathEquation::new(lhs, rhs);
                    text += &format!(
                        "  distinct normal forms under a convergent system ({} rules): {} = {}\n",
                        s.theory().rule_count(),
                        s.raw_path(&eq.lhs),
                        s.raw_path(&eq.rhs)
                    );
                    1
                }
                ProofOutcome::Unknown(why) => {
                    let phase = match why {
                        Exhaustion::Normalization => "normalization",
                        Exhaustion::Search => "equational search",
                    };
                    text += &format!("  budget exhausted during {phase}\n");
                    2
                }
            };
            w(out, text)?;
            Ok(code)
        }
        Command::MapCheck { file, mapping } => {
            let ws = cli.load(file)?;
            let m = lookup(ws.mapping(mapping), "mapping", mapping)?;
            let outcomes = m.equation_outcomes(&cli.budget());
            let verdict = m.check_functoriality(&cli.budget());
            let mut s = format!("{}\n", verdict.label());
            let (src, tgt) = (m.source(), m.target());
            for (k, ((lhs, rhs, outcome), eq)) in outcomes.iter().zip(src.equations()).enumerate() {
                s += &format!(
                    "  #{k} {} = {}  |->  {} = {}: {}\n",
                    src.raw_path(&eq.lhs),
                    src.raw_path(&eq.rhs),
                    tgt.raw_path(lhs),
                    tgt.raw_path(rhs),
                    outcome.label()
                );
            }
            w(out, s)?;
            Ok(match verdict {
                FunctorialityVerdict::Functorial(_) => 0,
                FunctorialityVerdict::NotFunctorial { .. } => 1,
                FunctorialityVerdict::Undetermined(_) => 2,
            })
        }
        Command::Migrate {
            file,
            kind,
            mapping,
            instance,
            output,
            name,
            csv,
            provenance,
            allow_undetermined,
        } => {
            if provenance.is_some() && *kind != Kind::Sigma {
                return Err(fail(2, "--provenance is only available with --kind sigma"));
            }
            let ws = cli.load(file)?;
            let m = lookup(ws.mapping(mapping), "mapping", mapping)?;
            let i = lookup(ws.instance(instance), "instance", instance)?;
            let migration = Migration::new(m.clone(), &cli.budget(), *allow_undetermined).map_err(|e| {
                let undetermined = matches!(m.check_functoriality(&cli.budget()), FunctorialityVerdict::Undetermined(_));
                let hint = if undetermined { " (pass --allow-undetermined to proceed)" } else { "" };
                fail(if undetermined { 2 } else { 1 }, format!("{e}{hint}"))
            })?;
            let kind_name = format!("{kind:?}").to_lowercase();
            let name = name.clone().unwrap_or_else(|| format!("{kind_name}_{mapping}_{instance}"));
            let migrate_fail = |e: MigrateError| fail(1, e);
            let (result, prov) = match kind {
                Kind::Delta => (migration.delta(i).map_err(migrate_fail)?, None),
                Kind::Sigma => {
                    let s = migration.sigma(i, &cli.limits()).map_err(migrate_fail)?;
                    (s.instance, Some(s.provenance))
                }
                Kind::Pi => (migration.pi(i, &cli.limits()).map_err(migrate_fail)?, None),
            };
            let text = print_source(&SourceFile {
                decls: vec![Decl::Instance(result.to_decl(&name))],
            });
            write_atomic(output, text.as_bytes()).map_err(|e| io_fail(output, e))?;
            let mut s = format!(
                "{kind_name}: wrote instance {name} on {} ({} elements) to {}\n",
                result.schema().name(),
                result.size(),
                output.display()
            );
            if let Some(dir) = csv {
                let files = export_csv(&result, dir).map_err(|e| fail(1, e))?;
                s += &format!("wrote {} CSV table(s) to {}\n", files.len(), dir.display());
            }
            if let (Some(path), Some(prov)) = (provenance, prov) {
                let json = serde_json::to_string_pretty(&prov).expect("serializable") + "\n";
                write_atomic(path, json.as_bytes()).map_err(|e| io_fail(path, e))?;
                s += &format!("wrote provenance for {} element(s) to {}\n", prov.len(), path.display());
            }
            w(out, s)?;
            Ok(0)
        }
        Command::Homs { file, from, to, cap } => {
            let ws = cli.load(file)?;
            let i = lookup(ws.instance(from), "instance", from)?;
            let j = lookup(ws.instance(to), "instance", to)?;
            let (homs, status) = enumerate_homs(i, j, *cap).map_err(|e| fail(1, e))?;
            let g = i.schema().graph();
            let mut s = format!("{} homomorphism(s) {from} -> {to} ({status:?})\n", homs.len());
            for (k, h) in homs.iter().enumerate() {
                let parts: Vec<String> = i
                    .schema()
                    .entities()
                    .iter()
                    .map(|node| {
                        let n = g.node_id(node).unwrap();
                        let pairs: Vec<String> = i
                            .carrier_at(n)
                            .iter()
                            .enumerate()
                            .map(|(x, id)| format!("{id}->{}", j.carrier_at(n)[h.apply(n, x)]))
                            .collect();
                        format!("{node}: {}", pairs.join(", "))
                    })
                    .collect();
                s += &format!("  #{k} {}\n", parts.join("; "));
            }
            w(out, s)?;
            Ok(if status == HomEnumeration::Complete { 0 } else { 2 })
        }
        Command::Fmt { file, output } => {
            let ws = cli.load(file)?;
            let text = print_source(&ws.main);
            match output {
                Some(path) => write_atomic(path, text.as_bytes()).map_err(|e| io_fail(path, e))?,
                None => w(out, text)?,
            }
            Ok(0)
        }
        Command::Triples { file, instance } => {
            let ws = cli.load(file)?;
            let i = lookup(ws.instance(instance), "instance", instance)?;
            w(out, export_triples(i).to_string())?;
            Ok(0)
        }
        Command::ExportCsv { file, instance, dir } => {
            let ws = cli.load(file)?;
            let i = lookup(ws.instance(instance), "instance", instance)?;
            let files = export_csv(i, dir).map_err(|e| fail(1, e))?;
            let mut s = String::new();
            for f in files {
                s += &format!("{}\n", f.display());
            }
            w(out, s)?;
            Ok(0)
        }
        Command::ImportCsv {
            file,
            schema,
            dir,
            name,
            output,
        } => {
            let ws = cli.load(file)?;
            let s = lookup(ws.schema(schema), "schema", schema)?;
            let i = import_csv(s, dir, name).map_err(|e| fail(1, e))?;
            let text = print_source(&SourceFile {
                decls: vec![Decl::Instance(i.to_decl(name))],
            });
            match output {
                Some(path) => write_atomic(path, text.as_bytes()).map_err(|e| io_fail(path, e))?,
                None => w(out, text)?,
            }
            Ok(0)
        }
    }
}
