//! C interface: parse a source text into an opaque workspace, then check,
//! prove, map-check and migrate against it.
//!
//! Every function returns a [`CatmigStatus`]. On failure the message is
//! available from [`catmig_last_error`] on the same thread until the next
//! call. Strings handed out by the library are freed with
//! [`catmig_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use catmig::frontend::ast::{Decl, SourceFile};
use catmig::frontend::parser::parse_equation;
use catmig::frontend::{parse_source, print_source, Workspace};
use catmig::mapping::FunctorialityVerdict;
use catmig::migrate::{MigrateError, Migration, MigrationLimits};
use catmig::presentation::{prove_equal, Budget, ProofOutcome};
use catmig::schema::resolve_equation;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatmigStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    NotFound = 5,
    /// A well-formed request whose operation failed, such as a migration.
    Domain = 6,
    /// Functoriality could not be decided within the budget.
    Unknown = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatmigProof {
    Proven = 0,
    Refuted = 1,
    Unknown = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatmigFunctoriality {
    Functorial = 0,
    NotFunctorial = 1,
    Undetermined = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatmigKind {
    Delta = 0,
    Sigma = 1,
    Pi = 2,
}

/// Validated schemas, mappings and instances from one source text.
pub struct CatmigWorkspace {
    inner: Workspace,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(CatmigStatus, String);

type Outcome = Result<(), Failure>;

fn fail(status: CatmigStatus, message: impl ToString) -> Failure {
    Failure(status, message.to_string())
}

fn set_error(message: Option<String>) {
    let c = message.map(|m| CString::new(m.replace('\0', " ")).unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(body: impl FnOnce() -> Outcome) -> CatmigStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error(None);
            CatmigStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(Some(message));
            status
        }
        Err(_) => {
            set_error(Some("internal panic".into()));
            CatmigStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(CatmigStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(CatmigStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn workspace<'a>(ws: *const CatmigWorkspace) -> Result<&'a Workspace, Failure> {
    ws.as_ref()
        .map(|w| &w.inner)
        .ok_or_else(|| fail(CatmigStatus::NullPointer, "workspace is null"))
}

fn out_ptr<T>(p: *mut T) -> Result<(), Failure> {
    if p.is_null() {
        Err(fail(CatmigStatus::NullPointer, "output pointer is null"))
    } else {
        Ok(())
    }
}

fn not_found(kind: &str, name: &str) -> Failure {
    fail(CatmigStatus::NotFound, format!("no {kind} named `{name}`"))
}

/// Parses and validates `source`. On success `*out` owns a workspace that
/// must be released with [`catmig_workspace_free`].
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn catmig_workspace_parse(source: *const c_char, out: *mut *mut CatmigWorkspace) -> CatmigStatus {
    guard(|| {
        out_ptr(out)?;
        *out = ptr::null_mut();
        let src = text(source, "source")?;
        parse_source(src).map_err(|e| fail(CatmigStatus::Parse, e))?;
        let inner = Workspace::from_sources(&[("<source>".into(), src.to_owned())], &Budget::default())
            .map_err(|e| fail(CatmigStatus::Validation, e))?;
        *out = Box::into_raw(Box::new(CatmigWorkspace { inner }));
        Ok(())
    })
}

/// # Safety
/// `ws` must come from [`catmig_workspace_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn catmig_workspace_free(ws: *mut CatmigWorkspace) {
    if !ws.is_null() {
        drop(Box::from_raw(ws));
    }
}

/// Counts the equation violations of `instance` into `*violations`. A
/// nonzero count is not an error.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn catmig_check(
    ws: *const CatmigWorkspace,
    instance: *const c_char,
    violations: *mut usize,
) -> CatmigStatus {
    guard(|| {
        out_ptr(violations)?;
        let ws = workspace(ws)?;
        let name = text(instance, "instance")?;
        let i = ws.instance(name).ok_or_else(|| not_found("instance", name))?;
        *violations = i.check_constraints().len();
        Ok(())
    })
}

/// Decides `equation` (for example `"admin.works = id:Dept"`) in `schema`.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn catmig_prove(
    ws: *const CatmigWorkspace,
    schema: *const c_char,
    equation: *const c_char,
    outcome: *mut CatmigProof,
) -> CatmigStatus {
    guard(|| {
        out_ptr(outcome)?;
        let ws = workspace(ws)?;
        let name = text(schema, "schema")?;
        let s = ws.schema(name).ok_or_else(|| not_found("schema", name))?;
        let eq = parse_equation(text(equation, "equation")?).map_err(|e| fail(CatmigStatus::Parse, e))?;
        let (lhs, rhs) = resolve_equation(s.graph(), &eq.lhs, &eq.rhs).map_err(|vs| {
            fail(
                CatmigStatus::Validation,
                vs.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
            )
        })?;
        let verdict =
            prove_equal(s.theory(), &lhs, &rhs, &Budget::default()).map_err(|e| fail(CatmigStatus::Validation, e))?;
        *outcome = match verdict {
            ProofOutcome::Proven(_) => CatmigProof::Proven,
            ProofOutcome::Refuted => CatmigProof::Refuted,
            ProofOutcome::Unknown(_) => CatmigProof::Unknown,
        };
        Ok(())
    })
}

/// Checks that `mapping` sends every source equation to a provable one.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn catmig_map_check(
    ws: *const CatmigWorkspace,
    mapping: *const c_char,
    verdict: *mut CatmigFunctoriality,
) -> CatmigStatus {
    guard(|| {
        out_ptr(verdict)?;
        let ws = workspace(ws)?;
        let name = text(mapping, "mapping")?;
        let m = ws.mapping(name).ok_or_else(|| not_found("mapping", name))?;
        *verdict = match m.check_functoriality(&Budget::default()) {
            FunctorialityVerdict::Functorial(_) => CatmigFunctoriality::Functorial,
            FunctorialityVerdict::NotFunctorial { .. } => CatmigFunctoriality::NotFunctorial,
            FunctorialityVerdict::Undetermined(_) => CatmigFunctoriality::Undetermined,
        };
        Ok(())
    })
}

/// Migrates `instance` along `mapping` and writes the result, as canonical
/// source text for an instance named `<kind>_<mapping>_<instance>`, to
/// `*result`. Free it with [`catmig_string_free`].
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn catmig_migrate(
    ws: *const CatmigWorkspace,
    kind: CatmigKind,
    mapping: *const c_char,
    instance: *const c_char,
    result: *mut *mut c_char,
) -> CatmigStatus {
    guard(|| {
        out_ptr(result)?;
        *result = ptr::null_mut();
        let ws = workspace(ws)?;
        let m_name = text(mapping, "mapping")?;
        let i_name = text(instance, "instance")?;
        let m = ws.mapping(m_name).ok_or_else(|| not_found("mapping", m_name))?;
        let i = ws.instance(i_name).ok_or_else(|| not_found("instance", i_name))?;
        let budget = Budget::default();
        let limits = MigrationLimits::default();
        let status = |e: &MigrateError| match e {
            MigrateError::SchemaMismatch { .. } => CatmigStatus::Validation,
            _ => CatmigStatus::Domain,
        };
        let migration = Migration::new(m.clone(), &budget, false).map_err(|e| {
            let undetermined = matches!(m.check_functoriality(&budget), FunctorialityVerdict::Undetermined(_));
            fail(if undetermined { CatmigStatus::Unknown } else { status(&e) }, e)
        })?;
        let (output, label) = match kind {
            CatmigKind::Delta => (migration.delta(i), "delta"),
            CatmigKind::Sigma => (migration.sigma(i, &limits).map(|o| o.instance), "sigma"),
            CatmigKind::Pi => (migration.pi(i, &limits), "pi"),
        };
        let output = output.map_err(|e| fail(status(&e), e))?;
        let name = format!("{label}_{m_name}_{i_name}");
        let text = print_source(&SourceFile {
            decls: vec![Decl::Instance(output.to_decl(&name))],
        });
        *result = CString::new(text)
            .map_err(|_| fail(CatmigStatus::Domain, "output contains a NUL byte"))?
            .into_raw();
        Ok(())
    })
}

/// The message of the last failed call on this thread, or null. Owned by
/// the library and valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn catmig_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn catmig_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
