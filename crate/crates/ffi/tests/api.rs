use std::ffi::{CStr, CString};
use std::ptr;

use catmig_ffi::*;

const SOURCE: &str = include_str!("../../../samples/empdept.cql");
const LOOPS: &str = include_str!("../../../samples/loops.cql");

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> Option<String> {
    let p = catmig_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned())
}

fn parse(src: &str) -> *mut CatmigWorkspace {
    let mut ws = ptr::null_mut();
    let status = unsafe { catmig_workspace_parse(c(src).as_ptr(), &mut ws) };
    assert_eq!(status, CatmigStatus::Ok, "{:?}", last_error());
    ws
}

#[test]
fn check_and_prove_on_the_sample() {
    let ws = parse(SOURCE);
    unsafe {
        let mut n = 99;
        assert_eq!(catmig_check(ws, c("PaperVerbatim").as_ptr(), &mut n), CatmigStatus::Ok);
        assert_eq!(n, 2);
        assert_eq!(catmig_check(ws, c("Corrected").as_ptr(), &mut n), CatmigStatus::Ok);
        assert_eq!(n, 0);
        assert!(last_error().is_none());

        let mut p = CatmigProof::Unknown;
        let eq = c("admin.works.admin.works = id:Dept");
        assert_eq!(catmig_prove(ws, c("S").as_ptr(), eq.as_ptr(), &mut p), CatmigStatus::Ok);
        assert_eq!(p, CatmigProof::Proven);
        assert_eq!(catmig_prove(ws, c("S").as_ptr(), c("mgr = id:Emp").as_ptr(), &mut p), CatmigStatus::Ok);
        assert_eq!(p, CatmigProof::Refuted);
        assert_eq!(catmig_prove(ws, c("S").as_ptr(), c("mgr = = x").as_ptr(), &mut p), CatmigStatus::Parse);
        assert_eq!(catmig_prove(ws, c("S").as_ptr(), c("admin = mgr").as_ptr(), &mut p), CatmigStatus::Validation);
        assert!(last_error().unwrap().contains("endpoint"));
        catmig_workspace_free(ws);
    }
}

#[test]
fn map_check_and_migrate() {
    let ws = parse(LOOPS);
    unsafe {
        let mut v = CatmigFunctoriality::Undetermined;
        assert_eq!(catmig_map_check(ws, c("Forget").as_ptr(), &mut v), CatmigStatus::Ok);
        assert_eq!(v, CatmigFunctoriality::NotFunctorial);
        assert_eq!(catmig_map_check(ws, c("Keep").as_ptr(), &mut v), CatmigStatus::Ok);
        assert_eq!(v, CatmigFunctoriality::Functorial);

        let mut out = ptr::null_mut();
        let status = catmig_migrate(ws, CatmigKind::Sigma, c("Into").as_ptr(), c("One").as_ptr(), &mut out);
        assert_eq!(status, CatmigStatus::Ok, "{:?}", last_error());
        let text = CStr::from_ptr(out).to_str().unwrap().to_owned();
        catmig_string_free(out);
        assert_eq!(
            text,
            "instance sigma_Into_One on Idem {\n  B = {a, !0};\n  nxt = {a -> !0, !0 -> !0};\n}\n"
        );

        let status = catmig_migrate(ws, CatmigKind::Sigma, c("IntoFree").as_ptr(), c("One").as_ptr(), &mut out);
        assert_eq!(status, CatmigStatus::Domain);
        assert!(out.is_null());
        assert!(last_error().unwrap().contains("chase did not converge"));

        let status = catmig_migrate(ws, CatmigKind::Delta, c("Forget").as_ptr(), c("Fixed").as_ptr(), &mut out);
        assert_eq!(status, CatmigStatus::Domain);
        let status = catmig_migrate(ws, CatmigKind::Delta, c("Keep").as_ptr(), c("One").as_ptr(), &mut out);
        assert_eq!(status, CatmigStatus::Validation);
        let status = catmig_migrate(ws, CatmigKind::Pi, c("Keep").as_ptr(), c("Nope").as_ptr(), &mut out);
        assert_eq!(status, CatmigStatus::NotFound);
        catmig_workspace_free(ws);
    }
}

#[test]
fn bad_inputs_are_reported_not_crashed_on() {
    unsafe {
        let mut ws = ptr::null_mut();
        assert_eq!(catmig_workspace_parse(ptr::null(), &mut ws), CatmigStatus::NullPointer);
        assert_eq!(catmig_workspace_parse(c("schema S {").as_ptr(), &mut ws), CatmigStatus::Parse);
        assert!(ws.is_null());
        let invalid = c("schema S { entities: A; edges: f: A -> B; }");
        assert_eq!(catmig_workspace_parse(invalid.as_ptr(), &mut ws), CatmigStatus::Validation);
        assert!(last_error().unwrap().contains("undeclared node `B`"));
        let bytes = [0xffu8, 0xfe, 0];
        assert_eq!(
            catmig_workspace_parse(bytes.as_ptr().cast(), &mut ws),
            CatmigStatus::InvalidUtf8
        );

        let mut n = 0;
        assert_eq!(catmig_check(ptr::null(), c("I").as_ptr(), &mut n), CatmigStatus::NullPointer);
        let ws = parse(SOURCE);
        assert_eq!(catmig_check(ws, c("Nope").as_ptr(), &mut n), CatmigStatus::NotFound);
        assert_eq!(catmig_check(ws, c("Corrected").as_ptr(), ptr::null_mut()), CatmigStatus::NullPointer);
        catmig_workspace_free(ws);
        catmig_workspace_free(ptr::null_mut());
        catmig_string_free(ptr::null_mut());
    }
}
