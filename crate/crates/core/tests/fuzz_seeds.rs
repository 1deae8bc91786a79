//! Replays the checked-in fuzz seeds through the same properties the fuzz
//! targets assert.

mod common;

use std::path::PathBuf;

use ybx::dsl::{
    export_rmatrix, import_matrix_market, import_rmatrix_json, import_rmatrix_text, load_input, parse_algebra,
    ExportFormat,
};
use ybx::poly::{Params, Polynomial};

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = common::manifest_dir().join("../../fuzz/corpus").join(target);
    let mut v: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| {
            let text = String::from_utf8_lossy(&std::fs::read(&p).unwrap()).into_owned();
            (p, text)
        })
        .collect();
    v.sort();
    assert!(!v.is_empty(), "no seeds for {target}");
    v
}

#[test]
fn polynomial_seeds() {
    let params = Params::new(["k1", "k2", "k3"]).unwrap();
    for (path, text) in seeds("polynomial") {
        let p = Polynomial::parse(&params, &text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(Polynomial::parse(&params, &p.to_string()).unwrap(), p);
    }
}

#[test]
fn algebra_seeds() {
    let mut parsed = 0;
    for (_, text) in seeds("algebra_dsl") {
        if let Ok(doc) = parse_algebra(&text) {
            assert_eq!(parse_algebra(&doc.to_string()).unwrap(), doc);
            let _ = doc.validate();
            parsed += 1;
        }
    }
    assert!(parsed >= 5);
}

#[test]
fn rmatrix_seeds() {
    for (path, text) in seeds("rmatrix_json") {
        let r = import_rmatrix_json(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let json = export_rmatrix(&r, ExportFormat::Json).unwrap();
        assert_eq!(import_rmatrix_json(&json).unwrap().matrix(), r.matrix());
    }
    for (path, text) in seeds("matrix_market") {
        let r = import_matrix_market(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let mm = export_rmatrix(&r, ExportFormat::Mm).unwrap();
        assert_eq!(import_matrix_market(&mm).unwrap().matrix(), r.matrix());
    }
    for (path, text) in seeds("rmatrix_text") {
        let r = import_rmatrix_text(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let out = export_rmatrix(&r, ExportFormat::Dsl).unwrap();
        assert_eq!(import_rmatrix_text(&out).unwrap().matrix(), r.matrix());
    }
    for (path, text) in seeds("load_input") {
        load_input(&text, None).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

#[test]
fn truncated_seeds_do_not_panic() {
    for target in [
        "algebra_dsl",
        "rmatrix_json",
        "matrix_market",
        "rmatrix_text",
        "load_input",
    ] {
        for (_, text) in seeds(target) {
            for cut in (0..text.len()).filter(|&i| text.is_char_boundary(i)) {
                let _ = load_input(&text[..cut], None);
            }
        }
    }
}
