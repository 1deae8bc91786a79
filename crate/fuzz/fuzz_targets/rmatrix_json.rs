#![no_main]

use libfuzzer_sys::fuzz_target;
use ybx::dsl::{export_rmatrix, import_rmatrix_json, ExportFormat};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = import_rmatrix_json(text) {
        let json = export_rmatrix(&r, ExportFormat::Json).unwrap();
        let back = import_rmatrix_json(&json).expect("exported json imports");
        assert_eq!(back.matrix(), r.matrix());
    }
});
