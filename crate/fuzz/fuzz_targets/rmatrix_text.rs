#![no_main]

use libfuzzer_sys::fuzz_target;
use ybx::dsl::{export_rmatrix, import_rmatrix_text, ExportFormat};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = import_rmatrix_text(text) {
        let out = export_rmatrix(&r, ExportFormat::Dsl).unwrap();
        let back = import_rmatrix_text(&out).expect("exported text imports");
        assert_eq!(back.matrix(), r.matrix());
    }
});
