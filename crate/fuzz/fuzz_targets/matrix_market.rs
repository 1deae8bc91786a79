#![no_main]

use libfuzzer_sys::fuzz_target;
use ybx::dsl::{export_rmatrix, import_matrix_market, ExportFormat};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = import_matrix_market(text) {
        let mm = export_rmatrix(&r, ExportFormat::Mm).expect("numeric by construction");
        let back = import_matrix_market(&mm).expect("exported mm imports");
        assert_eq!(back.matrix(), r.matrix());
    }
});
