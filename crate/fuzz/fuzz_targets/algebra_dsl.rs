#![no_main]

use libfuzzer_sys::fuzz_target;
use ybx::dsl::parse_algebra;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(doc) = parse_algebra(text) else { return };
    let printed = doc.to_string();
    let back = parse_algebra(&printed).expect("printed document parses");
    assert_eq!(back, doc);
    if doc.dim() <= 8 {
        let _ = doc.validate();
    }
});
