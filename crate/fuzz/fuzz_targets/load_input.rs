#![no_main]

use libfuzzer_sys::fuzz_target;
use ybx::dsl::load_input;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = load_input(text, None);
    }
});
