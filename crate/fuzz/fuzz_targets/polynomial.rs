#![no_main]

use libfuzzer_sys::fuzz_target;
use ybx::poly::{Params, Polynomial};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let params = Params::new(["k1", "k2", "k3"]).unwrap();
    if let Ok(p) = Polynomial::parse(&params, text) {
        let printed = p.to_string();
        let back = Polynomial::parse(&params, &printed).expect("printed form parses");
        assert_eq!(back, p);
    }
});
