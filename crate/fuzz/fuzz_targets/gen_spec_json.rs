#![no_main]

use emaware::workload::{generate, GenSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(mut spec) = GenSpec::from_json(text) else { return };
    if spec.validate().is_err() {
        return;
    }
    spec.length = spec.length.min(256);
    let events = generate(&spec).expect("validated spec must generate");
    assert_eq!(events.len() as u64, spec.length);
});
