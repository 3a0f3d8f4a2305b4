#![no_main]

use emaware::stats::{from_json, merge_reports, to_json, write_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(reports) = from_json(text) else { return };
    let mut csv = Vec::new();
    let _ = write_csv(&mut csv, &reports);
    let _ = merge_reports(&[reports.clone(), reports.clone()]);
    // JSON cannot carry non-finite floats, so the round trip is always exact.
    assert_eq!(from_json(&to_json(&reports)).unwrap(), reports);
});
