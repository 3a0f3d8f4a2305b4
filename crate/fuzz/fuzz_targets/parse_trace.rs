#![no_main]

use emaware::workload::{parse_trace, parse_trace_str, serialize_trace};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(events) = parse_trace(data) {
        // Canonical text must parse back to the same events.
        let text = serialize_trace(&events);
        assert_eq!(parse_trace_str(&text).unwrap(), events);
    }
});
