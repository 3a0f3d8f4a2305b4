//! Replays the checked-in fuzz seeds through the same entry points the fuzz
//! targets exercise, so the corpus stays meaningful on stable toolchains.

use std::fs;
use std::path::PathBuf;

use emaware::run::RunConfigFile;
use emaware::stats;
use emaware::workload::{self, GenSpec};
use emaware::HierarchyConfig;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn text(bytes: &[u8]) -> &str {
    std::str::from_utf8(bytes).unwrap()
}

#[test]
fn trace_seeds() {
    for (name, data) in seeds("parse_trace") {
        let parsed = workload::parse_trace(&data);
        match name.as_str() {
            "decreasing" | "malformed" => assert!(parsed.is_err(), "{name}"),
            _ => {
                let events = parsed.unwrap_or_else(|e| panic!("{name}: {e}"));
                let again = workload::parse_trace_str(&workload::serialize_trace(&events)).unwrap();
                assert_eq!(again, events, "{name}");
            }
        }
    }
}

#[test]
fn gen_spec_seeds_are_valid() {
    for (name, data) in seeds("gen_spec_json") {
        let spec = GenSpec::from_json(text(&data)).unwrap_or_else(|e| panic!("{name}: {e}"));
        spec.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(workload::generate(&spec).unwrap().len() as u64, spec.length);
    }
}

#[test]
fn hierarchy_seeds_are_valid() {
    for (name, data) in seeds("hierarchy_config_json") {
        let cfg = HierarchyConfig::from_json(text(&data)).unwrap_or_else(|e| panic!("{name}: {e}"));
        cfg.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn run_config_seeds_parse() {
    for (name, data) in seeds("run_config_json") {
        RunConfigFile::from_json(text(&data)).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn report_seeds_round_trip() {
    for (name, data) in seeds("report_json") {
        let reports = stats::from_json(text(&data)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(stats::from_json(&stats::to_json(&reports)).unwrap(), reports, "{name}");
    }
}
