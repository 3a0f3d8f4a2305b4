#![no_main]

use emaware::cache::Hierarchy;
use emaware::workload::{AccessKind, Space};
use emaware::HierarchyConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = HierarchyConfig::from_json(text) else { return };
    if cfg.validate().is_err() {
        return;
    }
    let entries: u64 = cfg.levels().iter().map(|c| c.sets.saturating_mul(c.ways as u64)).sum();
    if entries > 1 << 20 {
        return;
    }
    let mut h = Hierarchy::new(&cfg).expect("validated config must build");
    for (i, b) in data.iter().enumerate().take(64) {
        let kind = if b & 1 == 0 { AccessKind::Read } else { AccessKind::Write };
        let space = if b & 2 == 0 { Space::Data } else { Space::Instr };
        h.access((*b as u64) << (i % 24), kind, space);
    }
});
