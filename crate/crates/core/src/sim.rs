//! Trace replay through baseline and EM-aware variants of each structure.

use serde::{Deserialize, Serialize};

use crate::alu::{AllocError, AllocPolicy, Allocator};
use crate::cache::{CacheConfigError, Hierarchy, HierarchyConfig};
use crate::regfile::{RegFileError, RingMember, RingPreset, RotatingRegFile, DEFAULT_ROTATION_PERIOD};
use crate::stats::{improvement_report, StatsError, StructureReport};
use crate::workload::{Event, Payload};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AluConfig {
    #[serde(default = "default_units")]
    pub units: usize,
    #[serde(default = "default_alu_baseline")]
    pub baseline: AllocPolicy,
    #[serde(default = "default_alu_aware")]
    pub aware: AllocPolicy,
}

fn default_units() -> usize {
    3
}
fn default_alu_baseline() -> AllocPolicy {
    AllocPolicy::FixedPriority
}
fn default_alu_aware() -> AllocPolicy {
    AllocPolicy::Algorithm1
}

impl Default for AluConfig {
    fn default() -> Self {
        Self {
            units: default_units(),
            baseline: default_alu_baseline(),
            aware: default_alu_aware(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegFileConfig {
    #[serde(default = "default_ring")]
    pub ring: RingPreset,
    /// Cycles between rotations of the aware register file.
    #[serde(default = "default_rf_period")]
    pub rotation_period: u64,
    #[serde(default)]
    pub count_rotation_shifts: bool,
}

fn default_ring() -> RingPreset {
    RingPreset::Gpr16
}
fn default_rf_period() -> u64 {
    DEFAULT_ROTATION_PERIOD
}

impl Default for RegFileConfig {
    fn default() -> Self {
        Self {
            ring: default_ring(),
            rotation_period: default_rf_period(),
            count_rotation_shifts: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AluRun {
    pub baseline: Allocator,
    pub aware: Allocator,
    /// Issue records whose ready count exceeded the number of units.
    pub clamped_issues: u64,
}

/// Replays ALU issue records. Each record is one scheduling cycle; cycles
/// without a record are idle. Ready counts above the unit count issue at
/// full width.
pub fn replay_alu(events: &[Event], cfg: &AluConfig) -> Result<AluRun, AllocError> {
    let mut baseline = Allocator::new(cfg.baseline, cfg.units)?;
    let mut aware = Allocator::new(cfg.aware, cfg.units)?;
    let mut clamped_issues = 0;
    let mut next_cycle = 0u64;
    for e in events {
        if let Payload::AluIssue { ready_count } = e.payload {
            let gap = e.cycle.saturating_sub(next_cycle);
            baseline.idle(gap);
            aware.idle(gap);
            let mut k = ready_count as usize;
            if k > cfg.units {
                k = cfg.units;
                clamped_issues += 1;
            }
            baseline.allocate(k)?;
            aware.allocate(k)?;
            next_cycle = e.cycle + 1;
        }
    }
    Ok(AluRun {
        baseline,
        aware,
        clamped_issues,
    })
}

#[derive(Debug, Clone)]
pub struct RegFileRun {
    pub baseline: RotatingRegFile,
    pub aware: RotatingRegFile,
    /// Register writes to registers outside the ring.
    pub unmapped_writes: u64,
}

/// Replays register writes. The aware file rotates whenever the trace
/// crosses a multiple of the rotation period; the baseline never rotates.
pub fn replay_regfile(events: &[Event], cfg: &RegFileConfig) -> Result<RegFileRun, RegFileError> {
    let members = cfg.ring.members();
    let mut baseline = RotatingRegFile::new(members.clone(), cfg.rotation_period)?;
    let mut aware = RotatingRegFile::new(members, cfg.rotation_period)?;
    aware.set_count_rotation_shifts(cfg.count_rotation_shifts);
    let mut next_rotation = cfg.rotation_period;
    let mut unmapped_writes = 0;
    for e in events {
        if let Payload::RegWrite { class, arch_id } = e.payload {
            while e.cycle >= next_rotation {
                aware.rotate();
                next_rotation = next_rotation.saturating_add(cfg.rotation_period);
            }
            match baseline.ring_index(RingMember { class, arch_id }) {
                Some(idx) => {
                    baseline.write(idx, e.cycle)?;
                    aware.write(idx, e.cycle)?;
                }
                None => unmapped_writes += 1,
            }
        }
    }
    Ok(RegFileRun {
        baseline,
        aware,
        unmapped_writes,
    })
}

#[derive(Debug, Clone)]
pub struct CacheRun {
    pub baseline: Hierarchy,
    pub aware: Hierarchy,
}

/// Replays memory accesses through a non-rotating copy of `cfg` and through `cfg` itself.
pub fn replay_cache(events: &[Event], cfg: &HierarchyConfig) -> Result<CacheRun, CacheConfigError> {
    let mut baseline = Hierarchy::new(&cfg.without_rotation())?;
    let mut aware = Hierarchy::new(cfg)?;
    for e in events {
        if let Payload::MemAccess {
            kind,
            address,
            space,
        } = e.payload
        {
            baseline.access(address, kind, space);
            aware.access(address, kind, space);
        }
    }
    Ok(CacheRun { baseline, aware })
}

impl AluRun {
    pub fn reports(&self) -> Result<Vec<StructureReport>, StatsError> {
        Ok(vec![improvement_report(
            self.baseline.usage(),
            self.aware.usage(),
            "alu",
        )?])
    }
}

impl RegFileRun {
    pub fn reports(&self, ring: RingPreset) -> Result<Vec<StructureReport>, StatsError> {
        Ok(vec![improvement_report(
            self.baseline.phys_writes(),
            self.aware.phys_writes(),
            &format!("regfile-{ring}"),
        )?])
    }
}

impl CacheRun {
    /// Data-entry and tag rows for every level, never merged.
    pub fn reports(&self) -> Result<Vec<StructureReport>, StatsError> {
        let mut out = Vec::new();
        for (b, a) in self.baseline.levels().iter().zip(self.aware.levels()) {
            let name = &b.config().name;
            out.push(improvement_report(b.line_writes(), a.line_writes(), name)?);
            out.push(improvement_report(
                b.set_writes(),
                a.set_writes(),
                &format!("{name}-tag"),
            )?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::Improvement;
    use crate::workload::{parse_trace, AccessKind, RegClass, Space};

    #[test]
    fn alu_replay_reproduces_worked_example() {
        let events = parse_trace(b"0 A 0\n1 A 2\n2 A 2\n3 A 3\n").unwrap();
        let run = replay_alu(&events, &AluConfig::default()).unwrap();
        assert_eq!(run.aware.usage(), &[3, 2, 2]);
        assert_eq!(run.baseline.usage(), &[3, 3, 1]);
        assert_eq!(run.clamped_issues, 0);
    }

    #[test]
    fn alu_replay_clamps_and_counts_idle_cycles() {
        let cfg = AluConfig {
            units: 3,
            baseline: AllocPolicy::FixedPriority,
            aware: AllocPolicy::CounterRotate,
        };
        // Cycles 1 and 2 are idle, so the counter leads with unit 0 again at cycle 3.
        let events = parse_trace(b"0 A 1\n3 A 1\n4 A 9\n").unwrap();
        let run = replay_alu(&events, &cfg).unwrap();
        assert_eq!(run.aware.usage(), &[3, 1, 1]);
        assert_eq!(run.clamped_issues, 1);
    }

    #[test]
    fn regfile_replay_levels_a_hot_register() {
        let events: Vec<Event> = (0..100)
            .map(|cycle| Event {
                cycle,
                payload: Payload::RegWrite {
                    class: RegClass::Gpr,
                    arch_id: 0,
                },
            })
            .collect();
        let cfg = RegFileConfig {
            ring: RingPreset::Gpr16,
            rotation_period: 25,
            count_rotation_shifts: false,
        };
        let run = replay_regfile(&events, &cfg).unwrap();
        assert_eq!(&run.aware.phys_writes()[..4], &[25, 25, 25, 25]);
        assert_eq!(run.baseline.phys_writes()[0], 100);
        let rep = run.reports(cfg.ring).unwrap();
        assert_eq!(rep[0].structure, "regfile-gpr16");
        assert_eq!(rep[0].mtf_improvement, Improvement::Finite(3.0));
    }

    #[test]
    fn regfile_replay_counts_unmapped_writes() {
        let events = parse_trace(b"0 R FLAGS 0\n1 R SP 0\n2 R GPR 3\n").unwrap();
        let run = replay_regfile(&events, &RegFileConfig::default()).unwrap();
        assert_eq!(run.unmapped_writes, 2);
        let cfg = RegFileConfig {
            ring: RingPreset::GprFlagsSp,
            ..RegFileConfig::default()
        };
        let run = replay_regfile(&events, &cfg).unwrap();
        assert_eq!(run.unmapped_writes, 0);
        assert_eq!(run.baseline.phys_writes()[16], 1);
        assert_eq!(run.baseline.phys_writes()[17], 1);
    }

    #[test]
    fn cache_replay_emits_data_and_tag_rows() {
        let events = vec![Event {
            cycle: 0,
            payload: Payload::MemAccess {
                kind: AccessKind::Write,
                address: 0,
                space: Space::Data,
            },
        }];
        let run = replay_cache(&events, &HierarchyConfig::default()).unwrap();
        let reports = run.reports().unwrap();
        let names: Vec<&str> = reports.iter().map(|r| r.structure.as_str()).collect();
        assert_eq!(
            names,
            [
                "dtlb", "dtlb-tag", "itlb", "itlb-tag", "stlb", "stlb-tag", "l1d", "l1d-tag", "l1i", "l1i-tag",
                "l2", "l2-tag", "l3", "l3-tag"
            ]
        );
        assert_eq!(reports[6].num_entries, 512);
        assert_eq!(reports[7].num_entries, 64);
    }
}
