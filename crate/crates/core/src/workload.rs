//! Trace events, the text trace format, and seeded synthetic generators.
//!
//! One event per line:
//!
//! ```text
//! <cycle> A <ready_count>
//! <cycle> R <GPR|FP|FLAGS|SP> <arch_id>
//! <cycle> M <R|W> <address> <D|I>
//! ```
//!
//! Lines whose first non-blank character is `#` are comments; blank lines
//! are skipped. Addresses may be decimal or `0x`-prefixed hex. Cycles must be
//! non-decreasing and a cycle carries at most one `A` record.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::Xoshiro256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum RegClass {
    Gpr,
    Fp,
    Flags,
    Sp,
}

impl RegClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RegClass::Gpr => "GPR",
            RegClass::Fp => "FP",
            RegClass::Flags => "FLAGS",
            RegClass::Sp => "SP",
        }
    }
}

impl FromStr for RegClass {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "GPR" => Ok(RegClass::Gpr),
            "FP" => Ok(RegClass::Fp),
            "FLAGS" => Ok(RegClass::Flags),
            "SP" => Ok(RegClass::Sp),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AccessKind {
    Read,
    Write,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    Data,
    Instr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Payload {
    AluIssue { ready_count: u32 },
    RegWrite { class: RegClass, arch_id: u32 },
    MemAccess { kind: AccessKind, address: u64, space: Space },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub cycle: u64,
    pub payload: Payload,
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.payload {
            Payload::AluIssue { ready_count } => write!(f, "{} A {}", self.cycle, ready_count),
            Payload::RegWrite { class, arch_id } => {
                write!(f, "{} R {} {}", self.cycle, class.as_str(), arch_id)
            }
            Payload::MemAccess {
                kind,
                address,
                space,
            } => {
                let k = match kind {
                    AccessKind::Read => 'R',
                    AccessKind::Write => 'W',
                };
                let s = match space {
                    Space::Data => 'D',
                    Space::Instr => 'I',
                };
                write!(f, "{} M {} {} {}", self.cycle, k, address, s)
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: cycle {cycle} precedes previous cycle {previous}")]
    DecreasingCycle { line: usize, cycle: u64, previous: u64 },
    #[error("line {line}: second ALU issue record in cycle {cycle}")]
    DuplicateAluIssue { line: usize, cycle: u64 },
    #[error("trace is not valid UTF-8 (byte offset {offset})")]
    Encoding { offset: usize },
}

fn malformed(line: usize, message: impl Into<String>) -> TraceError {
    TraceError::Malformed {
        line,
        message: message.into(),
    }
}

fn parse_u64(token: &str, what: &str, line: usize) -> Result<u64, TraceError> {
    token
        .parse::<u64>()
        .map_err(|_| malformed(line, format!("invalid {what} `{token}`")))
}

fn parse_address(token: &str, line: usize) -> Result<u64, TraceError> {
    let parsed = match token.strip_prefix("0x").or_else(|| token.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => token.parse::<u64>(),
    };
    parsed.map_err(|_| malformed(line, format!("invalid address `{token}`")))
}

fn parse_line(text: &str, line: usize) -> Result<Event, TraceError> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let expect = |n: usize| {
        if tokens.len() == n {
            Ok(())
        } else {
            Err(malformed(
                line,
                format!("expected {n} fields for `{}` record, found {}", tokens[1], tokens.len()),
            ))
        }
    };
    if tokens.len() < 2 {
        return Err(malformed(line, "expected `<cycle> <A|R|M> ...`"));
    }
    let cycle = parse_u64(tokens[0], "cycle", line)?;
    let payload = match tokens[1] {
        "A" => {
            expect(3)?;
            let ready_count = tokens[2]
                .parse::<u32>()
                .map_err(|_| malformed(line, format!("invalid ready count `{}`", tokens[2])))?;
            Payload::AluIssue { ready_count }
        }
        "R" => {
            expect(4)?;
            let class = tokens[2]
                .parse::<RegClass>()
                .map_err(|_| malformed(line, format!("unknown register class `{}`", tokens[2])))?;
            let arch_id = tokens[3]
                .parse::<u32>()
                .map_err(|_| malformed(line, format!("invalid register id `{}`", tokens[3])))?;
            Payload::RegWrite { class, arch_id }
        }
        "M" => {
            expect(5)?;
            let kind = match tokens[2] {
                "R" => AccessKind::Read,
                "W" => AccessKind::Write,
                other => return Err(malformed(line, format!("unknown access kind `{other}`"))),
            };
            let address = parse_address(tokens[3], line)?;
            let space = match tokens[4] {
                "D" => Space::Data,
                "I" => Space::Instr,
                other => return Err(malformed(line, format!("unknown address space `{other}`"))),
            };
            Payload::MemAccess {
                kind,
                address,
                space,
            }
        }
        other => return Err(malformed(line, format!("unknown record type `{other}`"))),
    };
    Ok(Event { cycle, payload })
}

/// Parses a whole trace held in memory.
pub fn parse_trace(input: &[u8]) -> Result<Vec<Event>, TraceError> {
    let text = std::str::from_utf8(input).map_err(|e| TraceError::Encoding {
        offset: e.valid_up_to(),
    })?;
    parse_trace_str(text)
}

pub fn parse_trace_str(text: &str) -> Result<Vec<Event>, TraceError> {
    let mut events = Vec::new();
    let mut last_cycle = 0u64;
    let mut last_alu_cycle: Option<u64> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let event = parse_line(trimmed, line)?;
        if event.cycle < last_cycle {
            return Err(TraceError::DecreasingCycle {
                line,
                cycle: event.cycle,
                previous: last_cycle,
            });
        }
        if let Payload::AluIssue { .. } = event.payload {
            if last_alu_cycle == Some(event.cycle) {
                return Err(TraceError::DuplicateAluIssue {
                    line,
                    cycle: event.cycle,
                });
            }
            last_alu_cycle = Some(event.cycle);
        }
        last_cycle = event.cycle;
        events.push(event);
    }
    Ok(events)
}

pub fn write_trace<W: Write>(mut out: W, events: &[Event]) -> io::Result<()> {
    for e in events {
        writeln!(out, "{e}")?;
    }
    Ok(())
}

pub fn serialize_trace(events: &[Event]) -> String {
    let mut buf = Vec::with_capacity(events.len() * 16);
    write_trace(&mut buf, events).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("trace text is ASCII")
}

/// Parameters of a synthetic workload. The JSON form is flat:
/// `{"seed": 1, "length": 1000, "kind": "zipf_reg_writes", "num_regs": 16, "zipf_s": 1.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub seed: u64,
    pub length: u64,
    #[serde(flatten)]
    pub kind: GenKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GenKind {
    /// Register writes whose rank-`r` register (0-based) has weight `(r+1)^-zipf_s`.
    ZipfRegWrites {
        num_regs: u32,
        zipf_s: f64,
        #[serde(default = "default_reg_class")]
        reg_class: RegClass,
    },
    /// Memory accesses over `working_set_lines` lines where the first
    /// `ceil(hot_fraction * lines)` lines are `hot_weight` times as likely.
    SkewedAddrs {
        working_set_lines: u64,
        hot_fraction: f64,
        hot_weight: f64,
        line_bytes: u64,
        #[serde(default)]
        base_address: u64,
        #[serde(default = "default_write_fraction")]
        write_fraction: f64,
        #[serde(default = "default_space")]
        space: Space,
    },
    /// One ALU issue record per cycle; `width_distribution[w]` is the
    /// relative weight of issuing `w` instructions, for `w` in `0..=max_width`.
    AluBursts {
        max_width: u32,
        width_distribution: Vec<f64>,
    },
}

fn default_reg_class() -> RegClass {
    RegClass::Gpr
}

fn default_write_fraction() -> f64 {
    0.5
}

fn default_space() -> Space {
    Space::Data
}

#[derive(Debug, Error, PartialEq)]
#[error("invalid workload spec: {0}")]
pub struct GenSpecError(pub String);

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), GenSpecError> {
    if ok {
        Ok(())
    } else {
        Err(GenSpecError(msg()))
    }
}

impl GenSpec {
    pub fn from_json(text: &str) -> Result<Self, GenSpecError> {
        let spec: GenSpec = serde_json::from_str(text).map_err(|e| GenSpecError(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), GenSpecError> {
        match &self.kind {
            GenKind::ZipfRegWrites {
                num_regs, zipf_s, ..
            } => {
                check(*num_regs >= 1, || "num_regs must be >= 1".into())?;
                check(zipf_s.is_finite() && *zipf_s > 0.0, || {
                    format!("zipf_s must be > 0, got {zipf_s}")
                })
            }
            GenKind::SkewedAddrs {
                working_set_lines,
                hot_fraction,
                hot_weight,
                line_bytes,
                base_address,
                write_fraction,
                ..
            } => {
                check(*working_set_lines >= 1, || "working_set_lines must be >= 1".into())?;
                check(*hot_fraction > 0.0 && *hot_fraction <= 1.0, || {
                    format!("hot_fraction must lie in (0, 1], got {hot_fraction}")
                })?;
                check(hot_weight.is_finite() && *hot_weight >= 1.0, || {
                    format!("hot_weight must be >= 1, got {hot_weight}")
                })?;
                check(line_bytes.is_power_of_two(), || {
                    format!("line_bytes must be a power of two, got {line_bytes}")
                })?;
                check((0.0..=1.0).contains(write_fraction), || {
                    format!("write_fraction must lie in [0, 1], got {write_fraction}")
                })?;
                let span = working_set_lines.checked_mul(*line_bytes);
                check(
                    span.and_then(|s| base_address.checked_add(s)).is_some(),
                    || "working set exceeds the 64-bit address space".into(),
                )
            }
            GenKind::AluBursts {
                max_width,
                width_distribution,
            } => {
                check(*max_width >= 1, || "max_width must be >= 1".into())?;
                check(width_distribution.len() == *max_width as usize + 1, || {
                    format!(
                        "width_distribution needs {} weights (widths 0..={max_width}), got {}",
                        *max_width as usize + 1,
                        width_distribution.len()
                    )
                })?;
                check(
                    width_distribution.iter().all(|w| w.is_finite() && *w >= 0.0),
                    || "width_distribution weights must be finite and >= 0".into(),
                )?;
                check(width_distribution.iter().sum::<f64>() > 0.0, || {
                    "width_distribution must have positive total weight".into()
                })
            }
        }
    }
}

/// Inverse-CDF sampler over a fixed table of nonnegative weights.
#[derive(Debug, Clone)]
pub struct CdfSampler {
    cumulative: Vec<f64>,
}

impl CdfSampler {
    pub fn new(weights: impl IntoIterator<Item = f64>) -> Self {
        let mut acc = 0.0;
        let cumulative: Vec<f64> = weights
            .into_iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Self { cumulative }
    }

    pub fn sample(&self, rng: &mut Xoshiro256) -> usize {
        let total = *self.cumulative.last().expect("non-empty weight table");
        let u = rng.next_f64() * total;
        let idx = self.cumulative.partition_point(|&c| c <= u);
        // Guards against u landing on the total through rounding.
        idx.min(self.cumulative.len() - 1)
    }
}

/// Expands a spec into its event sequence. Event `i` sits at cycle `i`.
pub fn generate(spec: &GenSpec) -> Result<Vec<Event>, GenSpecError> {
    spec.validate()?;
    let mut rng = Xoshiro256::seed_from_u64(spec.seed);
    let len = spec.length as usize;
    let mut events = Vec::with_capacity(len);
    match &spec.kind {
        GenKind::ZipfRegWrites {
            num_regs,
            zipf_s,
            reg_class,
        } => {
            let sampler = CdfSampler::new((1..=*num_regs).map(|r| (r as f64).powf(-zipf_s)));
            for cycle in 0..spec.length {
                let arch_id = sampler.sample(&mut rng) as u32;
                events.push(Event {
                    cycle,
                    payload: Payload::RegWrite {
                        class: *reg_class,
                        arch_id,
                    },
                });
            }
        }
        GenKind::SkewedAddrs {
            working_set_lines,
            hot_fraction,
            hot_weight,
            line_bytes,
            base_address,
            write_fraction,
            space,
        } => {
            let lines = *working_set_lines;
            let hot_lines = ((hot_fraction * lines as f64).ceil() as u64).clamp(1, lines);
            let cold_lines = lines - hot_lines;
            let hot_mass = hot_lines as f64 * hot_weight;
            let p_hot = hot_mass / (hot_mass + cold_lines as f64);
            for cycle in 0..spec.length {
                let line = if cold_lines == 0 || rng.next_f64() < p_hot {
                    rng.below(hot_lines)
                } else {
                    hot_lines + rng.below(cold_lines)
                };
                let kind = if rng.next_f64() < *write_fraction {
                    AccessKind::Write
                } else {
                    AccessKind::Read
                };
                events.push(Event {
                    cycle,
                    payload: Payload::MemAccess {
                        kind,
                        address: base_address + line * line_bytes,
                        space: *space,
                    },
                });
            }
        }
        GenKind::AluBursts {
            width_distribution, ..
        } => {
            let sampler = CdfSampler::new(width_distribution.iter().copied());
            for cycle in 0..spec.length {
                let ready_count = sampler.sample(&mut rng) as u32;
                events.push(Event {
                    cycle,
                    payload: Payload::AluIssue { ready_count },
                });
            }
        }
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_input_is_empty_trace() {
        assert_eq!(parse_trace(b"").unwrap(), vec![]);
        assert_eq!(parse_trace(b"# only a comment\n\n").unwrap(), vec![]);
    }

    #[test]
    fn parses_single_alu_issue() {
        let events = parse_trace(b"5 A 3").unwrap();
        assert_eq!(
            events,
            vec![Event {
                cycle: 5,
                payload: Payload::AluIssue { ready_count: 3 }
            }]
        );
    }

    #[test]
    fn parses_two_events_in_one_cycle() {
        let events = parse_trace(b"0 R GPR 0\n0 M W 4096 D").unwrap();
        assert_eq!(events.len(), 2);
        assert_eq!(
            events[0].payload,
            Payload::RegWrite {
                class: RegClass::Gpr,
                arch_id: 0
            }
        );
        assert_eq!(
            events[1].payload,
            Payload::MemAccess {
                kind: AccessKind::Write,
                address: 4096,
                space: Space::Data
            }
        );
        assert!(events.iter().all(|e| e.cycle == 0));
    }

    #[test]
    fn hex_addresses_and_comments() {
        let events = parse_trace(b"  # header\n1 M R 0x1000 I\n").unwrap();
        assert_eq!(
            events[0].payload,
            Payload::MemAccess {
                kind: AccessKind::Read,
                address: 4096,
                space: Space::Instr
            }
        );
    }

    #[test]
    fn malformed_lines_report_line_number() {
        let cases: [&[u8]; 8] = [
            b"0 A 1\nx A 1",
            b"0 A 1\n1 Q 1",
            b"0 A 1\n1 A",
            b"0 A 1\n1 R XMM 3",
            b"0 A 1\n1 M X 0 D",
            b"0 A 1\n1 M R 0 Z",
            b"0 A 1\n1 M R 0 D extra",
            b"0 A 1\n1",
        ];
        for input in cases {
            match parse_trace(input) {
                Err(TraceError::Malformed { line, .. }) => assert_eq!(line, 2, "{:?}", input),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn rejects_decreasing_cycles_and_double_issue() {
        assert_eq!(
            parse_trace(b"5 A 1\n4 A 1"),
            Err(TraceError::DecreasingCycle {
                line: 2,
                cycle: 4,
                previous: 5
            })
        );
        assert_eq!(
            parse_trace(b"5 A 1\n5 R SP 0\n5 A 2"),
            Err(TraceError::DuplicateAluIssue { line: 3, cycle: 5 })
        );
        assert!(matches!(parse_trace(b"\xff\xfe"), Err(TraceError::Encoding { .. })));
    }

    #[test]
    fn gen_spec_json_and_validation() {
        let spec = GenSpec::from_json(
            r#"{"seed": 9, "length": 10, "kind": "zipf_reg_writes", "num_regs": 4, "zipf_s": 1.0}"#,
        )
        .unwrap();
        assert_eq!(spec.seed, 9);
        assert!(matches!(spec.kind, GenKind::ZipfRegWrites { reg_class: RegClass::Gpr, .. }));

        let bad = [
            r#"{"seed": 1, "length": 10, "kind": "zipf_reg_writes", "num_regs": 4, "zipf_s": 0.0}"#,
            r#"{"seed": 1, "length": 10, "kind": "skewed_addrs", "working_set_lines": 8, "hot_fraction": 0.0, "hot_weight": 2, "line_bytes": 64}"#,
            r#"{"seed": 1, "length": 10, "kind": "skewed_addrs", "working_set_lines": 8, "hot_fraction": 0.5, "hot_weight": 0.5, "line_bytes": 64}"#,
            r#"{"seed": 1, "length": 10, "kind": "skewed_addrs", "working_set_lines": 8, "hot_fraction": 0.5, "hot_weight": 2, "line_bytes": 48}"#,
            r#"{"seed": 1, "length": 10, "kind": "alu_bursts", "max_width": 0, "width_distribution": [1.0]}"#,
            r#"{"seed": 1, "length": 10, "kind": "alu_bursts", "max_width": 2, "width_distribution": [1.0, 1.0]}"#,
            r#"{"seed": 1, "length": 10, "kind": "alu_bursts", "max_width": 1, "width_distribution": [0.0, 0.0]}"#,
            r#"{"seed": 1, "length": 10, "kind": "nope"}"#,
        ];
        for text in bad {
            assert!(GenSpec::from_json(text).is_err(), "{text}");
        }
    }

    fn zipf4(seed: u64, length: u64) -> GenSpec {
        GenSpec {
            seed,
            length,
            kind: GenKind::ZipfRegWrites {
                num_regs: 4,
                zipf_s: 1.0,
                reg_class: RegClass::Gpr,
            },
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate(&zipf4(3, 5000)).unwrap();
        let b = generate(&zipf4(3, 5000)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate(&zipf4(4, 5000)).unwrap());
        assert!(generate(&zipf4(3, 0)).unwrap().is_empty());
    }

    #[test]
    fn zipf_rank_zero_share_matches_harmonic_sum() {
        // Analytic share of rank 0 for s = 1, four registers: 1 / H_4 = 12/25.
        let expected: f64 = 1.0 / (1.0 + 1.0 / 2.0 + 1.0 / 3.0 + 1.0 / 4.0);
        assert!((expected - 0.48).abs() < 1e-12);
        let events = generate(&zipf4(2024, 1_000_000)).unwrap();
        let hits = events
            .iter()
            .filter(|e| matches!(e.payload, Payload::RegWrite { arch_id: 0, .. }))
            .count();
        let share = hits as f64 / events.len() as f64;
        assert!((share - expected).abs() <= 0.02, "share {share}");
    }

    #[test]
    fn degenerate_skew_is_uniform() {
        let lines = 64u64;
        let spec = GenSpec {
            seed: 11,
            length: 1_000_000,
            kind: GenKind::SkewedAddrs {
                working_set_lines: lines,
                hot_fraction: 1.0,
                hot_weight: 1.0,
                line_bytes: 64,
                base_address: 0,
                write_fraction: 0.5,
                space: Space::Data,
            },
        };
        let mut counts = vec![0u64; lines as usize];
        for e in generate(&spec).unwrap() {
            if let Payload::MemAccess { address, .. } = e.payload {
                counts[(address / 64) as usize] += 1;
            }
        }
        let expected = 1_000_000.0 / lines as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 99.9th percentile of chi-square with 63 degrees of freedom is ~103.4.
        assert!(chi2 < 103.4, "chi2 {chi2}");
    }

    #[test]
    fn skew_concentrates_on_hot_lines() {
        let spec = GenSpec {
            seed: 5,
            length: 100_000,
            kind: GenKind::SkewedAddrs {
                working_set_lines: 100,
                hot_fraction: 0.1,
                hot_weight: 9.0,
                line_bytes: 64,
                base_address: 1 << 20,
                write_fraction: 1.0,
                space: Space::Data,
            },
        };
        let events = generate(&spec).unwrap();
        let hot = events
            .iter()
            .filter(|e| match e.payload {
                Payload::MemAccess { address, kind, .. } => {
                    assert_eq!(kind, AccessKind::Write);
                    address < (1 << 20) + 10 * 64
                }
                _ => false,
            })
            .count();
        // 10 lines * 9 against 90 lines * 1 -> half the traffic.
        let share = hot as f64 / events.len() as f64;
        assert!((share - 0.5).abs() < 0.01, "{share}");
    }

    #[test]
    fn alu_bursts_follow_width_weights() {
        let spec = GenSpec {
            seed: 1,
            length: 200_000,
            kind: GenKind::AluBursts {
                max_width: 3,
                width_distribution: vec![0.0, 1.0, 0.0, 1.0],
            },
        };
        let events = generate(&spec).unwrap();
        let mut seen = [0u64; 4];
        for (i, e) in events.iter().enumerate() {
            assert_eq!(e.cycle, i as u64);
            if let Payload::AluIssue { ready_count } = e.payload {
                seen[ready_count as usize] += 1;
            }
        }
        assert_eq!(seen[0] + seen[2], 0);
        assert!((seen[1] as f64 / 200_000.0 - 0.5).abs() < 0.01);
    }

    fn arb_event() -> impl Strategy<Value = Payload> {
        let class = prop_oneof![
            Just(RegClass::Gpr),
            Just(RegClass::Fp),
            Just(RegClass::Flags),
            Just(RegClass::Sp)
        ];
        prop_oneof![
            any::<u32>().prop_map(|ready_count| Payload::AluIssue { ready_count }),
            (class, any::<u32>()).prop_map(|(class, arch_id)| Payload::RegWrite { class, arch_id }),
            (any::<bool>(), any::<u64>(), any::<bool>()).prop_map(|(w, address, i)| Payload::MemAccess {
                kind: if w { AccessKind::Write } else { AccessKind::Read },
                address,
                space: if i { Space::Instr } else { Space::Data },
            }),
        ]
    }

    proptest! {
        #[test]
        fn serialize_then_parse_is_identity(raw in proptest::collection::vec((0u64..3, arb_event()), 0..64)) {
            let mut cycle = 0u64;
            let mut last_alu = None;
            let mut events = Vec::new();
            for (gap, payload) in raw {
                cycle += gap;
                if matches!(payload, Payload::AluIssue { .. }) {
                    if last_alu == Some(cycle) {
                        continue;
                    }
                    last_alu = Some(cycle);
                }
                events.push(Event { cycle, payload });
            }
            let text = serialize_trace(&events);
            prop_assert_eq!(parse_trace(text.as_bytes()).unwrap(), events);
        }
    }
}
