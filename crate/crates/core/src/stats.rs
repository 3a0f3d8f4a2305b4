//! Write-distribution statistics and baseline-versus-aware reports.
//!
//! Entries are binned by their write count relative to the hottest entry of
//! the structure: `r = 100 * c / max`, with bins `r <= 25`, `25 < r <= 50`,
//! `50 < r <= 75`, `75 < r <= 90` and `r > 90`. Membership is decided in
//! integer arithmetic so boundary counts land deterministically.

use std::fmt;
use std::io::Write;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const NUM_BINS: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("cannot summarize an empty counter set")]
    Empty,
    #[error("average-to-maximum ratio is undefined when every counter is zero")]
    ZeroMaximum,
    #[error("improvement {0} is not greater than -1")]
    Domain(f64),
    #[error("report I/O failed: {0}")]
    Io(String),
    #[error("malformed report: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WriteHistogram {
    pub bins: [u64; NUM_BINS],
    pub max_writes: u64,
    pub avg_writes: f64,
    pub num_entries: u64,
}

fn bin_of(count: u64, max: u64) -> usize {
    let (c, m) = (count as u128, max as u128);
    if 4 * c <= m {
        0
    } else if 2 * c <= m {
        1
    } else if 4 * c <= 3 * m {
        2
    } else if 10 * c <= 9 * m {
        3
    } else {
        4
    }
}

pub fn histogram(counts: &[u64]) -> Result<WriteHistogram, StatsError> {
    if counts.is_empty() {
        return Err(StatsError::Empty);
    }
    let max = counts.iter().copied().max().unwrap_or(0);
    let mut bins = [0u64; NUM_BINS];
    for &c in counts {
        bins[bin_of(c, max)] += 1;
    }
    Ok(WriteHistogram {
        bins,
        max_writes: max,
        avg_writes: mean(counts),
        num_entries: counts.len() as u64,
    })
}

fn mean(counts: &[u64]) -> f64 {
    let total: u128 = counts.iter().map(|&c| c as u128).sum();
    total as f64 / counts.len() as f64
}

pub fn avg_to_max(counts: &[u64]) -> Result<f64, StatsError> {
    if counts.is_empty() {
        return Err(StatsError::Empty);
    }
    let max = counts.iter().copied().max().unwrap_or(0);
    if max == 0 {
        return Err(StatsError::ZeroMaximum);
    }
    Ok(mean(counts) / max as f64)
}

/// MTF improvement of the aware variant over the baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Improvement {
    Finite(f64),
    /// The baseline has a hotspot while the aware run never wrote at all.
    Unbounded,
}

impl Improvement {
    pub fn finite(self) -> Option<f64> {
        match self {
            Improvement::Finite(v) => Some(v),
            Improvement::Unbounded => None,
        }
    }

    /// Hotspot ratio improvement. Two idle structures compare as equal.
    pub fn from_maxima(max_baseline: u64, max_aware: u64) -> Self {
        match (max_baseline, max_aware) {
            (0, 0) => Improvement::Finite(0.0),
            (_, 0) => Improvement::Unbounded,
            (b, a) => Improvement::Finite(b as f64 / a as f64 - 1.0),
        }
    }
}

impl fmt::Display for Improvement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Improvement::Finite(v) => write!(f, "{v}"),
            Improvement::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for Improvement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Improvement::Finite(v) => s.serialize_f64(*v),
            Improvement::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for Improvement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Improvement;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"unbounded\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Improvement, E> {
                Ok(Improvement::Finite(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Improvement, E> {
                Ok(Improvement::Finite(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Improvement, E> {
                Ok(Improvement::Finite(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Improvement, E> {
                if v == "unbounded" {
                    Ok(Improvement::Unbounded)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// One row of a comparison report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub structure: String,
    pub num_entries: u64,
    pub max_baseline: u64,
    pub max_aware: u64,
    /// `None` when the structure saw no writes.
    pub avg_to_max_baseline: Option<f64>,
    pub avg_to_max_aware: Option<f64>,
    pub bins_baseline: [u64; NUM_BINS],
    pub bins_aware: [u64; NUM_BINS],
    pub mtf_improvement: Improvement,
    pub histogram_baseline: WriteHistogram,
    pub histogram_aware: WriteHistogram,
}

pub fn improvement_report(
    baseline: &[u64],
    aware: &[u64],
    structure: &str,
) -> Result<StructureReport, StatsError> {
    let hb = histogram(baseline)?;
    let ha = histogram(aware)?;
    Ok(StructureReport {
        structure: structure.to_string(),
        num_entries: hb.num_entries,
        max_baseline: hb.max_writes,
        max_aware: ha.max_writes,
        avg_to_max_baseline: avg_to_max(baseline).ok(),
        avg_to_max_aware: avg_to_max(aware).ok(),
        bins_baseline: hb.bins,
        bins_aware: ha.bins,
        mtf_improvement: Improvement::from_maxima(hb.max_writes, ha.max_writes),
        histogram_baseline: hb,
        histogram_aware: ha,
    })
}

/// Geometric mean taken over `1 + improvement`, minus one.
pub fn geo_mean(improvements: &[f64]) -> Result<f64, StatsError> {
    if improvements.is_empty() {
        return Err(StatsError::Empty);
    }
    let mut log_sum = 0.0;
    for &x in improvements {
        if x <= -1.0 || !x.is_finite() {
            return Err(StatsError::Domain(x));
        }
        log_sum += (1.0 + x).ln();
    }
    Ok((log_sum / improvements.len() as f64).exp() - 1.0)
}

pub const CSV_HEADER: [&str; 18] = [
    "structure",
    "num_entries",
    "max_baseline",
    "max_aware",
    "avg_to_max_baseline",
    "avg_to_max_aware",
    "bins_baseline_0_25",
    "bins_baseline_25_50",
    "bins_baseline_50_75",
    "bins_baseline_75_90",
    "bins_baseline_90_100",
    "bins_aware_0_25",
    "bins_aware_25_50",
    "bins_aware_50_75",
    "bins_aware_75_90",
    "bins_aware_90_100",
    "mtf_improvement",
    "mtf_improvement_pct",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(out: W, reports: &[StructureReport]) -> Result<(), StatsError> {
    let io = |e: csv::Error| StatsError::Io(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in reports {
        let mut row = vec![
            r.structure.clone(),
            r.num_entries.to_string(),
            r.max_baseline.to_string(),
            r.max_aware.to_string(),
            opt(r.avg_to_max_baseline),
            opt(r.avg_to_max_aware),
        ];
        row.extend(r.bins_baseline.iter().map(u64::to_string));
        row.extend(r.bins_aware.iter().map(u64::to_string));
        row.push(r.mtf_improvement.to_string());
        row.push(match r.mtf_improvement {
            Improvement::Finite(v) => format!("{:.1}", v * 100.0),
            Improvement::Unbounded => "unbounded".into(),
        });
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| StatsError::Io(e.to_string()))
}

pub fn to_json(reports: &[StructureReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("reports contain only finite numbers");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<Vec<StructureReport>, StatsError> {
    serde_json::from_str(text).map_err(|e| StatsError::Parse(e.to_string()))
}

/// Per-structure geometric mean over several runs' reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergedRow {
    pub structure: String,
    pub runs: usize,
    pub geo_mean_improvement: Improvement,
}

/// Groups rows by structure name, in order of first appearance.
pub fn merge_reports(runs: &[Vec<StructureReport>]) -> Result<Vec<MergedRow>, StatsError> {
    let mut order: Vec<String> = Vec::new();
    let mut values: Vec<Vec<Improvement>> = Vec::new();
    for run in runs {
        for r in run {
            let idx = match order.iter().position(|s| *s == r.structure) {
                Some(i) => i,
                None => {
                    order.push(r.structure.clone());
                    values.push(Vec::new());
                    order.len() - 1
                }
            };
            values[idx].push(r.mtf_improvement);
        }
    }
    order
        .into_iter()
        .zip(values)
        .map(|(structure, vals)| {
            let runs = vals.len();
            let geo_mean_improvement = if vals.contains(&Improvement::Unbounded) {
                Improvement::Unbounded
            } else {
                let finite: Vec<f64> = vals.iter().filter_map(|v| v.finite()).collect();
                Improvement::Finite(geo_mean(&finite)?)
            };
            Ok(MergedRow {
                structure,
                runs,
                geo_mean_improvement,
            })
        })
        .collect()
}

pub fn write_merged_csv<W: Write>(out: W, rows: &[MergedRow]) -> Result<(), StatsError> {
    let io = |e: csv::Error| StatsError::Io(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["structure", "runs", "geo_mean_improvement", "geo_mean_improvement_pct"])
        .map_err(io)?;
    for r in rows {
        let pct = match r.geo_mean_improvement {
            Improvement::Finite(v) => format!("{:.1}", v * 100.0),
            Improvement::Unbounded => "unbounded".into(),
        };
        w.write_record([
            r.structure.clone(),
            r.runs.to_string(),
            r.geo_mean_improvement.to_string(),
            pct,
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| StatsError::Io(e.to_string()))
}
