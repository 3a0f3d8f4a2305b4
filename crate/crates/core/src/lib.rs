//! Electromigration-aware resource allocation: analytical RMS-EM lifetime
//! models plus trace-driven simulators that compare conventional and
//! wear-leveling allocation for ALUs, register files, caches and TLBs.

pub mod alu;
pub mod cache;
pub mod em;
pub mod regfile;
pub mod rng;
pub mod run;
pub mod sim;
pub mod stats;
pub mod workload;

pub use alu::{AllocPolicy, Allocator, Selection};
pub use cache::{CacheConfig, Hierarchy, HierarchyConfig, RotatingCache};
pub use regfile::{RingPreset, RotatingRegFile};
pub use run::{RunConfig, RunError, TraceSource};
pub use stats::{Improvement, StructureReport, WriteHistogram};
pub use workload::{Event, GenSpec, Payload};
