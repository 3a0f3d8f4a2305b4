//! Rotating architectural register file.
//!
//! A ring of `N` architectural registers is backed by `N` physical slots. A
//! modulo counter (the rotator) offsets the mapping, `phys = (arch + rotator)
//! mod N`. Each rotation bumps the rotator and shifts every stored value one
//! slot forward so that reads stay architecturally transparent while the
//! write traffic of a hot register walks over every physical slot.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::workload::RegClass;

/// Default rotation trigger, in cycles.
pub const DEFAULT_ROTATION_PERIOD: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegFileError {
    #[error("register index {index} out of range for a ring of {size}")]
    OutOfRange { index: usize, size: usize },
    #[error("ring must contain at least one register")]
    EmptyRing,
    #[error("register {0:?} appears more than once in the ring")]
    DuplicateMember(RingMember),
    #[error("rotation period must be positive")]
    ZeroPeriod,
    #[error("unknown ring preset `{0}` (expected gpr16, gpr-flags-sp or fp32)")]
    UnknownPreset(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingMember {
    pub class: RegClass,
    pub arch_id: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RingPreset {
    #[serde(rename = "gpr16")]
    Gpr16,
    #[serde(rename = "gpr-flags-sp")]
    GprFlagsSp,
    #[serde(rename = "fp32")]
    Fp32,
}

impl RingPreset {
    pub fn as_str(self) -> &'static str {
        match self {
            RingPreset::Gpr16 => "gpr16",
            RingPreset::GprFlagsSp => "gpr-flags-sp",
            RingPreset::Fp32 => "fp32",
        }
    }

    /// Ring order. FLAGS and SP take the last two indices when present.
    pub fn members(self) -> Vec<RingMember> {
        let regs = |class, count| (0..count).map(move |arch_id| RingMember { class, arch_id });
        match self {
            RingPreset::Gpr16 => regs(RegClass::Gpr, 16).collect(),
            RingPreset::GprFlagsSp => regs(RegClass::Gpr, 16)
                .chain(regs(RegClass::Flags, 1))
                .chain(regs(RegClass::Sp, 1))
                .collect(),
            RingPreset::Fp32 => regs(RegClass::Fp, 32).collect(),
        }
    }
}

impl fmt::Display for RingPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RingPreset {
    type Err = RegFileError;

    fn from_str(s: &str) -> Result<Self, RegFileError> {
        match s {
            "gpr16" => Ok(RingPreset::Gpr16),
            "gpr-flags-sp" => Ok(RingPreset::GprFlagsSp),
            "fp32" => Ok(RingPreset::Fp32),
            other => Err(RegFileError::UnknownPreset(other.to_string())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RotatingRegFile {
    members: Vec<RingMember>,
    index: HashMap<RingMember, usize>,
    values: Vec<u64>,
    phys_writes: Vec<u64>,
    rotator: usize,
    rotations_done: u64,
    rotation_period: u64,
    count_rotation_shifts: bool,
}

impl RotatingRegFile {
    pub fn new(members: Vec<RingMember>, rotation_period: u64) -> Result<Self, RegFileError> {
        if members.is_empty() {
            return Err(RegFileError::EmptyRing);
        }
        if rotation_period == 0 {
            return Err(RegFileError::ZeroPeriod);
        }
        let mut index = HashMap::with_capacity(members.len());
        for (i, m) in members.iter().enumerate() {
            if index.insert(*m, i).is_some() {
                return Err(RegFileError::DuplicateMember(*m));
            }
        }
        let n = members.len();
        Ok(Self {
            members,
            index,
            values: vec![0; n],
            phys_writes: vec![0; n],
            rotator: 0,
            rotations_done: 0,
            rotation_period,
            count_rotation_shifts: false,
        })
    }

    pub fn from_preset(preset: RingPreset, rotation_period: u64) -> Result<Self, RegFileError> {
        Self::new(preset.members(), rotation_period)
    }

    /// Plain `0..n` ring of general-purpose registers.
    pub fn with_size(n: usize, rotation_period: u64) -> Result<Self, RegFileError> {
        let members = (0..n as u32)
            .map(|arch_id| RingMember {
                class: RegClass::Gpr,
                arch_id,
            })
            .collect();
        Self::new(members, rotation_period)
    }

    /// Charges every value moved by a rotation shift as a physical write.
    pub fn set_count_rotation_shifts(&mut self, on: bool) {
        self.count_rotation_shifts = on;
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn rotator(&self) -> usize {
        self.rotator
    }

    pub fn rotations_done(&self) -> u64 {
        self.rotations_done
    }

    pub fn rotation_period(&self) -> u64 {
        self.rotation_period
    }

    pub fn members(&self) -> &[RingMember] {
        &self.members
    }

    pub fn phys_writes(&self) -> &[u64] {
        &self.phys_writes
    }

    pub fn ring_index(&self, member: RingMember) -> Option<usize> {
        self.index.get(&member).copied()
    }

    pub fn map(&self, arch_index: usize) -> Result<usize, RegFileError> {
        let n = self.size();
        if arch_index >= n {
            return Err(RegFileError::OutOfRange {
                index: arch_index,
                size: n,
            });
        }
        Ok((arch_index + self.rotator) % n)
    }

    pub fn write(&mut self, arch_index: usize, value: u64) -> Result<(), RegFileError> {
        let phys = self.map(arch_index)?;
        self.values[phys] = value;
        self.phys_writes[phys] += 1;
        Ok(())
    }

    pub fn read(&self, arch_index: usize) -> Result<u64, RegFileError> {
        Ok(self.values[self.map(arch_index)?])
    }

    pub fn rotate(&mut self) {
        let n = self.size();
        self.rotator = (self.rotator + 1) % n;
        self.rotations_done += 1;
        // Slot p moves to p+1 so that arch a, now at (a + rotator) mod N, keeps its value.
        self.values.rotate_right(1);
        if self.count_rotation_shifts && n > 1 {
            self.phys_writes.iter_mut().for_each(|w| *w += 1);
        }
    }

    /// Physical slot contents, for inspection.
    pub fn physical_values(&self) -> &[u64] {
        &self.values
    }
}
