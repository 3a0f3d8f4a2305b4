//! Execution-unit allocation policies.
//!
//! Three policies pick which of `N` identical units serve the `k` ready
//! instructions of a cycle:
//!
//! * [`AllocPolicy::FixedPriority`]: lowest index first, the conventional
//!   scheduler that concentrates wear on unit 0.
//! * [`AllocPolicy::CounterRotate`]: a per-cycle counter picks the leading
//!   unit, `lead = counter mod N`, and the grant wraps from there.
//! * [`AllocPolicy::Algorithm1`]: one toggle bit per unit plus one global
//!   bit. Units whose bit equals the global bit have not yet served in the
//!   current round and are preferred; once every unit has served the global
//!   bit flips and a new round starts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AllocPolicy {
    FixedPriority,
    CounterRotate,
    Algorithm1,
}

impl AllocPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            AllocPolicy::FixedPriority => "fixed-priority",
            AllocPolicy::CounterRotate => "counter-rotate",
            AllocPolicy::Algorithm1 => "algorithm1",
        }
    }
}

impl fmt::Display for AllocPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AllocPolicy {
    type Err = AllocError;

    fn from_str(s: &str) -> Result<Self, AllocError> {
        match s {
            "fixed-priority" => Ok(AllocPolicy::FixedPriority),
            "counter-rotate" => Ok(AllocPolicy::CounterRotate),
            "algorithm1" => Ok(AllocPolicy::Algorithm1),
            other => Err(AllocError::UnknownPolicy(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AllocError {
    #[error("requested {requested} units but only {available} exist")]
    TooMany { requested: usize, available: usize },
    #[error("allocator needs at least one unit")]
    NoUnits,
    #[error("unknown allocation policy `{0}` (expected fixed-priority, counter-rotate or algorithm1)")]
    UnknownPolicy(String),
}

/// Grant vector for one cycle: `selected[i]` is set when unit `i` serves an instruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    selected: Vec<bool>,
}

impl Selection {
    fn empty(n: usize) -> Self {
        Self {
            selected: vec![false; n],
        }
    }

    pub fn contains(&self, unit: usize) -> bool {
        self.selected.get(unit).copied().unwrap_or(false)
    }

    pub fn count(&self) -> usize {
        self.selected.iter().filter(|&&b| b).count()
    }

    /// Selected unit indices in ascending order.
    pub fn units(&self) -> Vec<usize> {
        self.selected
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    pub fn as_bits(&self) -> &[bool] {
        &self.selected
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocator {
    policy: AllocPolicy,
    ex_bits: Vec<bool>,
    global_bit: bool,
    // Counter-rotate keeps `counter mod N` directly.
    lead: usize,
    usage: Vec<u64>,
}

impl Allocator {
    pub fn new(policy: AllocPolicy, num_units: usize) -> Result<Self, AllocError> {
        if num_units == 0 {
            return Err(AllocError::NoUnits);
        }
        Ok(Self {
            policy,
            ex_bits: vec![false; num_units],
            global_bit: false,
            lead: 0,
            usage: vec![0; num_units],
        })
    }

    pub fn policy(&self) -> AllocPolicy {
        self.policy
    }

    pub fn num_units(&self) -> usize {
        self.usage.len()
    }

    pub fn ex_bits(&self) -> &[bool] {
        &self.ex_bits
    }

    pub fn global_bit(&self) -> bool {
        self.global_bit
    }

    pub fn usage(&self) -> &[u64] {
        &self.usage
    }

    pub fn usage_snapshot(&self) -> Vec<u64> {
        self.usage.clone()
    }

    pub fn reset(&mut self) {
        self.ex_bits.iter_mut().for_each(|b| *b = false);
        self.global_bit = false;
        self.lead = 0;
        self.usage.iter_mut().for_each(|u| *u = 0);
    }

    /// Advances the cycle counter over `cycles` cycles in which nothing was
    /// issued. Only the counter-rotate policy observes idle cycles.
    pub fn idle(&mut self, cycles: u64) {
        if self.policy == AllocPolicy::CounterRotate {
            let n = self.num_units() as u64;
            self.lead = ((self.lead as u64 + cycles % n) % n) as usize;
        }
    }

    /// Grants `k` units for one cycle and updates the usage counters.
    pub fn allocate(&mut self, k: usize) -> Result<Selection, AllocError> {
        let n = self.num_units();
        if k > n {
            return Err(AllocError::TooMany {
                requested: k,
                available: n,
            });
        }
        let selection = match self.policy {
            AllocPolicy::FixedPriority => {
                let mut sel = Selection::empty(n);
                sel.selected[..k].iter_mut().for_each(|b| *b = true);
                sel
            }
            AllocPolicy::CounterRotate => {
                let mut sel = Selection::empty(n);
                for off in 0..k {
                    sel.selected[(self.lead + off) % n] = true;
                }
                self.lead = (self.lead + 1) % n;
                sel
            }
            AllocPolicy::Algorithm1 => self.allocate_toggle(k),
        };
        for (u, &b) in self.usage.iter_mut().zip(&selection.selected) {
            if b {
                *u += 1;
            }
        }
        Ok(selection)
    }

    fn allocate_toggle(&mut self, k: usize) -> Selection {
        let n = self.num_units();
        let mut sel = Selection::empty(n);
        let fresh = self.ex_bits.iter().filter(|&&b| b == self.global_bit).count();
        if k < fresh {
            let mut remaining = k;
            for i in 0..n {
                if remaining == 0 {
                    break;
                }
                if self.ex_bits[i] == self.global_bit {
                    sel.selected[i] = true;
                    remaining -= 1;
                }
            }
        } else {
            let mut extra = k - fresh;
            for i in 0..n {
                if self.ex_bits[i] == self.global_bit {
                    sel.selected[i] = true;
                } else if extra > 0 {
                    sel.selected[i] = true;
                    extra -= 1;
                }
            }
            self.global_bit = !self.global_bit;
        }
        for (bit, &s) in self.ex_bits.iter_mut().zip(&sel.selected) {
            if s {
                *bit = !*bit;
            }
        }
        sel
    }
}
